//! Criterion benchmarks for `aoea-core`; see `benches/`.
