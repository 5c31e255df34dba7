use std::io::{self, Write};

use crate::engine::RunTrace;
use crate::{RandomStream, Result};

use super::distance::{pairwise_distances, DistanceMatrix, Normalization};

pub const SMACOF_MAX_ITERS: usize = 300;
pub const SMACOF_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Embedding2D {
    pub points: Vec<[f64; 2]>,
    /// Raw stress of `points`.
    pub stress: f64,
    /// Stress of the initial configuration followed by one entry per
    /// Guttman iteration.
    pub stress_history: Vec<f64>,
}

impl Embedding2D {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        dist(&self.points[i], &self.points[j])
    }
}

fn dist(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn raw_stress(d: &DistanceMatrix, x: &[[f64; 2]]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let r = d.get(i, j) - dist(&x[i], &x[j]);
            s += r * r;
        }
    }
    s
}

/// Stress majorization (SMACOF) in the plane with unit weights, from a
/// uniform start in `[-1, 1]²`. Stops once the relative stress decrease
/// falls below `tol` or after `max_iters` Guttman transforms.
pub fn smacof_embed(d: &DistanceMatrix, rng: &mut RandomStream, max_iters: usize, tol: f64) -> Embedding2D {
    let n = d.len();
    if n == 0 || (0..n).all(|i| d.row(i).iter().all(|&v| v == 0.0)) {
        return Embedding2D {
            points: vec![[0.0; 2]; n],
            stress: 0.0,
            stress_history: vec![0.0],
        };
    }
    let mut x: Vec<[f64; 2]> = (0..n)
        .map(|_| [rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0)])
        .collect();
    let mut stress = raw_stress(d, &x);
    let mut history = vec![stress];
    for _ in 0..max_iters {
        // Guttman transform: x ← B(x)·x / n.
        let mut next = vec![[0.0; 2]; n];
        for i in 0..n {
            let mut acc = [0.0; 2];
            for j in 0..n {
                if i == j {
                    continue;
                }
                let e = dist(&x[i], &x[j]);
                let b = if e > 0.0 { d.get(i, j) / e } else { 0.0 };
                acc[0] += b * (x[i][0] - x[j][0]);
                acc[1] += b * (x[i][1] - x[j][1]);
            }
            next[i] = [acc[0] / n as f64, acc[1] / n as f64];
        }
        let s = raw_stress(d, &next);
        // Only rounding can raise the stress here.
        if s > stress {
            break;
        }
        x = next;
        let prev = stress;
        stress = s;
        history.push(stress);
        if prev == 0.0 || (prev - stress) / prev < tol {
            break;
        }
    }
    Embedding2D {
        points: x,
        stress,
        stress_history: history,
    }
}

/// Embed every snapshot of `trace`.
pub fn embed_snapshots(
    trace: &RunTrace,
    normalization: Normalization,
    rng: &mut RandomStream,
) -> Result<Vec<(usize, Embedding2D)>> {
    trace
        .snapshots()
        .map(|(g, trees)| {
            let d = pairwise_distances(trees, normalization)?;
            Ok((g, smacof_embed(&d, rng, SMACOF_MAX_ITERS, SMACOF_TOL)))
        })
        .collect()
}

/// Rows `generation,tree_index,x,y,stress`, with the header when asked.
pub fn write_embedding_csv<W: Write>(
    mut w: W,
    header: bool,
    generation: usize,
    embedding: &Embedding2D,
) -> io::Result<()> {
    if header {
        writeln!(w, "generation,tree_index,x,y,stress")?;
    }
    for (i, p) in embedding.points.iter().enumerate() {
        writeln!(w, "{generation},{i},{},{},{}", p[0], p[1], embedding.stress)?;
    }
    Ok(())
}
