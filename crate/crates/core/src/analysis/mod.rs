//! Operator-population analysis: tree edit distances, distance matrices,
//! planar embeddings of the pool and rate trajectories.

mod distance;
mod mds;
mod rates;

pub use distance::{pairwise_distances, tree_edit_distance, DistanceMatrix, Normalization};
pub use mds::{embed_snapshots, smacof_embed, write_embedding_csv, Embedding2D, SMACOF_MAX_ITERS, SMACOF_TOL};
pub use rates::{rate_trajectories, RateTrajectories};
