//! Polynomial root finding, multiplicity clustering and root continuation along paths.

mod cluster;
mod solve;
mod track;

pub use cluster::{multiplicity_cluster, Cluster};
pub use solve::{all_roots, RootOptions, RootSet};
pub use track::{
    assign, linear_path, track, track_reciprocal, write_trajectories_csv, BranchTrajectory, CollisionEvent,
    TrackOptions, TrackResult,
};
