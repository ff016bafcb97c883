//! Synthetic data, reference solvers and evaluation metrics.

pub mod bench;
mod hungarian;
mod metrics;
mod oracle;
pub mod rng;
mod video;

pub use bench::{run_bench, BenchConfig, BenchOutcome, BenchReport};
pub use hungarian::{hungarian_match, Assignment};
pub use metrics::{
    event_coverage, frame_reconstruction_error, mean_pool_frame, partition_accuracy, reconstruction_error,
};
pub use oracle::{exhaustive_match_oracle, ORACLE_MAX_TOKENS};
pub use video::{generate_synthetic_video, EventLayout, GroundTruth, SyntheticSpec};
