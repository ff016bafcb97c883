//! DyTo: training-free token compression for video language models.
//!
//! Frames are grouped into events by a 1-nearest-neighbour hierarchy over
//! their CLS tokens, one keyframe is kept per event, and each keyframe's
//! patch tokens are reduced by repeated bipartite merging until the total
//! fits a token budget.

pub mod clustering;
pub mod error;
pub mod merge;
pub mod pipeline;
pub mod synth;
pub mod tensor;

pub use error::{Error, ErrorCategory, Result};
pub use pipeline::{run_baseline_uniform_pool, run_dyto, run_merge_only, CompressedVideo, Method, PipelineConfig};
pub use tensor::{load_tokens, read_dyt, save_tokens, write_dyt, DytTensor, VideoTokens};
