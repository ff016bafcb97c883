//! Bipartite token merging within a frame.

mod frame;
mod matching;
mod schedule;
mod similarity;
mod tokens;

pub use frame::{compress_frame, MergeOptions, MergeTrace, MergedFrame, TraceStep};
pub use matching::{bipartite_match, merge_matched, MatchPair, MatchSet, Pooling};
pub use schedule::{plan_budget, MergeSchedule};
pub(crate) use schedule::per_frame_target;
pub use similarity::head_similarity;
pub(crate) use similarity::check_heads;
pub use tokens::TokenSet;
