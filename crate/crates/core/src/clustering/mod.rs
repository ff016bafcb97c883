//! Temporal event clustering over per-frame CLS tokens.

mod distance;
mod graph;
mod hierarchy;
mod keyframes;
mod partition;
pub mod report;

pub use distance::{temporal_distance_matrix, DistanceMatrix};
pub use graph::{connected_components, one_nn_graph, NNGraph};
pub use hierarchy::{
    build_hierarchy, build_hierarchy_with, select_level, select_partition, HierarchyOptions, PartitionHierarchy,
    PartitionRule, DEFAULT_COHERENCE_GATE,
};
pub use keyframes::{select_keyframes, select_keyframes_per_cluster, KeyframePolicy, KeyframeSet};
pub use partition::Partition;
