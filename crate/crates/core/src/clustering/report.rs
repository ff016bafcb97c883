//! JSON form of a clustering result.

use serde::{Deserialize, Serialize};

use super::{KeyframePolicy, KeyframeSet, Partition, PartitionHierarchy};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelDoc {
    pub k: usize,
    pub labels: Vec<usize>,
}

impl From<&Partition> for LevelDoc {
    fn from(p: &Partition) -> Self {
        Self {
            k: p.k(),
            labels: p.labels().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterDocument {
    pub levels: Vec<LevelDoc>,
    pub selected_level: usize,
    pub keyframes: Vec<usize>,
    pub policy: String,
}

impl ClusterDocument {
    pub fn new(h: &PartitionHierarchy, selected_level: usize, keyframes: &KeyframeSet, policy: KeyframePolicy) -> Self {
        Self {
            levels: h.levels().iter().map(LevelDoc::from).collect(),
            selected_level,
            keyframes: keyframes.frames.clone(),
            policy: policy.name().to_string(),
        }
    }
}
