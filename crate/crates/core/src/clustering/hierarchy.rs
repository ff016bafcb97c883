//! Recursive first-neighbour clustering of frames.
//!
//! Level 0 is the set of connected components of the 1-NN graph over frames.
//! Each further level treats the previous clusters as nodes (unit-normalized
//! mean CLS vector, mean member timestamp), rebuilds the temporally weighted
//! distances with the original frame count, links first neighbours and takes
//! components again, until one cluster remains.
//!
//! With a coherence gate, the levels after level 0 are first built from links
//! whose endpoints have cosine similarity at least the gate. Once no gated
//! link is left, the last gated level is remembered as the coherent level and
//! the plain recursion carries on to a single cluster.

use super::distance::{unit_cosine, weighted_distances};
use super::graph::{component_labels, connected_components, nearest_neighbor, one_nn_graph, NNGraph};
use super::partition::Partition;
use crate::error::{Error, Result};
use crate::tensor::ClsSequence;

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionHierarchy {
    levels: Vec<Partition>,
    coherent_level: Option<usize>,
}

impl PartitionHierarchy {
    /// Checks strictly decreasing cluster counts, nesting, and a final
    /// single-cluster level.
    pub fn from_levels(levels: Vec<Partition>) -> Result<Self> {
        let first = levels
            .first()
            .ok_or_else(|| Error::Input("hierarchy needs at least one level".into()))?;
        let n = first.len();
        for pair in levels.windows(2) {
            let (fine, coarse) = (&pair[0], &pair[1]);
            if coarse.len() != n || fine.len() != n {
                return Err(Error::Input("levels cover different node counts".into()));
            }
            if coarse.k() >= fine.k() {
                return Err(Error::Input(format!(
                    "cluster counts must strictly decrease, got {} then {}",
                    fine.k(),
                    coarse.k()
                )));
            }
            let mut parent = vec![None; fine.k()];
            for (&f, &c) in fine.labels().iter().zip(coarse.labels()) {
                match parent[f] {
                    None => parent[f] = Some(c),
                    Some(p) if p != c => {
                        return Err(Error::Input(format!(
                            "cluster {f} is split across coarser clusters {p} and {c}"
                        )))
                    }
                    _ => {}
                }
            }
        }
        if levels.last().map(Partition::k) != Some(1) {
            return Err(Error::Input("last hierarchy level must have one cluster".into()));
        }
        Ok(Self {
            levels,
            coherent_level: None,
        })
    }

    pub fn levels(&self) -> &[Partition] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> &Partition {
        &self.levels[i]
    }

    pub fn cluster_counts(&self) -> Vec<usize> {
        self.levels.iter().map(Partition::k).collect()
    }

    /// Last level built under the coherence gate, if one was used.
    pub fn coherent_level(&self) -> Option<usize> {
        self.coherent_level
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HierarchyOptions {
    /// Minimum cosine between cluster means for a link above level 0.
    pub coherence_gate: Option<f64>,
}

impl Default for HierarchyOptions {
    fn default() -> Self {
        Self {
            coherence_gate: Some(DEFAULT_COHERENCE_GATE),
        }
    }
}

pub const DEFAULT_COHERENCE_GATE: f64 = 0.5;

/// Plain hierarchy, no gate.
pub fn build_hierarchy(cls: &ClsSequence) -> Result<PartitionHierarchy> {
    build_hierarchy_with(cls, &HierarchyOptions { coherence_gate: None })
}

pub fn build_hierarchy_with(cls: &ClsSequence, opts: &HierarchyOptions) -> Result<PartitionHierarchy> {
    let w = super::distance::temporal_distance_matrix(cls)?;
    let n_frames = cls.len() as f64;
    let dim = cls.dim();
    let mut levels = vec![connected_components(&one_nn_graph(&w))];
    let mut gate = opts.coherence_gate;
    let mut coherent_level = None;

    while levels.last().expect("non-empty").k() > 1 {
        let current = levels.last().expect("non-empty");
        let features = cluster_means(cls, current);
        let w = weighted_distances(&features, dim, current.cluster_timestamps(), n_frames);
        let k = current.k();
        let graph = match gate {
            Some(min_cos) => {
                let coherent = |i: usize, j: usize| {
                    unit_cosine(&features[i * dim..(i + 1) * dim], &features[j * dim..(j + 1) * dim]) >= min_cos
                };
                NNGraph::from_links(
                    k,
                    (0..k).filter_map(|i| nearest_neighbor(w.row(i), i, |j| coherent(i, j)).map(|j| (i, j))),
                )
            }
            None => one_nn_graph(&w),
        };
        if graph.edges().is_empty() {
            // Only reachable under the gate: nothing coherent left to join.
            coherent_level = Some(levels.len() - 1);
            gate = None;
            continue;
        }
        let node_labels = component_labels(&graph);
        let frame_labels: Vec<usize> = current.labels().iter().map(|&c| node_labels[c]).collect();
        levels.push(Partition::from_frame_labels(&frame_labels));
    }
    if gate.is_some() {
        // The gate never stalled, so gated links alone reached one cluster.
        coherent_level = Some(levels.len() - 1);
    }
    Ok(PartitionHierarchy {
        levels,
        coherent_level,
    })
}

/// Unit-normalized mean CLS vector of each cluster, row-major `k x dim`.
/// A cluster whose mean vanishes keeps a zero row.
pub(crate) fn cluster_means(cls: &ClsSequence, p: &Partition) -> Vec<f64> {
    let dim = cls.dim();
    let mut sums = vec![0.0; p.k() * dim];
    for (i, &l) in p.labels().iter().enumerate() {
        for (s, v) in sums[l * dim..(l + 1) * dim].iter_mut().zip(cls.vector(i)) {
            *s += v;
        }
    }
    for row in sums.chunks_exact_mut(dim) {
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.iter_mut().for_each(|v| *v /= norm);
        }
    }
    sums
}

/// How to pick the working partition out of a hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionRule {
    /// Last level with at least two clusters.
    Penultimate,
    /// The coherent level when it has at least two clusters, otherwise
    /// the penultimate level.
    Coherent,
    /// Explicit level index.
    Level(usize),
}

impl std::str::FromStr for PartitionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "penultimate" => Ok(Self::Penultimate),
            "coherent" => Ok(Self::Coherent),
            other => other
                .parse::<usize>()
                .map(Self::Level)
                .map_err(|_| Error::Config(format!("unknown partition rule {other:?}"))),
        }
    }
}

impl std::fmt::Display for PartitionRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Penultimate => f.write_str("penultimate"),
            Self::Coherent => f.write_str("coherent"),
            Self::Level(i) => write!(f, "{i}"),
        }
    }
}

fn penultimate_index(h: &PartitionHierarchy) -> usize {
    h.levels.iter().rposition(|p| p.k() >= 2).unwrap_or(0)
}

/// The last level with `k >= 2`, or the only level when it already has `k = 1`.
pub fn select_partition(h: &PartitionHierarchy) -> &Partition {
    &h.levels[penultimate_index(h)]
}

pub fn select_level(h: &PartitionHierarchy, rule: PartitionRule) -> Result<usize> {
    match rule {
        PartitionRule::Penultimate => Ok(penultimate_index(h)),
        PartitionRule::Coherent => Ok(match h.coherent_level {
            Some(i) if h.levels[i].k() >= 2 => i,
            _ => penultimate_index(h),
        }),
        PartitionRule::Level(i) if i < h.levels.len() => Ok(i),
        PartitionRule::Level(i) => Err(Error::Config(format!(
            "partition level {i} out of range, hierarchy has {} levels",
            h.levels.len()
        ))),
    }
}
