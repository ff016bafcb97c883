use std::collections::BTreeSet;

use petgraph::unionfind::UnionFind;

use super::distance::DistanceMatrix;
use super::partition::Partition;

/// Undirected first-neighbour graph; edges are stored as `(low, high)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NNGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl NNGraph {
    pub(crate) fn from_links(n: usize, links: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let edges = links
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        Self { n, edges }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }
}

/// Index of the smallest entry of `row` over `j != i` accepted by `allow`;
/// ties go to the smaller index.
pub(crate) fn nearest_neighbor(row: &[f64], i: usize, allow: impl Fn(usize) -> bool) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, &w) in row.iter().enumerate() {
        if j == i || !allow(j) {
            continue;
        }
        match best {
            Some((_, bw)) if w >= bw => {}
            _ => best = Some((j, w)),
        }
    }
    best.map(|(j, _)| j)
}

/// Links every node to its nearest distinct neighbour and symmetrizes.
pub fn one_nn_graph(w: &DistanceMatrix) -> NNGraph {
    let n = w.len();
    NNGraph::from_links(
        n,
        (0..n).filter_map(|i| nearest_neighbor(w.row(i), i, |_| true).map(|j| (i, j))),
    )
}

/// Components of `g` as a partition. Cluster timestamps are the mean of the
/// members' 1-based frame timestamps.
pub fn connected_components(g: &NNGraph) -> Partition {
    let timestamps: Vec<f64> = (1..=g.len()).map(|t| t as f64).collect();
    Partition::from_raw_labels(&component_labels(g), &timestamps)
}

pub(crate) fn component_labels(g: &NNGraph) -> Vec<usize> {
    let mut uf = UnionFind::<usize>::new(g.len());
    for &(a, b) in g.edges() {
        uf.union(a, b);
    }
    uf.into_labeling()
}
