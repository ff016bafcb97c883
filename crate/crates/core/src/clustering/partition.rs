/// Flat clustering of `n` nodes into `k` clusters.
///
/// Cluster ids are dense and ordered by each cluster's smallest member index.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
    cluster_timestamps: Vec<f64>,
}

impl Partition {
    /// Relabels arbitrary cluster ids in order of first appearance and
    /// computes the mean member timestamp per cluster.
    pub fn from_raw_labels(raw: &[usize], timestamps: &[f64]) -> Self {
        debug_assert_eq!(raw.len(), timestamps.len());
        let mut remap = std::collections::HashMap::new();
        let labels: Vec<usize> = raw
            .iter()
            .map(|r| {
                let next = remap.len();
                *remap.entry(*r).or_insert(next)
            })
            .collect();
        let k = remap.len();
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for (&l, &t) in labels.iter().zip(timestamps) {
            sums[l] += t;
            counts[l] += 1;
        }
        let cluster_timestamps = sums
            .iter()
            .zip(&counts)
            .map(|(s, &c)| s / c as f64)
            .collect();
        Self {
            labels,
            k,
            cluster_timestamps,
        }
    }

    /// Partition of frames `0..n` with the usual 1-based timestamps.
    pub fn from_frame_labels(raw: &[usize]) -> Self {
        let ts: Vec<f64> = (1..=raw.len()).map(|t| t as f64).collect();
        Self::from_raw_labels(raw, &ts)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn cluster_timestamps(&self) -> &[f64] {
        &self.cluster_timestamps
    }

    /// Member indices of each cluster, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }
}
