use std::fmt;
use std::str::FromStr;

use super::partition::Partition;
use crate::error::{Error, Result};
use crate::synth::rng::SplitMix64;
use crate::tensor::ClsSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[derive(Default)]
pub enum KeyframePolicy {
    /// Member with the median frame index (lower median for even counts).
    #[default]
    TemporalMiddle,
    /// Member whose CLS vector is closest to the cluster mean.
    CentroidNearest,
    /// Seeded uniform pick.
    RandomUniform { seed: u64 },
}

impl KeyframePolicy {
    pub fn name(&self) -> &'static str {
        match self {
            Self::TemporalMiddle => "temporal-middle",
            Self::CentroidNearest => "centroid-nearest",
            Self::RandomUniform { .. } => "random-uniform",
        }
    }

    /// Parses a policy name; `seed` is only used by `random-uniform`.
    pub fn parse(name: &str, seed: u64) -> Result<Self> {
        match name {
            "temporal-middle" => Ok(Self::TemporalMiddle),
            "centroid-nearest" => Ok(Self::CentroidNearest),
            "random-uniform" => Ok(Self::RandomUniform { seed }),
            other => Err(Error::Config(format!("unknown keyframe policy {other:?}"))),
        }
    }
}


impl FromStr for KeyframePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, 0)
    }
}

impl fmt::Display for KeyframePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Selected frames (0-based, ascending) and the cluster each came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyframeSet {
    pub frames: Vec<usize>,
    pub clusters: Vec<usize>,
}

impl KeyframeSet {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// One keyframe per cluster.
pub fn select_keyframes(p: &Partition, cls: &ClsSequence, policy: KeyframePolicy) -> KeyframeSet {
    select_keyframes_per_cluster(p, cls, policy, 1)
}

/// Up to `per_cluster` keyframes per cluster: the members are cut into that
/// many contiguous runs and the policy picks one frame from each run.
pub fn select_keyframes_per_cluster(
    p: &Partition,
    cls: &ClsSequence,
    policy: KeyframePolicy,
    per_cluster: usize,
) -> KeyframeSet {
    let per_cluster = per_cluster.max(1);
    let mut rng = match policy {
        KeyframePolicy::RandomUniform { seed } => Some(SplitMix64::new(seed)),
        _ => None,
    };
    let mut picks: Vec<(usize, usize)> = Vec::new();
    for (cluster, members) in p.members().iter().enumerate() {
        let runs = per_cluster.min(members.len());
        for r in 0..runs {
            let run = &members[r * members.len() / runs..(r + 1) * members.len() / runs];
            let frame = match policy {
                KeyframePolicy::TemporalMiddle => run[(run.len() - 1) / 2],
                KeyframePolicy::CentroidNearest => centroid_nearest(run, cls),
                KeyframePolicy::RandomUniform { .. } => {
                    let rng = rng.as_mut().expect("seeded for random policy");
                    run[rng.below(run.len())]
                }
            };
            picks.push((frame, cluster));
        }
    }
    picks.sort_unstable();
    KeyframeSet {
        frames: picks.iter().map(|&(f, _)| f).collect(),
        clusters: picks.iter().map(|&(_, c)| c).collect(),
    }
}

fn centroid_nearest(members: &[usize], cls: &ClsSequence) -> usize {
    let dim = cls.dim();
    let mut mean = vec![0.0; dim];
    for &m in members {
        for (acc, v) in mean.iter_mut().zip(cls.vector(m)) {
            *acc += v;
        }
    }
    mean.iter_mut().for_each(|v| *v /= members.len() as f64);
    let mut best = (members[0], f64::INFINITY);
    for &m in members {
        let d: f64 = cls
            .vector(m)
            .iter()
            .zip(&mean)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        if d < best.1 {
            best = (m, d);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_cls(n: usize) -> ClsSequence {
        ClsSequence::from_rows(n, 1, &vec![1.0; n]).unwrap()
    }

    #[test]
    fn temporal_middle_medians() {
        let cls = flat_cls(10);
        // members {2..6} and {7, 8}; everything else in its own cluster.
        let p = Partition::from_frame_labels(&[0, 1, 2, 2, 2, 2, 2, 3, 3, 4]);
        let k = select_keyframes(&p, &cls, KeyframePolicy::TemporalMiddle);
        assert_eq!(k.frames, vec![0, 1, 4, 7, 9]);
        assert_eq!(k.clusters, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn two_block_partition() {
        let cls = flat_cls(6);
        let p = Partition::from_frame_labels(&[0, 0, 0, 1, 1, 1]);
        assert_eq!(select_keyframes(&p, &cls, KeyframePolicy::TemporalMiddle).frames, vec![1, 4]);
    }

    #[test]
    fn centroid_nearest_picks_typical_member() {
        let rows = [0.8, 0.6, 1.0, 0.0, 0.0, 1.0];
        let cls = ClsSequence::from_rows(3, 2, &rows).unwrap();
        let p = Partition::from_frame_labels(&[0, 0, 0]);
        // Mean is (0.6, 0.533); frame 0 is closest while the temporal middle is frame 1.
        assert_eq!(select_keyframes(&p, &cls, KeyframePolicy::CentroidNearest).frames, vec![0]);
        assert_eq!(select_keyframes(&p, &cls, KeyframePolicy::TemporalMiddle).frames, vec![1]);
    }

    #[test]
    fn random_uniform_is_seeded() {
        let cls = flat_cls(40);
        let p = Partition::from_frame_labels(&[[0usize; 20], [1; 20]].concat());
        let a = select_keyframes(&p, &cls, KeyframePolicy::RandomUniform { seed: 3 });
        let b = select_keyframes(&p, &cls, KeyframePolicy::RandomUniform { seed: 3 });
        assert_eq!(a, b);
        assert_eq!(a.clusters, vec![0, 1]);
        assert!(a.frames[0] < 20 && a.frames[1] >= 20);
    }

    #[test]
    fn several_per_cluster() {
        let cls = flat_cls(9);
        let p = Partition::from_frame_labels(&[0, 0, 0, 0, 0, 0, 1, 1, 1]);
        let k = select_keyframes_per_cluster(&p, &cls, KeyframePolicy::TemporalMiddle, 2);
        assert_eq!(k.frames, vec![1, 4, 6, 7]);
        assert_eq!(k.clusters, vec![0, 0, 1, 1]);
    }

    #[test]
    fn unknown_policy() {
        assert!(matches!("middle".parse::<KeyframePolicy>(), Err(Error::Config(_))));
        assert_eq!(
            KeyframePolicy::parse("random-uniform", 9).unwrap(),
            KeyframePolicy::RandomUniform { seed: 9 }
        );
    }
}
