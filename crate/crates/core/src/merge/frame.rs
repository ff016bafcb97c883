use serde::Serialize;

use super::matching::{bipartite_match, merge_matched, Pooling};
use super::schedule::MergeSchedule;
use super::tokens::TokenSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MergeOptions {
    pub heads: usize,
    pub pooling: Pooling,
}

impl Default for MergeOptions {
    fn default() -> Self {
        Self {
            heads: 16,
            pooling: Pooling::Weighted,
        }
    }
}

/// Compressed tokens of one keyframe plus the pairs merged at each step.
#[derive(Debug, Clone, PartialEq)]
pub struct MergedFrame {
    pub frame: usize,
    pub tokens: TokenSet,
    pub schedule: Vec<usize>,
    pub steps: Vec<Vec<(usize, usize)>>,
}

/// JSON trace of one frame's merges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MergeTrace {
    pub frame: usize,
    pub schedule: Vec<usize>,
    pub steps: Vec<TraceStep>,
    pub provenance: Vec<Vec<usize>>,
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub pairs: Vec<[usize; 2]>,
}

impl MergedFrame {
    pub fn trace(&self) -> MergeTrace {
        MergeTrace {
            frame: self.frame,
            schedule: self.schedule.clone(),
            steps: self
                .steps
                .iter()
                .map(|s| TraceStep {
                    pairs: s.iter().map(|&(p, q)| [p, q]).collect(),
                })
                .collect(),
            provenance: self.tokens.provenance().to_vec(),
            sizes: self.tokens.sizes().to_vec(),
        }
    }
}

/// Runs every step of `schedule` on the patch tokens of frame `frame`.
pub fn compress_frame(
    frame: usize,
    patches: &[f32],
    dim: usize,
    schedule: &MergeSchedule,
    opts: &MergeOptions,
) -> Result<MergedFrame> {
    if dim == 0 || patches.len() != schedule.start * dim {
        return Err(Error::Input(format!(
            "frame {frame}: expected {} patch tokens of dimension {dim}, got {} values",
            schedule.start,
            patches.len()
        )));
    }
    let mut tokens = TokenSet::from_f32(patches, dim)?;
    let mut steps = Vec::with_capacity(schedule.steps.len());
    for &r in &schedule.steps {
        let m = bipartite_match(&tokens, r, opts.heads)?;
        steps.push(m.pairs.iter().map(|p| (p.p, p.q)).collect());
        tokens = merge_matched(&tokens, &m, opts.pooling)?;
    }
    Ok(MergedFrame {
        frame,
        tokens,
        schedule: schedule.steps.clone(),
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(heads: usize) -> MergeOptions {
        MergeOptions {
            heads,
            pooling: Pooling::Weighted,
        }
    }

    #[test]
    fn empty_schedule_is_identity() {
        let patches = [0.5f32, 1.0, -2.0, 3.0, 4.0, 0.25];
        let s = MergeSchedule::greedy(3, 3, 288).unwrap();
        let out = compress_frame(0, &patches, 2, &s, &opts(1)).unwrap();
        assert_eq!(out.tokens.to_f32(), patches.to_vec());
        assert_eq!(out.tokens.sizes(), &[1, 1, 1]);
        assert_eq!(out.tokens.provenance(), &[vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn worked_instance_one_step() {
        let patches = [1.0f32, 0.0, 1.0, 0.0, 0.0, 1.0, 0.6, 0.8];
        let s = MergeSchedule {
            start: 4,
            target: 3,
            steps: vec![1],
        };
        let out = compress_frame(7, &patches, 2, &s, &opts(1)).unwrap();
        assert_eq!(out.tokens.len(), 3);
        assert_eq!(out.tokens.sizes(), &[2, 1, 1]);
        assert_eq!(out.steps, vec![vec![(0, 1)]]);
        let trace = out.trace();
        assert_eq!(trace.frame, 7);
        assert_eq!(trace.provenance, vec![vec![0, 1], vec![2], vec![3]]);
    }

    #[test]
    fn dimension_mismatch() {
        let s = MergeSchedule::greedy(4, 2, 288).unwrap();
        assert!(matches!(
            compress_frame(0, &[1.0; 6], 2, &s, &opts(1)),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn trace_json_shape() {
        let patches: Vec<f32> = (0..16).map(|i| (i as f32 * 0.7).sin() + 1.5).collect();
        let s = MergeSchedule::greedy(8, 3, 288).unwrap();
        let out = compress_frame(2, &patches, 2, &s, &opts(2)).unwrap();
        let v = serde_json::to_value(out.trace()).unwrap();
        assert_eq!(v["schedule"], serde_json::json!([4, 1]));
        assert_eq!(v["steps"].as_array().unwrap().len(), 2);
        assert_eq!(v["steps"][0]["pairs"].as_array().unwrap().len(), 4);
        assert_eq!(v["sizes"].as_array().unwrap().len(), 3);
    }
}
