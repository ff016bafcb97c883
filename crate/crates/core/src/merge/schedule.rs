use serde::Serialize;

use crate::error::{Error, Result};

/// Per-iteration merge counts taking one frame from `start` tokens to `target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MergeSchedule {
    pub start: usize,
    pub target: usize,
    pub steps: Vec<usize>,
}

impl MergeSchedule {
    /// Greedy schedule: the first step merges at most `first_cap` pairs, every
    /// step merges at most half of the live tokens, and no step overshoots
    /// `target`.
    pub fn greedy(start: usize, target: usize, first_cap: usize) -> Result<Self> {
        if target == 0 || target > start {
            return Err(Error::Config(format!(
                "per-frame target {target} must lie in 1..={start}"
            )));
        }
        if first_cap == 0 {
            return Err(Error::Config("first merge cap must be positive".into()));
        }
        let mut steps = Vec::new();
        let mut live = start;
        while live > target {
            let mut r = (live / 2).min(live - target);
            if steps.is_empty() {
                r = r.min(first_cap);
            }
            steps.push(r);
            live -= r;
        }
        Ok(Self { start, target, steps })
    }

    /// Live token counts before the first and after every step.
    pub fn counts(&self) -> Vec<usize> {
        let mut out = vec![self.start];
        for r in &self.steps {
            out.push(out.last().expect("non-empty") - r);
        }
        out
    }

    pub fn total_merged(&self) -> usize {
        self.steps.iter().sum()
    }
}

/// Budget for `keyframes` frames of `tokens_per_frame` tokens (CLS included)
/// under a total budget: each frame keeps `min(L - 1, floor(budget / K))`
/// patch tokens.
pub fn plan_budget(tokens_per_frame: usize, budget: usize, keyframes: usize, first_cap: usize) -> Result<MergeSchedule> {
    let target = per_frame_target(tokens_per_frame, budget, keyframes)?;
    MergeSchedule::greedy(tokens_per_frame - 1, target, first_cap)
}

pub(crate) fn per_frame_target(tokens_per_frame: usize, budget: usize, keyframes: usize) -> Result<usize> {
    if keyframes == 0 {
        return Err(Error::Config("need at least one keyframe".into()));
    }
    if tokens_per_frame < 2 {
        return Err(Error::Config(format!(
            "tokens per frame must be >= 2, got {tokens_per_frame}"
        )));
    }
    if budget < keyframes {
        return Err(Error::Config(format!(
            "token budget {budget} is smaller than the keyframe count {keyframes}"
        )));
    }
    Ok((tokens_per_frame - 1).min(budget / keyframes))
}
