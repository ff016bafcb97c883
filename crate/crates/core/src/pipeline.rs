//! End-to-end compression: event clustering, keyframes, per-frame merging.
//! Also hosts the uniform-sampling + grid-pooling baseline.

use serde::Serialize;
use serde_json::{json, Value};

use crate::clustering::report::LevelDoc;
use crate::clustering::{
    build_hierarchy_with, select_keyframes_per_cluster, select_level, HierarchyOptions, KeyframePolicy, KeyframeSet,
    Partition, PartitionHierarchy, PartitionRule, DEFAULT_COHERENCE_GATE,
};
use crate::error::{Error, Result};
use crate::merge::{check_heads, compress_frame, per_frame_target, MergeOptions, MergeSchedule, MergedFrame, Pooling, TokenSet};
use crate::tensor::{extract_cls_sequence, DytTensor, VideoTokens};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Frames sampled per video upstream; inputs are used as given.
    pub n_frames: usize,
    /// Total visual token budget across all keyframes.
    pub budget: usize,
    pub heads: usize,
    /// Cap on the number of pairs merged in the first step.
    pub r1_cap: usize,
    pub policy: KeyframePolicy,
    pub frames_per_cluster: usize,
    pub partition_rule: PartitionRule,
    pub coherence_gate: Option<f64>,
    pub pooling: Pooling,
    /// Hand the `budget mod K` leftover tokens to the first keyframes.
    pub spread_remainder: bool,
    pub baseline_frames: usize,
    /// Side of the pooled patch grid in the baseline.
    pub baseline_grid: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            n_frames: 100,
            budget: 3680,
            heads: 16,
            r1_cap: 288,
            policy: KeyframePolicy::TemporalMiddle,
            frames_per_cluster: 1,
            partition_rule: PartitionRule::Coherent,
            coherence_gate: Some(DEFAULT_COHERENCE_GATE),
            pooling: Pooling::Weighted,
            spread_remainder: false,
            baseline_frames: 8,
            baseline_grid: 12,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("n_frames", self.n_frames),
            ("budget", self.budget),
            ("heads", self.heads),
            ("r1", self.r1_cap),
            ("frames_per_cluster", self.frames_per_cluster),
            ("baseline_frames", self.baseline_frames),
            ("baseline_grid", self.baseline_grid),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if let Some(g) = self.coherence_gate {
            if !(-1.0..=1.0).contains(&g) {
                return Err(Error::Config(format!("coherence gate {g} outside [-1, 1]")));
            }
        }
        Ok(())
    }

    pub fn echo(&self) -> Value {
        json!({
            "n_frames": self.n_frames,
            "budget": self.budget,
            "heads": self.heads,
            "r1": self.r1_cap,
            "policy": self.policy.name(),
            "seed": match self.policy { KeyframePolicy::RandomUniform { seed } => Some(seed), _ => None },
            "frames_per_cluster": self.frames_per_cluster,
            "partition_rule": self.partition_rule.to_string(),
            "coherence_gate": self.coherence_gate,
            "pooling": match self.pooling { Pooling::Weighted => "weighted", Pooling::Unweighted => "unweighted" },
            "spread_remainder": self.spread_remainder,
            "baseline_frames": self.baseline_frames,
            "baseline_grid": self.baseline_grid,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Dyto,
    MergeOnly,
    UniformPool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressedVideo {
    pub method: Method,
    pub n_frames: usize,
    pub tokens_per_frame: usize,
    pub dim: usize,
    /// Absent for the baseline.
    pub hierarchy: Option<PartitionHierarchy>,
    pub selected_level: Option<usize>,
    /// Frame segmentation implied by the method.
    pub partition: Partition,
    pub keyframes: KeyframeSet,
    /// One entry per keyframe, in keyframe order.
    pub frames: Vec<MergedFrame>,
    pub config: PipelineConfig,
}

impl CompressedVideo {
    pub fn k(&self) -> usize {
        self.keyframes.len()
    }

    pub fn tokens_per_keyframe(&self) -> Vec<usize> {
        self.frames.iter().map(|f| f.tokens.len()).collect()
    }

    pub fn total_tokens(&self) -> usize {
        self.frames.iter().map(|f| f.tokens.len()).sum()
    }

    /// `K x T x D` when every keyframe kept the same count, else `(sum T) x D`.
    pub fn to_tensor(&self) -> DytTensor {
        let counts = self.tokens_per_keyframe();
        let data: Vec<f32> = self.frames.iter().flat_map(|f| f.tokens.to_f32()).collect();
        let dims = match counts.first() {
            Some(&t) if counts.iter().all(|&c| c == t) => vec![counts.len(), t, self.dim],
            _ => vec![counts.iter().sum(), self.dim],
        };
        DytTensor { dims, data }
    }

    /// Sidecar document. With `trace`, each frame carries its merge steps and
    /// provenance; otherwise only schedule and sizes.
    pub fn sidecar(&self, trace: bool) -> Value {
        let frames: Vec<Value> = self
            .frames
            .iter()
            .map(|f| {
                let mut v = serde_json::to_value(f.trace()).expect("trace serializes");
                if !trace {
                    let obj = v.as_object_mut().expect("trace is an object");
                    obj.remove("steps");
                    obj.remove("provenance");
                }
                v
            })
            .collect();
        json!({
            "method": self.method,
            "n_frames": self.n_frames,
            "tokens_per_frame": self.tokens_per_frame,
            "dim": self.dim,
            "keyframes": self.keyframes.frames,
            "keyframe_clusters": self.keyframes.clusters,
            "tokens_per_keyframe": self.tokens_per_keyframe(),
            "total_tokens": self.total_tokens(),
            "partition": LevelDoc::from(&self.partition),
            "selected_level": self.selected_level,
            "levels": self.hierarchy.as_ref().map(|h| h.levels().iter().map(LevelDoc::from).collect::<Vec<_>>()),
            "config": self.config.echo(),
            "frames": frames,
        })
    }
}

/// Per-keyframe targets: `floor(budget / K)` capped at the patch count, plus
/// one extra token for the first `budget mod K` frames when spreading.
fn frame_targets(tokens_per_frame: usize, k: usize, cfg: &PipelineConfig) -> Result<Vec<usize>> {
    let base = per_frame_target(tokens_per_frame, cfg.budget, k)?;
    let patches = tokens_per_frame - 1;
    let extra = if cfg.spread_remainder { cfg.budget % k } else { 0 };
    Ok((0..k).map(|i| if i < extra { (base + 1).min(patches) } else { base }).collect())
}

fn merge_keyframes(tokens: &VideoTokens, frames: &[usize], cfg: &PipelineConfig) -> Result<Vec<MergedFrame>> {
    let targets = frame_targets(tokens.tokens_per_frame(), frames.len(), cfg)?;
    let opts = MergeOptions {
        heads: cfg.heads,
        pooling: cfg.pooling,
    };
    frames
        .iter()
        .zip(&targets)
        .map(|(&f, &target)| {
            let schedule = MergeSchedule::greedy(tokens.n_patches(), target, cfg.r1_cap)?;
            compress_frame(f, tokens.patches(f), tokens.dim(), &schedule, &opts)
        })
        .collect()
}

pub fn run_dyto(tokens: &VideoTokens, cfg: &PipelineConfig) -> Result<CompressedVideo> {
    cfg.validate()?;
    check_heads(tokens.dim(), cfg.heads)?;
    if tokens.n_frames() < 2 {
        return Err(Error::Input(format!("need ≥ 2 frames, got {}", tokens.n_frames())));
    }
    let cls = extract_cls_sequence(tokens)?;
    let hierarchy = build_hierarchy_with(
        &cls,
        &HierarchyOptions {
            coherence_gate: cfg.coherence_gate,
        },
    )?;
    let level = select_level(&hierarchy, cfg.partition_rule)?;
    let partition = hierarchy.level(level).clone();
    let keyframes = select_keyframes_per_cluster(&partition, &cls, cfg.policy, cfg.frames_per_cluster);
    let k = keyframes.len();
    if cfg.budget < k {
        return Err(Error::Config(format!(
            "token budget Z={} is smaller than the K={k} discovered keyframes",
            cfg.budget
        )));
    }
    let frames = merge_keyframes(tokens, &keyframes.frames, cfg)?;
    Ok(CompressedVideo {
        method: Method::Dyto,
        n_frames: tokens.n_frames(),
        tokens_per_frame: tokens.tokens_per_frame(),
        dim: tokens.dim(),
        hierarchy: Some(hierarchy),
        selected_level: Some(level),
        partition,
        keyframes,
        frames,
        config: cfg.clone(),
    })
}

/// Evenly spaced frame indices starting at 0: `floor(j * n / count)`.
pub fn uniform_frame_indices(n: usize, count: usize) -> Result<Vec<usize>> {
    if count == 0 || count > n {
        return Err(Error::Config(format!("cannot sample {count} of {n} frames")));
    }
    Ok((0..count).map(|j| j * n / count).collect())
}

/// Assigns every frame to its temporally nearest sampled frame (ties to the
/// earlier sample).
pub fn nearest_sample_partition(n: usize, samples: &[usize]) -> Partition {
    let labels: Vec<usize> = (0..n)
        .map(|f| {
            samples
                .iter()
                .enumerate()
                .min_by_key(|(j, &s)| (f.abs_diff(s), *j))
                .map(|(j, _)| j)
                .unwrap_or(0)
        })
        .collect();
    Partition::from_frame_labels(&labels)
}

fn grid_side(patches: usize) -> Option<usize> {
    let s = (patches as f64).sqrt().round() as usize;
    (s * s == patches).then_some(s)
}

/// Average-pools a square patch grid into `grid x grid` non-overlapping blocks.
pub fn pool_patch_grid(frame: usize, patches: &[f32], dim: usize, grid: usize) -> Result<MergedFrame> {
    let count = patches.len() / dim;
    let side = grid_side(count)
        .ok_or_else(|| Error::Config(format!("{count} patches do not form a square grid")))?;
    if grid == 0 || side % grid != 0 {
        return Err(Error::Config(format!("grid {grid} does not divide patch grid side {side}")));
    }
    let block = side / grid;
    let mut values = Vec::with_capacity(grid * grid * dim);
    let mut provenance = Vec::with_capacity(grid * grid);
    for bi in 0..grid {
        for bj in 0..grid {
            let members: Vec<usize> = (0..block)
                .flat_map(|di| (0..block).map(move |dj| (bi * block + di) * side + bj * block + dj))
                .collect();
            let mut acc = vec![0.0f64; dim];
            for &m in &members {
                for (a, &v) in acc.iter_mut().zip(&patches[m * dim..(m + 1) * dim]) {
                    *a += v as f64;
                }
            }
            values.extend(acc.iter().map(|a| a / members.len() as f64));
            let mut sorted = members;
            sorted.sort_unstable();
            provenance.push(sorted);
        }
    }
    let sizes = vec![block * block; grid * grid];
    Ok(MergedFrame {
        frame,
        tokens: TokenSet::from_parts(dim, values, sizes, provenance),
        schedule: Vec::new(),
        steps: Vec::new(),
    })
}

/// Merges the patch tokens of the given frames (all frames when `None`)
/// under the budget, skipping event clustering.
pub fn run_merge_only(tokens: &VideoTokens, frames: Option<&[usize]>, cfg: &PipelineConfig) -> Result<CompressedVideo> {
    cfg.validate()?;
    check_heads(tokens.dim(), cfg.heads)?;
    let n = tokens.n_frames();
    let frames: Vec<usize> = frames.map_or_else(|| (0..n).collect(), <[usize]>::to_vec);
    if frames.is_empty() || frames.windows(2).any(|w| w[0] >= w[1]) || frames.iter().any(|&f| f >= n) {
        return Err(Error::Config(format!(
            "frames {frames:?} must be non-empty, strictly increasing and below {n}"
        )));
    }
    if cfg.budget < frames.len() {
        return Err(Error::Config(format!(
            "token budget Z={} is smaller than the K={} requested frames",
            cfg.budget,
            frames.len()
        )));
    }
    let merged = merge_keyframes(tokens, &frames, cfg)?;
    Ok(CompressedVideo {
        method: Method::MergeOnly,
        n_frames: n,
        tokens_per_frame: tokens.tokens_per_frame(),
        dim: tokens.dim(),
        hierarchy: None,
        selected_level: None,
        partition: nearest_sample_partition(n, &frames),
        keyframes: KeyframeSet {
            clusters: (0..frames.len()).collect(),
            frames,
        },
        frames: merged,
        config: cfg.clone(),
    })
}

pub fn run_baseline_uniform_pool(tokens: &VideoTokens, cfg: &PipelineConfig) -> Result<CompressedVideo> {
    cfg.validate()?;
    let samples = uniform_frame_indices(tokens.n_frames(), cfg.baseline_frames)?;
    let frames = samples
        .iter()
        .map(|&f| pool_patch_grid(f, tokens.patches(f), tokens.dim(), cfg.baseline_grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(CompressedVideo {
        method: Method::UniformPool,
        n_frames: tokens.n_frames(),
        tokens_per_frame: tokens.tokens_per_frame(),
        dim: tokens.dim(),
        hierarchy: None,
        selected_level: None,
        partition: nearest_sample_partition(tokens.n_frames(), &samples),
        keyframes: KeyframeSet {
            clusters: (0..samples.len()).collect(),
            frames: samples,
        },
        frames,
        config: cfg.clone(),
    })
}
