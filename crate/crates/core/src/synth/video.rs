//! Seeded synthetic videos with known event structure.

use serde::{Deserialize, Serialize};

use super::rng::SplitMix64;
use crate::error::{Error, Result};
use crate::tensor::VideoTokens;

const TAG_BOUNDARIES: u64 = 1;
const TAG_DIRECTIONS: u64 = 2;
const TAG_OFFSETS: u64 = 3;
const TAG_NOISE: u64 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventLayout {
    /// Event lengths drawn uniformly over compositions of `N` with every
    /// event at least `min(min_len, floor(N / E))` frames long.
    Random { min_len: usize },
    /// Start frame of each event; the first must be 0.
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n_frames: usize,
    pub n_events: usize,
    /// Tokens per frame, CLS included.
    pub tokens_per_frame: usize,
    pub dim: usize,
    /// Standard deviation of the per-channel Gaussian noise.
    pub noise: f64,
    pub layout: EventLayout,
    /// Number of distinct patch offsets shared by all frames.
    pub palette: usize,
    pub offset_scale: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_frames: 100,
            n_events: 4,
            tokens_per_frame: 65,
            dim: 64,
            noise: 0.05,
            layout: EventLayout::Random { min_len: 2 },
            palette: 8,
            offset_scale: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Half-open `[start, end)` frame ranges, in order.
    pub boundaries: Vec<(usize, usize)>,
    /// Event index of every frame.
    pub labels: Vec<usize>,
}

impl GroundTruth {
    pub fn n_events(&self) -> usize {
        self.boundaries.len()
    }

    fn from_lengths(lengths: &[usize]) -> Self {
        let mut boundaries = Vec::with_capacity(lengths.len());
        let mut labels = Vec::new();
        let mut start = 0;
        for (e, &len) in lengths.iter().enumerate() {
            boundaries.push((start, start + len));
            labels.extend(std::iter::repeat_n(e, len));
            start += len;
        }
        Self { boundaries, labels }
    }
}

fn check_spec(spec: &SyntheticSpec) -> Result<()> {
    if spec.n_events == 0 || spec.n_events > spec.n_frames {
        return Err(Error::Spec(format!(
            "cannot place {} events in {} frames",
            spec.n_events, spec.n_frames
        )));
    }
    if spec.tokens_per_frame < 2 || spec.dim == 0 {
        return Err(Error::Spec(format!(
            "need L >= 2 and D >= 1, got L={} D={}",
            spec.tokens_per_frame, spec.dim
        )));
    }
    if spec.palette == 0 {
        return Err(Error::Spec("palette must hold at least one offset".into()));
    }
    if !(spec.noise.is_finite() && spec.noise >= 0.0 && spec.offset_scale.is_finite()) {
        return Err(Error::Spec("noise and offset scale must be finite, noise >= 0".into()));
    }
    Ok(())
}

fn event_lengths(spec: &SyntheticSpec, rng: &mut SplitMix64) -> Result<Vec<usize>> {
    let (n, e) = (spec.n_frames, spec.n_events);
    match &spec.layout {
        EventLayout::Explicit(starts) => {
            let valid = starts.len() == e
                && starts.first() == Some(&0)
                && starts.windows(2).all(|w| w[0] < w[1])
                && starts.last().is_some_and(|&s| s < n);
            if !valid {
                return Err(Error::Spec(format!(
                    "event starts {starts:?} must begin at 0, increase strictly, stay below {n} and number {e}"
                )));
            }
            Ok(starts
                .iter()
                .zip(starts.iter().skip(1).chain(std::iter::once(&n)))
                .map(|(a, b)| b - a)
                .collect())
        }
        EventLayout::Random { min_len } => {
            let m = (*min_len).max(1).min(n / e);
            let free = n - e * m;
            // Stars and bars: choose e - 1 bar slots among free + e - 1.
            let slots = free + e - 1;
            let mut pool: Vec<usize> = (0..slots).collect();
            for i in 0..e - 1 {
                let j = i + rng.below(slots - i);
                pool.swap(i, j);
            }
            let mut bars = pool[..e - 1].to_vec();
            bars.sort_unstable();
            let mut lengths = Vec::with_capacity(e);
            let mut prev: isize = -1;
            for &b in &bars {
                lengths.push(m + (b as isize - prev - 1) as usize);
                prev = b as isize;
            }
            lengths.push(m + (slots as isize - prev - 1) as usize);
            Ok(lengths)
        }
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Unit event directions, mutually orthogonal while `E <= D`.
fn event_directions(e: usize, dim: usize, rng: &mut SplitMix64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(e);
    for _ in 0..e {
        let raw: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
        let mut v = raw.clone();
        for u in &out {
            let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= dot * b);
        }
        let raw_norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut fallback = raw;
        if normalize(&mut v) > 1e-9 * raw_norm {
            out.push(v);
        } else {
            normalize(&mut fallback);
            out.push(fallback);
        }
    }
    out
}

/// Generates `N x L x D` tokens and the event layout they were drawn from.
///
/// Every frame of event `e` has CLS `normalize(u_e + noise)`; patch `p` is
/// `u_e + offset[category(p)] + noise`.
pub fn generate_synthetic_video(spec: &SyntheticSpec) -> Result<(VideoTokens, GroundTruth)> {
    check_spec(spec)?;
    let (n, l, d) = (spec.n_frames, spec.tokens_per_frame, spec.dim);
    let lengths = event_lengths(spec, &mut SplitMix64::stream(spec.seed, TAG_BOUNDARIES))?;
    let truth = GroundTruth::from_lengths(&lengths);
    let dirs = event_directions(spec.n_events, d, &mut SplitMix64::stream(spec.seed, TAG_DIRECTIONS));

    let mut offset_rng = SplitMix64::stream(spec.seed, TAG_OFFSETS);
    let palette: Vec<Vec<f64>> = (0..spec.palette)
        .map(|_| {
            let mut v: Vec<f64> = (0..d).map(|_| offset_rng.normal()).collect();
            normalize(&mut v);
            v.iter().map(|x| x * spec.offset_scale).collect()
        })
        .collect();
    let category: Vec<usize> = (0..l - 1).map(|_| offset_rng.below(spec.palette)).collect();

    let mut noise = SplitMix64::stream(spec.seed, TAG_NOISE);
    let mut data = Vec::with_capacity(n * l * d);
    for &e in &truth.labels {
        let dir = &dirs[e];
        let mut cls: Vec<f64> = dir.iter().map(|u| u + spec.noise * noise.normal()).collect();
        if normalize(&mut cls) == 0.0 {
            cls.clone_from(dir);
        }
        data.extend(cls.iter().map(|&v| v as f32));
        for &c in &category {
            data.extend(
                dir.iter()
                    .zip(&palette[c])
                    .map(|(u, o)| (u + o + spec.noise * noise.normal()) as f32),
            );
        }
    }
    let tokens = VideoTokens::new(n, l, d, data)?;
    Ok((tokens, truth))
}
