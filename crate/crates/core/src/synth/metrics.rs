//! Scores against synthetic ground truth.

use super::hungarian::hungarian_match;
use super::video::GroundTruth;
use crate::clustering::{KeyframeSet, Partition};
use crate::error::{Error, Result};
use crate::merge::{MergedFrame, TokenSet};
use crate::pipeline::CompressedVideo;
use crate::tensor::VideoTokens;

/// Fraction of frames whose cluster maps to their true event under the
/// best one-to-one matching of clusters to events.
pub fn partition_accuracy(p: &Partition, gt: &GroundTruth) -> Result<f64> {
    let n = p.len();
    if n != gt.labels.len() || n == 0 {
        return Err(Error::Input(format!(
            "partition covers {n} frames, ground truth {}",
            gt.labels.len()
        )));
    }
    let events = gt.labels.iter().max().map_or(0, |m| m + 1);
    let size = p.k().max(events);
    let mut cost = vec![vec![0.0; size]; size];
    for (&c, &e) in p.labels().iter().zip(&gt.labels) {
        cost[c][e] -= 1.0;
    }
    let a = hungarian_match(&cost)?;
    Ok(-a.total / n as f64)
}

/// Fraction of true events containing at least one keyframe.
pub fn event_coverage(k: &KeyframeSet, gt: &GroundTruth) -> Result<f64> {
    let events = gt.n_events();
    if events == 0 {
        return Err(Error::Input("ground truth has no events".into()));
    }
    let mut hit = vec![false; events];
    for &f in &k.frames {
        let e = gt
            .labels
            .get(f)
            .ok_or_else(|| Error::Input(format!("keyframe {f} outside {} frames", gt.labels.len())))?;
        *hit
            .get_mut(*e)
            .ok_or_else(|| Error::Input(format!("frame {f} labelled {e} but only {events} events exist")))? = true;
    }
    Ok(hit.iter().filter(|&&h| h).count() as f64 / events as f64)
}

/// Summed squared error and patch count when every patch is replaced by the
/// token that absorbed it.
fn frame_squared_error(tokens: &TokenSet, patches: &[f32], dim: usize) -> Result<(f64, usize)> {
    let count = patches.len() / dim;
    tokens
        .check_provenance(count)
        .map_err(|e| Error::Input(format!("cannot reconstruct: {e}")))?;
    let mut sum = 0.0;
    for (i, sources) in tokens.provenance().iter().enumerate() {
        let t = tokens.token(i);
        for &s in sources {
            sum += patches[s * dim..(s + 1) * dim]
                .iter()
                .zip(t)
                .map(|(&x, y)| (x as f64 - y).powi(2))
                .sum::<f64>();
        }
    }
    Ok((sum, count))
}

/// Mean squared error per patch of a single compressed frame.
pub fn frame_reconstruction_error(frame: &MergedFrame, patches: &[f32], dim: usize) -> Result<f64> {
    let (sum, count) = frame_squared_error(&frame.tokens, patches, dim)?;
    Ok(sum / count as f64)
}

/// Mean squared error per patch over all keyframes, comparing each source
/// patch with the token it was merged into.
pub fn reconstruction_error(cv: &CompressedVideo, original: &VideoTokens) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0;
    for f in &cv.frames {
        if f.frame >= original.n_frames() {
            return Err(Error::Input(format!("keyframe {} outside the original video", f.frame)));
        }
        let (s, c) = frame_squared_error(&f.tokens, original.patches(f.frame), original.dim())?;
        sum += s;
        count += c;
    }
    if count == 0 {
        return Err(Error::Input("no keyframes to reconstruct".into()));
    }
    Ok(sum / count as f64)
}

/// Reference compression: averages `target` contiguous runs of patches in
/// index order, ignoring content.
pub fn mean_pool_frame(frame: usize, patches: &[f32], dim: usize, target: usize) -> Result<MergedFrame> {
    let count = patches.len() / dim;
    if target == 0 || target > count {
        return Err(Error::Config(format!("cannot pool {count} patches into {target}")));
    }
    let mut values = Vec::with_capacity(target * dim);
    let mut sizes = Vec::with_capacity(target);
    let mut provenance = Vec::with_capacity(target);
    for j in 0..target {
        let (lo, hi) = (j * count / target, (j + 1) * count / target);
        let mut acc = vec![0.0f64; dim];
        for s in lo..hi {
            for (a, &x) in acc.iter_mut().zip(&patches[s * dim..(s + 1) * dim]) {
                *a += x as f64;
            }
        }
        values.extend(acc.iter().map(|a| a / (hi - lo) as f64));
        sizes.push(hi - lo);
        provenance.push((lo..hi).collect());
    }
    Ok(MergedFrame {
        frame,
        tokens: TokenSet::from_parts(dim, values, sizes, provenance),
        schedule: Vec::new(),
        steps: Vec::new(),
    })
}
