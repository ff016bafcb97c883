use crate::error::{Error, Result};

pub(crate) fn check_heads(dim: usize, heads: usize) -> Result<usize> {
    if heads == 0 || !dim.is_multiple_of(heads) {
        return Err(Error::Config(format!(
            "head count {heads} does not divide token dimension {dim}"
        )));
    }
    Ok(dim / heads)
}

/// Euclidean norm of each contiguous head slice of `v`.
pub(crate) fn head_norms(v: &[f64], heads: usize) -> Result<Vec<f64>> {
    let width = check_heads(v.len(), heads)?;
    v.chunks_exact(width)
        .enumerate()
        .map(|(h, slice)| {
            let n = slice.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n == 0.0 {
                Err(Error::Computation(format!("zero-norm slice in head {h}")))
            } else {
                Ok(n)
            }
        })
        .collect()
}

/// Mean per-head cosine given precomputed head norms.
#[inline]
pub(crate) fn score_with_norms(a: &[f64], a_norms: &[f64], b: &[f64], b_norms: &[f64]) -> f64 {
    let heads = a_norms.len();
    let width = a.len() / heads;
    let mut total = 0.0;
    for h in 0..heads {
        let sa = &a[h * width..(h + 1) * width];
        let sb = &b[h * width..(h + 1) * width];
        let dot: f64 = sa.iter().zip(sb).map(|(x, y)| x * y).sum();
        total += (dot / (a_norms[h] * b_norms[h])).clamp(-1.0, 1.0);
    }
    total / heads as f64
}

/// Average over `heads` contiguous channel slices of the slice-wise cosine.
pub fn head_similarity(a: &[f64], b: &[f64], heads: usize) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Input(format!(
            "token lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let na = head_norms(a, heads)?;
    let nb = head_norms(b, heads)?;
    Ok(score_with_norms(a, &na, b, &nb))
}
