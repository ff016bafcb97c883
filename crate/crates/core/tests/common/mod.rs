//! Naive reference implementations and fixture builders shared by the
//! integration tests and the acceptance run.

#![allow(dead_code, clippy::needless_range_loop)]

use dyto::merge::TokenSet;
use dyto::synth::rng::SplitMix64;
use itertools::Itertools;

/// Temporal distance straight from the definition, with no shared helpers:
/// normalize each row, then `(1 - cos) * |t_i - t_j| / N` off the diagonal
/// and 1 on it. Frames are timestamped `1..=N`.
pub fn naive_distance(rows: &[f64], n: usize, d: usize) -> Vec<Vec<f64>> {
    let unit: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let r = &rows[i * d..(i + 1) * d];
            let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            r.iter().map(|x| x / norm).collect()
        })
        .collect();
    let mut w = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                w[i][j] = 1.0;
                continue;
            }
            let mut dot = 0.0;
            for c in 0..d {
                dot += unit[i][c] * unit[j][c];
            }
            let cos = dot.clamp(-1.0, 1.0);
            w[i][j] = (1.0 - cos) * ((i as f64) - (j as f64)).abs() / n as f64;
        }
    }
    w
}

/// Mean over heads of the cosine between matching slices.
pub fn naive_head_similarity(a: &[f64], b: &[f64], heads: usize) -> f64 {
    let width = a.len() / heads;
    let mut total = 0.0;
    for h in 0..heads {
        let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
        for c in h * width..(h + 1) * width {
            ab += a[c] * b[c];
            aa += a[c] * a[c];
            bb += b[c] * b[c];
        }
        total += (ab / (aa.sqrt() * bb.sqrt())).clamp(-1.0, 1.0);
    }
    total / heads as f64
}

/// Smallest total over all permutations; first minimum in lexicographic
/// order wins ties.
pub fn brute_force_assignment(cost: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let k = cost.len();
    let mut best: Option<(Vec<usize>, f64)> = None;
    for perm in (0..k).permutations(k) {
        let total: f64 = perm.iter().enumerate().map(|(i, &c)| cost[i][c]).sum();
        if best.as_ref().is_none_or(|(_, b)| total < *b) {
            best = Some((perm, total));
        }
    }
    best.unwrap_or((Vec::new(), 0.0))
}

pub fn gaussian_rows(rng: &mut SplitMix64, n: usize, d: usize) -> Vec<f64> {
    (0..n * d).map(|_| rng.normal()).collect()
}

/// Tokens with a few near-duplicate rows so ties and strong matches occur.
pub fn random_tokens(rng: &mut SplitMix64, n: usize, d: usize) -> TokenSet {
    let mut values = gaussian_rows(rng, n, d);
    for i in 1..n {
        if rng.below(4) == 0 {
            let src = rng.below(i);
            let copy: Vec<f64> = values[src * d..(src + 1) * d].to_vec();
            values[i * d..(i + 1) * d].copy_from_slice(&copy);
        }
    }
    TokenSet::from_values(values, d).unwrap()
}
