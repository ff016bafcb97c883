//! Alternating bipartite matching and size-weighted merging.

use super::similarity::{check_heads, head_norms, score_with_norms};
use super::tokens::TokenSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchPair {
    /// Position of the token that disappears (even position).
    pub p: usize,
    /// Position of the token it folds into (odd position).
    pub q: usize,
    pub score: f64,
}

/// Selected pairs, highest score first. Each `p` appears at most once.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MatchSet {
    pub pairs: Vec<MatchPair>,
}

impl MatchSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Tokens at even positions propose to their most similar odd-position
/// token (ties to the smaller position); the `r` strongest proposals win
/// (ties to the smaller `p`).
pub fn bipartite_match(t: &TokenSet, r: usize, heads: usize) -> Result<MatchSet> {
    let n = t.len();
    if n < 2 {
        return Err(Error::Input(format!("need >= 2 tokens to match, got {n}")));
    }
    if r > n / 2 {
        return Err(Error::Schedule(format!("cannot merge {r} pairs out of {n} tokens")));
    }
    check_heads(t.dim(), heads)?;
    if r == 0 {
        return Ok(MatchSet::default());
    }
    let norms = (0..n)
        .map(|i| head_norms(t.token(i), heads))
        .collect::<Result<Vec<_>>>()?;

    let mut proposals: Vec<MatchPair> = (0..n)
        .step_by(2)
        .map(|p| {
            let mut best = MatchPair {
                p,
                q: 1,
                score: f64::NEG_INFINITY,
            };
            for q in (1..n).step_by(2) {
                let s = score_with_norms(t.token(p), &norms[p], t.token(q), &norms[q]);
                if s > best.score {
                    best = MatchPair { p, q, score: s };
                }
            }
            best
        })
        .collect();
    rank_proposals(&mut proposals);
    proposals.truncate(r);
    Ok(MatchSet { pairs: proposals })
}

/// Score descending, then `p` ascending.
fn rank_proposals(proposals: &mut [MatchPair]) {
    proposals.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.p.cmp(&b.p)));
}

/// How matched tokens are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pooling {
    /// Mean weighted by the number of source patches each token carries.
    #[default]
    Weighted,
    /// Plain mean of the current token vectors.
    Unweighted,
}

/// Folds every matched `p` into its `q`. Survivors keep their relative order.
pub fn merge_matched(t: &TokenSet, m: &MatchSet, pooling: Pooling) -> Result<TokenSet> {
    let n = t.len();
    let dim = t.dim();
    let mut removed = vec![false; n];
    let mut absorbed: Vec<Vec<usize>> = vec![Vec::new(); n];
    for pair in &m.pairs {
        if pair.p >= n || pair.q >= n || pair.p == pair.q {
            return Err(Error::Input(format!("pair ({}, {}) invalid for {n} tokens", pair.p, pair.q)));
        }
        if removed[pair.p] {
            return Err(Error::Input(format!("token {} matched twice", pair.p)));
        }
        removed[pair.p] = true;
        absorbed[pair.q].push(pair.p);
    }
    if m.pairs.iter().any(|pair| removed[pair.q]) {
        return Err(Error::Input("a merge target is also merged away".into()));
    }

    let survivors = n - m.len();
    let mut values = Vec::with_capacity(survivors * dim);
    let mut sizes = Vec::with_capacity(survivors);
    let mut provenance = Vec::with_capacity(survivors);
    for i in (0..n).filter(|&i| !removed[i]) {
        let group = &absorbed[i];
        if group.is_empty() {
            values.extend_from_slice(t.token(i));
            sizes.push(t.sizes()[i]);
            provenance.push(t.provenance()[i].clone());
            continue;
        }
        let weight = |j: usize| match pooling {
            Pooling::Weighted => t.sizes()[j] as f64,
            Pooling::Unweighted => 1.0,
        };
        let mut acc: Vec<f64> = t.token(i).iter().map(|v| v * weight(i)).collect();
        let mut total = weight(i);
        let mut size = t.sizes()[i];
        let mut sources = t.provenance()[i].clone();
        for &p in group {
            let w = weight(p);
            for (a, v) in acc.iter_mut().zip(t.token(p)) {
                *a += v * w;
            }
            total += w;
            size += t.sizes()[p];
            sources.extend_from_slice(&t.provenance()[p]);
        }
        sources.sort_unstable();
        values.extend(acc.iter().map(|a| a / total));
        sizes.push(size);
        provenance.push(sources);
    }
    Ok(TokenSet::from_parts(dim, values, sizes, provenance))
}
