//! Brute-force reference for the bipartite matcher on small token sets.

use crate::error::{Error, Result};
use crate::merge::{head_similarity, MatchPair, MatchSet, TokenSet};

/// Largest token count the oracle accepts.
pub const ORACLE_MAX_TOKENS: usize = 16;

/// Full score table, per-proposer argmax (first maximum wins), then `r`
/// rounds of picking the strongest unused proposal (smaller proposer on ties).
pub fn exhaustive_match_oracle(t: &TokenSet, r: usize, heads: usize) -> Result<MatchSet> {
    let n = t.len();
    if n > ORACLE_MAX_TOKENS {
        return Err(Error::Input(format!(
            "oracle is limited to {ORACLE_MAX_TOKENS} tokens, got {n}"
        )));
    }
    if n < 2 {
        return Err(Error::Input(format!("need >= 2 tokens to match, got {n}")));
    }
    if r > n / 2 {
        return Err(Error::Schedule(format!("cannot merge {r} pairs out of {n} tokens")));
    }
    let evens: Vec<usize> = (0..n).filter(|i| i % 2 == 0).collect();
    let odds: Vec<usize> = (0..n).filter(|i| i % 2 == 1).collect();
    let mut table = vec![vec![0.0; odds.len()]; evens.len()];
    for (a, &p) in evens.iter().enumerate() {
        for (b, &q) in odds.iter().enumerate() {
            table[a][b] = head_similarity(t.token(p), t.token(q), heads)?;
        }
    }
    let mut proposals = Vec::with_capacity(evens.len());
    for (a, &p) in evens.iter().enumerate() {
        let mut best = 0;
        for b in 1..odds.len() {
            if table[a][b] > table[a][best] {
                best = b;
            }
        }
        proposals.push(MatchPair {
            p,
            q: odds[best],
            score: table[a][best],
        });
    }
    let mut taken = vec![false; proposals.len()];
    let mut pairs = Vec::with_capacity(r);
    for _ in 0..r {
        let mut pick: Option<usize> = None;
        for (i, cand) in proposals.iter().enumerate() {
            if taken[i] {
                continue;
            }
            pick = match pick {
                Some(j) if proposals[j].score >= cand.score => Some(j),
                _ => Some(i),
            };
        }
        let i = pick.expect("r <= number of proposals");
        taken[i] = true;
        pairs.push(proposals[i]);
    }
    Ok(MatchSet { pairs })
}
