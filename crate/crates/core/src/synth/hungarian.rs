//! Minimum-cost assignment on square matrices.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Column assigned to each row.
    pub columns: Vec<usize>,
    pub total: f64,
}

/// Solves the square assignment problem in `O(k^3)` per solve. Among optimal
/// assignments the lexicographically smallest column sequence is returned.
pub fn hungarian_match(cost: &[Vec<f64>]) -> Result<Assignment> {
    let k = cost.len();
    if let Some(i) = cost.iter().position(|row| row.len() != k) {
        return Err(Error::Input(format!(
            "cost matrix must be square: row {i} has {} entries, expected {k}",
            cost[i].len()
        )));
    }
    if cost.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Input("cost matrix holds a non-finite entry".into()));
    }
    if k == 0 {
        return Ok(Assignment {
            columns: Vec::new(),
            total: 0.0,
        });
    }

    let all: Vec<usize> = (0..k).collect();
    let (_, best, u, v) = solve(cost, &all, &all);
    let scale = cost.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = 1e-9 * (1.0 + scale) * k as f64;

    // Fix rows one at a time to the smallest column that still admits an
    // optimal completion.
    let mut columns = Vec::with_capacity(k);
    let mut free: Vec<usize> = all.clone();
    let mut prefix = 0.0;
    for i in 0..k {
        let rows: Vec<usize> = (i + 1..k).collect();
        let mut fallback: Option<(f64, usize)> = None;
        let mut chosen = None;
        for (slot, &c) in free.iter().enumerate() {
            if cost[i][c] - u[i] - v[c] > tol {
                continue;
            }
            let rest: Vec<usize> = free.iter().copied().filter(|&x| x != c).collect();
            let value = prefix + cost[i][c] + solve(cost, &rows, &rest).1;
            if value <= best + tol {
                chosen = Some(slot);
                break;
            }
            if fallback.is_none_or(|(b, _)| value < b) {
                fallback = Some((value, slot));
            }
        }
        let slot = chosen.or(fallback.map(|(_, s)| s)).unwrap_or(0);
        let c = free.remove(slot);
        prefix += cost[i][c];
        columns.push(c);
    }
    let total = columns.iter().enumerate().map(|(i, &c)| cost[i][c]).sum();
    Ok(Assignment { columns, total })
}

/// Shortest augmenting path solver restricted to `rows x cols` (equal
/// lengths). Returns the column per row, the optimum, and row and column
/// potentials indexed like `cost`.
fn solve(cost: &[Vec<f64>], rows: &[usize], cols: &[usize]) -> (Vec<usize>, f64, Vec<f64>, Vec<f64>) {
    let n = rows.len();
    let full = cost.len();
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let a = |i: usize, j: usize| cost[rows[i - 1]][cols[j - 1]];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = a(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        assign[p[j] - 1] = cols[j - 1];
    }
    let total = assign.iter().enumerate().map(|(i, &c)| cost[rows[i]][c]).sum();
    let mut row_pot = vec![0.0; full];
    let mut col_pot = vec![0.0; full];
    for (i, &r) in rows.iter().enumerate() {
        row_pot[r] = u[i + 1];
    }
    for (j, &c) in cols.iter().enumerate() {
        col_pot[c] = v[j + 1];
    }
    (assign, total, row_pot, col_pot)
}
