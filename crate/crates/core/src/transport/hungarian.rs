//! Minimum-cost perfect assignment (Kuhn–Munkres, shortest augmenting paths).

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Largest size accepted by the factorial-time oracle.
pub const BRUTE_FORCE_MAX_N: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    /// `perm[row] = column`.
    pub perm: Vec<usize>,
    pub total: f64,
}

fn check_cost(cost: &Matrix, op: &'static str) -> Result<()> {
    if cost.rows() != cost.cols() {
        return Err(Error::shape(op, "square cost matrix", format!("{}x{}", cost.rows(), cost.cols())));
    }
    if !cost.is_finite() {
        return Err(Error::NonFinite(format!("{op} cost matrix")));
    }
    Ok(())
}

/// Exact minimum-cost perfect assignment in `O(n³)`.
///
/// Among optimal assignments the lexicographically smallest permutation is
/// returned: after solving, rows are fixed in order and each is moved to the
/// smallest column reachable by a zero-reduced-cost alternating cycle through
/// the not-yet-fixed rows.
pub fn hungarian(cost: &Matrix) -> Result<Assignment> {
    check_cost(cost, "hungarian")?;
    let n = cost.rows();
    if n == 0 {
        return Ok(Assignment {
            perm: Vec::new(),
            total: 0.0,
        });
    }

    // 1-based potentials; column 0 is the virtual root of each search.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![inf; n + 1];
    let mut used = vec![false; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        minv.iter_mut().for_each(|m| *m = inf);
        used.iter_mut().for_each(|b| *b = false);
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let row = cost.row(i0 - 1);
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = row[j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
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

    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[p[j] - 1] = j - 1;
    }
    let row_pot: Vec<f64> = u[1..].to_vec();
    let col_pot: Vec<f64> = v[1..].to_vec();
    lexicographic_tie_break(cost, &row_pot, &col_pot, &mut perm);
    let total = perm.iter().enumerate().map(|(r, &c)| cost[(r, c)]).sum();
    Ok(Assignment { perm, total })
}

/// Rewrites an optimal `perm` into the lexicographically smallest optimal one.
///
/// Every optimal assignment uses only edges with zero reduced cost
/// `c_ij − u_i − v_j` (complementary slackness), so it is enough to search the
/// tight subgraph.
fn lexicographic_tie_break(cost: &Matrix, u: &[f64], v: &[f64], perm: &mut [usize]) {
    let n = perm.len();
    let scale = 1.0 + cost.max_abs();
    let tol = 1e-12 * scale;
    let tight = |i: usize, j: usize| (cost[(i, j)] - u[i] - v[j]).abs() <= tol;
    let mut owner = vec![0usize; n];
    for (r, &c) in perm.iter().enumerate() {
        owner[c] = r;
    }
    for i in 0..n {
        for j in 0..perm[i] {
            if !tight(i, j) || owner[j] < i {
                continue;
            }
            // Need an alternating path from owner[j] to column perm[i] through
            // rows > i, using tight edges.
            let target = perm[i];
            let start = owner[j];
            let mut prev_col = vec![usize::MAX; n];
            let mut seen_row = vec![false; n];
            let mut stack = vec![start];
            seen_row[start] = true;
            let mut found = None;
            'search: while let Some(r) = stack.pop() {
                for c in 0..n {
                    if c == perm[r] || prev_col[c] != usize::MAX || !tight(r, c) {
                        continue;
                    }
                    if c == target {
                        prev_col[c] = r;
                        found = Some(c);
                        break 'search;
                    }
                    let next = owner[c];
                    if next <= i || seen_row[next] {
                        continue;
                    }
                    prev_col[c] = r;
                    seen_row[next] = true;
                    stack.push(next);
                }
            }
            if let Some(mut c) = found {
                // Shift columns along the path back to `start`.
                loop {
                    let r = prev_col[c];
                    let old = perm[r];
                    perm[r] = c;
                    owner[c] = r;
                    if r == start {
                        break;
                    }
                    c = old;
                }
                perm[i] = j;
                owner[j] = i;
                break;
            }
        }
    }
}

/// Minimum assignment by enumerating all `n!` permutations in lexicographic
/// order (first minimum wins). Only for `n ≤ 8`.
pub fn brute_force_assignment(cost: &Matrix) -> Result<Assignment> {
    check_cost(cost, "brute_force_assignment")?;
    let n = cost.rows();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::invalid(format!(
            "brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}"
        )));
    }
    let mut best = Assignment {
        perm: (0..n).collect(),
        total: f64::INFINITY,
    };
    if n == 0 {
        best.total = 0.0;
        return Ok(best);
    }
    for perm in (0..n).permutations(n) {
        let total: f64 = perm.iter().enumerate().map(|(r, &c)| cost[(r, c)]).sum();
        if total < best.total {
            best = Assignment { perm, total };
        }
    }
    Ok(best)
}
