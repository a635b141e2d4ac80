//! Dense minimum-cost assignment (Hungarian algorithm with potentials),
//! O(rows^2 * cols) for rows <= cols. Disallowed edges are encoded as large
//! finite costs; any optimal solution that still uses one is infeasible.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CoreError, Result};

/// Cost of an edge the solver must avoid whenever a feasible solution
/// exists. Large enough that one such edge dominates any feasible total.
pub const FORBIDDEN_COST: f64 = 1e9;

/// Solves `min sum cost[r][assign(r)]` over injective row-to-column
/// assignments. `cost` is row-major `rows x cols` and `rows <= cols`.
/// Returns the assigned column per row.
pub fn min_cost_assignment(cost: &[f64], rows: usize, cols: usize) -> Result<Vec<usize>> {
    if rows > cols {
        return Err(CoreError::Param(format!(
            "assignment needs rows <= cols, got {rows} x {cols}"
        )));
    }
    if cost.len() != rows * cols {
        return Err(CoreError::Shape(format!(
            "cost matrix length {} != {rows} x {cols}",
            cost.len()
        )));
    }
    if rows == 0 {
        return Ok(Vec::new());
    }
    let at = |r: usize, c: usize| cost[(r - 1) * cols + (c - 1)];

    // Potentials u, v and matching p over 1-based indices; p[j] is the row
    // matched to column j (0 = free).
    let mut u = vec![0.0; rows + 1];
    let mut v = vec![0.0; cols + 1];
    let mut p = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    for i in 1..=rows {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; cols + 1];
        let mut used = vec![false; cols + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=cols {
                if used[j] {
                    continue;
                }
                let cur = at(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=cols {
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

    let mut assign = vec![usize::MAX; rows];
    for j in 1..=cols {
        if p[j] != 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    debug_assert!(assign.iter().all(|&c| c != usize::MAX));
    Ok(assign)
}
