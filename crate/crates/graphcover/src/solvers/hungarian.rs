//! Minimum-cost perfect assignment (Hungarian method with potentials, O(m³)).

use super::SolverError;
use num_traits::Num;

/// Optimal assignment: `perm[row] = column`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<T> {
    pub perm: Vec<usize>,
    pub cost: T,
}

/// Solves the square assignment problem exactly for any ordered ring.
///
/// Works for floats as well as integers and rationals; ties are broken towards the
/// lowest column index.
pub fn assignment<T>(cost: &[Vec<T>]) -> Result<Assignment<T>, SolverError>
where
    T: Num + Copy + PartialOrd,
{
    let m = cost.len();
    for row in cost {
        if row.len() != m {
            return Err(SolverError::NotSquare);
        }
        // x - x is nonzero only for NaN and infinities, and exact for integer types.
        #[allow(clippy::eq_op)]
        let non_finite = row.iter().any(|&x| x - x != T::zero());
        if non_finite {
            return Err(SolverError::NonFinite);
        }
    }
    if m == 0 {
        return Ok(Assignment {
            perm: Vec::new(),
            cost: T::zero(),
        });
    }
    // 1-based potentials; column 0 is a virtual start column.
    let mut u = vec![T::zero(); m + 1];
    let mut v = vec![T::zero(); m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=m {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<T>> = vec![None; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<T> = None;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if minv[j].is_none_or(|mv| cur < mv) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                let mj = minv[j].expect("set above");
                if delta.is_none_or(|d| mj < d) {
                    delta = Some(mj);
                    j1 = j;
                }
            }
            let delta = delta.expect("an unused column remains");
            for j in 0..=m {
                if used[j] {
                    u[p[j]] = u[p[j]] + delta;
                    v[j] = v[j] - delta;
                } else if let Some(mv) = minv[j] {
                    minv[j] = Some(mv - delta);
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
    let mut perm = vec![0usize; m];
    for j in 1..=m {
        perm[p[j] - 1] = j - 1;
    }
    let total = perm
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (i, &j)| acc + cost[i][j]);
    Ok(Assignment { perm, cost: total })
}
