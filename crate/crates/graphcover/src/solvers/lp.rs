//! Dense two-phase simplex for small linear programs `min cᵀx, Ax (≤,≥,=) b, x ≥ 0`.

use super::SolverError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

/// Minimisation problem over non-negative variables with optional upper bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem<T> {
    pub objective: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
    pub upper: Vec<Option<T>>,
}

impl<T: Scalar> LpProblem<T> {
    pub fn new(objective: Vec<T>) -> Self {
        let n = objective.len();
        Self {
            objective,
            constraints: Vec::new(),
            upper: vec![None; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<T>, relation: Relation, rhs: T) {
        assert_eq!(coeffs.len(), self.num_vars(), "constraint width");
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    /// Adds a constraint given as `(variable, coefficient)` pairs.
    pub fn add_sparse(&mut self, terms: &[(usize, T)], relation: Relation, rhs: T) {
        let mut coeffs = vec![T::zero(); self.num_vars()];
        for &(j, a) in terms {
            coeffs[j] += a;
        }
        self.add(coeffs, relation, rhs);
    }

    pub fn set_upper(&mut self, var: usize, bound: T) {
        self.upper[var] = Some(bound);
    }

    /// Explicit constraints followed by one `x_j ≤ u_j` row per upper bound.
    pub fn all_rows(&self) -> Vec<Constraint<T>> {
        let n = self.num_vars();
        let mut rows = self.constraints.clone();
        for (j, u) in self.upper.iter().enumerate() {
            if let Some(u) = *u {
                let mut coeffs = vec![T::zero(); n];
                coeffs[j] = T::one();
                rows.push(Constraint {
                    coeffs,
                    relation: Relation::Le,
                    rhs: u,
                });
            }
        }
        rows
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub value: T,
    pub x: Vec<T>,
    /// One multiplier per row of [`LpProblem::all_rows`].
    pub duals: Vec<T>,
    pub iterations: usize,
}

/// Optimality evidence recomputed from the problem data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate<T> {
    pub primal_residual: T,
    pub dual_infeasibility: T,
    pub complementary_slackness: T,
    pub duality_gap: T,
}

impl<T: Scalar> Certificate<T> {
    pub fn holds(&self, primal_tol: T, dual_tol: T) -> bool {
        self.primal_residual <= primal_tol
            && self.dual_infeasibility <= dual_tol
            && self.complementary_slackness <= dual_tol
            && self.duality_gap <= dual_tol
    }
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    /// Reduced costs; last entry holds minus the objective value.
    obj: Vec<T>,
    basis: Vec<usize>,
    ncols: usize,
    tol: T,
}

#[derive(PartialEq)]
enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for x in self.rows[r].iter_mut() {
            *x /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != T::zero() {
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * y;
                }
                row[c] = T::zero();
            }
        }
        let f = self.obj[c];
        if f != T::zero() {
            for (x, &y) in self.obj.iter_mut().zip(&pivot_row) {
                *x -= f * y;
            }
            self.obj[c] = T::zero();
        }
        self.basis[r] = c;
    }

    fn set_costs(&mut self, cost: &[T]) {
        let w = self.rows.first().map_or(self.ncols + 1, Vec::len);
        self.obj = vec![T::zero(); w];
        self.obj[..self.ncols].copy_from_slice(cost);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != T::zero() {
                for j in 0..w {
                    self.obj[j] -= cb * self.rows[i][j];
                }
            }
        }
    }

    /// Runs simplex iterations over columns where `allowed` holds.
    fn run(&mut self, allowed: &[bool], iters: &mut usize, limit: usize) -> Result<PhaseEnd, SolverError> {
        const STALL: usize = 30;
        let rhs = self.ncols;
        let mut degenerate_run = 0usize;
        let mut bland = false;
        loop {
            let entering = if bland {
                (0..self.ncols).find(|&j| allowed[j] && self.obj[j] < -self.tol)
            } else {
                let mut best: Option<(usize, T)> = None;
                for j in 0..self.ncols {
                    let d = self.obj[j];
                    if allowed[j] && d < -self.tol && best.is_none_or(|(_, b)| d < b) {
                        best = Some((j, d));
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(c) = entering else {
                return Ok(PhaseEnd::Optimal);
            };
            let mut leave: Option<(usize, T)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[c];
                if a > self.tol {
                    let ratio = row[rhs] / a;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - self.tol
                                || (ratio <= lr + self.tol && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(PhaseEnd::Unbounded);
            };
            *iters += 1;
            if *iters > limit {
                return Err(SolverError::IterationLimit(limit));
            }
            if ratio <= self.tol {
                degenerate_run += 1;
                if degenerate_run >= STALL {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }
            self.pivot(r, c);
        }
    }
}

/// Solves `p` to optimality.
///
/// Inequality rows are first loosened by tiny distinct amounts so that ties in the
/// ratio test (rife in assignment-like programs) disappear; the final basis is then
/// evaluated on the original right-hand side. If it is infeasible there, the
/// problem is re-solved without perturbation.
pub fn solve_lp<T: Scalar>(p: &LpProblem<T>) -> Result<LpSolution<T>, SolverError> {
    match solve_with(p, true) {
        Ok(Some(s)) => Ok(s),
        Ok(None) => solve_with(p, false).map(|s| s.expect("unperturbed solve always concludes")),
        Err(e) => Err(e),
    }
}

fn solve_with<T: Scalar>(p: &LpProblem<T>, perturb: bool) -> Result<Option<LpSolution<T>>, SolverError> {
    let n = p.num_vars();
    let rows = p.all_rows();
    let m = rows.len();
    for c in &rows {
        if c.coeffs.iter().chain(std::iter::once(&c.rhs)).any(|x| !x.is_finite()) {
            return Err(SolverError::NonFinite);
        }
    }
    if p.objective.iter().any(|x| !x.is_finite()) {
        return Err(SolverError::NonFinite);
    }

    // Normalise to rhs ≥ 0; a zero-rhs ≥ row becomes a ≤ row so its slack can start basic.
    let mut sign = vec![T::one(); m];
    let mut rel = Vec::with_capacity(m);
    for (i, c) in rows.iter().enumerate() {
        let flip = c.rhs < T::zero() || (c.rhs == T::zero() && c.relation == Relation::Ge);
        if flip {
            sign[i] = -T::one();
        }
        rel.push(match (c.relation, flip) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (r, _) => r,
        });
    }

    // Column layout: originals, then per row its slack/surplus, then artificials.
    let mut ncols = n;
    let mut unit_col = vec![0usize; m];
    let mut surplus_col = vec![None; m];
    for i in 0..m {
        match rel[i] {
            Relation::Le => {
                unit_col[i] = ncols;
                ncols += 1;
            }
            Relation::Ge => {
                surplus_col[i] = Some(ncols);
                ncols += 1;
            }
            Relation::Eq => {}
        }
    }
    let first_art = ncols;
    for i in 0..m {
        if rel[i] != Relation::Le {
            unit_col[i] = ncols;
            ncols += 1;
        }
    }

    // Column `ncols` is the working right-hand side, `ncols + 1` the original one.
    let scale = rows.iter().fold(T::one(), |acc, c| acc.max(c.rhs.abs()));
    let mut table = vec![vec![T::zero(); ncols + 2]; m];
    for (i, c) in rows.iter().enumerate() {
        for j in 0..n {
            table[i][j] = sign[i] * c.coeffs[j];
        }
        table[i][unit_col[i]] = T::one();
        if let Some(s) = surplus_col[i] {
            table[i][s] = -T::one();
        }
        table[i][ncols + 1] = sign[i] * c.rhs;
        table[i][ncols] = table[i][ncols + 1];
        if perturb && rel[i] == Relation::Le {
            // Golden-ratio sequence: distinct offsets in [1, 2) · 1e-7 · scale.
            let u = (i as f64 * 0.618_033_988_749_895).fract();
            table[i][ncols] += T::lit(1e-7 * (1.0 + u)) * scale;
        }
    }
    let mut tab = Tableau {
        rows: table,
        obj: Vec::new(),
        basis: unit_col.clone(),
        ncols,
        tol: T::tolerance(),
    };
    let limit = (200 * (m + ncols)).max(20_000);
    let mut iters = 0usize;

    if first_art < ncols {
        let mut cost = vec![T::zero(); ncols];
        for c in cost.iter_mut().skip(first_art) {
            *c = T::one();
        }
        tab.set_costs(&cost);
        let allowed = vec![true; ncols];
        tab.run(&allowed, &mut iters, limit)?;
        let infeas = -tab.obj[ncols];
        if infeas > T::lit(1e3) * tab.tol * scale {
            return Err(SolverError::Infeasible);
        }
        // Drive remaining artificials out of the basis or drop redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= first_art {
                let pivot_col = (0..first_art).find(|&j| tab.rows[i][j].abs() > tab.tol);
                match pivot_col {
                    Some(j) => {
                        tab.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let mut cost = vec![T::zero(); ncols];
    cost[..n].copy_from_slice(&p.objective);
    tab.set_costs(&cost);
    let allowed: Vec<bool> = (0..ncols).map(|j| j < first_art).collect();
    if tab.run(&allowed, &mut iters, limit)? == PhaseEnd::Unbounded {
        return Err(SolverError::Unbounded);
    }

    let primal_tol = T::lit(1e3) * tab.tol * scale;
    if perturb && tab.rows.iter().any(|row| row[ncols + 1] < -primal_tol) {
        return Ok(None);
    }
    let mut x = vec![T::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rows[i][ncols + 1].max(T::zero());
        }
    }
    let value = p.objective.iter().zip(&x).map(|(&c, &v)| c * v).sum();
    let duals = (0..m).map(|i| -tab.obj[unit_col[i]] * sign[i]).collect();
    Ok(Some(LpSolution {
        value,
        x,
        duals,
        iterations: iters,
    }))
}

/// Recomputes primal feasibility, dual feasibility, complementary slackness and the gap.
pub fn certify<T: Scalar>(p: &LpProblem<T>, s: &LpSolution<T>) -> Certificate<T> {
    let rows = p.all_rows();
    let mut primal = T::zero();
    let mut cs = T::zero();
    let mut dual_inf = T::zero();
    for &v in &s.x {
        primal = primal.max(-v);
    }
    let mut by = T::zero();
    for (c, &y) in rows.iter().zip(&s.duals) {
        let ax: T = c.coeffs.iter().zip(&s.x).map(|(&a, &v)| a * v).sum();
        let slack = ax - c.rhs;
        let viol = match c.relation {
            Relation::Le => slack,
            Relation::Ge => -slack,
            Relation::Eq => slack.abs(),
        };
        primal = primal.max(viol);
        let wrong_sign = match c.relation {
            Relation::Le => y,
            Relation::Ge => -y,
            Relation::Eq => T::zero(),
        };
        dual_inf = dual_inf.max(wrong_sign);
        cs = cs.max((y * slack).abs());
        by += y * c.rhs;
    }
    for j in 0..p.num_vars() {
        let reduced = p.objective[j] - rows.iter().zip(&s.duals).map(|(c, &y)| y * c.coeffs[j]).sum::<T>();
        dual_inf = dual_inf.max(-reduced);
        cs = cs.max((reduced * s.x[j]).abs());
    }
    Certificate {
        primal_residual: primal,
        dual_infeasibility: dual_inf,
        complementary_slackness: cs,
        duality_gap: (s.value - by).abs(),
    }
}
