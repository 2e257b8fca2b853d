//! Bounded-variable revised simplex.
//!
//! Every row gets a slack (`[0, inf)` for `<=`, `[0, 0]` for `=`) and an
//! artificial column. The starting basis is made of slacks where the row is
//! satisfied by the initial nonbasic point and artificials elsewhere, so the
//! initial basis matrix is a signed identity. Artificials carry the Big-M cost
//! `M = 1e7 * max|coefficient|`, kept as a separate cost component so the two
//! parts of each reduced cost never cancel in floating point.
//!
//! The basis inverse is held explicitly (column-major) and updated with one
//! elementary row transformation per pivot. Pricing is Dantzig's rule; after
//! `2 * (vars + rows)` consecutive degenerate pivots the solver switches to
//! Bland's rule until progress resumes.
//!
//! Branch-and-bound re-solves through [`WarmLp`], which keeps the last basis
//! and repairs bound violations with a bounded dual simplex before handing
//! back to the primal loop. `solve_lp` itself always starts cold.

use super::{LpError, LpProblem, LpSolution, RowSense, SolveStatus, SolverOptions};
use super::{FEASIBILITY_TOL, OPTIMALITY_TOL};

const PIVOT_TOL: f64 = 1e-9;
const HARRIS_TOL: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-12;
const ARTIFICIAL_NOISE: f64 = 1e-11;
const REFRESH_EVERY: usize = 50;
const BIG_M_FACTOR: f64 = 1e7;

/// Solves the continuous relaxation of `problem` (the integer mask is ignored).
///
/// Malformed problems are rejected before any pivot. The result is a pure
/// function of the problem data.
pub fn solve_lp(problem: &LpProblem, opts: &SolverOptions) -> Result<LpSolution, LpError> {
    problem.validate()?;
    let mut lp = Simplex::new(problem);
    let status = lp.primal(opts);
    Ok(lp.extract(status, 0))
}

/// Dot product with independent partial sums so the compiler can vectorise.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable parked at zero.
    Free,
}

struct Simplex<'a> {
    p: &'a LpProblem,
    n: usize,
    m: usize,
    // Structural columns in compressed column form.
    col_start: Vec<usize>,
    col_row: Vec<usize>,
    col_val: Vec<f64>,
    art_sign: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    big_m: f64,
    x: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    // Column-major explicit inverse: entry (i, k) lives at binv[k * m + i].
    binv: Vec<f64>,
    dual_c: Vec<f64>,
    dual_a: Vec<f64>,
    basic_artificials: usize,
    iterations: usize,
    // Set when duals / basic values were recomputed from scratch and nothing
    // has moved since.
    duals_fresh: bool,
    primal_fresh: bool,
    // Warm re-solves skip the from-scratch check at optimality and rely on
    // the periodic refresh instead; `extract` still verifies feasibility.
    lazy_confirm: bool,
}

impl<'a> Simplex<'a> {
    fn new(p: &'a LpProblem) -> Self {
        let n = p.num_vars();
        let m = p.num_rows();
        let total = n + 2 * m;

        let mut counts = vec![0usize; n + 1];
        for i in 0..m {
            for &c in p.row(i).0 {
                counts[c + 1] += 1;
            }
        }
        for j in 0..n {
            counts[j + 1] += counts[j];
        }
        let col_start = counts.clone();
        let mut fill = counts;
        let nnz = p.num_nonzeros();
        let mut col_row = vec![0usize; nnz];
        let mut col_val = vec![0.0; nnz];
        for i in 0..m {
            let (cols, vals) = p.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                col_row[fill[c]] = i;
                col_val[fill[c]] = v;
                fill[c] += 1;
            }
        }

        let mut scale = 1.0_f64;
        for v in col_val.iter().chain(p.objective()).chain(p.rhs()) {
            scale = scale.max(v.abs());
        }

        let mut lower = Vec::with_capacity(total);
        let mut upper = Vec::with_capacity(total);
        lower.extend_from_slice(p.lower());
        upper.extend_from_slice(p.upper());
        lower.resize(total, 0.0);
        upper.resize(total, 0.0);

        let mut cost = vec![0.0; total];
        cost[..n].copy_from_slice(p.objective());

        let mut s = Self {
            p,
            n,
            m,
            col_start,
            col_row,
            col_val,
            art_sign: vec![1.0; m],
            lower,
            upper,
            cost,
            big_m: BIG_M_FACTOR * scale,
            x: vec![0.0; total],
            state: vec![VarState::AtLower; total],
            basis: vec![0; m],
            binv: vec![0.0; m * m],
            dual_c: vec![0.0; m],
            dual_a: vec![0.0; m],
            basic_artificials: 0,
            iterations: 0,
            duals_fresh: false,
            primal_fresh: false,
            lazy_confirm: false,
        };
        s.reset();
        s
    }

    /// Cold start from the current structural bounds: structurals at a finite
    /// bound, slack/artificial crash basis.
    fn reset(&mut self) {
        let (n, m) = (self.n, self.m);
        for i in 0..m {
            self.lower[n + i] = 0.0;
            self.upper[n + i] = match self.p.row_sense(i) {
                RowSense::Le => f64::INFINITY,
                RowSense::Eq => 0.0,
            };
            self.lower[n + m + i] = 0.0;
            self.upper[n + m + i] = 0.0;
            self.art_sign[i] = 1.0;
        }
        self.x.iter_mut().for_each(|v| *v = 0.0);
        self.state.iter_mut().for_each(|st| *st = VarState::AtLower);
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            (self.x[j], self.state[j]) = if l.is_finite() {
                (l, VarState::AtLower)
            } else if u.is_finite() {
                (u, VarState::AtUpper)
            } else {
                (0.0, VarState::Free)
            };
        }
        self.binv.iter_mut().for_each(|v| *v = 0.0);
        self.basic_artificials = 0;
        self.crash_basis();
    }

    fn crash_basis(&mut self) {
        let (n, m) = (self.n, self.m);
        let mut residual = self.p.rhs().to_vec();
        for j in 0..n {
            let xj = self.x[j];
            if xj != 0.0 {
                for k in self.col_start[j]..self.col_start[j + 1] {
                    residual[self.col_row[k]] -= self.col_val[k] * xj;
                }
            }
        }
        for (i, &res) in residual.iter().enumerate() {
            let slack = n + i;
            let art = n + m + i;
            let slack_fits = res >= 0.0 && res <= self.upper[slack];
            if slack_fits {
                self.basis[i] = slack;
                self.state[slack] = VarState::Basic;
                self.x[slack] = res;
                self.binv[i * m + i] = 1.0;
            } else {
                let sign = if res >= 0.0 { 1.0 } else { -1.0 };
                self.art_sign[i] = sign;
                self.basis[i] = art;
                self.state[art] = VarState::Basic;
                self.upper[art] = f64::INFINITY;
                self.x[art] = res * sign;
                self.binv[i * m + i] = sign;
                self.basic_artificials += 1;
            }
        }
        self.refresh_duals();
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n + self.m
    }

    /// Calls `f(row, coef)` for every nonzero of column `j`.
    #[inline]
    fn for_column(&self, j: usize, mut f: impl FnMut(usize, f64)) {
        if j < self.n {
            for k in self.col_start[j]..self.col_start[j + 1] {
                f(self.col_row[k], self.col_val[k]);
            }
        } else if j < self.n + self.m {
            f(j - self.n, 1.0);
        } else {
            let i = j - self.n - self.m;
            f(i, self.art_sign[i]);
        }
    }

    fn artificial_cost(&self, j: usize) -> f64 {
        if self.is_artificial(j) {
            1.0
        } else {
            0.0
        }
    }

    fn refresh_duals(&mut self) {
        let m = self.m;
        let cb: Vec<f64> = self.basis.iter().map(|&j| self.cost[j]).collect();
        let ab: Vec<f64> = self.basis.iter().map(|&j| self.artificial_cost(j)).collect();
        let with_art = self.basic_artificials > 0;
        for k in 0..m {
            let col = &self.binv[k * m..(k + 1) * m];
            self.dual_c[k] = dot(col, &cb);
            self.dual_a[k] = if with_art { dot(col, &ab) } else { 0.0 };
        }
        self.duals_fresh = true;
    }

    /// Reduced cost of column `j` as a single Big-M weighted number.
    fn reduced_cost(&self, j: usize) -> f64 {
        let mut dc = self.cost[j];
        let mut da = self.artificial_cost(j);
        self.for_column(j, |i, v| {
            dc -= self.dual_c[i] * v;
            da -= self.dual_a[i] * v;
        });
        if da.abs() < ARTIFICIAL_NOISE {
            da = 0.0;
        }
        self.big_m * da + dc
    }

    /// Entering column and direction (+1 increase, -1 decrease).
    fn price(&self, bland: bool) -> Option<(usize, f64, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.n + self.m {
            let st = self.state[j];
            if st == VarState::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            let d = self.reduced_cost(j);
            let dir = match st {
                VarState::AtLower if d < -OPTIMALITY_TOL => 1.0,
                VarState::AtUpper if d > OPTIMALITY_TOL => -1.0,
                VarState::Free if d < -OPTIMALITY_TOL => 1.0,
                VarState::Free if d > OPTIMALITY_TOL => -1.0,
                _ => continue,
            };
            if bland {
                return Some((j, dir, d));
            }
            if d.abs() > best_score {
                best_score = d.abs();
                best = Some((j, dir, d));
            }
        }
        best
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        self.for_column(j, |k, v| {
            let col = &self.binv[k * m..(k + 1) * m];
            for (a, &b) in alpha.iter_mut().zip(col) {
                *a += v * b;
            }
        });
        alpha
    }

    /// Returns `(step, leaving row)`; `None` row means the entering variable
    /// runs to its opposite bound. `None` overall means unbounded.
    fn ratio_test(&self, q: usize, dir: f64, alpha: &[f64], bland: bool) -> Option<(f64, Option<usize>)> {
        let range = self.upper[q] - self.lower[q];
        let limit = |i: usize, relax: f64| -> Option<f64> {
            let a = dir * alpha[i];
            if a.abs() <= PIVOT_TOL {
                return None;
            }
            let j = self.basis[i];
            let xb = self.x[j];
            if a > 0.0 {
                let l = self.lower[j];
                l.is_finite().then(|| (xb - l + relax) / a)
            } else {
                let u = self.upper[j];
                u.is_finite().then(|| (u - xb + relax) / -a)
            }
        };

        if bland {
            let mut best: Option<(f64, usize)> = None;
            for i in 0..self.m {
                if let Some(t) = limit(i, 0.0) {
                    let t = t.max(0.0);
                    let better = match best {
                        None => true,
                        Some((bt, bi)) => {
                            t < bt - DEGENERATE_STEP
                                || (t <= bt + DEGENERATE_STEP && self.basis[i] < self.basis[bi])
                        }
                    };
                    if better {
                        best = Some((t, i));
                    }
                }
            }
            return match best {
                Some((t, _)) if range <= t => Some((range, None)),
                Some((t, i)) => Some((t, Some(i))),
                None if range.is_finite() => Some((range, None)),
                None => None,
            };
        }

        // Harris two-pass: bound the step with relaxed limits, then take the
        // largest pivot among rows that block within that bound.
        let mut theta_max = f64::INFINITY;
        for i in 0..self.m {
            if let Some(t) = limit(i, HARRIS_TOL) {
                theta_max = theta_max.min(t);
            }
        }
        if range <= theta_max {
            return range.is_finite().then_some((range, None));
        }
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            if let Some(t) = limit(i, 0.0) {
                if t <= theta_max {
                    let mag = alpha[i].abs();
                    if best.map_or(true, |(_, bm)| mag > bm) {
                        best = Some((i, mag));
                    }
                }
            }
        }
        let (r, _) = best?;
        let t = limit(r, 0.0).unwrap_or(0.0).max(0.0);
        Some((t, Some(r)))
    }

    fn pivot(&mut self, q: usize, r: usize, alpha: &[f64]) {
        let m = self.m;
        let ar = alpha[r];
        let leaving = self.basis[r];

        // Dual update uses the old row r of the inverse.
        let mut dc_q = self.cost[q];
        let mut da_q = self.artificial_cost(q);
        self.for_column(q, |i, v| {
            dc_q -= self.dual_c[i] * v;
            da_q -= self.dual_a[i] * v;
        });
        let (fc, fa) = (dc_q / ar, da_q / ar);
        for k in 0..m {
            let rho = self.binv[k * m + r];
            if rho != 0.0 {
                self.dual_c[k] += fc * rho;
                self.dual_a[k] += fa * rho;
            }
        }

        // Dense axpy per column keeps the update vectorisable; the pivot
        // entry cancels to (nearly) zero and is then overwritten.
        for k in 0..m {
            let col = &mut self.binv[k * m..(k + 1) * m];
            let pr = col[r];
            if pr == 0.0 {
                continue;
            }
            let pr = pr / ar;
            for (c, &a) in col.iter_mut().zip(alpha) {
                *c -= a * pr;
            }
            col[r] = pr;
        }

        self.basis[r] = q;
        self.state[q] = VarState::Basic;
        self.duals_fresh = false;
        self.primal_fresh = false;
        if self.is_artificial(leaving) {
            // Artificials never re-enter.
            self.upper[leaving] = 0.0;
            self.basic_artificials -= 1;
            if self.basic_artificials == 0 {
                self.dual_a.iter_mut().for_each(|v| *v = 0.0);
            }
        }
    }

    fn primal_residual(&self) -> Vec<f64> {
        let mut r = self.p.rhs().to_vec();
        for j in 0..self.n + 2 * self.m {
            let xj = self.x[j];
            if xj != 0.0 {
                self.for_column(j, |i, v| r[i] -= v * xj);
            }
        }
        r
    }

    /// One step of iterative refinement on the basic values; returns the
    /// residual norm before refinement.
    fn refine_primal(&mut self) -> f64 {
        let r = self.primal_residual();
        let norm = r.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if norm > 0.0 {
            let m = self.m;
            let mut delta = vec![0.0; m];
            for (k, &rk) in r.iter().enumerate() {
                if rk != 0.0 {
                    let col = &self.binv[k * m..(k + 1) * m];
                    for (d, &b) in delta.iter_mut().zip(col) {
                        *d += rk * b;
                    }
                }
            }
            for (i, d) in delta.into_iter().enumerate() {
                let j = self.basis[i];
                self.x[j] += d;
            }
        }
        self.primal_fresh = true;
        norm
    }

    /// Rebuilds the inverse from the basis columns by Gauss-Jordan elimination.
    fn reinvert(&mut self) -> bool {
        let m = self.m;
        // Row-major copy of B augmented with identity.
        let mut a = vec![0.0; m * m];
        for (c, &j) in self.basis.iter().enumerate() {
            self.for_column(j, |i, v| a[i * m + c] = v);
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let (piv, mag) = (c..m)
                .map(|i| (i, a[i * m + c].abs()))
                .fold((c, -1.0), |acc, e| if e.1 > acc.1 { e } else { acc });
            if mag < 1e-13 {
                return false;
            }
            if piv != c {
                for k in 0..m {
                    a.swap(piv * m + k, c * m + k);
                    inv.swap(piv * m + k, c * m + k);
                }
            }
            let d = a[c * m + c];
            for k in 0..m {
                a[c * m + k] /= d;
                inv[c * m + k] /= d;
            }
            for i in 0..m {
                if i == c {
                    continue;
                }
                let f = a[i * m + c];
                if f != 0.0 {
                    for k in 0..m {
                        a[i * m + k] -= f * a[c * m + k];
                        inv[i * m + k] -= f * inv[c * m + k];
                    }
                }
            }
        }
        self.duals_fresh = false;
        self.primal_fresh = false;
        // Row i of inv is row i of B^{-1}; store column-major.
        for i in 0..m {
            for k in 0..m {
                self.binv[k * m + i] = inv[i * m + k];
            }
        }
        true
    }

    fn residual_tolerance(&self) -> f64 {
        let scale = self.p.rhs().iter().fold(1.0_f64, |a, b| a.max(b.abs()));
        1e-9 * scale
    }

    fn iteration_budget(&self, opts: &SolverOptions) -> usize {
        opts.max_iterations.unwrap_or(50 * (self.n + self.m).max(1))
    }

    /// Primal simplex from a primal-feasible basis (with artificials counted
    /// as feasible), spending at most the budget of `opts` on top of the
    /// iterations already taken.
    fn primal(&mut self, opts: &SolverOptions) -> SolveStatus {
        self.primal_until(self.iterations + self.iteration_budget(opts))
    }

    fn primal_until(&mut self, max_iter: usize) -> SolveStatus {
        let (n, m) = (self.n, self.m);
        let bland_after = 2 * (n + m);
        let mut degenerate_run = 0usize;
        let mut repairs = 0usize;

        let status = loop {
            if self.iterations > 0 && self.iterations % REFRESH_EVERY == 0 {
                self.refresh_duals();
                if self.refine_primal() > self.residual_tolerance() {
                    self.reinvert();
                    self.refine_primal();
                }
            }
            let bland = degenerate_run > bland_after;
            let Some((q, dir, _)) = self.price(bland) else {
                if self.lazy_confirm {
                    break SolveStatus::Optimal;
                }
                // Confirm with fresh duals and an accurate primal before stopping.
                if !self.duals_fresh {
                    self.refresh_duals();
                }
                let res = if self.primal_fresh { 0.0 } else { self.refine_primal() };
                if res > self.residual_tolerance() && repairs < 3 {
                    repairs += 1;
                    self.reinvert();
                    self.refine_primal();
                    continue;
                }
                if self.price(bland).is_some() {
                    continue;
                }
                break SolveStatus::Optimal;
            };
            if self.iterations >= max_iter {
                break SolveStatus::IterationLimit;
            }
            self.iterations += 1;

            let alpha = self.ftran(q);
            let Some((theta, leave)) = self.ratio_test(q, dir, &alpha, bland) else {
                break SolveStatus::Unbounded;
            };
            if theta <= DEGENERATE_STEP {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }

            let step = dir * theta;
            if step != 0.0 {
                for (i, &a) in alpha.iter().enumerate() {
                    if a != 0.0 {
                        let j = self.basis[i];
                        self.x[j] -= step * a;
                    }
                }
            }
            match leave {
                None => {
                    // Bound flip.
                    self.primal_fresh = false;
                    if dir > 0.0 {
                        self.x[q] = self.upper[q];
                        self.state[q] = VarState::AtUpper;
                    } else {
                        self.x[q] = self.lower[q];
                        self.state[q] = VarState::AtLower;
                    }
                }
                Some(r) => {
                    let leaving = self.basis[r];
                    self.x[q] += step;
                    if dir * alpha[r] > 0.0 {
                        self.x[leaving] = self.lower[leaving];
                        self.state[leaving] = VarState::AtLower;
                    } else {
                        self.x[leaving] = self.upper[leaving];
                        self.state[leaving] = VarState::AtUpper;
                    }
                    self.pivot(q, r, &alpha);
                }
            }
        };
        status
    }

    /// Moves nonbasic `j` to `value` and shifts the basic variables with it.
    fn move_nonbasic(&mut self, j: usize, value: f64) {
        let delta = value - self.x[j];
        if delta == 0.0 {
            return;
        }
        self.x[j] = value;
        let alpha = self.ftran(j);
        for (i, &a) in alpha.iter().enumerate() {
            if a != 0.0 {
                let b = self.basis[i];
                self.x[b] -= delta * a;
            }
        }
    }

    /// Basic row with the largest bound violation and the bound it should
    /// leave at.
    fn most_infeasible_row(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for (i, &j) in self.basis.iter().enumerate() {
            let (xj, l, u) = (self.x[j], self.lower[j], self.upper[j]);
            let (viol, target) = if xj < l - FEASIBILITY_TOL {
                (l - xj, l)
            } else if xj > u + FEASIBILITY_TOL {
                (xj - u, u)
            } else {
                continue;
            };
            if best.map_or(true, |(_, v, _)| viol > v) {
                best = Some((i, viol, target));
            }
        }
        best.map(|(i, _, t)| (i, t))
    }

    /// `alpha_rj` for every nonbasic candidate column, from row `r` of the inverse.
    fn btran_row(&self, r: usize) -> Vec<f64> {
        let m = self.m;
        (0..m).map(|k| self.binv[k * m + r]).collect()
    }

    fn row_entry(&self, rho: &[f64], j: usize) -> f64 {
        let mut a = 0.0;
        self.for_column(j, |i, v| a += rho[i] * v);
        a
    }

    /// Bounded dual simplex from a dual-feasible basis. Returns `None` once
    /// every basic variable is within its bounds, otherwise the terminal
    /// status (`Infeasible` when a violated row has no entering candidate).
    fn dual_until(&mut self, max_iter: usize) -> Option<SolveStatus> {
        loop {
            if self.iterations > 0 && self.iterations % REFRESH_EVERY == 0 {
                self.refresh_duals();
                if self.refine_primal() > self.residual_tolerance() {
                    self.reinvert();
                    self.refine_primal();
                }
            }
            let (r, target) = self.most_infeasible_row()?;
            if self.iterations >= max_iter {
                return Some(SolveStatus::IterationLimit);
            }
            let leaving = self.basis[r];
            // Below its lower bound the leaving variable must rise: `x_B[r]`
            // moves by `-alpha_rj * dx_j`.
            let rise = self.x[leaving] < target;
            let rho = self.btran_row(r);

            let mut cands: Vec<(usize, f64, f64)> = Vec::new();
            for j in 0..self.n + self.m {
                let st = self.state[j];
                if st == VarState::Basic || self.lower[j] == self.upper[j] {
                    continue;
                }
                let a = self.row_entry(&rho, j);
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                // Direction of dx_j that moves x_B[r] the right way.
                let up = if rise { a < 0.0 } else { a > 0.0 };
                let ok = match st {
                    VarState::AtLower => up,
                    VarState::AtUpper => !up,
                    VarState::Free => true,
                    VarState::Basic => false,
                };
                if ok {
                    let d = self.reduced_cost(j);
                    cands.push((j, a, d.abs()));
                }
            }
            if cands.is_empty() {
                return Some(SolveStatus::Infeasible);
            }
            // Harris two-pass on the dual ratios |d_j / alpha_rj|.
            let theta_max = cands
                .iter()
                .map(|&(_, a, d)| (d + OPTIMALITY_TOL) / a.abs())
                .fold(f64::INFINITY, f64::min);
            let (q, _, _) = cands
                .iter()
                .filter(|&&(_, a, d)| d / a.abs() <= theta_max)
                .fold(None, |best: Option<(usize, f64, f64)>, &c| match best {
                    Some(b) if b.1.abs() >= c.1.abs() => Some(b),
                    _ => Some(c),
                })
                .expect("the minimising candidate passes its own bound");

            self.iterations += 1;
            let alpha = self.ftran(q);
            let arq = alpha[r];
            if arq.abs() <= PIVOT_TOL {
                // Row and column disagree: the inverse has drifted.
                if !self.reinvert() {
                    return Some(SolveStatus::IterationLimit);
                }
                self.refine_primal();
                self.refresh_duals();
                continue;
            }
            let dx = (self.x[leaving] - target) / arq;
            for (i, &a) in alpha.iter().enumerate() {
                if a != 0.0 {
                    let j = self.basis[i];
                    self.x[j] -= dx * a;
                }
            }
            self.x[q] += dx;
            self.x[leaving] = target;
            self.state[leaving] = if target == self.lower[leaving] { VarState::AtLower } else { VarState::AtUpper };
            self.pivot(q, r, &alpha);
        }
    }

    /// Solution in the caller's variables; `since` is the iteration count to
    /// subtract from the running total.
    fn extract(&mut self, mut status: SolveStatus, since: usize) -> LpSolution {
        let n = self.n;
        if status == SolveStatus::Optimal {
            let art_excess = (n + self.m..n + 2 * self.m)
                .filter(|&j| self.state[j] == VarState::Basic)
                .map(|j| self.x[j])
                .fold(0.0_f64, f64::max);
            if art_excess > FEASIBILITY_TOL {
                status = SolveStatus::Infeasible;
            }
        }
        let mut x: Vec<f64> = self.x[..n].to_vec();
        for (j, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[j], self.upper[j]);
        }
        if status == SolveStatus::Optimal && self.p.max_violation(&x) > FEASIBILITY_TOL {
            // Basic values drifted beyond what refinement could repair.
            self.reinvert();
            self.refine_primal();
            for (j, v) in x.iter_mut().enumerate() {
                *v = self.x[j].clamp(self.lower[j], self.upper[j]);
            }
            if self.p.max_violation(&x) > FEASIBILITY_TOL {
                status = SolveStatus::Infeasible;
            }
        }
        let objective_value = match status {
            SolveStatus::Infeasible => f64::INFINITY,
            SolveStatus::Unbounded => f64::NEG_INFINITY,
            _ => self.p.objective_at(&x),
        };
        LpSolution { status, x, objective_value, simplex_iterations: self.iterations - since }
    }
}

/// Simplex state kept alive across re-solves that differ only in the bounds
/// of structural variables, as in branch-and-bound.
///
/// The last optimal basis stays dual feasible under any bound change, so a
/// re-solve runs the dual simplex from it and then lets the primal simplex
/// confirm optimality. If that fails the solve restarts cold.
pub(crate) struct WarmLp<'a> {
    s: Simplex<'a>,
}

impl<'a> WarmLp<'a> {
    /// Caller has validated `problem`.
    pub(crate) fn new(problem: &'a LpProblem) -> Self {
        let mut s = Simplex::new(problem);
        s.lazy_confirm = true;
        Self { s }
    }

    pub(crate) fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        let s = &mut self.s;
        s.lower[j] = lower;
        s.upper[j] = upper;
        if s.state[j] == VarState::Basic {
            return;
        }
        let prefer_upper = s.state[j] == VarState::AtUpper;
        let (v, st) = if prefer_upper && upper.is_finite() {
            (upper, VarState::AtUpper)
        } else if lower.is_finite() {
            (lower, VarState::AtLower)
        } else if upper.is_finite() {
            (upper, VarState::AtUpper)
        } else {
            (0.0, VarState::Free)
        };
        s.state[j] = st;
        s.move_nonbasic(j, v);
    }

    pub(crate) fn solve(&mut self, opts: &SolverOptions) -> LpSolution {
        let s = &mut self.s;
        let start = s.iterations;
        let budget = s.iteration_budget(opts);
        // Artificials still in the basis sit at zero; hold them there so
        // the dual phase pivots them out rather than letting them absorb
        // infeasibility.
        for i in 0..s.m {
            let j = s.basis[i];
            if s.is_artificial(j) {
                s.upper[j] = 0.0;
            }
        }
        // Boxed nonbasics go to the bound their reduced cost prefers, which
        // restores dual feasibility for variables that were fixed before.
        // Pivots keep the duals current and the loops refresh them
        // periodically, so no recomputation is needed here.
        for j in 0..s.n {
            let (l, u) = (s.lower[j], s.upper[j]);
            if s.state[j] == VarState::Basic || l == u || !l.is_finite() || !u.is_finite() {
                continue;
            }
            let d = s.reduced_cost(j);
            if d < 0.0 {
                s.state[j] = VarState::AtUpper;
                s.move_nonbasic(j, u);
            } else if d > 0.0 {
                s.state[j] = VarState::AtLower;
                s.move_nonbasic(j, l);
            }
        }
        if s.price(false).is_none() {
            match s.dual_until(start + budget) {
                None => {
                    let status = s.primal_until(start + budget);
                    if status != SolveStatus::IterationLimit {
                        return s.extract(status, start);
                    }
                }
                Some(SolveStatus::Infeasible) => return s.extract(SolveStatus::Infeasible, start),
                Some(_) => {}
            }
        }
        let spent = s.iterations;
        s.reset();
        let status = s.primal_until(spent + budget);
        s.extract(status, start)
    }
}
