//! Sparse linear and mixed-integer linear programming.
//!
//! [`LpProblem`] is a minimisation problem in the form
//!
//! ```text
//! min  c^T x
//! s.t. a_i^T x (<= | =) b_i      for every row i
//!      l_j <= x_j <= u_j         for every variable j
//! ```
//!
//! Variable bounds are kept out of the row matrix and handled implicitly by the
//! bounded revised simplex in [`simplex`]. [`milp`] adds branch-and-bound over
//! the variables flagged in the integer mask.

use std::fmt::{self, Write as _};

use thiserror::Error;

pub mod milp;
pub mod simplex;

pub use milp::{solve_milp, solve_milp_from, MilpSolution};
pub use simplex::solve_lp;

/// Primal feasibility tolerance for rows.
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Reduced-cost optimality tolerance.
pub const OPTIMALITY_TOL: f64 = 1e-9;
/// Distance from an integer below which a value counts as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("objective has {got} coefficients but the problem has {expected} variables")]
    ObjectiveLength { expected: usize, got: usize },
    #[error("row {row} references column {col} but the problem has {num_vars} variables")]
    ColumnOutOfRange { row: usize, col: usize, num_vars: usize },
    #[error("row {row}: column indices must be strictly increasing")]
    UnsortedRow { row: usize },
    #[error("row {row}: explicit zero coefficient at column {col}")]
    ExplicitZero { row: usize, col: usize },
    #[error("non-finite value in {what} at index {index}")]
    NotFinite { what: &'static str, index: usize },
    #[error("variable {var}: lower bound {lower} exceeds upper bound {upper}")]
    InvertedBounds { var: usize, lower: f64, upper: f64 },
    #[error("integer variable {var} must have finite bounds")]
    UnboundedInteger { var: usize },
    #[error("problem has no integer-marked variables")]
    NoIntegerVariables,
    #[error("start point has {got} entries but the problem has {expected} variables")]
    StartLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowSense {
    /// `a^T x <= b`
    Le,
    /// `a^T x = b`
    Eq,
}

impl fmt::Display for RowSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowSense::Le => "<=",
            RowSense::Eq => "=",
        })
    }
}

/// A constraint row waiting to be added to a problem.
///
/// Entries may arrive in any order; [`LpProblem::add_row`] sorts them, merges
/// repeated columns and drops zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct RowSpec {
    pub entries: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

impl RowSpec {
    pub fn new(entries: Vec<(usize, f64)>, sense: RowSense, rhs: f64) -> Self {
        Self { entries, sense, rhs }
    }

    pub fn le(entries: Vec<(usize, f64)>, rhs: f64) -> Self {
        Self::new(entries, RowSense::Le, rhs)
    }

    pub fn eq(entries: Vec<(usize, f64)>, rhs: f64) -> Self {
        Self::new(entries, RowSense::Eq, rhs)
    }
}

/// Sparse LP / MILP instance, rows stored in compressed row form.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    num_vars: usize,
    objective: Vec<f64>,
    row_start: Vec<usize>,
    col_index: Vec<usize>,
    value: Vec<f64>,
    row_sense: Vec<RowSense>,
    rhs: Vec<f64>,
    var_lower: Vec<f64>,
    var_upper: Vec<f64>,
    integer_mask: Vec<bool>,
}

impl LpProblem {
    /// New problem with the given objective, no rows and bounds `[0, +inf)`.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            num_vars: n,
            objective,
            row_start: vec![0],
            col_index: Vec::new(),
            value: Vec::new(),
            row_sense: Vec::new(),
            rhs: Vec::new(),
            var_lower: vec![0.0; n],
            var_upper: vec![f64::INFINITY; n],
            integer_mask: vec![false; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_rows(&self) -> usize {
        self.row_sense.len()
    }

    pub fn num_nonzeros(&self) -> usize {
        self.value.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn set_objective_coef(&mut self, var: usize, coef: f64) {
        self.objective[var] = coef;
    }

    pub fn lower(&self) -> &[f64] {
        &self.var_lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.var_upper
    }

    pub fn integer_mask(&self) -> &[bool] {
        &self.integer_mask
    }

    pub fn row_sense(&self, row: usize) -> RowSense {
        self.row_sense[row]
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Column indices and coefficients of one row.
    pub fn row(&self, row: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_start[row], self.row_start[row + 1]);
        (&self.col_index[s..e], &self.value[s..e])
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.var_lower[var] = lower;
        self.var_upper[var] = upper;
    }

    pub fn set_integer(&mut self, var: usize, integer: bool) {
        self.integer_mask[var] = integer;
    }

    pub fn has_integers(&self) -> bool {
        self.integer_mask.iter().any(|&b| b)
    }

    /// Adds a row after normalising it. Fails if a column is out of range.
    pub fn add_row(&mut self, spec: RowSpec) -> Result<(), LpError> {
        let row = self.num_rows();
        let entries = normalize_entries(spec.entries, row, self.num_vars)?;
        for (c, v) in entries {
            self.col_index.push(c);
            self.value.push(v);
        }
        self.row_start.push(self.col_index.len());
        self.row_sense.push(spec.sense);
        self.rhs.push(spec.rhs);
        Ok(())
    }

    /// Returns the problem with `rows` appended after the existing rows.
    ///
    /// All new rows are checked before any is added, so an error leaves no
    /// partially extended problem behind.
    pub fn append_rows<I>(mut self, rows: I) -> Result<Self, LpError>
    where
        I: IntoIterator<Item = RowSpec>,
    {
        self.extend_rows(rows)?;
        Ok(self)
    }

    /// In-place form of [`LpProblem::append_rows`].
    pub fn extend_rows<I>(&mut self, rows: I) -> Result<(), LpError>
    where
        I: IntoIterator<Item = RowSpec>,
    {
        let rows: Vec<RowSpec> = rows.into_iter().collect();
        for (offset, r) in rows.iter().enumerate() {
            if let Some(&(col, _)) = r.entries.iter().find(|(c, _)| *c >= self.num_vars) {
                return Err(LpError::ColumnOutOfRange {
                    row: self.num_rows() + offset,
                    col,
                    num_vars: self.num_vars,
                });
            }
        }
        for r in rows {
            self.add_row(r)?;
        }
        Ok(())
    }

    /// Checks every structural invariant of the instance.
    pub fn validate(&self) -> Result<(), LpError> {
        if self.objective.len() != self.num_vars {
            return Err(LpError::ObjectiveLength {
                expected: self.num_vars,
                got: self.objective.len(),
            });
        }
        if let Some(i) = self.objective.iter().position(|c| !c.is_finite()) {
            return Err(LpError::NotFinite { what: "objective", index: i });
        }
        if let Some(i) = self.rhs.iter().position(|b| !b.is_finite()) {
            return Err(LpError::NotFinite { what: "rhs", index: i });
        }
        for row in 0..self.num_rows() {
            let (cols, vals) = self.row(row);
            for (k, (&c, &v)) in cols.iter().zip(vals).enumerate() {
                if c >= self.num_vars {
                    return Err(LpError::ColumnOutOfRange { row, col: c, num_vars: self.num_vars });
                }
                if k > 0 && cols[k - 1] >= c {
                    return Err(LpError::UnsortedRow { row });
                }
                if v == 0.0 {
                    return Err(LpError::ExplicitZero { row, col: c });
                }
                if !v.is_finite() {
                    return Err(LpError::NotFinite { what: "row coefficient", index: row });
                }
            }
        }
        for j in 0..self.num_vars {
            let (l, u) = (self.var_lower[j], self.var_upper[j]);
            if l.is_nan() || u.is_nan() || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(LpError::NotFinite { what: "bound", index: j });
            }
            if l > u {
                return Err(LpError::InvertedBounds { var: j, lower: l, upper: u });
            }
            if self.integer_mask[j] && !(l.is_finite() && u.is_finite()) {
                return Err(LpError::UnboundedInteger { var: j });
            }
        }
        Ok(())
    }

    /// `a_i^T x` for every row.
    pub fn row_activities(&self, x: &[f64]) -> Vec<f64> {
        (0..self.num_rows())
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum()
            })
            .collect()
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest row or bound violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for (i, act) in self.row_activities(x).into_iter().enumerate() {
            let v = match self.row_sense[i] {
                RowSense::Le => act - self.rhs[i],
                RowSense::Eq => (act - self.rhs[i]).abs(),
            };
            worst = worst.max(v);
        }
        for j in 0..self.num_vars {
            worst = worst.max(self.var_lower[j] - x[j]).max(x[j] - self.var_upper[j]);
        }
        worst
    }

    /// Plain-text dump in CPLEX LP style, for checking instances by hand
    /// against an external solver.
    pub fn to_lp_text(&self) -> String {
        let mut out = String::new();
        let term = |out: &mut String, first: bool, coef: f64, var: usize| {
            let sign = if coef < 0.0 { "-" } else if first { "" } else { "+" };
            let sep = if first && coef >= 0.0 { "" } else { " " };
            let _ = write!(out, " {sign}{sep}{} x{var}", fmt_num(coef.abs()));
        };
        out.push_str("Minimize\n obj:");
        let mut first = true;
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                term(&mut out, first, c, j);
                first = false;
            }
        }
        if first {
            out.push_str(" 0 x0");
        }
        out.push_str("\nSubject To\n");
        for i in 0..self.num_rows() {
            let _ = write!(out, " r{i}:");
            let (cols, vals) = self.row(i);
            if cols.is_empty() {
                out.push_str(" 0 x0");
            }
            for (k, (&c, &v)) in cols.iter().zip(vals).enumerate() {
                term(&mut out, k == 0, v, c);
            }
            let _ = writeln!(out, " {} {}", self.row_sense[i], fmt_num(self.rhs[i]));
        }
        out.push_str("Bounds\n");
        for j in 0..self.num_vars {
            let (l, u) = (self.var_lower[j], self.var_upper[j]);
            if l == f64::NEG_INFINITY && u == f64::INFINITY {
                let _ = writeln!(out, " x{j} free");
            } else if l == u {
                let _ = writeln!(out, " x{j} = {}", fmt_num(l));
            } else {
                let _ = writeln!(out, " {} <= x{j} <= {}", fmt_bound(l), fmt_bound(u));
            }
        }
        let ints: Vec<usize> = (0..self.num_vars).filter(|&j| self.integer_mask[j]).collect();
        if !ints.is_empty() {
            out.push_str("General\n");
            for j in ints {
                let _ = writeln!(out, " x{j}");
            }
        }
        out.push_str("End\n");
        out
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

fn fmt_bound(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        fmt_num(v)
    }
}

fn normalize_entries(
    mut entries: Vec<(usize, f64)>,
    row: usize,
    num_vars: usize,
) -> Result<Vec<(usize, f64)>, LpError> {
    if let Some(&(col, _)) = entries.iter().find(|(c, _)| *c >= num_vars) {
        return Err(LpError::ColumnOutOfRange { row, col, num_vars });
    }
    entries.sort_by_key(|&(c, _)| c);
    let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
    for (c, v) in entries {
        match merged.last_mut() {
            Some(last) if last.0 == c => last.1 += v,
            _ => merged.push((c, v)),
        }
    }
    merged.retain(|&(_, v)| v != 0.0);
    Ok(merged)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    /// Branch-and-bound stopped at its node budget; `x` holds the incumbent, if any.
    NodeLimit,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::IterationLimit => "iteration-limit",
            SolveStatus::NodeLimit => "node-limit",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: SolveStatus,
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub simplex_iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Pivot budget per LP solve; `None` means `50 * (vars + rows)`.
    pub max_iterations: Option<usize>,
    pub max_nodes: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { max_iterations: None, max_nodes: 1_000_000 }
    }
}
