//! LP/MILP formulations of the relay receiver.
//!
//! Per symbol `k` the problem carries the symbol components `xr, xi`, the
//! direct-link residual bounds `tr, ti` and the combiner residual bounds
//! `ur, ui`, plus one complex combiner `theta` shared by the frame:
//!
//! ```text
//! |Re(h1 x[k]) - Re(r1[k])| <= tr[k]      |xr[k] - Re(theta^H r[k])| <= ur[k]
//! |Im(h1 x[k]) - Im(r1[k])| <= ti[k]      |xi[k] - Im(theta^H r[k])| <= ui[k]
//! ```
//!
//! Each modulus constraint becomes two `<=` rows. The objective is
//! `lambda_t * sum(t) + lambda_tau * sum(u)`, and in the coded problems also
//! `sum(gamma[n] f[n])`, with bits tied to symbols by the Gray equalities
//! `xr[k] + 2 f[2k+1] = 1`, `xi[k] + 2 f[2k] = 1`.

use num_complex::Complex64;

use super::ReceiverError;
use crate::channel::RelayFrame;
use crate::ldpc::{enumerate_parity_inequalities, ParityCheckMatrix, ParityCut};
use crate::lp::{LpProblem, RowSpec};

/// Index map from formulation quantities to LP columns.
///
/// Blocks are laid out as `xr, xi, tr, ti, ur, ui` (each `symbols` long),
/// then the four real combiner parts, then the bits when present.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariableLayout {
    pub symbols: usize,
    pub lambda_t: f64,
    pub lambda_tau: f64,
    pub has_bits: bool,
}

impl VariableLayout {
    pub fn new(symbols: usize, lambda_t: f64, lambda_tau: f64, has_bits: bool) -> Self {
        Self { symbols, lambda_t, lambda_tau, has_bits }
    }

    pub fn x_re(&self, k: usize) -> usize {
        k
    }

    pub fn x_im(&self, k: usize) -> usize {
        self.symbols + k
    }

    pub fn t_re(&self, k: usize) -> usize {
        2 * self.symbols + k
    }

    pub fn t_im(&self, k: usize) -> usize {
        3 * self.symbols + k
    }

    pub fn tau_re(&self, k: usize) -> usize {
        4 * self.symbols + k
    }

    pub fn tau_im(&self, k: usize) -> usize {
        5 * self.symbols + k
    }

    /// Real combiner parts in the order `Re th1, Im th1, Re th2, Im th2`.
    pub fn theta(&self, i: usize) -> usize {
        debug_assert!(i < 4);
        6 * self.symbols + i
    }

    pub fn bit(&self, n: usize) -> usize {
        debug_assert!(self.has_bits && n < 2 * self.symbols);
        6 * self.symbols + 4 + n
    }

    pub fn num_bits(&self) -> usize {
        if self.has_bits {
            2 * self.symbols
        } else {
            0
        }
    }

    pub fn num_vars(&self) -> usize {
        6 * self.symbols + 4 + self.num_bits()
    }

    /// Rows before any parity inequality: 8 per symbol plus 2 Gray equalities
    /// per symbol when bits are present.
    pub fn base_rows(&self) -> usize {
        8 * self.symbols + self.num_bits()
    }

    pub fn symbols_from(&self, x: &[f64]) -> Vec<Complex64> {
        (0..self.symbols).map(|k| Complex64::new(x[self.x_re(k)], x[self.x_im(k)])).collect()
    }

    pub fn bits_from(&self, x: &[f64]) -> Vec<f64> {
        (0..self.num_bits()).map(|n| x[self.bit(n)]).collect()
    }

    pub fn combiner_from(&self, x: &[f64]) -> [Complex64; 2] {
        [
            Complex64::new(x[self.theta(0)], x[self.theta(1)]),
            Complex64::new(x[self.theta(2)], x[self.theta(3)]),
        ]
    }

    /// Parity inequality over the bit columns.
    pub fn cut_row(&self, h: &ParityCheckMatrix, cut: &ParityCut) -> RowSpec {
        RowSpec::le(cut.terms(h).map(|(n, c)| (self.bit(n), c)).collect(), cut.rhs())
    }
}

/// Pushes `|expr - target| <= slack` as two rows, `expr` linear in the columns.
fn push_modulus(p: &mut LpProblem, expr: &[(usize, f64)], target: f64, slack: usize) {
    let mut plus: Vec<(usize, f64)> = expr.to_vec();
    plus.push((slack, -1.0));
    let mut minus: Vec<(usize, f64)> = expr.iter().map(|&(c, v)| (c, -v)).collect();
    minus.push((slack, -1.0));
    p.add_row(RowSpec::le(plus, target)).expect("columns come from the layout");
    p.add_row(RowSpec::le(minus, -target)).expect("columns come from the layout");
}

fn build_base(
    frame: &RelayFrame,
    h1: Complex64,
    lambda_t: f64,
    lambda_tau: f64,
    with_bits: bool,
) -> Result<(LpProblem, VariableLayout), ReceiverError> {
    let n = frame.symbols();
    if n == 0 || frame.r1.len() != n || frame.r2.len() != n {
        return Err(ReceiverError::EmptyFrame);
    }
    let layout = VariableLayout::new(n, lambda_t, lambda_tau, with_bits);
    let mut obj = vec![0.0; layout.num_vars()];
    for k in 0..n {
        obj[layout.t_re(k)] = lambda_t;
        obj[layout.t_im(k)] = lambda_t;
        obj[layout.tau_re(k)] = lambda_tau;
        obj[layout.tau_im(k)] = lambda_tau;
    }
    let mut p = LpProblem::new(obj);
    for k in 0..n {
        p.set_bounds(layout.x_re(k), -1.0, 1.0);
        p.set_bounds(layout.x_im(k), -1.0, 1.0);
    }
    for i in 0..4 {
        p.set_bounds(layout.theta(i), f64::NEG_INFINITY, f64::INFINITY);
    }
    for b in 0..layout.num_bits() {
        p.set_bounds(layout.bit(b), 0.0, 1.0);
    }

    let (hr, hi) = (h1.re, h1.im);
    for k in 0..n {
        let (xr, xi) = (layout.x_re(k), layout.x_im(k));
        let r1 = frame.r1[k];
        // Re(h1 x) = hr xr - hi xi ; Im(h1 x) = hr xi + hi xr
        push_modulus(&mut p, &[(xr, hr), (xi, -hi)], r1.re, layout.t_re(k));
        push_modulus(&mut p, &[(xi, hr), (xr, hi)], r1.im, layout.t_im(k));

        // theta^H r = sum_i conj(theta_i) r_i with theta_i = a_i + j b_i:
        // Re = sum a_i Re r_i + b_i Im r_i ; Im = sum a_i Im r_i - b_i Re r_i
        let rs = [frame.r1[k], frame.r2[k]];
        let mut re_expr = vec![(xr, 1.0)];
        let mut im_expr = vec![(xi, 1.0)];
        for (i, r) in rs.iter().enumerate() {
            let (a, b) = (layout.theta(2 * i), layout.theta(2 * i + 1));
            re_expr.push((a, -r.re));
            re_expr.push((b, -r.im));
            im_expr.push((a, -r.im));
            im_expr.push((b, r.re));
        }
        push_modulus(&mut p, &re_expr, 0.0, layout.tau_re(k));
        push_modulus(&mut p, &im_expr, 0.0, layout.tau_im(k));
    }
    if with_bits {
        for k in 0..n {
            p.add_row(RowSpec::eq(vec![(layout.x_re(k), 1.0), (layout.bit(2 * k + 1), 2.0)], 1.0))
                .expect("layout columns");
            p.add_row(RowSpec::eq(vec![(layout.x_im(k), 1.0), (layout.bit(2 * k), 2.0)], 1.0))
                .expect("layout columns");
        }
    }
    Ok((p, layout))
}

/// Detection-only problem. With `integer` set, binary bit columns with Gray
/// equalities are added so branch-and-bound works on `{0, 1}` domains; the
/// relaxation keeps only the `[-1, 1]` symbol box.
pub fn build_uncoded(
    frame: &RelayFrame,
    h1: Complex64,
    lambda_t: f64,
    lambda_tau: f64,
    integer: bool,
) -> Result<(LpProblem, VariableLayout), ReceiverError> {
    let (mut p, layout) = build_base(frame, h1, lambda_t, lambda_tau, integer)?;
    for n in 0..layout.num_bits() {
        p.set_integer(layout.bit(n), true);
    }
    Ok((p, layout))
}

/// Joint detection and decoding problem: bit LLR costs `gamma`, Gray
/// equalities and, with `include_parity`, every parity inequality of `h`.
#[allow(clippy::too_many_arguments)]
pub fn build_unified(
    frame: &RelayFrame,
    h1: Complex64,
    h: &ParityCheckMatrix,
    gamma: &[f64],
    lambda_t: f64,
    lambda_tau: f64,
    integer: bool,
    include_parity: bool,
) -> Result<(LpProblem, VariableLayout), ReceiverError> {
    let bits = 2 * frame.symbols();
    if h.n_cols() != bits {
        return Err(ReceiverError::CodeLength { code: h.n_cols(), frame_bits: bits });
    }
    if gamma.len() != bits {
        return Err(ReceiverError::LlrLength { expected: bits, got: gamma.len() });
    }
    let (mut p, layout) = build_base(frame, h1, lambda_t, lambda_tau, true)?;
    for (n, &g) in gamma.iter().enumerate() {
        p.set_objective_coef(layout.bit(n), g);
        if integer {
            p.set_integer(layout.bit(n), true);
        }
    }
    if include_parity {
        let cuts = enumerate_parity_inequalities(h)?;
        p.extend_rows(cuts.iter().map(|c| layout.cut_row(h, c)))?;
    }
    Ok((p, layout))
}
