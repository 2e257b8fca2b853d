use num_complex::Complex64;

use super::HarnessError;
use crate::channel::RelayFrame;
use crate::ldpc::{direct_llr, systematize, ParityCheckMatrix};
use crate::lp::{solve_lp, LpProblem, RowSpec, SolveStatus, SolverOptions};
use crate::receivers::ReceiverError;

/// Largest message length the oracle will enumerate.
pub const ORACLE_MAX_MESSAGE_BITS: usize = 16;

/// Exact joint MILP optimum by enumeration, for testing the unified decoder.
///
/// For every codeword the symbols are fixed by Gray mapping, the direct-link
/// misfit is evaluated in closed form, and a small LP over the combiner and
/// its slacks (4 + 2N columns) supplies the rest. LLRs come from the frame's
/// noise variance, as in the decoders. Returns the best codeword and its
/// objective; among objectives equal up to 1e-9 relative, the
/// lexicographically smallest bit vector wins.
pub fn brute_force_oracle(
    frame: &RelayFrame,
    h1: Complex64,
    h: &ParityCheckMatrix,
    lambda_t: f64,
    lambda_tau: f64,
) -> Result<(Vec<u8>, f64), HarnessError> {
    let n = frame.symbols();
    if h.n_cols() != 2 * n {
        return Err(ReceiverError::CodeLength { code: h.n_cols(), frame_bits: 2 * n }.into());
    }
    let encoder = systematize(h);
    if encoder.message_length() > ORACLE_MAX_MESSAGE_BITS {
        return Err(HarnessError::OracleTooLarge(encoder.message_length()));
    }
    let gamma = direct_llr(&frame.r1, h1, frame.noise_var)?;

    let mut best: Option<(Vec<u8>, f64)> = None;
    for word in encoder.all_codewords() {
        let c = word.bits;
        let x: Vec<Complex64> =
            (0..n).map(|k| Complex64::new(1.0 - 2.0 * c[2 * k + 1] as f64, 1.0 - 2.0 * c[2 * k] as f64)).collect();
        let llr: f64 = c.iter().zip(&gamma).map(|(&b, g)| b as f64 * g).sum();
        let misfit: f64 = x
            .iter()
            .zip(&frame.r1)
            .map(|(&s, &r)| {
                let d = h1 * s - r;
                d.re.abs() + d.im.abs()
            })
            .sum();
        let total = llr + lambda_t * misfit + lambda_tau * combiner_fit(frame, &x)?;
        let better = match &best {
            None => true,
            Some((_, b)) => total < b - 1e-9 * (1.0 + b.abs()),
        };
        if better {
            best = Some((c, total));
        }
    }
    Ok(best.expect("a code always contains the zero word"))
}

/// `min sum |Re e_k| + |Im e_k|` over the combiner `theta`, where
/// `e_k = x_k - conj(theta_1) r1_k - conj(theta_2) r2_k`.
fn combiner_fit(frame: &RelayFrame, x: &[Complex64]) -> Result<f64, HarnessError> {
    let n = x.len();
    // Columns: a1, b1, a2, b2 (theta_i = a_i + j b_i), then tau_re, tau_im.
    let mut obj = vec![0.0; 4 + 2 * n];
    obj[4..].iter_mut().for_each(|c| *c = 1.0);
    let mut p = LpProblem::new(obj);
    for j in 0..4 {
        p.set_bounds(j, f64::NEG_INFINITY, f64::INFINITY);
    }
    for k in 0..n {
        let rs = [frame.r1[k], frame.r2[k]];
        // Re(conj(theta) r) = a Re r + b Im r ; Im(conj(theta) r) = a Im r - b Re r
        let re: Vec<(usize, f64)> = (0..2).flat_map(|i| [(2 * i, rs[i].re), (2 * i + 1, rs[i].im)]).collect();
        let im: Vec<(usize, f64)> = (0..2).flat_map(|i| [(2 * i, rs[i].im), (2 * i + 1, -rs[i].re)]).collect();
        for (expr, target, slack) in [(re, x[k].re, 4 + k), (im, x[k].im, 4 + n + k)] {
            // |target - expr| <= slack
            let mut up: Vec<(usize, f64)> = expr.iter().map(|&(c, v)| (c, -v)).collect();
            up.push((slack, -1.0));
            let mut down = expr.clone();
            down.push((slack, -1.0));
            p.add_row(RowSpec::le(up, -target)).map_err(ReceiverError::from)?;
            p.add_row(RowSpec::le(down, target)).map_err(ReceiverError::from)?;
        }
    }
    let s = solve_lp(&p, &SolverOptions::default()).map_err(ReceiverError::from)?;
    if s.status != SolveStatus::Optimal {
        return Err(ReceiverError::NoSolution(s.status).into());
    }
    Ok(s.objective_value)
}
