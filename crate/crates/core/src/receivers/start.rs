//! Primal heuristic for the detection MILP.
//!
//! For a fixed combiner the objective splits into independent per-symbol
//! choices, and for fixed symbols a least-squares combiner is a closed form.
//! Alternating the two from several starts gives a good integral point
//! cheaply, which lets branch-and-bound prune from its first node.

use num_complex::Complex64;

use super::formulation::VariableLayout;
use crate::channel::RelayFrame;

const QAM4: [Complex64; 4] = [
    Complex64::new(1.0, 1.0),
    Complex64::new(-1.0, 1.0),
    Complex64::new(1.0, -1.0),
    Complex64::new(-1.0, -1.0),
];
/// Phase offsets for the relay-only starts, spread over a full turn so every
/// rotation of the constellation gets its own start.
const PHASES: usize = 32;
const MAX_SWEEPS: usize = 20;

fn l1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

fn slice(z: Complex64) -> Complex64 {
    let s = |v: f64| if v < 0.0 { -1.0 } else { 1.0 };
    Complex64::new(s(z.re), s(z.im))
}

/// Least-squares `w` with `x[k] ~ w[0] r1[k] + w[1] r2[k]`.
fn fit_combiner(frame: &RelayFrame, x: &[Complex64]) -> [Complex64; 2] {
    let (mut a11, mut a12, mut a22) = (0.0, Complex64::new(0.0, 0.0), 0.0);
    let (mut b1, mut b2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for ((&r1, &r2), &xk) in frame.r1.iter().zip(&frame.r2).zip(x) {
        a11 += r1.norm_sqr();
        a22 += r2.norm_sqr();
        a12 += r1.conj() * r2;
        b1 += r1.conj() * xk;
        b2 += r2.conj() * xk;
    }
    let det = a11 * a22 - a12.norm_sqr();
    if det > 1e-12 * (a11 * a22).max(f64::MIN_POSITIVE) {
        [(b1 * a22 - a12 * b2) / det, (b2 * a11 - a12.conj() * b1) / det]
    } else if a22 > 0.0 {
        [Complex64::new(0.0, 0.0), b2 / a22]
    } else {
        [Complex64::new(0.0, 0.0); 2]
    }
}

struct Costs<'a> {
    frame: &'a RelayFrame,
    h1: Complex64,
    lambda_t: f64,
    lambda_tau: f64,
}

impl Costs<'_> {
    fn symbol(&self, k: usize, s: Complex64, w: &[Complex64; 2]) -> f64 {
        let z = w[0] * self.frame.r1[k] + w[1] * self.frame.r2[k];
        self.lambda_t * l1(self.h1 * s - self.frame.r1[k]) + self.lambda_tau * l1(s - z)
    }

    /// Best symbols for `w` and their total cost.
    fn choose(&self, w: &[Complex64; 2], x: &mut [Complex64]) -> f64 {
        let mut total = 0.0;
        for (k, xk) in x.iter_mut().enumerate() {
            let (s, c) = QAM4
                .iter()
                .map(|&s| (s, self.symbol(k, s, w)))
                .fold((QAM4[0], f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
            *xk = s;
            total += c;
        }
        total
    }

    fn refine(&self, mut x: Vec<Complex64>) -> (Vec<Complex64>, f64) {
        let mut cost = f64::INFINITY;
        for _ in 0..MAX_SWEEPS {
            let w = fit_combiner(self.frame, &x);
            let mut next = x.clone();
            cost = self.choose(&w, &mut next);
            if next == x {
                break;
            }
            x = next;
        }
        (x, cost)
    }
}

/// Integral starting point for the detection MILP built by `build_uncoded`
/// with binaries; only the bit entries are meaningful.
pub(crate) fn uncoded_start(
    frame: &RelayFrame,
    h1: Complex64,
    layout: &VariableLayout,
    num_vars: usize,
) -> Vec<f64> {
    let costs = Costs { frame, h1, lambda_t: layout.lambda_t, lambda_tau: layout.lambda_tau };
    let direct: Vec<Complex64> = frame.r1.iter().map(|&r| slice(r / h1)).collect();
    let relay = (0..PHASES).map(|p| {
        let rot = Complex64::from_polar(1.0, std::f64::consts::TAU * p as f64 / PHASES as f64);
        frame.r2.iter().map(|&r| slice(rot * r)).collect::<Vec<_>>()
    });
    let (best, _) = std::iter::once(direct)
        .chain(relay)
        .map(|x| costs.refine(x))
        .fold((Vec::new(), f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });

    let mut start = vec![0.0; num_vars];
    for (k, s) in best.iter().enumerate() {
        start[layout.bit(2 * k + 1)] = (1.0 - s.re) / 2.0;
        start[layout.bit(2 * k)] = (1.0 - s.im) / 2.0;
    }
    start
}
