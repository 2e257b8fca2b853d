//! Independent oracles shared by the integration tests. Nothing here calls the
//! code path it is used to check, except where an oracle is explicitly built
//! on top of an already-verified primitive (`solve_lp` for MILP leaves).

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relaylp::lp::{solve_lp, LpProblem, RowSense, RowSpec, SolveStatus, SolverOptions};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Result of dense vertex enumeration: `None` when no vertex is feasible.
pub fn vertex_enumeration_min(p: &LpProblem) -> Option<f64> {
    let n = p.num_vars();
    // Every constraint as (a, b, is_equality) meaning a.x <= b (or = b).
    let mut cons: Vec<(Vec<f64>, f64, bool)> = Vec::new();
    for i in 0..p.num_rows() {
        let mut a = vec![0.0; n];
        let (cols, vals) = p.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            a[c] = v;
        }
        cons.push((a, p.rhs()[i], p.row_sense(i) == RowSense::Eq));
    }
    for j in 0..n {
        assert!(p.lower()[j].is_finite() && p.upper()[j].is_finite(), "oracle needs a box");
        let mut a = vec![0.0; n];
        a[j] = 1.0;
        cons.push((a.clone(), p.upper()[j], false));
        a[j] = -1.0;
        cons.push((a, -p.lower()[j], false));
    }
    let feasible = |x: &[f64]| {
        cons.iter().all(|(a, b, eq)| {
            let act: f64 = a.iter().zip(x).map(|(u, v)| u * v).sum();
            if *eq {
                (act - b).abs() <= 1e-7
            } else {
                act <= b + 1e-7
            }
        })
    };
    let mut best: Option<f64> = None;
    let mut subset: Vec<usize> = (0..n).collect();
    loop {
        let rows: Vec<&(Vec<f64>, f64, bool)> = subset.iter().map(|&i| &cons[i]).collect();
        if let Some(x) = dense_solve(
            rows.iter().map(|r| r.0.clone()).collect(),
            rows.iter().map(|r| r.1).collect(),
        ) {
            if feasible(&x) {
                let obj: f64 = p.objective().iter().zip(&x).map(|(c, v)| c * v).sum();
                best = Some(best.map_or(obj, |b: f64| b.min(obj)));
            }
        }
        if !next_combination(&mut subset, cons.len()) {
            break;
        }
    }
    best
}

pub fn binomial(n: usize, k: usize) -> u64 {
    let mut r: u64 = 1;
    for i in 0..k as u64 {
        r = r * (n as u64 - i) / (i + 1);
    }
    r
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Gaussian elimination with partial pivoting; `None` if (near) singular.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            if f != 0.0 {
                for k in c..n {
                    a[i][k] -= f * a[c][k];
                }
                b[i] -= f * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Random boxed LP with `n` variables and `m` rows.
pub fn random_boxed_lp(rng: &mut impl Rng, n: usize, m: usize) -> LpProblem {
    let obj: Vec<f64> = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
    let mut p = LpProblem::new(obj);
    for j in 0..n {
        let lo = rng.random_range(-3..=0) as f64;
        let hi = lo + rng.random_range(0..=5) as f64;
        p.set_bounds(j, lo, hi);
    }
    for _ in 0..m {
        let mut entries = Vec::new();
        for j in 0..n {
            if rng.random_bool(0.6) {
                entries.push((j, rng.random_range(-4..=4) as f64 + rng.random_range(0..4) as f64 * 0.25));
            }
        }
        let sense = if rng.random_bool(0.15) { RowSense::Eq } else { RowSense::Le };
        let rhs = rng.random_range(-6..=8) as f64 * 0.5;
        p.add_row(RowSpec::new(entries, sense, rhs)).unwrap();
    }
    p
}

/// 2^k enumeration: fix each integer variable pattern and solve the rest.
pub fn milp_enumeration_min(p: &LpProblem) -> Option<f64> {
    let ints: Vec<usize> = (0..p.num_vars()).filter(|&j| p.integer_mask()[j]).collect();
    let mut best: Option<f64> = None;
    for pattern in 0u32..(1 << ints.len()) {
        let mut q = p.clone();
        let mut ok = true;
        for (b, &j) in ints.iter().enumerate() {
            let v = ((pattern >> b) & 1) as f64;
            if v < p.lower()[j] || v > p.upper()[j] {
                ok = false;
            }
            q.set_bounds(j, v, v);
            q.set_integer(j, false);
        }
        if !ok {
            continue;
        }
        let s = solve_lp(&q, &SolverOptions::default()).unwrap();
        if s.status == SolveStatus::Optimal {
            best = Some(best.map_or(s.objective_value, |b: f64| b.min(s.objective_value)));
        }
    }
    best
}

/// Extended Hamming (8,4) code, which is self-dual: a weight-4 basis of the
/// first-order Reed-Muller code of length 8 serves as `H`.
pub fn extended_hamming() -> relaylp::ldpc::ParityCheckMatrix {
    relaylp::ldpc::ParityCheckMatrix::from_rows(
        8,
        vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7], vec![2, 3, 6, 7], vec![1, 3, 5, 7]],
    )
    .unwrap()
}

/// Gray 4-QAM written out point by point: bit pair `(f[2k], f[2k+1])`.
pub const GRAY_TABLE: [((u8, u8), (f64, f64)); 4] =
    [((0, 0), (1.0, 1.0)), ((0, 1), (-1.0, 1.0)), ((1, 0), (1.0, -1.0)), ((1, 1), (-1.0, -1.0))];

pub fn gray_point(b0: u8, b1: u8) -> num_complex::Complex64 {
    let (_, (re, im)) = GRAY_TABLE.iter().find(|(bits, _)| *bits == (b0, b1)).unwrap();
    num_complex::Complex64::new(*re, *im)
}

/// Largest `lhs - (|F| - 1)` over every odd subset `F` of a check holding
/// the values `vals`, by listing all subsets.
pub fn max_odd_subset_violation(vals: &[f64]) -> f64 {
    let d = vals.len();
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..(1 << d) {
        if mask.count_ones() % 2 == 0 {
            continue;
        }
        let lhs: f64 = (0..d).map(|i| if mask >> i & 1 == 1 { vals[i] } else { -vals[i] }).sum();
        best = best.max(lhs - (mask.count_ones() as f64 - 1.0));
    }
    best
}

/// Per-symbol argmin over the four points of `|h1 x - r1|^2 + |h2 x - r2|^2`.
pub fn ml_scan(
    r1: &[num_complex::Complex64],
    r2: &[num_complex::Complex64],
    h1: num_complex::Complex64,
    h2: num_complex::Complex64,
) -> Vec<u8> {
    let mut bits = Vec::new();
    for (a, b) in r1.iter().zip(r2) {
        let ((b0, b1), _) = GRAY_TABLE
            .iter()
            .map(|&(bits, _)| {
                let x = gray_point(bits.0, bits.1);
                (bits, (h1 * x - a).norm_sqr() + (h2 * x - b).norm_sqr())
            })
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        bits.extend([b0, b1]);
    }
    bits
}

/// `log P(r | bit n = 0) / P(r | bit n = 1)` from the complex Gaussian
/// density, summing over the other bit of the symbol.
pub fn llr_by_density(r: num_complex::Complex64, h1: num_complex::Complex64, noise_var: f64) -> [f64; 2] {
    let dens = |x: num_complex::Complex64| -(r - h1 * x).norm_sqr() / noise_var;
    let log_sum = |a: f64, b: f64| a.max(b) + (-(a - b).abs()).exp().ln_1p();
    let mut out = [0.0; 2];
    for (pos, slot) in out.iter_mut().enumerate() {
        let mut by_value = [Vec::new(), Vec::new()];
        for &((b0, b1), _) in &GRAY_TABLE {
            let bit = if pos == 0 { b0 } else { b1 };
            by_value[bit as usize].push(dens(gray_point(b0, b1)));
        }
        *slot = log_sum(by_value[0][0], by_value[0][1]) - log_sum(by_value[1][0], by_value[1][1]);
    }
    out
}
