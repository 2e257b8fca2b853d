//! Parity-polytope inequalities of each check and their separation.
//!
//! For check `m` with neighbourhood `N(m)` and every odd-sized `F ⊆ N(m)`:
//!
//! ```text
//! sum_{n in F} f[n] - sum_{n in N(m) \ F} f[n] <= |F| - 1
//! ```
//!
//! Together with `0 <= f <= 1` these describe the local codeword polytope of
//! each check. A check of degree `d` contributes `2^(d-1)` inequalities.

use super::{LdpcError, ParityCheckMatrix};

/// Violation below which a parity inequality counts as satisfied. Sits above
/// the simplex feasibility tolerance so satisfied cuts are never re-added.
pub const CUT_TOLERANCE: f64 = 1e-6;

/// Largest check degree [`enumerate_parity_inequalities`] will expand.
pub const MAX_ENUMERABLE_DEGREE: usize = 24;

/// One parity inequality: check index and the odd subset `F` of its neighbours.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParityCut {
    pub check: usize,
    pub subset: Vec<usize>,
}

impl ParityCut {
    /// `(variable, coefficient)` pairs of the left-hand side, `+1` on `F` and
    /// `-1` on the rest of the check.
    pub fn terms<'a>(&'a self, h: &'a ParityCheckMatrix) -> impl Iterator<Item = (usize, f64)> + 'a {
        h.row(self.check).iter().map(move |&n| {
            let coef = if self.subset.binary_search(&n).is_ok() { 1.0 } else { -1.0 };
            (n, coef)
        })
    }

    pub fn rhs(&self) -> f64 {
        self.subset.len() as f64 - 1.0
    }

    /// `lhs(f) - (|F| - 1)`; positive means violated.
    pub fn violation(&self, h: &ParityCheckMatrix, f: &[f64]) -> f64 {
        self.terms(h).map(|(n, c)| c * f[n]).sum::<f64>() - self.rhs()
    }
}

/// `sum_m 2^(d_m - 1)`, saturating.
pub fn count_parity_inequalities(h: &ParityCheckMatrix) -> u64 {
    h.rows().iter().fold(0u64, |acc, row| {
        let d = row.len() as u32;
        acc.saturating_add(1u64.checked_shl(d - 1).unwrap_or(u64::MAX))
    })
}

/// Every parity inequality of `h`, check by check, subsets in increasing
/// bitmask order over the sorted neighbourhood.
pub fn enumerate_parity_inequalities(h: &ParityCheckMatrix) -> Result<Vec<ParityCut>, LdpcError> {
    if let Some((row, r)) = h.rows().iter().enumerate().find(|(_, r)| r.len() > MAX_ENUMERABLE_DEGREE) {
        return Err(LdpcError::DegreeTooLarge { row, degree: r.len(), max: MAX_ENUMERABLE_DEGREE });
    }
    let mut cuts = Vec::with_capacity(count_parity_inequalities(h) as usize);
    for (m, row) in h.rows().iter().enumerate() {
        let d = row.len();
        for mask in 1u32..(1 << d) {
            if mask.count_ones() % 2 == 1 {
                let subset = (0..d).filter(|&i| mask >> i & 1 == 1).map(|i| row[i]).collect();
                cuts.push(ParityCut { check: m, subset });
            }
        }
    }
    Ok(cuts)
}

/// Most violated inequality of check `m` at `f`, with its violation.
///
/// Sort the neighbours by `f` descending and take those above 1/2. If that
/// set is even, flip the membership of whichever boundary element costs the
/// least (`|1 - 2 f[n]|`), preferring removal on a tie.
pub fn most_violated_cut(h: &ParityCheckMatrix, m: usize, f: &[f64]) -> (ParityCut, f64) {
    let row = h.row(m);
    let mut order: Vec<(usize, f64)> = row.iter().map(|&n| (n, f[n].clamp(0.0, 1.0))).collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut take = order.iter().take_while(|(_, v)| *v > 0.5).count();
    if take % 2 == 0 {
        let remove_cost = (take > 0).then(|| 2.0 * order[take - 1].1 - 1.0);
        let add_cost = (take < order.len()).then(|| 1.0 - 2.0 * order[take].1);
        take = match (remove_cost, add_cost) {
            (Some(r), Some(a)) if r <= a => take - 1,
            (Some(_), Some(_)) | (None, Some(_)) => take + 1,
            (Some(_), None) => take - 1,
            (None, None) => unreachable!("checks are never empty"),
        };
    }
    let mut subset: Vec<usize> = order[..take].iter().map(|&(n, _)| n).collect();
    subset.sort_unstable();
    let cut = ParityCut { check: m, subset };
    let v = cut.violation(h, f);
    (cut, v)
}

/// At most one cut per check: the most violated one, when it is violated by
/// more than `tol`.
pub fn find_violated_cuts(h: &ParityCheckMatrix, f: &[f64], tol: f64) -> Vec<ParityCut> {
    (0..h.n_rows())
        .filter_map(|m| {
            let (cut, v) = most_violated_cut(h, m, f);
            (v > tol).then_some(cut)
        })
        .collect()
}
