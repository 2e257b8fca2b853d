//! MacKay's alist format.
//!
//! ```text
//! n m
//! max_col_weight max_row_weight
//! <n column weights>
//! <m row weights>
//! <n lines: 1-indexed checks of each column, zero padded to max_col_weight>
//! <m lines: 1-indexed variables of each check, zero padded to max_row_weight>
//! ```

use std::fmt::Write as _;

use super::{LdpcError, ParityCheckMatrix};

pub fn save_alist(h: &ParityCheckMatrix) -> String {
    let mut out = String::new();
    let (max_c, max_r) = (h.max_col_weight(), h.max_row_weight());
    let _ = writeln!(out, "{} {}", h.n_cols(), h.n_rows());
    let _ = writeln!(out, "{max_c} {max_r}");
    let join = |v: &mut dyn Iterator<Item = usize>| {
        v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    };
    let _ = writeln!(out, "{}", join(&mut h.cols().iter().map(Vec::len)));
    let _ = writeln!(out, "{}", join(&mut h.rows().iter().map(Vec::len)));
    for col in h.cols() {
        let padded = col.iter().map(|&r| r + 1).chain(std::iter::repeat(0)).take(max_c);
        let _ = writeln!(out, "{}", join(&mut padded.into_iter()));
    }
    for row in h.rows() {
        let padded = row.iter().map(|&c| c + 1).chain(std::iter::repeat(0)).take(max_r);
        let _ = writeln!(out, "{}", join(&mut padded.into_iter()));
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_numbers(&mut self, what: &str) -> Result<(usize, Vec<usize>), LdpcError> {
        for (i, line) in self.inner.by_ref() {
            let line_no = i + 1;
            self.last = line_no;
            if line.trim().is_empty() {
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| err(line_no, format!("{what}: {e}")))?;
            return Ok((line_no, nums));
        }
        Err(err(self.last + 1, format!("unexpected end of file, expected {what}")))
    }
}

fn err(line: usize, msg: String) -> LdpcError {
    LdpcError::Alist { line, msg }
}

pub fn load_alist(text: &str) -> Result<ParityCheckMatrix, LdpcError> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    let (ln, dims) = lines.next_numbers("dimensions")?;
    let [n, m] = dims[..] else {
        return Err(err(ln, format!("expected 2 dimensions, found {}", dims.len())));
    };
    let (ln, maxw) = lines.next_numbers("maximum weights")?;
    let [max_c, max_r] = maxw[..] else {
        return Err(err(ln, "expected 2 maximum weights".into()));
    };
    let (ln, col_w) = lines.next_numbers("column weights")?;
    if col_w.len() != n {
        return Err(err(ln, format!("expected {n} column weights, found {}", col_w.len())));
    }
    let (ln, row_w) = lines.next_numbers("row weights")?;
    if row_w.len() != m {
        return Err(err(ln, format!("expected {m} row weights, found {}", row_w.len())));
    }
    if let Some(&w) = col_w.iter().find(|&&w| w > max_c) {
        return Err(err(ln, format!("column weight {w} exceeds maximum {max_c}")));
    }
    if let Some(&w) = row_w.iter().find(|&&w| w > max_r) {
        return Err(err(ln, format!("row weight {w} exceeds maximum {max_r}")));
    }

    let mut cols: Vec<Vec<usize>> = Vec::with_capacity(n);
    for (c, &w) in col_w.iter().enumerate() {
        let (ln, nums) = lines.next_numbers("column neighbours")?;
        cols.push(neighbours(ln, nums, w, m, "check")?);
        let _ = c;
    }
    let mut rows: Vec<Vec<usize>> = Vec::with_capacity(m);
    for &w in &row_w {
        let (ln, nums) = lines.next_numbers("row neighbours")?;
        rows.push(neighbours(ln, nums, w, n, "variable")?);
    }

    let h = ParityCheckMatrix::from_rows(n, rows)?;
    for (c, listed) in cols.iter_mut().enumerate() {
        listed.sort_unstable();
        if listed.as_slice() != h.col(c) {
            return Err(err(lines.last, format!("column {} disagrees with the row lists", c + 1)));
        }
    }
    Ok(h)
}

fn neighbours(
    line: usize,
    nums: Vec<usize>,
    weight: usize,
    limit: usize,
    kind: &str,
) -> Result<Vec<usize>, LdpcError> {
    let listed: Vec<usize> = nums.into_iter().filter(|&v| v != 0).collect();
    if listed.len() != weight {
        return Err(err(line, format!("expected {weight} entries, found {}", listed.len())));
    }
    listed
        .into_iter()
        .map(|v| {
            if v > limit {
                Err(err(line, format!("{kind} index {v} exceeds {limit}")))
            } else {
                Ok(v - 1)
            }
        })
        .collect()
}
