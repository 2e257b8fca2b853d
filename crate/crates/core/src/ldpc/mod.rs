//! LDPC codes: parity-check matrices, construction, alist I/O, systematic
//! encoding, the parity-polytope inequalities and their separation.

use thiserror::Error;

mod alist;
mod construct;
mod encoder;
mod llr;
mod polytope;

pub use alist::{load_alist, save_alist};
pub use construct::gallager_construct;
pub use encoder::{check_codeword, systematize, Codeword, Encoder};
pub use llr::direct_llr;
pub use polytope::{
    count_parity_inequalities, enumerate_parity_inequalities, find_violated_cuts,
    most_violated_cut, ParityCut, CUT_TOLERANCE, MAX_ENUMERABLE_DEGREE,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LdpcError {
    #[error("cannot build a regular code with n={n}, column weight {col_weight}, row weight {row_weight}")]
    IncompatibleWeights { n: usize, col_weight: usize, row_weight: usize },
    #[error("check {row} has no neighbours")]
    EmptyRow { row: usize },
    #[error("check {row} lists variable {col} more than once")]
    RepeatedIndex { row: usize, col: usize },
    #[error("check {row} references variable {col} but the code length is {n}")]
    IndexOutOfRange { row: usize, col: usize, n: usize },
    #[error("alist line {line}: {msg}")]
    Alist { line: usize, msg: String },
    #[error("check {row} has degree {degree}; enumeration is limited to degree {max}")]
    DegreeTooLarge { row: usize, degree: usize, max: usize },
    #[error("message has {got} bits, encoder expects {expected}")]
    MessageLength { expected: usize, got: usize },
    #[error("noise variance must be positive, got {0}")]
    NoiseVariance(f64),
}

/// Sparse binary parity-check matrix kept as both adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    n_cols: usize,
    row_neighbors: Vec<Vec<usize>>,
    col_neighbors: Vec<Vec<usize>>,
}

impl ParityCheckMatrix {
    /// Builds the matrix from per-check neighbour lists (any order).
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<usize>>) -> Result<Self, LdpcError> {
        let mut row_neighbors = rows;
        let mut col_neighbors = vec![Vec::new(); n_cols];
        for (r, row) in row_neighbors.iter_mut().enumerate() {
            if row.is_empty() {
                return Err(LdpcError::EmptyRow { row: r });
            }
            row.sort_unstable();
            for w in row.windows(2) {
                if w[0] == w[1] {
                    return Err(LdpcError::RepeatedIndex { row: r, col: w[0] });
                }
            }
            for &c in row.iter() {
                if c >= n_cols {
                    return Err(LdpcError::IndexOutOfRange { row: r, col: c, n: n_cols });
                }
                col_neighbors[c].push(r);
            }
        }
        Ok(Self { n_cols, row_neighbors, col_neighbors })
    }

    /// Code length.
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Number of checks.
    pub fn n_rows(&self) -> usize {
        self.row_neighbors.len()
    }

    pub fn row(&self, m: usize) -> &[usize] {
        &self.row_neighbors[m]
    }

    pub fn col(&self, n: usize) -> &[usize] {
        &self.col_neighbors[n]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.row_neighbors
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.col_neighbors
    }

    pub fn num_ones(&self) -> usize {
        self.row_neighbors.iter().map(Vec::len).sum()
    }

    pub fn max_row_weight(&self) -> usize {
        self.row_neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_col_weight(&self) -> usize {
        self.col_neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Number of length-4 cycles in the Tanner graph.
    pub fn four_cycles(&self) -> usize {
        let mut pairs = std::collections::HashMap::new();
        for row in &self.row_neighbors {
            for (i, &a) in row.iter().enumerate() {
                for &b in &row[i + 1..] {
                    *pairs.entry((a, b)).or_insert(0usize) += 1;
                }
            }
        }
        pairs.values().map(|&c| c * c.saturating_sub(1) / 2).sum()
    }
}
