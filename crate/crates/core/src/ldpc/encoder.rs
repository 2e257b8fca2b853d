use super::{LdpcError, ParityCheckMatrix};

/// Bit-packed GF(2) row.
#[derive(Debug, Clone, PartialEq, Eq)]
struct BitRow(Vec<u64>);

impl BitRow {
    fn zeros(len: usize) -> Self {
        Self(vec![0; len.div_ceil(64)])
    }

    fn get(&self, i: usize) -> bool {
        (self.0[i / 64] >> (i % 64)) & 1 == 1
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn xor_assign(&mut self, other: &BitRow) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }
}

/// A transmitted codeword, one `0`/`1` byte per bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Codeword {
    pub bits: Vec<u8>,
}

/// Systematic encoder derived from a parity-check matrix.
///
/// After elimination the matrix reads `[A | I]` over a column permutation:
/// the message occupies `info_positions` and the parity bit for pivot row `i`
/// (stored at `parity_positions[i]`) is the GF(2) inner product of row `i` of
/// `A` with the message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoder {
    n: usize,
    info_positions: Vec<usize>,
    parity_positions: Vec<usize>,
    a_rows: Vec<BitRow>,
}

impl Encoder {
    pub fn code_length(&self) -> usize {
        self.n
    }

    pub fn message_length(&self) -> usize {
        self.info_positions.len()
    }

    /// GF(2) rank of the parity-check matrix.
    pub fn rank(&self) -> usize {
        self.parity_positions.len()
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn parity_positions(&self) -> &[usize] {
        &self.parity_positions
    }

    /// Number of ones in `A`, i.e. the non-identity part of `[A | I]`.
    pub fn a_weight(&self) -> usize {
        self.a_rows.iter().map(|r| r.0.iter().map(|w| w.count_ones() as usize).sum::<usize>()).sum()
    }

    pub fn encode(&self, message: &[u8]) -> Result<Codeword, LdpcError> {
        let k = self.message_length();
        if message.len() != k {
            return Err(LdpcError::MessageLength { expected: k, got: message.len() });
        }
        let mut bits = vec![0u8; self.n];
        for (&pos, &b) in self.info_positions.iter().zip(message) {
            bits[pos] = b & 1;
        }
        for (row, &pos) in self.a_rows.iter().zip(&self.parity_positions) {
            let parity = message
                .iter()
                .enumerate()
                .filter(|&(j, &b)| b & 1 == 1 && row.get(j))
                .count();
            bits[pos] = (parity % 2) as u8;
        }
        Ok(Codeword { bits })
    }

    /// Every codeword, in lexicographic order of the full bit vector.
    ///
    /// Only sensible for short messages; the caller bounds `2^k`.
    pub fn all_codewords(&self) -> Vec<Codeword> {
        let k = self.message_length();
        let mut words: Vec<Codeword> = (0u64..1 << k)
            .map(|m| {
                let msg: Vec<u8> = (0..k).map(|j| ((m >> j) & 1) as u8).collect();
                self.encode(&msg).expect("message length matches")
            })
            .collect();
        words.sort();
        words
    }
}

/// Gaussian elimination of `H` over GF(2).
///
/// Pivot columns are searched from the last column backwards, so parity bits
/// land at the tail of the codeword when the matrix allows it. Linearly
/// dependent checks are dropped and reported through [`Encoder::rank`].
pub fn systematize(h: &ParityCheckMatrix) -> Encoder {
    let n = h.n_cols();
    let mut rows: Vec<BitRow> = h
        .rows()
        .iter()
        .map(|r| {
            let mut b = BitRow::zeros(n);
            r.iter().for_each(|&c| b.set(c));
            b
        })
        .collect();

    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in (0..n).rev() {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i].get(col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);

    let mut is_pivot = vec![false; n];
    pivot_cols.iter().for_each(|&c| is_pivot[c] = true);
    let info_positions: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let a_rows = rows
        .iter()
        .map(|row| {
            let mut a = BitRow::zeros(info_positions.len());
            for (j, &c) in info_positions.iter().enumerate() {
                if row.get(c) {
                    a.set(j);
                }
            }
            a
        })
        .collect();

    Encoder { n, info_positions, parity_positions: pivot_cols, a_rows }
}

/// True when every check of `h` has even parity over `bits`.
pub fn check_codeword(h: &ParityCheckMatrix, bits: &[u8]) -> bool {
    h.rows().iter().all(|row| row.iter().filter(|&&c| bits[c] & 1 == 1).count() % 2 == 0)
}
