use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{LdpcError, ParityCheckMatrix};

/// Rounds of 4-cycle removal attempted per check.
const CYCLE_PASSES_PER_ROW: usize = 8;

/// Regular Gallager code: `col_weight` stacked permutation blocks of the
/// `n` column "sockets", cut into checks of `row_weight` consecutive sockets.
///
/// The first block is the identity, the rest are seeded permutations. When
/// `row_weight` does not divide `n` a check can straddle two blocks; any
/// column repeated inside a check is then swapped out. A bounded number of
/// swaps afterwards break 4-cycles where that does not create new ones.
/// Swaps preserve every row and column weight.
pub fn gallager_construct(
    n: usize,
    col_weight: usize,
    row_weight: usize,
    seed: u64,
) -> Result<ParityCheckMatrix, LdpcError> {
    let incompatible = LdpcError::IncompatibleWeights { n, col_weight, row_weight };
    if n == 0 || col_weight == 0 || row_weight == 0 || row_weight > n {
        return Err(incompatible);
    }
    if (n * col_weight) % row_weight != 0 {
        return Err(incompatible);
    }
    let n_rows = n * col_weight / row_weight;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut sockets: Vec<usize> = Vec::with_capacity(n * col_weight);
    sockets.extend(0..n);
    for _ in 1..col_weight {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        sockets.extend(perm);
    }
    let mut rows: Vec<Vec<usize>> = sockets.chunks(row_weight).map(<[usize]>::to_vec).collect();
    debug_assert_eq!(rows.len(), n_rows);

    if col_weight > 1 {
        remove_repeats(&mut rows, &mut rng).ok_or(incompatible)?;
        reduce_four_cycles(&mut rows, n, &mut rng);
    }
    ParityCheckMatrix::from_rows(n, rows)
}

fn remove_repeats(rows: &mut [Vec<usize>], rng: &mut ChaCha8Rng) -> Option<()> {
    let n_rows = rows.len();
    for r in 0..n_rows {
        let mut attempts = 0usize;
        while let Some(pos) = repeated_position(&rows[r]) {
            attempts += 1;
            if attempts > 100 * n_rows {
                return None;
            }
            let other = rng.random_range(0..n_rows);
            if other == r {
                continue;
            }
            let opos = rng.random_range(0..rows[other].len());
            let (a, b) = (rows[r][pos], rows[other][opos]);
            if rows[r].contains(&b) || rows[other].contains(&a) {
                continue;
            }
            rows[r][pos] = b;
            rows[other][opos] = a;
        }
    }
    Some(())
}

fn repeated_position(row: &[usize]) -> Option<usize> {
    (1..row.len()).find(|&i| row[..i].contains(&row[i]))
}

/// Checks sharing the pair `(a, b)` other than `skip`.
fn shared_pair_count(col_rows: &[Vec<usize>], a: usize, b: usize, skip: usize) -> usize {
    col_rows[a].iter().filter(|&&r| r != skip && col_rows[b].contains(&r)).count()
}

fn row_cycles(rows: &[Vec<usize>], col_rows: &[Vec<usize>], r: usize) -> usize {
    let row = &rows[r];
    let mut total = 0;
    for (i, &a) in row.iter().enumerate() {
        for &b in &row[i + 1..] {
            total += shared_pair_count(col_rows, a, b, r);
        }
    }
    total
}

fn column_rows(rows: &[Vec<usize>], n: usize) -> Vec<Vec<usize>> {
    let mut col_rows = vec![Vec::new(); n];
    for (r, row) in rows.iter().enumerate() {
        for &c in row {
            col_rows[c].push(r);
        }
    }
    col_rows
}

fn reduce_four_cycles(rows: &mut [Vec<usize>], n: usize, rng: &mut ChaCha8Rng) {
    let n_rows = rows.len();
    let mut col_rows = column_rows(rows, n);
    let budget = CYCLE_PASSES_PER_ROW * n_rows;
    let mut attempts = 0;
    let mut r = 0;
    let mut clean_streak = 0;
    while attempts < budget && clean_streak < n_rows {
        let here = row_cycles(rows, &col_rows, r);
        if here == 0 {
            clean_streak += 1;
            r = (r + 1) % n_rows;
            continue;
        }
        clean_streak = 0;
        attempts += 1;
        let pos = rng.random_range(0..rows[r].len());
        let other = rng.random_range(0..n_rows);
        if other == r {
            continue;
        }
        let opos = rng.random_range(0..rows[other].len());
        let (a, b) = (rows[r][pos], rows[other][opos]);
        if rows[r].contains(&b) || rows[other].contains(&a) {
            continue;
        }
        let before = here + row_cycles(rows, &col_rows, other);
        apply_swap(rows, &mut col_rows, r, pos, other, opos);
        let after = row_cycles(rows, &col_rows, r) + row_cycles(rows, &col_rows, other);
        if after >= before {
            apply_swap(rows, &mut col_rows, r, pos, other, opos);
        }
    }
}

fn apply_swap(
    rows: &mut [Vec<usize>],
    col_rows: &mut [Vec<usize>],
    r: usize,
    pos: usize,
    other: usize,
    opos: usize,
) {
    let (a, b) = (rows[r][pos], rows[other][opos]);
    rows[r][pos] = b;
    rows[other][opos] = a;
    for x in col_rows[a].iter_mut() {
        if *x == r {
            *x = other;
            break;
        }
    }
    for x in col_rows[b].iter_mut() {
        if *x == other {
            *x = r;
            break;
        }
    }
}
