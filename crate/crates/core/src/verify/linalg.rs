//! Exact rank by fraction-free (Bareiss) elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::diffring::Rational;

/// Scales every row by the lcm of its denominators so all entries are integers.
pub fn clear_denominators(rows: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
        })
        .collect()
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    integer_rank(clear_denominators(rows))
}

/// Bareiss elimination: after step `k`, every entry below the pivot row is the
/// determinant of a `(k+1)x(k+1)` minor, so each division is exact.
pub fn integer_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let n_rows = m.len();
    let n_cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..n_cols {
        if rank == n_rows {
            break;
        }
        let Some(pivot) = (rank..n_rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for i in rank + 1..n_rows {
            for j in col + 1..n_cols {
                let v = &m[rank][col] * &m[i][j] - &m[i][col] * &m[rank][j];
                m[i][j] = v / &prev;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffring::{int, rat};
    use proptest::prelude::*;

    /// Plain Gauss-Jordan over the rationals.
    fn rational_rank(rows: &[Vec<Rational>]) -> usize {
        let mut m = rows.to_vec();
        let n_cols = m.first().map_or(0, Vec::len);
        let mut r = 0;
        for col in 0..n_cols {
            let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            let pivot = m[r][col].clone();
            for i in 0..m.len() {
                if i != r && !m[i][col].is_zero() {
                    let f = &m[i][col] / &pivot;
                    let pivot_row = m[r].clone();
                    for (x, p) in m[i].iter_mut().zip(&pivot_row) {
                        *x -= &f * p;
                    }
                }
            }
            r += 1;
        }
        r
    }

    #[test]
    fn small_matrices() {
        assert_eq!(rank(&[]), 0);
        assert_eq!(rank(&[vec![int(0), int(0)]]), 0);
        let m = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert_eq!(rank(&m), 1);
        let m = vec![
            vec![rat(1, 2), int(0), int(1)],
            vec![int(0), rat(1, 3), int(1)],
            vec![rat(1, 2), rat(1, 3), int(2)],
        ];
        assert_eq!(rank(&m), 2);
        let m = vec![vec![int(0), int(1)], vec![int(1), int(0)]];
        assert_eq!(rank(&m), 2);
    }

    proptest! {
        #[test]
        fn matches_rational_elimination(
            entries in prop::collection::vec(prop::collection::vec((-3i64..=3, 1i64..=3), 5), 1..6),
            dup in any::<bool>(),
        ) {
            let mut rows: Vec<Vec<Rational>> =
                entries.iter().map(|r| r.iter().map(|&(n, d)| rat(n, d)).collect()).collect();
            if dup && rows.len() > 1 {
                let combo: Vec<Rational> = rows[0].iter().zip(&rows[1]).map(|(a, b)| a * int(2) - b).collect();
                rows.push(combo);
            }
            prop_assert_eq!(rank(&rows), rational_rank(&rows));
        }
    }
}
