//! Exact linear algebra by fraction-free (Bareiss) elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rational::Q;

/// Row echelon form over the integers with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
}

/// Clears denominators row by row; returns the integer rows and the factors used.
fn integer_rows(rows: &[Vec<Q>]) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let mut out = Vec::with_capacity(rows.len());
    let mut scales = Vec::with_capacity(rows.len());
    for row in rows {
        let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        out.push(row.iter().map(|x| x.numer() * (&l / x.denom())).collect());
        scales.push(l);
    }
    (out, scales)
}

/// Bareiss elimination choosing pivots only among the first `pivot_cols` columns.
fn bareiss(m: &mut [Vec<BigInt>], pivot_cols: usize) -> Vec<usize> {
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let ncols = m[r].len();
        for i in r + 1..nrows {
            if m[i][c].is_zero() {
                for j in c + 1..ncols {
                    let v = &m[r][c] * &m[i][j];
                    m[i][j] = v / &prev;
                }
                continue;
            }
            let factor = m[i][c].clone();
            for j in c + 1..ncols {
                let v = &m[r][c] * &m[i][j] - &factor * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        // earlier columns of rows below are zero already
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn echelon(rows: &[Vec<Q>]) -> Echelon {
    let (mut m, _) = integer_rows(rows);
    let ncols = m.first().map_or(0, |r| r.len());
    let pivots = bareiss(&mut m, ncols);
    Echelon { rows: m, pivots }
}

pub fn rank(rows: &[Vec<Q>]) -> usize {
    echelon(rows).pivots.len()
}

/// Outcome of solving `A x = b`.
#[derive(Clone, Debug, PartialEq)]
pub enum Solution {
    /// A solution `x`.
    Solved(Vec<Q>),
    /// A vector `y` with `yᵀA = 0` and `yᵀb ≠ 0`.
    Inconsistent(Vec<Q>),
}

/// Solves `A x = b` exactly, `A` given by its `m` rows of length `k`.
pub fn solve(a: &[Vec<Q>], b: &[Q], k: usize) -> Solution {
    let m = a.len();
    assert_eq!(m, b.len());
    // [A | b | I]
    let aug: Vec<Vec<Q>> = (0..m)
        .map(|i| {
            let mut row = a[i].clone();
            row.push(b[i].clone());
            row.extend((0..m).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    let (mut ints, scales) = integer_rows(&aug);
    let pivots = bareiss(&mut ints, k);
    let rank = pivots.len();

    if let Some(bad) = (rank..m).find(|&i| !ints[i][k].is_zero()) {
        // The identity block records the combination of the scaled original rows.
        let y = (0..m).map(|j| Q::from_integer(&ints[bad][k + 1 + j] * &scales[j])).collect();
        return Solution::Inconsistent(y);
    }

    let mut x = vec![Q::zero(); k];
    for (r, &c) in pivots.iter().enumerate().rev() {
        let mut acc = Q::from_integer(ints[r][k].clone());
        for j in c + 1..k {
            if !ints[r][j].is_zero() {
                acc -= Q::from_integer(ints[r][j].clone()) * &x[j];
            }
        }
        x[c] = acc / Q::from_integer(ints[r][c].clone());
    }
    Solution::Solved(x)
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

/// `Σ_j coeffs[j] * vectors[j]`.
pub fn combination(coeffs: &[Q], vectors: &[Vec<Q>], len: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); len];
    for (c, v) in coeffs.iter().zip(vectors) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    out
}

pub fn is_zero_vector(v: &[Q]) -> bool {
    v.iter().all(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    fn rows(data: &[&[i64]]) -> Vec<Vec<Q>> {
        data.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        assert_eq!(rank(&rows(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]])), 2);
        assert_eq!(rank(&rows(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank(&[vec![frac(1, 2), frac(1, 3)], vec![q(3), q(2)]]), 1);
    }

    #[test]
    fn solves_consistent_system() {
        let a = rows(&[&[1, 1], &[1, -1], &[2, 0]]);
        let b = vec![q(3), q(1), q(4)];
        assert_eq!(solve(&a, &b, 2), Solution::Solved(vec![q(2), q(1)]));
    }

    #[test]
    fn inconsistent_system_has_certificate() {
        let a = rows(&[&[1, 0], &[2, 0], &[0, 1]]);
        let b = vec![q(1), q(3), q(0)];
        match solve(&a, &b, 2) {
            Solution::Inconsistent(y) => {
                for col in 0..2 {
                    let c: Vec<Q> = a.iter().map(|r| r[col].clone()).collect();
                    assert!(dot(&y, &c).is_zero());
                }
                assert!(!dot(&y, &b).is_zero());
            }
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn empty_unknowns() {
        assert_eq!(solve(&rows(&[&[], &[]]), &[q(0), q(0)], 0), Solution::Solved(vec![]));
        assert!(matches!(solve(&rows(&[&[]]), &[q(1)], 0), Solution::Inconsistent(_)));
    }
}
