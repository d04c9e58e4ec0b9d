//! Dense exact and floating linear algebra on small matrices.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::Rational;

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<Rational>>;

pub fn int_identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn int_from_counts(a: &[Vec<u64>]) -> IntMatrix {
    a.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn int_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |s, w| s + &row[w] * &b[w][j]))
                .collect()
        })
        .collect()
}

pub fn rat_from_int(a: &IntMatrix) -> RatMatrix {
    a.iter().map(|row| row.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect()
}

pub fn rat_identity(n: usize) -> RatMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect()
}

pub fn rat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Rational::zero(), |s, w| s + &row[w] * &b[w][j]))
                .collect()
        })
        .collect()
}

pub fn rat_mul_vec(a: &RatMatrix, x: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(Rational::zero(), |s, (p, q)| s + p * q))
        .collect()
}

pub fn transpose<T: Clone>(a: &[Vec<T>], cols: usize) -> Vec<Vec<T>> {
    (0..cols).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut RatMatrix, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        if row >= m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][c].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for j in 0..cols {
                    let t = &f * &m[row][j];
                    m[r][j] -= t;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    m.truncate(row);
    pivots
}

pub fn rank(m: &RatMatrix, cols: usize) -> usize {
    let mut work = m.clone();
    rref(&mut work, cols).len()
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace(m: &RatMatrix, cols: usize) -> Vec<Vec<Rational>> {
    let mut r = m.clone();
    let pivots = rref(&mut r, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rational::zero(); cols];
            x[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = -r[i][f].clone();
            }
            x
        })
        .collect()
}

/// Some solution of `a x = b`, if one exists.
pub fn solve(a: &RatMatrix, cols: usize, b: &[Rational]) -> Option<Vec<Rational>> {
    let mut aug: RatMatrix = a
        .iter()
        .zip(b)
        .map(|(row, y)| {
            let mut r = row.clone();
            r.push(y.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, cols + 1);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = aug[i][cols].clone();
    }
    Some(x)
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse(a: &RatMatrix) -> Option<RatMatrix> {
    let n = a.len();
    let mut aug: RatMatrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn int_to_f64(a: &IntMatrix) -> Vec<Vec<f64>> {
    use num_traits::ToPrimitive;
    a.iter().map(|row| row.iter().map(|x| x.to_f64().unwrap_or(f64::INFINITY)).collect()).collect()
}

/// Perron root and positive right eigenvector (unit 1-norm) of a primitive
/// nonnegative matrix, by power iteration.
pub fn perron(a: &[Vec<f64>], tol: f64, max_iter: usize) -> Option<(f64, Vec<f64>)> {
    let n = a.len();
    let mut x = vec![1.0 / n as f64; n];
    let mut root = 0.0;
    for _ in 0..max_iter {
        let y: Vec<f64> = a.iter().map(|row| row.iter().zip(&x).map(|(p, q)| p * q).sum()).collect();
        let s: f64 = y.iter().sum();
        if s <= 0.0 || !s.is_finite() {
            return None;
        }
        let y: Vec<f64> = y.iter().map(|v| v / s).collect();
        let diff = y.iter().zip(&x).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        x = y;
        if diff < tol && (s - root).abs() < tol * s {
            return Some((s, x));
        }
        root = s;
    }
    None
}

pub fn max_abs(v: &[Rational]) -> Rational {
    v.iter().map(|x| x.abs()).fold(Rational::zero(), |a, b| if b > a { b } else { a })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn rank_and_nullspace() {
        let m = vec![vec![r(1), r(2), r(3)], vec![r(2), r(4), r(6)]];
        assert_eq!(rank(&m, 3), 1);
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for x in ns {
            assert!(rat_mul_vec(&m, &x).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn inverse_and_solve() {
        let a = vec![vec![r(1), r(1)], vec![r(1), r(0)]];
        let inv = inverse(&a).unwrap();
        assert_eq!(rat_mul(&a, &inv), rat_identity(2));
        let x = solve(&a, 2, &[r(3), r(1)]).unwrap();
        assert_eq!(x, vec![r(1), r(2)]);
        assert!(inverse(&vec![vec![r(1), r(1)], vec![r(1), r(1)]]).is_none());
        assert!(solve(&vec![vec![r(1), r(1)], vec![r(1), r(1)]], 2, &[r(0), r(1)]).is_none());
    }

    #[test]
    fn perron_of_symmetric() {
        let (root, v) = perron(&[vec![3.0, 1.0], vec![1.0, 3.0]], 1e-15, 10_000).unwrap();
        assert!((root - 4.0).abs() < 1e-12);
        assert!((v[0] - 0.5).abs() < 1e-12);
    }
}
