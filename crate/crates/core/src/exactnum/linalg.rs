//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use super::Rational;
use crate::error::{Error, Result};

pub type RatMat = Vec<Vec<Rational>>;

/// Row-reduces `[a | b]` and returns one solution of `a x = b` with every free
/// variable set to zero, or `None` when the system is inconsistent.
pub fn solve_particular(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..=cols {
                    let t = &m[r][k] * &f;
                    m[i][k] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}

/// Unique solution of a square nonsingular system.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Result<Vec<Rational>> {
    if rank(a) != a.len() {
        return Err(Error::Singular);
    }
    solve_particular(a, b).ok_or(Error::Singular)
}

pub fn rank(a: &[Vec<Rational>]) -> usize {
    let mut m = a.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for k in c..cols {
                    let t = &m[r][k] * &f;
                    m[i][k] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

pub fn determinant(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for i in c + 1..n {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[c][c];
                for k in c..n {
                    let t = &m[c][k] * &f;
                    m[i][k] -= t;
                }
            }
        }
    }
    det
}

pub fn inverse(a: &[Vec<Rational>]) -> Result<RatMat> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<Rational> = (0..n).map(|i| if i == j { Rational::one() } else { Rational::zero() }).collect();
        cols.push(solve(a, &e)?);
    }
    Ok((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}
