use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMat;

/// `u · a · v = d` with `u`, `v` unimodular and `d` diagonal, nonnegative,
/// `d[i,i] | d[i+1,i+1]`. `v_inv` is carried along because its rows are the
/// adapted basis of `Z^n` that the lattice routines need.
#[derive(Debug, Clone)]
pub struct SnfDecomposition {
    pub u: IntMat,
    pub d: IntMat,
    pub v: IntMat,
    pub v_inv: IntMat,
}

impl SnfDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.nrows().min(self.d.ncols())).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|x| !x.is_zero()).count()
    }
}

pub fn smith_normal_form(a: &IntMat) -> SnfDecomposition {
    let (m, n) = (a.nrows(), a.ncols());
    let mut d = a.clone();
    let mut u = IntMat::identity(m);
    let mut v = IntMat::identity(n);
    let mut v_inv = IntMat::identity(n);

    let row_add = |d: &mut IntMat, u: &mut IntMat, dst: usize, src: usize, k: &BigInt| {
        d.add_row_multiple(dst, src, k);
        u.add_row_multiple(dst, src, k);
    };
    // col[dst] += k col[src] on d and v; inverse update row[src] -= k row[dst] on v_inv
    let col_add = |d: &mut IntMat, v: &mut IntMat, vi: &mut IntMat, dst: usize, src: usize, k: &BigInt| {
        d.add_col_multiple(dst, src, k);
        v.add_col_multiple(dst, src, k);
        vi.add_row_multiple(src, dst, &-k);
    };

    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !d[(i, j)].is_zero() && best.is_none_or(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return SnfDecomposition { u, d, v, v_inv };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            let mut clean = true;
            for i in t + 1..m {
                if !d[(i, t)].is_zero() {
                    let q = d[(i, t)].div_floor(&d[(t, t)]);
                    row_add(&mut d, &mut u, i, t, &-q);
                    clean &= d[(i, t)].is_zero();
                }
            }
            for j in t + 1..n {
                if !d[(t, j)].is_zero() {
                    let q = d[(t, j)].div_floor(&d[(t, t)]);
                    col_add(&mut d, &mut v, &mut v_inv, j, t, &-q);
                    clean &= d[(t, j)].is_zero();
                }
            }
            if !clean {
                continue;
            }
            let p = d[(t, t)].clone();
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&p)));
            if let Some(i) = offender {
                row_add(&mut d, &mut u, t, i, &BigInt::from(1));
                continue;
            }
            break;
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SnfDecomposition { u, d, v, v_inv }
}
