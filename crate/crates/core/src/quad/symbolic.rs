use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::Result;
use crate::exactnum::{factorial, Rational};
use crate::expr::Poly;
use crate::polytope::HPolytope;

use super::triangulate::{triangulate, Simplex};

/// Polynomial in the facet shifts `h_1..h_d`.
pub type HPolynomial = Poly;

/// `I(h) = ∫_{Δ_h} p(x) dx`, exactly, as a polynomial in `h`.
pub fn integrate_poly_symbolic(p: &Poly, poly: &HPolytope) -> Result<HPolynomial> {
    let d = poly.num_facets();
    let mut total = Poly::zero(d);
    for s in triangulate(poly)? {
        total = &total + &integrate_over_simplex(p, &s, d);
    }
    Ok(total)
}

/// `∫` over one `h`-affine simplex via `x = v_0 + Σ y_k (v_k - v_0)` and
/// `∫_{std} y^a dy = a! / (n + |a|)!`.
pub fn integrate_over_simplex(p: &Poly, s: &Simplex, d: usize) -> HPolynomial {
    let n = s.vertices.len() - 1;
    let edges: Vec<Vec<Poly>> =
        (1..=n).map(|k| (0..n).map(|i| &s.vertices[k][i] - &s.vertices[0][i]).collect()).collect();
    // x_i in the variables (y_1..y_n, h_1..h_d)
    let subs: Vec<Poly> = (0..n)
        .map(|i| {
            let mut xi = s.vertices[0][i].embed(n + d, n);
            for (k, e) in edges.iter().enumerate() {
                let yk = Poly::var(n + d, k);
                xi = &xi + &(&yk * &e[i].embed(n + d, n));
            }
            xi
        })
        .collect();
    let g = p.compose(&subs);
    let mut inner = Poly::zero(d);
    for (e, c) in g.terms() {
        let a = &e[..n];
        let num: BigInt = a.iter().map(|&k| factorial(k)).product();
        let den = factorial(n as u32 + a.iter().sum::<u32>());
        inner.add_term(e[n..].to_vec(), c * Rational::new(num, den));
    }
    let det = poly_det(&edges, d);
    let sign = det.coefficient(&vec![0; d]);
    assert!(!sign.is_zero(), "degenerate simplex");
    let det = if sign.is_negative() { -&det } else { det };
    &inner * &det
}

/// Determinant of a square matrix of polynomials by permutation expansion.
fn poly_det(m: &[Vec<Poly>], d: usize) -> Poly {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Poly::zero(d);
    permutations(&mut perm, 0, &mut |p, sign| {
        let mut t = Poly::constant(d, Rational::from_integer(sign.into()));
        for (row, &col) in p.iter().enumerate() {
            t = &t * &m[row][col];
            if t.is_zero() {
                return;
            }
        }
        total = &total + &t;
    });
    total
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize], i64)) {
    if k == p.len() {
        let mut inversions = 0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    inversions += 1;
                }
            }
        }
        f(p, if inversions % 2 == 0 { 1 } else { -1 });
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}
