use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::Result;
use crate::exactnum::Rational;
use crate::expr::{Integrand, Poly, SmoothFn};
use crate::polytope::HPolytope;

use super::series::{KahanSum, SumValue};

const CHUNK: usize = 4096;

/// `N^{-n} Σ_{k ∈ NΔ ∩ Z^n} f(k/N)`; exact for polynomial integrands.
pub fn riemann_sum_polytope(p: &HPolytope, f: &Integrand, n: u64) -> Result<SumValue> {
    match f {
        Integrand::Poly(q) => Ok(SumValue::Exact(riemann_sum_exact(p, q, n))),
        Integrand::Smooth(g) => Ok(SumValue::Float(riemann_sum_float(p, g, n)?)),
    }
}

/// Exact sum via the integer power sums `Σ_k k^a` for each monomial of `f`.
pub fn riemann_sum_exact(p: &HPolytope, f: &Poly, n: u64) -> Rational {
    let nn = BigInt::from(n);
    let dim = p.dim();
    let sums = monomial_sums(p, f, n);
    let mut total = Rational::zero();
    for ((e, c), s) in f.terms().zip(sums) {
        let deg: u32 = e.iter().sum();
        let den = num_traits::pow(nn.clone(), deg as usize + dim);
        total += c * Rational::new(s, den);
    }
    total
}

/// `Σ_{k ∈ NΔ ∩ Z^n} f(k)` exactly.
pub fn lattice_sum_exact(p: &HPolytope, f: &Poly, n: u64) -> Rational {
    f.terms().zip(monomial_sums(p, f, n)).map(|((_, c), s)| c * Rational::from_integer(s)).sum()
}

/// `Σ_{k ∈ NΔ ∩ Z^n} k^e` for each monomial exponent `e` of `f`, in term order.
fn monomial_sums(p: &HPolytope, f: &Poly, n: u64) -> Vec<BigInt> {
    let exps: Vec<Vec<u32>> = f.terms().map(|(e, _)| e.clone()).collect();
    let mut sums: Vec<BigInt> = vec![BigInt::zero(); exps.len()];
    for k in p.lattice_points(n) {
        let k: Vec<BigInt> = k.into_iter().map(BigInt::from).collect();
        for (s, e) in sums.iter_mut().zip(&exps) {
            let mut t = BigInt::one();
            for (ki, &a) in k.iter().zip(e) {
                if a > 0 {
                    t *= num_traits::pow(ki.clone(), a as usize);
                }
            }
            *s += t;
        }
    }
    sums
}

/// Floating-point sum in fixed lexicographic order; chunks are summed in
/// parallel and the partial sums combined in chunk order.
pub fn riemann_sum_float(p: &HPolytope, f: &SmoothFn, n: u64) -> Result<f64> {
    let points: Vec<Vec<i64>> = p.lattice_points(n).collect();
    let inv = 1.0 / n as f64;
    let partial: Vec<f64> = points
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut k = KahanSum::new();
            let mut x = vec![0.0; p.dim()];
            for pt in chunk {
                for (xi, &ki) in x.iter_mut().zip(pt) {
                    *xi = ki as f64 * inv;
                }
                k.add(f.eval(&x)?);
            }
            Ok(k.value())
        })
        .collect::<Result<_>>()?;
    let total: KahanSum = partial.into_iter().collect();
    Ok(total.value() * inv.powi(p.dim() as i32))
}

/// Exact lattice point counts of `NΔ` for each `N`.
pub fn lattice_counts(p: &HPolytope, ns: &[u64]) -> BTreeMap<u64, u64> {
    ns.iter().map(|&n| (n, p.count_lattice_points(n))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use crate::expr::parse;
    use crate::polytope::Facet;

    #[test]
    fn examples() {
        let one = parse("1", 2).unwrap();
        assert_eq!(riemann_sum_polytope(&HPolytope::unit_cube(2), &one, 5).unwrap(), SumValue::Exact(rat(36, 25)));
        let t =
            HPolytope::new(2, vec![Facet::new(vec![0, -1], 0), Facet::new(vec![1, 0], 1), Facet::new(vec![-2, 1], 0)])
                .unwrap();
        assert_eq!(riemann_sum_polytope(&t, &one, 2).unwrap(), SumValue::Exact(rat(9, 4)));
        let x = parse("x1", 1).unwrap();
        assert_eq!(riemann_sum_polytope(&HPolytope::unit_cube(1), &x, 4).unwrap(), SumValue::Exact(rat(5, 8)));
    }

    #[test]
    fn float_and_exact_agree() {
        let p = HPolytope::standard_simplex(3, 1);
        let f = parse("x1^2*x2 - 3*x3 + 1/3", 3).unwrap();
        for n in [1, 4, 9] {
            let exact = riemann_sum_polytope(&p, &f, n).unwrap().to_f64();
            let float = riemann_sum_float(&p, &f.to_smooth(), n).unwrap();
            assert!((exact - float).abs() < 1e-13 * exact.abs().max(1.0));
        }
        assert_eq!(lattice_counts(&HPolytope::unit_cube(2), &[3])[&3], 16);
        assert_eq!(riemann_sum_exact(&p, &Poly::zero(3), 3), int(0));
    }

    #[test]
    fn float_sum_is_deterministic() {
        let p = HPolytope::unit_cube(2);
        let f = parse("exp(-x1^2 - x2^2)*sin(3*x1)", 2).unwrap().to_smooth();
        let a = riemann_sum_float(&p, &f, 150).unwrap();
        let b = riemann_sum_float(&p, &f, 150).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
