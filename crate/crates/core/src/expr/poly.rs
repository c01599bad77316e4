use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exactnum::{format_rational, to_f64, Rational};

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are keyed by exponent vectors; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, Rational::one())
    }

    pub fn monomial(nvars: usize, exps: Vec<u32>, c: Rational) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Self::zero(nvars);
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector has the wrong length");
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = &out * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        out
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.nvars);
        let mut sum = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(xi.clone(), k as usize);
                }
            }
            sum += t;
        }
        sum
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nvars);
        self.terms.iter().map(|(e, c)| e.iter().zip(x).fold(to_f64(c), |acc, (&k, &xi)| acc * xi.powi(k as i32))).sum()
    }

    /// Substitutes variable `i` by `subs[i]`; all substitutes share one
    /// variable set, which becomes the variable set of the result.
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        assert_eq!(subs.len(), self.nvars);
        let m = subs.first().map_or(0, Poly::nvars);
        let max_deg: Vec<u32> = (0..self.nvars).map(|i| self.terms.keys().map(|e| e[i]).max().unwrap_or(0)).collect();
        let powers: Vec<Vec<Poly>> = subs
            .iter()
            .zip(&max_deg)
            .map(|(s, &d)| {
                let mut v = vec![Poly::one(m)];
                for k in 1..=d as usize {
                    let next = &v[k - 1] * s;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = Poly::zero(m);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = &t * &powers[i][k as usize];
                }
            }
            out = &out + &t;
        }
        out
    }

    /// `x = A y + b` with `A` of shape `nvars × m`.
    pub fn substitute_affine(&self, a: &[Vec<Rational>], b: &[Rational]) -> Poly {
        let m = a.first().map_or(0, Vec::len);
        let subs: Vec<Poly> = a
            .iter()
            .zip(b)
            .map(|(row, bi)| {
                let mut p = Poly::constant(m, bi.clone());
                for (j, aij) in row.iter().enumerate() {
                    p.add_term(unit(m, j), aij.clone());
                }
                p
            })
            .collect();
        self.compose(&subs)
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut e2 = e.clone();
                e2[var] -= 1;
                out.add_term(e2, c * Rational::from_integer(BigInt::from(e[var])));
            }
        }
        out
    }

    /// Places the variables at positions `offset..offset+nvars` of a larger
    /// variable set.
    pub fn embed(&self, total: usize, offset: usize) -> Poly {
        assert!(offset + self.nvars <= total);
        let mut out = Poly::zero(total);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; total];
            e2[offset..offset + self.nvars].copy_from_slice(e);
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Fixes variable `var` to `value`, dropping it from the variable set.
    pub fn fix_var(&self, var: usize, value: &Rational) -> Poly {
        let mut out = Poly::zero(self.nvars - 1);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2.remove(var);
            out.add_term(e2, c * num_traits::pow(value.clone(), k as usize));
        }
        out
    }

    /// Appends `extra` variables that do not occur.
    pub fn with_extra_vars(&self, extra: usize) -> Poly {
        self.embed(self.nvars + extra, 0)
    }
}

fn unit(m: usize, j: usize) -> Vec<u32> {
    let mut e = vec![0; m];
    e[j] = 1;
    e
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut acc: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Poly { nvars: self.nvars, terms: acc }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut s = format!("({})", format_rational(c));
                for (i, &k) in e.iter().enumerate() {
                    match k {
                        0 => {}
                        1 => s.push_str(&format!("*x{}", i + 1)),
                        _ => s.push_str(&format!("*x{}^{}", i + 1, k)),
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn cancellation_drops_terms() {
        let x = Poly::var(2, 0);
        let d = &x - &x;
        assert!(d.is_zero());
        assert_eq!(d.num_terms(), 0);
    }

    #[test]
    fn eval_example() {
        let p = Poly::from_terms(2, [(vec![2, 0], int(1)), (vec![0, 1], rat(3, 2))]);
        assert_eq!(p.eval(&[int(2), int(4)]), int(10));
        assert_eq!(p.eval_f64(&[2.0, 4.0]), 10.0);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn fix_and_derivative() {
        // x1 * x2^2 with x2 = 3 -> 9 x1
        let p = Poly::monomial(2, vec![1, 2], int(1));
        assert_eq!(p.fix_var(1, &int(3)), Poly::monomial(1, vec![1], int(9)));
        assert_eq!(p.derivative(1), Poly::monomial(2, vec![1, 1], int(2)));
    }

    fn small_poly(nvars: usize, coeffs: &[i64]) -> Poly {
        let mut p = Poly::zero(nvars);
        for (k, &c) in coeffs.iter().enumerate() {
            let e: Vec<u32> = (0..nvars).map(|i| ((k / (i + 1)) % 3) as u32).collect();
            p.add_term(e, rat(c, 1 + (k as i64 % 3)));
        }
        p
    }

    proptest! {
        #[test]
        fn affine_substitution_is_exact(coeffs in proptest::collection::vec(-4i64..5, 6),
                                        a in proptest::collection::vec(-3i64..4, 6),
                                        b in proptest::collection::vec(-3i64..4, 2),
                                        y in proptest::collection::vec(-5i64..6, 3)) {
            let p = small_poly(2, &coeffs);
            let amat: Vec<Vec<Rational>> = (0..2).map(|i| (0..3).map(|j| rat(a[i * 3 + j], 2)).collect()).collect();
            let bvec: Vec<Rational> = b.iter().map(|&v| rat(v, 3)).collect();
            let q = p.substitute_affine(&amat, &bvec);
            let yv: Vec<Rational> = y.iter().map(|&v| int(v)).collect();
            let x: Vec<Rational> = (0..2)
                .map(|i| (0..3).map(|j| &amat[i][j] * &yv[j]).sum::<Rational>() + &bvec[i])
                .collect();
            prop_assert_eq!(q.eval(&yv), p.eval(&x));
        }

        #[test]
        fn ring_ops_match_evaluation(c1 in proptest::collection::vec(-4i64..5, 5),
                                     c2 in proptest::collection::vec(-4i64..5, 5),
                                     x in proptest::collection::vec(-4i64..5, 2)) {
            let (p, q) = (small_poly(2, &c1), small_poly(2, &c2));
            let xv: Vec<Rational> = x.iter().map(|&v| rat(v, 2)).collect();
            prop_assert_eq!((&p * &q).eval(&xv), p.eval(&xv) * q.eval(&xv));
            prop_assert_eq!((&p - &q).eval(&xv), p.eval(&xv) - q.eval(&xv));
            prop_assert_eq!(p.pow(3).eval(&xv), num_traits::pow(p.eval(&xv), 3));
        }
    }
}
