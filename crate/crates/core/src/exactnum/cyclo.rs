use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::linalg::solve_particular;
use super::{format_rational, to_f64, Rational};
use crate::error::{Error, Result};

/// Element `Σ coeffs[j]·ζ^j` of the group algebra `Q[Z/q]`, where `ζ` is an
/// abstract generator with `ζ^q = 1`.
///
/// Multiplication is cyclic convolution. Numeric evaluation sends `ζ` to
/// `e^{2πi/q}`, which projects onto the primitive component
/// `Q(ζ_q) ≅ e·Q[Z/q]` (see [`primitive_idempotent`]).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloElem {
    coeffs: Vec<Rational>,
}

impl CycloElem {
    pub fn zero(q: usize) -> Self {
        assert!(q > 0, "modulus must be positive");
        CycloElem { coeffs: vec![Rational::zero(); q] }
    }

    pub fn one(q: usize) -> Self {
        Self::scalar(q, Rational::one())
    }

    pub fn scalar(q: usize, r: Rational) -> Self {
        let mut e = Self::zero(q);
        e.coeffs[0] = r;
        e
    }

    /// `ζ^k`.
    pub fn root(q: usize, k: i64) -> Self {
        let mut e = Self::zero(q);
        e.coeffs[k.rem_euclid(q as i64) as usize] = Rational::one();
        e
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "modulus must be positive");
        CycloElem { coeffs }
    }

    pub fn modulus(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CycloElem { coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    /// Re-expresses the element over a multiple `q2` of the current modulus
    /// via `ζ_q = ζ_{q2}^{q2/q}`.
    pub fn lift(&self, q2: usize) -> Self {
        let q = self.modulus();
        assert!(q2.is_multiple_of(q), "lift target {q2} is not a multiple of {q}");
        let step = q2 / q;
        let mut out = Self::zero(q2);
        for (j, c) in self.coeffs.iter().enumerate() {
            out.coeffs[j * step] = c.clone();
        }
        out
    }

    pub fn numeric_eval(&self) -> Complex64 {
        let q = self.modulus() as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| Complex64::from_polar(to_f64(c), 2.0 * PI * j as f64 / q))
            .sum()
    }

    /// Projection `self·e` onto the primitive component.
    pub fn project_primitive(&self) -> Self {
        self * &primitive_idempotent(self.modulus())
    }

    /// If the primitive component of `self` is a rational `c` (that is,
    /// `self·e = c·e`), returns `c`.
    pub fn primitive_rational(&self) -> Option<Rational> {
        let q = self.modulus();
        let e = primitive_idempotent(q);
        let p = self * &e;
        let c = &p.coeffs[0] / &e.coeffs[0];
        (p == e.scale(&c)).then_some(c)
    }

    /// Inverse inside the primitive component `e·Q[Z/q] ≅ Q(ζ_q)`: the unique
    /// `y` in that ideal with `self·y = e`.
    ///
    /// The full group algebra is not a field (`1 - ζ^k` annihilates the
    /// norm element), so the convolution system is solved for a particular
    /// solution and projected. Inconsistent systems mean `self` vanishes in
    /// `Q(ζ_q)`.
    pub fn inverse_primitive(&self) -> Result<Self> {
        let q = self.modulus();
        let e = primitive_idempotent(q);
        // column k of the convolution operator is self·ζ^k
        let a: Vec<Vec<Rational>> =
            (0..q).map(|i| (0..q).map(|k| self.coeffs[(i + q - k) % q].clone()).collect()).collect();
        let y = solve_particular(&a, &e.coeffs).ok_or(Error::Singular)?;
        Ok(&CycloElem { coeffs: y } * &e)
    }
}

/// The idempotent `e = (1/q) Σ_j c_q(j) ζ^j` (Ramanujan sums `c_q`) that cuts
/// out the primitive component `Q(ζ_q)` of `Q[Z/q]`.
pub fn primitive_idempotent(q: usize) -> CycloElem {
    let qq = q as i64;
    let coeffs = (0..qq).map(|j| Rational::new(ramanujan_sum(qq, j).into(), qq.into())).collect();
    CycloElem { coeffs }
}

fn ramanujan_sum(q: i64, j: i64) -> i64 {
    let g = q.gcd(&j);
    (1..=g).filter(|d| g % d == 0).map(|d| mobius(q / d) * d).sum()
}

fn mobius(mut n: i64) -> i64 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

impl fmt::Debug for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| match j {
                0 => format_rational(c),
                _ => format!("{}·ζ{}^{}", format_rational(c), self.modulus(), j),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

fn check_same(a: &CycloElem, b: &CycloElem) {
    assert_eq!(a.modulus(), b.modulus(), "mismatched cyclotomic moduli");
}

impl Add for &CycloElem {
    type Output = CycloElem;
    fn add(self, rhs: &CycloElem) -> CycloElem {
        check_same(self, rhs);
        CycloElem { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CycloElem {
    type Output = CycloElem;
    fn sub(self, rhs: &CycloElem) -> CycloElem {
        check_same(self, rhs);
        CycloElem { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &CycloElem {
    type Output = CycloElem;
    fn mul(self, rhs: &CycloElem) -> CycloElem {
        check_same(self, rhs);
        let q = self.modulus();
        let mut out = CycloElem::zero(q);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out.coeffs[(i + j) % q] += a * b;
                }
            }
        }
        out
    }
}

impl Neg for &CycloElem {
    type Output = CycloElem;
    fn neg(self) -> CycloElem {
        CycloElem { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Add for CycloElem {
    type Output = CycloElem;
    fn add(self, rhs: CycloElem) -> CycloElem {
        &self + &rhs
    }
}

impl Sub for CycloElem {
    type Output = CycloElem;
    fn sub(self, rhs: CycloElem) -> CycloElem {
        &self - &rhs
    }
}

impl Mul for CycloElem {
    type Output = CycloElem;
    fn mul(self, rhs: CycloElem) -> CycloElem {
        &self * &rhs
    }
}

impl AddAssign<&CycloElem> for CycloElem {
    fn add_assign(&mut self, rhs: &CycloElem) {
        check_same(self, rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}
