//! Todd series `s/(1 - e^{-s})` and twisted Todd series `s/(1 - ω e^{-s})`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use super::{factorial, frac, CycloElem, Rational};
use crate::error::{Error, Result};

/// Truncated power series whose coefficients live in `Q[Z/q]`.
///
/// `coeffs[j]` is the coefficient of `s^j`. The untwisted series uses
/// modulus 1, so every coefficient is a plain rational.
#[derive(Debug, Clone, PartialEq)]
pub struct ToddSeries {
    coeffs: Vec<CycloElem>,
}

impl ToddSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn modulus(&self) -> usize {
        self.coeffs[0].modulus()
    }

    pub fn coeffs(&self) -> &[CycloElem] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &CycloElem {
        &self.coeffs[j]
    }

    /// Coefficients as rationals when every one of them is rational in the
    /// primitive component.
    pub fn rational_coeffs(&self) -> Option<Vec<Rational>> {
        self.coeffs.iter().map(CycloElem::primitive_rational).collect()
    }

    pub fn numeric(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(CycloElem::numeric_eval).collect()
    }
}

/// Coefficients `a_j = (-1)^j / (j+1)!` of `(1 - e^{-s})/s`.
fn one_minus_exp_over_s(order: usize) -> Vec<Rational> {
    (0..=order)
        .map(|j| {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            Rational::new(BigInt::from(sign), factorial(j as u32 + 1))
        })
        .collect()
}

/// First `order + 1` Maclaurin coefficients of `s/(1 - e^{-s})`, by exact
/// series inversion of `(1 - e^{-s})/s`.
pub fn todd_rational(order: usize) -> Vec<Rational> {
    let a = one_minus_exp_over_s(order);
    let mut g: Vec<Rational> = Vec::with_capacity(order + 1);
    g.push(Rational::one());
    for k in 1..=order {
        let s: Rational = (1..=k).map(|i| &a[i] * &g[k - i]).sum();
        g.push(-s);
    }
    g
}

pub fn todd_coeffs(order: usize) -> ToddSeries {
    ToddSeries { coeffs: todd_rational(order).into_iter().map(|c| CycloElem::scalar(1, c)).collect() }
}

/// `B_k` in the all-positive convention `B_1 = 1/6, B_2 = 1/30, ...`, read
/// off the Todd series as `(-1)^{k-1} (2k)! τ_{2k}`.
pub fn bernoulli(k: usize) -> Rational {
    assert!(k >= 1, "Bernoulli index starts at 1");
    let t = &todd_rational(2 * k)[2 * k];
    let b = t * Rational::from_integer(factorial(2 * k as u32));
    if k % 2 == 1 {
        b
    } else {
        -b
    }
}

/// Twisted Todd series for `ω = e^{2πir}`, over the modulus `den(r)`.
pub fn twisted_todd_coeffs(r: &Rational, order: usize) -> Result<ToddSeries> {
    let q = usize::try_from(frac(r).denom().clone()).map_err(|_| Error::invalid("twist denominator too large"))?;
    twisted_todd_coeffs_mod(r, q, order)
}

/// Twisted Todd series for `ω = e^{2πir}` with coefficients in `Q[Z/modulus]`;
/// `modulus` must be a multiple of the denominator of `r`.
///
/// `1 - ω e^{-s} = (1 - ω) + Σ_{j≥1} (-1)^{j+1} ω s^j / j!` is inverted term by
/// term; the leading inverse `1/(1 - ω)` is taken in the primitive component,
/// so every coefficient lies in the ideal `e·Q[Z/modulus]`.
pub fn twisted_todd_coeffs_mod(r: &Rational, modulus: usize, order: usize) -> Result<ToddSeries> {
    let r = frac(r);
    if r.is_zero() {
        return Err(Error::invalid("twist r must not be an integer (ω = 1 is the untwisted case)"));
    }
    let k = &r * Rational::from_integer(BigInt::from(modulus));
    if !k.is_integer() {
        return Err(Error::invalid(format!(
            "modulus {modulus} is not a multiple of the twist denominator {}",
            r.denom()
        )));
    }
    let k = i64::try_from(k.to_integer()).map_err(|_| Error::invalid("twist index overflow"))?;
    let omega = CycloElem::root(modulus, k);
    let one = CycloElem::one(modulus);
    let d0 = &one - &omega;
    let d0_inv = d0.inverse_primitive()?;
    // d[j] for j >= 1
    let d: Vec<CycloElem> = (0..order)
        .map(|j| {
            if j == 0 {
                d0.clone()
            } else {
                let sign = if j % 2 == 1 { 1 } else { -1 };
                omega.scale(&Rational::new(BigInt::from(sign), factorial(j as u32)))
            }
        })
        .collect();
    let mut g: Vec<CycloElem> = Vec::with_capacity(order);
    for m in 0..order {
        if m == 0 {
            g.push(d0_inv.clone());
            continue;
        }
        let mut acc = CycloElem::zero(modulus);
        for i in 1..=m {
            acc += &(&d[i] * &g[m - i]);
        }
        g.push(-&(&d0_inv * &acc));
    }
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(CycloElem::zero(modulus));
    coeffs.extend(g);
    Ok(ToddSeries { coeffs })
}

/// Closed form `s/(1 - e^{-s})` in floating point.
pub fn todd_value(s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        s / -(-s).exp_m1()
    }
}

/// Closed form `s/(1 - ω e^{-s})` in complex floating point.
pub fn twisted_todd_value(s: Complex64, omega: Complex64) -> Complex64 {
    s / (Complex64::new(1.0, 0.0) - omega * (-s).exp())
}
