//! Exact scalars: rationals, the group algebra `Q[Z/q]`, and Todd series.

mod cyclo;
pub mod linalg;
mod todd;

pub use cyclo::{primitive_idempotent, CycloElem};
pub use todd::{
    bernoulli, todd_coeffs, todd_rational, todd_value, twisted_todd_coeffs, twisted_todd_coeffs_mod,
    twisted_todd_value, ToddSeries,
};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // ratios of huge integers: fall back to a scaled division
        let shift = r.numer().bits().max(r.denom().bits()) as i64 - 1000;
        let (n, d) = if shift > 0 {
            (r.numer() >> shift as usize, r.denom() >> shift as usize)
        } else {
            (r.numer().clone(), r.denom().clone())
        };
        n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
    })
}

/// Representative of `r mod 1` in `[0, 1)`.
pub fn frac(r: &Rational) -> Rational {
    r - r.floor()
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Parses `p`, `p/q`, or a finite decimal such as `-0.125` into an exact
/// rational.
pub fn parse_rational(src: &str) -> Result<Rational> {
    let s = src.trim();
    let bad = || Error::invalid(format!("not a rational number: `{src}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let r = Rational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// `p/q` text form, or `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
