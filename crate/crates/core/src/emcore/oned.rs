//! One-dimensional sums: half-line (ordinary and twisted) and full-line.

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactnum::{frac, to_f64, todd_rational, twisted_todd_coeffs, Rational};
use crate::expr::SmoothFn;
use crate::quad::{integrate_adaptive, QuadOptions};

use super::series::{ExpansionSeries, KahanSum};

fn check_1d(f: &SmoothFn) -> Result<()> {
    if f.nvars() != 1 {
        return Err(Error::invalid("one-dimensional routine needs a function of x1 only"));
    }
    Ok(())
}

/// Last index `k` with `f(-k/N)` possibly nonzero, from the declared support.
fn default_kmax(f: &SmoothFn, n: u64) -> Result<u64> {
    let s = f.support().ok_or_else(|| Error::invalid("kmax is required for functions without declared support"))?;
    let left = s.center[0] - s.radius;
    Ok(if left >= 0.0 { 0 } else { (-left * n as f64).ceil() as u64 })
}

fn tight() -> QuadOptions {
    QuadOptions { points: 20, rel_tol: 1e-15, abs_tol: 1e-300, max_level: 14, ..QuadOptions::default() }
}

fn integrate_interval(f: &SmoothFn, a: f64, b: f64) -> Result<f64> {
    if a >= b {
        return Ok(0.0);
    }
    let seg = vec![vec![vec![a], vec![b]]];
    match integrate_adaptive(&|x: &[f64]| f.eval(x), &seg, &tight()) {
        Ok((v, _)) => Ok(v),
        // rounding can keep the last digits from settling; accept the finest level
        Err(Error::NonConvergence { .. }) => {
            crate::quad::integrate_simplices_at_level(&|x: &[f64]| f.eval(x), &seg, 20, 14)
        }
        Err(e) => Err(e),
    }
}

/// `∫_{-∞}^0 f`. Uses the declared support when present, otherwise the map
/// `x = -t/(1-t)` onto `[0, 1)`, which assumes fast decay at `-∞`.
pub fn halfline_integral(f: &SmoothFn) -> Result<f64> {
    check_1d(f)?;
    if let Some(s) = f.support() {
        return integrate_interval(f, s.center[0] - s.radius, (s.center[0] + s.radius).min(0.0));
    }
    let g = |t: &[f64]| {
        let u = 1.0 - t[0];
        Ok(f.eval(&[-t[0] / u])? / (u * u))
    };
    let seg = vec![vec![vec![0.0], vec![1.0]]];
    Ok(integrate_adaptive(&g, &seg, &QuadOptions { points: 20, ..QuadOptions::default() })?.0)
}

/// `(1/N) Σ_{k=0}^{kmax} f(-k/N)` with compensated summation.
pub fn riemann_sum_1d_halfline(f: &SmoothFn, n: u64, kmax: Option<u64>) -> Result<f64> {
    check_1d(f)?;
    let kmax = match kmax {
        Some(k) => k,
        None => default_kmax(f, n)?,
    };
    let mut s = KahanSum::new();
    for k in 0..=kmax {
        s.add(f.eval(&[-(k as f64) / n as f64])?);
    }
    Ok(s.value() / n as f64)
}

fn twist_angle(r: &Rational) -> Result<f64> {
    let r = frac(r);
    if r.is_zero() {
        return Err(Error::invalid("twist r must not be an integer"));
    }
    Ok(2.0 * std::f64::consts::PI * to_f64(&r))
}

/// `(1/N) Σ_{k=0}^{kmax} ω^k f(-k/N)` for `ω = e^{2πir}`.
pub fn riemann_sum_1d_twisted(f: &SmoothFn, r: &Rational, n: u64, kmax: Option<u64>) -> Result<Complex64> {
    check_1d(f)?;
    let theta = twist_angle(r)?;
    let kmax = match kmax {
        Some(k) => k,
        None => default_kmax(f, n)?,
    };
    let (mut re, mut im) = (KahanSum::new(), KahanSum::new());
    for k in 0..=kmax {
        let v = f.eval(&[-(k as f64) / n as f64])?;
        // reduce the angle exactly through k mod q when possible
        let w = Complex64::from_polar(1.0, theta * k as f64);
        re.add(w.re * v);
        im.add(w.im * v);
    }
    Ok(Complex64::new(re.value(), im.value()) / n as f64)
}

/// Series `Σ_j t_j D_j N^{-j}` with `D_0 = ∫_{-∞}^0 f` and
/// `D_j = f^{(j-1)}(0)`.
pub fn em_1d_halfline_series(f: &SmoothFn, order: usize) -> Result<ExpansionSeries> {
    check_1d(f)?;
    let t = todd_rational(order);
    let derivs = if order > 0 { f.taylor_line(&[0.0], &[1.0], order - 1)? } else { Vec::new() };
    let mut coeffs = vec![to_f64(&t[0]) * halfline_integral(f)?];
    for j in 1..=order {
        coeffs.push(to_f64(&t[j]) * derivs[j - 1]);
    }
    Ok(ExpansionSeries::from_numeric(order, coeffs))
}

pub fn em_1d_halfline(f: &SmoothFn, n: u64, order: usize) -> Result<f64> {
    Ok(em_1d_halfline_series(f, order)?.evaluate_f64(n as f64))
}

/// `Σ_{j≥1} b^ω_j f^{(j-1)}(0) N^{-j}`; the twisted series has no `j = 0`
/// term, so no integral appears.
pub fn em_1d_twisted(f: &SmoothFn, r: &Rational, n: u64, order: usize) -> Result<Complex64> {
    check_1d(f)?;
    twist_angle(r)?;
    let b = twisted_todd_coeffs(r, order)?.numeric();
    let derivs = if order > 0 { f.taylor_line(&[0.0], &[1.0], order - 1)? } else { Vec::new() };
    let nf = n as f64;
    let mut total = Complex64::zero();
    for j in 1..=order {
        total += b[j] * derivs[j - 1] * nf.powi(-(j as i32));
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FullLineDiagnostics {
    pub n: u64,
    /// `|(1/N) Σ_k f(k/N) - ∫ f|`
    pub untwisted_error: f64,
    /// `|Σ_k ω^k f(k/N)|`
    pub twisted_abs: Option<f64>,
}

/// Full-line sums of a compactly supported `f`: the error of the plain
/// Riemann sum and the size of the twisted sum.
pub fn fullline_checks(f: &SmoothFn, n: u64, r: Option<&Rational>) -> Result<FullLineDiagnostics> {
    check_1d(f)?;
    let s = f.support().ok_or_else(|| Error::invalid("full-line checks need a compactly supported f"))?;
    let (a, b) = (s.center[0] - s.radius, s.center[0] + s.radius);
    let integral = integrate_interval(f, a, b)?;
    let nf = n as f64;
    let (k0, k1) = ((a * nf).floor() as i64, (b * nf).ceil() as i64);
    let mut plain = KahanSum::new();
    for k in k0..=k1 {
        plain.add(f.eval(&[k as f64 / nf])?);
    }
    let twisted_abs = match r {
        None => None,
        Some(r) => {
            let r = frac(r);
            twist_angle(&r)?;
            let q: i64 = r.denom().try_into().map_err(|_| Error::invalid("twist denominator too large"))?;
            let p: i64 = r.numer().try_into().map_err(|_| Error::invalid("twist numerator too large"))?;
            let (mut re, mut im) = (KahanSum::new(), KahanSum::new());
            for k in k0..=k1 {
                let v = f.eval(&[k as f64 / nf])?;
                let phase = (p * k).rem_euclid(q) as f64 / q as f64;
                let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase);
                re.add(w.re * v);
                im.add(w.im * v);
            }
            Some(Complex64::new(re.value(), im.value()).norm())
        }
    };
    Ok(FullLineDiagnostics { n, untwisted_error: (plain.value() / nf - integral).abs(), twisted_abs })
}
