use nalgebra::{DMatrix, DVector};

use crate::emcore::SumValue;
use crate::error::{Error, Result};
use crate::exactnum::linalg::solve;
use crate::exactnum::{int, to_f64, Rational};
use crate::polytope::HPolytope;

use super::symbol::{ehrhart_sum, PolyhomSymbol};

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityOptions {
    /// Number of monomials `N^p`, `p = n + d, n + d - 1, ...`.
    pub terms: usize,
    /// Condition numbers above this mark the fit as ill-conditioned.
    pub max_condition: f64,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions { terms: 6, max_condition: 1e12 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    /// Fitted powers, highest first.
    pub powers: Vec<i64>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    /// `|a - b| / max(|a|, |b|)` per power; pairs negligible next to the
    /// largest coefficient count as agreeing.
    pub rel_disagreement: Vec<f64>,
    pub condition: [f64; 2],
    pub ill_conditioned: bool,
}

/// Least-squares coefficients of `Σ_p c_p N^p` through `(N, value)`; returns
/// the coefficients and the condition number of the scaled design matrix.
fn fit(data: &[(u64, f64)], powers: &[i64]) -> Result<(Vec<f64>, f64)> {
    if data.len() < powers.len() {
        return Err(Error::invalid(format!(
            "{} sample points cannot determine {} coefficients",
            data.len(),
            powers.len()
        )));
    }
    let scale = data.iter().map(|d| d.0).max().unwrap_or(1) as f64;
    let a = DMatrix::from_fn(data.len(), powers.len(), |i, j| (data[i].0 as f64 / scale).powi(powers[j] as i32));
    let b = DVector::from_iterator(data.len(), data.iter().map(|d| d.1 / scale.powi(powers[0] as i32)));
    let svd = a.svd(true, true);
    let sv = &svd.singular_values;
    let cond = sv.max() / sv.min();
    if !cond.is_finite() {
        return Err(Error::IllConditioned { cond });
    }
    let x = svd.solve(&b, 0.0).map_err(Error::invalid)?;
    let coeffs = powers.iter().zip(x.iter()).map(|(&p, c)| c * scale.powi(powers[0] as i32 - p as i32)).collect();
    Ok((coeffs, cond))
}

/// Exact least squares through the normal equations; used when every sum
/// is rational so that polynomial data are reproduced without rounding.
fn fit_exact(data: &[(u64, Rational)], powers: &[i64]) -> Result<Vec<f64>> {
    let monomial = |n: u64, p: i64| {
        let base = int(n as i64);
        if p >= 0 {
            num_traits::pow(base, p as usize)
        } else {
            num_traits::pow(base.recip(), (-p) as usize)
        }
    };
    let rows: Vec<Vec<Rational>> =
        data.iter().map(|(n, _)| powers.iter().map(|&p| monomial(*n, p)).collect()).collect();
    let k = powers.len();
    let mut ata = vec![vec![Rational::default(); k]; k];
    let mut atb = vec![Rational::default(); k];
    for (row, (_, y)) in rows.iter().zip(data) {
        for i in 0..k {
            atb[i] += &row[i] * y;
            for j in 0..k {
                ata[i][j] += &row[i] * &row[j];
            }
        }
    }
    Ok(solve(&ata, &atb)?.iter().map(to_f64).collect())
}

/// Fits the leading coefficients of the Ehrhart sum separately on two ranges
/// of `N` and compares them. Rational sums are fitted exactly.
pub fn expansion_stability_check(
    sym: &PolyhomSymbol,
    p: &HPolytope,
    ranges: [&[u64]; 2],
    opts: &StabilityOptions,
) -> Result<StabilityReport> {
    let top = p.dim() as i64 + sym.top_degree() as i64;
    let powers: Vec<i64> = (0..opts.terms as i64).map(|k| top - k).collect();
    let mut fits = Vec::with_capacity(2);
    for range in ranges {
        let sums: Vec<(u64, SumValue)> =
            range.iter().map(|&n| Ok((n, ehrhart_sum(sym, p, n)?))).collect::<Result<_>>()?;
        let data: Vec<(u64, f64)> = sums.iter().map(|(n, v)| (*n, v.to_f64())).collect();
        let (float_fit, cond) = fit(&data, &powers)?;
        let exact: Option<Vec<(u64, Rational)>> =
            sums.iter().map(|(n, v)| v.as_exact().map(|r| (*n, r.clone()))).collect();
        match exact {
            Some(d) => fits.push((fit_exact(&d, &powers)?, cond)),
            None => fits.push((float_fit, cond)),
        }
    }
    let (second, c2) = fits.pop().expect("two fits");
    let (first, c1) = fits.pop().expect("two fits");
    let largest = first.iter().chain(&second).fold(0.0f64, |m, c| m.max(c.abs()));
    let rel_disagreement = first
        .iter()
        .zip(&second)
        .map(|(a, b)| {
            let denom = a.abs().max(b.abs()).max(1e-12 * largest);
            if denom == 0.0 {
                0.0
            } else {
                (a - b).abs() / denom
            }
        })
        .collect();
    Ok(StabilityReport {
        powers,
        first,
        second,
        rel_disagreement,
        condition: [c1, c2],
        ill_conditioned: c1 > opts.max_condition || c2 > opts.max_condition,
    })
}
