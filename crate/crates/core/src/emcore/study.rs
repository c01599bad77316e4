//! Estimates `Σ_j c_j N^{-j}` and convergence studies against Riemann sums.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::expr::Integrand;
use crate::polytope::HPolytope;

use super::expansion::{em_expansion_simple, ExpansionOptions};
use super::riemann::riemann_sum_polytope;
use super::series::{ExpansionSeries, SumValue};

/// Series for each residue class of the requested `N` (one class unless the
/// polytope has non-integral vertices).
fn series_for(
    p: &HPolytope,
    f: &Integrand,
    ns: &[u64],
    opts: &ExpansionOptions,
) -> Result<BTreeMap<u64, ExpansionSeries>> {
    let first = em_expansion_simple(p, f, &opts.clone().at_residue(ns.first().copied().unwrap_or(0)))?;
    let period = first.period;
    let mut out = BTreeMap::new();
    for &n in ns {
        let r = n % period;
        if let std::collections::btree_map::Entry::Vacant(slot) = out.entry(r) {
            let s = if first.applies_to(n) {
                first.clone()
            } else {
                em_expansion_simple(p, f, &opts.clone().at_residue(n))?
            };
            slot.insert(s);
        }
    }
    Ok(out)
}

/// `Σ_j c_j N^{-j}` from the simple-polytope expansion.
pub fn em_estimate(p: &HPolytope, f: &Integrand, n: u64, opts: &ExpansionOptions) -> Result<SumValue> {
    Ok(em_expansion_simple(p, f, &opts.clone().at_residue(n))?.evaluate(n))
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyRow {
    pub n: u64,
    pub riemann: SumValue,
    pub estimate: SumValue,
    pub abs_error: SumValue,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub order: usize,
    pub rows: Vec<StudyRow>,
    /// Least-squares fit `log e ≈ slope·log N + intercept` over the nonzero errors.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// Rows left out of the fit because their error is zero.
    pub zero_errors: usize,
}

pub fn convergence_study(
    p: &HPolytope,
    f: &Integrand,
    ns: &[u64],
    opts: &ExpansionOptions,
) -> Result<ConvergenceReport> {
    let series = series_for(p, f, ns, opts)?;
    let period = series.values().next().map_or(1, |s| s.period);
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let riemann = riemann_sum_polytope(p, f, n)?;
        let estimate = series[&(n % period)].evaluate(n);
        let abs_error = riemann.abs_diff(&estimate);
        rows.push(StudyRow { n, riemann, estimate, abs_error });
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.abs_error.to_f64())).collect();
    let fit = loglog_fit(&points);
    let zero_errors = points.iter().filter(|(_, e)| *e <= 0.0).count();
    Ok(ConvergenceReport { order: opts.order, rows, slope: fit.map(|f| f.0), intercept: fit.map(|f| f.1), zero_errors })
}

/// Least-squares line through `(log x, log y)` for the points with `y > 0`;
/// `None` with fewer than two such points.
pub fn loglog_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;
    use crate::expr::parse;
    use crate::polytope::Facet;

    #[test]
    fn fit_examples() {
        let (s, _) = loglog_fit(&[(10.0, 1e-2), (100.0, 1e-4)]).unwrap();
        assert!((s + 2.0).abs() < 1e-12);
        assert_eq!(loglog_fit(&[(10.0, 0.0), (100.0, 1e-4)]), None);
        let (s, b) = loglog_fit(&[(2.0, 24.0), (4.0, 3.0), (8.0, 0.375)]).unwrap();
        assert!((s + 3.0).abs() < 1e-12 && (b - 192f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn exact_square_has_zero_error() {
        let p = HPolytope::unit_cube(2);
        let f = parse("1", 2).unwrap();
        let ns: Vec<u64> = (1..=10).collect();
        let r = convergence_study(&p, &f, &ns, &ExpansionOptions::with_order(2)).unwrap();
        assert!(r.rows.iter().all(|row| row.abs_error == SumValue::Exact(int(0))));
        assert_eq!((r.slope, r.zero_errors), (None, 10));
        assert_eq!(
            em_estimate(&p, &f, 5, &ExpansionOptions::with_order(2)).unwrap(),
            SumValue::Exact(int(36) / int(25))
        );
    }

    #[test]
    fn residue_classes_are_handled() {
        let p =
            HPolytope::new(2, vec![Facet::new(vec![-1, 0], 0), Facet::new(vec![0, -1], 0), Facet::new(vec![1, 2], 1)])
                .unwrap();
        let f = parse("x1 + x2^2", 2).unwrap();
        let ns: Vec<u64> = (1..=12).collect();
        let r = convergence_study(&p, &f, &ns, &ExpansionOptions::with_order(4)).unwrap();
        assert_eq!(r.zero_errors, 12);
    }

    #[test]
    fn smooth_errors_decay_with_order() {
        let p = HPolytope::unit_cube(2);
        let f = parse("exp(-x1^2 - x2^2)", 2).unwrap();
        let ns = [10, 14, 20, 28, 40];
        let s0 = convergence_study(&p, &f, &ns, &ExpansionOptions::with_order(0)).unwrap().slope.unwrap();
        let s2 = convergence_study(&p, &f, &ns, &ExpansionOptions::with_order(2)).unwrap().slope.unwrap();
        assert!((s0 + 1.0).abs() < 0.3, "{s0}");
        assert!(s2 <= -2.7, "{s2}");
    }
}
