//! Integration over `Δ_h`: exact polynomial integrals as polynomials in the
//! facet shifts, collapsed Gauss rules for smooth integrands and
//! finite-difference derivatives in `h`.

mod fd;
mod gauss;
mod numeric;
mod symbolic;
mod triangulate;

pub use fd::{fd_derivatives, multi_indices, FdOptions};
pub use gauss::GaussLegendre;
pub use numeric::{
    integrate_adaptive, integrate_numeric, integrate_simplex, integrate_simplices_at_level, shifted_simplices,
    QuadOptions,
};
pub use symbolic::{integrate_over_simplex, integrate_poly_symbolic, HPolynomial};
pub use triangulate::{triangulate, Simplex};

use std::collections::BTreeMap;

use crate::error::Result;
use crate::exactnum::{to_f64, Rational};
use crate::expr::SmoothFn;
use crate::polytope::HPolytope;

/// Whether `Δ_h` has the combinatorial type of `Δ`: every shifted vertex
/// stays strictly inside the facets it is not on.
pub fn stable_at(p: &HPolytope, h: &[Rational]) -> bool {
    p.vertices().iter().all(|v| p.shifted_vertex(v, h).is_ok())
}

/// `∂^a I(0)` for `I(h) = ∫_{Δ_h} f`, by finite differences of quadratures.
/// The composite level is fixed from an adaptive run at `h = 0` so that all
/// stencil values come from the same rule.
pub fn h_derivatives_numeric(
    f: &SmoothFn,
    p: &HPolytope,
    indices: &[Vec<u32>],
    qopts: &QuadOptions,
    fdopts: &FdOptions,
) -> Result<BTreeMap<Vec<u32>, f64>> {
    let simplices = triangulate(p)?;
    let paths = p.vertex_paths()?;
    let n = p.dim();
    let points = qopts.points_for(n);
    let eval = |x: &[f64]| f.eval(x);
    let at = |h: &[Rational]| -> Vec<Vec<Vec<f64>>> {
        let verts: Vec<Vec<f64>> = paths.iter().map(|path| path.iter().map(|c| to_f64(&c.eval(h))).collect()).collect();
        simplices.iter().map(|s| s.indices.iter().map(|&i| verts[i].clone()).collect()).collect()
    };
    let zero = vec![Rational::default(); p.num_facets()];
    let (_, level) = integrate_adaptive(&eval, &at(&zero), qopts)?;
    fd_derivatives(indices, |h| integrate_simplices_at_level(&eval, &at(h), points, level), |h| stable_at(p, h), fdopts)
}

#[cfg(test)]
mod tests;
