use crate::error::{Error, Result};
use crate::exactnum::{to_f64, Rational};
use crate::expr::SmoothFn;
use crate::polytope::HPolytope;

use super::gauss::GaussLegendre;
use super::triangulate::triangulate;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadOptions {
    /// Gauss points per axis and panel; raised to cover `degree` if needed.
    pub points: usize,
    /// Polynomial degree that a single panel must integrate exactly.
    pub degree: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_level: u32,
    /// Cap on quadrature points per simplex.
    pub max_points: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { points: 10, degree: 8, rel_tol: 1e-11, abs_tol: 1e-15, max_level: 8, max_points: 1 << 22 }
    }
}

impl QuadOptions {
    pub fn points_for(&self, n: usize) -> usize {
        self.points.max((self.degree + n) / 2 + 1)
    }
}

/// Collapsed tensor rule on the simplex with the given vertices:
/// `y_k = u_k Π_{j<k} (1 - u_j)`, Jacobian `Π_k (1 - u_k)^{n-k}`.
pub fn integrate_simplex<F>(f: &F, verts: &[Vec<f64>], rule: &GaussLegendre) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + ?Sized,
{
    let n = verts.len() - 1;
    let edges: Vec<Vec<f64>> = (1..=n).map(|k| verts[k].iter().zip(&verts[0]).map(|(a, b)| a - b).collect()).collect();
    let det = det_f64(&edges).abs();
    if n == 0 {
        return f(&verts[0]);
    }
    let m = rule.len();
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    let mut total = 0.0;
    loop {
        let mut rest = 1.0;
        let mut w = 1.0;
        x.copy_from_slice(&verts[0]);
        for k in 0..n {
            let u = rule.nodes[idx[k]];
            let y = rest * u;
            for (xi, ei) in x.iter_mut().zip(&edges[k]) {
                *xi += y * ei;
            }
            w *= rule.weights[idx[k]] * rest;
            rest *= 1.0 - u;
        }
        total += w * f(&x)?;
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(total * det);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < m {
                break;
            }
            idx[k] = 0;
        }
    }
}

pub(crate) fn det_f64(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let t = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= t * a[c][k];
            }
        }
    }
    det
}

/// Integrates over a list of simplices at a fixed composite level.
pub fn integrate_simplices_at_level<F>(f: &F, simplices: &[Vec<Vec<f64>>], points: usize, level: u32) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + ?Sized,
{
    let rule = GaussLegendre::new(points).composite(level);
    simplices.iter().map(|s| integrate_simplex(f, s, &rule)).sum()
}

/// Refines the composite level until two successive results agree; returns
/// the value and the level reached.
pub fn integrate_adaptive<F>(f: &F, simplices: &[Vec<Vec<f64>>], opts: &QuadOptions) -> Result<(f64, u32)>
where
    F: Fn(&[f64]) -> Result<f64> + ?Sized,
{
    let n = simplices.first().map_or(0, |s| s.len() - 1);
    let points = opts.points_for(n);
    let mut prev = integrate_simplices_at_level(f, simplices, points, 0)?;
    for level in 1..=opts.max_level {
        let per_axis = points << level;
        if per_axis.checked_pow(n as u32).is_none_or(|c| c > opts.max_points) {
            break;
        }
        let cur = integrate_simplices_at_level(f, simplices, points, level)?;
        if (cur - prev).abs() <= opts.rel_tol * cur.abs() + opts.abs_tol {
            return Ok((cur, level));
        }
        prev = cur;
    }
    Err(Error::NonConvergence { levels: opts.max_level as usize })
}

/// Simplices of `Δ_h` with float vertices; fails on a combinatorial change.
pub fn shifted_simplices(p: &HPolytope, h: &[Rational]) -> Result<Vec<Vec<Vec<f64>>>> {
    let verts: Vec<Vec<f64>> =
        p.vertices().iter().map(|v| Ok(p.shifted_vertex(v, h)?.iter().map(to_f64).collect())).collect::<Result<_>>()?;
    Ok(triangulate(p)?.iter().map(|s| s.indices.iter().map(|&i| verts[i].clone()).collect()).collect())
}

/// `∫_{Δ_h} f` by collapsed Gauss rules with composite refinement.
pub fn integrate_numeric(f: &SmoothFn, p: &HPolytope, h: &[Rational], opts: &QuadOptions) -> Result<f64> {
    let simplices = shifted_simplices(p, h)?;
    Ok(integrate_adaptive(&|x: &[f64]| f.eval(x), &simplices, opts)?.0)
}
