//! Wedges `W = {⟨u_i, x⟩ ≤ c_i, i = 1..m}` and compactly supported integrands.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::linalg::{determinant, inverse};
use crate::exactnum::{to_f64, Rational};
use crate::expr::SmoothFn;
use crate::latalg::{complement_basis, is_regular, torsion_group, IntMat, TorsionGroup};
use crate::polytope::{starred_elements, FaceData};
use crate::quad::{fd_derivatives, multi_indices, GaussLegendre};

use super::expansion::{apply_operator_numeric, ExpansionOptions, ToddOperator};
use super::series::{ExpansionSeries, KahanSum};

#[derive(Clone, Debug, PartialEq)]
pub struct WedgeSpec {
    pub dim: usize,
    pub rows: Vec<Vec<i64>>,
    pub c: Vec<i64>,
    pub regular: bool,
    pub torsion: TorsionGroup,
}

impl WedgeSpec {
    pub fn new(dim: usize, rows: Vec<Vec<i64>>, c: Vec<i64>) -> Result<Self> {
        if rows.len() != c.len() || rows.iter().any(|r| r.len() != dim) || rows.len() > dim {
            return Err(Error::invalid("wedge rows and offsets do not match the dimension"));
        }
        for (index, r) in rows.iter().enumerate() {
            let g = r.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
            if g == 0 {
                return Err(Error::ZeroVector);
            }
            if g != 1 {
                return Err(Error::NotPrimitive { index });
            }
        }
        let mat = IntMat::from_rows(&rows, dim);
        let torsion = torsion_group(&mat)?;
        let regular = is_regular(&mat)?;
        Ok(WedgeSpec { dim, rows, c, regular, torsion })
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn normals(&self, subset: &[usize]) -> IntMat {
        let rows: Vec<Vec<i64>> = subset.iter().map(|&i| self.rows[i].clone()).collect();
        IntMat::from_rows(&rows, self.dim)
    }

    /// Every subset `F` of the constraints, with `Γ_F` and `Γ_F^♯`.
    pub fn faces(&self) -> Result<Vec<FaceData>> {
        let m = self.rank();
        let mut sets: Vec<Vec<usize>> =
            (0u32..1 << m).map(|mask| (0..m).filter(|&i| mask & (1 << i) != 0).collect()).collect();
        sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        sets.into_iter()
            .map(|facets| {
                let torsion = torsion_group(&self.normals(&facets))?;
                let starred = starred_elements(&torsion, facets.len());
                Ok(FaceData { dim: self.dim - facets.len(), facets, torsion, starred, vertices: Vec::new() })
            })
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.rows
            .iter()
            .zip(&self.c)
            .all(|(u, &c)| u.iter().zip(x).map(|(&a, b)| a as f64 * b).sum::<f64>() <= c as f64)
    }
}

/// Coordinates `z = A x` with `A` the wedge rows followed by a complement;
/// `W_h ∩ supp f` becomes a box in `z`.
struct DualBox {
    inverse: Vec<Vec<f64>>,
    jacobian: f64,
    lower: Vec<f64>,
    upper: Vec<f64>,
    offsets: Vec<f64>,
}

impl DualBox {
    fn new(w: &WedgeSpec, f: &SmoothFn) -> Result<Self> {
        let support =
            f.support().ok_or_else(|| Error::invalid("wedge expansions need a compactly supported integrand"))?;
        let rows = w.normals(&(0..w.rank()).collect::<Vec<_>>());
        let a = rows.vstack(&complement_basis(&rows)?);
        let ar = a.to_rational();
        let inv = inverse(&ar)?;
        let det = determinant(&ar);
        let (mut lower, mut upper) = (Vec::new(), Vec::new());
        for row in a.rows() {
            let row: Vec<f64> = row.iter().map(|x| to_f64(&Rational::from_integer(x.clone()))).collect();
            let mid: f64 = row.iter().zip(&support.center).map(|(a, b)| a * b).sum();
            let reach = support.radius * row.iter().map(|x| x * x).sum::<f64>().sqrt();
            lower.push(mid - reach);
            upper.push(mid + reach);
        }
        Ok(DualBox {
            inverse: inv.iter().map(|r| r.iter().map(to_f64).collect()).collect(),
            jacobian: 1.0 / to_f64(&det).abs(),
            lower,
            upper,
            offsets: w.c.iter().map(|&c| c as f64).collect(),
        })
    }

    /// `∫_{W_h} f` with a composite tensor Gauss rule.
    fn integrate(&self, f: &SmoothFn, h: &[f64], rule: &GaussLegendre) -> Result<f64> {
        let n = self.lower.len();
        let lo = &self.lower;
        let mut hi = self.upper.clone();
        for (i, off) in self.offsets.iter().enumerate() {
            hi[i] = hi[i].min(off + h[i]);
            if hi[i] <= lo[i] {
                return Ok(0.0);
            }
        }
        let k = rule.len();
        let total = k.pow(n as u32);
        let chunks: Vec<f64> = (0..total)
            .into_par_iter()
            .with_min_len(1024)
            .map(|mut idx| {
                let mut z = vec![0.0; n];
                let mut w = 1.0;
                for i in 0..n {
                    let j = idx % k;
                    idx /= k;
                    z[i] = lo[i] + (hi[i] - lo[i]) * rule.nodes[j];
                    w *= (hi[i] - lo[i]) * rule.weights[j];
                }
                let x: Vec<f64> = self.inverse.iter().map(|r| r.iter().zip(&z).map(|(a, b)| a * b).sum()).collect();
                Ok(w * f.eval(&x)?)
            })
            .collect::<Result<_>>()?;
        Ok(chunks.into_iter().collect::<KahanSum>().value() * self.jacobian)
    }
}

fn settle_level(boxed: &DualBox, f: &SmoothFn, opts: &ExpansionOptions) -> Result<u32> {
    let points = opts.quad.points.max(opts.quad.degree / 2 + 1);
    let base = GaussLegendre::new(points);
    let zero = vec![0.0; boxed.offsets.len()];
    let mut prev = boxed.integrate(f, &zero, &base)?;
    for level in 1..=opts.quad.max_level {
        let per_axis = points << level;
        if per_axis.checked_pow(boxed.lower.len() as u32).is_none_or(|c| c > opts.quad.max_points) {
            break;
        }
        let cur = boxed.integrate(f, &zero, &base.composite(level))?;
        if (cur - prev).abs() <= opts.quad.rel_tol * cur.abs() + opts.quad.abs_tol {
            return Ok(level);
        }
        prev = cur;
    }
    Err(Error::NonConvergence { levels: opts.quad.max_level as usize })
}

/// `∂^a ∫_{W_h} f` at `h = 0` for `|a| ≤ order`.
pub fn wedge_h_derivatives(w: &WedgeSpec, f: &SmoothFn, opts: &ExpansionOptions) -> Result<BTreeMap<Vec<u32>, f64>> {
    if f.nvars() != w.dim {
        return Err(Error::invalid("function and wedge dimensions differ"));
    }
    let boxed = DualBox::new(w, f)?;
    let level = settle_level(&boxed, f, opts)?;
    let points = opts.quad.points.max(opts.quad.degree / 2 + 1);
    let rule = GaussLegendre::new(points).composite(level);
    let indices = multi_indices(w.rank(), opts.order as u32);
    fd_derivatives(
        &indices,
        |h| boxed.integrate(f, &h.iter().map(to_f64).collect::<Vec<_>>(), &rule),
        |_| true,
        &opts.fd,
    )
}

/// Expansion of `N^{-n} Σ_{k ∈ Z^n ∩ NW} f(k/N)`: twisted Todd operators in
/// the `m` wedge variables, plain integration in the others.
pub fn em_wedge_expansion(w: &WedgeSpec, f: &SmoothFn, opts: &ExpansionOptions) -> Result<ExpansionSeries> {
    let op = ToddOperator::from_faces_with_offsets(&w.faces()?, &w.c);
    let derivs = wedge_h_derivatives(w, f, opts)?;
    let tables = op.numeric_tables(opts.order)?;
    let c = apply_operator_numeric(&op, &derivs, opts.order, opts.residue, |_, r| tables[r].clone())?;
    Ok(ExpansionSeries::from_numeric(opts.order, c).with_period(op.period(), opts.residue))
}

/// `N^{-n} Σ_{k ∈ Z^n ∩ NW} f(k/N)` over the lattice points of the support
/// ball, in lexicographic order.
pub fn riemann_sum_wedge(w: &WedgeSpec, f: &SmoothFn, n: u64) -> Result<f64> {
    let support = f.support().ok_or_else(|| Error::invalid("wedge sums need a compactly supported integrand"))?;
    let nf = n as f64;
    let lo: Vec<i64> = support.center.iter().map(|c| ((c - support.radius) * nf).floor() as i64).collect();
    let hi: Vec<i64> = support.center.iter().map(|c| ((c + support.radius) * nf).ceil() as i64).collect();
    let big_n = BigInt::from(n);
    let inside = |k: &[i64]| {
        w.rows.iter().zip(&w.c).all(|(u, &c)| {
            let dot: BigInt = u.iter().zip(k).map(|(&a, &b)| BigInt::from(a) * b).sum();
            dot <= BigInt::from(c) * &big_n
        })
    };
    // outer coordinate in parallel, partial sums combined in order
    let partial: Vec<f64> = (lo[0]..=hi[0])
        .into_par_iter()
        .map(|k0| {
            let mut acc = KahanSum::new();
            let mut k = lo.clone();
            k[0] = k0;
            loop {
                if inside(&k) {
                    let x: Vec<f64> = k.iter().map(|&v| v as f64 / nf).collect();
                    acc.add(f.eval(&x)?);
                }
                let mut i = 1;
                loop {
                    if i == k.len() {
                        return Ok(acc.value());
                    }
                    k[i] += 1;
                    if k[i] <= hi[i] {
                        break;
                    }
                    k[i] = lo[i];
                    i += 1;
                }
            }
        })
        .collect::<Result<_>>()?;
    Ok(partial.into_iter().collect::<KahanSum>().value() / nf.powi(w.dim as i32))
}
