//! Polytope expansions `Σ_F Σ_{γ∈Γ_F^♯} τ_γ(∂_h/N) I(h)|_{h=0}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::{
    factorial, frac, lcm, todd_rational, twisted_todd_coeffs, twisted_todd_coeffs_mod, CycloElem, Rational,
};
use crate::expr::{Integrand, Poly, SmoothFn};
use crate::polytope::{FaceData, HPolytope};
use crate::quad::{h_derivatives_numeric, integrate_poly_symbolic, multi_indices, FdOptions, QuadOptions};

use super::series::{Backend, ExpansionSeries};

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionOptions {
    /// Truncation order `M`.
    pub order: usize,
    /// `None` picks exact for polynomials and numeric otherwise.
    pub backend: Option<Backend>,
    pub quad: QuadOptions,
    pub fd: FdOptions,
    /// Class of `N` modulo the period of the face phases; irrelevant for
    /// lattice polytopes.
    pub residue: u64,
}

impl Default for ExpansionOptions {
    fn default() -> Self {
        ExpansionOptions { order: 4, backend: None, quad: QuadOptions::default(), fd: FdOptions::default(), residue: 0 }
    }
}

impl ExpansionOptions {
    pub fn with_order(order: usize) -> Self {
        ExpansionOptions { order, ..Self::default() }
    }

    pub fn at_residue(mut self, residue: u64) -> Self {
        self.residue = residue;
        self
    }

    pub fn numeric(mut self) -> Self {
        self.backend = Some(Backend::Numeric);
        self
    }

    fn resolve(&self, f: &Integrand) -> Result<Backend> {
        match (self.backend, f) {
            (None, Integrand::Poly(_)) => Ok(Backend::Exact),
            (None, Integrand::Smooth(_)) => Ok(Backend::Numeric),
            (Some(Backend::Exact), Integrand::Smooth(_)) => {
                Err(Error::invalid("the exact backend needs a polynomial integrand"))
            }
            (Some(b), _) => Ok(b),
        }
    }
}

/// One product `e^{-2πi N φ} Π_i τ_{ω_i}(s_i)` over the facet variables;
/// `twists[i] = r_i` with `ω_i = e^{2πi r_i}`, and `r_i = 0` means the
/// untwisted factor. The phase `φ = Σ_{i∈F} c_i r_i mod 1` vanishes when the
/// face contains lattice points.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorTerm {
    pub face: Vec<usize>,
    pub element: usize,
    pub twists: Vec<Rational>,
    pub phase: Rational,
}

impl OperatorTerm {
    /// `e^{-2πi N φ}` as an exponent `k` of `ζ_q`.
    fn phase_index(&self, q: usize, dilation: u64) -> i64 {
        let k = &self.phase * Rational::from_integer(BigInt::from(q as u64 * dilation));
        let k = k.to_integer() % BigInt::from(q as u64);
        let k = k.to_i64().expect("phase index fits in i64");
        (-k).rem_euclid(q as i64)
    }
}

/// Sum of product Todd operators in the facet variables `h_1..h_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct ToddOperator {
    pub nvars: usize,
    pub terms: Vec<OperatorTerm>,
}

impl ToddOperator {
    /// The single untwisted product `τ(s_1)⋯τ(s_d)`.
    pub fn untwisted(d: usize) -> Self {
        ToddOperator {
            nvars: d,
            terms: vec![OperatorTerm {
                face: Vec::new(),
                element: 0,
                twists: vec![Rational::zero(); d],
                phase: Rational::zero(),
            }],
        }
    }

    /// One term per face `F` and `γ ∈ Γ_F^♯`, twisted by `ω_i(γ)` on the
    /// variables of `F`.
    pub fn from_faces(faces: &[FaceData], p: &HPolytope) -> Self {
        let offsets: Vec<i64> = p.facets().iter().map(|f| f.c).collect();
        Self::from_faces_with_offsets(faces, &offsets)
    }

    /// Same for constraints `⟨u_i, x⟩ ≤ c_i` given only by their offsets.
    pub fn from_faces_with_offsets(faces: &[FaceData], offsets: &[i64]) -> Self {
        let d = offsets.len();
        let mut terms = Vec::new();
        for face in faces {
            for &g in &face.starred {
                let el = &face.torsion.elements[g];
                let mut twists = vec![Rational::zero(); d];
                let mut phase = Rational::zero();
                for (l, &i) in face.facets.iter().enumerate() {
                    twists[i] = frac(&el.pairings[l]);
                    phase += &twists[i] * Rational::from_integer(offsets[i].into());
                }
                terms.push(OperatorTerm { face: face.facets.clone(), element: g, twists, phase: frac(&phase) });
            }
        }
        ToddOperator { nvars: d, terms }
    }

    /// Least common denominator of all twists.
    pub fn modulus(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|t| t.twists.iter())
            .map(|r| r.denom().to_u64().expect("twist denominator fits in u64"))
            .fold(1, lcm) as usize
    }

    /// Period in `N` of the face phases.
    pub fn period(&self) -> u64 {
        self.terms.iter().map(|t| t.phase.denom().to_u64().expect("phase denominator fits in u64")).fold(1, lcm)
    }

    /// Distinct twists per variable, including 0.
    fn distinct_twists(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self.terms.iter().flat_map(|t| t.twists.iter().cloned()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Default coefficient tables in `Q[Z/q]`, `q` the operator modulus.
    pub fn exact_tables(&self, order: usize) -> Result<BTreeMap<Rational, Vec<CycloElem>>> {
        let q = self.modulus();
        let plain: Vec<CycloElem> = todd_rational(order).into_iter().map(|t| CycloElem::scalar(q, t)).collect();
        self.distinct_twists()
            .into_iter()
            .map(|r| {
                let table =
                    if r.is_zero() { plain.clone() } else { twisted_todd_coeffs_mod(&r, q, order)?.coeffs().to_vec() };
                Ok((r, table))
            })
            .collect()
    }

    pub fn numeric_tables(&self, order: usize) -> Result<BTreeMap<Rational, Vec<Complex64>>> {
        let plain: Vec<Complex64> =
            todd_rational(order).iter().map(|t| Complex64::new(crate::exactnum::to_f64(t), 0.0)).collect();
        self.distinct_twists()
            .into_iter()
            .map(|r| {
                let table = if r.is_zero() { plain.clone() } else { twisted_todd_coeffs(&r, order)?.numeric() };
                Ok((r, table))
            })
            .collect()
    }
}

/// `∂^a I(0) = a!·coef_a` for the monomials of `I` with `|a| ≤ order`.
pub fn exact_derivatives(ih: &Poly, order: usize) -> Vec<(Vec<u32>, Rational)> {
    ih.terms()
        .filter(|(a, _)| a.iter().sum::<u32>() as usize <= order)
        .map(|(a, c)| {
            let fact: BigInt = a.iter().map(|&k| factorial(k)).product();
            (a.clone(), c * Rational::from_integer(fact))
        })
        .collect()
}

/// `c_j = Σ_terms Σ_{|a|=j} Π_i T^{(i)}_{a_i} ∂^a I(0)` in the group algebra,
/// followed by the reality check on each `c_j`. `table(i, r)` supplies the
/// coefficients used for variable `i` under twist `r`.
pub fn apply_operator_exact<T>(
    op: &ToddOperator,
    derivs: &[(Vec<u32>, Rational)],
    order: usize,
    dilation: u64,
    table: T,
) -> Result<Vec<Rational>>
where
    T: Fn(usize, &Rational) -> Vec<CycloElem> + Sync,
{
    let q = op.modulus();
    let per_term: Vec<Vec<CycloElem>> = op
        .terms
        .par_iter()
        .map(|term| {
            let tabs: Vec<Vec<CycloElem>> = term.twists.iter().enumerate().map(|(i, r)| table(i, r)).collect();
            let mut acc = vec![CycloElem::zero(q); order + 1];
            for (a, d) in derivs {
                let j = a.iter().sum::<u32>() as usize;
                let mut prod = CycloElem::scalar(q, d.clone());
                for (i, &ai) in a.iter().enumerate() {
                    prod = &prod * &tabs[i][ai as usize];
                    if prod.is_zero() {
                        break;
                    }
                }
                acc[j] += &prod;
            }
            let k = term.phase_index(q, dilation);
            if k != 0 {
                let w = CycloElem::root(q, k);
                acc = acc.iter().map(|a| a * &w).collect();
            }
            acc
        })
        .collect();
    let mut total = vec![CycloElem::zero(q); order + 1];
    for acc in per_term {
        for (t, a) in total.iter_mut().zip(acc) {
            *t += &a;
        }
    }
    total
        .iter()
        .enumerate()
        .map(|(j, c)| {
            c.primitive_rational()
                .ok_or_else(|| Error::NotReal { power: j as i32, imag: c.project_primitive().numeric_eval().im })
        })
        .collect()
}

/// Floating-point counterpart of [`apply_operator_exact`]; coefficients
/// with `|Im| ≥ 1e-10` are rejected.
pub fn apply_operator_numeric<T>(
    op: &ToddOperator,
    derivs: &BTreeMap<Vec<u32>, f64>,
    order: usize,
    dilation: u64,
    table: T,
) -> Result<Vec<f64>>
where
    T: Fn(usize, &Rational) -> Vec<Complex64> + Sync,
{
    let per_term: Vec<Vec<Complex64>> = op
        .terms
        .par_iter()
        .map(|term| {
            let tabs: Vec<Vec<Complex64>> = term.twists.iter().enumerate().map(|(i, r)| table(i, r)).collect();
            let mut acc = vec![Complex64::zero(); order + 1];
            for (a, d) in derivs {
                let j = a.iter().sum::<u32>() as usize;
                if j > order {
                    continue;
                }
                let prod = a.iter().enumerate().fold(Complex64::new(*d, 0.0), |p, (i, &ai)| p * tabs[i][ai as usize]);
                acc[j] += prod;
            }
            let q = op.modulus();
            let k = term.phase_index(q, dilation);
            if k != 0 {
                let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / q as f64);
                acc.iter_mut().for_each(|a| *a *= w);
            }
            acc
        })
        .collect();
    let mut total = vec![Complex64::zero(); order + 1];
    for acc in per_term {
        for (t, a) in total.iter_mut().zip(acc) {
            *t += a;
        }
    }
    total
        .iter()
        .enumerate()
        .map(|(j, c)| if c.im.abs() < 1e-10 { Ok(c.re) } else { Err(Error::NotReal { power: j as i32, imag: c.im }) })
        .collect()
}

/// Facets whose hyperplane stays clear of the declared support for every
/// shift a finite-difference stencil of order `≤ m` can use. `I(h)` does not
/// depend on those `h_i`, so their derivatives are exactly zero.
pub fn inert_facets(p: &HPolytope, f: &SmoothFn, m: usize, fd: &FdOptions) -> Vec<bool> {
    let Some(support) = f.support() else {
        return vec![false; p.num_facets()];
    };
    let widen = (m as u32).saturating_sub(fd.widen_above);
    let reach = crate::exactnum::to_f64(&fd.step) * f64::powi(2.0, widen as i32) * m as f64 / 2.0;
    p.facets()
        .iter()
        .map(|facet| {
            let norm = facet.u.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
            let dot: f64 = facet.u.iter().zip(&support.center).map(|(&a, b)| a as f64 * b).sum();
            (dot - facet.c as f64).abs() > support.radius * norm + reach
        })
        .collect()
}

fn run(op: &ToddOperator, p: &HPolytope, f: &Integrand, opts: &ExpansionOptions) -> Result<ExpansionSeries> {
    if f.nvars() != p.dim() {
        return Err(Error::invalid(format!(
            "function has {} variables but the polytope has dimension {}",
            f.nvars(),
            p.dim()
        )));
    }
    let m = opts.order;
    match opts.resolve(f)? {
        Backend::Exact => {
            let poly = f.as_poly().expect("resolved exact backend has a polynomial");
            let ih = integrate_poly_symbolic(poly, p)?;
            let derivs = exact_derivatives(&ih, m);
            let tables = op.exact_tables(m)?;
            let c = apply_operator_exact(op, &derivs, m, opts.residue, |_, r| tables[r].clone())?;
            Ok(ExpansionSeries::from_exact(m, c).with_period(op.period(), opts.residue))
        }
        Backend::Numeric => {
            let smooth: SmoothFn = f.to_smooth();
            let inert = inert_facets(p, &smooth, m, &opts.fd);
            let indices: Vec<Vec<u32>> = multi_indices(p.num_facets(), m as u32)
                .into_iter()
                .filter(|a| a.iter().zip(&inert).all(|(&k, &skip)| k == 0 || !skip))
                .collect();
            let derivs = h_derivatives_numeric(&smooth, p, &indices, &opts.quad, &opts.fd)?;
            let tables = op.numeric_tables(m)?;
            let c = apply_operator_numeric(op, &derivs, m, opts.residue, |_, r| tables[r].clone())?;
            Ok(ExpansionSeries::from_numeric(m, c).with_period(op.period(), opts.residue))
        }
    }
}

/// Expansion for a regular polytope with the untwisted product operator.
pub fn em_expansion_regular(p: &HPolytope, f: &Integrand, opts: &ExpansionOptions) -> Result<ExpansionSeries> {
    if !p.is_regular()? {
        return Err(Error::NonRegular);
    }
    run(&ToddOperator::untwisted(p.num_facets()), p, f, opts)
}

/// Expansion for a simple polytope: sum over faces and `Γ_F^♯`.
pub fn em_expansion_simple(p: &HPolytope, f: &Integrand, opts: &ExpansionOptions) -> Result<ExpansionSeries> {
    em_expansion_simple_with_faces(p, &p.faces()?, f, opts)
}

/// As [`em_expansion_simple`] with precomputed face data (for instance with
/// other complement choices).
pub fn em_expansion_simple_with_faces(
    p: &HPolytope,
    faces: &[FaceData],
    f: &Integrand,
    opts: &ExpansionOptions,
) -> Result<ExpansionSeries> {
    run(&ToddOperator::from_faces(faces, p), p, f, opts)
}

#[cfg(test)]
mod tests;
