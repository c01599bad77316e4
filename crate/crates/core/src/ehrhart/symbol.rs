use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::emcore::{
    em_expansion_simple, lattice_sum_exact, ExpansionOptions, ExpansionSeries, KahanSum, SeriesVariable, SumValue,
};
use crate::error::{Error, Result};
use crate::exactnum::{to_f64, Rational};
use crate::expr::{FnSpec, Integrand, SmoothFn};
use crate::polytope::HPolytope;

/// A homogeneous component `f_j` of degree `j` in the `n + 1` cone variables.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolComponent {
    pub degree: i32,
    pub f: Integrand,
}

/// Finite sum of homogeneous components, ordered by decreasing degree.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyhomSymbol {
    nvars: usize,
    components: Vec<SymbolComponent>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub degree: i32,
    #[serde(rename = "fn")]
    pub f: FnSpec,
}

/// `{"components": [{"degree": 1, "fn": <function spec>}, ...]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolSpec {
    pub components: Vec<ComponentSpec>,
}

impl PolyhomSymbol {
    /// `nvars` counts the cone variable `x_{n+1}`.
    pub fn new(nvars: usize, mut components: Vec<SymbolComponent>) -> Result<Self> {
        if nvars < 2 || components.is_empty() {
            return Err(Error::invalid("a symbol needs at least one component in n + 1 ≥ 2 variables"));
        }
        if components.iter().any(|c| c.f.nvars() != nvars) {
            return Err(Error::invalid("symbol components must all use n + 1 variables"));
        }
        components.sort_by_key(|c| std::cmp::Reverse(c.degree));
        if components.windows(2).any(|w| w[0].degree == w[1].degree) {
            return Err(Error::invalid("symbol components must have distinct degrees"));
        }
        Ok(PolyhomSymbol { nvars, components })
    }

    pub fn single(nvars: usize, degree: i32, f: Integrand) -> Result<Self> {
        Self::new(nvars, vec![SymbolComponent { degree, f }])
    }

    pub fn from_spec(spec: &SymbolSpec, nvars: usize) -> Result<Self> {
        let comps = spec
            .components
            .iter()
            .map(|c| Ok(SymbolComponent { degree: c.degree, f: c.f.to_integrand(nvars)? }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(nvars, comps)
    }

    pub fn from_json(text: &str, nvars: usize) -> Result<Self> {
        let spec: SymbolSpec = serde_json::from_str(text).map_err(|e| Error::invalid(format!("symbol spec: {e}")))?;
        Self::from_spec(&spec, nvars)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn components(&self) -> &[SymbolComponent] {
        &self.components
    }

    pub fn top_degree(&self) -> i32 {
        self.components[0].degree
    }

    /// `r` with components given down to degree `d - r`.
    pub fn truncation_depth(&self) -> i32 {
        self.top_degree() - self.components.last().map_or(self.top_degree(), |c| c.degree)
    }

    pub fn is_polynomial(&self) -> bool {
        self.components.iter().all(|c| c.f.as_poly().is_some())
    }

    pub fn eval_f64(&self, x: &[f64]) -> Result<f64> {
        self.components.iter().map(|c| c.f.eval_f64(x)).sum()
    }

    /// Samples points `t·(y, 1)` of the cone over `Δ` and checks
    /// `|f_j(sx) - s^j f_j(x)| < 1e-8 |s^j f_j(x)|` for `s ∈ {2, 3}`.
    pub fn check_homogeneity(&self, p: &HPolytope) -> Result<()> {
        if p.dim() + 1 != self.nvars {
            return Err(Error::invalid("symbol and polytope dimensions differ"));
        }
        let verts: Vec<Vec<f64>> = p.vertices().iter().map(|v| v.coords.iter().map(to_f64).collect()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for comp in &self.components {
            for _ in 0..16 {
                let w: Vec<f64> = (0..verts.len()).map(|_| rng.random_range(0.05..1.0)).collect();
                let total: f64 = w.iter().sum();
                let t = rng.random_range(0.5..2.0);
                let mut x: Vec<f64> = (0..p.dim())
                    .map(|i| t * verts.iter().zip(&w).map(|(v, wi)| v[i] * wi).sum::<f64>() / total)
                    .collect();
                x.push(t);
                let fx = comp.f.eval_f64(&x)?;
                for s in [2.0, 3.0] {
                    let sx: Vec<f64> = x.iter().map(|v| v * s).collect();
                    let want = f64::powi(s, comp.degree) * fx;
                    let got = comp.f.eval_f64(&sx)?;
                    if want == 0.0 && got == 0.0 {
                        continue;
                    }
                    if (got - want).abs() >= 1e-8 * want.abs() {
                        return Err(Error::NotHomogeneous { degree: comp.degree });
                    }
                }
            }
        }
        Ok(())
    }

    /// `f̃_j(x) = f_j(x, 1)` for each component, in `n` variables.
    pub fn dehomogenized(&self) -> Result<Vec<(i32, Integrand)>> {
        let n = self.nvars - 1;
        let one = Rational::from_integer(BigInt::from(1));
        self.components
            .iter()
            .map(|c| {
                let g = match &c.f {
                    Integrand::Poly(q) => Integrand::Poly(q.fix_var(n, &one)),
                    Integrand::Smooth(s) => Integrand::Smooth(SmoothFn::new(n, s.expr().fix_var(n, &one)?)?),
                };
                Ok((c.degree, g))
            })
            .collect()
    }
}

/// `Σ_{k ∈ NΔ ∩ Z^n} f(k, N)`: exact when every component is a polynomial.
pub fn ehrhart_sum(sym: &PolyhomSymbol, p: &HPolytope, n: u64) -> Result<SumValue> {
    if p.dim() + 1 != sym.nvars {
        return Err(Error::invalid("symbol and polytope dimensions differ"));
    }
    let big_n = Rational::from_integer(BigInt::from(n));
    if sym.is_polynomial() {
        let mut total = Rational::default();
        for c in &sym.components {
            let q = c.f.as_poly().expect("polynomial symbol");
            total += lattice_sum_exact(p, &q.fix_var(p.dim(), &big_n), n);
        }
        return Ok(SumValue::Exact(total));
    }
    let points: Vec<Vec<i64>> = p.lattice_points(n).collect();
    let partial: Vec<f64> = points
        .par_chunks(4096)
        .map(|chunk| {
            let mut acc = KahanSum::new();
            let mut x = vec![0.0; sym.nvars];
            x[sym.nvars - 1] = n as f64;
            for k in chunk {
                for (xi, &ki) in x.iter_mut().zip(k) {
                    *xi = ki as f64;
                }
                acc.add(sym.eval_f64(&x)?);
            }
            Ok(acc.value())
        })
        .collect::<Result<_>>()?;
    Ok(SumValue::Float(partial.into_iter().collect::<KahanSum>().value()))
}

/// `Σ_j f_j` expanded as `Σ_p c_p N^p`: component `j` contributes its
/// Riemann-sum coefficient of `N^{-m}` to the power `p = j + n - m`.
pub fn symbol_expansion(sym: &PolyhomSymbol, p: &HPolytope, opts: &ExpansionOptions) -> Result<ExpansionSeries> {
    sym.check_homogeneity(p)?;
    let n = p.dim() as i64;
    let parts: Vec<(i32, ExpansionSeries)> = sym
        .dehomogenized()?
        .into_par_iter()
        .map(|(j, g)| Ok((j, em_expansion_simple(p, &g, opts)?)))
        .collect::<Result<_>>()?;
    let backend = parts[0].1.backend;
    let mut out =
        ExpansionSeries::new(backend, SeriesVariable::N, opts.order).with_period(parts[0].1.period, parts[0].1.residue);
    for (j, s) in &parts {
        if s.backend != backend {
            out.backend = crate::emcore::Backend::Numeric;
        }
        for (m, c) in s.terms() {
            out.accumulate(*j as i64 + n - m, c.clone());
        }
    }
    Ok(out)
}
