use crate::error::{Error, Result};
use crate::exactnum::{to_f64, Rational};

use super::ast::{Bump, Expr, Node};
use super::jet::eval_jet;
use super::parser::parse_expr;
use super::poly::Poly;

/// Ball outside of which the function is (numerically) zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Support {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothFn {
    nvars: usize,
    expr: Expr,
    compiled: Node,
    support: Option<Support>,
}

/// A ball outside which `expr` vanishes: a bump, or a product or quotient
/// whose first vanishing factor is a bump.
fn inferred_support(expr: &Expr) -> Option<Support> {
    match expr {
        Expr::Bump(b) => Some(Support { center: b.center.iter().map(to_f64).collect(), radius: to_f64(&b.radius) }),
        Expr::Mul(a, b) => inferred_support(a).or_else(|| inferred_support(b)),
        Expr::Div(a, _) | Expr::Neg(a) => inferred_support(a),
        Expr::Pow(a, k) if *k > 0 => inferred_support(a),
        _ => None,
    }
}

impl SmoothFn {
    pub fn new(nvars: usize, expr: Expr) -> Result<Self> {
        if expr.arity() > nvars {
            return Err(Error::invalid(format!(
                "expression uses x{} but only {nvars} variables are declared",
                expr.arity()
            )));
        }
        let support = inferred_support(&expr);
        Ok(SmoothFn { nvars, compiled: Node::compile(&expr), expr, support })
    }

    /// Radial bump of radius `r` centred at `center` (the origin if empty).
    pub fn bump(nvars: usize, radius: Rational, center: Vec<Rational>) -> Result<Self> {
        let center = if center.is_empty() { vec![Rational::default(); nvars] } else { center };
        if center.len() != nvars {
            return Err(Error::invalid("bump centre has the wrong dimension"));
        }
        Self::new(nvars, Expr::Bump(Bump::new(radius, center)?))
    }

    pub fn from_poly(p: &Poly) -> Self {
        let expr = Expr::from_poly(p);
        SmoothFn { nvars: p.nvars(), compiled: Node::compile(&expr), expr, support: None }
    }

    pub fn with_support(mut self, support: Support) -> Result<Self> {
        if support.center.len() != self.nvars || support.radius <= 0.0 {
            return Err(Error::invalid("invalid support declaration"));
        }
        self.support = Some(support);
        Ok(self)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn support(&self) -> Option<&Support> {
        self.support.as_ref()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        debug_assert_eq!(x.len(), self.nvars);
        self.compiled.eval(x)
    }

    /// True derivatives `f, f', ..., f^{(order)}` of `t -> f(p + t d)` at 0.
    pub fn taylor_line(&self, p: &[f64], d: &[f64], order: usize) -> Result<Vec<f64>> {
        assert_eq!(p.len(), self.nvars);
        assert_eq!(d.len(), self.nvars);
        Ok(eval_jet(&self.expr, p, d, order)?.derivatives())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Integrand {
    Poly(Poly),
    Smooth(SmoothFn),
}

impl Integrand {
    pub fn nvars(&self) -> usize {
        match self {
            Integrand::Poly(p) => p.nvars(),
            Integrand::Smooth(f) => f.nvars(),
        }
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        match self {
            Integrand::Poly(p) => Some(p),
            Integrand::Smooth(_) => None,
        }
    }

    pub fn to_smooth(&self) -> SmoothFn {
        match self {
            Integrand::Poly(p) => SmoothFn::from_poly(p),
            Integrand::Smooth(f) => f.clone(),
        }
    }

    pub fn eval_f64(&self, x: &[f64]) -> Result<f64> {
        match self {
            Integrand::Poly(p) => Ok(p.eval_f64(x)),
            Integrand::Smooth(f) => f.eval(x),
        }
    }

    pub fn eval_exact(&self, x: &[Rational]) -> Option<Rational> {
        self.as_poly().map(|p| p.eval(x))
    }

    pub fn support(&self) -> Option<&Support> {
        match self {
            Integrand::Poly(_) => None,
            Integrand::Smooth(f) => f.support(),
        }
    }
}

impl From<Poly> for Integrand {
    fn from(p: Poly) -> Self {
        Integrand::Poly(p)
    }
}

impl From<SmoothFn> for Integrand {
    fn from(f: SmoothFn) -> Self {
        Integrand::Smooth(f)
    }
}

/// Parses and classifies: polynomial when only ring operations, division by
/// constants and nonnegative powers occur.
pub fn parse(src: &str, nvars: usize) -> Result<Integrand> {
    let e = parse_expr(src, nvars)?;
    match e.to_poly(nvars) {
        Some(p) => Ok(Integrand::Poly(p)),
        None => Ok(Integrand::Smooth(SmoothFn::new(nvars, e)?)),
    }
}
