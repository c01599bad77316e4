use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{format_rational, to_f64, Rational};

use super::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }

    pub fn apply(self, x: f64) -> Result<f64> {
        Ok(match self {
            Func::Exp => x.exp(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Sqrt => {
                if x < 0.0 {
                    return Err(Error::invalid(format!("sqrt of negative value {x}")));
                }
                x.sqrt()
            }
        })
    }
}

/// Radial bump `exp(-1/(1 - |x - c|^2 / r^2))` inside the ball, zero outside.
#[derive(Clone, Debug, PartialEq)]
pub struct Bump {
    pub radius: Rational,
    pub center: Vec<Rational>,
}

impl Bump {
    pub fn new(radius: Rational, center: Vec<Rational>) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::invalid("bump radius must be positive"));
        }
        Ok(Bump { radius, center })
    }

    /// `|x - c|^2 / r^2`
    pub fn rho(&self, x: &[f64]) -> f64 {
        let r = to_f64(&self.radius);
        let s: f64 = x.iter().zip(&self.center).map(|(xi, ci)| (xi - to_f64(ci)).powi(2)).sum();
        s / (r * r)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        profile(1.0 - self.rho(x))
    }
}

/// `exp(-1/u)` for `u > 0`, else 0.
pub(crate) fn profile(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

/// Expression tree over variables `x1..xn` (stored 0-based).
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Rational),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
    Bump(Bump),
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn constant(c: Rational) -> Expr {
        Expr::Const(c)
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, k: i32) -> Expr {
        Expr::Pow(Box::new(a), k)
    }

    /// Largest variable index used plus one.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.arity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.arity().max(b.arity()),
            Expr::Bump(b) => b.center.len(),
        }
    }

    /// Sets `x_{var+1} = value` and renumbers the later variables down by one.
    /// Bumps cannot be restricted this way.
    pub fn fix_var(&self, var: usize, value: &Rational) -> Result<Expr> {
        let bx = |e: &Expr| e.fix_var(var, value).map(Box::new);
        Ok(match self {
            Expr::Const(c) => Expr::Const(c.clone()),
            Expr::Var(i) if *i == var => Expr::Const(value.clone()),
            Expr::Var(i) => Expr::Var(if *i > var { i - 1 } else { *i }),
            Expr::Neg(a) => Expr::Neg(bx(a)?),
            Expr::Add(a, b) => Expr::Add(bx(a)?, bx(b)?),
            Expr::Sub(a, b) => Expr::Sub(bx(a)?, bx(b)?),
            Expr::Mul(a, b) => Expr::Mul(bx(a)?, bx(b)?),
            Expr::Div(a, b) => Expr::Div(bx(a)?, bx(b)?),
            Expr::Pow(a, k) => Expr::Pow(bx(a)?, *k),
            Expr::Call(f, a) => Expr::Call(*f, bx(a)?),
            Expr::Bump(_) => return Err(Error::invalid("cannot fix a variable of a bump")),
        })
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            Expr::Const(c) => to_f64(c),
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval(x)?,
            Expr::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Expr::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Expr::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Expr::Div(a, b) => {
                let d = b.eval(x)?;
                if d == 0.0 {
                    return Err(Error::DivisionByZero);
                }
                a.eval(x)? / d
            }
            Expr::Pow(a, k) => {
                let v = a.eval(x)?;
                if *k < 0 && v == 0.0 {
                    return Err(Error::DivisionByZero);
                }
                v.powi(*k)
            }
            Expr::Call(f, a) => f.apply(a.eval(x)?)?,
            Expr::Bump(b) => b.eval(x),
        })
    }

    /// Exact polynomial form, if the tree uses only ring operations,
    /// nonnegative powers and division by nonzero constants.
    pub fn to_poly(&self, nvars: usize) -> Option<Poly> {
        Some(match self {
            Expr::Const(c) => Poly::constant(nvars, c.clone()),
            Expr::Var(i) => {
                if *i >= nvars {
                    return None;
                }
                Poly::var(nvars, *i)
            }
            Expr::Neg(a) => -&a.to_poly(nvars)?,
            Expr::Add(a, b) => &a.to_poly(nvars)? + &b.to_poly(nvars)?,
            Expr::Sub(a, b) => &a.to_poly(nvars)? - &b.to_poly(nvars)?,
            Expr::Mul(a, b) => &a.to_poly(nvars)? * &b.to_poly(nvars)?,
            Expr::Div(a, b) => {
                let d = b.to_poly(nvars)?;
                if d.degree() > 0 || d.is_zero() {
                    return None;
                }
                let c = d.coefficient(&vec![0; nvars]);
                a.to_poly(nvars)?.scale(&(Rational::one() / c))
            }
            Expr::Pow(a, k) => {
                if *k < 0 {
                    return None;
                }
                a.to_poly(nvars)?.pow(*k as u32)
            }
            Expr::Call(..) | Expr::Bump(_) => return None,
        })
    }

    pub fn from_poly(p: &Poly) -> Expr {
        let mut acc: Option<Expr> = None;
        for (e, c) in p.terms() {
            let mut t = Expr::Const(c.clone());
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => t = Expr::mul(t, Expr::Var(i)),
                    _ => t = Expr::mul(t, Expr::pow(Expr::Var(i), k as i32)),
                }
            }
            acc = Some(match acc {
                None => t,
                Some(a) => Expr::add(a, t),
            });
        }
        acc.unwrap_or(Expr::Const(Rational::zero()))
    }

    fn is_atom(&self) -> bool {
        match self {
            Expr::Var(_) | Expr::Call(..) | Expr::Bump(_) => true,
            Expr::Const(c) => c.is_integer() && !c.is_negative(),
            _ => false,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_integer() && !c.is_negative() {
                    write!(f, "{}", c.numer())
                } else {
                    write!(f, "({})", format_rational(c))
                }
            }
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, k) => {
                if a.is_atom() {
                    write!(f, "{a}^{k}")
                } else {
                    write!(f, "({a})^{k}")
                }
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Bump(b) => {
                let c: Vec<String> = b.center.iter().map(format_rational).collect();
                write!(f, "bump[r={}, c=({})]", format_rational(&b.radius), c.join(", "))
            }
        }
    }
}

/// Float mirror of an [`Expr`] with constants converted once.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Node {
    Const(f64),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
    Call(Func, Box<Node>),
    Bump { inv_r2: f64, center: Vec<f64> },
}

impl Node {
    pub(crate) fn compile(e: &Expr) -> Node {
        let b = |e: &Expr| Box::new(Node::compile(e));
        match e {
            Expr::Const(c) => Node::Const(to_f64(c)),
            Expr::Var(i) => Node::Var(*i),
            Expr::Neg(a) => Node::Neg(b(a)),
            Expr::Add(x, y) => Node::Add(b(x), b(y)),
            Expr::Sub(x, y) => Node::Sub(b(x), b(y)),
            Expr::Mul(x, y) => Node::Mul(b(x), b(y)),
            Expr::Div(x, y) => Node::Div(b(x), b(y)),
            Expr::Pow(x, k) => Node::Pow(b(x), *k),
            Expr::Call(f, x) => Node::Call(*f, b(x)),
            Expr::Bump(bump) => {
                let r = to_f64(&bump.radius);
                Node::Bump { inv_r2: 1.0 / (r * r), center: bump.center.iter().map(to_f64).collect() }
            }
        }
    }

    pub(crate) fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            Node::Const(c) => *c,
            Node::Var(i) => x[*i],
            Node::Neg(a) => -a.eval(x)?,
            Node::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Node::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Node::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Node::Div(a, b) => {
                let d = b.eval(x)?;
                if d == 0.0 {
                    return Err(Error::DivisionByZero);
                }
                a.eval(x)? / d
            }
            Node::Pow(a, k) => {
                let v = a.eval(x)?;
                if *k < 0 && v == 0.0 {
                    return Err(Error::DivisionByZero);
                }
                v.powi(*k)
            }
            Node::Call(f, a) => f.apply(a.eval(x)?)?,
            Node::Bump { inv_r2, center } => {
                let s: f64 = x.iter().zip(center).map(|(xi, ci)| (xi - ci) * (xi - ci)).sum();
                profile(1.0 - s * inv_r2)
            }
        })
    }
}
