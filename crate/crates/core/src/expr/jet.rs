//! Truncated Taylor arithmetic. A jet stores `c_k = f^{(k)}(0) / k!` for
//! `k = 0..=order` along a line `t -> p + t d`.

use crate::error::{Error, Result};
use crate::exactnum::to_f64;

use super::ast::{Bump, Expr, Func};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet(pub Vec<f64>);

impl Jet {
    pub fn constant(c: f64, order: usize) -> Jet {
        let mut v = vec![0.0; order + 1];
        v[0] = c;
        Jet(v)
    }

    pub fn line(p: f64, d: f64, order: usize) -> Jet {
        let mut j = Jet::constant(p, order);
        if order >= 1 {
            j.0[1] = d;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    pub fn add(&self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Jet {
        Jet(self.0.iter().map(|a| -a).collect())
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let n = self.0.len();
        Jet((0..n).map(|k| (0..=k).map(|j| self.0[j] * o.0[k - j]).sum()).collect())
    }

    pub fn div(&self, o: &Jet) -> Result<Jet> {
        let b0 = o.0[0];
        if b0 == 0.0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.0.len();
        let mut q = vec![0.0; n];
        for k in 0..n {
            let s: f64 = (1..=k).map(|j| o.0[j] * q[k - j]).sum();
            q[k] = (self.0[k] - s) / b0;
        }
        Ok(Jet(q))
    }

    pub fn powi(&self, k: i32) -> Result<Jet> {
        let mut out = Jet::constant(1.0, self.order());
        let mut base = self.clone();
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        if k < 0 {
            Jet::constant(1.0, self.order()).div(&out)
        } else {
            Ok(out)
        }
    }

    pub fn exp(&self) -> Jet {
        let n = self.0.len();
        let mut e = vec![0.0; n];
        e[0] = self.0[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * self.0[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Jet(e)
    }

    /// `(sin, cos)` of the jet.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.0.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        s[0] = self.0[0].sin();
        c[0] = self.0[0].cos();
        for k in 1..n {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                let w = j as f64 * self.0[j];
                ss += w * c[k - j];
                cc += w * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = -cc / k as f64;
        }
        (Jet(s), Jet(c))
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let a0 = self.0[0];
        if a0 < 0.0 {
            return Err(Error::invalid(format!("sqrt of negative value {a0}")));
        }
        if a0 == 0.0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.0.len();
        let mut r = vec![0.0; n];
        r[0] = a0.sqrt();
        for k in 1..n {
            let s: f64 = (1..k).map(|j| r[j] * r[k - j]).sum();
            r[k] = (self.0[k] - s) / (2.0 * r[0]);
        }
        Ok(Jet(r))
    }

    /// Derivatives `f^{(k)}(0)`.
    pub fn derivatives(&self) -> Vec<f64> {
        let mut fact = 1.0;
        self.0
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    fact *= k as f64;
                }
                c * fact
            })
            .collect()
    }
}

fn bump_jet(b: &Bump, p: &[f64], d: &[f64], order: usize) -> Result<Jet> {
    let r = to_f64(&b.radius);
    let mut rho = Jet::constant(0.0, order);
    for ((pi, di), ci) in p.iter().zip(d).zip(&b.center) {
        let l = Jet::line(pi - to_f64(ci), *di, order);
        rho = rho.add(&l.mul(&l));
    }
    let rho = Jet(rho.0.iter().map(|v| v / (r * r)).collect());
    let u = Jet::constant(1.0, order).sub(&rho);
    if u.value() <= 0.0 {
        // outside the open ball the bump and all its derivatives vanish
        return Ok(Jet::constant(0.0, order));
    }
    Ok(Jet::constant(-1.0, order).div(&u)?.exp())
}

/// Propagates a jet through the tree along `t -> p + t d`.
pub fn eval_jet(e: &Expr, p: &[f64], d: &[f64], order: usize) -> Result<Jet> {
    Ok(match e {
        Expr::Const(c) => Jet::constant(to_f64(c), order),
        Expr::Var(i) => Jet::line(p[*i], d[*i], order),
        Expr::Neg(a) => eval_jet(a, p, d, order)?.neg(),
        Expr::Add(a, b) => eval_jet(a, p, d, order)?.add(&eval_jet(b, p, d, order)?),
        Expr::Sub(a, b) => eval_jet(a, p, d, order)?.sub(&eval_jet(b, p, d, order)?),
        Expr::Mul(a, b) => eval_jet(a, p, d, order)?.mul(&eval_jet(b, p, d, order)?),
        Expr::Div(a, b) => eval_jet(a, p, d, order)?.div(&eval_jet(b, p, d, order)?)?,
        Expr::Pow(a, k) => eval_jet(a, p, d, order)?.powi(*k)?,
        Expr::Call(f, a) => {
            let j = eval_jet(a, p, d, order)?;
            match f {
                Func::Exp => j.exp(),
                Func::Sin => j.sin_cos().0,
                Func::Cos => j.sin_cos().1,
                Func::Sqrt => j.sqrt()?,
            }
        }
        Expr::Bump(b) => bump_jet(b, p, d, order)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_inverts_multiplication() {
        let a = Jet(vec![2.0, -1.0, 0.5, 3.0]);
        let b = Jet(vec![1.5, 0.25, -2.0, 1.0]);
        let q = a.mul(&b).div(&b).unwrap();
        for (x, y) in q.0.iter().zip(&a.0) {
            assert!((x - y).abs() < 1e-14);
        }
        assert_eq!(a.div(&Jet(vec![0.0, 1.0, 0.0, 0.0])), Err(Error::DivisionByZero));
    }

    #[test]
    fn sqrt_squares_back() {
        let a = Jet(vec![4.0, 1.0, -0.5, 2.0, 0.1]);
        let r = a.sqrt().unwrap();
        for (x, y) in r.mul(&r).0.iter().zip(&a.0) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn sin_cos_identity() {
        let a = Jet(vec![0.3, 1.2, -0.7, 0.4, 0.9]);
        let (s, c) = a.sin_cos();
        let one = s.mul(&s).add(&c.mul(&c));
        assert!((one.0[0] - 1.0).abs() < 1e-15);
        assert!(one.0[1..].iter().all(|v| v.abs() < 1e-14));
    }
}
