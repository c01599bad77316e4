use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{format_rational, parse_rational, Rational};

use super::func::{parse, Integrand, SmoothFn, Support};
use super::poly::Poly;

/// A number given either as a JSON number or as a string such as `"3/2"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            Number::Int(n) => Ok(Rational::from_integer((*n).into())),
            Number::Float(x) => {
                Rational::from_float(*x).ok_or_else(|| Error::invalid(format!("not a finite number: {x}")))
            }
            Number::Text(s) => parse_rational(s),
        }
    }
}

impl From<&Rational> for Number {
    fn from(r: &Rational) -> Self {
        Number::Text(format_rational(r))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub coef: Number,
    pub exps: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportSpec {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// JSON description of an integrand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FnSpec {
    Expr {
        src: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        support: Option<SupportSpec>,
    },
    Poly {
        terms: Vec<TermSpec>,
    },
    Builtin {
        name: String,
        r: Number,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<Number>>,
    },
}

impl FnSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("function spec: {e}")))
    }

    pub fn to_integrand(&self, nvars: usize) -> Result<Integrand> {
        match self {
            FnSpec::Expr { src, support } => {
                let f = parse(src, nvars)?;
                match (f, support) {
                    (f, None) => Ok(f),
                    (f, Some(s)) => Ok(Integrand::Smooth(
                        f.to_smooth().with_support(Support { center: s.center.clone(), radius: s.radius })?,
                    )),
                }
            }
            FnSpec::Poly { terms } => {
                let mut p = Poly::zero(nvars);
                for t in terms {
                    if t.exps.len() != nvars {
                        return Err(Error::invalid(format!(
                            "term exponent vector has length {}, expected {nvars}",
                            t.exps.len()
                        )));
                    }
                    p.add_term(t.exps.clone(), t.coef.to_rational()?);
                }
                Ok(Integrand::Poly(p))
            }
            FnSpec::Builtin { name, r, center } => {
                if name != "bump" {
                    return Err(Error::invalid(format!("unknown builtin `{name}`")));
                }
                let center = match center {
                    Some(c) => c.iter().map(Number::to_rational).collect::<Result<Vec<_>>>()?,
                    None => Vec::new(),
                };
                Ok(Integrand::Smooth(SmoothFn::bump(nvars, r.to_rational()?, center)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    #[test]
    fn json_forms() {
        let p = FnSpec::from_json(r#"{"kind":"poly","terms":[{"coef":"3/2","exps":[2,0]},{"coef":1,"exps":[0,1]}]}"#)
            .unwrap()
            .to_integrand(2)
            .unwrap();
        let want = Poly::from_terms(2, [(vec![2, 0], rat(3, 2)), (vec![0, 1], int(1))]);
        assert_eq!(p, Integrand::Poly(want));

        let e = FnSpec::from_json(r#"{"kind":"expr","src":"x1*x2 + 1"}"#).unwrap();
        assert!(matches!(e.to_integrand(2).unwrap(), Integrand::Poly(_)));

        let b = FnSpec::from_json(r#"{"kind":"builtin","name":"bump","r":1}"#).unwrap();
        let f = b.to_integrand(2).unwrap();
        assert_eq!(f.support().unwrap().center, vec![0.0, 0.0]);

        let b = FnSpec::from_json(r#"{"kind":"builtin","name":"bump","r":"1/2","center":["1/2",0.5]}"#).unwrap();
        let f = b.to_integrand(2).unwrap();
        assert_eq!(f.eval_f64(&[0.5, 0.5]).unwrap(), (-1.0f64).exp());

        assert!(FnSpec::from_json(r#"{"kind":"builtin","name":"gauss","r":1}"#).unwrap().to_integrand(1).is_err());
        assert!(FnSpec::from_json(r#"{"kind":"nope"}"#).is_err());
    }

    #[test]
    fn serializes_back() {
        let s = FnSpec::Builtin { name: "bump".into(), r: Number::Text("1/2".into()), center: None };
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"kind":"builtin","name":"bump","r":"1/2"}"#);
        assert_eq!(FnSpec::from_json(&text).unwrap(), s);
    }
}
