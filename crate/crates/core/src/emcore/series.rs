use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::exactnum::{format_rational, to_f64, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Numeric,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Numeric => "numeric",
        })
    }
}

/// A scalar that is either an exact rational or a double.
#[derive(Clone, Debug, PartialEq)]
pub enum SumValue {
    Exact(Rational),
    Float(f64),
}

impl SumValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            SumValue::Exact(r) => to_f64(r),
            SumValue::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            SumValue::Exact(r) => Some(r),
            SumValue::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SumValue::Exact(r) => r.is_zero(),
            SumValue::Float(x) => *x == 0.0,
        }
    }

    /// `|self - other|`, exact when both sides are.
    pub fn abs_diff(&self, other: &SumValue) -> SumValue {
        match (self, other) {
            (SumValue::Exact(a), SumValue::Exact(b)) => {
                let d = a - b;
                SumValue::Exact(if d < Rational::zero() { -d } else { d })
            }
            _ => SumValue::Float((self.to_f64() - other.to_f64()).abs()),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            SumValue::Exact(r) => serde_json::Value::String(format_rational(r)),
            SumValue::Float(x) => serde_json::json!(x),
        }
    }
}

impl fmt::Display for SumValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SumValue::Exact(r) => f.write_str(&format_rational(r)),
            SumValue::Float(x) => write!(f, "{x:?}"),
        }
    }
}

/// Which way the power index counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesVariable {
    /// Power `j` carries `N^{-j}`.
    InverseN,
    /// Power `p` carries `N^{p}`.
    N,
}

/// `Σ_j c_j N^{-j}` (or `Σ_p c_p N^p`), truncated at order `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionSeries {
    pub backend: Backend,
    pub variable: SeriesVariable,
    pub order: usize,
    /// The coefficients hold for `N ≡ residue (mod period)`; the period
    /// exceeds 1 only for polytopes with non-integral vertices.
    pub period: u64,
    pub residue: u64,
    terms: BTreeMap<i64, SumValue>,
}

impl ExpansionSeries {
    pub fn new(backend: Backend, variable: SeriesVariable, order: usize) -> Self {
        ExpansionSeries { backend, variable, order, period: 1, residue: 0, terms: BTreeMap::new() }
    }

    pub fn from_exact(order: usize, coeffs: Vec<Rational>) -> Self {
        let mut s = Self::new(Backend::Exact, SeriesVariable::InverseN, order);
        for (j, c) in coeffs.into_iter().enumerate() {
            s.set(j as i64, SumValue::Exact(c));
        }
        s
    }

    pub fn from_numeric(order: usize, coeffs: Vec<f64>) -> Self {
        let mut s = Self::new(Backend::Numeric, SeriesVariable::InverseN, order);
        for (j, c) in coeffs.into_iter().enumerate() {
            s.set(j as i64, SumValue::Float(c));
        }
        s
    }

    pub fn with_period(mut self, period: u64, residue: u64) -> Self {
        self.period = period.max(1);
        self.residue = residue % self.period;
        self
    }

    pub fn applies_to(&self, n: u64) -> bool {
        n % self.period == self.residue
    }

    pub fn set(&mut self, power: i64, value: SumValue) {
        self.terms.insert(power, value);
    }

    /// Adds `value` to the coefficient of `power`.
    pub fn accumulate(&mut self, power: i64, value: SumValue) {
        let next = match (self.terms.remove(&power), value) {
            (None, v) => v,
            (Some(SumValue::Exact(a)), SumValue::Exact(b)) => SumValue::Exact(a + b),
            (Some(a), b) => SumValue::Float(a.to_f64() + b.to_f64()),
        };
        self.terms.insert(power, next);
    }

    pub fn coeff(&self, power: i64) -> Option<&SumValue> {
        self.terms.get(&power)
    }

    pub fn coeff_f64(&self, power: i64) -> f64 {
        self.terms.get(&power).map_or(0.0, SumValue::to_f64)
    }

    pub fn coeff_exact(&self, power: i64) -> Option<Rational> {
        match self.terms.get(&power) {
            None => Some(Rational::zero()),
            Some(v) => v.as_exact().cloned(),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &SumValue)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    fn exponent(&self, power: i64) -> i32 {
        match self.variable {
            SeriesVariable::InverseN => -(power as i32),
            SeriesVariable::N => power as i32,
        }
    }

    pub fn evaluate_f64(&self, n: f64) -> f64 {
        self.terms.iter().map(|(&p, c)| c.to_f64() * n.powi(self.exponent(p))).sum()
    }

    /// Exact value at integer `N`; `None` for numeric series.
    pub fn evaluate_exact(&self, n: u64) -> Option<Rational> {
        let n = Rational::from_integer(BigInt::from(n));
        let mut total = Rational::zero();
        for (&p, c) in &self.terms {
            let e = self.exponent(p);
            let pw =
                if e >= 0 { num_traits::pow(n.clone(), e as usize) } else { num_traits::pow(n.recip(), (-e) as usize) };
            total += c.as_exact()? * pw;
        }
        Some(total)
    }

    pub fn evaluate(&self, n: u64) -> SumValue {
        match self.evaluate_exact(n) {
            Some(r) => SumValue::Exact(r),
            None => SumValue::Float(self.evaluate_f64(n as f64)),
        }
    }

    /// `[{"power": j, "coef": ...}]`, rationals as `"p/q"` strings.
    pub fn to_json(&self) -> serde_json::Value {
        let entry = |(p, c): (&i64, &SumValue)| serde_json::json!({"power": p, "coef": c.to_json()});
        // highest power of N first
        let items: Vec<serde_json::Value> = match self.variable {
            SeriesVariable::InverseN => self.terms.iter().map(entry).collect(),
            SeriesVariable::N => self.terms.iter().rev().map(entry).collect(),
        };
        serde_json::Value::Array(items)
    }
}

/// Neumaier's compensated summation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut k = KahanSum::new();
        for x in iter {
            k.add(x);
        }
        k
    }
}
