use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::{to_f64, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct FdOptions {
    /// Initial step `s`; stencils use `s, s/2, ..., s/2^{levels-1}`.
    pub step: Rational,
    /// Number of Richardson levels.
    pub levels: usize,
    /// Times the step may be halved when a stencil point is inadmissible.
    pub max_halvings: u32,
    /// Orders above this start from `step · 2^{order - widen_above}`, which
    /// keeps rounding noise `~ eps / s^order` in check.
    pub widen_above: u32,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions { step: Rational::new(BigInt::one(), BigInt::from(16)), levels: 3, max_halvings: 8, widen_above: 2 }
    }
}

impl FdOptions {
    fn initial_step(&self, order: u32) -> Rational {
        let widen = order.saturating_sub(self.widen_above);
        &self.step * Rational::from_integer(BigInt::one() << widen)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Points and weights of the product central stencil for `∂^a` at step `s`
/// (weights not yet divided by `s^{|a|}`).
fn stencil(a: &[u32], s: &Rational) -> Vec<(Vec<Rational>, f64)> {
    let mut out = vec![(Vec::with_capacity(a.len()), 1.0)];
    for &ai in a {
        let mut next = Vec::with_capacity(out.len() * (ai as usize + 1));
        for (pt, w) in &out {
            for j in 0..=ai {
                let off = (Rational::new(BigInt::from(ai), BigInt::from(2)) - Rational::from_integer(j.into())) * s;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                let mut p = pt.clone();
                p.push(off);
                next.push((p, w * sign * binomial(ai, j)));
            }
        }
        out = next;
    }
    out
}

/// `∂^a g(0)` for each multi-index by central differences on a product
/// stencil with a full Richardson table over the step. `admissible` rejects
/// points where `g` is not the intended smooth branch; each index's step is
/// halved until all of its stencil points are admissible.
pub fn fd_derivatives<G, A>(
    indices: &[Vec<u32>],
    g: G,
    admissible: A,
    opts: &FdOptions,
) -> Result<BTreeMap<Vec<u32>, f64>>
where
    G: Fn(&[Rational]) -> Result<f64> + Sync,
    A: Fn(&[Rational]) -> bool,
{
    let two = Rational::from_integer(2.into());
    let mut steps = Vec::with_capacity(indices.len());
    let mut points = BTreeSet::new();
    for a in indices {
        let mut step = opts.initial_step(a.iter().sum());
        let mut halvings = 0;
        let pts = loop {
            let pts: Vec<Vec<Rational>> = (0..opts.levels)
                .flat_map(|k| stencil(a, &(&step / Rational::from_integer(BigInt::one() << k))))
                .map(|(p, _)| p)
                .collect();
            if pts.iter().all(|p| admissible(p)) {
                break pts;
            }
            if halvings == opts.max_halvings {
                return Err(Error::CombinatorialChange);
            }
            halvings += 1;
            step /= &two;
        };
        points.extend(pts);
        steps.push(step);
    }
    let points: Vec<Vec<Rational>> = points.into_iter().collect();
    let values: Vec<f64> = points.par_iter().map(|p| g(p)).collect::<Result<_>>()?;
    let table: BTreeMap<&Vec<Rational>, f64> = points.iter().zip(values).collect();

    let mut out = BTreeMap::new();
    for (a, step) in indices.iter().zip(&steps) {
        let order: u32 = a.iter().sum();
        let mut row: Vec<f64> = Vec::with_capacity(opts.levels);
        for k in 0..opts.levels {
            let s = step / Rational::from_integer(BigInt::one() << k);
            let sum: f64 = stencil(a, &s).iter().map(|(p, w)| w * table[p]).sum();
            row.push(sum / to_f64(&s).powi(order as i32));
        }
        // Richardson in s^2
        for j in 1..opts.levels {
            let factor = 4f64.powi(j as i32) - 1.0;
            for k in (j..opts.levels).rev() {
                row[k] += (row[k] - row[k - 1]) / factor;
            }
        }
        let v = if order == 0 { row[0] } else { *row.last().unwrap_or(&0.0) };
        out.insert(a.clone(), v);
    }
    Ok(out)
}

/// All multi-indices in `d` variables with `|a| ≤ max_order`, by total
/// order then lexicographically.
pub fn multi_indices(d: usize, max_order: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=max_order {
        let mut cur = vec![0u32; d];
        fill(&mut cur, 0, total, &mut out);
    }
    out
}

fn fill(cur: &mut Vec<u32>, i: usize, left: u32, out: &mut Vec<Vec<u32>>) {
    if i + 1 == cur.len() {
        cur[i] = left;
        out.push(cur.clone());
        return;
    }
    if cur.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for v in (0..=left).rev() {
        cur[i] = v;
        fill(cur, i + 1, left - v, out);
    }
    cur[i] = 0;
}
