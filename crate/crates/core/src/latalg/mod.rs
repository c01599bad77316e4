//! Integer lattice algebra for wedges: primitivity, Smith normal form, basis
//! extension, dual bases and the torsion group `Γ = (Z^n)^* / A^*` together
//! with the character data `⟨γ, α_k⟩ mod 1`.

mod intmat;
mod snf;

pub use intmat::IntMat;
pub use snf::{smith_normal_form, SnfDecomposition};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactnum::linalg::{inverse, solve};
use crate::exactnum::{frac, Rational};

pub fn is_primitive(u: &[BigInt]) -> Result<bool> {
    let g = u.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(g.is_one())
}

/// Saturation data for independent rows `u_1..u_m`: the SNF diagonal and the
/// adapted basis `w_1..w_n` of `Z^n` (rows of `V^{-1}`) with
/// `span_Z{u} = span_Z{d_i w_i}` and `U ∩ Z^n = span_Z{w_1..w_m}`.
fn saturation(rows: &IntMat) -> Result<(Vec<BigInt>, IntMat)> {
    let s = smith_normal_form(rows);
    if s.rank() != rows.nrows() {
        return Err(Error::Dependent);
    }
    Ok((s.diagonal(), s.v_inv))
}

/// Vectors `u_{m+1}..u_n` whose images form a basis of
/// `Z^n / (U ∩ Z^n)`; regularity of the input is not required.
pub fn complement_basis(rows: &IntMat) -> Result<IntMat> {
    let m = rows.nrows();
    let (_, w) = saturation(rows)?;
    Ok(w.row_slice(m, w.nrows()))
}

/// Completes a regular system `u_1..u_m` to a lattice basis of `Z^n`.
pub fn extend_to_basis(rows: &IntMat) -> Result<IntMat> {
    let m = rows.nrows();
    let (diag, w) = saturation(rows)?;
    if diag.iter().any(|d| !d.is_one()) {
        return Err(Error::NonRegular);
    }
    Ok(rows.vstack(&w.row_slice(m, w.nrows())))
}

/// Vectors `α_1..α_n` with `⟨u_i, α_j⟩ = δ_ij`, i.e. the columns of `U^{-1}`.
pub fn dual_basis(rows: &IntMat) -> Result<Vec<Vec<Rational>>> {
    if rows.nrows() != rows.ncols() {
        return Err(Error::invalid("dual basis needs a square system"));
    }
    let inv = inverse(&rows.to_rational())?;
    let n = rows.nrows();
    Ok((0..n).map(|j| (0..n).map(|i| inv[i][j].clone()).collect()).collect())
}

/// One element of a torsion group: an integer representative `γ` and its
/// pairings `⟨γ, α_k⟩ mod 1` with the wedge directions `k = 1..m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionElement {
    pub representative: Vec<BigInt>,
    pub pairings: Vec<Rational>,
}

impl TorsionElement {
    pub fn is_identity(&self) -> bool {
        self.pairings.iter().all(Zero::is_zero)
    }

    /// Least common denominator of the pairings.
    pub fn modulus(&self) -> u64 {
        self.pairings
            .iter()
            .map(|p| p.denom().to_u64().expect("pairing denominator fits in u64"))
            .fold(1, |a, b| a.lcm(&b))
    }
}

/// `Γ = (Z^n)^* / A^*` for `A^* = span_Z{u_1..u_n}`, where `u_{m+1}..u_n`
/// complete the wedge normals `u_1..u_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionGroup {
    /// Wedge normals followed by the complement rows.
    pub extended: IntMat,
    /// Number of wedge normals `m`.
    pub wedge_rank: usize,
    /// Dual basis `α_1..α_n` of `extended`.
    pub dual: Vec<Vec<Rational>>,
    /// Invariant factors `d_i > 1` of the group.
    pub invariants: Vec<BigInt>,
    pub elements: Vec<TorsionElement>,
}

impl TorsionGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    /// Coordinates `r` of `γ = Σ r_i u_i` in the extended basis.
    pub fn coordinates(&self, gamma: &[BigInt]) -> Vec<Rational> {
        let t: Vec<Vec<Rational>> = self.extended.transpose().to_rational();
        let g: Vec<Rational> = gamma.iter().map(|x| Rational::from_integer(x.clone())).collect();
        solve(&t, &g).expect("extended basis is nonsingular")
    }

    /// Whether `γ` lies in the image of `Γ_E` for the wedge sub-system
    /// `E ⊆ {0..m}` (indices into the wedge normals), i.e. whether its
    /// representative lies in `(U_E ∩ Z^n) + A^*`. Decided by an exact solve
    /// plus an integrality check on the coordinates outside `E`.
    pub fn lies_in_subsystem(&self, element: &TorsionElement, subset: &[usize]) -> bool {
        let r = self.coordinates(&element.representative);
        r.iter().enumerate().filter(|(i, _)| !subset.contains(i)).all(|(_, x)| x.is_integer())
    }
}

/// Torsion group of the wedge with normals `rows` (independent, `m ≤ n`),
/// completed with [`complement_basis`].
pub fn torsion_group(rows: &IntMat) -> Result<TorsionGroup> {
    let complement = complement_basis(rows)?;
    torsion_group_with_complement(rows, &complement)
}

/// Torsion group using an explicit complement. The complement must generate
/// `Z^n / (U ∩ Z^n)`, which holds iff `|det(extended)| = [U ∩ Z^n : Z_F]`.
pub fn torsion_group_with_complement(rows: &IntMat, complement: &IntMat) -> Result<TorsionGroup> {
    let m = rows.nrows();
    let n = rows.ncols();
    if m + complement.nrows() != n {
        return Err(Error::invalid("complement has the wrong number of rows"));
    }
    let (sat_diag, _) = saturation(rows)?;
    let index: BigInt = sat_diag.iter().product();
    let extended = rows.vstack(complement);
    if extended.det().abs() != index {
        return Err(Error::invalid("complement does not generate the quotient lattice"));
    }
    let dual = dual_basis(&extended)?;

    // cosets of Z^n / A^*: Σ k_i w_i with 0 ≤ k_i < d_i from the SNF of A^*
    let s = smith_normal_form(&extended);
    let diag = s.diagonal();
    let order = diag
        .iter()
        .product::<BigInt>()
        .to_usize()
        .ok_or_else(|| Error::invalid("torsion group too large to enumerate"))?;
    let mut elements = Vec::with_capacity(order);
    let mut k = vec![BigInt::zero(); n];
    loop {
        let mut rep = vec![BigInt::zero(); n];
        for (i, ki) in k.iter().enumerate() {
            if !ki.is_zero() {
                for (j, r) in rep.iter_mut().enumerate() {
                    *r += ki * &s.v_inv[(i, j)];
                }
            }
        }
        let pairings = (0..m)
            .map(|col| {
                let p: Rational = rep.iter().zip(&dual[col]).map(|(g, a)| Rational::from_integer(g.clone()) * a).sum();
                frac(&p)
            })
            .collect();
        debug_assert!((m..n).all(|col| {
            let p: Rational = rep.iter().zip(&dual[col]).map(|(g, a)| Rational::from_integer(g.clone()) * a).sum();
            p.is_integer()
        }));
        elements.push(TorsionElement { representative: rep, pairings });
        // odometer, last index fastest
        let mut i = n;
        loop {
            if i == 0 {
                let invariants = diag.into_iter().filter(|d| !d.is_one()).collect();
                return Ok(TorsionGroup { extended, wedge_rank: m, dual, invariants, elements });
            }
            i -= 1;
            k[i] += 1;
            if k[i] < diag[i] {
                break;
            }
            k[i] = BigInt::zero();
        }
    }
}

pub fn is_regular(rows: &IntMat) -> Result<bool> {
    let (diag, _) = saturation(rows)?;
    Ok(diag.iter().all(|d| d.is_one()))
}
