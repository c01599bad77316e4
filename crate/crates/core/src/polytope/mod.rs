//! Simple lattice polytopes in H-representation: validation, exact vertex
//! enumeration, faces with their torsion groups, lattice points of dilates
//! and facet-shifted vertices.

mod faces;
mod lattice;

pub(crate) use faces::starred_elements;
pub use faces::FaceData;
pub use lattice::LatticePoints;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::linalg::{rank, solve};
use crate::exactnum::Rational;
use crate::expr::Poly;
use crate::latalg::is_primitive;

/// Half-space `⟨u, x⟩ ≤ c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Facet {
    pub u: Vec<i64>,
    pub c: i64,
}

impl Facet {
    pub fn new(u: Vec<i64>, c: i64) -> Self {
        Facet { u, c }
    }

    fn value(&self, x: &[Rational]) -> Rational {
        self.u.iter().zip(x).map(|(&a, xi)| xi * BigInt::from(a)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexRat {
    pub coords: Vec<Rational>,
    /// Sorted indices of the facets through the vertex.
    pub incident: Vec<usize>,
}

impl VertexRat {
    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(Rational::is_integer)
    }
}

#[derive(Serialize, Deserialize)]
struct PolytopeFile {
    dim: usize,
    facets: Vec<Facet>,
}

/// Validated polytope: bounded, full-dimensional, primitive normals, no
/// redundant facets. Vertices are computed once at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HPolytope {
    dim: usize,
    facets: Vec<Facet>,
    vertices: Vec<VertexRat>,
}

impl HPolytope {
    pub fn new(dim: usize, facets: Vec<Facet>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        for (i, f) in facets.iter().enumerate() {
            if f.u.len() != dim {
                return Err(Error::invalid(format!("facet {i} has a normal of length {}", f.u.len())));
            }
            let big: Vec<BigInt> = f.u.iter().map(|&x| BigInt::from(x)).collect();
            if !is_primitive(&big)? {
                return Err(Error::NotPrimitive { index: i });
            }
        }
        for (i, f) in facets.iter().enumerate() {
            if facets[..i].contains(f) {
                return Err(Error::RedundantFacet { index: i });
            }
        }
        check_bounded(dim, &facets)?;
        let vertices = enumerate_vertices(dim, &facets);
        if vertices.is_empty() {
            return Err(Error::Infeasible);
        }
        // the vertex centroid is interior iff the polytope is full-dimensional
        let mut centroid = vec![Rational::zero(); dim];
        for v in &vertices {
            for (c, x) in centroid.iter_mut().zip(&v.coords) {
                *c += x;
            }
        }
        let count = Rational::from_integer(BigInt::from(vertices.len()));
        for c in &mut centroid {
            *c /= &count;
        }
        if facets.iter().any(|f| f.value(&centroid) >= Rational::from_integer(f.c.into())) {
            return Err(Error::NotFullDimensional);
        }
        for (i, _) in facets.iter().enumerate() {
            let on: Vec<&VertexRat> = vertices.iter().filter(|v| v.incident.contains(&i)).collect();
            if on.len() < dim || affine_rank(&on) != dim - 1 {
                return Err(Error::RedundantFacet { index: i });
            }
        }
        Ok(HPolytope { dim, facets, vertices })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: PolytopeFile = serde_json::from_str(text).map_err(|e| Error::invalid(format!("polytope file: {e}")))?;
        Self::new(f.dim, f.facets)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PolytopeFile { dim: self.dim, facets: self.facets.clone() })
            .expect("polytope serializes")
    }

    /// `[0,1]^n`, facets ordered `-x_1 ≤ 0, x_1 ≤ 1, -x_2 ≤ 0, ...`.
    pub fn unit_cube(n: usize) -> Self {
        let mut facets = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut u = vec![0; n];
            u[i] = -1;
            facets.push(Facet::new(u.clone(), 0));
            u[i] = 1;
            facets.push(Facet::new(u, 1));
        }
        Self::new(n, facets).expect("unit cube is valid")
    }

    /// `{x ≥ 0, Σ x_i ≤ scale}`.
    pub fn standard_simplex(n: usize, scale: i64) -> Self {
        let mut facets: Vec<Facet> = (0..n)
            .map(|i| {
                let mut u = vec![0; n];
                u[i] = -1;
                Facet::new(u, 0)
            })
            .collect();
        facets.push(Facet::new(vec![1; n], scale));
        Self::new(n, facets).expect("simplex is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn vertices(&self) -> &[VertexRat] {
        &self.vertices
    }

    pub fn is_simple(&self) -> bool {
        self.vertices.iter().all(|v| v.incident.len() == self.dim)
    }

    pub fn require_simple(&self) -> Result<()> {
        match self.vertices.iter().position(|v| v.incident.len() != self.dim) {
            None => Ok(()),
            Some(i) => Err(Error::NonSimple { vertex: i, facets: self.vertices[i].incident.len() }),
        }
    }

    pub fn is_lattice(&self) -> bool {
        self.vertices.iter().all(VertexRat::is_integral)
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.facets.iter().all(|f| f.value(x) <= Rational::from_integer(f.c.into()))
    }

    /// Vertex of `Δ_h`: solves the incident equalities with right sides
    /// `c_i + h_i` and checks that every other inequality stays strict.
    pub fn shifted_vertex(&self, v: &VertexRat, h: &[Rational]) -> Result<Vec<Rational>> {
        if h.len() != self.facets.len() {
            return Err(Error::invalid("shift vector must have one entry per facet"));
        }
        self.require_simple()?;
        let a: Vec<Vec<Rational>> = v
            .incident
            .iter()
            .map(|&i| self.facets[i].u.iter().map(|&x| Rational::from_integer(x.into())).collect())
            .collect();
        let b: Vec<Rational> =
            v.incident.iter().map(|&i| Rational::from_integer(self.facets[i].c.into()) + &h[i]).collect();
        let x = solve(&a, &b)?;
        for (j, f) in self.facets.iter().enumerate() {
            if !v.incident.contains(&j) && f.value(&x) >= Rational::from_integer(f.c.into()) + &h[j] {
                return Err(Error::CombinatorialChange);
            }
        }
        Ok(x)
    }

    /// Each vertex of `Δ_h` as an affine polynomial map of `h ∈ Q^d`, one
    /// `Poly` per coordinate, valid while the combinatorial type is fixed.
    pub fn vertex_paths(&self) -> Result<Vec<Vec<Poly>>> {
        self.require_simple()?;
        let d = self.facets.len();
        self.vertices
            .iter()
            .map(|v| {
                let a: Vec<Vec<Rational>> = v
                    .incident
                    .iter()
                    .map(|&i| self.facets[i].u.iter().map(|&x| Rational::from_integer(x.into())).collect())
                    .collect();
                let inv = crate::exactnum::linalg::inverse(&a)?;
                Ok((0..self.dim)
                    .map(|coord| {
                        let mut p = Poly::constant(d, v.coords[coord].clone());
                        for (k, &facet) in v.incident.iter().enumerate() {
                            let mut e = vec![0; d];
                            e[facet] = 1;
                            p.add_term(e, inv[coord][k].clone());
                        }
                        p
                    })
                    .collect())
            })
            .collect()
    }
}

fn to_rat_rows(rows: &[&Facet]) -> Vec<Vec<Rational>> {
    rows.iter().map(|f| f.u.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect()
}

/// Bounded iff the normals span and no extreme ray of `{d : U d ≤ 0}` exists.
fn check_bounded(dim: usize, facets: &[Facet]) -> Result<()> {
    let all: Vec<&Facet> = facets.iter().collect();
    if facets.len() <= dim || rank(&to_rat_rows(&all)) < dim {
        return Err(Error::Unbounded);
    }
    for subset in combinations(facets.len(), dim - 1) {
        let rows: Vec<&Facet> = subset.iter().map(|&i| &facets[i]).collect();
        let Some(dir) = kernel_vector(dim, &to_rat_rows(&rows)) else { continue };
        for sign in [1i64, -1] {
            let ok = facets.iter().all(|f| {
                let v: Rational = f.u.iter().zip(&dir).map(|(&a, d)| d * BigInt::from(a * sign)).sum();
                !v.is_positive()
            });
            if ok {
                return Err(Error::Unbounded);
            }
        }
    }
    Ok(())
}

/// Nonzero kernel vector of a rank `dim-1` system, if the rank is exactly that.
fn kernel_vector(dim: usize, rows: &[Vec<Rational>]) -> Option<Vec<Rational>> {
    if rank(rows) != dim - 1 {
        return None;
    }
    // fix one coordinate to 1 and solve for the rest
    for free in 0..dim {
        let a: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().enumerate().filter(|(j, _)| *j != free).map(|(_, x)| x.clone()).collect())
            .collect();
        let b: Vec<Rational> = rows.iter().map(|r| -r[free].clone()).collect();
        if rank(&a) == dim - 1 {
            if let Ok(sol) = solve(&a, &b) {
                let mut v = sol;
                v.insert(free, Rational::from_integer(1.into()));
                return Some(v);
            }
        }
    }
    None
}

fn enumerate_vertices(dim: usize, facets: &[Facet]) -> Vec<VertexRat> {
    let mut out: Vec<VertexRat> = Vec::new();
    for subset in combinations(facets.len(), dim) {
        let rows: Vec<&Facet> = subset.iter().map(|&i| &facets[i]).collect();
        let a = to_rat_rows(&rows);
        let b: Vec<Rational> = rows.iter().map(|f| Rational::from_integer(f.c.into())).collect();
        let Ok(x) = solve(&a, &b) else { continue };
        if out.iter().any(|v| v.coords == x) {
            continue;
        }
        let mut incident = Vec::new();
        let mut feasible = true;
        for (j, f) in facets.iter().enumerate() {
            let val = f.value(&x);
            let c = Rational::from_integer(f.c.into());
            if val > c {
                feasible = false;
                break;
            }
            if val == c {
                incident.push(j);
            }
        }
        if feasible {
            out.push(VertexRat { coords: x, incident });
        }
    }
    out.sort_by(|a, b| a.coords.cmp(&b.coords));
    out
}

fn affine_rank(points: &[&VertexRat]) -> usize {
    let base = &points[0].coords;
    let diffs: Vec<Vec<Rational>> =
        points[1..].iter().map(|p| p.coords.iter().zip(base).map(|(a, b)| a - b).collect()).collect();
    if diffs.is_empty() {
        0
    } else {
        rank(&diffs)
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
