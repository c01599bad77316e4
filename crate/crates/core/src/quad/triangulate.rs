use crate::error::Result;
use crate::expr::Poly;
use crate::polytope::HPolytope;

/// Simplex of a triangulation of `Δ_h`: vertex indices into the polytope's
/// vertex list and, for each, its coordinates as affine polynomials in `h`.
#[derive(Clone, Debug, PartialEq)]
pub struct Simplex {
    pub indices: Vec<usize>,
    pub vertices: Vec<Vec<Poly>>,
}

impl Simplex {
    pub fn at(&self, h: &[f64]) -> Vec<Vec<f64>> {
        self.vertices.iter().map(|v| v.iter().map(|p| p.eval_f64(h)).collect()).collect()
    }
}

/// Pulling triangulation from the lexicographically smallest vertex, applied
/// recursively to the faces not containing it. Only the combinatorics of the
/// simple polytope are used, so the same simplices triangulate `Δ_h` for
/// small `h`.
pub fn triangulate(p: &HPolytope) -> Result<Vec<Simplex>> {
    p.require_simple()?;
    let paths = p.vertex_paths()?;
    let mut out = Vec::new();
    pull(p, &[], &mut Vec::new(), &mut out);
    Ok(out
        .into_iter()
        .map(|indices: Vec<usize>| {
            let vertices = indices.iter().map(|&i| paths[i].clone()).collect();
            Simplex { indices, vertices }
        })
        .collect())
}

fn face_vertices(p: &HPolytope, face: &[usize]) -> Vec<usize> {
    p.vertices()
        .iter()
        .enumerate()
        .filter(|(_, v)| face.iter().all(|f| v.incident.contains(f)))
        .map(|(i, _)| i)
        .collect()
}

fn pull(p: &HPolytope, face: &[usize], apex: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let verts = face_vertices(p, face);
    // vertices are stored in lexicographic order
    let w = verts[0];
    if face.len() == p.dim() {
        let mut s = apex.clone();
        s.push(w);
        out.push(s);
        return;
    }
    let wv = &p.vertices()[w];
    apex.push(w);
    for j in 0..p.num_facets() {
        if face.contains(&j) || wv.incident.contains(&j) {
            continue;
        }
        let mut sub = face.to_vec();
        sub.push(j);
        sub.sort_unstable();
        if !face_vertices(p, &sub).is_empty() {
            pull(p, &sub, apex, out);
        }
    }
    apex.pop();
}
