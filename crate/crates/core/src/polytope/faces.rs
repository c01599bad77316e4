use num_bigint::BigInt;

use crate::error::Result;
use crate::latalg::{complement_basis, torsion_group_with_complement, IntMat, TorsionGroup};

use super::{combinations, HPolytope};

/// A nonempty face: the facets `F` containing it, its torsion group `Γ_F`
/// and the elements of `Γ_F^♯` (those not coming from any proper subset).
#[derive(Clone, Debug, PartialEq)]
pub struct FaceData {
    /// Sorted facet indices; empty for the polytope itself.
    pub facets: Vec<usize>,
    pub dim: usize,
    pub torsion: TorsionGroup,
    /// Indices into `torsion.elements`.
    pub starred: Vec<usize>,
    /// Indices into the polytope's vertex list.
    pub vertices: Vec<usize>,
}

impl FaceData {
    pub fn codim(&self) -> usize {
        self.facets.len()
    }

    /// Position of facet `i` among the wedge normals of this face.
    pub fn local_index(&self, facet: usize) -> Option<usize> {
        self.facets.iter().position(|&f| f == facet)
    }
}

impl HPolytope {
    pub(crate) fn normals(&self, subset: &[usize]) -> IntMat {
        let rows: Vec<Vec<BigInt>> =
            subset.iter().map(|&i| self.facets[i].u.iter().map(|&x| BigInt::from(x)).collect()).collect();
        IntMat::from_rows(&rows, self.dim)
    }

    /// Facet subsets of all nonempty faces, by codimension then lexicographically.
    pub fn face_sets(&self) -> Result<Vec<Vec<usize>>> {
        self.require_simple()?;
        let mut sets: Vec<Vec<usize>> = Vec::new();
        for v in &self.vertices {
            for k in 0..=self.dim {
                for pick in combinations(self.dim, k) {
                    let f: Vec<usize> = pick.iter().map(|&j| v.incident[j]).collect();
                    if !sets.contains(&f) {
                        sets.push(f);
                    }
                }
            }
        }
        sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(sets)
    }

    pub fn faces(&self) -> Result<Vec<FaceData>> {
        self.faces_with_complements(complement_basis)
    }

    /// Same as [`faces`](Self::faces) with a caller-chosen complement for
    /// each face's normals.
    pub fn faces_with_complements<C>(&self, complement: C) -> Result<Vec<FaceData>>
    where
        C: Fn(&IntMat) -> Result<IntMat>,
    {
        self.face_sets()?
            .into_iter()
            .map(|facets| {
                let rows = self.normals(&facets);
                let torsion = torsion_group_with_complement(&rows, &complement(&rows)?)?;
                let starred = starred_elements(&torsion, facets.len());
                let vertices = self
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| facets.iter().all(|f| v.incident.contains(f)))
                    .map(|(i, _)| i)
                    .collect();
                Ok(FaceData { dim: self.dim - facets.len(), facets, torsion, starred, vertices })
            })
            .collect()
    }

    /// True iff every face has a trivial torsion group. Also evaluates the
    /// vertex-only criterion and asserts that both agree.
    pub fn is_regular(&self) -> Result<bool> {
        let faces = self.faces()?;
        let all = faces.iter().all(|f| f.torsion.is_trivial());
        let at_vertices = faces.iter().filter(|f| f.dim == 0).all(|f| f.torsion.is_trivial());
        assert_eq!(all, at_vertices, "face and vertex regularity criteria disagree");
        Ok(all)
    }
}

/// `Γ_F^♯`: elements outside `Γ_E` for every proper `E ⊂ F`. Since the `Γ_E`
/// are nested it is enough to test the maximal proper subsets.
pub(crate) fn starred_elements(torsion: &TorsionGroup, m: usize) -> Vec<usize> {
    torsion
        .elements
        .iter()
        .enumerate()
        .filter(|(_, g)| {
            if m == 0 {
                return true;
            }
            (0..m).all(|drop| {
                let e: Vec<usize> = (0..m).filter(|&j| j != drop).collect();
                !torsion.lies_in_subsystem(g, &e)
            })
        })
        .map(|(i, _)| i)
        .collect()
}
