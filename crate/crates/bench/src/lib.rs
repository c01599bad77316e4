//! Fixtures shared by the benchmarks.

use toddsum::{Facet, HPolytope};

/// Triangle with vertices (0,0), (1,0), (1,2); its vertex at the origin has torsion of order 2.
pub fn nonregular_triangle() -> HPolytope {
    HPolytope::new(2, vec![Facet::new(vec![0, -1], 0), Facet::new(vec![1, 0], 1), Facet::new(vec![-2, 1], 0)])
        .expect("valid triangle")
}

/// `x, y, z ≥ 0, x + y + 2z ≤ 2`.
pub fn tetrahedron() -> HPolytope {
    HPolytope::new(
        3,
        vec![
            Facet::new(vec![-1, 0, 0], 0),
            Facet::new(vec![0, -1, 0], 0),
            Facet::new(vec![0, 0, -1], 0),
            Facet::new(vec![1, 1, 2], 2),
        ],
    )
    .expect("valid tetrahedron")
}
