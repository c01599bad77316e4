//! Riemann sums over dilated lattice polytopes and their Euler-Maclaurin
//! asymptotic expansions.
//!
//! The crate is organised bottom-up:
//!
//! * [`exactnum`]: exact rationals, the group algebra `Q[Z/q]` that houses
//!   roots of unity, and the (twisted) Todd coefficient generators.
//! * [`latalg`]: integer lattice algebra (Smith normal form, basis extension,
//!   dual bases, torsion groups of wedges).
//! * [`polytope`]: H-representation polytopes, faces, lattice points.
//! * [`expr`]: integrands, either exact polynomials or smooth expressions with
//!   Taylor-mode differentiation.
//! * [`quad`]: integrals over the shifted polytope `Δ_h`, symbolic in `h` for
//!   polynomials and numeric otherwise.
//! * [`emcore`]: the Euler-Maclaurin engine (1-D, wedges, polytopes).
//! * [`ehrhart`]: Ehrhart sums of polyhomogeneous symbols.

#![allow(clippy::needless_range_loop)]

pub mod ehrhart;
pub mod emcore;
pub mod error;
pub mod exactnum;
pub mod expr;
pub mod latalg;
pub mod polytope;
pub mod quad;

pub use crate::ehrhart::{PolyhomSymbol, StabilityReport};
pub use crate::emcore::{
    Backend, ConvergenceReport, ExpansionOptions, ExpansionSeries, SeriesVariable, SumValue, WedgeSpec,
};
pub use crate::error::{Error, Result};
pub use crate::exactnum::{CycloElem, Rational, ToddSeries};
pub use crate::expr::{FnSpec, Integrand, Poly, SmoothFn};
pub use crate::latalg::{IntMat, TorsionGroup};
pub use crate::polytope::{FaceData, Facet, HPolytope, VertexRat};
pub use crate::quad::{FdOptions, QuadOptions};
