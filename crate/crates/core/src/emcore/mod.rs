//! Euler-Maclaurin expansions: one-dimensional sums, polytope expansions
//! with twisted Todd operators, wedges, and Riemann sums for comparison.

mod expansion;
mod oned;
mod riemann;
mod series;
mod study;
mod wedge;

pub use expansion::{
    apply_operator_exact, apply_operator_numeric, em_expansion_regular, em_expansion_simple,
    em_expansion_simple_with_faces, exact_derivatives, inert_facets, ExpansionOptions, OperatorTerm, ToddOperator,
};
pub use oned::{
    em_1d_halfline, em_1d_halfline_series, em_1d_twisted, fullline_checks, halfline_integral, riemann_sum_1d_halfline,
    riemann_sum_1d_twisted, FullLineDiagnostics,
};
pub use riemann::{lattice_counts, lattice_sum_exact, riemann_sum_exact, riemann_sum_float, riemann_sum_polytope};
pub use series::{Backend, ExpansionSeries, KahanSum, SeriesVariable, SumValue};
pub use study::{convergence_study, em_estimate, loglog_fit, ConvergenceReport, StudyRow};
pub use wedge::{em_wedge_expansion, riemann_sum_wedge, wedge_h_derivatives, WedgeSpec};
