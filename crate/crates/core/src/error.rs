use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero vector has no primitivity")]
    ZeroVector,
    #[error("rows are linearly dependent")]
    Dependent,
    #[error("matrix is singular")]
    Singular,
    #[error("wedge is not regular: its normals do not span their saturation")]
    NonRegular,
    #[error("facet {index} normal is not primitive")]
    NotPrimitive { index: usize },
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("polytope is infeasible")]
    Infeasible,
    #[error("polytope is not full-dimensional")]
    NotFullDimensional,
    #[error("facet {index} is redundant")]
    RedundantFacet { index: usize },
    #[error("polytope is not simple: vertex {vertex} lies on {facets} facets")]
    NonSimple { vertex: usize, facets: usize },
    #[error("shift changes the combinatorial type of the polytope")]
    CombinatorialChange,
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at offset {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("function `{name}` at offset {pos} takes exactly one argument")]
    Arity { pos: usize, name: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("quadrature did not converge after {levels} refinements")]
    NonConvergence { levels: usize },
    #[error("expansion coefficient for power {power} is not real (imaginary part {imag:e})")]
    NotReal { power: i32, imag: f64 },
    #[error("symbol component of degree {degree} is not homogeneous")]
    NotHomogeneous { degree: i32 },
    #[error("least-squares fit is ill-conditioned (condition number {cond:e})")]
    IllConditioned { cond: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
