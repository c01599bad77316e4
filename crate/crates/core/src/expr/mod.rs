//! Integrands: exact polynomials and smooth expressions with Taylor-mode
//! derivatives along lines.

mod ast;
mod fnspec;
mod func;
mod jet;
mod parser;
mod poly;

pub use ast::{Bump, Expr, Func};
pub use fnspec::{FnSpec, Number, SupportSpec, TermSpec};
pub use func::{parse, Integrand, SmoothFn, Support};
pub use jet::{eval_jet, Jet};
pub use parser::parse_expr;
pub use poly::Poly;
