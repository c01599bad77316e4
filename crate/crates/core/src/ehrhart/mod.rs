//! Ehrhart sums `Σ_{k ∈ NΔ ∩ Z^n} f(k, N)` of polyhomogeneous symbols on the
//! cone over `Δ`, and their expansions in powers of `N`.

mod stability;
mod symbol;

pub use stability::{expansion_stability_check, StabilityOptions, StabilityReport};
pub use symbol::{ehrhart_sum, symbol_expansion, ComponentSpec, PolyhomSymbol, SymbolComponent, SymbolSpec};
