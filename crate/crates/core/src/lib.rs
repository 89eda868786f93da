//! Edge-invariant coordinates on the Teichmüller space of an ideally
//! triangulated surface with boundary.
//!
//! * [`triangulation`] builds the complex of colored hexagons and
//!   [`paths`] enumerates its fundamental edge paths and cycles.
//! * [`hexagon`] holds the right-angled hexagon trigonometry.
//! * [`psi`] evaluates `F_λ`, the mass `M_λ` and the forward map from edge
//!   lengths to ψ_λ invariants.
//! * [`polytope`] generates the inequalities describing the image and tests
//!   membership.
//! * [`solver`] inverts the forward map.

pub mod format;
pub mod hexagon;
pub mod io;
pub mod paths;
pub mod polytope;
pub mod psi;
pub mod quadrature;
pub mod solver;
mod special;
pub mod triangulation;

pub use hexagon::{HexGeometry, HexagonError, Scenario};
pub use paths::{EdgePath, Enumeration, EnumerationOptions, Traversal};
pub use polytope::{
    build_polytope, LinearInequality, Membership, Origin, PolytopeError, PolytopeSystem, Sense,
    Verdict,
};
pub use psi::{
    cosh_power_integral, forward_map, mass, mass_beta, psi_edge, Lambda, Metric, PsiError,
    PsiVector,
};
pub use solver::{invert, invert_within, JacobianMode, SolveError, SolveOptions, SolveReport};
pub use triangulation::{build_complex, GluingSpec, IdealTriangulation, TriangulationError};
