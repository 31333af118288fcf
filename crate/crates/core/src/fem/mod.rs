//! Lagrange finite element spaces on the polygon.

pub mod assembly;
pub mod basis;
pub mod locate;
pub mod norms;
pub mod projection;
pub mod quadrature;
pub mod solver;
pub mod space;
pub mod sparse;

pub use assembly::{
    assemble_boundary_load, assemble_domain_load, assemble_form, assemble_mass, BoundaryRule, DomainRule,
    Operators,
};
pub use locate::{evaluate, evaluate_at, Location, Locator};
pub use norms::{error_norms, norms, Norms, SamplePlan};
pub use projection::{interpolate, l2_project};
pub use solver::{pcg, solve_spd, SolveStats, DEFAULT_RTOL};
pub use space::{ElementMap, FeSpace};
pub use sparse::CsrMatrix;
