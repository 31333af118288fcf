//! Regularized deltas, discrete Green's functions and dyadic norms of the
//! gap between a coarse Green's function and a fine reference.

mod delta;
mod dyadic;
mod green;

pub use delta::{build_delta, decay_fit, delta_load, project_delta, DecayFit, RegularizedDelta};
pub use dyadic::{dyadic, Cell, DyadicDecomposition};
pub use green::{evolve_green, f_norms, reference_green, relative_shift, FNorms, GreenEvolution, Probe};

use crate::fem::FeSpace;
use crate::Vec2;

/// Dof nearest to `target`.
pub fn nearest_dof(space: &FeSpace, target: Vec2) -> Vec2 {
    space
        .dof_coords
        .iter()
        .copied()
        .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
        .expect("space has dofs")
}
