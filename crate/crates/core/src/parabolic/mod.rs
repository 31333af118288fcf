//! Time integration of `M u' + K u = F(t)` and the discrete semigroup.

mod maxreg;
mod spectral;
mod stepping;

pub use maxreg::{duhamel_modal, duhamel_weights, maxreg_ratio, simpson_weights, LoadSeries, MaxRegResult};
pub use spectral::{
    semigroup_apply, smoothing_bounds, EigenBasis, Semigroup, SmoothingBounds, DEFAULT_EIGEN_CAP,
};
pub use stepping::{
    apply_ah, mass_norm, solve_parabolic, solve_parabolic_with, step, step_count, Scheme, Stepper, Trajectory,
};

#[cfg(test)]
mod tests;
