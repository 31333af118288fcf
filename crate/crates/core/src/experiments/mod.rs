//! Configuration-driven studies, rate fits and reports.

mod common;
pub mod config;
mod converge;
pub mod fit;
mod galerkin;
mod green;
mod maxreg;
pub mod report;
mod skin;
mod smoothing;
pub mod solution;

pub use common::{build_level, Level, ManufacturedLoad};
pub use config::{DtRule, StudyConfig, StudyKind, Tolerances};
pub use converge::{run_convergence, ConvergenceRow};
pub use fit::{fit_rate, RateFit};
pub use galerkin::run_galerkin;
pub use green::run_green;
pub use maxreg::{run_maxreg, scalar_mode_ratio};
pub use report::{StudyOutcome, Table, Verdict};
pub use skin::run_skin;
pub use smoothing::{l2_ceiling, run_smoothing};
pub use solution::{ManufacturedSolution, SolutionKind};

use crate::Result;

/// Runs the study named in the config.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyOutcome> {
    match cfg.study {
        StudyKind::Converge => run_convergence(cfg),
        StudyKind::Smoothing => run_smoothing(cfg),
        StudyKind::Maxreg => run_maxreg(cfg),
        StudyKind::Skin => run_skin(cfg),
        StudyKind::Green => run_green(cfg),
        StudyKind::Galerkin => run_galerkin(cfg),
    }
}
