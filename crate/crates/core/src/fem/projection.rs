//! `L2` projection and nodal interpolation.

use rayon::prelude::*;

use super::assembly::DomainRule;
use super::solver::solve_spd;
use super::sparse::CsrMatrix;
use super::space::FeSpace;
use crate::{Result, Vec2};

/// Nodal interpolant: coefficients are `w` at the dof coordinates.
pub fn interpolate<F: Fn(Vec2) -> f64 + Sync>(space: &FeSpace, w: F) -> Vec<f64> {
    space.dof_coords.par_iter().map(|&p| w(p)).collect()
}

/// `L2` projection: solves `M c = (w, phi_i)`.
pub fn l2_project<F: Fn(Vec2) -> f64 + Sync>(
    space: &FeSpace,
    mass: &CsrMatrix,
    w: F,
    rtol: f64,
) -> Result<Vec<f64>> {
    let rhs = DomainRule::for_loads(space)?.load(space, w);
    solve_spd(mass, &rhs, rtol)
}

/// Projection of a load vector already assembled by the caller.
pub fn l2_project_load(mass: &CsrMatrix, rhs: &[f64], rtol: f64) -> Result<Vec<f64>> {
    solve_spd(mass, rhs, rtol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::assembly::assemble_mass;
    use crate::geometry::SmoothDomain;
    use crate::mesh::build_mesh;
    use std::sync::Arc;

    #[test]
    fn projection_reproduces_the_space() {
        let disk = SmoothDomain::disk(1.0).unwrap();
        let mesh = Arc::new(build_mesh(&disk, 0.3).unwrap());
        for k in 1..=3 {
            let space = FeSpace::new(mesh.clone(), k).unwrap();
            let m = assemble_mass(&space).unwrap();
            let c = l2_project(&space, &m, |_| 3.0, 1e-13).unwrap();
            assert!(c.iter().all(|v| (v - 3.0).abs() < 1e-10));
            let c = l2_project(&space, &m, |p| p.x, 1e-13).unwrap();
            for (v, p) in c.iter().zip(&space.dof_coords) {
                assert!((v - p.x).abs() < 1e-10);
            }
        }
    }
}
