//! Pieces shared by the study drivers.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use super::config::StudyConfig;
use super::solution::{projected_normal, ManufacturedSolution};
use crate::fem::{BoundaryRule, DomainRule, FeSpace, Operators};
use crate::geometry::SmoothDomain;
use crate::mesh::{build_mesh_with, Mesh};
use crate::{Result, Vec2};

/// One member of a mesh family with its space and matrices.
#[derive(Debug, Clone)]
pub struct Level {
    pub index: usize,
    /// Nominal mesh size `h0 / 2^l`.
    pub h: f64,
    pub mesh: Arc<Mesh>,
    pub space: Arc<FeSpace>,
    pub ops: Operators,
}

pub fn build_level(cfg: &StudyConfig, domain: &SmoothDomain, index: usize) -> Result<Level> {
    let h = cfg.level_h(index);
    let mesh = Arc::new(build_mesh_with(domain, h, &cfg.mesh_options())?);
    let space = Arc::new(FeSpace::new(mesh.clone(), cfg.degree)?);
    let ops = Operators::assemble(&space)?;
    Ok(Level {
        index,
        h,
        mesh,
        space,
        ops,
    })
}

/// Load vectors `(f~, v)_{Omega_h} + (g~, v)_{dOmega_h}` of a manufactured
/// solution, with the projected normals cached.
pub struct ManufacturedLoad {
    pub solution: ManufacturedSolution,
    pub rule: DomainRule,
    pub brule: BoundaryRule,
    normals: Vec<Vec2>,
}

impl ManufacturedLoad {
    pub fn new(space: &FeSpace, domain: &SmoothDomain, solution: ManufacturedSolution) -> Result<Self> {
        Self::with_rules(domain, solution, DomainRule::for_loads(space)?, BoundaryRule::for_loads(space)?)
    }

    pub fn with_rules(
        domain: &SmoothDomain,
        solution: ManufacturedSolution,
        rule: DomainRule,
        brule: BoundaryRule,
    ) -> Result<Self> {
        let normals = brule
            .points
            .par_iter()
            .map(|&p| projected_normal(domain, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            solution,
            rule,
            brule,
            normals,
        })
    }

    /// `g~` at the boundary quadrature points.
    pub fn neumann_values(&self, t: f64) -> Vec<f64> {
        self.brule
            .points
            .iter()
            .zip(&self.normals)
            .map(|(&p, n)| self.solution.gradient(p, t).dot(n))
            .collect()
    }

    pub fn load(&self, space: &FeSpace, t: f64) -> Vec<f64> {
        let u = self.solution;
        let mut f = self.rule.load(space, |x| u.load(x, t));
        let g = self.brule.load_from_values(space, &self.neumann_values(t));
        for (a, b) in f.iter_mut().zip(g) {
            *a += b;
        }
        f
    }
}

/// Runs `f` and returns its value and the elapsed seconds.
pub fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, start.elapsed().as_secs_f64()))
}

/// Growth of `b` over `a`, `b / a - 1`.
pub fn growth(a: f64, b: f64) -> f64 {
    b / a - 1.0
}
