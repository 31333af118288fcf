//! Norms of finite element functions and of their errors against closed-form
//! fields.
//!
//! Integral norms use element quadrature; the maximum norm is a sampled
//! proxy over dof nodes, quadrature points and edge midpoints.

use rayon::prelude::*;
use serde::Serialize;

use super::assembly::DomainRule;
use super::basis::{reference_nodes, Tabulation};
use super::quadrature::triangle_quadrature;
use super::space::FeSpace;
use crate::{Result, Vec2};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub l4: f64,
    pub h1_semi: f64,
    pub h1: f64,
    /// `||v||_{L1} + ||grad v||_{L1}`.
    pub w11: f64,
}

/// Reference sample points shared by every element.
#[derive(Debug, Clone)]
pub struct SamplePlan {
    pub points: Vec<[f64; 2]>,
    tab: Tabulation,
}

impl SamplePlan {
    pub fn new(space: &FeSpace) -> Result<Self> {
        let k = space.degree;
        let mut points = reference_nodes(k)?;
        points.extend_from_slice(&triangle_quadrature(2 * k + 2)?.points);
        points.extend_from_slice(&[[0.5, 0.0], [0.5, 0.5], [0.0, 0.5]]);
        let tab = Tabulation::new(k, &points)?;
        Ok(Self { points, tab })
    }

    fn element_max<F: Fn(Vec2) -> f64 + Sync>(&self, space: &FeSpace, coeffs: &[f64], t: usize, w: &F) -> f64 {
        let dofs = space.element_dofs(t);
        let map = space.element_map(t);
        let mut worst: f64 = 0.0;
        for (q, p) in self.points.iter().enumerate() {
            let uh: f64 = dofs.iter().zip(&self.tab.values[q]).map(|(&d, phi)| coeffs[d] * phi).sum();
            worst = worst.max((uh - w(map.to_physical(*p))).abs());
        }
        worst
    }

    /// Sampled `max |u_h - w|`.
    pub fn linf_error<F: Fn(Vec2) -> f64 + Sync>(&self, space: &FeSpace, coeffs: &[f64], w: F) -> f64 {
        (0..space.n_elements())
            .into_par_iter()
            .map(|t| self.element_max(space, coeffs, t, &w))
            .reduce(|| 0.0, f64::max)
    }

    pub fn linf_norm(&self, space: &FeSpace, coeffs: &[f64]) -> f64 {
        self.linf_error(space, coeffs, |_| 0.0)
    }
}

/// Integral norms of `u_h - w` where `exact` returns `(w, grad w)`.
pub fn error_norms<F>(space: &FeSpace, rule: &DomainRule, coeffs: &[f64], exact: F) -> Norms
where
    F: Fn(Vec2) -> (f64, Vec2) + Sync,
{
    let (vals, grads) = rule.evaluate_with_gradient(space, coeffs);
    let partial = (0..rule.points.len())
        .into_par_iter()
        .with_min_len(1024)
        .fold(
            || [0.0f64; 5],
            |mut acc, i| {
                let (w, gw) = exact(rule.points[i]);
                let e = vals[i] - w;
                let ge = grads[i] - gw;
                let wt = rule.weights[i];
                acc[0] += wt * e.abs();
                acc[1] += wt * e * e;
                acc[2] += wt * e.powi(4);
                acc[3] += wt * ge.norm_squared();
                acc[4] += wt * ge.norm();
                acc
            },
        )
        .collect::<Vec<_>>();
    let mut s = [0.0f64; 5];
    for p in partial {
        for i in 0..5 {
            s[i] += p[i];
        }
    }
    Norms {
        l1: s[0],
        l2: s[1].sqrt(),
        l4: s[2].powf(0.25),
        h1_semi: s[3].sqrt(),
        h1: (s[1] + s[3]).sqrt(),
        w11: s[0] + s[4],
    }
}

pub fn norms(space: &FeSpace, rule: &DomainRule, coeffs: &[f64]) -> Norms {
    error_norms(space, rule, coeffs, |_| (0.0, Vec2::zeros()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::projection::interpolate;
    use crate::geometry::SmoothDomain;
    use crate::mesh::build_mesh;
    use std::sync::Arc;

    #[test]
    fn norms_of_simple_functions() {
        let disk = SmoothDomain::disk(1.0).unwrap();
        let mesh = Arc::new(build_mesh(&disk, 0.2).unwrap());
        let area = mesh.polygon_area();
        let space = FeSpace::new(mesh, 1).unwrap();
        let rule = DomainRule::for_loads(&space).unwrap();
        let one = vec![1.0; space.n_dofs()];
        let n = norms(&space, &rule, &one);
        assert!((n.l2 * n.l2 - area).abs() < 1e-12);
        assert!((n.l1 - area).abs() < 1e-12);
        let x = interpolate(&space, |p| p.x);
        let n = norms(&space, &rule, &x);
        assert!((n.h1_semi * n.h1_semi - area).abs() < 1e-12);
    }

    #[test]
    fn sampled_max_matches_dense_sampling() {
        let disk = SmoothDomain::disk(1.0).unwrap();
        let mesh = Arc::new(build_mesh(&disk, 0.1).unwrap());
        let space = FeSpace::new(mesh, 1).unwrap();
        let c = interpolate(&space, |p| (3.0 * p.x).sin());
        let plan = SamplePlan::new(&space).unwrap();
        let proxy = plan.linf_norm(&space, &c);
        // dense oracle: about 1e5 samples spread over all elements
        let per = (100_000 / space.n_elements()).max(1);
        let m = ((per as f64).sqrt().ceil() as usize).max(2);
        let mut dense: f64 = 0.0;
        for t in 0..space.n_elements() {
            let dofs = space.element_dofs(t);
            for i in 0..=m {
                for j in 0..=(m - i) {
                    let xi = [i as f64 / m as f64, j as f64 / m as f64];
                    let l = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
                    let v: f64 = (0..3).map(|a| c[dofs[a]] * l[a]).sum();
                    dense = dense.max(v.abs());
                }
            }
        }
        assert!((proxy - dense).abs() <= 0.02 * dense, "{proxy} vs {dense}");
    }
}
