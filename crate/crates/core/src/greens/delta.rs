//! Regularized point evaluation: a smooth function supported in one element
//! whose moments reproduce point values of polynomials of degree `<= k`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::fem::quadrature::triangle_quadrature;
use crate::fem::{solve_spd, CsrMatrix, ElementMap, FeSpace, Locator};
use crate::{Error, Result, Vec2};

/// Quadrature degree for integrals against the bump (degree 12) times two
/// polynomials of degree `<= 3` and a spare.
const DELTA_QUAD_DEGREE: usize = 20;
const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Serialize)]
pub struct RegularizedDelta {
    pub element: usize,
    pub x0: [f64; 2],
    pub degree: usize,
    corners: [[f64; 2]; 3],
    center: [f64; 2],
    scale: f64,
    /// Coefficients of `q` in the scaled monomial basis.
    coeffs: Vec<f64>,
    /// Largest moment residual over the monomial basis.
    pub moment_residual: f64,
}

/// Exponents `(i, j)` with `i + j <= k`, ordered by total degree.
fn monomials(k: usize) -> Vec<(i32, i32)> {
    let mut out = Vec::new();
    for d in 0..=k as i32 {
        for i in (0..=d).rev() {
            out.push((i, d - i));
        }
    }
    out
}

fn bump(l: [f64; 3]) -> f64 {
    if l.iter().any(|&v| v <= 0.0) {
        return 0.0;
    }
    (27.0 * l[0] * l[1] * l[2]).powi(4)
}

impl RegularizedDelta {
    fn map(&self) -> ElementMap {
        ElementMap::new([
            Vec2::from(self.corners[0]),
            Vec2::from(self.corners[1]),
            Vec2::from(self.corners[2]),
        ])
    }

    fn scaled(&self, x: Vec2) -> (f64, f64) {
        ((x.x - self.center[0]) / self.scale, (x.y - self.center[1]) / self.scale)
    }

    fn poly_basis(&self, x: Vec2) -> Vec<f64> {
        let (u, v) = self.scaled(x);
        monomials(self.degree).iter().map(|&(i, j)| u.powi(i) * v.powi(j)).collect()
    }

    pub fn eval(&self, x: Vec2) -> f64 {
        let xi = self.map().to_reference(x);
        let b = bump([1.0 - xi[0] - xi[1], xi[0], xi[1]]);
        if b == 0.0 {
            return 0.0;
        }
        b * self.poly_basis(x).iter().zip(&self.coeffs).map(|(p, c)| p * c).sum::<f64>()
    }

    /// Quadrature points and weights on the anchor element.
    pub fn quadrature(&self) -> Result<(Vec<Vec2>, Vec<f64>)> {
        let rule = triangle_quadrature(DELTA_QUAD_DEGREE)?;
        let map = self.map();
        Ok((
            rule.points.iter().map(|p| map.to_physical(*p)).collect(),
            rule.weights.iter().map(|w| w * map.det.abs()).collect(),
        ))
    }

    /// `(P, delta) - P(x0)` for every scaled monomial `P`.
    pub fn moment_residuals(&self) -> Result<Vec<f64>> {
        let (pts, wts) = self.quadrature()?;
        let x0 = Vec2::from(self.x0);
        let target = self.poly_basis(x0);
        let mut acc = vec![0.0; target.len()];
        for (p, w) in pts.iter().zip(&wts) {
            let d = self.eval(*p);
            for (a, b) in acc.iter_mut().zip(self.poly_basis(*p)) {
                *a += w * d * b;
            }
        }
        Ok(acc.iter().zip(&target).map(|(a, t)| a - t).collect())
    }

    /// Sampled maximum of `|delta|` on a barycentric lattice of the element.
    pub fn sup_norm(&self) -> f64 {
        let map = self.map();
        let m = 60;
        let mut best: f64 = 0.0;
        for i in 0..=m {
            for j in 0..=(m - i) {
                let x = map.to_physical([i as f64 / m as f64, j as f64 / m as f64]);
                best = best.max(self.eval(x).abs());
            }
        }
        best
    }
}

/// Builds the regularized delta at `x0` on the element containing it.
pub fn build_delta(space: &FeSpace, locator: &Locator, x0: Vec2) -> Result<RegularizedDelta> {
    let loc = locator
        .find(space, x0)
        .ok_or(Error::PointOutsideMesh { x: x0.x, y: x0.y })?;
    let element = loc.element;
    if space.touches_boundary(element) {
        return Err(Error::BoundaryElement { element });
    }
    let c = space.mesh.corners(element);
    let center = (c[0] + c[1] + c[2]) / 3.0;
    let scale = crate::mesh::triangle_diameter(c);
    let mut delta = RegularizedDelta {
        element,
        x0: [x0.x, x0.y],
        degree: space.degree,
        corners: [[c[0].x, c[0].y], [c[1].x, c[1].y], [c[2].x, c[2].y]],
        center: [center.x, center.y],
        scale,
        coeffs: Vec::new(),
        moment_residual: 0.0,
    };
    let n = monomials(space.degree).len();
    let map = delta.map();
    let rule = triangle_quadrature(DELTA_QUAD_DEGREE)?;
    let mut gram = DMatrix::<f64>::zeros(n, n);
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let x = map.to_physical(*p);
        let b = bump([1.0 - p[0] - p[1], p[0], p[1]]) * w * map.det.abs();
        let basis = delta.poly_basis(x);
        for a in 0..n {
            for c in 0..n {
                gram[(a, c)] += b * basis[a] * basis[c];
            }
        }
    }
    let eig = SymmetricEigen::new(gram.clone());
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v.abs()), hi.max(v.abs())));
    let condition = hi / lo;
    if !(condition < CONDITION_LIMIT) {
        return Err(Error::SingularMoments { condition });
    }
    let rhs = DVector::from_vec(delta.poly_basis(x0));
    let q = gram
        .cholesky()
        .ok_or(Error::SingularMoments { condition })?
        .solve(&rhs);
    delta.coeffs = q.iter().copied().collect();
    delta.moment_residual = delta
        .moment_residuals()?
        .into_iter()
        .fold(0.0, |m, r| m.max(r.abs()));
    Ok(delta)
}

/// Exponential decay of `|P_h delta|` away from `x0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    /// Least-squares slope of `ln(envelope)` against `|x - x0| / h`.
    pub slope: f64,
    pub bins: usize,
}

/// `L2` projection of the delta and the fit of its radial envelope.
pub fn project_delta(space: &FeSpace, mass: &CsrMatrix, delta: &RegularizedDelta, rtol: f64) -> Result<(Vec<f64>, DecayFit)> {
    let rhs = delta_load(space, delta)?;
    let coeffs = solve_spd(mass, &rhs, rtol)?;
    let fit = decay_fit(space, &coeffs, Vec2::from(delta.x0))?;
    Ok((coeffs, fit))
}

/// `(delta, phi_i)` on any space. Elements that overlap the anchor element
/// are integrated whole; the bump vanishes to high order on its boundary,
/// so the cut costs little accuracy on meshes that do not align with it.
pub fn delta_load(space: &FeSpace, delta: &RegularizedDelta) -> Result<Vec<f64>> {
    let rule = triangle_quadrature(DELTA_QUAD_DEGREE)?;
    let tab = crate::fem::basis::Tabulation::new(space.degree, &rule.points)?;
    let c = delta.corners;
    let lo = [c[0][0].min(c[1][0]).min(c[2][0]), c[0][1].min(c[1][1]).min(c[2][1])];
    let hi = [c[0][0].max(c[1][0]).max(c[2][0]), c[0][1].max(c[1][1]).max(c[2][1])];
    let mut out = vec![0.0; space.n_dofs()];
    for t in 0..space.n_elements() {
        let p = space.mesh.corners(t);
        let tlo = p[0].inf(&p[1]).inf(&p[2]);
        let thi = p[0].sup(&p[1]).sup(&p[2]);
        if thi.x < lo[0] || tlo.x > hi[0] || thi.y < lo[1] || tlo.y > hi[1] {
            continue;
        }
        let map = space.element_map(t);
        let dofs = space.element_dofs(t);
        for (q, (xi, w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            let d = delta.eval(map.to_physical(*xi));
            if d == 0.0 {
                continue;
            }
            let d = d * w * map.det.abs();
            for (i, &g) in dofs.iter().enumerate() {
                out[g] += d * tab.values[q][i];
            }
        }
    }
    Ok(out)
}

/// Fits the max-per-bin envelope of `|coeffs|` over dofs at distance
/// `>= 3h` from `x0`, with unit-width bins in `|x - x0| / h`.
pub fn decay_fit(space: &FeSpace, coeffs: &[f64], x0: Vec2) -> Result<DecayFit> {
    let h = space.mesh.h_max;
    let mut bins: Vec<f64> = Vec::new();
    for (p, c) in space.dof_coords.iter().zip(coeffs) {
        let r = (p - x0).norm() / h;
        if r < 3.0 {
            continue;
        }
        let b = r.floor() as usize;
        if bins.len() <= b {
            bins.resize(b + 1, 0.0);
        }
        bins[b] = bins[b].max(c.abs());
    }
    let pts: Vec<(f64, f64)> = bins
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(b, &v)| (b as f64 + 0.5, v.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::DegenerateFit("fewer than two radial bins beyond 3h".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(DecayFit {
        slope: sxy / sxx,
        bins: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble_mass, Locator};
    use crate::geometry::SmoothDomain;
    use crate::mesh::build_mesh;
    use std::sync::Arc;

    #[test]
    fn moments_reproduce_point_values() {
        let disk = SmoothDomain::disk(1.0).unwrap();
        let mesh = Arc::new(build_mesh(&disk, 0.2).unwrap());
        for k in 1..=3 {
            let space = FeSpace::new(mesh.clone(), k).unwrap();
            let loc = Locator::new(&space);
            let x0 = Vec2::new(0.013, -0.021);
            let d = build_delta(&space, &loc, x0).unwrap();
            assert!(d.moment_residual <= 1e-10, "k={k}: {}", d.moment_residual);
            let (pts, wts) = d.quadrature().unwrap();
            let m0: f64 = pts.iter().zip(&wts).map(|(p, w)| w * d.eval(*p)).sum();
            let m1: f64 = pts.iter().zip(&wts).map(|(p, w)| w * p.x * d.eval(*p)).sum();
            assert!((m0 - 1.0).abs() < 1e-10);
            assert!((m1 - x0.x).abs() < 1e-10);
            // support stays inside the element
            assert_eq!(d.eval(Vec2::new(0.9, 0.0)), 0.0);
        }
    }

    #[test]
    fn boundary_elements_are_rejected() {
        let disk = SmoothDomain::disk(1.0).unwrap();
        let space = FeSpace::new(Arc::new(build_mesh(&disk, 0.2).unwrap()), 1).unwrap();
        let loc = Locator::new(&space);
        assert!(matches!(
            build_delta(&space, &loc, Vec2::new(0.99, 0.0)),
            Err(Error::BoundaryElement { .. })
        ));
    }

    #[test]
    fn projection_keeps_unit_mass_and_decays() {
        let disk = SmoothDomain::disk(1.0).unwrap();
        let space = FeSpace::new(Arc::new(build_mesh(&disk, 0.1).unwrap()), 1).unwrap();
        let loc = Locator::new(&space);
        let m = assemble_mass(&space).unwrap();
        let d = build_delta(&space, &loc, Vec2::new(0.01, 0.02)).unwrap();
        let (c, fit) = project_delta(&space, &m, &d, 1e-13).unwrap();
        let total: f64 = m.mul_vec(&c).iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!(fit.slope < -0.3, "slope {}", fit.slope);
    }
}
