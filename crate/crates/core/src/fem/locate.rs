//! Point location on a triangulation and pointwise evaluation.

use super::basis::reference_basis;
use super::space::FeSpace;
use crate::{Error, Result, Vec2};

/// Where a point was found.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub element: usize,
    pub xi: [f64; 2],
    /// `false` when the point lies outside the mesh and `element` is only
    /// the nearest triangle (evaluation then extrapolates).
    pub inside: bool,
}

/// Bucket grid over triangle bounding boxes. Immutable once built.
#[derive(Debug, Clone)]
pub struct Locator {
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
    centroids: Vec<Vec2>,
}

const INSIDE_TOL: f64 = 1e-12;

impl Locator {
    pub fn new(space: &FeSpace) -> Self {
        let mesh = &space.mesh;
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &mesh.vertices {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        let cell = mesh.h_max.max(1e-12);
        let nx = (((hi.x - lo.x) / cell) as usize + 1).min(4096);
        let ny = (((hi.y - lo.y) / cell) as usize + 1).min(4096);
        let cell = cell.max((hi.x - lo.x) / nx as f64).max((hi.y - lo.y) / ny as f64);
        let mut loc = Self {
            origin: lo,
            cell,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
            centroids: Vec::with_capacity(mesh.triangles.len()),
        };
        for t in 0..mesh.triangles.len() {
            let p = mesh.corners(t);
            let bl = p[0].inf(&p[1]).inf(&p[2]);
            let tr = p[0].sup(&p[1]).sup(&p[2]);
            let (x0, y0) = loc.cell_of(bl);
            let (x1, y1) = loc.cell_of(tr);
            for cy in y0..=y1 {
                for cx in x0..=x1 {
                    loc.buckets[cy * loc.nx + cx].push(t as u32);
                }
            }
            loc.centroids.push((p[0] + p[1] + p[2]) / 3.0);
        }
        loc
    }

    fn cell_of(&self, p: Vec2) -> (usize, usize) {
        let cx = ((p.x - self.origin.x) / self.cell).floor().clamp(0.0, (self.nx - 1) as f64) as usize;
        let cy = ((p.y - self.origin.y) / self.cell).floor().clamp(0.0, (self.ny - 1) as f64) as usize;
        (cx, cy)
    }

    fn in_reference(xi: [f64; 2]) -> bool {
        xi[0] >= -INSIDE_TOL && xi[1] >= -INSIDE_TOL && xi[0] + xi[1] <= 1.0 + INSIDE_TOL
    }

    /// Containing element, if any.
    pub fn find(&self, space: &FeSpace, x: Vec2) -> Option<Location> {
        let (cx, cy) = self.cell_of(x);
        for &t in &self.buckets[cy * self.nx + cx] {
            let xi = space.element_map(t as usize).to_reference(x);
            if Self::in_reference(xi) {
                return Some(Location {
                    element: t as usize,
                    xi,
                    inside: true,
                });
            }
        }
        None
    }

    /// Containing element, or the element with the nearest centroid.
    pub fn find_or_nearest(&self, space: &FeSpace, x: Vec2) -> Location {
        if let Some(loc) = self.find(space, x) {
            return loc;
        }
        let (cx, cy) = self.cell_of(x);
        let mut radius = 1usize;
        loop {
            let mut best: Option<(f64, usize)> = None;
            let x0 = cx.saturating_sub(radius);
            let y0 = cy.saturating_sub(radius);
            let x1 = (cx + radius).min(self.nx - 1);
            let y1 = (cy + radius).min(self.ny - 1);
            for yy in y0..=y1 {
                for xx in x0..=x1 {
                    for &t in &self.buckets[yy * self.nx + xx] {
                        let d = (self.centroids[t as usize] - x).norm();
                        if best.is_none_or(|(bd, _)| d < bd) {
                            best = Some((d, t as usize));
                        }
                    }
                }
            }
            if let Some((_, t)) = best {
                return Location {
                    element: t,
                    xi: space.element_map(t).to_reference(x),
                    inside: false,
                };
            }
            radius *= 2;
        }
    }
}

/// Value and gradient of a finite element function at a located point.
pub fn evaluate_at(space: &FeSpace, coeffs: &[f64], loc: &Location) -> (f64, Vec2) {
    let (vals, grads) = reference_basis(space.degree, loc.xi).expect("degree checked by the space");
    let dofs = space.element_dofs(loc.element);
    let mut v = 0.0;
    let mut g = [0.0; 2];
    for (i, &d) in dofs.iter().enumerate() {
        v += coeffs[d] * vals[i];
        g[0] += coeffs[d] * grads[i][0];
        g[1] += coeffs[d] * grads[i][1];
    }
    (v, space.element_map(loc.element).grad(g))
}

/// Value of a finite element function at `x`, which must lie in the mesh.
pub fn evaluate(space: &FeSpace, locator: &Locator, coeffs: &[f64], x: Vec2) -> Result<f64> {
    let loc = locator
        .find(space, x)
        .ok_or(Error::PointOutsideMesh { x: x.x, y: x.y })?;
    Ok(evaluate_at(space, coeffs, &loc).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::projection::interpolate;
    use crate::geometry::SmoothDomain;
    use crate::mesh::build_mesh;
    use std::sync::Arc;

    #[test]
    fn locates_and_reproduces_quadratics() {
        let disk = SmoothDomain::disk(1.0).unwrap();
        let mesh = Arc::new(build_mesh(&disk, 0.2).unwrap());
        let space = FeSpace::new(mesh, 2).unwrap();
        let loc = Locator::new(&space);
        let f = |p: Vec2| 1.0 + p.x - 2.0 * p.y + p.x * p.y + 0.5 * p.y * p.y;
        let c = interpolate(&space, f);
        for i in 0..50 {
            let r = 0.9 * (i as f64 / 50.0).sqrt();
            let a = i as f64 * 2.4;
            let x = Vec2::new(r * a.cos(), r * a.sin());
            assert!((evaluate(&space, &loc, &c, x).unwrap() - f(x)).abs() < 1e-12);
        }
        assert!(evaluate(&space, &loc, &c, Vec2::new(2.0, 0.0)).is_err());
        let far = loc.find_or_nearest(&space, Vec2::new(1.01, 0.0));
        assert!(!far.inside);
    }
}
