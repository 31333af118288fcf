//! The boundary skin: the thin regions between each boundary chord and the
//! arc it cuts off.

use serde::Serialize;

use super::Mesh;
use crate::fem::quadrature::gauss_legendre;
use crate::geometry::SmoothDomain;
use crate::{Error, Result, Vec2};

const SLIVER_POINTS: usize = 5;

/// Region between boundary edge `edge` and its arc, with a tensor Gauss rule
/// in `(theta, lambda)` pushed forward by
/// `p(theta, lambda) = (1 - lambda) chord(theta) + lambda gamma(theta)`.
#[derive(Debug, Clone)]
pub struct SkinSliver {
    pub edge: usize,
    /// Parameter interval; `theta[1] > theta[0]` after unwrapping.
    pub theta: [f64; 2],
    /// `+1` where the arc lies outside the chord, `-1` where inside.
    pub sign: f64,
    pub points: Vec<Vec2>,
    /// Positive weights (absolute Jacobian).
    pub weights: Vec<f64>,
}

impl SkinSliver {
    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Signed contribution `sign * int f` to `int_Omega f - int_Omega_h f`.
    pub fn integrate(&self, f: impl Fn(Vec2) -> f64) -> f64 {
        self.sign * self.points.iter().zip(&self.weights).map(|(p, w)| w * f(*p)).sum::<f64>()
    }
}

/// Unwrapped parameter interval of boundary edge `e`.
fn edge_interval(mesh: &Mesh, domain: &SmoothDomain, e: usize) -> Result<[f64; 2]> {
    let edge = mesh.boundary_edges[e];
    let param = |v: usize| {
        mesh.boundary_param[v]
            .ok_or_else(|| Error::InvalidInput(format!("boundary vertex {v} has no parameter")))
    };
    let t0 = param(edge.vertices[0])?;
    let mut t1 = param(edge.vertices[1])?;
    if t1 <= t0 {
        t1 += domain.param_period;
    }
    Ok([t0, t1])
}

/// Signed tensor rule over the sliver of edge `e`: nodes and weights whose
/// sum equals the signed area between arc and chord.
fn signed_rule(mesh: &Mesh, domain: &SmoothDomain, e: usize) -> Result<(Vec<Vec2>, Vec<f64>)> {
    let [t0, t1] = edge_interval(mesh, domain, e)?;
    let edge = mesh.boundary_edges[e];
    let a = mesh.vertices[edge.vertices[0]];
    let b = mesh.vertices[edge.vertices[1]];
    let dtheta = t1 - t0;
    let chord_rate = (b - a) / dtheta;
    let (x, w) = gauss_legendre(SLIVER_POINTS);
    let mut points = Vec::with_capacity(SLIVER_POINTS * SLIVER_POINTS);
    let mut weights = Vec::with_capacity(SLIVER_POINTS * SLIVER_POINTS);
    for (xi, &wi) in x.iter().zip(&w) {
        let theta = t0 + 0.5 * (xi + 1.0) * dtheta;
        let (g, dg, _) = domain.curve(theta);
        let c = a + (theta - t0) * chord_rate;
        for (xj, &wj) in x.iter().zip(&w) {
            let lambda = 0.5 * (xj + 1.0);
            let p_theta = (1.0 - lambda) * chord_rate + lambda * dg;
            let p_lambda = g - c;
            // Counter-clockwise traversal: outward arc gives a negative determinant.
            let jac = -(p_theta.x * p_lambda.y - p_theta.y * p_lambda.x);
            points.push((1.0 - lambda) * c + lambda * g);
            weights.push(jac * 0.25 * dtheta * wi * wj);
        }
    }
    Ok((points, weights))
}

/// `area(Omega) - area(Omega_h)` as the sum of signed sliver integrals.
/// Valid even where a chord crosses its arc.
pub fn signed_skin_area(mesh: &Mesh, domain: &SmoothDomain) -> Result<f64> {
    let mut total = 0.0;
    for e in 0..mesh.boundary_edges.len() {
        total += signed_rule(mesh, domain, e)?.1.iter().sum::<f64>();
    }
    Ok(total)
}

/// One sliver per boundary edge. Fails if a chord crosses its arc away
/// from the endpoints.
pub fn skin_slivers(mesh: &Mesh, domain: &SmoothDomain) -> Result<Vec<SkinSliver>> {
    (0..mesh.boundary_edges.len())
        .map(|e| {
            let theta = edge_interval(mesh, domain, e)?;
            let sign = arc_side(mesh, domain, e, theta)?;
            let (points, weights) = signed_rule(mesh, domain, e)?;
            Ok(SkinSliver {
                edge: e,
                theta,
                sign,
                points,
                weights: weights.into_iter().map(|w| w * sign).collect(),
            })
        })
        .collect()
}

fn arc_side(mesh: &Mesh, domain: &SmoothDomain, e: usize, theta: [f64; 2]) -> Result<f64> {
    if domain.is_polygonal() {
        return Ok(1.0);
    }
    let edge = mesh.boundary_edges[e];
    let a = mesh.vertices[edge.vertices[0]];
    let b = mesh.vertices[edge.vertices[1]];
    let d = b - a;
    let len = d.norm();
    let samples = 32;
    let mut sign = 0.0;
    for k in 1..samples {
        let t = theta[0] + (theta[1] - theta[0]) * k as f64 / samples as f64;
        let q = domain.boundary_point(t) - a;
        // right of the chord is outside for a counter-clockwise polygon
        let side = -(d.x * q.y - d.y * q.x) / len;
        if side.abs() <= 1e-14 * len {
            continue;
        }
        let s = side.signum();
        if sign == 0.0 {
            sign = s;
        } else if s != sign {
            return Err(Error::OrientationAmbiguous { edge: e });
        }
    }
    Ok(if sign == 0.0 { 1.0 } else { sign })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SkinDiagnostics {
    pub sup_t_star: f64,
    pub skin_area_out: f64,
    pub skin_area_in: f64,
    pub normal_deviation_max: f64,
    pub boundary_chord_max: f64,
}

/// Distance and normal mismatch between the polygon and the curve, sampled
/// densely along every boundary edge.
pub fn skin_diagnostics(mesh: &Mesh, domain: &SmoothDomain) -> Result<SkinDiagnostics> {
    let samples = 16;
    let mut out = SkinDiagnostics {
        sup_t_star: 0.0,
        skin_area_out: 0.0,
        skin_area_in: 0.0,
        normal_deviation_max: 0.0,
        boundary_chord_max: 0.0,
    };
    for (e, edge) in mesh.boundary_edges.iter().enumerate() {
        let a = mesh.vertices[edge.vertices[0]];
        let b = mesh.vertices[edge.vertices[1]];
        let d = b - a;
        let len = d.norm();
        out.boundary_chord_max = out.boundary_chord_max.max(len);
        let n_h = Vec2::new(d.y, -d.x) / len;
        for k in 0..=samples {
            let x = a + d * (k as f64 / samples as f64);
            let proj = domain.closest_point(x)?;
            out.sup_t_star = out.sup_t_star.max(proj.t_star.abs());
            let dev = (n_h - domain.outward_normal(proj.theta)).norm();
            out.normal_deviation_max = out.normal_deviation_max.max(dev);
        }
        let area: f64 = signed_rule(mesh, domain, e)?.1.iter().sum();
        if area >= 0.0 {
            out.skin_area_out += area;
        } else {
            out.skin_area_in -= area;
        }
    }
    Ok(out)
}
