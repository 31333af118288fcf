//! Polygonal approximation of the domain and its triangulation.

mod generate;
mod io;
mod skin;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::geometry::SmoothDomain;
use crate::{Error, Result, Vec2};

pub use generate::{build_mesh, build_mesh_with, refine_family, refine_family_with, MeshOptions};
pub use io::{read_mesh, write_mesh, write_mesh_with_metrics};
pub use skin::{signed_skin_area, skin_diagnostics, skin_slivers, SkinDiagnostics, SkinSliver};

/// A boundary edge of the polygon together with its unique adjacent triangle.
/// The vertex pair is oriented counter-clockwise around the polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub triangle: usize,
}

/// Conforming triangulation of the polygon `Omega_h`.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Vec2>,
    /// Boundary parameter of vertices lying on the curve.
    pub boundary_param: Vec<Option<f64>>,
    /// Counter-clockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    /// Ordered counter-clockwise around the polygon.
    pub boundary_edges: Vec<BoundaryEdge>,
    pub h_max: f64,
    pub h_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshMetrics {
    pub h_max: f64,
    pub h_min: f64,
    /// Smallest interior angle, in degrees.
    pub min_angle: f64,
    pub triangle_count: usize,
    pub vertex_count: usize,
    pub boundary_vertex_count: usize,
}

pub fn signed_area(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    0.5 * ((b - a).x * (c - a).y - (b - a).y * (c - a).x)
}

/// Interior angles of a triangle in degrees.
pub fn triangle_angles(p: [Vec2; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for i in 0..3 {
        let u = p[(i + 1) % 3] - p[i];
        let v = p[(i + 2) % 3] - p[i];
        let c = (u.dot(&v) / (u.norm() * v.norm())).clamp(-1.0, 1.0);
        out[i] = c.acos().to_degrees();
    }
    out
}

pub fn triangle_diameter(p: [Vec2; 3]) -> f64 {
    (p[1] - p[0])
        .norm()
        .max((p[2] - p[1]).norm())
        .max((p[0] - p[2]).norm())
}

impl Mesh {
    /// Assemble a mesh from vertices and triangles, orienting triangles
    /// counter-clockwise and extracting the ordered boundary.
    pub fn from_parts(
        vertices: Vec<Vec2>,
        boundary_param: Vec<Option<f64>>,
        mut triangles: Vec<[usize; 3]>,
    ) -> Result<Self> {
        if boundary_param.len() != vertices.len() {
            return Err(Error::InvalidInput("boundary_param length mismatch".into()));
        }
        for t in triangles.iter_mut() {
            if t.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidInput(format!("triangle {t:?} out of range")));
            }
            let area = signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            if area == 0.0 {
                return Err(Error::InvalidInput(format!("degenerate triangle {t:?}")));
            }
            if area < 0.0 {
                t.swap(1, 2);
            }
        }
        let boundary_edges = extract_boundary(&vertices, &boundary_param, &triangles)?;
        let (h_max, h_min) = triangles
            .iter()
            .map(|t| triangle_diameter([vertices[t[0]], vertices[t[1]], vertices[t[2]]]))
            .fold((0.0f64, f64::INFINITY), |(mx, mn), d| (mx.max(d), mn.min(d)));
        Ok(Self {
            vertices,
            boundary_param,
            triangles,
            boundary_edges,
            h_max,
            h_min,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn corners(&self, t: usize) -> [Vec2; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        signed_area(a, b, c)
    }

    /// Polygon area by the shoelace formula over the boundary.
    pub fn polygon_area(&self) -> f64 {
        self.boundary_edges
            .iter()
            .map(|e| {
                let a = self.vertices[e.vertices[0]];
                let b = self.vertices[e.vertices[1]];
                0.5 * (a.x * b.y - a.y * b.x)
            })
            .sum()
    }

    pub fn perimeter(&self) -> f64 {
        self.boundary_edges
            .iter()
            .map(|e| (self.vertices[e.vertices[1]] - self.vertices[e.vertices[0]]).norm())
            .sum()
    }

    /// Unique undirected edges `[min, max]` in a deterministic order.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut edges: Vec<[usize; 2]> = self
            .triangles
            .iter()
            .flat_map(|t| {
                (0..3).map(move |i| {
                    let (a, b) = (t[i], t[(i + 1) % 3]);
                    [a.min(b), a.max(b)]
                })
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_param[v].is_some()
    }

    pub fn metrics(&self) -> MeshMetrics {
        mesh_metrics(self)
    }

    /// Check conformity, orientation and the three polygon conditions:
    /// boundary vertices on the curve, no hanging vertices on boundary
    /// edges, and every triangle meeting the open domain.
    pub fn check_conditions(&self, domain: &SmoothDomain) -> Result<()> {
        let mut edge_count: HashMap<[usize; 2], usize> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            if self.triangle_area(t) <= 0.0 {
                return Err(Error::MeshQualityFailure(format!("triangle {t} not counter-clockwise")));
            }
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                *edge_count.entry([a.min(b), a.max(b)]).or_default() += 1;
            }
        }
        if edge_count.values().any(|&c| c > 2) {
            return Err(Error::MeshQualityFailure("edge shared by more than two triangles".into()));
        }
        let boundary_count = edge_count.values().filter(|&&c| c == 1).count();
        if boundary_count != self.boundary_edges.len() {
            return Err(Error::MeshQualityFailure("boundary edge list incomplete".into()));
        }
        for e in &self.boundary_edges {
            for &v in &e.vertices {
                let theta = self.boundary_param[v].ok_or_else(|| {
                    Error::MeshQualityFailure(format!("boundary vertex {v} has no curve parameter"))
                })?;
                if (domain.boundary_point(theta) - self.vertices[v]).norm() > 1e-12 {
                    return Err(Error::MeshQualityFailure(format!("boundary vertex {v} is off the curve")));
                }
            }
        }
        // Hanging vertices: a vertex strictly inside a boundary edge.
        let grid = VertexGrid::new(&self.vertices, self.h_max.max(1e-12));
        for e in &self.boundary_edges {
            let a = self.vertices[e.vertices[0]];
            let b = self.vertices[e.vertices[1]];
            let len = (b - a).norm();
            for v in grid.near_segment(a, b) {
                if e.vertices.contains(&v) {
                    continue;
                }
                let p = self.vertices[v];
                let s = (p - a).dot(&(b - a)) / (len * len);
                let off = signed_area(a, b, p).abs() * 2.0 / len;
                if s > 0.0 && s < 1.0 && off < 1e-12 * len {
                    return Err(Error::MeshQualityFailure(format!("vertex {v} hangs on a boundary edge")));
                }
            }
        }
        for t in 0..self.triangles.len() {
            let p = self.corners(t);
            let centroid = (p[0] + p[1] + p[2]) / 3.0;
            let mids = [(p[0] + p[1]) / 2.0, (p[1] + p[2]) / 2.0, (p[2] + p[0]) / 2.0];
            let meets = domain.inside(centroid)
                || p.iter().any(|&q| domain.inside(q))
                || mids.iter().any(|&q| domain.inside(q));
            if !meets {
                return Err(Error::MeshQualityFailure(format!("triangle {t} does not meet the domain")));
            }
        }
        Ok(())
    }

    /// `V - E + F`, which equals 1 for a triangulated disk-like region.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges().len() as i64 + self.triangles.len() as i64
    }
}

fn extract_boundary(
    vertices: &[Vec2],
    boundary_param: &[Option<f64>],
    triangles: &[[usize; 3]],
) -> Result<Vec<BoundaryEdge>> {
    let mut owner: HashMap<[usize; 2], (usize, usize)> = HashMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for i in 0..3 {
            let (a, b) = (tri[i], tri[(i + 1) % 3]);
            owner.entry([a.min(b), a.max(b)]).or_insert((t, 0)).1 += 1;
        }
    }
    // Directed boundary edges keyed by their start vertex.
    let mut next: HashMap<usize, BoundaryEdge> = HashMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for i in 0..3 {
            let (a, b) = (tri[i], tri[(i + 1) % 3]);
            if owner[&[a.min(b), a.max(b)]].1 == 1 {
                let edge = BoundaryEdge {
                    vertices: [a, b],
                    triangle: t,
                };
                if next.insert(a, edge).is_some() {
                    return Err(Error::MeshQualityFailure(format!(
                        "vertex {a} starts two boundary edges (non-manifold boundary)"
                    )));
                }
            }
        }
    }
    if next.is_empty() {
        return Ok(Vec::new());
    }
    let start = *next
        .keys()
        .min_by(|&&a, &&b| {
            let pa = boundary_param[a].unwrap_or(f64::INFINITY);
            let pb = boundary_param[b].unwrap_or(f64::INFINITY);
            pa.total_cmp(&pb).then(a.cmp(&b))
        })
        .unwrap();
    let mut ordered = Vec::with_capacity(next.len());
    let mut v = start;
    loop {
        let e = next[&v];
        ordered.push(e);
        v = e.vertices[1];
        if v == start {
            break;
        }
        if ordered.len() > next.len() {
            return Err(Error::MeshQualityFailure("boundary does not close".into()));
        }
    }
    if ordered.len() != next.len() {
        return Err(Error::MeshQualityFailure("boundary has more than one component".into()));
    }
    let _ = vertices;
    Ok(ordered)
}

/// Uniform bucket grid over vertex positions.
struct VertexGrid {
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl VertexGrid {
    fn new(points: &[Vec2], cell: f64) -> Self {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        let nx = (((hi.x - lo.x) / cell) as usize + 1).min(4096);
        let ny = (((hi.y - lo.y) / cell) as usize + 1).min(4096);
        let cell = cell.max((hi.x - lo.x) / nx as f64).max((hi.y - lo.y) / ny as f64);
        let mut buckets = vec![Vec::new(); nx * ny];
        for (i, p) in points.iter().enumerate() {
            let (cx, cy) = Self::cell_of(lo, cell, nx, ny, *p);
            buckets[cy * nx + cx].push(i);
        }
        Self { origin: lo, cell, nx, ny, buckets }
    }

    fn cell_of(origin: Vec2, cell: f64, nx: usize, ny: usize, p: Vec2) -> (usize, usize) {
        let cx = (((p.x - origin.x) / cell).floor().max(0.0) as usize).min(nx - 1);
        let cy = (((p.y - origin.y) / cell).floor().max(0.0) as usize).min(ny - 1);
        (cx, cy)
    }

    fn near_segment(&self, a: Vec2, b: Vec2) -> Vec<usize> {
        let (x0, y0) = Self::cell_of(self.origin, self.cell, self.nx, self.ny, a.inf(&b));
        let (x1, y1) = Self::cell_of(self.origin, self.cell, self.nx, self.ny, a.sup(&b));
        let mut out = Vec::new();
        for cy in y0..=y1 {
            for cx in x0..=x1 {
                out.extend_from_slice(&self.buckets[cy * self.nx + cx]);
            }
        }
        out
    }
}

/// Size and shape statistics of a mesh.
pub fn mesh_metrics(mesh: &Mesh) -> MeshMetrics {
    let min_angle = (0..mesh.triangles.len())
        .map(|t| {
            triangle_angles(mesh.corners(t))
                .into_iter()
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min);
    MeshMetrics {
        h_max: mesh.h_max,
        h_min: mesh.h_min,
        min_angle,
        triangle_count: mesh.triangles.len(),
        vertex_count: mesh.vertices.len(),
        boundary_vertex_count: mesh.boundary_param.iter().filter(|p| p.is_some()).count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn unit_right_triangle() -> Mesh {
        Mesh::from_parts(
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)],
            vec![None; 3],
            vec![[0, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn metrics_of_single_triangles() {
        let m = unit_right_triangle().metrics();
        assert!((m.h_max - 2f64.sqrt()).abs() < 1e-15);
        assert!((m.min_angle - 45.0).abs() < 1e-12);

        let eq = Mesh::from_parts(
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.5, 0.75f64.sqrt())],
            vec![None; 3],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert!((eq.metrics().min_angle - 60.0).abs() < 1e-6);
    }

    #[test]
    fn orientation_is_normalized_and_boundary_ordered() {
        let m = Mesh::from_parts(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(0.0, 1.0),
            ],
            vec![None; 4],
            vec![[0, 2, 1], [0, 2, 3]],
        )
        .unwrap();
        assert!(m.triangle_area(0) > 0.0 && m.triangle_area(1) > 0.0);
        assert_eq!(m.boundary_edges.len(), 4);
        for w in m.boundary_edges.windows(2) {
            assert_eq!(w[0].vertices[1], w[1].vertices[0]);
        }
        assert!((m.polygon_area() - 1.0).abs() < 1e-15);
        assert!((m.perimeter() - 4.0).abs() < 1e-15);
        assert_eq!(m.euler_characteristic(), 1);
    }
}
