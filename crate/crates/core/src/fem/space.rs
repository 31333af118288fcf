//! Global dof layout of the `P^k` Lagrange space.
//!
//! Numbering: mesh vertices first, then `k - 1` nodes per edge (edges in
//! `Mesh::edges` order, nodes running from the lower to the higher vertex
//! index), then one interior node per triangle for `k = 3`.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::Matrix2;

use super::basis::{check_degree, local_dofs, reference_nodes, EDGES};
use crate::mesh::Mesh;
use crate::{Result, Vec2};

/// Affine map `x = origin + jacobian * xi` of one triangle.
#[derive(Debug, Clone, Copy)]
pub struct ElementMap {
    pub origin: Vec2,
    pub jacobian: Matrix2<f64>,
    /// `J^{-T}`, mapping reference gradients to physical ones.
    pub inv_transpose: Matrix2<f64>,
    pub det: f64,
}

impl ElementMap {
    pub fn new(p: [Vec2; 3]) -> Self {
        let jacobian = Matrix2::from_columns(&[p[1] - p[0], p[2] - p[0]]);
        let det = jacobian.determinant();
        let inv = jacobian.try_inverse().expect("degenerate triangle");
        Self {
            origin: p[0],
            jacobian,
            inv_transpose: inv.transpose(),
            det,
        }
    }

    pub fn to_physical(&self, xi: [f64; 2]) -> Vec2 {
        self.origin + self.jacobian * Vec2::new(xi[0], xi[1])
    }

    pub fn to_reference(&self, x: Vec2) -> [f64; 2] {
        let xi = self.inv_transpose.transpose() * (x - self.origin);
        [xi.x, xi.y]
    }

    pub fn grad(&self, g: [f64; 2]) -> Vec2 {
        self.inv_transpose * Vec2::new(g[0], g[1])
    }
}

#[derive(Debug, Clone)]
pub struct FeSpace {
    pub mesh: Arc<Mesh>,
    pub degree: usize,
    pub dof_coords: Vec<Vec2>,
    n_local: usize,
    elem_dofs: Vec<usize>,
    maps: Vec<ElementMap>,
    /// Per boundary edge: its `k + 1` dofs from the first to the second vertex.
    pub boundary_edge_dofs: Vec<Vec<usize>>,
    /// Sorted dofs lying on the polygon boundary.
    pub boundary_dofs: Vec<usize>,
}

impl FeSpace {
    pub fn new(mesh: Arc<Mesh>, degree: usize) -> Result<Self> {
        check_degree(degree)?;
        let k = degree;
        let nv = mesh.vertices.len();
        let edges = mesh.edges();
        let edge_id: HashMap<[usize; 2], usize> =
            edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let per_edge = k - 1;
        let n_edge_dofs = per_edge * edges.len();
        let n_interior = if k == 3 { mesh.triangles.len() } else { 0 };
        let n_dofs = nv + n_edge_dofs + n_interior;

        let mut dof_coords = vec![Vec2::zeros(); n_dofs];
        dof_coords[..nv].copy_from_slice(&mesh.vertices);
        for (e, [a, b]) in edges.iter().enumerate() {
            for j in 1..k {
                let s = j as f64 / k as f64;
                dof_coords[nv + e * per_edge + j - 1] =
                    (1.0 - s) * mesh.vertices[*a] + s * mesh.vertices[*b];
            }
        }

        let n_local = local_dofs(k);
        let edge_dof = |ga: usize, gb: usize, j: usize| {
            // j-th node (1-based) from ga toward gb
            let e = edge_id[&[ga.min(gb), ga.max(gb)]];
            let jj = if ga < gb { j } else { k - j };
            nv + e * per_edge + jj - 1
        };
        let mut elem_dofs = Vec::with_capacity(n_local * mesh.triangles.len());
        let mut maps = Vec::with_capacity(mesh.triangles.len());
        for (t, tri) in mesh.triangles.iter().enumerate() {
            elem_dofs.extend_from_slice(tri);
            for [a, b] in EDGES {
                for j in 1..k {
                    elem_dofs.push(edge_dof(tri[a], tri[b], j));
                }
            }
            if k == 3 {
                let d = nv + n_edge_dofs + t;
                elem_dofs.push(d);
                dof_coords[d] = (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
            }
            maps.push(ElementMap::new(mesh.corners(t)));
        }

        let boundary_edge_dofs: Vec<Vec<usize>> = mesh
            .boundary_edges
            .iter()
            .map(|e| {
                let [a, b] = e.vertices;
                let mut d = vec![a];
                d.extend((1..k).map(|j| edge_dof(a, b, j)));
                d.push(b);
                d
            })
            .collect();
        let mut boundary_dofs: Vec<usize> = boundary_edge_dofs.iter().flatten().copied().collect();
        boundary_dofs.sort_unstable();
        boundary_dofs.dedup();

        debug_assert_eq!(reference_nodes(k)?.len(), n_local);
        Ok(Self {
            mesh,
            degree: k,
            dof_coords,
            n_local,
            elem_dofs,
            maps,
            boundary_edge_dofs,
            boundary_dofs,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.dof_coords.len()
    }

    pub fn n_local(&self) -> usize {
        self.n_local
    }

    pub fn n_elements(&self) -> usize {
        self.maps.len()
    }

    pub fn element_dofs(&self, t: usize) -> &[usize] {
        &self.elem_dofs[t * self.n_local..(t + 1) * self.n_local]
    }

    pub fn element_map(&self, t: usize) -> &ElementMap {
        &self.maps[t]
    }

    /// Triangles touching the polygon boundary with at least one vertex.
    pub fn touches_boundary(&self, t: usize) -> bool {
        self.mesh.triangles[t]
            .iter()
            .any(|&v| self.mesh.boundary_param[v].is_some())
    }
}
