//! Mass and stiffness matrices and load vectors.

use rayon::prelude::*;

use super::basis::Tabulation;
use super::quadrature::{edge_quadrature, triangle_quadrature};
use super::sparse::CsrMatrix;
use super::space::FeSpace;
use crate::{Result, Vec2};

/// Mass matrix `M`, pure stiffness `S` and the form matrix `K = S + M`
/// of `a(u, v) = (grad u, grad v) + (u, v)`. All three share one pattern.
#[derive(Debug, Clone)]
pub struct Operators {
    pub mass: CsrMatrix,
    pub stiffness: CsrMatrix,
    pub form: CsrMatrix,
}

impl Operators {
    pub fn assemble(space: &FeSpace) -> Result<Self> {
        let (mass, stiffness) = assemble_mass_stiffness(space)?;
        let form = stiffness.linear_combination(1.0, &mass, 1.0)?;
        Ok(Self { mass, stiffness, form })
    }
}

pub fn assemble_mass(space: &FeSpace) -> Result<CsrMatrix> {
    Ok(assemble_mass_stiffness(space)?.0)
}

pub fn assemble_form(space: &FeSpace) -> Result<CsrMatrix> {
    Ok(Operators::assemble(space)?.form)
}

fn assemble_mass_stiffness(space: &FeSpace) -> Result<(CsrMatrix, CsrMatrix)> {
    let k = space.degree;
    let rule = triangle_quadrature(2 * k)?;
    let tab = Tabulation::new(k, &rule.points)?;
    let nl = space.n_local();
    let locals: Vec<(Vec<f64>, Vec<f64>)> = (0..space.n_elements())
        .into_par_iter()
        .map(|t| {
            let map = space.element_map(t);
            let det = map.det.abs();
            let mut m = vec![0.0; nl * nl];
            let mut s = vec![0.0; nl * nl];
            for (q, &w) in rule.weights.iter().enumerate() {
                let wq = w * det;
                let phi = &tab.values[q];
                let grads: Vec<Vec2> = tab.grads[q].iter().map(|g| map.grad(*g)).collect();
                for i in 0..nl {
                    for j in 0..nl {
                        m[i * nl + j] += wq * phi[i] * phi[j];
                        s[i * nl + j] += wq * grads[i].dot(&grads[j]);
                    }
                }
            }
            (m, s)
        })
        .collect();
    let mut tm = Vec::with_capacity(locals.len() * nl * nl);
    let mut ts = Vec::with_capacity(locals.len() * nl * nl);
    for (t, (m, s)) in locals.iter().enumerate() {
        let dofs = space.element_dofs(t);
        for i in 0..nl {
            for j in 0..nl {
                tm.push((dofs[i], dofs[j], m[i * nl + j]));
                ts.push((dofs[i], dofs[j], s[i * nl + j]));
            }
        }
    }
    let n = space.n_dofs();
    Ok((CsrMatrix::from_triplets(n, &tm), CsrMatrix::from_triplets(n, &ts)))
}

/// Physical quadrature points of every element with basis values, used to
/// assemble loads repeatedly without re-evaluating geometry.
#[derive(Debug, Clone)]
pub struct DomainRule {
    pub n_q: usize,
    /// `n_elements * n_q` points, element-major.
    pub points: Vec<Vec2>,
    /// Weights including the element Jacobian.
    pub weights: Vec<f64>,
    pub tab: Tabulation,
}

impl DomainRule {
    pub fn new(space: &FeSpace, degree: usize) -> Result<Self> {
        let rule = triangle_quadrature(degree)?;
        let tab = Tabulation::new(space.degree, &rule.points)?;
        let n_q = rule.len();
        let mut points = Vec::with_capacity(space.n_elements() * n_q);
        let mut weights = Vec::with_capacity(space.n_elements() * n_q);
        for t in 0..space.n_elements() {
            let map = space.element_map(t);
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                points.push(map.to_physical(*p));
                weights.push(w * map.det.abs());
            }
        }
        Ok(Self {
            n_q,
            points,
            weights,
            tab,
        })
    }

    /// Default load rule, exact to degree `2k + 2`.
    pub fn for_loads(space: &FeSpace) -> Result<Self> {
        Self::new(space, 2 * space.degree + 2)
    }

    /// `(f, phi_i)` from values of `f` at `self.points`.
    pub fn load_from_values(&self, space: &FeSpace, values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; space.n_dofs()];
        for t in 0..space.n_elements() {
            let dofs = space.element_dofs(t);
            for q in 0..self.n_q {
                let idx = t * self.n_q + q;
                let fw = values[idx] * self.weights[idx];
                for (i, &d) in dofs.iter().enumerate() {
                    out[d] += fw * self.tab.values[q][i];
                }
            }
        }
        out
    }

    pub fn load<F: Fn(Vec2) -> f64 + Sync>(&self, space: &FeSpace, f: F) -> Vec<f64> {
        let values: Vec<f64> = self.points.par_iter().map(|&p| f(p)).collect();
        self.load_from_values(space, &values)
    }

    /// Values of the finite element function with `coeffs` at all points.
    pub fn evaluate(&self, space: &FeSpace, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.points.len()];
        for t in 0..space.n_elements() {
            let dofs = space.element_dofs(t);
            for q in 0..self.n_q {
                out[t * self.n_q + q] = dofs
                    .iter()
                    .zip(&self.tab.values[q])
                    .map(|(&d, phi)| coeffs[d] * phi)
                    .sum();
            }
        }
        out
    }

    /// Values and physical gradients at all points.
    pub fn evaluate_with_gradient(&self, space: &FeSpace, coeffs: &[f64]) -> (Vec<f64>, Vec<Vec2>) {
        let mut vals = vec![0.0; self.points.len()];
        let mut grads = vec![Vec2::zeros(); self.points.len()];
        for t in 0..space.n_elements() {
            let dofs = space.element_dofs(t);
            let map = space.element_map(t);
            for q in 0..self.n_q {
                let mut v = 0.0;
                let mut g = [0.0; 2];
                for (i, &d) in dofs.iter().enumerate() {
                    v += coeffs[d] * self.tab.values[q][i];
                    g[0] += coeffs[d] * self.tab.grads[q][i][0];
                    g[1] += coeffs[d] * self.tab.grads[q][i][1];
                }
                vals[t * self.n_q + q] = v;
                grads[t * self.n_q + q] = map.grad(g);
            }
        }
        (vals, grads)
    }
}

/// Gauss points on every boundary edge with the 1D Lagrange basis of the
/// edge trace.
#[derive(Debug, Clone)]
pub struct BoundaryRule {
    pub n_q: usize,
    /// `n_boundary_edges * n_q` points, edge-major.
    pub points: Vec<Vec2>,
    /// Weights including the edge length.
    pub weights: Vec<f64>,
    /// Trace basis values per point on an edge (`k + 1` each).
    pub basis: Vec<Vec<f64>>,
}

/// Lagrange polynomials on the equispaced nodes `0, 1/k, ..., 1`.
pub fn lagrange_1d(k: usize, s: f64) -> Vec<f64> {
    let nodes: Vec<f64> = (0..=k).map(|j| j as f64 / k as f64).collect();
    (0..=k)
        .map(|i| {
            (0..=k)
                .filter(|&j| j != i)
                .map(|j| (s - nodes[j]) / (nodes[i] - nodes[j]))
                .product()
        })
        .collect()
}

impl BoundaryRule {
    pub fn new(space: &FeSpace, degree: usize) -> Result<Self> {
        let rule = edge_quadrature(degree)?;
        let n_q = rule.len();
        let mesh = &space.mesh;
        let mut points = Vec::with_capacity(mesh.boundary_edges.len() * n_q);
        let mut weights = Vec::with_capacity(mesh.boundary_edges.len() * n_q);
        for e in &mesh.boundary_edges {
            let a = mesh.vertices[e.vertices[0]];
            let b = mesh.vertices[e.vertices[1]];
            let len = (b - a).norm();
            for (s, w) in rule.points.iter().zip(&rule.weights) {
                points.push(a + *s * (b - a));
                weights.push(w * len);
            }
        }
        let basis = rule.points.iter().map(|&s| lagrange_1d(space.degree, s)).collect();
        Ok(Self {
            n_q,
            points,
            weights,
            basis,
        })
    }

    pub fn for_loads(space: &FeSpace) -> Result<Self> {
        Self::new(space, 2 * space.degree + 2)
    }

    pub fn load_from_values(&self, space: &FeSpace, values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; space.n_dofs()];
        for (e, dofs) in space.boundary_edge_dofs.iter().enumerate() {
            for q in 0..self.n_q {
                let idx = e * self.n_q + q;
                let gw = values[idx] * self.weights[idx];
                for (i, &d) in dofs.iter().enumerate() {
                    out[d] += gw * self.basis[q][i];
                }
            }
        }
        out
    }

    pub fn load<G: Fn(Vec2) -> f64 + Sync>(&self, space: &FeSpace, g: G) -> Vec<f64> {
        let values: Vec<f64> = self.points.par_iter().map(|&p| g(p)).collect();
        self.load_from_values(space, &values)
    }

    /// Trace values of a finite element function at all points.
    pub fn evaluate(&self, space: &FeSpace, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.points.len()];
        for (e, dofs) in space.boundary_edge_dofs.iter().enumerate() {
            for q in 0..self.n_q {
                out[e * self.n_q + q] = dofs.iter().zip(&self.basis[q]).map(|(&d, b)| coeffs[d] * b).sum();
            }
        }
        out
    }
}

/// `(f, phi_i)` over the polygon.
pub fn assemble_domain_load<F: Fn(Vec2) -> f64 + Sync>(space: &FeSpace, f: F) -> Result<Vec<f64>> {
    Ok(DomainRule::for_loads(space)?.load(space, f))
}

/// `(g, phi_i)` over the polygon boundary.
pub fn assemble_boundary_load<G: Fn(Vec2) -> f64 + Sync>(space: &FeSpace, g: G) -> Result<Vec<f64>> {
    Ok(BoundaryRule::for_loads(space)?.load(space, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SmoothDomain;
    use crate::mesh::{build_mesh, Mesh};
    use std::sync::Arc;

    fn right_triangle_space(k: usize) -> FeSpace {
        let mesh = Mesh::from_parts(
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)],
            vec![None; 3],
            vec![[0, 1, 2]],
        )
        .unwrap();
        FeSpace::new(Arc::new(mesh), k).unwrap()
    }

    #[test]
    fn p1_matrices_on_unit_right_triangle() {
        let space = right_triangle_space(1);
        let ops = Operators::assemble(&space).unwrap();
        let m = [[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]];
        let s = [[2.0, -1.0, -1.0], [-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((ops.mass.get(i, j) - m[i][j] / 24.0).abs() < 1e-15);
                assert!((ops.stiffness.get(i, j) - s[i][j] / 2.0).abs() < 1e-15);
                assert!((ops.form.get(i, j) - s[i][j] / 2.0 - m[i][j] / 24.0).abs() < 1e-15);
            }
        }
        let load = assemble_domain_load(&space, |_| 1.0).unwrap();
        for v in load {
            assert!((v - 1.0 / 6.0).abs() < 1e-15);
        }
        // (x, phi_i): int x (1-x-y) = 1/24, int x^2 = 1/12, int x y = 1/24
        let load = assemble_domain_load(&space, |p| p.x).unwrap();
        for (v, e) in load.iter().zip([1.0 / 24.0, 1.0 / 12.0, 1.0 / 24.0]) {
            assert!((v - e).abs() < 1e-15);
        }
    }

    #[test]
    fn loads_reproduce_area_and_perimeter() {
        let disk = SmoothDomain::disk(1.0).unwrap();
        let mesh = Arc::new(build_mesh(&disk, 0.25).unwrap());
        for k in 1..=3 {
            let space = FeSpace::new(mesh.clone(), k).unwrap();
            let f: f64 = assemble_domain_load(&space, |_| 1.0).unwrap().iter().sum();
            let g: f64 = assemble_boundary_load(&space, |_| 1.0).unwrap().iter().sum();
            assert!((f - mesh.polygon_area()).abs() < 1e-10);
            assert!((g - mesh.perimeter()).abs() < 1e-10);
            let ops = Operators::assemble(&space).unwrap();
            assert!(ops.mass.asymmetry() < 1e-12);
            assert!(ops.form.asymmetry() < 1e-12);
            let ones = vec![1.0; space.n_dofs()];
            let k1 = ops.form.mul_vec(&ones);
            let m1 = ops.mass.mul_vec(&ones);
            for (a, b) in k1.iter().zip(&m1) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
