//! Spectral realization of `A_h` and of the semigroup `exp(-t A_h)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use super::stepping::{mass_norm, step_count, Scheme, Stepper};
use crate::fem::{norms::SamplePlan, FeSpace, Operators};
use crate::{Error, Result};

pub const DEFAULT_EIGEN_CAP: usize = 3000;

/// `M`-orthonormal generalized eigenpairs of `K v = lambda M v`, ascending.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector of `values[i]`.
    pub vectors: DMatrix<f64>,
    mass: DMatrix<f64>,
}

impl EigenBasis {
    pub fn new(ops: &Operators, cap: usize) -> Result<Self> {
        let n = ops.mass.n;
        if n > cap {
            return Err(Error::TooLarge { dofs: n, cap });
        }
        let m = ops.mass.to_dense();
        let k = ops.form.to_dense();
        let chol = m
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Factorization("mass matrix is not positive definite".into()))?;
        let l = chol.l();
        // C = L^{-1} K L^{-T}
        let linv_k = l
            .solve_lower_triangular(&k)
            .ok_or_else(|| Error::Factorization("triangular solve failed".into()))?;
        let c = l
            .solve_lower_triangular(&linv_k.transpose())
            .ok_or_else(|| Error::Factorization("triangular solve failed".into()))?;
        let c = (&c + c.transpose()) * 0.5;
        let eig = SymmetricEigen::new(c);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let w = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        let vectors = l
            .transpose()
            .solve_upper_triangular(&w)
            .ok_or_else(|| Error::Factorization("triangular solve failed".into()))?;
        Ok(Self { values, vectors, mass: m })
    }

    /// Dense mass matrix used to build the basis.
    pub fn mass(&self) -> &DMatrix<f64> {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Modal coefficients `V^T M v`.
    pub fn coefficients(&self, v: &[f64]) -> Vec<f64> {
        let mv = &self.mass * DVector::from_column_slice(v);
        (self.vectors.transpose() * mv).iter().copied().collect()
    }

    /// `sum_i c_i v_i`.
    pub fn synthesize(&self, c: &[f64]) -> Vec<f64> {
        (&self.vectors * DVector::from_column_slice(c)).iter().copied().collect()
    }

    /// `exp(-t A_h) v0`.
    pub fn semigroup(&self, v0: &[f64], t: f64) -> Vec<f64> {
        let c = self.coefficients(v0);
        let d: Vec<f64> = c.iter().zip(&self.values).map(|(c, l)| c * (-l * t).exp()).collect();
        self.synthesize(&d)
    }

    /// `d/dt exp(-t A_h) v0 = -A_h exp(-t A_h) v0`.
    pub fn semigroup_derivative(&self, v0: &[f64], t: f64) -> Vec<f64> {
        let c = self.coefficients(v0);
        let d: Vec<f64> = c.iter().zip(&self.values).map(|(c, l)| -l * c * (-l * t).exp()).collect();
        self.synthesize(&d)
    }

    /// `max |V^T M V - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.vectors.transpose() * &self.mass * &self.vectors;
        (g - DMatrix::identity(self.len(), self.len())).abs().max()
    }
}

/// Evaluator of `exp(-t A_h)`: exact in the eigenbasis, or backward Euler
/// substepping with `dt = 1e-3 t` above the eigen cap.
#[derive(Debug, Clone)]
pub enum Semigroup {
    Spectral(EigenBasis),
    Substep(Operators),
}

impl Semigroup {
    pub fn new(ops: &Operators, cap: usize) -> Result<Self> {
        match EigenBasis::new(ops, cap) {
            Ok(b) => Ok(Semigroup::Spectral(b)),
            Err(Error::TooLarge { .. }) => Ok(Semigroup::Substep(ops.clone())),
            Err(e) => Err(e),
        }
    }

    pub fn apply(&self, v0: &[f64], t: f64) -> Result<Vec<f64>> {
        if t < 0.0 {
            return Err(Error::InvalidInput(format!("negative time {t}")));
        }
        if t == 0.0 {
            return Ok(v0.to_vec());
        }
        match self {
            Semigroup::Spectral(b) => Ok(b.semigroup(v0, t)),
            Semigroup::Substep(ops) => {
                let n = step_count(t, 1e-3 * t)?;
                let stepper = Stepper::new(ops, t / n as f64, Scheme::BackwardEuler)?;
                let mut u = v0.to_vec();
                for _ in 0..n {
                    stepper.step_homogeneous(&mut u)?;
                }
                Ok(u)
            }
        }
    }

    /// `(exp(-t A_h) v0, d/dt exp(-t A_h) v0)`.
    pub fn apply_with_derivative(&self, v0: &[f64], t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        match self {
            Semigroup::Spectral(b) => Ok((b.semigroup(v0, t), b.semigroup_derivative(v0, t))),
            Semigroup::Substep(ops) => {
                let u = self.apply(v0, t)?;
                let au = super::stepping::apply_ah(ops, &u)?;
                Ok((u, au.into_iter().map(|v| -v).collect()))
            }
        }
    }
}

pub fn semigroup_apply(semigroup: &Semigroup, v0: &[f64], t: f64) -> Result<Vec<f64>> {
    semigroup.apply(v0, t)
}

/// `||u_h(t)||_q` and `t ||d_t u_h(t)||_q` for `q = 2` and `q = inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothingBounds {
    pub t: f64,
    pub l2: f64,
    pub l2_derivative: f64,
    pub linf: f64,
    pub linf_derivative: f64,
}

pub fn smoothing_bounds(
    space: &FeSpace,
    ops: &Operators,
    semigroup: &Semigroup,
    plan: &SamplePlan,
    v0: &[f64],
    t: f64,
) -> Result<SmoothingBounds> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("smoothing bounds need t > 0, got {t}")));
    }
    let (u, du) = semigroup.apply_with_derivative(v0, t)?;
    Ok(SmoothingBounds {
        t,
        l2: mass_norm(&ops.mass, &u),
        l2_derivative: t * mass_norm(&ops.mass, &du),
        linf: plan.linf_norm(space, &u),
        linf_derivative: t * plan.linf_norm(space, &du),
    })
}
