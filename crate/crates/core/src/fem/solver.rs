//! Jacobi-preconditioned conjugate gradients.

use super::sparse::{dot, norm2, CsrMatrix};
use crate::{Error, Result};

pub const DEFAULT_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Final `||b - A x|| / ||b||`.
    pub residual: f64,
}

/// Solves `A x = b` for SPD `A` to `||A x - b|| <= rtol ||b||`.
pub fn solve_spd(a: &CsrMatrix, b: &[f64], rtol: f64) -> Result<Vec<f64>> {
    let mut x = vec![0.0; a.n];
    pcg(a, b, &mut x, rtol, 10 * a.n.max(1))?;
    Ok(x)
}

/// Preconditioned CG starting from the contents of `x`.
pub fn pcg(a: &CsrMatrix, b: &[f64], x: &mut [f64], rtol: f64, max_iter: usize) -> Result<SolveStats> {
    let n = a.n;
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(SolveStats {
            iterations: 0,
            residual: 0.0,
        });
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut r = a.mul_vec(x);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let target = rtol * bnorm;
    let mut rnorm = norm2(&r);
    if rnorm <= target {
        return Ok(SolveStats {
            iterations: 0,
            residual: rnorm / bnorm,
        });
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        a.mul_vec_into(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rnorm = norm2(&r);
        if rnorm <= target {
            // guard against drift in the recursive residual
            let mut true_r = a.mul_vec(x);
            for i in 0..n {
                true_r[i] = b[i] - true_r[i];
            }
            let true_norm = norm2(&true_r);
            if true_norm <= target {
                return Ok(SolveStats {
                    iterations: it,
                    residual: true_norm / bnorm,
                });
            }
            r = true_r;
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: rnorm / bnorm,
    })
}
