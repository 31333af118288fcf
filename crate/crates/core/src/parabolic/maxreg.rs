//! Maximal regularity ratio for `u' + A_h u = f_h`, `u(0) = 0`.
//!
//! The load is piecewise linear in time between uniform nodes. Each mode
//! of the Duhamel integral is integrated exactly over every interval, so the
//! only time discretization left is Simpson's rule for the outer norm.

use nalgebra::DMatrix;
use serde::Serialize;

use super::spectral::EigenBasis;
use crate::fem::{DomainRule, FeSpace};
use crate::{Error, Result};

/// Nodal coefficient vectors of `f_h` at `t_n = n T / N` (columns).
#[derive(Debug, Clone)]
pub struct LoadSeries {
    pub t_end: f64,
    pub nodal: DMatrix<f64>,
}

impl LoadSeries {
    pub fn from_fn(n_dofs: usize, t_end: f64, intervals: usize, f: impl Fn(f64) -> Vec<f64>) -> Self {
        let mut nodal = DMatrix::zeros(n_dofs, intervals + 1);
        for j in 0..=intervals {
            let col = f(t_end * j as f64 / intervals as f64);
            nodal.set_column(j, &nalgebra::DVector::from_vec(col));
        }
        Self { t_end, nodal }
    }

    pub fn intervals(&self) -> usize {
        self.nodal.ncols() - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxRegResult {
    pub norm_au: f64,
    pub norm_du: f64,
    pub norm_f: f64,
    /// `(||A_h u|| + ||u'||) / ||f||`.
    pub ratio: f64,
    /// `(||A_h u||^2 + ||u'||^2)^{1/2} / ||f||`.
    pub ratio_l2_sum: f64,
}

/// Weights of `int_0^h exp(-lambda (h - s)) [a (1 - s/h) + b s/h] ds`
/// in `a` and `b`.
pub fn duhamel_weights(lambda: f64, h: f64) -> (f64, f64) {
    let x = lambda * h;
    if x < 1e-3 {
        // series of h (1 - e^{-x}) / x and h (x - 1 + e^{-x}) / x^2
        let total = h * (1.0 - x / 2.0 + x * x / 6.0 - x.powi(3) / 24.0);
        let wb = h * (0.5 - x / 6.0 + x * x / 24.0 - x.powi(3) / 120.0);
        return (total - wb, wb);
    }
    let em1 = (-x).exp_m1();
    let total = -h * em1 / x;
    let wb = h * (x + em1) / (x * x);
    (total - wb, wb)
}

/// Composite Simpson weights on `intervals + 1` uniform nodes.
pub fn simpson_weights(t_end: f64, intervals: usize) -> Result<Vec<f64>> {
    if intervals == 0 || intervals % 2 == 1 {
        return Err(Error::InvalidInput(format!("Simpson needs an even interval count, got {intervals}")));
    }
    let h = t_end / intervals as f64;
    Ok((0..=intervals)
        .map(|j| {
            let c = if j == 0 || j == intervals {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect())
}

/// Modal solution `u_hat` at the nodes for modal load `f_hat` (both
/// `n_modes x (N + 1)`).
pub fn duhamel_modal(values: &[f64], f_hat: &DMatrix<f64>, t_end: f64) -> DMatrix<f64> {
    let n_t = f_hat.ncols();
    let h = t_end / (n_t - 1) as f64;
    let mut u = DMatrix::zeros(f_hat.nrows(), n_t);
    for (i, &lambda) in values.iter().enumerate() {
        let decay = (-lambda * h).exp();
        let (wa, wb) = duhamel_weights(lambda, h);
        let mut prev = 0.0;
        for j in 1..n_t {
            let next = decay * prev + wa * f_hat[(i, j - 1)] + wb * f_hat[(i, j)];
            u[(i, j)] = next;
            prev = next;
        }
    }
    u
}

/// `L^p(0, T; L^p)` norm from per-node spatial norms.
fn time_norm(spatial: &[f64], weights: &[f64], p: f64) -> f64 {
    spatial.iter().zip(weights).map(|(s, w)| w * s.powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Spatial `L^p` norms of the columns of a nodal coefficient matrix.
fn column_norms(space: &FeSpace, rule: &DomainRule, nodal: &DMatrix<f64>, p: usize) -> Vec<f64> {
    (0..nodal.ncols())
        .map(|j| {
            let col: Vec<f64> = nodal.column(j).iter().copied().collect();
            let vals = rule.evaluate(space, &col);
            vals.iter()
                .zip(&rule.weights)
                .map(|(v, w)| w * v.abs().powi(p as i32))
                .sum::<f64>()
                .powf(1.0 / p as f64)
        })
        .collect()
}

/// Ratio of the maximal regularity inequality with `p = q`.
pub fn maxreg_ratio(
    space: &FeSpace,
    basis: &EigenBasis,
    rule: &DomainRule,
    load: &LoadSeries,
    p: usize,
) -> Result<MaxRegResult> {
    if p != 2 && p != 4 {
        return Err(Error::InvalidInput(format!("p = q must be 2 or 4, got {p}")));
    }
    let weights = simpson_weights(load.t_end, load.intervals())?;
    let mass_f = basis.mass() * &load.nodal;
    let f_hat = basis.vectors.transpose() * mass_f;
    let u_hat = duhamel_modal(&basis.values, &f_hat, load.t_end);
    let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(basis.values.clone()));
    let au_hat = &lam * &u_hat;
    let du_hat = &f_hat - &au_hat;
    let pf = p as f64;
    let (sa, sd, sf) = if p == 2 {
        // the eigenbasis is M-orthonormal: L2 norms are Euclidean in modal space
        let norms = |m: &DMatrix<f64>| (0..m.ncols()).map(|j| m.column(j).norm()).collect::<Vec<_>>();
        (norms(&au_hat), norms(&du_hat), norms(&f_hat))
    } else {
        let au = &basis.vectors * &au_hat;
        let du = &basis.vectors * &du_hat;
        (
            column_norms(space, rule, &au, p),
            column_norms(space, rule, &du, p),
            column_norms(space, rule, &load.nodal, p),
        )
    };
    let norm_au = time_norm(&sa, &weights, pf);
    let norm_du = time_norm(&sd, &weights, pf);
    let norm_f = time_norm(&sf, &weights, pf);
    let (ratio, ratio_l2_sum) = if norm_f == 0.0 {
        (0.0, 0.0)
    } else {
        ((norm_au + norm_du) / norm_f, norm_au.hypot(norm_du) / norm_f)
    };
    Ok(MaxRegResult {
        norm_au,
        norm_du,
        norm_f,
        ratio,
        ratio_l2_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duhamel_weights_integrate_linear_loads() {
        for &(lambda, h) in &[(0.0, 0.1), (1e-6, 0.1), (1.0, 0.1), (50.0, 0.01), (1e4, 0.1)] {
            let (wa, wb) = duhamel_weights(lambda, h);
            // brute-force midpoint integral
            let n = 200_000;
            let (mut ia, mut ib) = (0.0, 0.0);
            for i in 0..n {
                let s = (i as f64 + 0.5) * h / n as f64;
                let k = (-lambda * (h - s)).exp() * h / n as f64;
                ia += k * (1.0 - s / h);
                ib += k * s / h;
            }
            assert!((wa - ia).abs() < 1e-8 * (1.0 + ia.abs()), "{lambda}: {wa} vs {ia}");
            assert!((wb - ib).abs() < 1e-8 * (1.0 + ib.abs()), "{lambda}: {wb} vs {ib}");
        }
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let w = simpson_weights(2.0, 8).unwrap();
        let s: f64 = w.iter().enumerate().map(|(j, w)| w * (j as f64 * 0.25).powi(3)).sum();
        assert!((s - 4.0).abs() < 1e-12);
        assert!(simpson_weights(1.0, 7).is_err());
    }
}
