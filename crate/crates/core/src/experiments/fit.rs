//! Experimental orders of convergence and least-squares rate fits.

use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    /// `log(e_i / e_{i+1}) / log(h_i / h_{i+1})` for consecutive fitted rows.
    pub eoc: Vec<f64>,
    /// Slope of `log e` against `log h`.
    pub slope: f64,
    /// Slope of `log(e / |log h|^w)` against `log h`.
    pub slope_log_corrected: f64,
    pub log_power: f64,
    /// Rows with `e == 0`, reported as exact and left out of the fit.
    pub exact_rows: Vec<usize>,
}

impl RateFit {
    pub fn last_eoc(&self) -> Option<f64> {
        self.eoc.last().copied()
    }
}

pub fn fit_rate(rows: &[(f64, f64)], log_power: f64) -> Result<RateFit> {
    let mut exact_rows = Vec::new();
    let mut pts = Vec::new();
    for (i, &(h, e)) in rows.iter().enumerate() {
        if !(h > 0.0) || !e.is_finite() || e < 0.0 {
            return Err(Error::DegenerateFit(format!("row {i} has h = {h}, e = {e}")));
        }
        if e == 0.0 {
            exact_rows.push(i);
        } else {
            pts.push((h, e));
        }
    }
    if pts.len() < 2 {
        return Err(Error::DegenerateFit("fewer than two nonzero rows".into()));
    }
    if pts.iter().all(|p| p.0 == pts[0].0) {
        return Err(Error::DegenerateFit("all h are equal".into()));
    }
    let eoc = pts
        .windows(2)
        .map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln())
        .collect();
    let x: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let y_corr: Vec<f64> = pts
        .iter()
        .map(|p| p.1.ln() - log_power * p.0.ln().abs().ln())
        .collect();
    Ok(RateFit {
        eoc,
        slope: slope(&x, &y),
        slope_log_corrected: slope(&x, &y_corr),
        log_power,
        exact_rows,
    })
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_rows_give_second_order() {
        let f = fit_rate(&[(0.1, 0.1), (0.05, 0.025)], 1.0).unwrap();
        assert!((f.eoc[0] - 2.0).abs() < 1e-12);
        assert!((f.slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn linear_errors_have_unit_slope() {
        let rows: Vec<_> = [0.4, 0.2, 0.13, 0.05].iter().map(|&h| (h, 3.7 * h)).collect();
        let f = fit_rate(&rows, 1.0).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_correction_recovers_the_power() {
        let rows: Vec<_> = [0.2, 0.1, 0.05, 0.025]
            .iter()
            .map(|&h: &f64| (h, h * h * h.ln().abs()))
            .collect();
        let f = fit_rate(&rows, 1.0).unwrap();
        assert!(f.slope > 1.6 && f.slope < 2.0, "{}", f.slope);
        assert!((f.slope_log_corrected - 2.0).abs() < 0.05);
    }

    #[test]
    fn zero_errors_are_exact_and_equal_h_is_degenerate() {
        let f = fit_rate(&[(0.4, 0.0), (0.2, 0.1), (0.1, 0.025)], 1.0).unwrap();
        assert_eq!(f.exact_rows, vec![0]);
        assert!(matches!(fit_rate(&[(0.1, 1.0), (0.1, 2.0)], 1.0), Err(Error::DegenerateFit(_))));
    }
}
