//! Dyadic space-time annuli around `(x0, 0)` with parabolic radius
//! `rho(x, t) = max(|x - x0|, sqrt(t))`.

use serde::Serialize;

use crate::{Error, Result, Vec2};

#[derive(Debug, Clone, Serialize)]
pub struct DyadicDecomposition {
    pub x0: [f64; 2],
    pub t_end: f64,
    pub h: f64,
    pub c_star: f64,
    pub j_star: usize,
    /// `d_j = 2^{-j-1}` for `j = 0..=j_star`.
    pub radii: Vec<f64>,
}

/// Classification of a space-time point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Cell {
    /// `rho <= d_{J*}`.
    Inner,
    /// `d_j <= rho < 2 d_j`; points with `rho >= 1` fall in `j = 0`.
    Annulus(usize),
}

pub fn dyadic(x0: Vec2, t_end: f64, h: f64, c_star: f64) -> Result<DyadicDecomposition> {
    if !(c_star >= 1.0) || !(h > 0.0) || !(t_end > 0.0) {
        return Err(Error::InvalidInput(format!(
            "dyadic needs C* >= 1, h > 0, T > 0; got C*={c_star}, h={h}, T={t_end}"
        )));
    }
    // largest J with d_J >= C* h
    let j = ((1.0 / (c_star * h)).log2() - 1.0 + 1e-12).floor() as i64;
    if j < 1 {
        return Err(Error::DegenerateDecomposition { j_star: j });
    }
    let j_star = j as usize;
    Ok(DyadicDecomposition {
        x0: [x0.x, x0.y],
        t_end,
        h,
        c_star,
        j_star,
        radii: (0..=j_star).map(radius).collect(),
    })
}

fn radius(j: usize) -> f64 {
    0.5f64.powi(j as i32 + 1)
}

impl DyadicDecomposition {
    pub fn rho(&self, x: Vec2, t: f64) -> f64 {
        (x - Vec2::from(self.x0)).norm().max(t.max(0.0).sqrt())
    }

    pub fn classify(&self, x: Vec2, t: f64) -> Cell {
        self.classify_rho(self.rho(x, t))
    }

    pub fn classify_rho(&self, rho: f64) -> Cell {
        if rho <= self.radii[self.j_star] {
            return Cell::Inner;
        }
        if rho >= self.radii[0] {
            return Cell::Annulus(0);
        }
        let mut j = ((1.0 / rho).log2() - 1.0).ceil().max(0.0) as usize;
        // repair rounding at exact powers of two
        while j > 0 && rho >= 2.0 * radius(j) {
            j -= 1;
        }
        while rho < radius(j) {
            j += 1;
        }
        Cell::Annulus(j.min(self.j_star))
    }

    /// Slot in a tally vector: annuli `0..=j_star`, then the inner cell.
    pub fn slot(&self, cell: Cell) -> usize {
        match cell {
            Cell::Annulus(j) => j,
            Cell::Inner => self.j_star + 1,
        }
    }

    pub fn n_slots(&self) -> usize {
        self.j_star + 2
    }

    /// Radius that weights the tally of a slot.
    pub fn slot_radius(&self, slot: usize) -> f64 {
        self.radii[slot.min(self.j_star)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radii_and_depth() {
        let d = dyadic(Vec2::zeros(), 0.25, 0.1, 2.0).unwrap();
        assert_eq!(d.j_star, 1);
        assert!(d.c_star * d.h <= d.radii[d.j_star] && d.radii[d.j_star] <= 2.0 * d.c_star * d.h);
        let d = dyadic(Vec2::zeros(), 0.25, 0.01, 2.0).unwrap();
        assert_eq!(d.radii[d.j_star], 0.03125);
        assert!(matches!(
            dyadic(Vec2::zeros(), 0.25, 0.2, 2.0),
            Err(Error::DegenerateDecomposition { .. })
        ));
    }

    #[test]
    fn classification_examples() {
        let d = dyadic(Vec2::zeros(), 0.25, 0.01, 2.0).unwrap();
        assert_eq!(d.classify(Vec2::zeros(), 0.0), Cell::Inner);
        assert_eq!(d.classify(Vec2::new(0.3, 0.0), 0.04), Cell::Annulus(1));
        // ties at rho = d_j go to j
        assert_eq!(d.classify_rho(0.25), Cell::Annulus(1));
        assert_eq!(d.classify_rho(0.125), Cell::Annulus(2));
        assert_eq!(d.classify_rho(0.5), Cell::Annulus(0));
        assert_eq!(d.classify_rho(0.03125), Cell::Inner);
        assert_eq!(d.classify_rho(0.0313), Cell::Annulus(4));
    }

    #[test]
    fn classifier_respects_bounds() {
        let d = dyadic(Vec2::zeros(), 0.25, 0.003, 1.0).unwrap();
        for i in 1..5000 {
            let rho = i as f64 / 4000.0;
            match d.classify_rho(rho) {
                Cell::Inner => assert!(rho <= d.radii[d.j_star]),
                Cell::Annulus(0) if rho >= 1.0 => {}
                Cell::Annulus(j) => assert!(d.radii[j] <= rho && rho < 2.0 * d.radii[j], "{rho} -> {j}"),
            }
        }
    }
}
