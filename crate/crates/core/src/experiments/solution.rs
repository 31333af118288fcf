//! Closed-form solutions of `u_t - Laplace u + u = f` used to drive studies.

use serde::{Deserialize, Serialize};

use crate::geometry::SmoothDomain;
use crate::{Result, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    /// `e^{-t} sin(x) sin(y)`, `f = 2u`.
    Sine,
    /// `(1 + t)(x^2 + y^2) / 4`.
    Quadratic,
    /// `e^{-t}`, `f = 0`, zero normal derivative.
    Constant,
}

/// A manufactured solution. The formulas are globally defined, so they are
/// their own extensions off the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedSolution {
    pub kind: SolutionKind,
}

impl ManufacturedSolution {
    pub fn new(kind: SolutionKind) -> Self {
        Self { kind }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            SolutionKind::Sine => "sine",
            SolutionKind::Quadratic => "quadratic",
            SolutionKind::Constant => "constant",
        }
    }

    pub fn value(&self, x: Vec2, t: f64) -> f64 {
        match self.kind {
            SolutionKind::Sine => (-t).exp() * x.x.sin() * x.y.sin(),
            SolutionKind::Quadratic => (1.0 + t) * x.norm_squared() / 4.0,
            SolutionKind::Constant => (-t).exp(),
        }
    }

    pub fn gradient(&self, x: Vec2, t: f64) -> Vec2 {
        match self.kind {
            SolutionKind::Sine => {
                let e = (-t).exp();
                Vec2::new(e * x.x.cos() * x.y.sin(), e * x.x.sin() * x.y.cos())
            }
            SolutionKind::Quadratic => x * ((1.0 + t) / 2.0),
            SolutionKind::Constant => Vec2::zeros(),
        }
    }

    pub fn laplacian(&self, x: Vec2, t: f64) -> f64 {
        match self.kind {
            SolutionKind::Sine => -2.0 * self.value(x, t),
            SolutionKind::Quadratic => 1.0 + t,
            SolutionKind::Constant => 0.0,
        }
    }

    pub fn time_derivative(&self, x: Vec2, t: f64) -> f64 {
        match self.kind {
            SolutionKind::Sine | SolutionKind::Constant => -self.value(x, t),
            SolutionKind::Quadratic => x.norm_squared() / 4.0,
        }
    }

    /// `f = u_t - Laplace u + u`.
    pub fn load(&self, x: Vec2, t: f64) -> f64 {
        self.time_derivative(x, t) - self.laplacian(x, t) + self.value(x, t)
    }

    /// `g~(x, t) = grad u(x, t) . n(pi(x))`.
    pub fn neumann(&self, domain: &SmoothDomain, x: Vec2, t: f64) -> Result<f64> {
        Ok(self.gradient(x, t).dot(&projected_normal(domain, x)?))
    }
}

/// `n(pi(x))`, the outward normal at the closest boundary point.
pub fn projected_normal(domain: &SmoothDomain, x: Vec2) -> Result<Vec2> {
    let p = domain.closest_point(x)?;
    Ok(domain.outward_normal(p.theta))
}
