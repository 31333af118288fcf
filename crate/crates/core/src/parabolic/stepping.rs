//! One-step schemes for `M u' + K u = F(t)`.

use serde::{Deserialize, Serialize};

use crate::fem::solver::{pcg, DEFAULT_RTOL};
use crate::fem::sparse::{dot, CsrMatrix};
use crate::fem::Operators;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    BackwardEuler,
    CrankNicolson,
}

impl Scheme {
    /// Implicitness parameter of the theta-method.
    pub fn theta(self) -> f64 {
        match self {
            Scheme::BackwardEuler => 1.0,
            Scheme::CrankNicolson => 0.5,
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "backward-euler" | "be" => Ok(Scheme::BackwardEuler),
            "crank-nicolson" | "cn" => Ok(Scheme::CrankNicolson),
            other => Err(Error::Config(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Prefactored step matrices for a fixed `dt`.
#[derive(Debug, Clone)]
pub struct Stepper {
    pub dt: f64,
    pub scheme: Scheme,
    lhs: CsrMatrix,
    rhs: CsrMatrix,
    pub rtol: f64,
}

impl Stepper {
    pub fn new(ops: &Operators, dt: f64, scheme: Scheme) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
        }
        let th = scheme.theta();
        Ok(Self {
            dt,
            scheme,
            lhs: ops.mass.linear_combination(1.0, &ops.form, th * dt)?,
            rhs: ops.mass.linear_combination(1.0, &ops.form, -(1.0 - th) * dt)?,
            rtol: DEFAULT_RTOL,
        })
    }

    /// Advances `u` in place given the loads at both ends of the step.
    pub fn step(&self, u: &mut [f64], f_old: &[f64], f_new: &[f64]) -> Result<()> {
        let th = self.scheme.theta();
        let mut b = self.rhs.mul_vec(u);
        for i in 0..b.len() {
            b[i] += self.dt * ((1.0 - th) * f_old[i] + th * f_new[i]);
        }
        let max_iter = 10 * u.len().max(1);
        pcg(&self.lhs, &b, u, self.rtol, max_iter)?;
        Ok(())
    }

    /// Step without load.
    pub fn step_homogeneous(&self, u: &mut [f64]) -> Result<()> {
        let b = self.rhs.mul_vec(u);
        let max_iter = 10 * u.len().max(1);
        pcg(&self.lhs, &b, u, self.rtol, max_iter)?;
        Ok(())
    }
}

/// Single step as a free function.
pub fn step(
    ops: &Operators,
    u_n: &[f64],
    dt: f64,
    load: impl Fn(f64) -> Vec<f64>,
    t_n: f64,
    scheme: Scheme,
) -> Result<Vec<f64>> {
    let stepper = Stepper::new(ops, dt, scheme)?;
    let mut u = u_n.to_vec();
    stepper.step(&mut u, &load(t_n), &load(t_n + dt))?;
    Ok(u)
}

/// Discrete solution at uniformly spaced time nodes.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub scheme: Scheme,
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has at least the initial state")
    }
}

/// Number of uniform steps covering `[0, t_end]` with step at most `dt`.
pub fn step_count(t_end: f64, dt: f64) -> Result<usize> {
    if !(t_end > 0.0 && dt > 0.0 && dt <= t_end * (1.0 + 1e-12)) {
        return Err(Error::InvalidInput(format!("need 0 < dt <= T, got dt={dt}, T={t_end}")));
    }
    Ok((t_end / dt - 1e-9).ceil().max(1.0) as usize)
}

/// Runs the scheme from `u0`, calling `observe(n, t_n, u_n)` at every node
/// including `n = 0`. The step is shrunk so that it divides `t_end`.
pub fn solve_parabolic_with(
    ops: &Operators,
    u0: &[f64],
    mut load: impl FnMut(f64) -> Result<Vec<f64>>,
    t_end: f64,
    dt: f64,
    scheme: Scheme,
    mut observe: impl FnMut(usize, f64, &[f64]) -> Result<()>,
) -> Result<()> {
    let n = step_count(t_end, dt)?;
    let dt = t_end / n as f64;
    let stepper = Stepper::new(ops, dt, scheme)?;
    let mut u = u0.to_vec();
    observe(0, 0.0, &u)?;
    let mut f_old = load(0.0)?;
    for i in 1..=n {
        let t = i as f64 * dt;
        let f_new = load(t)?;
        stepper.step(&mut u, &f_old, &f_new)?;
        observe(i, t, &u)?;
        f_old = f_new;
    }
    Ok(())
}

pub fn solve_parabolic(
    ops: &Operators,
    u0: &[f64],
    load: impl FnMut(f64) -> Result<Vec<f64>>,
    t_end: f64,
    dt: f64,
    scheme: Scheme,
) -> Result<Trajectory> {
    let n = step_count(t_end, dt)?;
    let mut traj = Trajectory {
        scheme,
        dt: t_end / n as f64,
        times: Vec::with_capacity(n + 1),
        states: Vec::with_capacity(n + 1),
    };
    solve_parabolic_with(ops, u0, load, t_end, dt, scheme, |_, t, u| {
        traj.times.push(t);
        traj.states.push(u.to_vec());
        Ok(())
    })?;
    Ok(traj)
}

/// `||u||_M = sqrt(u^T M u)`.
pub fn mass_norm(mass: &CsrMatrix, u: &[f64]) -> f64 {
    dot(u, &mass.mul_vec(u)).max(0.0).sqrt()
}

/// `A_h u = M^{-1} K u`.
pub fn apply_ah(ops: &Operators, u: &[f64]) -> Result<Vec<f64>> {
    crate::fem::solve_spd(&ops.mass, &ops.form.mul_vec(u), DEFAULT_RTOL)
}
