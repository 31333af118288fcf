//! Discrete regularized Green's functions and the norms of their gap.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::delta::{delta_load, RegularizedDelta};
use super::dyadic::DyadicDecomposition;
use crate::fem::{solve_spd, DomainRule, FeSpace, Locator, Operators};
use crate::parabolic::{solve_parabolic, step_count, Scheme, Stepper, Trajectory};
use crate::{Error, Result, Vec2};

const PROJECTION_RTOL: f64 = 1e-12;

/// Homogeneous backward Euler flow from `P_h delta` on one space, advanced
/// lazily so long runs never hold the whole trajectory.
#[derive(Debug, Clone)]
pub struct GreenEvolution {
    pub space: Arc<FeSpace>,
    pub ops: Operators,
    pub dt: f64,
    /// `P_h delta`.
    pub initial: Vec<f64>,
}

impl GreenEvolution {
    pub fn new(space: Arc<FeSpace>, delta: &RegularizedDelta, dt: f64) -> Result<Self> {
        let ops = Operators::assemble(&space)?;
        Self::with_operators(space, ops, delta, dt)
    }

    pub fn with_operators(space: Arc<FeSpace>, ops: Operators, delta: &RegularizedDelta, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
        }
        let rhs = delta_load(&space, delta)?;
        let initial = solve_spd(&ops.mass, &rhs, PROJECTION_RTOL)?;
        Ok(Self { space, ops, dt, initial })
    }
}

/// `Gamma_h` at every step of `[0, T]`.
pub fn evolve_green(evolution: &GreenEvolution, t_end: f64) -> Result<Trajectory> {
    check_horizon(t_end)?;
    solve_parabolic(
        &evolution.ops,
        &evolution.initial,
        |_| Ok(vec![0.0; evolution.initial.len()]),
        t_end,
        evolution.dt,
        Scheme::BackwardEuler,
    )
}

fn check_horizon(t_end: f64) -> Result<()> {
    if !(t_end > 0.0 && t_end <= 1.0) {
        return Err(Error::InvalidInput(format!("Green evolutions need 0 < T <= 1, got {t_end}")));
    }
    Ok(())
}

/// Fine-space stand-in for the continuous Green's function: the coarse
/// `delta` projected onto `fine` and evolved with `dt_ref`.
pub fn reference_green(fine: Arc<FeSpace>, delta: &RegularizedDelta, dt_ref: f64) -> Result<GreenEvolution> {
    GreenEvolution::new(fine, delta, dt_ref)
}

/// Precomputed evaluation of functions on one space at fixed points.
#[derive(Debug, Clone)]
pub struct Probe {
    n_local: usize,
    dofs: Vec<usize>,
    values: Vec<f64>,
    /// Physical basis gradients.
    grads: Vec<[f64; 2]>,
    /// Points that fell outside the mesh and use the nearest element.
    pub outside: usize,
}

impl Probe {
    pub fn new(space: &FeSpace, points: &[Vec2]) -> Result<Self> {
        let locator = Locator::new(space);
        let n_local = space.n_local();
        let located: Vec<_> = points.par_iter().map(|&x| locator.find_or_nearest(space, x)).collect();
        let mut probe = Probe {
            n_local,
            dofs: Vec::with_capacity(points.len() * n_local),
            values: Vec::with_capacity(points.len() * n_local),
            grads: Vec::with_capacity(points.len() * n_local),
            outside: 0,
        };
        for loc in located {
            if !loc.inside {
                probe.outside += 1;
            }
            let (vals, grads) = crate::fem::basis::reference_basis(space.degree, loc.xi)?;
            let map = space.element_map(loc.element);
            for (i, &d) in space.element_dofs(loc.element).iter().enumerate() {
                let g = map.grad(grads[i]);
                probe.dofs.push(d);
                probe.values.push(vals[i]);
                probe.grads.push([g.x, g.y]);
            }
        }
        Ok(probe)
    }

    pub fn len(&self) -> usize {
        self.dofs.len() / self.n_local
    }

    pub fn is_empty(&self) -> bool {
        self.dofs.is_empty()
    }

    /// Values and gradients of `coeffs` at the probe points.
    pub fn evaluate(&self, coeffs: &[f64], values: &mut [f64], grads: &mut [[f64; 2]]) {
        let nl = self.n_local;
        values
            .par_iter_mut()
            .zip(grads.par_iter_mut())
            .enumerate()
            .for_each(|(p, (v, g))| {
                let (mut sv, mut sg) = (0.0, [0.0; 2]);
                for i in p * nl..(p + 1) * nl {
                    let c = coeffs[self.dofs[i]];
                    sv += c * self.values[i];
                    sg[0] += c * self.grads[i][0];
                    sg[1] += c * self.grads[i][1];
                }
                *v = sv;
                *g = sg;
            });
    }
}

/// Norms of `F = Gamma_h - Gamma_ref` over `Omega_h x (0, T)`.
#[derive(Debug, Clone, Serialize)]
pub struct FNorms {
    pub t_end: f64,
    pub dt: f64,
    /// `||F||_{L1(0,T; W11)}`.
    pub l1_w11: f64,
    /// `||F_t||_{L1(Q)}`.
    pub ft_l1: f64,
    /// `(int int_{Q_j} |F|^2 + |grad F|^2)^{1/2}` for annuli `0..=J*`, then
    /// the inner cell.
    pub annulus_h1: Vec<f64>,
    /// `d_j^2` times the above, `N = 2`.
    pub annulus_tally: Vec<f64>,
    pub tally_sum: f64,
    /// Space-time measure per slot (bookkeeping check).
    pub annulus_measure: Vec<f64>,
    /// Quadrature points evaluated by extrapolation.
    pub outside_points: usize,
}

/// Streams both evolutions in lockstep on the coarser time grid and
/// integrates `F` with element quadrature of `quad_space`.
pub fn f_norms(
    quad_space: &FeSpace,
    gamma_h: &GreenEvolution,
    reference: &GreenEvolution,
    decomposition: &DyadicDecomposition,
    t_end: f64,
) -> Result<FNorms> {
    check_horizon(t_end)?;
    let dt_grid = gamma_h.dt.max(reference.dt);
    let n_steps = step_count(t_end, dt_grid)?;
    let dt = t_end / n_steps as f64;
    let substeps = |own: f64| -> Result<usize> {
        let r = dt / own;
        let n = r.round().max(1.0);
        if (r - n).abs() > 1e-6 * n {
            return Err(Error::InvalidInput(format!("time steps do not nest: {dt} / {own}")));
        }
        Ok(n as usize)
    };
    let sub_a = substeps(gamma_h.dt)?;
    let sub_b = substeps(reference.dt)?;
    let step_a = Stepper::new(&gamma_h.ops, dt / sub_a as f64, Scheme::BackwardEuler)?;
    let step_b = Stepper::new(&reference.ops, dt / sub_b as f64, Scheme::BackwardEuler)?;

    let rule = DomainRule::new(quad_space, 2 * quad_space.degree + 2)?;
    let probe_a = Probe::new(&gamma_h.space, &rule.points)?;
    let probe_b = Probe::new(&reference.space, &rule.points)?;
    let np = rule.points.len();
    let spatial_rho: Vec<f64> = rule.points.iter().map(|p| (p - Vec2::from(decomposition.x0)).norm()).collect();

    let mut acc = Accumulator::new(decomposition, n_steps, dt);
    let mut ua = gamma_h.initial.clone();
    let mut ub = reference.initial.clone();
    let mut va = vec![0.0; np];
    let mut vb = vec![0.0; np];
    let mut ga = vec![[0.0; 2]; np];
    let mut gb = vec![[0.0; 2]; np];
    // F at the previous two nodes, for centered differences
    let mut window: Vec<Vec<f64>> = Vec::with_capacity(3);
    for n in 0..=n_steps {
        if n > 0 {
            for _ in 0..sub_a {
                step_a.step_homogeneous(&mut ua)?;
            }
            for _ in 0..sub_b {
                step_b.step_homogeneous(&mut ub)?;
            }
        }
        let t = n as f64 * dt;
        probe_a.evaluate(&ua, &mut va, &mut ga);
        probe_b.evaluate(&ub, &mut vb, &mut gb);
        let f: Vec<f64> = va.iter().zip(&vb).map(|(a, b)| a - b).collect();
        let grad: Vec<[f64; 2]> = ga.iter().zip(&gb).map(|(a, b)| [a[0] - b[0], a[1] - b[1]]).collect();
        acc.add_state(n, t, &f, &grad, &rule.weights, &spatial_rho);
        window.push(f);
        if window.len() == 3 {
            acc.add_derivative(n - 1, &window[0], &window[2], 2.0 * dt, &rule.weights);
            window.remove(0);
        }
        if n == 1 {
            acc.add_derivative(0, &window[0], &window[1], dt, &rule.weights);
        }
    }
    if n_steps >= 1 {
        let k = window.len();
        acc.add_derivative(n_steps, &window[k - 2], &window[k - 1], dt, &rule.weights);
    }
    Ok(acc.finish(t_end, dt, probe_a.outside + probe_b.outside))
}

struct Accumulator<'a> {
    dec: &'a DyadicDecomposition,
    n_steps: usize,
    dt: f64,
    l1_w11: f64,
    ft_l1: f64,
    h1_sq: Vec<f64>,
    measure: Vec<f64>,
}

impl<'a> Accumulator<'a> {
    fn new(dec: &'a DyadicDecomposition, n_steps: usize, dt: f64) -> Self {
        Self {
            dec,
            n_steps,
            dt,
            l1_w11: 0.0,
            ft_l1: 0.0,
            h1_sq: vec![0.0; dec.n_slots()],
            measure: vec![0.0; dec.n_slots()],
        }
    }

    /// Trapezoid weight of node `n`.
    fn time_weight(&self, n: usize) -> f64 {
        if n == 0 || n == self.n_steps {
            0.5 * self.dt
        } else {
            self.dt
        }
    }

    fn add_state(&mut self, n: usize, t: f64, f: &[f64], grad: &[[f64; 2]], weights: &[f64], spatial_rho: &[f64]) {
        let wt = self.time_weight(n);
        let sqrt_t = t.sqrt();
        let mut w11 = 0.0;
        for i in 0..f.len() {
            let g = grad[i][0].hypot(grad[i][1]);
            w11 += weights[i] * (f[i].abs() + g);
            let slot = self.dec.slot(self.dec.classify_rho(spatial_rho[i].max(sqrt_t)));
            let w = weights[i] * wt;
            self.h1_sq[slot] += w * (f[i] * f[i] + g * g);
            self.measure[slot] += w;
        }
        self.l1_w11 += wt * w11;
    }

    fn add_derivative(&mut self, n: usize, before: &[f64], after: &[f64], span: f64, weights: &[f64]) {
        let s: f64 = before
            .iter()
            .zip(after)
            .zip(weights)
            .map(|((a, b), w)| w * (b - a).abs())
            .sum();
        self.ft_l1 += self.time_weight(n) * s / span;
    }

    fn finish(self, t_end: f64, dt: f64, outside_points: usize) -> FNorms {
        let annulus_h1: Vec<f64> = self.h1_sq.iter().map(|v| v.sqrt()).collect();
        let annulus_tally: Vec<f64> = annulus_h1
            .iter()
            .enumerate()
            .map(|(s, v)| self.dec.slot_radius(s).powi(2) * v)
            .collect();
        FNorms {
            t_end,
            dt,
            l1_w11: self.l1_w11,
            ft_l1: self.ft_l1,
            tally_sum: annulus_tally.iter().sum(),
            annulus_h1,
            annulus_tally,
            annulus_measure: self.measure,
            outside_points,
        }
    }
}

/// Relative shift between two measurements of the same norm.
pub fn relative_shift(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::super::{build_delta, dyadic};
    use super::*;
    use crate::geometry::SmoothDomain;
    use crate::mesh::build_mesh;

    fn setup(h: f64) -> (Arc<FeSpace>, RegularizedDelta) {
        let disk = SmoothDomain::disk(1.0).unwrap();
        let space = Arc::new(FeSpace::new(Arc::new(build_mesh(&disk, h).unwrap()), 1).unwrap());
        let delta = build_delta(&space, &Locator::new(&space), Vec2::new(0.011, 0.007)).unwrap();
        (space, delta)
    }

    #[test]
    fn mass_functional_decays_like_constants() {
        let (space, delta) = setup(0.2);
        let ev = GreenEvolution::new(space, &delta, 1e-3).unwrap();
        let traj = evolve_green(&ev, 0.25).unwrap();
        assert_eq!(traj.states[0], ev.initial);
        let ones = vec![1.0; ev.initial.len()];
        let m1 = ev.ops.mass.mul_vec(&ones);
        for (t, u) in traj.times.iter().zip(&traj.states).step_by(50) {
            let mass: f64 = u.iter().zip(&m1).map(|(a, b)| a * b).sum();
            // backward Euler factor for the lambda = 1 mode
            let n = (t / ev.dt).round() as i32;
            let be = (1.0 + ev.dt).powi(-n);
            assert!((mass - be).abs() < 1e-8, "t={t}: {mass} vs {be}");
            assert!((mass - (-t).exp()).abs() < 1e-3);
        }
    }

    #[test]
    fn identical_fields_have_zero_gap_and_measure_partitions() {
        let (space, delta) = setup(0.1);
        let ev = GreenEvolution::new(space.clone(), &delta, 0.01).unwrap();
        let dec = dyadic(Vec2::from(delta.x0), 0.1, 0.05, 2.0).unwrap();
        let norms = f_norms(&space, &ev, &ev, &dec, 0.1).unwrap();
        assert_eq!(norms.l1_w11, 0.0);
        assert_eq!(norms.ft_l1, 0.0);
        assert_eq!(norms.tally_sum, 0.0);
        let total: f64 = norms.annulus_measure.iter().sum();
        let expected = space.mesh.polygon_area() * 0.1;
        assert!((total - expected).abs() < 1e-10, "{total} vs {expected}");
    }

    #[test]
    fn norms_are_symmetric_in_sign() {
        let (space, delta) = setup(0.2);
        let fine = Arc::new(FeSpace::new(Arc::new(build_mesh(&SmoothDomain::disk(1.0).unwrap(), 0.1).unwrap()), 1).unwrap());
        let a = GreenEvolution::new(space.clone(), &delta, 0.02).unwrap();
        let b = reference_green(fine, &delta, 0.01).unwrap();
        let dec = dyadic(Vec2::from(delta.x0), 0.1, 0.05, 2.0).unwrap();
        let ab = f_norms(&space, &a, &b, &dec, 0.1).unwrap();
        let ba = f_norms(&space, &b, &a, &dec, 0.1).unwrap();
        assert!(ab.l1_w11 > 0.0);
        assert!(relative_shift(ab.l1_w11, ba.l1_w11) < 1e-12);
        assert!(relative_shift(ab.ft_l1, ba.ft_l1) < 1e-12);
        assert!(relative_shift(ab.tally_sum, ba.tally_sum) < 1e-12);
    }
}
