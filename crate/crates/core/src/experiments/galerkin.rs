//! Residual identity for the error `z_h - z~` of a manufactured solution:
//!
//! `((z_h - z~)_t, v) + a(z_h - z~, v)
//!     = -(z~_t + A z~ - phi~, v)_{Omega_h \ Omega} - (d_{n_h} z~ - psi~, v)_{dOmega_h}`.
//!
//! `z_h` comes from the time stepper and `z_h'` is recovered from the
//! semi-discrete equation at the same time node. The left side uses the
//! scheme's load quadrature, the right side a finer rule, so the measured gap
//! is the consistency error of the discretization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::common::{build_level, timed, ManufacturedLoad};
use super::config::StudyConfig;
use super::fit::fit_rate;
use super::report::{num, StudyOutcome, Table, Verdict};
use super::solution::{projected_normal, ManufacturedSolution};
use crate::fem::basis::reference_basis;
use crate::fem::sparse::dot;
use crate::fem::{l2_project, solve_spd, BoundaryRule, DomainRule, FeSpace};
use crate::geometry::SmoothDomain;
use crate::mesh::{skin_slivers, SkinSliver};
use crate::parabolic::solve_parabolic;
use crate::{Result, Vec2};

/// Extra quadrature degree of the reference side over the load rules.
const EXTRA_DEGREE: usize = 6;
const RECOVERY_RTOL: f64 = 1e-13;

/// `(w_t, phi_i) + a(w, phi_i)` for a closed-form `w`.
fn weak_form(space: &FeSpace, rule: &DomainRule, u: &ManufacturedSolution, t: f64) -> Vec<f64> {
    let mut out = vec![0.0; space.n_dofs()];
    for e in 0..space.n_elements() {
        let map = space.element_map(e);
        let dofs = space.element_dofs(e);
        for q in 0..rule.n_q {
            let idx = e * rule.n_q + q;
            let x = rule.points[idx];
            let w = rule.weights[idx];
            let (val, grad, dt) = (u.value(x, t), u.gradient(x, t), u.time_derivative(x, t));
            for (i, &d) in dofs.iter().enumerate() {
                let g = map.grad(rule.tab.grads[q][i]);
                out[d] += w * ((dt + val) * rule.tab.values[q][i] + grad.dot(&g));
            }
        }
    }
    out
}

/// `(r, phi_i)_{Omega_h \ Omega}` with `r = z~_t + A z~ - phi~`, integrated
/// over the slivers that lie outside the curve. Basis functions are extended
/// polynomially from the boundary element.
fn skin_vector(space: &FeSpace, slivers: &[SkinSliver], u: &ManufacturedSolution, t: f64) -> Result<Vec<f64>> {
    let mesh = &space.mesh;
    let mut out = vec![0.0; space.n_dofs()];
    for s in slivers.iter().filter(|s| s.sign < 0.0) {
        let tri = mesh.boundary_edges[s.edge].triangle;
        let map = space.element_map(tri);
        let dofs = space.element_dofs(tri);
        for (p, w) in s.points.iter().zip(&s.weights) {
            let r = u.time_derivative(*p, t) - u.laplacian(*p, t) + u.value(*p, t) - u.load(*p, t);
            let c = w * r;
            if c == 0.0 {
                continue;
            }
            let (vals, _) = reference_basis(space.degree, map.to_reference(*p))?;
            for (i, &d) in dofs.iter().enumerate() {
                out[d] += c * vals[i];
            }
        }
    }
    Ok(out)
}

struct BoundaryData {
    rule: BoundaryRule,
    chord_normals: Vec<Vec2>,
    curve_normals: Vec<Vec2>,
}

impl BoundaryData {
    fn new(space: &FeSpace, domain: &SmoothDomain, degree: usize) -> Result<Self> {
        let rule = BoundaryRule::new(space, degree)?;
        let mesh = &space.mesh;
        let mut chord_normals = Vec::with_capacity(rule.points.len());
        for e in &mesh.boundary_edges {
            let d = mesh.vertices[e.vertices[1]] - mesh.vertices[e.vertices[0]];
            let n = Vec2::new(d.y, -d.x).normalize();
            chord_normals.extend(std::iter::repeat_n(n, rule.n_q));
        }
        let curve_normals = rule
            .points
            .iter()
            .map(|&p| projected_normal(domain, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            rule,
            chord_normals,
            curve_normals,
        })
    }

    /// `(d_{n_h} z~ - psi~, phi_i)_{dOmega_h}`.
    fn mismatch(&self, space: &FeSpace, u: &ManufacturedSolution, t: f64) -> Vec<f64> {
        let values: Vec<f64> = self
            .rule
            .points
            .iter()
            .enumerate()
            .map(|(i, &p)| u.gradient(p, t).dot(&(self.chord_normals[i] - self.curve_normals[i])))
            .collect();
        self.rule.load_from_values(space, &values)
    }
}

pub fn run_galerkin(cfg: &StudyConfig) -> Result<StudyOutcome> {
    let domain = cfg.smooth_domain()?;
    let solution = ManufacturedSolution::new(cfg.solution);
    let dt_rule = cfg.dt_rule()?;
    let mut table = Table::new(&["level", "h", "h_max", "dofs", "dt", "gap", "lhs", "skin_term", "boundary_term"]);
    let mut rows = Vec::new();
    let mut meshes = Vec::new();
    let mut wall = Vec::new();
    for l in 0..cfg.levels {
        let (row, secs) = timed(|| {
            let level = build_level(cfg, &domain, l)?;
            let space = &level.space;
            let ops = &level.ops;
            let load = ManufacturedLoad::new(space, &domain, solution)?;
            let fine = DomainRule::new(space, 2 * space.degree + 2 + EXTRA_DEGREE)?;
            let bdata = BoundaryData::new(space, &domain, 2 * space.degree + 2 + EXTRA_DEGREE)?;
            let slivers = skin_slivers(&level.mesh, &domain)?;
            let u0 = l2_project(space, &ops.mass, |x| solution.value(x, 0.0), 1e-12)?;
            let traj = solve_parabolic(ops, &u0, |t| Ok(load.load(space, t)), cfg.t_end, dt_rule.eval(level.h)?, cfg.scheme)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(17 * l as u64));
            let tests: Vec<(Vec<f64>, f64)> = (0..cfg.random_samples)
                .map(|_| {
                    let v: Vec<f64> = (0..space.n_dofs()).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
                    let norm = dot(&v, &ops.form.mul_vec(&v)).sqrt();
                    (v, norm)
                })
                .collect();
            let (mut gap, mut lhs_max, mut skin_max, mut bnd_max) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
            for (t, z) in traj.times.iter().zip(&traj.states).skip(1) {
                let t = *t;
                let f = load.load(space, t);
                let kz = ops.form.mul_vec(z);
                let resid: Vec<f64> = f.iter().zip(&kz).map(|(a, b)| a - b).collect();
                let dz = solve_spd(&ops.mass, &resid, RECOVERY_RTOL)?;
                let mdz = ops.mass.mul_vec(&dz);
                let exact = weak_form(space, &fine, &solution, t);
                let lhs: Vec<f64> = (0..space.n_dofs()).map(|i| mdz[i] + kz[i] - exact[i]).collect();
                let skin = skin_vector(space, &slivers, &solution, t)?;
                let bnd = bdata.mismatch(space, &solution, t);
                for (v, norm) in &tests {
                    let l_v = dot(v, &lhs);
                    let s_v = dot(v, &skin);
                    let b_v = dot(v, &bnd);
                    let rhs = -s_v - b_v;
                    gap = gap.max((l_v - rhs).abs() / norm);
                    lhs_max = lhs_max.max(l_v.abs() / norm);
                    skin_max = skin_max.max(s_v.abs() / norm);
                    bnd_max = bnd_max.max(b_v.abs() / norm);
                }
            }
            Ok((level.h, level.mesh.h_max, space.n_dofs(), traj.dt, gap, lhs_max, skin_max, bnd_max, level.mesh.metrics()))
        })?;
        let (h, h_max, n, dt, gap, lhs, skin, bnd, metrics) = row;
        table.push(vec![l.to_string(), num(h), num(h_max), n.to_string(), num(dt), num(gap), num(lhs), num(skin), num(bnd)]);
        rows.push((h_max, gap));
        meshes.push(metrics);
        wall.push(secs);
    }
    let mut verdicts = Vec::new();
    let mut summary = json!({ "gaps": rows });
    if domain.is_polygonal() {
        let worst = rows.iter().map(|r| r.1).fold(0.0, f64::max);
        verdicts.push(Verdict::at_most("flat_gap", worst, cfg.tolerance.galerkin_flat));
    } else if rows.len() >= 2 {
        let fit = fit_rate(&rows, cfg.log_power)?;
        verdicts.push(Verdict::at_least("gap_slope", fit.slope, cfg.tolerance.galerkin_min_slope));
        summary["fit"] = serde_json::to_value(&fit)?;
    }
    Ok(StudyOutcome {
        study: cfg.study.name().into(),
        config: cfg.clone(),
        meshes,
        table,
        verdicts,
        summary,
        wall_times: wall,
        notes: vec![],
    })
}
