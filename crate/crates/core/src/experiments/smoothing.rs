//! Smoothing of the discrete semigroup: `(||u(t)|| + t ||u'(t)||) e^{t/2} / ||v0||`
//! for `q = 2` and `q = inf`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::common::{build_level, growth, timed};
use super::config::StudyConfig;
use super::report::{num, StudyOutcome, Table, Verdict};
use crate::fem::{Locator, SamplePlan};
use crate::fem::solve_spd;
use crate::greens::{build_delta, delta_load, nearest_dof};
use crate::parabolic::{mass_norm, smoothing_bounds, Semigroup};
use crate::Result;

pub const INITIAL_DATA: [&str; 3] = ["constant", "delta", "random"];

/// `sup_{lambda >= 1, t > 0} (1 + t lambda) e^{-t lambda} e^{t/2}`.
pub fn l2_ceiling() -> f64 {
    1.0 + 2.0 / std::f64::consts::E
}

pub fn run_smoothing(cfg: &StudyConfig) -> Result<StudyOutcome> {
    let domain = cfg.smooth_domain()?;
    let mut table = Table::new(&["level", "h", "dofs", "v0", "q", "t", "value"]);
    // per level, per initial datum: max over t of the q = inf value
    let mut linf_max: Vec<[f64; 3]> = Vec::new();
    let mut l2_max: f64 = 0.0;
    let mut meshes = Vec::new();
    let mut wall = Vec::new();
    let mut spectral = Vec::new();
    for l in 0..cfg.levels {
        let (rows, secs) = timed(|| {
            let level = build_level(cfg, &domain, l)?;
            let space = &level.space;
            let plan = SamplePlan::new(space)?;
            let semigroup = Semigroup::new(&level.ops, cfg.eigen_cap)?;
            let n = space.n_dofs();
            let delta = build_delta(space, &Locator::new(space), nearest_dof(space, domain.center()))?;
            let delta_h = solve_spd(&level.ops.mass, &delta_load(space, &delta)?, 1e-12)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(l as u64));
            let random: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
            let data = [vec![1.0; n], delta_h, random];
            let mut out = Vec::new();
            for (name, v0) in INITIAL_DATA.iter().zip(&data) {
                let n2 = mass_norm(&level.ops.mass, v0);
                let ninf = plan.linf_norm(space, v0);
                for &t in &cfg.smoothing_times {
                    let b = smoothing_bounds(space, &level.ops, &semigroup, &plan, v0, t)?;
                    let w = (0.5 * t).exp();
                    out.push((*name, 2usize, t, (b.l2 + b.l2_derivative) * w / n2));
                    out.push((*name, 0usize, t, (b.linf + b.linf_derivative) * w / ninf));
                }
            }
            Ok((level.h, n, out, level.mesh.metrics(), matches!(semigroup, Semigroup::Spectral(_))))
        })?;
        let (h, n, out, metrics, is_spectral) = rows;
        let mut maxima = [0.0f64; 3];
        for (name, q, t, v) in out {
            let qs = if q == 2 { "2".to_string() } else { "inf".to_string() };
            table.push(vec![l.to_string(), num(h), n.to_string(), name.into(), qs, num(t), num(v)]);
            if q == 2 {
                l2_max = l2_max.max(v);
            } else {
                let i = INITIAL_DATA.iter().position(|d| *d == name).unwrap_or(0);
                maxima[i] = maxima[i].max(v);
            }
        }
        linf_max.push(maxima);
        meshes.push(metrics);
        wall.push(secs);
        spectral.push(is_spectral);
    }
    let mut verdicts = vec![Verdict::at_most(
        "l2_ceiling",
        l2_max,
        l2_ceiling() + cfg.tolerance.smoothing_margin,
    )];
    let mut growths = Vec::new();
    for (i, name) in INITIAL_DATA.iter().enumerate() {
        // the coarsest pair is pre-asymptotic and not judged
        let g: Vec<f64> = (2..linf_max.len())
            .map(|l| growth(linf_max[l - 1][i], linf_max[l][i]))
            .collect();
        let worst = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !g.is_empty() {
            verdicts.push(Verdict::new(
                &format!("linf_growth_{name}"),
                worst < cfg.tolerance.smoothing_growth,
                format!("largest growth per level {:.2}% < {:.0}%", 100.0 * worst, 100.0 * cfg.tolerance.smoothing_growth),
            ));
        }
        growths.push(json!({ "v0": name, "growth": g }));
    }
    Ok(StudyOutcome {
        study: cfg.study.name().into(),
        config: cfg.clone(),
        meshes,
        table,
        verdicts,
        summary: json!({
            "l2_max": l2_max,
            "l2_ceiling": l2_ceiling(),
            "linf_max_per_level": linf_max,
            "linf_growth": growths,
            "spectral_semigroup": spectral,
        }),
        wall_times: wall,
        notes: vec![],
    })
}
