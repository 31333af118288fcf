//! Maximal regularity ratios for random and structured loads.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::common::{build_level, growth, timed};
use super::config::StudyConfig;
use super::report::{num, StudyOutcome, Table, Verdict};
use crate::fem::DomainRule;
use crate::parabolic::{maxreg_ratio, EigenBasis, LoadSeries};
use crate::Result;

/// `(||lambda u||_p + ||u'||_p) / ||1||_p` on `(0, T)` for `u' + lambda u = 1`,
/// `u(0) = 0`, in closed form for integer `p`.
pub fn scalar_mode_ratio(lambda: f64, t_end: f64, p: u32) -> f64 {
    // int_0^T e^{-j lambda t} dt
    let e = |j: f64| {
        if j == 0.0 {
            t_end
        } else {
            -(-j * lambda * t_end).exp_m1() / (j * lambda)
        }
    };
    let mut binom = 1.0;
    let mut au = 0.0;
    for j in 0..=p {
        if j > 0 {
            binom *= (p - j + 1) as f64 / j as f64;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        au += sign * binom * e(j as f64);
    }
    let inv = 1.0 / p as f64;
    (au.max(0.0).powf(inv) + e(p as f64).powf(inv)) / t_end.powf(inv)
}

fn load_samples(cfg: &StudyConfig, basis: &EigenBasis, x: &[f64], level: usize) -> Vec<(String, LoadSeries, Option<usize>)> {
    let n = basis.len();
    let nt = cfg.maxreg_intervals;
    let t_end = cfg.t_end;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(1_000_003).wrapping_add(level as u64));
    let mut out = Vec::new();
    for s in 0..cfg.random_samples {
        // fresh signs at every time node
        let nodal = DMatrix::from_fn(n, nt + 1, |_, _| if rng.random::<bool>() { 1.0 } else { -1.0 });
        out.push((format!("random_{s}"), LoadSeries { t_end, nodal }, None));
    }
    let mode = |i: usize| basis.vectors.column(i).iter().copied().collect::<Vec<f64>>();
    let single = 1.min(n - 1);
    let structured: Vec<(&str, Vec<f64>, Box<dyn Fn(f64) -> f64>, Option<usize>)> = vec![
        ("constant", vec![1.0; n], Box::new(|_| 1.0), None),
        ("exp_decay", vec![1.0; n], Box::new(|t: f64| (-t).exp()), None),
        ("single_mode", mode(single), Box::new(|_| 1.0), Some(single)),
        ("high_mode", mode(n - 1), Box::new(|_| 1.0), None),
        (
            "oscillating",
            x.to_vec(),
            Box::new(move |t: f64| (16.0 * std::f64::consts::PI * t / t_end).sin()),
            None,
        ),
    ];
    for (name, v, phi, m) in structured {
        let series = LoadSeries::from_fn(n, t_end, nt, |t| {
            let s = phi(t);
            v.iter().map(|c| c * s).collect()
        });
        out.push((name.to_string(), series, m));
    }
    out
}

pub fn run_maxreg(cfg: &StudyConfig) -> Result<StudyOutcome> {
    let domain = cfg.smooth_domain()?;
    let mut table = Table::new(&["level", "h", "dofs", "p", "sample", "ratio", "ratio_l2_sum", "norm_au", "norm_du", "norm_f"]);
    let mut p2_max: f64 = 0.0;
    let mut p4_max_per_level = Vec::new();
    let mut oracle_err: f64 = 0.0;
    let mut meshes = Vec::new();
    let mut wall = Vec::new();
    for l in 0..cfg.levels {
        let (out, secs) = timed(|| {
            let level = build_level(cfg, &domain, l)?;
            let space = &level.space;
            let basis = EigenBasis::new(&level.ops, cfg.eigen_cap)?;
            let rule2 = DomainRule::for_loads(space)?;
            let rule4 = DomainRule::new(space, 4 * space.degree)?;
            let x: Vec<f64> = space.dof_coords.iter().map(|p| p.x).collect();
            let mut rows = Vec::new();
            for (name, load, mode) in load_samples(cfg, &basis, &x, l) {
                for p in [2usize, 4] {
                    let rule = if p == 2 { &rule2 } else { &rule4 };
                    let r = maxreg_ratio(space, &basis, rule, &load, p)?;
                    let oracle = mode.map(|m| scalar_mode_ratio(basis.values[m], cfg.t_end, p as u32));
                    rows.push((name.clone(), p, r, oracle));
                }
            }
            Ok((level.h, space.n_dofs(), rows, level.mesh.metrics()))
        })?;
        let (h, n, rows, metrics) = out;
        let mut p4_max: f64 = 0.0;
        for (name, p, r, oracle) in rows {
            table.push(vec![
                l.to_string(),
                num(h),
                n.to_string(),
                p.to_string(),
                name,
                num(r.ratio),
                num(r.ratio_l2_sum),
                num(r.norm_au),
                num(r.norm_du),
                num(r.norm_f),
            ]);
            if p == 2 {
                p2_max = p2_max.max(r.ratio);
            } else {
                p4_max = p4_max.max(r.ratio);
            }
            if let Some(o) = oracle {
                oracle_err = oracle_err.max((r.ratio - o).abs() / o);
            }
        }
        p4_max_per_level.push(p4_max);
        meshes.push(metrics);
        wall.push(secs);
    }
    let mut verdicts = vec![
        Verdict::at_most("p2_ratio_ceiling", p2_max, cfg.tolerance.maxreg_l2_ceiling),
        Verdict::at_most("single_mode_oracle", oracle_err, cfg.tolerance.maxreg_oracle),
    ];
    let k = p4_max_per_level.len();
    let mut drift = None;
    if k >= 2 {
        let d = growth(p4_max_per_level[k - 2], p4_max_per_level[k - 1]).abs();
        drift = Some(d);
        verdicts.push(Verdict::new(
            "p4_drift",
            d < cfg.tolerance.maxreg_drift,
            format!("{:.2}% < {:.0}%", 100.0 * d, 100.0 * cfg.tolerance.maxreg_drift),
        ));
    }
    Ok(StudyOutcome {
        study: cfg.study.name().into(),
        config: cfg.clone(),
        meshes,
        table,
        verdicts,
        summary: json!({
            "p2_max_ratio": p2_max,
            "p4_max_ratio_per_level": p4_max_per_level,
            "p4_drift_last_levels": drift,
            "single_mode_oracle_rel_error": oracle_err,
        }),
        wall_times: wall,
        notes: vec![
            "ratio is (||A_h u|| + ||u'||) / ||f||; ratio_l2_sum combines the two terms in l2 and is at most 1 for p = 2".into(),
        ],
    })
}
