//! Maximum-norm convergence against a manufactured solution, with the
//! interpolation error as a control.

use serde_json::json;

use super::common::{build_level, timed, ManufacturedLoad};
use super::config::StudyConfig;
use super::fit::fit_rate;
use super::report::{num, StudyOutcome, Table, Verdict};
use super::solution::ManufacturedSolution;
use crate::fem::{interpolate, l2_project, SamplePlan};
use crate::parabolic::solve_parabolic_with;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub h_max: f64,
    pub dofs: usize,
    pub steps: usize,
    pub dt: f64,
    /// `max_n ||u~(t_n) - u_h^n||_inf`.
    pub error: f64,
    /// `max_n ||u~(t_n) - I_h u~(t_n)||_inf`.
    pub interpolation_error: f64,
}

pub fn run_convergence(cfg: &StudyConfig) -> Result<StudyOutcome> {
    let domain = cfg.smooth_domain()?;
    let solution = ManufacturedSolution::new(cfg.solution);
    let dt_rule = cfg.dt_rule()?;
    let mut rows = Vec::new();
    let mut meshes = Vec::new();
    let mut wall = Vec::new();
    for l in 0..cfg.levels {
        let ((row, metrics), secs) = timed(|| {
            let level = build_level(cfg, &domain, l)?;
            let space = &level.space;
            let load = ManufacturedLoad::new(space, &domain, solution)?;
            let plan = SamplePlan::new(space)?;
            let u0 = l2_project(space, &level.ops.mass, |x| solution.value(x, 0.0), 1e-12)?;
            let dt = dt_rule.eval(level.h)?;
            let mut error: f64 = 0.0;
            let mut interp: f64 = 0.0;
            let mut steps = 0;
            let mut used_dt = dt;
            solve_parabolic_with(
                &level.ops,
                &u0,
                |t| Ok(load.load(space, t)),
                cfg.t_end,
                dt,
                cfg.scheme,
                |n, t, u| {
                    steps = n;
                    if n == 1 {
                        used_dt = t;
                    }
                    error = error.max(plan.linf_error(space, u, |x| solution.value(x, t)));
                    let iu = interpolate(space, |x| solution.value(x, t));
                    interp = interp.max(plan.linf_error(space, &iu, |x| solution.value(x, t)));
                    Ok(())
                },
            )?;
            Ok((
                ConvergenceRow {
                    h: level.h,
                    h_max: level.mesh.h_max,
                    dofs: space.n_dofs(),
                    steps,
                    dt: used_dt,
                    error,
                    interpolation_error: interp,
                },
                level.mesh.metrics(),
            ))
        })?;
        rows.push(row);
        meshes.push(metrics);
        wall.push(secs);
    }

    let mut table = Table::new(&["level", "h", "h_max", "dofs", "steps", "dt", "error", "eoc", "interp_error", "interp_eoc"]);
    for (i, r) in rows.iter().enumerate() {
        let eoc = |a: f64, b: f64| {
            if i == 0 {
                String::new()
            } else {
                num((a / b).ln() / (rows[i - 1].h_max / r.h_max).ln())
            }
        };
        table.push(vec![
            i.to_string(),
            num(r.h),
            num(r.h_max),
            r.dofs.to_string(),
            r.steps.to_string(),
            num(r.dt),
            num(r.error),
            if i == 0 { String::new() } else { eoc(rows[i - 1].error, r.error) },
            num(r.interpolation_error),
            if i == 0 {
                String::new()
            } else {
                eoc(rows[i - 1].interpolation_error, r.interpolation_error)
            },
        ]);
    }

    let mut verdicts = Vec::new();
    let mut summary = json!({});
    if rows.len() >= 2 {
        let fit = fit_rate(&rows.iter().map(|r| (r.h_max, r.error)).collect::<Vec<_>>(), cfg.log_power)?;
        let control = fit_rate(
            &rows.iter().map(|r| (r.h_max, r.interpolation_error)).collect::<Vec<_>>(),
            cfg.log_power,
        )?;
        let last = fit.last_eoc().unwrap_or(f64::NAN);
        verdicts.push(Verdict::within("final_eoc", last, cfg.tolerance.eoc));
        if let Some(min) = cfg.tolerance.control_min_eoc {
            verdicts.push(Verdict::at_least(
                "control_final_eoc",
                control.last_eoc().unwrap_or(f64::NAN),
                min,
            ));
        }
        let monotone = rows.windows(2).all(|w| w[1].error <= w[0].error);
        verdicts.push(Verdict::new("monotone_errors", monotone, format!("errors non-increasing: {monotone}")));
        summary = json!({ "fit": fit, "control_fit": control });
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
