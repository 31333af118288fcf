//! Boundary-skin geometry across a mesh family.

use serde_json::json;

use super::common::timed;
use super::config::StudyConfig;
use super::fit::fit_rate;
use super::report::{num, StudyOutcome, Table, Verdict};
use crate::mesh::{build_mesh_with, skin_diagnostics, SkinDiagnostics};
use crate::Result;

pub fn run_skin(cfg: &StudyConfig) -> Result<StudyOutcome> {
    let domain = cfg.smooth_domain()?;
    let mut rows: Vec<(f64, SkinDiagnostics)> = Vec::new();
    let mut meshes = Vec::new();
    let mut wall = Vec::new();
    for l in 0..cfg.levels {
        let ((h, diag, metrics), secs) = timed(|| {
            let h = cfg.level_h(l);
            let mesh = build_mesh_with(&domain, h, &cfg.mesh_options())?;
            Ok((h, skin_diagnostics(&mesh, &domain)?, mesh.metrics()))
        })?;
        rows.push((h, diag));
        meshes.push(metrics);
        wall.push(secs);
    }
    let mut table = Table::new(&["level", "h", "chord_max", "sup_t_star", "skin_area", "skin_area_out", "skin_area_in", "normal_deviation"]);
    for (i, (h, d)) in rows.iter().enumerate() {
        table.push(vec![
            i.to_string(),
            num(*h),
            num(d.boundary_chord_max),
            num(d.sup_t_star),
            num(d.skin_area_out + d.skin_area_in),
            num(d.skin_area_out),
            num(d.skin_area_in),
            num(d.normal_deviation_max),
        ]);
    }
    let mut verdicts = Vec::new();
    let mut summary = json!({});
    if rows.len() >= 2 {
        // skin quantities are governed by the boundary chords alone
        let fit = |f: &dyn Fn(&SkinDiagnostics) -> f64| {
            fit_rate(
                &rows.iter().map(|(_, d)| (d.boundary_chord_max, f(d))).collect::<Vec<_>>(),
                cfg.log_power,
            )
        };
        let t_star = fit(&|d| d.sup_t_star)?;
        let area = fit(&|d| d.skin_area_out + d.skin_area_in)?;
        let normal = fit(&|d| d.normal_deviation_max)?;
        verdicts.push(Verdict::within("sup_t_star_slope", t_star.slope, cfg.tolerance.skin_t_star));
        verdicts.push(Verdict::within("skin_area_slope", area.slope, cfg.tolerance.skin_area));
        verdicts.push(Verdict::within("normal_deviation_slope", normal.slope, cfg.tolerance.skin_normal));
        summary = json!({ "sup_t_star": t_star, "skin_area": area, "normal_deviation": normal });
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
