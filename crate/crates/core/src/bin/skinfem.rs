use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use skinfem::experiments::{run_study, StudyConfig, StudyKind};
use skinfem::geometry::{DomainKind, SmoothDomain};
use skinfem::mesh::{build_mesh, write_mesh_with_metrics};
use skinfem::{Error, Result};

#[derive(Parser)]
#[command(name = "skinfem", version, about = "Parabolic FEM studies on smooth domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximum-norm convergence against a manufactured solution.
    Converge(StudyArgs),
    /// Smoothing bounds of the discrete semigroup.
    Smoothing(StudyArgs),
    /// Maximal regularity ratios.
    Maxreg(StudyArgs),
    /// Boundary-skin geometry across a mesh family.
    Skin(StudyArgs),
    /// Green's function gap norms.
    Green(StudyArgs),
    /// Galerkin residual identity.
    Galerkin(StudyArgs),
    /// Generate one mesh and write it with a metrics sidecar.
    Mesh(MeshArgs),
}

#[derive(Args)]
struct StudyArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Run at most this many levels.
    #[arg(long)]
    level_cap: Option<usize>,
}

#[derive(Args)]
struct MeshArgs {
    /// `disk[:r]`, `ellipse:a,b`, `star:R,a,m` or `square[:w]`.
    #[arg(long)]
    domain: String,
    #[arg(long)]
    h: f64,
    #[arg(long)]
    out: PathBuf,
}

fn parse_domain(spec: &str) -> Result<SmoothDomain> {
    let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
    let nums: Vec<f64> = if args.is_empty() {
        Vec::new()
    } else {
        args.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad number `{s}` in `{spec}`"))))
            .collect::<Result<_>>()?
    };
    let kind = match (name, nums.as_slice()) {
        ("disk", []) => DomainKind::Disk { radius: 1.0 },
        ("disk", [r]) => DomainKind::Disk { radius: *r },
        ("ellipse", [a, b]) => DomainKind::Ellipse { a: *a, b: *b },
        ("star", [r, a, m]) if m.fract() == 0.0 && *m >= 1.0 => DomainKind::Star {
            base_radius: *r,
            amplitude: *a,
            frequency: *m as u32,
        },
        ("square", []) => DomainKind::Square { half_width: 1.0 },
        ("square", [w]) => DomainKind::Square { half_width: *w },
        _ => return Err(Error::Config(format!("unrecognized domain `{spec}`"))),
    };
    SmoothDomain::new(kind)
}

fn run_named(kind: StudyKind, args: StudyArgs) -> Result<bool> {
    let mut cfg = StudyConfig::from_file(&args.config)?;
    if cfg.study != kind {
        return Err(Error::Config(format!(
            "config describes a `{}` study, not `{}`",
            cfg.study.name(),
            kind.name()
        )));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(cap) = args.level_cap {
        cfg.levels = cfg.levels.min(cap.max(1));
    }
    let out = args
        .out
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let outcome = run_study(&cfg)?;
    for path in outcome.write(&out)? {
        println!("wrote {}", path.display());
    }
    for v in &outcome.verdicts {
        println!("{} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    for n in &outcome.notes {
        println!("note: {n}");
    }
    Ok(outcome.passed())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Converge(a) => run_named(StudyKind::Converge, a),
        Command::Smoothing(a) => run_named(StudyKind::Smoothing, a),
        Command::Maxreg(a) => run_named(StudyKind::Maxreg, a),
        Command::Skin(a) => run_named(StudyKind::Skin, a),
        Command::Green(a) => run_named(StudyKind::Green, a),
        Command::Galerkin(a) => run_named(StudyKind::Galerkin, a),
        Command::Mesh(a) => {
            let domain = parse_domain(&a.domain)?;
            let mesh = build_mesh(&domain, a.h)?;
            write_mesh_with_metrics(&mesh, &a.out)?;
            let m = mesh.metrics();
            println!(
                "{} vertices, {} triangles, h_max {:.4}, min angle {:.1} deg",
                m.vertex_count, m.triangle_count, m.h_max, m.min_angle
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
