use std::path::Path;
use std::process::Command;

const SMALL: &str = r#"
study = "converge"
degree = 1
h0 = 0.4
levels = 2
t_end = 0.4
dt = "h/2"

[domain]
kind = "disk"
radius = 1.0
"#;

fn skinfem(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_skinfem")).args(args).output().unwrap()
}

fn run_config(dir: &Path, name: &str, body: &str, out: &str) -> std::process::Output {
    let cfg = dir.join(name);
    std::fs::write(&cfg, body).unwrap();
    let out = dir.join(out);
    skinfem(&["converge", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

#[test]
fn csv_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_config(dir.path(), "a.toml", SMALL, "a");
    let b = run_config(dir.path(), "a.toml", SMALL, "b");
    assert!(a.status.code().is_some_and(|c| c == 0 || c == 2), "{}", String::from_utf8_lossy(&a.stderr));
    let ca = std::fs::read(dir.path().join("a/converge.csv")).unwrap();
    let cb = std::fs::read(dir.path().join("b/converge.csv")).unwrap();
    assert_eq!(a.status.code(), b.status.code());
    assert_eq!(ca, cb);
    assert!(dir.path().join("a/converge.summary.json").exists());
}

#[test]
fn failed_verdict_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!("{SMALL}\n[tolerance]\neoc = [5.0, 6.0]\n");
    let out = run_config(dir.path(), "strict.toml", &body, "o");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL final_eoc"));
}

#[test]
fn bad_config_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), "bad.toml", "study = \"converge\"\nwhatever = 3\n", "o");
    assert_eq!(out.status.code(), Some(1));
    let out = run_config(dir.path(), "neg.toml", &SMALL.replace("h0 = 0.4", "h0 = -0.4"), "o");
    assert_eq!(out.status.code(), Some(1));
    // a config for another study is refused
    let out = run_config(dir.path(), "other.toml", &SMALL.replace("\"converge\"", "\"skin\""), "o");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn mesh_subcommand_writes_mesh_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("disk.mesh");
    let out = skinfem(&["mesh", "--domain", "disk", "--h", "0.2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(path.exists());
    assert!(path.with_extension("json").exists());
    let out = skinfem(&["mesh", "--domain", "blob:1", "--h", "0.2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
