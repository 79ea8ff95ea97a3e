use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shadowkit")).args(args).output().expect("binary runs")
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name).to_string_lossy().into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const FAILING: &str = r#"
seed = 3
horizon = 50
trials = 4
[system]
catalog = "scalar_contraction"
alpha = 0.9
[defects]
mode = "constant"
delta = 0.5
[solver]
kind = "contracting"
[verify]
epsilon = 0.01
"#;

#[test]
fn passing_run_exits_zero_and_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let o = bin(&["shadow", "--config", &config("contracting_law.toml"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(out).unwrap();
    assert!(table.starts_with("n,defect,shadow_error,bound,pass"));
}

#[test]
fn failed_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "fail.toml", FAILING);
    let o = bin(&["shadow", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_input_exits_two() {
    let o = bin(&["shadow", "--config", &config("exponential_bad_theta.toml")]);
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.toml", &format!("{FAILING}\n[sweep]\nalpha = []\n"));
    assert_eq!(bin(&["sweep", "--config", empty.to_str().unwrap()]).status.code(), Some(2));

    let unknown = write(dir.path(), "unknown.toml", &format!("{FAILING}\n[sweep]\ngamma = [1.0]\n"));
    assert_eq!(bin(&["sweep", "--config", unknown.to_str().unwrap()]).status.code(), Some(2));

    assert_eq!(bin(&["shadow", "--config", "/nonexistent.toml"]).status.code(), Some(2));
}

#[test]
fn seed_override_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let cfg = config("contracting_law.toml");
    bin(&["shadow", "--config", &cfg, "--seed", "1", "--out", a.to_str().unwrap()]);
    bin(&["shadow", "--config", &cfg, "--seed", "2", "--out", b.to_str().unwrap()]);
    assert_ne!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn verify_rechecks_written_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let certs = dir.path().join("certs.json");
    let cfg = config("h_doubling.toml");
    let o = bin(&["shadow", "--config", &cfg, "--certificates", certs.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = bin(&["verify", "--config", &cfg, "--certificates", certs.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn generate_emits_pseudo_orbit() {
    let o = bin(&["generate", "--config", &config("contracting_law.toml"), "--trial", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("n,defect,point"));
    assert_eq!(text.lines().count(), 2 + 500);
}
