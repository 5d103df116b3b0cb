use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SMALL: &str = r#"
system = "qubit_qubit"
qubit.EJ_over_EC = 50
qubit.alpha = 0.65
truncation.n_max = 8
check.convergence = false

[sweep.gamma]
start = 0.01
stop = 1
points = 4
spacing = "log"
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fluxsw"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn sweep_output_is_byte_identical_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let c = cfg.to_str().unwrap();
    let outs: Vec<Vec<u8>> = ["1", "1", "3"]
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let out = dir.path().join(format!("out{i}.csv"));
            let o = run(&["sweep", "-c", c, "--workers", w, "--out", out.to_str().unwrap()]);
            assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
            std::fs::read(out).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    assert_eq!(outs[0], outs[2]);
    let text = String::from_utf8(outs[0].clone()).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("axis_value,gamma,epsilon,Delta,"));
}

#[test]
fn json_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let o = run(&["sweep", "-c", cfg.to_str().unwrap(), "--format", "json", "--set", "sweep.gamma.points=2"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("\"config\"") && text.contains("\"g_yy\""));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.toml");
    assert_eq!(code(&run(&["sweep", "-c", missing.to_str().unwrap()])), 3);

    let bad = write(dir.path(), "bad.toml", &SMALL.replace("\n[sweep", "\nqubit.typo = 1\n[sweep"));
    let o = run(&["sweep", "-c", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("qubit.typo"));

    let cfg = write(dir.path(), "small.toml", SMALL);
    let c = cfg.to_str().unwrap();
    assert_eq!(code(&run(&["sweep", "-c", c, "--set", "truncation.dim_cap=10"])), 2);
    assert_eq!(code(&run(&["sweep", "-c", c, "--set", "qubit.alpha=0.4"])), 1);
    assert_eq!(code(&run(&["sweep", "-c", c, "--truncation-scale", "-1"])), 1);
    assert_eq!(code(&run(&["sweep", "--nonsense"])), 1);

    let blocked = dir.path().join("no_such_dir").join("out.csv");
    assert_eq!(code(&run(&["sweep", "-c", c, "--out", blocked.to_str().unwrap(), "--set", "sweep.gamma.points=2"])), 3);
}

#[test]
fn check_reports_status_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let o = run(&["check", "-c", cfg.to_str().unwrap()]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("gamma=")).count(), 4);
    assert!(text.contains("convergence"), "{text}");
    assert_eq!(code(&o), 2);
}

#[test]
fn point_prints_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let c = cfg.to_str().unwrap();
    assert_eq!(code(&run(&["point", "-c", c])), 1);
    let o = run(&["point", "-c", c, "--at", "0.1"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let gyy: f64 = text.lines().find(|l| l.starts_with("g_yy ")).unwrap().split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!(gyy > 0.0);

    let single = write(dir.path(), "single.toml", "system = \"qubit_qubit\"\nqubit.r_q = 50\nqubit.alpha = 0.65\ncoupling.gamma = 0.1\ntruncation.n_max = 8\ncheck.convergence = false\n");
    let o = run(&["point", "-c", single.to_str().unwrap(), "--json"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().contains("\"g_yy\""));
}
