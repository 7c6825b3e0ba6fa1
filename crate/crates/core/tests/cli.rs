use std::fs;
use std::process::Command;

fn pxlt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pxlt"))
}

const CONFIG: &str = r#"
[problem]
kind = "trap-concat"
order = 4
blocks = 4

[optimizer]
variant = "p3"
budget = 50000

[seeds]
count = 3
"#;

#[test]
fn run_writes_a_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(&cfg, CONFIG).unwrap();
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let status = pxlt()
            .args(["run", "--config"])
            .arg(&cfg)
            .arg("--output")
            .arg(&out)
            .env("PXLT_WORKERS", if name == "a.csv" { "1" } else { "3" })
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(fs::read_to_string(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let lines: Vec<&str> = outputs[0].lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("problem,n,variant"));
    assert!(!dir.path().join("a.csv.partial").exists());
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(&cfg, CONFIG).unwrap();
    let out = pxlt()
        .args(["run", "--variant", "ltgomea", "--seeds", "2", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().skip(1).all(|l| l.contains(",ltgomea,")));
}

#[test]
fn sweep_and_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    let csv = dir.path().join("sweep.csv");
    fs::write(&cfg, CONFIG).unwrap();
    let out = pxlt()
        .args(["sweep", "--sizes", "8,12", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success());
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.contains("12"), "{report}");
    let out = pxlt().arg("analyze").arg(&csv).output().unwrap();
    assert!(out.status.success());
    assert!(!out.stdout.is_empty());
}

#[test]
fn oracle_subcommands() {
    let out = pxlt()
        .args(["oracle", "local-optima", "--fixture", "dec3-ring"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 5);

    let out = pxlt()
        .args(["oracle", "hybrid", "--ph", "0.5", "--target", "one"])
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "7");

    let out = pxlt()
        .args(["oracle", "endpoints", "--fixture", "dec3-ring"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("perfect"));
}

#[test]
fn contract_violations_exit_nonzero() {
    let out = pxlt()
        .args(["oracle", "local-optima", "--fixture", "nope"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(
        &cfg,
        "[problem]\nkind = \"trap-concat\"\nbogus = 1\n[optimizer]\nvariant = \"p3\"\n",
    )
    .unwrap();
    let out = pxlt().arg("run").arg("--config").arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let out = pxlt().args(["oracle", "hybrid", "--ph", "1.5"]).output().unwrap();
    assert!(!out.status.success());
}
