//! End-to-end CLI checks: artifact layout, byte determinism, exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn pharm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pharm"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

fn disk_config(dir: &Path, out: &Path) -> std::path::PathBuf {
    write_config(
        dir,
        &format!(
            r#"{{
                "domain": {{"kind": "unit_disk"}},
                "target": {{"kind": "circle"}},
                "boundary": "degree:1",
                "h": 0.03125,
                "ladder": [1.6, 1.8],
                "solver": {{"first_iters": 2500, "warm_iters": 1200}},
                "delta": 0.2,
                "out_dir": "{}",
                "seed": 7
            }}"#,
            out.display()
        ),
    )
}

fn run(args: &[&str]) -> Output {
    pharm().args(args).output().expect("spawn pharm")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn solve_writes_artifacts_and_reruns_byte_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    let cfg = disk_config(tmp.path(), &out_a);
    let cfg_s = cfg.to_str().unwrap();

    let first = run(&["solve", "--config", cfg_s]);
    assert_eq!(code(&first), 0, "stderr: {}", String::from_utf8_lossy(&first.stderr));
    for name in ["field_p1.8.csv", "iterations_p1.8.csv", "report_p1.8.json"] {
        assert!(out_a.join(name).is_file(), "missing {name}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_a.join("report_p1.8.json")).unwrap())
            .unwrap();
    assert_eq!(report["p"].as_f64(), Some(1.8));
    assert!(report["total_energy"].as_f64().unwrap() > 0.0);

    let second = run(&["solve", "--config", cfg_s, "--out", out_b.to_str().unwrap()]);
    assert_eq!(code(&second), 0);
    for name in ["field_p1.8.csv", "report_p1.8.json"] {
        assert_eq!(
            std::fs::read(out_a.join(name)).unwrap(),
            std::fs::read(out_b.join(name)).unwrap(),
            "{name} differs between identical runs"
        );
    }

    let lower = run(&["solve", "--config", cfg_s, "--p", "1.6"]);
    assert_eq!(code(&lower), 0);
    assert!(out_a.join("field_p1.6.csv").is_file());
}

#[test]
fn study_writes_the_full_artifact_tree() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("study");
    let cfg = disk_config(tmp.path(), &out);

    let res = run(&["study", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&res), 0, "stderr: {}", String::from_utf8_lossy(&res.stderr));

    let study: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("study.json")).unwrap()).unwrap();
    let rungs = study["rungs"].as_array().unwrap();
    assert_eq!(rungs.len(), 2);
    assert_eq!(study["seed"].as_u64(), Some(7));
    for tag in ["1.6", "1.8"] {
        for stem in ["field_p", "iterations_p", "report_p", "certificates_p"] {
            let name = format!(
                "{stem}{tag}.{}",
                if stem == "report_p" { "json" } else { "csv" }
            );
            assert!(out.join(&name).is_file(), "missing {name}");
        }
    }
    // Degree-1 data concentrates on one vortex; growth traces must exist.
    assert!(out.join("growth_p1.8.json").is_file());
    let growth: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("growth_p1.8.json")).unwrap())
            .unwrap();
    assert_eq!(growth["reached_delta"].as_bool(), Some(true));

    // The console table reports the extrapolated limit.
    assert!(stdout(&res).contains("extrapolated"));
}

#[test]
fn energy_and_growballs_write_their_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let cfg = disk_config(tmp.path(), &out);
    let cfg_s = cfg.to_str().unwrap();

    let energy = run(&["energy", "--config", cfg_s]);
    assert_eq!(code(&energy), 0);
    assert!(out.join("report_p1.8.json").is_file());
    assert!(stdout(&energy).contains("E_ren^p"));

    let growth = run(&["growballs", "--config", cfg_s]);
    assert_eq!(code(&growth), 0);
    assert!(out.join("growth_p1.8.json").is_file());
    let certs = std::fs::read_to_string(out.join("certificates_p1.8.csv")).unwrap();
    assert!(certs.starts_with("bound_name,lhs,rhs,slack,pass"));
    assert!(certs.lines().count() > 1);
}

#[test]
fn verify_scalar_suite_passes() {
    let res = run(&["verify", "scalar"]);
    assert_eq!(code(&res), 0);
    let text = stdout(&res);
    assert!(text.contains("checks passed"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn exit_codes_separate_config_run_and_check_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");

    // Config stage: missing file, malformed JSON, invalid numbers, bad suite,
    // and clap usage errors all yield 3.
    let missing = run(&["solve", "--config", "/nonexistent/config.json"]);
    assert_eq!(code(&missing), 3);

    let malformed = write_config(tmp.path(), "{not json");
    assert_eq!(code(&run(&["solve", "--config", malformed.to_str().unwrap()])), 3);

    let bad_h = write_config(
        tmp.path(),
        r#"{"domain": {"kind": "unit_disk"}, "target": {"kind": "circle"},
            "boundary": "degree:1", "h": -0.1, "ladder": [1.5],
            "delta": 0.2, "out_dir": "x", "seed": 1}"#,
    );
    assert_eq!(code(&run(&["solve", "--config", bad_h.to_str().unwrap()])), 3);

    assert_eq!(code(&run(&["verify", "nonsense"])), 3);
    assert_eq!(code(&run(&["solve", "--bogus-flag"])), 3);
    assert_eq!(code(&run(&["--help"])), 0);

    // Run stage: a growth budget the domain cannot host fails with 2.
    let too_big = disk_config(tmp.path(), &out);
    let body = std::fs::read_to_string(&too_big)
        .unwrap()
        .replace("\"delta\": 0.2", "\"delta\": 1.9");
    std::fs::write(&too_big, body).unwrap();
    let run_err = run(&["growballs", "--config", too_big.to_str().unwrap()]);
    assert_eq!(code(&run_err), 2, "stdout: {}", stdout(&run_err));
}
