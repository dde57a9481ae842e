use std::path::Path;
use std::process::Command;

use elliptic_potentials::cli::{run, EXIT_ERROR, EXIT_FAIL, EXIT_PASS};

fn epot(args: &[&str]) -> (i32, String, String) {
    let mut out = vec![];
    let mut err = vec![];
    let mut argv = vec!["epot"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

#[test]
fn default_verify_passes_with_at_least_six_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, stdout, stderr) = epot(&["verify", "--out", out]);
    assert_eq!(code, EXIT_PASS, "{stdout}{stderr}");
    let report = rows(&dir.path().join("verify.csv"));
    let passing = report.iter().filter(|r| !r[4].is_empty() && &r[5] == "true").count();
    assert!(passing >= 6, "{passing}");
    assert!(report.iter().all(|r| &r[5] == "true"));
}

#[test]
fn eval_of_unit_density_at_the_disk_center() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.conf", "domain.kind = ball\ndensity.preset = one\neval.points = [[0, 0]]\n");
    let (code, _, stderr) = epot(&["eval", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_PASS, "{stderr}");
    let report = rows(&dir.path().join("eval.csv"));
    assert_eq!(report.len(), 1);
    assert_eq!(&report[0][1], "potential");
    let v: f64 = report[0][3].parse().unwrap();
    assert!((v + 0.25).abs() < 1e-12, "{v}");
}

#[test]
fn tabulated_density_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let mut table = String::from("y1,y2,value\n");
    let q = elliptic_potentials::Domain::ball(&[0.0, 0.0], 1.0).unwrap().volume_rule(64);
    for y in &q.nodes {
        table.push_str(&format!("{},{},1\n", y[0], y[1]));
    }
    write(dir.path(), "f.csv", &table);
    let cfg = write(dir.path(), "run.conf", "density.table = f.csv\neval.points = [0, 0]\n");
    let (code, _, stderr) = epot(&["eval", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_PASS, "{stderr}");
    let v: f64 = rows(&dir.path().join("eval.csv"))[0][3].parse().unwrap();
    assert!((v + 0.25).abs() < 1e-10, "{v}");
}

#[test]
fn non_elliptic_operator_exits_with_the_assumption_message() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.conf", "domain.kind = ball\noperator.a2 = [1, 0, 0, -1]\n");
    let (code, _, stderr) = epot(&["verify", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_ERROR);
    assert!(stderr.contains("the following ellipticity assumption"), "{stderr}");
}

#[test]
fn config_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for (text, line) in [
        ("domain.kind = ball\n\nverify.checks = [hessian\n", 3),
        ("# comment\ndensity.preset = sawtooth\n", 2),
        ("domain.kind = ball\ndomain.kind = star\n", 2),
        ("verify.n = 2.5\n", 1),
    ] {
        let cfg = write(dir.path(), "bad.conf", text);
        let (code, _, stderr) = epot(&["verify", "--config", &cfg, "--out", out]);
        assert_eq!(code, EXIT_ERROR, "{text}");
        assert!(stderr.contains(&format!("line {line}")), "{text}: {stderr}");
    }
    let (code, _, stderr) = epot(&["verify", "--config", "/nonexistent/run.conf"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(stderr.contains("cannot read"));
}

#[test]
fn failing_checks_exit_one_and_still_write_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "strict.conf", "verify.checks = [transmission, pairings]\ntolerance.transmission = 1e-300\n");
    let (code, stdout, _) = epot(&["verify", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_FAIL, "{stdout}");
    let report = rows(&dir.path().join("verify.csv"));
    assert!(report.iter().any(|r| &r[0] == "transmission_volume" && &r[5] == "false"));
    assert!(report.iter().any(|r| &r[0] == "pairings" && &r[5] == "true"));
}

#[test]
fn reports_do_not_depend_on_the_thread_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(epot(&["verify", "--out", a.path().to_str().unwrap(), "--jobs", "1"]).0, EXIT_PASS);
    assert_eq!(epot(&["verify", "--out", b.path().to_str().unwrap(), "--jobs", "4"]).0, EXIT_PASS);
    let ra = std::fs::read(a.path().join("verify.csv")).unwrap();
    let rb = std::fs::read(b.path().join("verify.csv")).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn converge_and_modulus_pass_on_the_default_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for cmd in ["converge", "modulus"] {
        let (code, stdout, stderr) = epot(&[cmd, "--out", out]);
        assert_eq!(code, EXIT_PASS, "{cmd}: {stdout}{stderr}");
        assert!(dir.path().join(format!("{cmd}.csv")).exists());
    }
}

#[test]
fn three_dimensional_anisotropic_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "ball3.conf",
        "domain.kind = ball\ndomain.center = [0.1, 0, 0]\noperator.a2 = [2, 0.3, 0, 0.3, 1, 0.2, 0, 0.2, 1.5]\n\
         density.preset = cos_k\ndensity.k = 2\nverify.n = 20\n\
         verify.checks = [pde_identity, transmission, derivative_recursion, hessian, negative_exponent]\n",
    );
    let (code, stdout, stderr) = epot(&["verify", "--config", &cfg, "--out", dir.path().to_str().unwrap(), "--jobs", "3"]);
    assert_eq!(code, EXIT_PASS, "{stdout}{stderr}");
}

#[test]
fn binary_output_is_identical_across_runs() {
    let bin = env!("CARGO_BIN_EXE_epot");
    let first = Command::new(bin).arg("--provenance").output().unwrap();
    let second = Command::new(bin).arg("--provenance").output().unwrap();
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.contains("default tolerances:") && text.contains("pde_identity.interior"));
    let dir = tempfile::tempdir().unwrap();
    let run = Command::new(bin).args(["eval", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(run.status.code(), Some(0));
    let again = Command::new(bin).args(["eval", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(run.stdout, again.stdout);
    let missing = Command::new(bin).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn help_lists_the_subcommands() {
    let (code, stdout, _) = epot(&["--help"]);
    assert_eq!(code, EXIT_PASS);
    for cmd in ["eval", "verify", "converge", "modulus"] {
        assert!(stdout.contains(cmd), "{stdout}");
    }
}

#[test]
fn provenance_lists_every_default_tolerance() {
    let (code, stdout, _) = epot(&["--provenance"]);
    assert_eq!(code, EXIT_PASS);
    for (name, v) in elliptic_potentials::verify::DEFAULT_TOLERANCES {
        assert!(stdout.contains(&format!("{name:<28} {v:e}")), "{name}");
    }
}
