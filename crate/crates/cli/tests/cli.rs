use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const MINIMAL: &str = "m = 3\nnr = 64\nntheta = 16\nbeta.kind = sine\nsolver.eps = 0.2\n";

fn fbsing(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fbsing")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn minimal_run_writes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), MINIMAL);
    let out = tmp.path().join("out");
    let o = fbsing(&["run", &cfg, "--out", out.to_str().unwrap(), "--workers", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["manifest.txt", "sweep.log", "field_eps_0.dat", "phi.csv", "growth.csv", "nondeg.csv", "fb.csv", "fbcond.csv", "summary.txt"] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    assert!(!out.join("field_eps_1.dat").exists());
    let log = fs::read_to_string(out.join("sweep.log")).unwrap();
    let line = log.lines().next().unwrap();
    assert!(line.starts_with("eps=0.2 iters="), "{line}");
    assert!(line.contains("converged=true") && line.contains("pde_residual=") && line.contains("sup_v="));
    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    for key in ["solver.tol_fp", "solver.damping", "diag.radii", "g.coeffs", "# version", "# started"] {
        assert!(manifest.contains(key), "manifest lacks {key}");
    }
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("degenerate = ") && summary.contains("growth_slope = "));
}

#[test]
fn single_worker_runs_are_bit_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), MINIMAL);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        let o = fbsing(&["run", &cfg, "--out", d.to_str().unwrap(), "--workers", "1"]);
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["field_eps_0.dat", "phi.csv", "growth.csv", "fb.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn invalid_configs_exit_1_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        (MINIMAL.replace("m = 3", "m = 2"), "at least 3"),
        (MINIMAL.replace("beta.kind = sine\n", ""), "beta.kind"),
        (format!("{MINIMAL}g.coeffs = 0.5\n"), "non-constant g"),
    ];
    for (text, needle) in cases {
        let cfg = write_config(tmp.path(), &text);
        let out = tmp.path().join("never");
        let o = fbsing(&["run", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1));
        assert!(stderr(&o).contains(needle), "{}", stderr(&o));
        assert!(!out.exists());
        let o = fbsing(&["validate", &cfg]);
        assert_eq!(o.status.code(), Some(1));
        assert!(stderr(&o).contains(needle));
    }
}

#[test]
fn validate_echoes_resolved_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), MINIMAL);
    let o = fbsing(&["validate", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("solver.max_iter_fp = 500"));
    assert!(text.contains("solver.stabilization = positive-slope"));
}

#[test]
fn coarse_grid_warning_lands_in_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &MINIMAL.replace("nr = 64", "nr = 16"));
    let out = tmp.path().join("out");
    let o = fbsing(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("# warning: resolution"), "{manifest}");
}

#[test]
fn non_convergence_exits_2_and_keeps_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("{MINIMAL}solver.max_iter_fp = 2\n"));
    let out = tmp.path().join("out");
    let o = fbsing(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(out.join("field_eps_0.dat").exists());
    let log = fs::read_to_string(out.join("sweep.log")).unwrap();
    assert!(log.contains("converged=false"));
    assert!(out.join("manifest.txt").exists());
}

#[test]
fn unwritable_output_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), MINIMAL);
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = fbsing(&["run", &cfg, "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn oracle_check_passes() {
    let o = fbsing(&["oracle-check"]);
    assert_eq!(o.status.code(), Some(0));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("sine") && !table.contains("NO"), "{table}");
}
