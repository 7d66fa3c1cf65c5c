//! `fbsing run`: sweep, dump, diagnose.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::Utc;
use fbsing_core::diagnostics::{DiagnosticsError, DiagnosticsReport};
use fbsing_core::geometry::{reflect_to_disk, write_field_file, GeometryError};
use fbsing_core::solver::{check_invariants, Problem, SolveError, Sweep};
use thiserror::Error;

use crate::config::RunConfig;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
}

#[derive(Debug)]
pub struct RunOutcome {
    pub sweep: Sweep,
    pub report: Option<DiagnosticsReport>,
    /// Every requested ε converged and diagnostics ran.
    pub complete: bool,
}

fn write(path: PathBuf, text: &str) -> Result<(), RunError> {
    fs::write(&path, text).map_err(|source| RunError::Io { path, source })
}

/// One `eps=… iters=… converged=… pde_residual=… sup_v=…` line per ε.
pub fn sweep_log(sweep: &Sweep) -> String {
    let mut s = String::new();
    for e in &sweep.entries {
        let _ = writeln!(
            s,
            "eps={:?} iters={} converged={} pde_residual={:.6e} sup_v={:.6e}",
            e.eps,
            e.log.iterations(),
            e.converged(),
            e.log.pde_residual,
            e.v.sup_norm()
        );
    }
    s
}

fn manifest(cfg: &RunConfig, workers: usize, started: &str, finished: &str, warnings: &[String]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# fbsing run manifest");
    let _ = writeln!(s, "# version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "# started = {started}");
    let _ = writeln!(s, "# finished = {finished}");
    let _ = writeln!(s, "# workers = {workers}");
    for w in warnings {
        let _ = writeln!(s, "# warning: {w}");
    }
    s.push_str(&cfg.resolved());
    s
}

/// Runs the sweep and diagnostics, writing every artifact under `out`.
///
/// Non-converged ε values are still dumped and logged; diagnostics use the
/// smallest converged ε. Solver failures other than non-convergence abort
/// with the files written so far.
pub fn run(cfg: &RunConfig, out: &Path, workers: usize) -> Result<RunOutcome, RunError> {
    let started = Utc::now().to_rfc3339();
    fs::create_dir_all(out).map_err(|source| RunError::Io { path: out.into(), source })?;
    let problem = Problem::new(&cfg.grid, &cfg.boundary, &cfg.beta);
    let sweep = problem.sweep(&cfg.solver)?;
    let mut warnings = sweep.warnings.clone();

    let g_sup = cfg.boundary.sup_norm(cfg.grid.m);
    let mut invariant_lines = String::new();
    for (k, e) in sweep.entries.iter().enumerate() {
        write_field_file(&e.v, out.join(format!("field_eps_{k}.dat")))?;
        if e.converged() {
            let inv = check_invariants(&e.v, e.eps, g_sup, 1e-9);
            let _ = writeln!(
                invariant_lines,
                "invariants eps={:?} origin_exact={} max_on_arc={} apriori_ok={} sup_v={:.6e} bound={:.6e}",
                e.eps, inv.origin_exact, inv.max_on_arc, inv.apriori_ok, inv.sup_v, inv.apriori_bound
            );
            if !inv.all_ok() {
                warnings.push(format!("eps={}: construction invariant violated", e.eps));
            }
        }
    }
    write(out.join("sweep.log"), &sweep_log(&sweep))?;

    let report = match sweep.converged().last() {
        None => {
            warnings.push("no converged eps; diagnostics skipped".into());
            None
        }
        Some(e) => {
            let v = reflect_to_disk(&cfg.grid, &e.v)?;
            let chi = cfg.beta.chi_eps(e.eps, &v).map_err(SolveError::from)?;
            let rep = DiagnosticsReport::compute(&v, &chi, &cfg.report)?;
            rep.write_dir(out)?;
            let mut summary = format!("diagnostics_eps = {:?}\n", e.eps);
            summary.push_str(&rep.summary());
            summary.push_str(&invariant_lines);
            write(out.join("summary.txt"), &summary)?;
            Some(rep)
        }
    };

    let complete = sweep.all_converged(cfg.solver.eps_schedule.len()) && report.is_some();
    let finished = Utc::now().to_rfc3339();
    write(out.join("manifest.txt"), &manifest(cfg, workers, &started, &finished, &warnings))?;
    Ok(RunOutcome { sweep, report, complete })
}
