use crate::geometry::{BoundaryData, ScalarField, SectorGrid};
use crate::reaction::BetaProfile;

use super::{normalize_v, FixedPointLog, Problem, SolveConfig, SolveError};

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub eps: f64,
    /// Final (or best) iterate `u_ε`.
    pub u: ScalarField<SectorGrid>,
    /// `v_ε = u_ε - u_ε(0) + ε`.
    pub v: ScalarField<SectorGrid>,
    pub log: FixedPointLog,
    pub diverged: bool,
}

impl SweepEntry {
    pub fn converged(&self) -> bool {
        self.log.converged
    }
}

#[derive(Debug, Clone, Default)]
pub struct Sweep {
    pub entries: Vec<SweepEntry>,
    pub warnings: Vec<String>,
    /// Set when two consecutive ε failed and the rest of the schedule was skipped.
    pub aborted: bool,
}

impl Sweep {
    pub fn converged(&self) -> impl Iterator<Item = &SweepEntry> {
        self.entries.iter().filter(|e| e.converged())
    }

    pub fn all_converged(&self, requested: usize) -> bool {
        self.entries.len() == requested && self.entries.iter().all(|e| e.converged())
    }
}

/// Warning text when `dr > ε_min / 8`.
pub fn resolution_warning(grid: &SectorGrid, schedule: &[f64]) -> Option<String> {
    let eps_min = schedule.iter().copied().fold(f64::INFINITY, f64::min);
    (grid.dr > eps_min / 8.0).then(|| {
        format!(
            "resolution: dr = {:.4e} exceeds eps_min/8 = {:.4e}; the reaction layer is under-resolved",
            grid.dr,
            eps_min / 8.0
        )
    })
}

impl Problem {
    /// Runs the schedule with warm starts. The first ε starts from the harmonic
    /// extension of `g`; every later one from the last converged `u`.
    pub fn sweep(&self, config: &SolveConfig) -> Result<Sweep, SolveError> {
        config.validate()?;
        let mut out = Sweep::default();
        out.warnings.extend(resolution_warning(self.grid(), &config.eps_schedule));
        let mut start = self.harmonic_extension(config)?;
        let mut failures = 0;
        for &eps in &config.eps_schedule {
            let (u, log, diverged) = match self.fixed_point(eps, &start, config) {
                Ok((u, log)) => (u, log, false),
                Err(SolveError::Diverged { log, best, .. }) => (*best, *log, true),
                Err(e) => return Err(e),
            };
            let v = normalize_v(&u, eps);
            if log.converged {
                failures = 0;
                start = u.clone();
            } else {
                failures += 1;
                out.warnings.push(format!(
                    "eps={eps}: not converged after {} iterations (last update {:.3e}){}",
                    log.iterations(),
                    log.final_update(),
                    if diverged { ", diverging" } else { "" }
                ));
            }
            out.entries.push(SweepEntry { eps, u, v, log, diverged });
            if failures >= 2 {
                out.aborted = out.entries.len() < config.eps_schedule.len();
                break;
            }
        }
        Ok(out)
    }
}

pub fn eps_sweep(
    g: &BoundaryData,
    profile: &BetaProfile,
    grid: &SectorGrid,
    config: &SolveConfig,
) -> Result<Sweep, SolveError> {
    Problem::new(grid, g, profile).sweep(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_eps_matches_fixed_point() {
        let grid = SectorGrid::new(3, 32, 32).unwrap();
        let g = BoundaryData::cos_m();
        let beta = BetaProfile::sine();
        let cfg = SolveConfig { eps_schedule: vec![0.3], ..Default::default() };
        let sweep = eps_sweep(&g, &beta, &grid, &cfg).unwrap();
        assert_eq!(sweep.entries.len(), 1);
        let p = Problem::new(&grid, &g, &beta);
        let h = p.harmonic_extension(&cfg).unwrap();
        let (u, log) = p.fixed_point(0.3, &h, &cfg).unwrap();
        assert_eq!(sweep.entries[0].u, u);
        assert_eq!(sweep.entries[0].v, normalize_v(&u, 0.3));
        assert_eq!(sweep.entries[0].log, log);
    }

    #[test]
    fn resolution_rule() {
        let grid = SectorGrid::new(3, 64, 16).unwrap();
        assert!(resolution_warning(&grid, &[0.2]).is_none());
        assert!(resolution_warning(&grid, &[0.2, 0.1]).is_some());
    }

    #[test]
    fn two_failures_abort() {
        let grid = SectorGrid::new(3, 16, 16).unwrap();
        let cfg = SolveConfig {
            eps_schedule: vec![0.4, 0.2, 0.1],
            max_iter_fp: 1,
            ..Default::default()
        };
        let sweep = eps_sweep(&BoundaryData::cos_m(), &BetaProfile::sine(), &grid, &cfg).unwrap();
        assert_eq!(sweep.entries.len(), 2);
        assert!(sweep.aborted);
        assert!(sweep.converged().next().is_none());
    }
}
