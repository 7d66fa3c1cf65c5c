use crate::linalg::Preconditioner;

use super::SolveError;

/// Diagonal shift used inside each Picard step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stabilization {
    /// Plain operator `T`: solve `Δw = β_ε(u - u(0) + ε)`.
    None,
    /// Solve `(Δ - S) w = β_ε(v) - S u` with `S = max(β_ε'(v), 0)`. Same fixed
    /// points as `T`, but the iteration stays contractive inside the reaction
    /// layer where `T` alone amplifies errors by `O(ε⁻²)`.
    PositiveSlope,
}

impl Stabilization {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "none" => Some(Stabilization::None),
            "positive-slope" => Some(Stabilization::PositiveSlope),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Stabilization::None => "none",
            Stabilization::PositiveSlope => "positive-slope",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    /// Relative residual of each inner linear solve.
    pub tol_linear: f64,
    pub max_iter_linear: usize,
    /// Fixed-point tolerance; the sup-norm update must fall below `tol_fp·ε`.
    pub tol_fp: f64,
    pub max_iter_fp: usize,
    /// Damping `ω` in `u ← (1-ω)u + ω·T(u)`.
    pub damping: f64,
    pub eps_schedule: Vec<f64>,
    pub stabilization: Stabilization,
    pub preconditioner: Preconditioner,
    /// Abort when the update grows by more than this factor ...
    pub divergence_factor: f64,
    /// ... over this many iterations.
    pub divergence_window: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            tol_linear: 1e-10,
            max_iter_linear: 2000,
            tol_fp: 1e-8,
            max_iter_fp: 500,
            damping: 0.7,
            eps_schedule: geometric_schedule(0.4, 0.5, 3),
            stabilization: Stabilization::PositiveSlope,
            preconditioner: Preconditioner::Spectral,
            divergence_factor: 10.0,
            divergence_window: 20,
        }
    }
}

/// `ε_k = eps0·ρ^k` for `k = 0..=k_max`.
pub fn geometric_schedule(eps0: f64, rho: f64, k_max: usize) -> Vec<f64> {
    (0..=k_max).map(|k| eps0 * rho.powi(k as i32)).collect()
}

impl SolveConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |msg: String| Err(SolveError::InvalidConfig(msg));
        if !(self.tol_linear > 0.0) || !(self.tol_fp > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return bad(format!("damping must lie in (0, 1], got {}", self.damping));
        }
        if self.max_iter_fp == 0 || self.max_iter_linear == 0 {
            return bad("iteration caps must be positive".into());
        }
        if self.eps_schedule.is_empty() {
            return bad("eps schedule is empty".into());
        }
        if self.eps_schedule.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
            return bad("eps schedule entries must be positive".into());
        }
        if self.eps_schedule.windows(2).any(|w| w[1] >= w[0]) {
            return bad("eps schedule must be strictly decreasing".into());
        }
        if !(self.divergence_factor > 1.0) || self.divergence_window == 0 {
            return bad("divergence detector needs factor > 1 and a positive window".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule() {
        let c = SolveConfig::default();
        assert_eq!(c.eps_schedule, vec![0.4, 0.2, 0.1, 0.05]);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn rejects_invalid() {
        let mut c = SolveConfig { damping: 0.0, ..Default::default() };
        assert!(c.validate().is_err());
        c.damping = 1.0;
        c.eps_schedule = vec![0.1, 0.2];
        assert!(c.validate().is_err());
        c.eps_schedule = vec![0.2, -0.1];
        assert!(c.validate().is_err());
        c.eps_schedule = vec![0.2];
        c.tol_fp = 0.0;
        assert!(c.validate().is_err());
    }
}
