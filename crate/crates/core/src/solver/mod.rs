//! Picard iteration for the sector problem, normalization and ε-continuation.

mod config;
mod invariants;
mod sweep;

pub use config::{geometric_schedule, SolveConfig, Stabilization};
pub use invariants::{
    boundary_gradient_profile, check_invariants, fit_log_gradient_constant, max_gradient,
    InvariantReport,
};
pub use sweep::{eps_sweep, resolution_warning, Sweep, SweepEntry};

use thiserror::Error;

use crate::geometry::{
    assemble_laplacian, BoundaryData, GeometryError, Grid, Laplacian, ScalarField, SectorGrid,
};
use crate::linalg::{solve_shifted, LinalgError, SpectralSolver};
use crate::reaction::{BetaProfile, ReactionError, ScaledBeta};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Reaction(#[from] ReactionError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("eps={eps}: linear solve failed in Picard step {step}: {source}")]
    Linear {
        eps: f64,
        step: usize,
        #[source]
        source: LinalgError,
    },
    #[error("eps={eps}: fixed-point iteration diverged after {} steps (update {:.3e})",
        log.updates.len(), log.updates.last().copied().unwrap_or(f64::NAN))]
    Diverged {
        eps: f64,
        log: Box<FixedPointLog>,
        best: Box<ScalarField<SectorGrid>>,
    },
}

/// Per-solve iteration record.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FixedPointLog {
    pub eps: f64,
    /// Sup-norm update `‖u_{k+1} - u_k‖∞` of every Picard step.
    pub updates: Vec<f64>,
    /// Inner CG iterations of every Picard step.
    pub linear_iterations: Vec<usize>,
    /// `max |Δu - β_ε(v)| / |L_pp|` over non-arc nodes, in units of `u`.
    pub pde_residual: f64,
    /// Unscaled `max |Δu - β_ε(v)|`.
    pub pde_residual_raw: f64,
    pub converged: bool,
}

impl FixedPointLog {
    pub fn iterations(&self) -> usize {
        self.updates.len()
    }

    pub fn final_update(&self) -> f64 {
        self.updates.last().copied().unwrap_or(f64::INFINITY)
    }
}

/// Operators of one sector problem, built once and reused across Picard steps
/// and ε values.
#[derive(Debug)]
pub struct Problem {
    grid: SectorGrid,
    lap: Laplacian,
    spectral: SpectralSolver,
    boundary: BoundaryData,
    arc: Vec<f64>,
    profile: BetaProfile,
}

impl Problem {
    pub fn new(grid: &SectorGrid, boundary: &BoundaryData, profile: &BetaProfile) -> Self {
        Problem {
            grid: *grid,
            lap: assemble_laplacian(grid),
            spectral: SpectralSolver::new(grid),
            boundary: boundary.clone(),
            arc: boundary.on_arc(grid),
            profile: profile.clone(),
        }
    }

    pub fn grid(&self) -> &SectorGrid {
        &self.grid
    }

    pub fn laplacian(&self) -> &Laplacian {
        &self.lap
    }

    pub fn boundary(&self) -> &BoundaryData {
        &self.boundary
    }

    pub fn profile(&self) -> &BetaProfile {
        &self.profile
    }

    fn check_field(&self, u: &ScalarField<SectorGrid>) -> Result<(), SolveError> {
        if u.grid() != &self.grid {
            return Err(GeometryError::GridMismatch.into());
        }
        Ok(())
    }

    /// Places `g` on the arc nodes of `values`.
    fn impose_arc(&self, values: &mut [f64]) {
        for (j, &gj) in self.arc.iter().enumerate() {
            values[self.grid.index(self.grid.nr, j)] = gj;
        }
    }

    /// Discrete harmonic extension of `g`.
    pub fn harmonic_extension(&self, config: &SolveConfig) -> Result<ScalarField<SectorGrid>, SolveError> {
        let n = self.grid.node_count();
        let mut rhs = vec![0.0; n];
        self.impose_arc(&mut rhs);
        let mut x = vec![0.0; n];
        solve_shifted(
            &self.lap,
            Some(&self.spectral),
            config.preconditioner,
            &vec![0.0; n],
            &rhs,
            &mut x,
            config.tol_linear,
            config.max_iter_linear,
        )
        .map_err(|source| SolveError::Linear { eps: f64::NAN, step: 0, source })?;
        Ok(ScalarField::new(self.grid, x)?)
    }

    /// One linear solve `(Δ - S) w = β_ε(u - u(0) + ε) - S u`, `w = g` on the
    /// arc, with `u(0)` frozen. `S = 0` gives the operator `T` itself.
    fn step(
        &self,
        u: &[f64],
        sb: &ScaledBeta<'_>,
        stabilization: Stabilization,
        config: &SolveConfig,
        step: usize,
    ) -> Result<(Vec<f64>, usize), SolveError> {
        let n = u.len();
        let eps = sb.eps();
        let u0 = u[0];
        let mut shift = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for k in 0..n {
            let v = u[k] - u0 + eps;
            let s = match stabilization {
                Stabilization::None => 0.0,
                Stabilization::PositiveSlope => sb.beta_derivative(v).max(0.0),
            };
            shift[k] = s;
            rhs[k] = sb.beta(v) - s * u[k];
        }
        self.impose_arc(&mut rhs);
        let mut w = u.to_vec();
        let stats = solve_shifted(
            &self.lap,
            Some(&self.spectral),
            config.preconditioner,
            &shift,
            &rhs,
            &mut w,
            config.tol_linear,
            config.max_iter_linear,
        )
        .map_err(|source| SolveError::Linear { eps, step, source })?;
        Ok((w, stats.iterations))
    }

    /// `T(u)`: the solution of `Δw = β_ε(u - u(0) + ε)` with `w = g` on the arc.
    pub fn apply_t(
        &self,
        u: &ScalarField<SectorGrid>,
        eps: f64,
        config: &SolveConfig,
    ) -> Result<ScalarField<SectorGrid>, SolveError> {
        self.check_field(u)?;
        let sb = self.profile.scaled(eps)?;
        let (w, _) = self.step(u.values(), &sb, Stabilization::None, config, 0)?;
        Ok(ScalarField::new(self.grid, w)?)
    }

    /// Residual of `Δu = β_ε(u - u(0) + ε)`: returns `(scaled, raw)`, see
    /// [`FixedPointLog`].
    pub fn pde_residual(&self, u: &ScalarField<SectorGrid>, eps: f64) -> Result<(f64, f64), SolveError> {
        self.check_field(u)?;
        let sb = self.profile.scaled(eps)?;
        let vals = u.values();
        let lu = self.lap.apply(vals);
        let u0 = vals[0];
        let (mut scaled, mut raw) = (0.0f64, 0.0f64);
        for k in 0..vals.len() {
            if self.lap.is_dirichlet(k) {
                continue;
            }
            let r = (lu[k] - sb.beta(vals[k] - u0 + eps)).abs();
            raw = raw.max(r);
            scaled = scaled.max(r / self.lap.diagonal(k).abs());
        }
        Ok((scaled, raw))
    }

    /// Damped Picard iteration `u ← (1-ω)u + ω·w` from `init`.
    ///
    /// Stops when the sup-norm update is at most `tol_fp·ε`. Without
    /// convergence the iterate with the smallest update is returned with
    /// `converged = false`. A growing update aborts with
    /// [`SolveError::Diverged`].
    pub fn fixed_point(
        &self,
        eps: f64,
        init: &ScalarField<SectorGrid>,
        config: &SolveConfig,
    ) -> Result<(ScalarField<SectorGrid>, FixedPointLog), SolveError> {
        config.validate()?;
        self.check_field(init)?;
        let sb = self.profile.scaled(eps)?;
        let omega = config.damping;
        let target = config.tol_fp * eps;

        let mut u = init.values().to_vec();
        self.impose_arc(&mut u);
        let mut log = FixedPointLog { eps, ..Default::default() };
        let mut best = u.clone();
        let mut best_update = f64::INFINITY;

        for step in 0..config.max_iter_fp {
            let (w, lin) = self.step(&u, &sb, config.stabilization, config, step)?;
            let mut update = 0.0f64;
            for (uk, wk) in u.iter_mut().zip(&w) {
                let next = (1.0 - omega) * *uk + omega * wk;
                update = update.max((next - *uk).abs());
                *uk = next;
            }
            log.updates.push(update);
            log.linear_iterations.push(lin);
            if update < best_update {
                best_update = update;
                best.copy_from_slice(&u);
            }
            if update <= target {
                log.converged = true;
                break;
            }
            let k = log.updates.len();
            let window = config.divergence_window;
            let blown = !update.is_finite()
                || (k > window && update > config.divergence_factor * log.updates[k - 1 - window]);
            if blown {
                let field = ScalarField::new(self.grid, best)?;
                let (s, r) = self.pde_residual(&field, eps)?;
                log.pde_residual = s;
                log.pde_residual_raw = r;
                return Err(SolveError::Diverged { eps, log: Box::new(log), best: Box::new(field) });
            }
        }

        let out = if log.converged { u } else { best };
        let field = ScalarField::new(self.grid, out)?;
        let (s, r) = self.pde_residual(&field, eps)?;
        log.pde_residual = s;
        log.pde_residual_raw = r;
        Ok((field, log))
    }
}

/// `T(u)` as a free function; builds the operators on every call.
pub fn apply_t(
    u: &ScalarField<SectorGrid>,
    g: &BoundaryData,
    profile: &BetaProfile,
    eps: f64,
    grid: &SectorGrid,
    config: &SolveConfig,
) -> Result<ScalarField<SectorGrid>, SolveError> {
    Problem::new(grid, g, profile).apply_t(u, eps, config)
}

pub fn fixed_point(
    g: &BoundaryData,
    profile: &BetaProfile,
    eps: f64,
    init: &ScalarField<SectorGrid>,
    grid: &SectorGrid,
    config: &SolveConfig,
) -> Result<(ScalarField<SectorGrid>, FixedPointLog), SolveError> {
    Problem::new(grid, g, profile).fixed_point(eps, init, config)
}

/// `v = u - u(0) + ε`. The origin value is `ε` exactly.
pub fn normalize_v<G: Grid>(u: &ScalarField<G>, eps: f64) -> ScalarField<G> {
    let u0 = u.origin_value();
    u.map(|x| x - u0 + eps)
}
