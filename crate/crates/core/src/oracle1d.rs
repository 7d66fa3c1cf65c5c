//! One-dimensional ground truth for `v'' = β_ε(v)`: the travelling profile
//! (closed form for the sine reaction, RK4 otherwise) and a brute-force
//! boundary-value solver using the same damped, stabilized Picard iteration as
//! the sector solver.

use std::f64::consts::PI;
use std::fmt::Write as _;

use thiserror::Error;

use crate::linalg::solve_tridiagonal;
use crate::reaction::{BetaKind, BetaProfile, ReactionError};
use crate::solver::{FixedPointLog, SolveConfig, SolveError, Stabilization};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("grid step {h} must be at most eps/8 = {}", eps / 8.0)]
    StepTooCoarse { h: f64, eps: f64 },
    #[error(transparent)]
    Reaction(#[from] ReactionError),
    #[error(transparent)]
    Config(#[from] SolveError),
    #[error("eps={eps}: 1D iteration diverged after {} steps", log.updates.len())]
    Diverged { eps: f64, log: Box<FixedPointLog> },
}

/// Sampled profile on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile1D {
    pub eps: f64,
    pub closed_form: bool,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

impl Profile1D {
    pub fn sup_distance(&self, other: &Profile1D) -> f64 {
        self.v.iter().zip(&other.v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Two columns `x,v` with a header row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,v\n");
        for (x, v) in self.x.iter().zip(&self.v) {
            let _ = writeln!(s, "{x:.16e},{v:.16e}");
        }
        s
    }
}

/// Uniform nodes on `[-1, 1]` with `round(2/h)` intervals.
pub fn grid_1d(h: f64) -> Vec<f64> {
    let n = (2.0 / h).round() as usize;
    (0..=n).map(|k| -1.0 + 2.0 * k as f64 / n as f64).collect()
}

/// `W(t) = (4/π)·atan(e^{πt/2})` for `t ≤ 0`, `1 + t` beyond.
pub fn sine_layer(t: f64) -> f64 {
    if t <= 0.0 {
        4.0 / PI * (0.5 * PI * t).exp().atan()
    } else {
        1.0 + t
    }
}

/// `ε·W(x/ε)`: the profile solving `v'' = β_ε(v)` for the sine reaction with
/// `v(0) = ε`, slope 1 on the right and `v → 0` on the left.
pub fn exact_profile_sine(eps: f64, x: f64) -> f64 {
    eps * sine_layer(x / eps)
}

/// Layer `W` for any profile, tabulated by RK4 on `W' = √(2B(W))` from
/// `W(0) = 1` towards negative `t` with step `1/100`.
#[derive(Debug, Clone)]
pub struct LayerTable {
    step: f64,
    /// `W(-k·step)` for `k = 0, 1, ...`.
    w: Vec<f64>,
    dw: Vec<f64>,
}

impl LayerTable {
    pub const STEP: f64 = 0.01;

    pub fn new(profile: &BetaProfile, t_min: f64) -> Self {
        let f = |w: f64| (2.0 * profile.primitive(w.clamp(0.0, 1.0))).sqrt();
        let h = Self::STEP;
        let n = ((-t_min).max(0.0) / h).ceil() as usize + 1;
        let mut w = Vec::with_capacity(n + 1);
        let mut dw = Vec::with_capacity(n + 1);
        let mut y = 1.0;
        w.push(y);
        dw.push(f(y));
        // marching backwards in t: dy/ds = -f(y) with s = -t
        for _ in 0..n {
            let k1 = -f(y);
            let k2 = -f(y + 0.5 * h * k1);
            let k3 = -f(y + 0.5 * h * k2);
            let k4 = -f(y + h * k3);
            y = (y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).max(0.0);
            w.push(y);
            dw.push(f(y));
        }
        LayerTable { step: h, w, dw }
    }

    /// Cubic Hermite interpolation of the table; linear branch for `t > 0`.
    pub fn eval(&self, t: f64) -> f64 {
        if t > 0.0 {
            return 1.0 + t;
        }
        let s = -t / self.step;
        let k = (s.floor() as usize).min(self.w.len() - 2);
        let a = s - k as f64;
        let (y0, y1) = (self.w[k], self.w[k + 1]);
        // derivatives with respect to s are -W'
        let (d0, d1) = (-self.dw[k] * self.step, -self.dw[k + 1] * self.step);
        let a2 = a * a;
        let a3 = a2 * a;
        (2.0 * a3 - 3.0 * a2 + 1.0) * y0
            + (a3 - 2.0 * a2 + a) * d0
            + (-2.0 * a3 + 3.0 * a2) * y1
            + (a3 - a2) * d1
    }
}

/// The travelling profile sampled at `xs`. Closed form for the sine
/// reaction, RK4 layer otherwise.
pub fn exact_profile(profile: &BetaProfile, eps: f64, xs: &[f64]) -> Result<Profile1D, OracleError> {
    if !(eps > 0.0) {
        return Err(ReactionError::NonPositiveEps(eps).into());
    }
    if profile.kind() == BetaKind::Sine {
        return Ok(Profile1D {
            eps,
            closed_form: true,
            x: xs.to_vec(),
            v: xs.iter().map(|&x| exact_profile_sine(eps, x)).collect(),
        });
    }
    let t_min = xs.iter().fold(0.0f64, |a, &x| a.min(x / eps));
    let table = LayerTable::new(profile, t_min);
    Ok(Profile1D { eps, closed_form: false, x: xs.to_vec(), v: xs.iter().map(|&x| eps * table.eval(x / eps)).collect() })
}

/// Gauss–Legendre on `[-1, 1]`, 4 points.
const GL_X: [f64; 4] = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
const GL_W: [f64; 4] = [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];

/// Mean of `β_ε` over `[x_k - h/2, x_k + h/2]` along the piecewise-linear
/// interpolant, each half by 4-point Gauss.
fn cell_average(beta: impl Fn(f64) -> f64, left: f64, mid: f64, right: f64) -> f64 {
    let mut acc = 0.0;
    for (x, w) in GL_X.iter().zip(GL_W) {
        // τ ∈ [0, 1/2] measured from the node, in units of h
        let tau = 0.25 * (x + 1.0);
        acc += w * (beta(mid + (left - mid) * tau) + beta(mid + (right - mid) * tau));
    }
    0.25 * acc
}

/// Solves `v'' = β_ε(v)` on `[-1, 1]` with `v(-1) = left`, `v(1) = right`.
///
/// Three-point second difference with the reaction averaged over each dual
/// cell, which keeps the scheme second order across the kink of the layer.
/// Iteration and stopping follow [`SolveConfig`]: damped Picard with the
/// positive-slope shift, `tol_fp·ε` on the sup-norm update, divergence
/// detection and best-iterate return. Starts from the linear interpolant.
pub fn solve_bvp_1d(
    profile: &BetaProfile,
    eps: f64,
    h: f64,
    left: f64,
    right: f64,
    config: &SolveConfig,
) -> Result<(Profile1D, FixedPointLog), OracleError> {
    config.validate()?;
    let sb = profile.scaled(eps)?;
    if !(h > 0.0 && h <= eps / 8.0) {
        return Err(OracleError::StepTooCoarse { h, eps });
    }
    let x = grid_1d(h);
    let n = x.len() - 1;
    let h = 2.0 / n as f64;
    let h2 = h * h;
    let mut u: Vec<f64> = x.iter().map(|&xi| left + (right - left) * (xi + 1.0) / 2.0).collect();
    let mut log = FixedPointLog { eps, ..Default::default() };
    let mut best = u.clone();
    let mut best_update = f64::INFINITY;
    let target = config.tol_fp * eps;
    let ni = n - 1;
    let (mut a, mut b, mut c, mut d) = (vec![1.0; ni], vec![0.0; ni], vec![1.0; ni], vec![0.0; ni]);

    for _ in 0..config.max_iter_fp {
        for k in 0..ni {
            let q = k + 1;
            let f = cell_average(|s| sb.beta(s), u[q - 1], u[q], u[q + 1]);
            let s = match config.stabilization {
                Stabilization::PositiveSlope => sb.beta_derivative(u[q]).max(0.0),
                Stabilization::None => 0.0,
            };
            b[k] = -2.0 - s * h2;
            d[k] = (f - s * u[q]) * h2;
        }
        a[0] = 0.0;
        c[ni - 1] = 0.0;
        d[0] -= left;
        d[ni - 1] -= right;
        let w = solve_tridiagonal(&a, &b, &c, &d);
        let mut update = 0.0f64;
        for (uk, wk) in u[1..n].iter_mut().zip(&w) {
            let next = (1.0 - config.damping) * *uk + config.damping * wk;
            update = update.max((next - *uk).abs());
            *uk = next;
        }
        log.updates.push(update);
        log.linear_iterations.push(1);
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
        if !update.is_finite() || (k > window && update > config.divergence_factor * log.updates[k - 1 - window]) {
            return Err(OracleError::Diverged { eps, log: Box::new(log) });
        }
    }
    let v = if log.converged { u } else { best };
    let raw = (1..n)
        .map(|q| {
            let lap = (v[q - 1] - 2.0 * v[q] + v[q + 1]) / h2;
            (lap - cell_average(|s| sb.beta(s), v[q - 1], v[q], v[q + 1])).abs()
        })
        .fold(0.0, f64::max);
    log.pde_residual_raw = raw;
    log.pde_residual = raw * h2 / 2.0;
    Ok((Profile1D { eps, closed_form: false, x, v }, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::least_squares_slope;
    use approx::assert_abs_diff_eq;

    fn cfg() -> SolveConfig {
        SolveConfig { tol_fp: 1e-12, max_iter_fp: 2000, ..SolveConfig::default() }
    }

    #[test]
    fn closed_form_anchor_points() {
        let eps = 0.1;
        assert_abs_diff_eq!(exact_profile_sine(eps, 0.0), eps, epsilon = 1e-16);
        assert_abs_diff_eq!(exact_profile_sine(eps, eps), 2.0 * eps, epsilon = 1e-16);
        assert!(exact_profile_sine(eps, -1.0) < 1e-6);
        assert!(exact_profile_sine(eps, -40.0 * eps) < 1e-20);
    }

    #[test]
    fn closed_form_solves_the_first_order_law() {
        // W' = sin(πW/2) on t ≤ 0, by central differences of the closed form
        let dt = 1e-5;
        for k in 0..1000 {
            let t = -8.0 * k as f64 / 999.0;
            let fd = (sine_layer(t + dt) - sine_layer(t - dt)) / (2.0 * dt);
            let fd = if k == 0 { (sine_layer(0.0) - sine_layer(-dt)) / dt } else { fd };
            let tol = if k == 0 { 1e-5 } else { 1e-10 };
            assert_abs_diff_eq!(fd, (0.5 * PI * sine_layer(t)).sin(), epsilon = tol);
        }
    }

    #[test]
    fn closed_form_ode_residual_sixth_order() {
        let beta = BetaProfile::sine();
        let dt: f64 = 1e-2;
        // 7-point sixth-order second difference
        let c = [1.0 / 90.0, -3.0 / 20.0, 1.5, -49.0 / 18.0, 1.5, -3.0 / 20.0, 1.0 / 90.0];
        for k in 0..1000 {
            let t = -0.05 - 8.0 * k as f64 / 999.0;
            let w2: f64 = c.iter().enumerate().map(|(i, ci)| ci * sine_layer(t + (i as f64 - 3.0) * dt)).sum::<f64>() / (dt * dt);
            let w = sine_layer(t);
            assert!((w2 - beta.beta(w)).abs() <= 1e-8, "t={t}: {}", (w2 - beta.beta(w)).abs());
        }
    }

    #[test]
    fn chi_transition_width() {
        let eps = 0.05;
        let beta = BetaProfile::sine();
        let sb = beta.scaled(eps).unwrap();
        let xs = grid_1d(eps / 200.0);
        let inside: Vec<f64> = xs
            .iter()
            .copied()
            .filter(|&x| {
                let c = sb.chi(exact_profile_sine(eps, x));
                c > 0.01 && c < 0.99
            })
            .collect();
        let width = inside.last().unwrap() - inside.first().unwrap();
        assert!(width <= 3.0 * eps, "{width}");
    }

    #[test]
    fn fb_condition_of_the_profile() {
        // one-sided least-squares slopes from the point where χ_ε = 1/2, i.e.
        // W = 1/2, probe length 0.2
        let t_half = 2.0 / PI * (PI / 8.0).tan().ln();
        assert_abs_diff_eq!(sine_layer(t_half), 0.5, epsilon = 1e-15);
        for eps in [0.05, 0.02] {
            let x0 = t_half * eps;
            let ts: Vec<f64> = (0..=32).map(|k| 0.2 * k as f64 / 32.0).collect();
            let plus: Vec<f64> = ts.iter().map(|t| exact_profile_sine(eps, x0 + t).max(0.0)).collect();
            let minus: Vec<f64> = ts.iter().map(|t| (-exact_profile_sine(eps, x0 - t)).max(0.0)).collect();
            let (a, b) = (least_squares_slope(&ts, &plus), least_squares_slope(&ts, &minus));
            assert!((a * a - b * b - 1.0).abs() <= 0.05, "eps={eps}: {}", a * a - b * b - 1.0);
        }
    }

    #[test]
    fn rk4_layer_matches_closed_form_for_sine() {
        let t = LayerTable::new(&BetaProfile::sine(), -10.0);
        for k in 0..200 {
            let s = -10.0 * k as f64 / 199.0;
            // the primitive table limits accuracy in the far tail where B ~ W²
            assert_abs_diff_eq!(t.eval(s), sine_layer(s), epsilon = 2e-5);
        }
    }

    #[test]
    fn rk4_layer_for_poly_bump_solves_the_ode() {
        let beta = BetaProfile::poly_bump();
        let t = LayerTable::new(&beta, -10.0);
        let dt = 1e-2;
        for k in 1..100 {
            let s = -0.1 - 5.0 * k as f64 / 100.0;
            let w2 = (t.eval(s + dt) - 2.0 * t.eval(s) + t.eval(s - dt)) / (dt * dt);
            assert_abs_diff_eq!(w2, beta.beta(t.eval(s)), epsilon = 2e-3);
        }
        assert_abs_diff_eq!(t.eval(0.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn bvp_matches_closed_form_at_second_order() {
        let beta = BetaProfile::sine();
        let eps = 0.1;
        let (l, r) = (exact_profile_sine(eps, -1.0), exact_profile_sine(eps, 1.0));
        let mut errs = vec![];
        for div in [16.0, 32.0] {
            let (p, log) = solve_bvp_1d(&beta, eps, eps / div, l, r, &cfg()).unwrap();
            assert!(log.converged);
            let ex = exact_profile(&beta, eps, &p.x).unwrap();
            errs.push(p.sup_distance(&ex));
        }
        assert!(errs[0] <= 1e-2, "{errs:?}");
        let ratio = errs[0] / errs[1];
        assert!((3.5..=4.5).contains(&ratio), "{errs:?} {ratio}");
    }

    #[test]
    fn inactive_reaction_gives_the_linear_interpolant() {
        let beta = BetaProfile::poly_bump();
        // ends well below zero: β_ε vanishes on the whole segment
        let (p, log) = solve_bvp_1d(&beta, 0.1, 0.01, -0.3, -0.1, &cfg()).unwrap();
        assert!(log.converged);
        for (x, v) in p.x.iter().zip(&p.v) {
            assert_abs_diff_eq!(*v, -0.3 + 0.2 * (x + 1.0) / 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn rejects_coarse_steps_and_reports_non_convergence() {
        let beta = BetaProfile::sine();
        assert!(matches!(
            solve_bvp_1d(&beta, 0.1, 0.1, 0.0, 1.0, &cfg()),
            Err(OracleError::StepTooCoarse { .. })
        ));
        let one = SolveConfig { max_iter_fp: 1, ..cfg() };
        let (_, log) = solve_bvp_1d(&beta, 0.1, 0.01, 0.0, 1.1, &one).unwrap();
        assert!(!log.converged);
        assert_eq!(log.iterations(), 1);
    }

    #[test]
    fn csv_has_two_columns() {
        let p = exact_profile(&BetaProfile::sine(), 0.1, &grid_1d(0.5)).unwrap();
        let csv = p.to_csv();
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.lines().skip(1).all(|l| l.split(',').count() == 2));
    }
}
