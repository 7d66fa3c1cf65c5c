use std::f64::consts::TAU;

use rayon::prelude::*;

use super::sample::{sample, EDGE_TOL};
use super::DiagnosticsError;
use crate::geometry::{DiskGrid, Grid, ScalarField};

#[derive(Debug, Clone, PartialEq)]
pub struct PhiProfile {
    pub samples: Vec<(f64, f64)>,
    /// `max (Φ(ρ) - Φ(σ))₊` over consecutive radii `ρ < σ`.
    pub max_violation: f64,
}

pub(crate) fn check_ball(grid: &DiskGrid, x0: [f64; 2], r: f64) -> Result<(), DiagnosticsError> {
    if !(r > 0.0) || x0[0].hypot(x0[1]) + r > 1.0 + EDGE_TOL {
        return Err(DiagnosticsError::BallOutsideDomain { center: x0, radius: r });
    }
    let h = grid.dr().max(grid.dtheta());
    if r < 4.0 * h {
        return Err(DiagnosticsError::Unresolvable { radius: r, min: 4.0 * h });
    }
    Ok(())
}

/// Sum of `f(i, jc)·area` over cells whose centre lies strictly inside
/// `B_r(x0)`. Rings are reduced in parallel and added in order.
pub(crate) fn ball_sum<F>(grid: &DiskGrid, x0: [f64; 2], r: f64, f: F) -> f64
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let rmax = x0[0].hypot(x0[1]) + r;
    let rings: Vec<f64> = (0..grid.nr())
        .into_par_iter()
        .map(|i| {
            let (rc, _) = grid.cell_center(i, 0);
            if rc - grid.dr() > rmax {
                return 0.0;
            }
            let mut s = 0.0;
            for jc in 0..grid.angular_cells() {
                let (rc, tc) = grid.cell_center(i, jc);
                let c = [rc * tc.cos(), rc * tc.sin()];
                if (c[0] - x0[0]).hypot(c[1] - x0[1]) < r {
                    s += grid.cell_area(i, jc) * f(i, jc);
                }
            }
            s
        })
        .collect();
    rings.iter().sum()
}

/// Trapezoid rule for `∫_{∂B_r(x0)} f dH¹` with samples at `n` points.
pub(crate) fn circle_integral(
    v: &ScalarField<DiskGrid>,
    x0: [f64; 2],
    r: f64,
    f: impl Fn(f64) -> f64,
) -> Result<f64, DiagnosticsError> {
    let g = v.grid();
    let h = g.dr().min(g.dtheta());
    let n = ((4.0 * TAU * r / h).ceil() as usize).max(256);
    let mut acc = 0.0;
    for k in 0..n {
        let t = TAU * k as f64 / n as f64;
        let p = [x0[0] + r * t.cos(), x0[1] + r * t.sin()];
        let val = sample(v, p).ok_or(DiagnosticsError::BallOutsideDomain { center: x0, radius: r })?;
        acc += f(val);
    }
    Ok(acc * TAU * r / n as f64)
}

/// `Φ(r) = r⁻²∫_{B_r}|∇v|² + r⁻²∫_{B_r}χ - r⁻³∫_{∂B_r} v²`.
///
/// Area integrals use the midpoint rule over cells whose centre lies in the
/// ball; the circle integral uses the trapezoid rule on bilinear samples.
pub fn weiss_phi(
    v: &ScalarField<DiskGrid>,
    chi: &ScalarField<DiskGrid>,
    x0: [f64; 2],
    r: f64,
) -> Result<f64, DiagnosticsError> {
    if v.grid() != chi.grid() {
        return Err(DiagnosticsError::GridMismatch);
    }
    let grid = v.grid();
    check_ball(grid, x0, r)?;
    let area = ball_sum(grid, x0, r, |i, jc| {
        let [a, b] = v.cell_gradient(i, jc);
        a * a + b * b + chi.cell_mean(i, jc)
    });
    let circle = circle_integral(v, x0, r, |x| x * x)?;
    Ok(area / (r * r) - circle / (r * r * r))
}

pub fn phi_profile(
    v: &ScalarField<DiskGrid>,
    chi: &ScalarField<DiskGrid>,
    x0: [f64; 2],
    radii: &[f64],
) -> Result<PhiProfile, DiagnosticsError> {
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DiagnosticsError::RadiiNotIncreasing);
    }
    let samples = radii
        .par_iter()
        .map(|&r| weiss_phi(v, chi, x0, r).map(|p| (r, p)))
        .collect::<Result<Vec<_>, _>>()?;
    let max_violation = samples
        .windows(2)
        .map(|w| (w[0].1 - w[1].1).max(0.0))
        .fold(0.0, f64::max);
    Ok(PhiProfile { samples, max_violation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn zero_one_and_zero_zero() {
        let d = DiskGrid::new(3, 64, 32).unwrap();
        let v = ScalarField::zeros(d);
        let one = ScalarField::constant(d, 1.0);
        for r in [0.25, 0.5, 1.0] {
            assert_abs_diff_eq!(weiss_phi(&v, &one, [0.0, 0.0], r).unwrap(), PI, epsilon = 1e-12);
            assert_eq!(weiss_phi(&v, &v, [0.0, 0.0], r).unwrap(), 0.0);
        }
        let prof = phi_profile(&v, &one, [0.0, 0.0], &[0.25, 0.5, 0.75]).unwrap();
        assert!(prof.max_violation < 1e-12);
    }

    #[test]
    fn rejects_escaping_and_tiny_balls() {
        let d = DiskGrid::new(3, 64, 32).unwrap();
        let v = ScalarField::zeros(d);
        assert!(matches!(
            weiss_phi(&v, &v, [0.5, 0.0], 0.6),
            Err(DiagnosticsError::BallOutsideDomain { .. })
        ));
        assert!(matches!(
            weiss_phi(&v, &v, [0.0, 0.0], 0.01),
            Err(DiagnosticsError::Unresolvable { .. })
        ));
        assert!(phi_profile(&v, &v, [0.0, 0.0], &[0.5, 0.25]).is_err());
    }

    #[test]
    fn ball_sum_off_centre_converges_to_area() {
        let d = DiskGrid::new(3, 256, 128).unwrap();
        let a = ball_sum(&d, [0.3, -0.2], 0.4, |_, _| 1.0);
        assert_abs_diff_eq!(a, PI * 0.16, epsilon = 2e-3);
    }
}
