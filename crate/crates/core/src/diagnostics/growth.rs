use super::weiss::ball_sum;
use super::sample::EDGE_TOL;
use super::DiagnosticsError;
use crate::geometry::{DiskGrid, Grid, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthSample {
    pub r: f64,
    /// `max |v|` over nodes in the closed ball.
    pub m: f64,
    pub ratio: f64,
}

fn check_radii(x0: [f64; 2], radii: &[f64]) -> Result<(), DiagnosticsError> {
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DiagnosticsError::RadiiNotIncreasing);
    }
    for &r in radii {
        if !(r > 0.0) || x0[0].hypot(x0[1]) + r > 1.0 + EDGE_TOL {
            return Err(DiagnosticsError::BallOutsideDomain { center: x0, radius: r });
        }
    }
    Ok(())
}

/// `M(r) = max_{B_r(x0)} |v|` over grid nodes, and `M(r)/r`.
pub fn growth_ratio(
    v: &ScalarField<DiskGrid>,
    x0: [f64; 2],
    radii: &[f64],
) -> Result<Vec<GrowthSample>, DiagnosticsError> {
    let g = v.grid();
    check_radii(x0, radii)?;
    let dist: Vec<f64> = (0..g.node_count())
        .map(|k| {
            let p = g.point(k);
            (p[0] - x0[0]).hypot(p[1] - x0[1])
        })
        .collect();
    Ok(radii
        .iter()
        .map(|&r| {
            let lim = r * (1.0 + 1e-12);
            let m = dist
                .iter()
                .zip(v.values())
                .filter(|(d, _)| **d <= lim)
                .fold(0.0f64, |a, (_, x)| a.max(x.abs()));
            GrowthSample { r, m, ratio: m / r }
        })
        .collect())
}

/// `N(r) = r⁻³ ∫_{B_r(x0)} v⁺`, midpoint rule on cells with the cell value
/// taken as the mean of the corner positive parts.
pub fn nondegeneracy_measure(
    v: &ScalarField<DiskGrid>,
    x0: [f64; 2],
    radii: &[f64],
) -> Result<Vec<(f64, f64)>, DiagnosticsError> {
    let g = v.grid();
    check_radii(x0, radii)?;
    let vals = v.values();
    Ok(radii
        .iter()
        .map(|&r| {
            let s = ball_sum(g, x0, r, |i, jc| {
                let c = g.cell_corners(i, jc);
                0.25 * c.iter().map(|&k| vals[k].max(0.0)).sum::<f64>()
            });
            (r, s / (r * r * r))
        })
        .collect())
}

/// Thresholds of the finite-grid degeneracy detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyThresholds {
    /// Minimum ratio `N(r_max) / N(r_min)`.
    pub n_decay: f64,
    /// Minimum fitted slope of `log M` against `log r`.
    pub slope: f64,
}

impl Default for DegeneracyThresholds {
    fn default() -> Self {
        DegeneracyThresholds { n_decay: 2.0, slope: 1.2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyReport {
    pub x0: [f64; 2],
    pub growth: Vec<GrowthSample>,
    pub nondeg: Vec<(f64, f64)>,
    /// Least-squares slope `p` of `log M(r)` against `log r`; NaN if some `M = 0`.
    pub slope: f64,
    /// `N` at the largest radius divided by `N` at the smallest.
    pub n_decay_ratio: f64,
    pub degenerate: bool,
    pub warnings: Vec<String>,
}

/// Dyadic radii `2^-j`, `j = 1..=J`, with `2^-J ≥ 4·dr`, increasing.
pub fn dyadic_radii(grid: &DiskGrid) -> Vec<f64> {
    let mut out = Vec::new();
    let mut r = 0.5;
    while r >= 4.0 * grid.dr() {
        out.push(r);
        r *= 0.5;
    }
    out.reverse();
    out
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Growth and nondegeneracy at dyadic radii around `x0`, with the degeneracy
/// flag: `N` decays by at least `n_decay` and `p > slope`. `v ≡ 0` near `x0`
/// counts as degenerate.
pub fn degeneracy_report(
    v: &ScalarField<DiskGrid>,
    x0: [f64; 2],
    thresholds: DegeneracyThresholds,
) -> Result<DegeneracyReport, DiagnosticsError> {
    let g = v.grid();
    let center_dist = x0[0].hypot(x0[1]);
    let radii: Vec<f64> = dyadic_radii(g)
        .into_iter()
        .filter(|r| center_dist + r <= 1.0 + EDGE_TOL)
        .collect();
    let mut warnings = Vec::new();
    if radii.len() < 2 {
        warnings.push(format!(
            "only {} resolvable dyadic radius around ({}, {}); refine the grid",
            radii.len(),
            x0[0],
            x0[1]
        ));
    }
    if radii.is_empty() {
        return Ok(DegeneracyReport {
            x0,
            growth: vec![],
            nondeg: vec![],
            slope: f64::NAN,
            n_decay_ratio: f64::NAN,
            degenerate: false,
            warnings,
        });
    }
    let growth = growth_ratio(v, x0, &radii)?;
    let nondeg = nondegeneracy_measure(v, x0, &radii)?;
    let all_zero = growth.iter().all(|s| s.m == 0.0);
    let slope = if growth.iter().any(|s| s.m == 0.0) || radii.len() < 2 {
        f64::NAN
    } else {
        let lx: Vec<f64> = growth.iter().map(|s| s.r.ln()).collect();
        let ly: Vec<f64> = growth.iter().map(|s| s.m.ln()).collect();
        least_squares_slope(&lx, &ly)
    };
    let n_small = nondeg.first().map_or(f64::NAN, |s| s.1);
    let n_large = nondeg.last().map_or(f64::NAN, |s| s.1);
    let n_decay_ratio = n_large / n_small;
    let decays = if n_small == 0.0 { n_large > 0.0 } else { n_decay_ratio >= thresholds.n_decay };
    let degenerate = all_zero || (decays && slope > thresholds.slope);
    Ok(DegeneracyReport { x0, growth, nondeg, slope, n_decay_ratio, degenerate, warnings })
}
