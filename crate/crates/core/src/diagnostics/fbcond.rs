use super::contour::Polyline;
use super::growth::least_squares_slope;
use super::sample::{sample_linear, EDGE_TOL};
use super::DiagnosticsError;
use crate::geometry::{DiskGrid, Grid, ScalarField};

/// Samples per one-sided probe, including the base point.
const PROBE_SAMPLES: usize = 17;

fn probe_slope(v: &ScalarField<DiskGrid>, p: [f64; 2], dir: [f64; 2], len: f64, f: impl Fn(f64) -> f64) -> Option<f64> {
    let mut ts = Vec::with_capacity(PROBE_SAMPLES);
    let mut ys = Vec::with_capacity(PROBE_SAMPLES);
    for k in 0..PROBE_SAMPLES {
        let t = len * k as f64 / (PROBE_SAMPLES - 1) as f64;
        ts.push(t);
        ys.push(f(sample_linear(v, [p[0] + t * dir[0], p[1] + t * dir[1]])?));
    }
    Some(least_squares_slope(&ts, &ys))
}

/// `(u⁺_ν)² - (u⁻_ν)² - 1` at a free-boundary point `p` with unit normal `nu`
/// pointing into `{v > 0}`.
///
/// `u⁺_ν` is the least-squares slope of `v⁺` along `p + tν`, `u⁻_ν` that of
/// `v⁻` along `p - tν`, `0 ≤ t ≤ probe_len`.
pub fn fb_condition_residual(
    v: &ScalarField<DiskGrid>,
    p: [f64; 2],
    nu: [f64; 2],
    probe_len: f64,
) -> Result<f64, DiagnosticsError> {
    let g = v.grid();
    let h = g.dr().max(g.dtheta());
    if probe_len < 3.0 * h {
        return Err(DiagnosticsError::ProbeTooShort { len: probe_len, min: 3.0 * h });
    }
    let n = nu[0].hypot(nu[1]);
    let nu = [nu[0] / n, nu[1] / n];
    let out = || DiagnosticsError::ProbeOutside { point: p };
    let plus = probe_slope(v, p, nu, probe_len, |x| x.max(0.0)).ok_or_else(out)?;
    let minus = probe_slope(v, p, [-nu[0], -nu[1]], probe_len, |x| (-x).max(0.0)).ok_or_else(out)?;
    Ok(plus * plus - minus * minus - 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FbSample {
    pub point: [f64; 2],
    pub normal: [f64; 2],
    pub residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FbSamples {
    pub samples: Vec<FbSample>,
    /// One notice per skipped vertex.
    pub skipped: Vec<String>,
}

/// Evaluates the free-boundary condition at every `stride`-th polyline vertex.
///
/// The normal comes from the polyline tangent (central difference of the
/// neighbouring vertices) and is oriented toward `{v > 0}`. Vertices whose
/// probes would leave the disk are skipped with a notice.
pub fn fb_samples(
    v: &ScalarField<DiskGrid>,
    polylines: &[Polyline],
    stride: usize,
    probe_len: f64,
) -> Result<FbSamples, DiagnosticsError> {
    let stride = stride.max(1);
    let mut out = FbSamples::default();
    for line in polylines {
        let closed = line.len() > 2 && line.first() == line.last();
        let n = if closed { line.len() - 1 } else { line.len() };
        if n < 2 {
            continue;
        }
        for k in (0..n).step_by(stride) {
            let p = line[k];
            let (a, b) = if closed {
                (line[(k + n - 1) % n], line[(k + 1) % n])
            } else {
                (line[k.saturating_sub(1)], line[(k + 1).min(n - 1)])
            };
            let tan = [b[0] - a[0], b[1] - a[1]];
            let len = tan[0].hypot(tan[1]);
            if len == 0.0 {
                out.skipped.push(format!("degenerate tangent at ({:.6}, {:.6})", p[0], p[1]));
                continue;
            }
            let mut nu = [-tan[1] / len, tan[0] / len];
            let reach = p[0].hypot(p[1]) + probe_len;
            if reach > 1.0 + EDGE_TOL {
                out.skipped.push(format!("probe leaves the disk at ({:.6}, {:.6})", p[0], p[1]));
                continue;
            }
            let h = 0.5 * probe_len;
            let fwd = sample_linear(v, [p[0] + h * nu[0], p[1] + h * nu[1]]);
            let bwd = sample_linear(v, [p[0] - h * nu[0], p[1] - h * nu[1]]);
            if let (Some(f), Some(b)) = (fwd, bwd) {
                if b > f {
                    nu = [-nu[0], -nu[1]];
                }
            }
            let residual = fb_condition_residual(v, p, nu, probe_len)?;
            out.samples.push(FbSample { point: p, normal: nu, residual });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::extract_free_boundary;
    use approx::assert_abs_diff_eq;

    fn disk() -> DiskGrid {
        DiskGrid::new(3, 64, 32).unwrap()
    }

    #[test]
    fn one_phase_slope_one_is_exact() {
        let d = disk();
        let v = ScalarField::from_xy(d, |x, _| x.max(0.0));
        for p in [[0.0, 0.0], [0.0, 0.3], [0.0, -0.45]] {
            let r = fb_condition_residual(&v, p, [1.0, 0.0], 0.2).unwrap();
            assert_abs_diff_eq!(r, 0.0, epsilon = 1e-12);
        }
        let steep = ScalarField::from_xy(d, |x, _| 2.0 * x.max(0.0));
        assert_abs_diff_eq!(fb_condition_residual(&steep, [0.0, 0.2], [1.0, 0.0], 0.2).unwrap(), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn two_phase_balance() {
        let d = disk();
        // slopes √2 and 1: 2 - 1 - 1 = 0
        let v = ScalarField::from_xy(d, |x, _| if x > 0.0 { 2f64.sqrt() * x } else { x });
        assert_abs_diff_eq!(fb_condition_residual(&v, [0.0, 0.1], [1.0, 0.0], 0.2).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn probe_checks() {
        let d = disk();
        let v = ScalarField::from_xy(d, |x, _| x.max(0.0));
        assert!(matches!(
            fb_condition_residual(&v, [0.0, 0.0], [1.0, 0.0], 0.01),
            Err(DiagnosticsError::ProbeTooShort { .. })
        ));
        assert!(matches!(
            fb_condition_residual(&v, [0.9, 0.0], [1.0, 0.0], 0.2),
            Err(DiagnosticsError::ProbeOutside { .. })
        ));
    }

    #[test]
    fn samples_along_extracted_contour() {
        let d = disk();
        let level = ScalarField::from_xy(d, |x, _| x - 0.05);
        let v = level.map(|x| x.max(0.0));
        let lines = extract_free_boundary(&level, 0.0);
        assert_eq!(lines.len(), 1);
        let s = fb_samples(&v, &lines, 3, 0.2).unwrap();
        assert!(!s.samples.is_empty());
        // vertices near the unit circle cannot host a full probe
        assert!(!s.skipped.is_empty());
        for smp in &s.samples {
            assert!(smp.normal[0] > 0.99, "{:?}", smp.normal);
            assert!(smp.residual.abs() < 0.05, "{smp:?}");
        }
    }
}
