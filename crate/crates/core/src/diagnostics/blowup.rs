use super::sample::{sample, EDGE_TOL};
use super::weiss::ball_sum;
use super::DiagnosticsError;
use crate::geometry::{DiskGrid, Grid, ScalarField};

/// `v(x0 + r_k·x) / r_k` sampled on the nodes of `target`.
pub fn blow_up_rescale(
    v: &ScalarField<DiskGrid>,
    x0: [f64; 2],
    r_k: f64,
    target: &DiskGrid,
) -> Result<ScalarField<DiskGrid>, DiagnosticsError> {
    if !(r_k > 0.0) || x0[0].hypot(x0[1]) + r_k > 1.0 + EDGE_TOL {
        return Err(DiagnosticsError::BallOutsideDomain { center: x0, radius: r_k });
    }
    let values = (0..target.node_count())
        .map(|k| {
            let p = target.point(k);
            let q = [x0[0] + r_k * p[0], x0[1] + r_k * p[1]];
            sample(v, q)
                .map(|x| x / r_k)
                .ok_or(DiagnosticsError::BallOutsideDomain { center: x0, radius: r_k })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScalarField::new(*target, values)?)
}

/// `∫_{B_S(x0) \ B_R(x0)} 2|y|⁻⁴ (∇v·y - v)² dx` with `y = x - x0`, midpoint
/// rule with cell-centre gradients. Vanishes for 1-homogeneous `v`.
pub fn homogeneity_residual(
    v: &ScalarField<DiskGrid>,
    x0: [f64; 2],
    r_inner: f64,
    r_outer: f64,
) -> Result<f64, DiagnosticsError> {
    if !(r_inner > 0.0 && r_inner < r_outer) {
        return Err(DiagnosticsError::InvalidAnnulus { inner: r_inner, outer: r_outer });
    }
    if x0[0].hypot(x0[1]) + r_outer > 1.0 + EDGE_TOL {
        return Err(DiagnosticsError::BallOutsideDomain { center: x0, radius: r_outer });
    }
    let g = v.grid();
    Ok(ball_sum(g, x0, r_outer, |i, jc| {
        let (rc, tc) = g.cell_center(i, jc);
        let y = [rc * tc.cos() - x0[0], rc * tc.sin() - x0[1]];
        let d2 = y[0] * y[0] + y[1] * y[1];
        if d2.sqrt() <= r_inner {
            return 0.0;
        }
        let [gx, gy] = v.cell_gradient(i, jc);
        let e = gx * y[0] + gy * y[1] - v.cell_mean(i, jc);
        2.0 * e * e / (d2 * d2)
    }))
}
