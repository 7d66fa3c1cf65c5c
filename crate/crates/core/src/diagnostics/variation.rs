use super::weiss::ball_sum;
use super::DiagnosticsError;
use crate::geometry::{DiskGrid, Grid, ScalarField};

/// Largest admissible `|center| + radius` for the bump support.
pub const SUPPORT_LIMIT: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BumpKind {
    /// `φ = η·a` for a constant vector `a`.
    Translation([f64; 2]),
    /// `φ = η·(x - c)`.
    Dilation,
}

/// Smooth compactly supported vector field built on the standard bump
/// `η(x) = exp(-1/(1 - s²))`, `s = |x - c|/ρ`, vanishing for `s ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpField {
    pub center: [f64; 2],
    pub radius: f64,
    pub kind: BumpKind,
}

impl BumpField {
    pub fn new(center: [f64; 2], radius: f64, kind: BumpKind) -> Result<Self, DiagnosticsError> {
        let reach = center[0].hypot(center[1]) + radius;
        if !(radius > 0.0) || !(reach <= SUPPORT_LIMIT) {
            return Err(DiagnosticsError::SupportViolation { reach, limit: SUPPORT_LIMIT });
        }
        Ok(BumpField { center, radius, kind })
    }

    /// `(η, ∇η)` at `x`.
    fn bump(&self, x: [f64; 2]) -> (f64, [f64; 2]) {
        let y = [x[0] - self.center[0], x[1] - self.center[1]];
        let rho2 = self.radius * self.radius;
        let s2 = (y[0] * y[0] + y[1] * y[1]) / rho2;
        if s2 >= 1.0 {
            return (0.0, [0.0, 0.0]);
        }
        let q = 1.0 - s2;
        let eta = (-1.0 / q).exp();
        // dη/dy = η·(-1/q²)·(2y/ρ²)
        let f = -2.0 * eta / (q * q * rho2);
        (eta, [f * y[0], f * y[1]])
    }

    /// Value, Jacobian `Dφ[i][j] = ∂_j φ_i` and divergence at `x`.
    pub fn eval(&self, x: [f64; 2]) -> ([f64; 2], [[f64; 2]; 2], f64) {
        let (eta, ge) = self.bump(x);
        match self.kind {
            BumpKind::Translation(a) => {
                let d = [[a[0] * ge[0], a[0] * ge[1]], [a[1] * ge[0], a[1] * ge[1]]];
                ([eta * a[0], eta * a[1]], d, d[0][0] + d[1][1])
            }
            BumpKind::Dilation => {
                let y = [x[0] - self.center[0], x[1] - self.center[1]];
                let d = [
                    [y[0] * ge[0] + eta, y[0] * ge[1]],
                    [y[1] * ge[0], y[1] * ge[1] + eta],
                ];
                ([eta * y[0], eta * y[1]], d, d[0][0] + d[1][1])
            }
        }
    }
}

/// `∫ |∇v|² div φ - 2 ∇v·Dφ∇v + χ div φ dx`, cell-centre midpoint rule.
pub fn domain_variation_residual(
    v: &ScalarField<DiskGrid>,
    chi: &ScalarField<DiskGrid>,
    phi: &BumpField,
) -> Result<f64, DiagnosticsError> {
    if v.grid() != chi.grid() {
        return Err(DiagnosticsError::GridMismatch);
    }
    let g = v.grid();
    Ok(ball_sum(g, phi.center, phi.radius, |i, jc| {
        let (rc, tc) = g.cell_center(i, jc);
        let (_, d, div) = phi.eval([rc * tc.cos(), rc * tc.sin()]);
        let w = v.cell_gradient(i, jc);
        let grad2 = w[0] * w[0] + w[1] * w[1];
        let dw = [d[0][0] * w[0] + d[0][1] * w[1], d[1][0] * w[0] + d[1][1] * w[1]];
        grad2 * div - 2.0 * (w[0] * dw[0] + w[1] * dw[1]) + chi.cell_mean(i, jc) * div
    }))
}
