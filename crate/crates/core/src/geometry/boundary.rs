use super::{GeometryError, Grid, SectorGrid};

pub const MAX_BOUNDARY_TERMS: usize = 32;

/// Dirichlet data `g(θ) = amplitude · Σ_k a_k cos(k·m·θ)` on the unit arc.
///
/// Cosine series in `mθ` reflect evenly across every symmetry line, so the
/// extension to the full circle stays smooth.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    coeffs: Vec<f64>,
    amplitude: f64,
}

impl BoundaryData {
    pub fn new(coeffs: Vec<f64>, amplitude: f64) -> Result<Self, GeometryError> {
        if coeffs.is_empty() || coeffs.len() > MAX_BOUNDARY_TERMS {
            return Err(GeometryError::BoundaryTerms(coeffs.len()));
        }
        if !amplitude.is_finite() || coeffs.iter().any(|a| !a.is_finite()) {
            return Err(GeometryError::NonFiniteBoundary);
        }
        if amplitude == 0.0 || coeffs[1..].iter().all(|&a| a == 0.0) {
            return Err(GeometryError::ConstantBoundary);
        }
        Ok(BoundaryData { coeffs, amplitude })
    }

    /// `g(θ) = cos(mθ)`.
    pub fn cos_m() -> Self {
        BoundaryData { coeffs: vec![0.0, 1.0], amplitude: 1.0 }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn eval(&self, m: usize, theta: f64) -> f64 {
        let mt = m as f64 * theta;
        let s: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| if k == 0 { *a } else { a * (k as f64 * mt).cos() })
            .sum();
        self.amplitude * s
    }

    /// `‖g‖∞` estimated on 4096 samples over one period of the series.
    pub fn sup_norm(&self, m: usize) -> f64 {
        let n = 4096;
        let period = std::f64::consts::PI / m as f64;
        (0..=n)
            .map(|k| self.eval(m, period * k as f64 / n as f64).abs())
            .fold(0.0, f64::max)
    }

    /// Values of `g` at the arc nodes `j = 0..=ntheta`.
    pub fn on_arc(&self, grid: &SectorGrid) -> Vec<f64> {
        (0..=grid.ntheta).map(|j| self.eval(grid.m, grid.angle(j))).collect()
    }
}
