use super::{GeometryError, Grid};

/// Nodal values on a sector or disk grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<G: Grid> {
    grid: G,
    values: Vec<f64>,
}

impl<G: Grid> ScalarField<G> {
    pub fn new(grid: G, values: Vec<f64>) -> Result<Self, GeometryError> {
        if values.len() != grid.node_count() {
            return Err(GeometryError::LengthMismatch {
                expected: grid.node_count(),
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite(k));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn constant(grid: G, c: f64) -> Self {
        ScalarField { grid, values: vec![c; grid.node_count()] }
    }

    pub fn zeros(grid: G) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Samples `f(r, θ)` at every node (the origin gets `f(0, 0)`).
    pub fn from_polar(grid: G, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.node_count())
            .map(|k| {
                let (r, t) = grid.polar(k);
                f(r, t)
            })
            .collect();
        ScalarField { grid, values }
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_xy(grid: G, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.node_count())
            .map(|k| {
                let [x, y] = grid.point(k);
                f(x, y)
            })
            .collect();
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> &G {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn origin_value(&self) -> f64 {
        self.values[0]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max |self - other|`; the grids must match.
    pub fn sup_distance(&self, other: &Self) -> Result<f64, GeometryError> {
        if self.grid != other.grid {
            return Err(GeometryError::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |a, (x, y)| a.max((x - y).abs())))
    }

    /// Average of the four corner values of cell `(i, jc)`.
    #[inline]
    pub fn cell_mean(&self, i: usize, jc: usize) -> f64 {
        let c = self.grid.cell_corners(i, jc);
        0.25 * (self.values[c[0]] + self.values[c[1]] + self.values[c[2]] + self.values[c[3]])
    }

    /// Cartesian gradient at the centre of cell `(i, jc)` from corner differences.
    #[inline]
    pub fn cell_gradient(&self, i: usize, jc: usize) -> [f64; 2] {
        let c = self.grid.cell_corners(i, jc);
        let v = &self.values;
        let dr = self.grid.dr();
        let dt = self.grid.dtheta();
        let (rc, tc) = self.grid.cell_center(i, jc);
        let v_r = (v[c[2]] + v[c[3]] - v[c[0]] - v[c[1]]) / (2.0 * dr);
        let v_t = (v[c[1]] + v[c[3]] - v[c[0]] - v[c[2]]) / (2.0 * dt);
        let (s, co) = tc.sin_cos();
        let g_t = v_t / rc;
        [co * v_r - s * g_t, s * v_r + co * g_t]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DiskGrid, SectorGrid};
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_wrong_length_and_nan() {
        let g = SectorGrid::new(3, 8, 4).unwrap();
        assert!(matches!(
            ScalarField::new(g, vec![0.0; 3]),
            Err(GeometryError::LengthMismatch { .. })
        ));
        let mut v = vec![0.0; g.node_count()];
        v[7] = f64::NAN;
        assert!(matches!(ScalarField::new(g, v), Err(GeometryError::NonFinite(7))));
    }

    #[test]
    fn gradient_of_linear_field() {
        let d = DiskGrid::new(3, 64, 32).unwrap();
        let f = ScalarField::from_xy(d, |x, y| 2.0 * x - 3.0 * y);
        for &(i, jc) in &[(0, 0), (5, 17), (40, 100), (63, 191)] {
            let g = f.cell_gradient(i, jc);
            assert_abs_diff_eq!(g[0], 2.0, epsilon = 1e-3);
            assert_abs_diff_eq!(g[1], -3.0, epsilon = 1e-3);
        }
    }
}
