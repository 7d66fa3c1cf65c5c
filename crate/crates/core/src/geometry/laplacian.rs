use std::f64::consts::PI;

use super::{Grid, NodeClass, SectorGrid};
use crate::linalg::CsrMatrix;

/// Five-point polar stencil coefficients on ring `i` (`1 ≤ i < nr`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingStencil {
    /// Coupling to ring `i - 1` (the origin when `i == 1`).
    pub inner: f64,
    /// Coupling to ring `i + 1`.
    pub outer: f64,
    /// Coupling to each angular neighbour.
    pub angular: f64,
    pub diag: f64,
}

impl RingStencil {
    pub fn new(grid: &SectorGrid, i: usize) -> Self {
        let dr = grid.dr;
        let r = grid.radius(i);
        let dr2 = 1.0 / (dr * dr);
        let half = 1.0 / (2.0 * r * dr);
        let angular = 1.0 / (r * r * grid.dtheta * grid.dtheta);
        RingStencil {
            inner: dr2 - half,
            outer: dr2 + half,
            angular,
            diag: -2.0 * dr2 - 2.0 * angular,
        }
    }
}

/// Discrete Laplacian on the sector.
///
/// Rows of arc nodes are identity rows. Radial edges use ghost reflection and
/// the origin row averages the first ring with half weights on the two edges.
/// Scaling each row by [`Laplacian::weights`] makes the operator symmetric.
#[derive(Debug, Clone)]
pub struct Laplacian {
    grid: SectorGrid,
    matrix: CsrMatrix,
    dirichlet: Vec<bool>,
    weights: Vec<f64>,
}

pub fn assemble_laplacian(grid: &SectorGrid) -> Laplacian {
    let g = *grid;
    let n = g.node_count();
    let nt = g.ntheta;
    let dr2 = 1.0 / (g.dr * g.dr);
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    let mut dirichlet = vec![false; n];
    let mut weights = vec![0.0; n];

    // origin
    let mut row = vec![(0, -4.0 * dr2)];
    for j in 0..=nt {
        let c = if j == 0 || j == nt { 0.5 } else { 1.0 };
        row.push((g.index(1, j), 4.0 * dr2 * c / nt as f64));
    }
    rows.push(row);
    weights[0] = PI * g.dr * g.dr / (8.0 * g.m as f64);

    for idx in 1..n {
        let (i, j) = g.node_ij(idx);
        if g.classify(idx) == NodeClass::ArcDirichlet {
            dirichlet[idx] = true;
            weights[idx] = 1.0;
            rows.push(vec![(idx, 1.0)]);
            continue;
        }
        let s = RingStencil::new(&g, i);
        let mut row = Vec::with_capacity(5);
        row.push((idx, s.diag));
        row.push((g.index(i - 1, j), s.inner));
        row.push((g.index(i + 1, j), s.outer));
        // ghost nodes mirror j = 1 and j = nt - 1 across the edges
        let left = if j == 0 { 1 } else { j - 1 };
        let right = if j == nt { nt - 1 } else { j + 1 };
        row.push((g.index(i, left), s.angular));
        row.push((g.index(i, right), s.angular));
        rows.push(row);
        let c = if j == 0 || j == nt { 0.5 } else { 1.0 };
        weights[idx] = c * g.radius(i) * g.dr * g.dtheta;
    }

    Laplacian {
        grid: g,
        matrix: CsrMatrix::from_rows(n, rows),
        dirichlet,
        weights,
    }
}

impl Laplacian {
    pub fn grid(&self) -> &SectorGrid {
        &self.grid
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn is_dirichlet(&self, idx: usize) -> bool {
        self.dirichlet[idx]
    }

    pub fn dirichlet_mask(&self) -> &[bool] {
        &self.dirichlet
    }

    /// Positive node weights `w` such that `diag(w)·L` is symmetric on the
    /// non-Dirichlet block.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn diagonal(&self, idx: usize) -> f64 {
        self.matrix.get(idx, idx)
    }

    /// Applies the full operator, including identity rows on the arc.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.matrix.matvec(v)
    }

    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        self.matrix.matvec_into(v, out)
    }
}
