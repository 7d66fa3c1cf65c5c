use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustdct::{Dct1, DctPlanner};

use crate::geometry::{Grid, RingStencil, SectorGrid};

/// Direct solver for `(L - σ) x = y` on the sector when the shift `σ` depends
/// on the radius only.
///
/// A DCT-I in `θ` diagonalizes the angular part (including the ghost-node
/// edges), leaving one tridiagonal system in `r` per cosine mode. Only mode 0
/// couples to the origin.
pub struct SpectralSolver {
    grid: SectorGrid,
    dct: Arc<dyn Dct1<f64>>,
    stencils: Vec<RingStencil>,
    lambda: Vec<f64>,
}

impl std::fmt::Debug for SpectralSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralSolver").field("grid", &self.grid).finish()
    }
}

impl SpectralSolver {
    pub fn new(grid: &SectorGrid) -> Self {
        let nt = grid.ntheta;
        let dct = DctPlanner::new().plan_dct1(nt + 1);
        let stencils = (0..grid.nr).map(|i| RingStencil::new(grid, i.max(1))).collect();
        let dt2 = grid.dtheta * grid.dtheta;
        let lambda = (0..=nt)
            .map(|k| (2.0 - 2.0 * (PI * k as f64 / nt as f64).cos()) / dt2)
            .collect();
        SpectralSolver { grid: *grid, dct, stencils, lambda }
    }

    /// Solves on all non-arc nodes. `shift` has one entry per ring
    /// `0..nr` (entry 0 is the origin). Arc entries of `out` are set to zero and
    /// arc entries of `rhs` are ignored.
    pub fn solve(&self, rhs: &[f64], shift: &[f64], out: &mut [f64]) {
        let g = &self.grid;
        let (nr, nt) = (g.nr, g.ntheta);
        let width = nt + 1;
        let rings = nr - 1;
        assert_eq!(rhs.len(), g.node_count());
        assert_eq!(out.len(), g.node_count());
        assert_eq!(shift.len(), nr);

        // forward transform of rings 1..nr-1
        let mut coeffs = rhs[1..1 + rings * width].to_vec();
        coeffs.par_chunks_mut(width).for_each_init(
            || vec![0.0; self.dct.get_scratch_len()],
            |scratch, row| self.dct.process_dct1_with_scratch(row, scratch),
        );

        let dr2 = 1.0 / (g.dr * g.dr);
        let ntf = nt as f64;
        // per mode, unknowns are [x0, X_1 .. X_{nr-1}]; x0 only takes part in k = 0
        let stride = nr;
        let mut modes = vec![0.0; width * stride];
        modes.par_chunks_mut(stride).enumerate().for_each_init(
            || Tridiag::with_capacity(nr),
            |tri, (k, col)| {
                tri.clear();
                if k == 0 {
                    tri.push(0.0, -(4.0 * dr2 + shift[0]), 4.0 * dr2 / ntf, rhs[0]);
                }
                for i in 1..nr {
                    let s = &self.stencils[i];
                    let r = g.radius(i);
                    let a = match (i, k) {
                        (1, 0) => s.inner * ntf,
                        (1, _) => 0.0,
                        _ => s.inner,
                    };
                    let b = -2.0 * dr2 - self.lambda[k] / (r * r) - shift[i];
                    let c = if i + 1 < nr { s.outer } else { 0.0 };
                    tri.push(a, b, c, coeffs[(i - 1) * width + k]);
                }
                tri.solve();
                let sol = tri.solution();
                if k == 0 {
                    col.copy_from_slice(sol);
                } else {
                    col[1..].copy_from_slice(sol);
                }
            },
        );

        // back to physical space, ring by ring
        let scale = 2.0 / ntf;
        out[0] = modes[0];
        out[1..1 + rings * width]
            .par_chunks_mut(width)
            .enumerate()
            .for_each_init(
                || vec![0.0; self.dct.get_scratch_len()],
                |scratch, (ii, row)| {
                    for (k, x) in row.iter_mut().enumerate() {
                        *x = modes[k * stride + ii + 1];
                    }
                    self.dct.process_dct1_with_scratch(row, scratch);
                    row.iter_mut().for_each(|x| *x *= scale);
                },
            );
        out[1 + rings * width..].iter_mut().for_each(|x| *x = 0.0);
    }
}

/// Thomas algorithm workspace.
struct Tridiag {
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
}

impl Tridiag {
    fn with_capacity(n: usize) -> Self {
        Tridiag {
            a: Vec::with_capacity(n),
            b: Vec::with_capacity(n),
            c: Vec::with_capacity(n),
            d: Vec::with_capacity(n),
        }
    }

    fn clear(&mut self) {
        self.a.clear();
        self.b.clear();
        self.c.clear();
        self.d.clear();
    }

    fn push(&mut self, a: f64, b: f64, c: f64, d: f64) {
        self.a.push(a);
        self.b.push(b);
        self.c.push(c);
        self.d.push(d);
    }

    fn solve(&mut self) {
        let n = self.b.len();
        for i in 1..n {
            let w = self.a[i] / self.b[i - 1];
            self.b[i] -= w * self.c[i - 1];
            self.d[i] -= w * self.d[i - 1];
        }
        self.d[n - 1] /= self.b[n - 1];
        for i in (0..n - 1).rev() {
            self.d[i] = (self.d[i] - self.c[i] * self.d[i + 1]) / self.b[i];
        }
    }

    fn solution(&self) -> &[f64] {
        &self.d
    }
}

/// Solves a general tridiagonal system (sub-diagonal `a`, diagonal `b`,
/// super-diagonal `c`, right-hand side `d`).
pub fn solve_tridiagonal(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Vec<f64> {
    let mut t = Tridiag::with_capacity(b.len());
    for i in 0..b.len() {
        t.push(a[i], b[i], c[i], d[i]);
    }
    t.solve();
    t.d
}
