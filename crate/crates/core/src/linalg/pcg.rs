use rayon::prelude::*;

use super::{LinalgError, SpectralSolver};
use crate::geometry::{Grid, Laplacian};

/// Chunk size for deterministic parallel reductions.
const CHUNK: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preconditioner {
    /// Inverse of `diag(L - S)`.
    Jacobi,
    /// Exact inverse of `L - S̄` with `S̄` the ring-averaged shift.
    Spectral,
}

impl Preconditioner {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "jacobi" => Some(Preconditioner::Jacobi),
            "spectral" => Some(Preconditioner::Spectral),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Preconditioner::Jacobi => "jacobi",
            Preconditioner::Spectral => "spectral",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Weighted dot product over non-Dirichlet nodes, summed in fixed chunks so
/// the result does not depend on the thread count.
fn wdot(w: &[f64], mask: &[bool], a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = w
        .par_chunks(CHUNK)
        .zip(mask.par_chunks(CHUNK))
        .zip(a.par_chunks(CHUNK).zip(b.par_chunks(CHUNK)))
        .map(|((w, m), (a, b))| {
            let mut s = 0.0;
            for k in 0..w.len() {
                if !m[k] {
                    s += w[k] * a[k] * b[k];
                }
            }
            s
        })
        .collect();
    partial.iter().sum()
}

/// Solves `(L - diag(shift)) x = rhs` on non-Dirichlet nodes with `x = rhs` on
/// the arc, by preconditioned conjugate gradients on the weighted system
/// `-W (L - S)`, which is symmetric positive definite for `shift ≥ 0`.
///
/// `x` is used as the initial guess. Convergence is declared when the
/// `W`-weighted residual norm drops below `tol` times that of the eliminated
/// right-hand side.
#[allow(clippy::too_many_arguments)]
pub fn solve_shifted(
    lap: &Laplacian,
    spectral: Option<&SpectralSolver>,
    precond: Preconditioner,
    shift: &[f64],
    rhs: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<LinearSolveStats, LinalgError> {
    let g = *lap.grid();
    let n = g.node_count();
    assert_eq!(shift.len(), n);
    assert_eq!(rhs.len(), n);
    assert_eq!(x.len(), n);
    let mask = lap.dirichlet_mask();
    let w = lap.weights();

    // eliminated right-hand side b' = rhs - L x_D on the unknowns
    let mut xd = vec![0.0; n];
    for k in 0..n {
        if mask[k] {
            x[k] = rhs[k];
            xd[k] = rhs[k];
        }
    }
    let lxd = lap.apply(&xd);
    let bprime: Vec<f64> = (0..n).map(|k| if mask[k] { 0.0 } else { rhs[k] - lxd[k] }).collect();
    let bnorm = wdot(w, mask, &bprime, &bprime).sqrt();
    if bnorm == 0.0 {
        for k in 0..n {
            if !mask[k] {
                x[k] = 0.0;
            }
        }
        return Ok(LinearSolveStats { iterations: 0, relative_residual: 0.0 });
    }

    let apply_a = |p: &[f64], out: &mut [f64]| {
        lap.apply_into(p, out);
        out.par_iter_mut().with_min_len(CHUNK).enumerate().for_each(|(k, o)| {
            *o = if mask[k] { 0.0 } else { *o - shift[k] * p[k] };
        });
    };

    let ring_shift: Vec<f64> = match precond {
        Preconditioner::Spectral => {
            let mut s = vec![0.0; g.nr];
            s[0] = shift[0];
            for (i, si) in s.iter_mut().enumerate().skip(1) {
                let mut acc = 0.0;
                for j in 0..=g.ntheta {
                    let c = if j == 0 || j == g.ntheta { 0.5 } else { 1.0 };
                    acc += c * shift[g.index(i, j)];
                }
                *si = acc / g.ntheta as f64;
            }
            s
        }
        Preconditioner::Jacobi => Vec::new(),
    };
    let owned_spectral;
    let spectral = match (precond, spectral) {
        (Preconditioner::Spectral, Some(s)) => Some(s),
        (Preconditioner::Spectral, None) => {
            owned_spectral = SpectralSolver::new(&g);
            Some(&owned_spectral)
        }
        _ => None,
    };
    let apply_p = |rho: &[f64], z: &mut [f64]| match spectral {
        Some(s) => s.solve(rho, &ring_shift, z),
        None => z.par_iter_mut().with_min_len(CHUNK).enumerate().for_each(|(k, zk)| {
            *zk = if mask[k] { 0.0 } else { rho[k] / (lap.diagonal(k) - shift[k]) };
        }),
    };

    // with x_D fixed, rho = b' - A x_U
    let mut xu: Vec<f64> = (0..n).map(|k| if mask[k] { 0.0 } else { x[k] }).collect();
    let mut ax = vec![0.0; n];
    apply_a(&xu, &mut ax);
    let mut rho: Vec<f64> = (0..n).map(|k| bprime[k] - ax[k]).collect();
    let mut z = vec![0.0; n];
    let mut q = vec![0.0; n];

    let mut rnorm = wdot(w, mask, &rho, &rho).sqrt();
    let mut iterations = 0;
    if rnorm > tol * bnorm {
        apply_p(&rho, &mut z);
        let mut p = z.clone();
        let mut gamma = -wdot(w, mask, &rho, &z);
        while iterations < max_iter {
            iterations += 1;
            apply_a(&p, &mut q);
            let pq = -wdot(w, mask, &p, &q);
            if !(pq > 0.0) || !(gamma > 0.0) {
                return Err(LinalgError::Breakdown { iterations });
            }
            let alpha = gamma / pq;
            xu.par_iter_mut()
                .zip(rho.par_iter_mut())
                .zip(p.par_iter().zip(q.par_iter()))
                .with_min_len(CHUNK)
                .for_each(|((xk, rk), (pk, qk))| {
                    *xk += alpha * pk;
                    *rk -= alpha * qk;
                });
            rnorm = wdot(w, mask, &rho, &rho).sqrt();
            if rnorm <= tol * bnorm {
                break;
            }
            apply_p(&rho, &mut z);
            let gamma_new = -wdot(w, mask, &rho, &z);
            let beta = gamma_new / gamma;
            gamma = gamma_new;
            p.par_iter_mut()
                .zip(z.par_iter())
                .with_min_len(CHUNK)
                .for_each(|(pk, zk)| *pk = zk + beta * *pk);
        }
    }
    for k in 0..n {
        if !mask[k] {
            x[k] = xu[k];
        }
    }
    let relative_residual = rnorm / bnorm;
    if relative_residual > tol {
        return Err(LinalgError::NotConverged { iterations, relative_residual });
    }
    Ok(LinearSolveStats { iterations, relative_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{assemble_laplacian, ScalarField, SectorGrid};
    use approx::assert_abs_diff_eq;

    fn problem(g: &SectorGrid) -> (Vec<f64>, Vec<f64>) {
        let n = g.node_count();
        let shift: Vec<f64> = (0..n)
            .map(|k| {
                let [x, y] = g.point(k);
                // strongly non-radial, as in a reaction layer
                if (x - 0.5).abs() < 0.1 && y < 0.3 { 400.0 } else { 0.0 }
            })
            .collect();
        let rhs: Vec<f64> = (0..n)
            .map(|k| {
                let (r, t) = g.polar(k);
                if k > 0 && g.node_ij(k).0 == g.nr { (3.0 * t).cos() } else { r * (1.0 - r) }
            })
            .collect();
        (shift, rhs)
    }

    #[test]
    fn spectral_and_jacobi_agree() {
        let g = SectorGrid::new(3, 32, 24).unwrap();
        let lap = assemble_laplacian(&g);
        let (shift, rhs) = problem(&g);
        let mut a = vec![0.0; g.node_count()];
        let mut b = vec![0.0; g.node_count()];
        let sa = solve_shifted(&lap, None, Preconditioner::Spectral, &shift, &rhs, &mut a, 1e-12, 500).unwrap();
        let sb = solve_shifted(&lap, None, Preconditioner::Jacobi, &shift, &rhs, &mut b, 1e-12, 5000).unwrap();
        assert!(sa.iterations < sb.iterations);
        for k in 0..a.len() {
            assert_abs_diff_eq!(a[k], b[k], epsilon = 1e-9);
        }
        // residual check against the assembled operator
        let la = lap.apply(&a);
        for k in 0..a.len() {
            if !lap.is_dirichlet(k) {
                let scale = lap.diagonal(k).abs();
                assert_abs_diff_eq!((la[k] - shift[k] * a[k] - rhs[k]) / scale, 0.0, epsilon = 1e-10);
            } else {
                assert_eq!(a[k], rhs[k]);
            }
        }
    }

    #[test]
    fn zero_shift_spectral_is_one_step() {
        let g = SectorGrid::new(3, 32, 16).unwrap();
        let lap = assemble_laplacian(&g);
        let (_, rhs) = problem(&g);
        let mut x = vec![0.0; g.node_count()];
        let s = solve_shifted(&lap, None, Preconditioner::Spectral, &vec![0.0; g.node_count()], &rhs, &mut x, 1e-10, 10).unwrap();
        assert!(s.iterations <= 2, "{s:?}");
    }

    #[test]
    fn harmonic_polynomial_is_reproduced_to_truncation_order() {
        let g = SectorGrid::new(3, 64, 64).unwrap();
        let lap = assemble_laplacian(&g);
        let exact = ScalarField::from_polar(g, |r, t| r.powi(3) * (3.0 * t).cos());
        let rhs: Vec<f64> = (0..g.node_count())
            .map(|k| if lap.is_dirichlet(k) { exact.values()[k] } else { 0.0 })
            .collect();
        let mut x = vec![0.0; g.node_count()];
        solve_shifted(&lap, None, Preconditioner::Spectral, &vec![0.0; g.node_count()], &rhs, &mut x, 1e-12, 10).unwrap();
        let err = x.iter().zip(exact.values()).fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
        assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn iteration_cap_reports_achieved_residual() {
        let g = SectorGrid::new(3, 32, 24).unwrap();
        let lap = assemble_laplacian(&g);
        let (shift, rhs) = problem(&g);
        let mut x = vec![0.0; g.node_count()];
        match solve_shifted(&lap, None, Preconditioner::Jacobi, &shift, &rhs, &mut x, 1e-12, 3) {
            Err(LinalgError::NotConverged { iterations, relative_residual }) => {
                assert_eq!(iterations, 3);
                assert!(relative_residual > 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
