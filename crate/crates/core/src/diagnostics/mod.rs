//! Quantities used to probe the limit of the ε-solutions: the Weiss functional,
//! growth and nondegeneracy measures, blow-ups, free-boundary extraction and the
//! free-boundary condition, symmetry and the domain-variation identity.

mod blowup;
mod contour;
mod fbcond;
mod growth;
mod report;
mod sample;
mod variation;
mod weiss;

use thiserror::Error;

use crate::geometry::{DiskGrid, GeometryError, Grid, ScalarField};

pub use blowup::{blow_up_rescale, homogeneity_residual};
pub use contour::{extract_free_boundary, Polyline};
pub use fbcond::{fb_condition_residual, fb_samples, FbSample, FbSamples};
pub use growth::{
    degeneracy_report, dyadic_radii, growth_ratio, least_squares_slope, nondegeneracy_measure,
    DegeneracyReport, DegeneracyThresholds, GrowthSample,
};
pub use report::{DiagnosticsReport, ReportOptions};
pub use sample::{sample, sample_linear};
pub use variation::{domain_variation_residual, BumpField, BumpKind, SUPPORT_LIMIT};
pub use weiss::{phi_profile, weiss_phi, PhiProfile};

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("ball of radius {radius} around ({}, {}) leaves the unit disk", center[0], center[1])]
    BallOutsideDomain { center: [f64; 2], radius: f64 },
    #[error("radius {radius} is below the resolvable minimum {min}")]
    Unresolvable { radius: f64, min: f64 },
    #[error("radii must be strictly increasing")]
    RadiiNotIncreasing,
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("field has {grid}-fold symmetry, asked for {requested}")]
    SymmetryMismatch { grid: usize, requested: usize },
    #[error("free-boundary probe at ({}, {}) leaves the unit disk", point[0], point[1])]
    ProbeOutside { point: [f64; 2] },
    #[error("probe length {len} is shorter than three cell widths ({min})")]
    ProbeTooShort { len: f64, min: f64 },
    #[error("bump support reaches radius {reach}, limit is {limit}")]
    SupportViolation { reach: f64, limit: f64 },
    #[error("annulus needs 0 < R < S, got R = {inner}, S = {outer}")]
    InvalidAnnulus { inner: f64, outer: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Largest `|v(p) - v(p')|` over node pairs mirrored across a line `θ = jπ/m`.
pub fn symmetry_residual(v: &ScalarField<DiskGrid>, m: usize) -> Result<f64, DiagnosticsError> {
    let g = v.grid();
    if g.m() != m {
        return Err(DiagnosticsError::SymmetryMismatch { grid: g.m(), requested: m });
    }
    let vals = v.values();
    let mut worst = 0.0f64;
    for l in 0..m {
        for k in 1..g.node_count() {
            worst = worst.max((vals[k] - vals[g.reflect_node(k, l)]).abs());
        }
    }
    Ok(worst)
}

/// Total area of cells whose mean `χ` lies in `[lo, hi]`.
pub fn chi_transition_area<G: Grid>(chi: &ScalarField<G>, lo: f64, hi: f64) -> f64 {
    let g = chi.grid();
    let mut area = 0.0;
    for i in 0..g.nr() {
        for jc in 0..g.angular_cells() {
            let c = chi.cell_mean(i, jc);
            if (lo..=hi).contains(&c) {
                area += g.cell_area(i, jc);
            }
        }
    }
    area
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{reflect_to_disk, SectorGrid};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn symmetry_of_reflected_fields_is_exact() {
        let s = SectorGrid::new(3, 32, 8).unwrap();
        let f = ScalarField::from_polar(s, |r, t| r.powi(3) * (3.0 * t).cos() + (7.0 * t).sin() * r);
        let d = reflect_to_disk(&s, &f).unwrap();
        assert_eq!(symmetry_residual(&d, 3).unwrap(), 0.0);
        assert!(symmetry_residual(&d, 4).is_err());
        assert_eq!(symmetry_residual(&ScalarField::constant(s.disk(), 2.5), 3).unwrap(), 0.0);
    }

    #[test]
    fn symmetry_residual_of_sine_by_direct_evaluation() {
        let d = DiskGrid::new(3, 16, 4).unwrap();
        let v = ScalarField::from_polar(d, |_, t| t.sin());
        // reflection across θ = lπ/3 maps θ to 2lπ/3 - θ; scan every node
        let mut want = 0.0f64;
        for l in 0..3 {
            let a = 2.0 * l as f64 * PI / 3.0;
            for j in 0..d.angular_nodes() {
                let t = d.angle(j);
                want = want.max((t.sin() - (a - t).sin()).abs());
            }
        }
        assert_abs_diff_eq!(symmetry_residual(&v, 3).unwrap(), want, epsilon = 1e-12);
        assert!(want > 1.0);
    }

    #[test]
    fn transition_area_examples() {
        let d = DiskGrid::new(3, 32, 8).unwrap();
        assert_eq!(chi_transition_area(&ScalarField::constant(d, 1.0), 0.1, 0.9), 0.0);
        assert_abs_diff_eq!(chi_transition_area(&ScalarField::constant(d, 0.5), 0.1, 0.9), PI, epsilon = 1e-12);
        // annulus 0.25 < r < 0.5 where χ ramps; cell means inside [0.1, 0.9]
        let ramp = ScalarField::from_polar(d, |r, _| ((r - 0.25) / 0.25).clamp(0.0, 1.0));
        let a = chi_transition_area(&ramp, 0.1, 0.9);
        assert!(a > 0.0 && a < PI * (0.25 - 0.0625));
    }
}
