use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{
    blow_up_rescale, chi_transition_area, degeneracy_report, domain_variation_residual,
    extract_free_boundary, fb_samples, homogeneity_residual, phi_profile, symmetry_residual,
    BumpField, DegeneracyThresholds, DiagnosticsError, FbSample, FbSamples, GrowthSample, Polyline,
};
use crate::geometry::{DiskGrid, Grid, ScalarField};

/// Knobs for [`DiagnosticsReport::compute`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub x0: [f64; 2],
    /// Radii for Φ; those below the resolvable minimum are dropped.
    pub phi_radii: Vec<f64>,
    pub fb_level: f64,
    pub fb_stride: usize,
    pub probe_len: f64,
    pub thresholds: DegeneracyThresholds,
    /// Annulus `R < |x| < S` used for the homogeneity residual of blow-ups.
    pub annulus: (f64, f64),
    pub bumps: Vec<BumpField>,
    pub chi_band: (f64, f64),
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            x0: [0.0, 0.0],
            phi_radii: (1..=9).map(|k| k as f64 / 10.0).collect(),
            fb_level: 0.0,
            fb_stride: 4,
            probe_len: 0.1,
            thresholds: DegeneracyThresholds::default(),
            annulus: (0.25, 0.75),
            bumps: vec![],
            chi_band: (0.1, 0.9),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub phi_profile: Vec<(f64, f64)>,
    pub phi_max_violation: f64,
    pub growth: Vec<GrowthSample>,
    pub nondeg: Vec<(f64, f64)>,
    pub slope: f64,
    pub n_decay_ratio: f64,
    pub degenerate: bool,
    pub fb_polylines: Vec<Polyline>,
    pub fb_condition_samples: Vec<FbSample>,
    pub homogeneity_residuals: Vec<(f64, f64)>,
    pub chi_transition_area: f64,
    pub symmetry_residual: f64,
    pub domain_variation_residuals: Vec<f64>,
    pub warnings: Vec<String>,
}

/// 17 significant digits, enough to round-trip any `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl DiagnosticsReport {
    /// Every diagnostic for one field `v` with its indicator `chi`.
    pub fn compute(
        v: &ScalarField<DiskGrid>,
        chi: &ScalarField<DiskGrid>,
        opts: &ReportOptions,
    ) -> Result<Self, DiagnosticsError> {
        let g = v.grid();
        let mut warnings = Vec::new();
        let rmin = 4.0 * g.dr().max(g.dtheta());
        let reach = 1.0 - opts.x0[0].hypot(opts.x0[1]);
        let radii: Vec<f64> = opts.phi_radii.iter().copied().filter(|&r| r >= rmin && r <= reach).collect();
        if radii.len() < opts.phi_radii.len() {
            warnings.push(format!(
                "dropped {} Φ radii outside [{rmin}, {reach}]",
                opts.phi_radii.len() - radii.len()
            ));
        }
        let phi = phi_profile(v, chi, opts.x0, &radii)?;
        let deg = degeneracy_report(v, opts.x0, opts.thresholds)?;
        warnings.extend(deg.warnings.iter().cloned());

        let fb_polylines = extract_free_boundary(v, opts.fb_level);
        if fb_polylines.is_empty() {
            warnings.push("no free boundary: the positivity set is empty or everything".into());
        }
        let fb = match fb_samples(v, &fb_polylines, opts.fb_stride, opts.probe_len) {
            Err(DiagnosticsError::ProbeTooShort { len, min }) => {
                warnings.push(format!("probe length {len} below three cell widths ({min}); free-boundary condition not sampled"));
                FbSamples::default()
            }
            other => other?,
        };
        if !fb.skipped.is_empty() {
            warnings.push(format!("{} free-boundary samples skipped near the outer circle", fb.skipped.len()));
        }

        let (lo, hi) = opts.annulus;
        let mut homogeneity_residuals = Vec::new();
        for s in &deg.growth {
            let blown = blow_up_rescale(v, opts.x0, s.r, g)?;
            homogeneity_residuals.push((s.r, homogeneity_residual(&blown, [0.0, 0.0], lo, hi)?));
        }
        let domain_variation_residuals = opts
            .bumps
            .iter()
            .map(|b| domain_variation_residual(v, chi, b))
            .collect::<Result<Vec<_>, _>>()?;

        Ok(DiagnosticsReport {
            phi_profile: phi.samples,
            phi_max_violation: phi.max_violation,
            growth: deg.growth,
            nondeg: deg.nondeg,
            slope: deg.slope,
            n_decay_ratio: deg.n_decay_ratio,
            degenerate: deg.degenerate,
            fb_polylines,
            fb_condition_samples: fb.samples,
            homogeneity_residuals,
            chi_transition_area: chi_transition_area(chi, opts.chi_band.0, opts.chi_band.1),
            symmetry_residual: symmetry_residual(v, g.m())?,
            domain_variation_residuals,
            warnings,
        })
    }

    pub fn phi_csv(&self) -> String {
        let mut s = String::from("r,phi\n");
        for (r, p) in &self.phi_profile {
            let _ = writeln!(s, "{},{}", num(*r), num(*p));
        }
        s
    }

    pub fn growth_csv(&self) -> String {
        let mut s = String::from("r,M,ratio\n");
        for g in &self.growth {
            let _ = writeln!(s, "{},{},{}", num(g.r), num(g.m), num(g.ratio));
        }
        s
    }

    pub fn nondeg_csv(&self) -> String {
        let mut s = String::from("r,N\n");
        for (r, n) in &self.nondeg {
            let _ = writeln!(s, "{},{}", num(*r), num(*n));
        }
        s
    }

    pub fn fb_csv(&self) -> String {
        let mut s = String::from("polyline,x,y\n");
        for (id, line) in self.fb_polylines.iter().enumerate() {
            for p in line {
                let _ = writeln!(s, "{id},{},{}", num(p[0]), num(p[1]));
            }
        }
        s
    }

    pub fn fbcond_csv(&self) -> String {
        let mut s = String::from("x,y,residual\n");
        for f in &self.fb_condition_samples {
            let _ = writeln!(s, "{},{},{}", num(f.point[0]), num(f.point[1]), num(f.residual));
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "degenerate = {}", self.degenerate);
        let _ = writeln!(s, "growth_slope = {}", num(self.slope));
        let _ = writeln!(s, "n_decay_ratio = {}", num(self.n_decay_ratio));
        let _ = writeln!(s, "phi_max_violation = {}", num(self.phi_max_violation));
        let _ = writeln!(s, "chi_transition_area = {}", num(self.chi_transition_area));
        let _ = writeln!(s, "symmetry_residual = {}", num(self.symmetry_residual));
        let fb_max = self.fb_condition_samples.iter().map(|f| f.residual.abs()).fold(0.0, f64::max);
        let _ = writeln!(s, "fb_samples = {}", self.fb_condition_samples.len());
        let _ = writeln!(s, "fb_max_abs_residual = {}", num(fb_max));
        for (r, h) in &self.homogeneity_residuals {
            let _ = writeln!(s, "homogeneity_residual r={} value={}", num(*r), num(*h));
        }
        for (k, d) in self.domain_variation_residuals.iter().enumerate() {
            let _ = writeln!(s, "domain_variation_residual[{k}] = {}", num(*d));
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }

    /// Writes phi.csv, growth.csv, nondeg.csv, fb.csv, fbcond.csv and summary.txt.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<(), DiagnosticsError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        fs::write(dir.join("phi.csv"), self.phi_csv())?;
        fs::write(dir.join("growth.csv"), self.growth_csv())?;
        fs::write(dir.join("nondeg.csv"), self.nondeg_csv())?;
        fs::write(dir.join("fb.csv"), self.fb_csv())?;
        fs::write(dir.join("fbcond.csv"), self.fbcond_csv())?;
        fs::write(dir.join("summary.txt"), self.summary())?;
        Ok(())
    }
}
