//! Flat `key = value` run configuration. `#` starts a comment; unknown keys
//! are rejected so typos do not silently fall back to defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fbsing_core::diagnostics::{BumpField, BumpKind, DegeneracyThresholds, DiagnosticsError, ReportOptions};
use fbsing_core::geometry::{BoundaryData, GeometryError, SectorGrid};
use fbsing_core::linalg::Preconditioner;
use fbsing_core::reaction::{BetaKind, BetaProfile, ReactionError};
use fbsing_core::solver::{SolveConfig, SolveError, Stabilization};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("key `{key}`: {msg}")]
    Invalid { key: String, msg: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Reaction(#[from] ReactionError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
}

const KEYS: &[&str] = &[
    "m",
    "nr",
    "ntheta",
    "beta.kind",
    "beta.table_path",
    "g.coeffs",
    "g.amplitude",
    "solver.eps",
    "solver.tol_linear",
    "solver.max_iter_linear",
    "solver.tol_fp",
    "solver.max_iter_fp",
    "solver.damping",
    "solver.stabilization",
    "solver.preconditioner",
    "solver.divergence_factor",
    "solver.divergence_window",
    "diag.radii",
    "diag.fb_level",
    "diag.fb_stride",
    "diag.probe_len",
    "diag.n_decay",
    "diag.slope",
    "diag.annulus",
    "diag.chi_band",
    "diag.bump.kind",
    "diag.bump.center",
    "diag.bump.radius",
    "diag.bump.direction",
    "seed",
];

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub grid: SectorGrid,
    pub beta: BetaProfile,
    pub beta_table: Option<PathBuf>,
    pub boundary: BoundaryData,
    pub solver: SolveConfig,
    pub report: ReportOptions,
    /// Reserved; nothing in the pipeline draws random numbers.
    pub seed: u64,
}

fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: k + 1 })?;
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(ConfigError::Syntax { line: k + 1 });
        }
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey(key));
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(ConfigError::Duplicate { line: k + 1, key });
        }
    }
    Ok(map)
}

struct Pairs(BTreeMap<String, String>);

impl Pairs {
    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.0
            .get(key)
            .map(|v| {
                v.parse::<T>().map_err(|e| ConfigError::Invalid { key: key.into(), msg: format!("`{v}`: {e}") })
            })
            .transpose()
    }

    fn required<T: std::str::FromStr>(&self, key: &'static str) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)?.ok_or(ConfigError::Missing(key))
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        self.0
            .get(key)
            .map(|v| {
                v.split(',')
                    .map(|x| {
                        x.trim().parse::<f64>().map_err(|e| ConfigError::Invalid {
                            key: key.into(),
                            msg: format!("`{}`: {e}", x.trim()),
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    fn pair(&self, key: &str) -> Result<Option<(f64, f64)>, ConfigError> {
        match self.list(key)? {
            None => Ok(None),
            Some(v) if v.len() == 2 => Ok(Some((v[0], v[1]))),
            Some(v) => Err(ConfigError::Invalid { key: key.into(), msg: format!("expected 2 numbers, got {}", v.len()) }),
        }
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.display().to_string(), source })?;
        // relative table paths resolve against the config file
        Self::parse(&text, path.parent())
    }

    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self, ConfigError> {
        let p = Pairs(parse_pairs(text)?);
        let grid = SectorGrid::new(p.required("m")?, p.required("nr")?, p.required("ntheta")?)?;

        let kind = BetaKind::parse(&p.required::<String>("beta.kind")?)?;
        let table: Option<String> = p.get("beta.table_path")?;
        let (beta, beta_table) = match kind {
            BetaKind::Sine => (BetaProfile::sine(), None),
            BetaKind::PolyBump => (BetaProfile::poly_bump(), None),
            BetaKind::Tabulated => {
                let t = PathBuf::from(table.ok_or(ConfigError::Missing("beta.table_path"))?);
                let t = match base {
                    Some(b) if t.is_relative() => b.join(t),
                    _ => t,
                };
                (BetaProfile::from_table_file(&t)?, Some(t))
            }
        };

        let coeffs = p.list("g.coeffs")?.unwrap_or_else(|| BoundaryData::cos_m().coeffs().to_vec());
        let boundary = BoundaryData::new(coeffs, p.get("g.amplitude")?.unwrap_or(1.0))?;

        let d = SolveConfig::default();
        let stabilization = match p.get::<String>("solver.stabilization")? {
            None => d.stabilization,
            Some(s) => Stabilization::parse(&s).ok_or_else(|| ConfigError::Invalid {
                key: "solver.stabilization".into(),
                msg: format!("`{s}` is not one of none, positive-slope"),
            })?,
        };
        let preconditioner = match p.get::<String>("solver.preconditioner")? {
            None => d.preconditioner,
            Some(s) => Preconditioner::parse(&s).ok_or_else(|| ConfigError::Invalid {
                key: "solver.preconditioner".into(),
                msg: format!("`{s}` is not one of jacobi, spectral"),
            })?,
        };
        let solver = SolveConfig {
            tol_linear: p.get("solver.tol_linear")?.unwrap_or(d.tol_linear),
            max_iter_linear: p.get("solver.max_iter_linear")?.unwrap_or(d.max_iter_linear),
            tol_fp: p.get("solver.tol_fp")?.unwrap_or(d.tol_fp),
            max_iter_fp: p.get("solver.max_iter_fp")?.unwrap_or(d.max_iter_fp),
            damping: p.get("solver.damping")?.unwrap_or(d.damping),
            eps_schedule: p.list("solver.eps")?.unwrap_or(d.eps_schedule),
            stabilization,
            preconditioner,
            divergence_factor: p.get("solver.divergence_factor")?.unwrap_or(d.divergence_factor),
            divergence_window: p.get("solver.divergence_window")?.unwrap_or(d.divergence_window),
        };
        solver.validate()?;

        let r = ReportOptions::default();
        let t = DegeneracyThresholds::default();
        let bump = match p.get::<String>("diag.bump.kind")?.as_deref().unwrap_or("dilation") {
            "none" => None,
            k @ ("dilation" | "translation") => {
                let center = p.pair("diag.bump.center")?.unwrap_or((0.0, 0.0));
                let radius = p.get("diag.bump.radius")?.unwrap_or(0.8);
                let kind = if k == "dilation" {
                    BumpKind::Dilation
                } else {
                    let (ax, ay) = p.pair("diag.bump.direction")?.unwrap_or((1.0, 0.0));
                    BumpKind::Translation([ax, ay])
                };
                Some(BumpField::new([center.0, center.1], radius, kind)?)
            }
            other => {
                return Err(ConfigError::Invalid {
                    key: "diag.bump.kind".into(),
                    msg: format!("`{other}` is not one of none, dilation, translation"),
                })
            }
        };
        let report = ReportOptions {
            x0: r.x0,
            phi_radii: p.list("diag.radii")?.unwrap_or(r.phi_radii),
            fb_level: p.get("diag.fb_level")?.unwrap_or(r.fb_level),
            fb_stride: p.get("diag.fb_stride")?.unwrap_or(r.fb_stride),
            probe_len: p.get("diag.probe_len")?.unwrap_or(r.probe_len),
            thresholds: DegeneracyThresholds {
                n_decay: p.get("diag.n_decay")?.unwrap_or(t.n_decay),
                slope: p.get("diag.slope")?.unwrap_or(t.slope),
            },
            annulus: p.pair("diag.annulus")?.unwrap_or(r.annulus),
            bumps: bump.into_iter().collect(),
            chi_band: p.pair("diag.chi_band")?.unwrap_or(r.chi_band),
        };
        if report.phi_radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DiagnosticsError::RadiiNotIncreasing.into());
        }
        if report.fb_stride == 0 {
            return Err(ConfigError::Invalid { key: "diag.fb_stride".into(), msg: "must be positive".into() });
        }

        Ok(RunConfig { grid, beta, beta_table, boundary, solver, report, seed: p.get("seed")?.unwrap_or(0) })
    }

    /// Every key with its resolved value, one `key = value` per line. Parsing
    /// the output again yields the same configuration.
    pub fn resolved(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        let g = &self.grid;
        let _ = writeln!(s, "m = {}\nnr = {}\nntheta = {}", g.m, g.nr, g.ntheta);
        let _ = writeln!(s, "beta.kind = {}", self.beta.kind().as_str());
        if let Some(t) = &self.beta_table {
            let _ = writeln!(s, "beta.table_path = {}", t.display());
        }
        let _ = writeln!(s, "g.coeffs = {}", join(self.boundary.coeffs()));
        let _ = writeln!(s, "g.amplitude = {:?}", self.boundary.amplitude());
        let c = &self.solver;
        let _ = writeln!(s, "solver.eps = {}", join(&c.eps_schedule));
        let _ = writeln!(s, "solver.tol_linear = {:?}", c.tol_linear);
        let _ = writeln!(s, "solver.max_iter_linear = {}", c.max_iter_linear);
        let _ = writeln!(s, "solver.tol_fp = {:?}", c.tol_fp);
        let _ = writeln!(s, "solver.max_iter_fp = {}", c.max_iter_fp);
        let _ = writeln!(s, "solver.damping = {:?}", c.damping);
        let _ = writeln!(s, "solver.stabilization = {}", c.stabilization.as_str());
        let _ = writeln!(s, "solver.preconditioner = {}", c.preconditioner.as_str());
        let _ = writeln!(s, "solver.divergence_factor = {:?}", c.divergence_factor);
        let _ = writeln!(s, "solver.divergence_window = {}", c.divergence_window);
        let r = &self.report;
        let _ = writeln!(s, "diag.radii = {}", join(&r.phi_radii));
        let _ = writeln!(s, "diag.fb_level = {:?}", r.fb_level);
        let _ = writeln!(s, "diag.fb_stride = {}", r.fb_stride);
        let _ = writeln!(s, "diag.probe_len = {:?}", r.probe_len);
        let _ = writeln!(s, "diag.n_decay = {:?}", r.thresholds.n_decay);
        let _ = writeln!(s, "diag.slope = {:?}", r.thresholds.slope);
        let _ = writeln!(s, "diag.annulus = {:?},{:?}", r.annulus.0, r.annulus.1);
        let _ = writeln!(s, "diag.chi_band = {:?},{:?}", r.chi_band.0, r.chi_band.1);
        match r.bumps.first() {
            None => {
                let _ = writeln!(s, "diag.bump.kind = none");
            }
            Some(b) => {
                let kind = match b.kind {
                    BumpKind::Dilation => "dilation",
                    BumpKind::Translation(_) => "translation",
                };
                let _ = writeln!(s, "diag.bump.kind = {kind}");
                let _ = writeln!(s, "diag.bump.center = {:?},{:?}", b.center[0], b.center[1]);
                let _ = writeln!(s, "diag.bump.radius = {:?}", b.radius);
                if let BumpKind::Translation(a) = b.kind {
                    let _ = writeln!(s, "diag.bump.direction = {:?},{:?}", a[0], a[1]);
                }
            }
        }
        let _ = writeln!(s, "seed = {}", self.seed);
        s
    }
}
