//! Reaction-term family.
//!
//! A profile `β` is supported in `(0, 1)`, strictly positive there and has total
//! mass `∫₀¹ β = 1/2`. The scaled family is `β_ε(s) = β(s/ε)/ε` with primitive
//! `B_ε(s) = B(s/ε)`, and the smoothed phase indicator is `χ_ε = 2·B_ε(v)`.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::geometry::{Grid, ScalarField};

/// Number of intervals of the primitive lookup table.
pub const PRIMITIVE_TABLE_INTERVALS: usize = 1 << 16;

#[derive(Debug, Error)]
pub enum ReactionError {
    #[error("eps must be positive and finite, got {0}")]
    NonPositiveEps(f64),
    #[error("tabulated profile: {0}")]
    InvalidTable(String),
    #[error("tabulated profile is not normalizable (zero mass)")]
    NotNormalizable,
    #[error("unknown beta kind `{0}` (expected sine, poly-bump or tabulated)")]
    UnknownKind(String),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaKind {
    Sine,
    PolyBump,
    Tabulated,
}

impl BetaKind {
    pub fn parse(s: &str) -> Result<Self, ReactionError> {
        match s {
            "sine" => Ok(BetaKind::Sine),
            "poly-bump" => Ok(BetaKind::PolyBump),
            "tabulated" => Ok(BetaKind::Tabulated),
            other => Err(ReactionError::UnknownKind(other.to_string())),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            BetaKind::Sine => "sine",
            BetaKind::PolyBump => "poly-bump",
            BetaKind::Tabulated => "tabulated",
        }
    }
}

impl fmt::Display for BetaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Piecewise-linear table, already renormalized to mass 1/2.
#[derive(Debug, Clone)]
struct Table {
    s: Vec<f64>,
    beta: Vec<f64>,
}

impl Table {
    fn locate(&self, s: f64) -> usize {
        // index k with s[k] <= s < s[k+1]
        match self.s.binary_search_by(|p| p.partial_cmp(&s).unwrap()) {
            Ok(k) => k.min(self.s.len() - 2),
            Err(k) => k.saturating_sub(1).min(self.s.len() - 2),
        }
    }

    fn eval(&self, s: f64) -> f64 {
        let k = self.locate(s);
        let t = (s - self.s[k]) / (self.s[k + 1] - self.s[k]);
        self.beta[k] + t * (self.beta[k + 1] - self.beta[k])
    }

    fn slope(&self, s: f64) -> f64 {
        let k = self.locate(s);
        (self.beta[k + 1] - self.beta[k]) / (self.s[k + 1] - self.s[k])
    }

    /// Exact integral of the interpolant over `[0, s]`.
    fn integral_to(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for k in 0..self.s.len() - 1 {
            let (a, b) = (self.s[k], self.s[k + 1]);
            if s <= a {
                break;
            }
            let hi = s.min(b);
            let fa = self.beta[k];
            let fh = self.eval(hi);
            acc += 0.5 * (fa + fh) * (hi - a);
        }
        acc
    }
}

/// Reaction profile `β` together with its precomputed primitive.
///
/// Immutable after construction and cheap to clone (the primitive table is shared).
#[derive(Debug, Clone)]
pub struct BetaProfile {
    kind: BetaKind,
    params: Vec<f64>,
    lipschitz_bound: f64,
    table: Option<Arc<Table>>,
    primitive: Arc<[f64]>,
}

impl BetaProfile {
    /// `β(s) = (π/4) sin(πs)` on `(0, 1)`.
    pub fn sine() -> Self {
        let amp = PI / 4.0;
        let primitive = build_primitive(|s| 0.25 * (1.0 - (PI * s).cos()));
        BetaProfile {
            kind: BetaKind::Sine,
            params: vec![amp],
            lipschitz_bound: PI * PI / 4.0,
            table: None,
            primitive,
        }
    }

    /// `β(s) = 15 s²(1-s)²` on `(0, 1)`.
    pub fn poly_bump() -> Self {
        let c = 15.0;
        let primitive = build_primitive(|s| {
            let s3 = s * s * s;
            s3 * (5.0 - 7.5 * s + 3.0 * s * s)
        });
        BetaProfile {
            kind: BetaKind::PolyBump,
            params: vec![c],
            // max |30 s(1-s)(1-2s)| attained at s = (3 - √3)/6
            lipschitz_bound: 5.0 * 3f64.sqrt() / 3.0,
            table: None,
            primitive,
        }
    }

    /// Piecewise-linear profile through `(s, β(s))` samples.
    ///
    /// The samples must start at `s = 0` and end at `s = 1` with zero values there,
    /// be strictly increasing in `s` and strictly positive in between. Values are
    /// rescaled so the mass is exactly 1/2.
    pub fn tabulated(points: &[(f64, f64)]) -> Result<Self, ReactionError> {
        if points.len() < 3 {
            return Err(ReactionError::InvalidTable(
                "need at least three samples".into(),
            ));
        }
        if points.iter().any(|(s, b)| !s.is_finite() || !b.is_finite()) {
            return Err(ReactionError::InvalidTable("non-finite sample".into()));
        }
        let (s0, b0) = points[0];
        let (s1, b1) = points[points.len() - 1];
        if s0 != 0.0 || s1 != 1.0 {
            return Err(ReactionError::InvalidTable(
                "samples must span exactly [0, 1]".into(),
            ));
        }
        if b0 != 0.0 || b1 != 0.0 {
            return Err(ReactionError::InvalidTable(
                "beta must vanish at s = 0 and s = 1".into(),
            ));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(ReactionError::InvalidTable(
                "s must be strictly increasing".into(),
            ));
        }
        let interior = &points[1..points.len() - 1];
        if interior.iter().all(|&(_, b)| b == 0.0) {
            return Err(ReactionError::NotNormalizable);
        }
        if interior.iter().any(|&(_, b)| b <= 0.0) {
            return Err(ReactionError::InvalidTable(
                "beta must be strictly positive inside (0, 1)".into(),
            ));
        }
        let s: Vec<f64> = points.iter().map(|p| p.0).collect();
        let raw: Vec<f64> = points.iter().map(|p| p.1).collect();
        let mass: f64 = s
            .windows(2)
            .zip(raw.windows(2))
            .map(|(x, y)| 0.5 * (y[0] + y[1]) * (x[1] - x[0]))
            .sum();
        let scale = 0.5 / mass;
        let beta: Vec<f64> = raw.iter().map(|b| b * scale).collect();
        let lipschitz_bound = s
            .windows(2)
            .zip(beta.windows(2))
            .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs())
            .fold(0.0, f64::max);
        let table = Table { s, beta };
        let primitive = build_primitive(|x| table.integral_to(x));
        Ok(BetaProfile {
            kind: BetaKind::Tabulated,
            params: vec![scale],
            lipschitz_bound,
            table: Some(Arc::new(table)),
            primitive,
        })
    }

    /// Reads a two-column `s β(s)` text table (whitespace or comma separated,
    /// `#` comments allowed).
    pub fn from_table_file(path: impl AsRef<Path>) -> Result<Self, ReactionError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ReactionError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(ReactionError::InvalidTable(format!(
                    "line {}: expected two columns",
                    lineno + 1
                )));
            }
            let parse = |t: &str| {
                t.parse::<f64>().map_err(|_| {
                    ReactionError::InvalidTable(format!("line {}: bad number `{t}`", lineno + 1))
                })
            };
            points.push((parse(cols[0])?, parse(cols[1])?));
        }
        Self::tabulated(&points)
    }

    pub fn kind(&self) -> BetaKind {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz_bound
    }

    /// `β(s)`; exactly zero outside `(0, 1)`.
    pub fn beta(&self, s: f64) -> f64 {
        if s <= 0.0 || s >= 1.0 {
            return 0.0;
        }
        match self.kind {
            BetaKind::Sine => self.params[0] * (PI * s).sin(),
            BetaKind::PolyBump => {
                let t = s * (1.0 - s);
                self.params[0] * t * t
            }
            BetaKind::Tabulated => self.table.as_ref().unwrap().eval(s),
        }
    }

    /// Derivative of `β` (one-sided value inside the support, zero outside).
    pub fn beta_derivative(&self, s: f64) -> f64 {
        if s <= 0.0 || s >= 1.0 {
            return 0.0;
        }
        match self.kind {
            BetaKind::Sine => self.params[0] * PI * (PI * s).cos(),
            BetaKind::PolyBump => 2.0 * self.params[0] * s * (1.0 - s) * (1.0 - 2.0 * s),
            BetaKind::Tabulated => self.table.as_ref().unwrap().slope(s),
        }
    }

    /// Primitive `B(s) = ∫₀ˢ β`, by linear interpolation of the lookup table.
    /// Returns exactly 0 for `s ≤ 0` and exactly 1/2 for `s ≥ 1`.
    pub fn primitive(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        if s >= 1.0 {
            return 0.5;
        }
        let x = s * PRIMITIVE_TABLE_INTERVALS as f64;
        let k = (x as usize).min(PRIMITIVE_TABLE_INTERVALS - 1);
        let t = x - k as f64;
        let (a, b) = (self.primitive[k], self.primitive[k + 1]);
        a + t * (b - a)
    }

    /// Binds a scale `eps`, validating it once.
    pub fn scaled(&self, eps: f64) -> Result<ScaledBeta<'_>, ReactionError> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(ReactionError::NonPositiveEps(eps));
        }
        Ok(ScaledBeta {
            profile: self,
            eps,
            inv_eps: 1.0 / eps,
        })
    }

    /// `β_ε(s) = β(s/ε)/ε`.
    pub fn beta_eps(&self, eps: f64, s: f64) -> Result<f64, ReactionError> {
        Ok(self.scaled(eps)?.beta(s))
    }

    /// `B_ε(s) = B(s/ε)`.
    pub fn primitive_eps(&self, eps: f64, s: f64) -> Result<f64, ReactionError> {
        Ok(self.scaled(eps)?.primitive(s))
    }

    /// Pointwise indicator surrogate `χ_ε = 2·B_ε(v)`, with values in `[0, 1]`.
    pub fn chi_eps<G: Grid>(
        &self,
        eps: f64,
        v: &ScalarField<G>,
    ) -> Result<ScalarField<G>, ReactionError> {
        let sb = self.scaled(eps)?;
        Ok(v.map(|x| sb.chi(x)))
    }
}

/// A profile with a fixed, validated `ε`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledBeta<'a> {
    profile: &'a BetaProfile,
    eps: f64,
    inv_eps: f64,
}

impl ScaledBeta<'_> {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    #[inline]
    pub fn beta(&self, s: f64) -> f64 {
        self.profile.beta(s / self.eps) * self.inv_eps
    }

    #[inline]
    pub fn beta_derivative(&self, s: f64) -> f64 {
        self.profile.beta_derivative(s / self.eps) * self.inv_eps * self.inv_eps
    }

    #[inline]
    pub fn primitive(&self, s: f64) -> f64 {
        self.profile.primitive(s / self.eps)
    }

    #[inline]
    pub fn chi(&self, s: f64) -> f64 {
        2.0 * self.primitive(s)
    }
}

fn build_primitive(f: impl Fn(f64) -> f64) -> Arc<[f64]> {
    let n = PRIMITIVE_TABLE_INTERVALS;
    let mut table: Vec<f64> = (0..=n).map(|k| f(k as f64 / n as f64)).collect();
    table[0] = 0.0;
    table[n] = 0.5;
    // clamp rounding noise so the table is monotone and inside [0, 1/2]
    let mut running = 0.0f64;
    for b in table.iter_mut() {
        running = running.max(b.clamp(0.0, 0.5));
        *b = running;
    }
    table.into()
}
