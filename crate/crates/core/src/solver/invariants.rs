use crate::geometry::{Grid, ScalarField, SectorGrid};

/// Post-hoc checks on a normalized sector solution `v_ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub eps: f64,
    /// `v(0) == ε` bit for bit.
    pub origin_exact: bool,
    /// Maximum over all non-arc nodes.
    pub max_interior: f64,
    pub max_arc: f64,
    /// Discrete maximum principle: `max_interior ≤ max_arc + tol`.
    pub max_on_arc: bool,
    pub sup_v: f64,
    /// `2‖g‖∞ + ε`.
    pub apriori_bound: f64,
    pub apriori_ok: bool,
}

impl InvariantReport {
    pub fn all_ok(&self) -> bool {
        self.origin_exact && self.max_on_arc && self.apriori_ok
    }
}

/// `tol` absorbs the linear-solve and fixed-point error in the maximum
/// principle check.
pub fn check_invariants(
    v: &ScalarField<SectorGrid>,
    eps: f64,
    g_sup: f64,
    tol: f64,
) -> InvariantReport {
    let grid = v.grid();
    let vals = v.values();
    let (mut max_interior, mut max_arc) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (k, &x) in vals.iter().enumerate() {
        if grid.node_ij(k).0 == grid.nr {
            max_arc = max_arc.max(x);
        } else {
            max_interior = max_interior.max(x);
        }
    }
    let sup_v = v.sup_norm();
    let apriori_bound = 2.0 * g_sup + eps;
    InvariantReport {
        eps,
        origin_exact: v.origin_value() == eps,
        max_interior,
        max_arc,
        max_on_arc: max_interior <= max_arc + tol,
        sup_v,
        apriori_bound,
        apriori_ok: sup_v <= apriori_bound,
    }
}

/// Largest cell gradient `|∇v|` over cells whose centre has `r ≤ r_max`.
pub fn max_gradient<G: Grid>(v: &ScalarField<G>, r_max: f64) -> f64 {
    let g = v.grid();
    let mut best = 0.0f64;
    for i in 0..g.nr() {
        if g.cell_center(i, 0).0 > r_max {
            break;
        }
        for jc in 0..g.angular_cells() {
            let [a, b] = v.cell_gradient(i, jc);
            best = best.max(a.hypot(b));
        }
    }
    best
}

/// `(1 - r_c, max_θ |∇v|)` for each ring of cells, innermost first.
pub fn boundary_gradient_profile<G: Grid>(v: &ScalarField<G>) -> Vec<(f64, f64)> {
    let g = v.grid();
    (0..g.nr())
        .map(|i| {
            let d = 1.0 - g.cell_center(i, 0).0;
            let m = (0..g.angular_cells())
                .map(|jc| {
                    let [a, b] = v.cell_gradient(i, jc);
                    a.hypot(b)
                })
                .fold(0.0, f64::max);
            (d, m)
        })
        .collect()
}

/// Smallest `C` with `|∇v| ≤ C (1 + |log d|)` on the given profile.
pub fn fit_log_gradient_constant(profile: &[(f64, f64)]) -> f64 {
    profile
        .iter()
        .map(|&(d, m)| m / (1.0 + d.ln().abs()))
        .fold(0.0, f64::max)
}
