//! `fbsing oracle-check`: the 1D validation suite with a printed error table.

use std::fmt::Write as _;

use fbsing_core::oracle1d::{exact_profile, exact_profile_sine, solve_bvp_1d, OracleError};
use fbsing_core::reaction::BetaProfile;
use fbsing_core::solver::SolveConfig;

#[derive(Debug, Clone)]
pub struct OracleCheck {
    pub table: String,
    pub passed: bool,
}

pub fn oracle_check() -> Result<OracleCheck, OracleError> {
    let cfg = SolveConfig { tol_fp: 1e-12, max_iter_fp: 5000, ..SolveConfig::default() };
    let mut table = String::from("profile     eps     h          sup_error    ratio   iters  ok\n");
    let mut passed = true;

    for beta in [BetaProfile::sine(), BetaProfile::poly_bump()] {
        let eps = 0.1;
        let xs = [-1.0, 1.0];
        let ends = exact_profile(&beta, eps, &xs)?;
        let mut prev: Option<f64> = None;
        for div in [16.0, 32.0, 64.0] {
            let h = eps / div;
            let (p, log) = solve_bvp_1d(&beta, eps, h, ends.v[0], ends.v[1], &cfg)?;
            let err = p.sup_distance(&exact_profile(&beta, eps, &p.x)?);
            let ratio = prev.map(|e| e / err);
            // tolerances apply to the closed-form oracle; the RK4 oracle is reported only
            let ok = !ends.closed_form
                || (log.converged && (div != 16.0 || err <= 1e-2) && ratio.is_none_or(|r| (3.5..=4.5).contains(&r)));
            passed &= ok;
            let _ = writeln!(
                table,
                "{:<11} {:<7} {:<10.4e} {:<12.4e} {:<7} {:<6} {}",
                beta.kind().as_str(),
                eps,
                h,
                err,
                ratio.map_or("-".to_string(), |r| format!("{r:.3}")),
                log.iterations(),
                if ok { "yes" } else { "NO" }
            );
            prev = Some(err);
        }
    }

    // reaction never active: the linear interpolant of the ends
    let beta = BetaProfile::sine();
    let (p, log) = solve_bvp_1d(&beta, 0.1, 0.01, -0.3, -0.1, &cfg)?;
    let err = p.x.iter().zip(&p.v).map(|(x, v)| (v - (-0.3 + 0.1 * (x + 1.0))).abs()).fold(0.0, f64::max);
    let ok = log.converged && err <= 1e-12;
    passed &= ok;
    let _ = writeln!(table, "inactive    0.1     1.0000e-2  {err:<12.4e} -       {:<6} {}", log.iterations(), if ok { "yes" } else { "NO" });

    let anchor = exact_profile_sine(0.1, 0.0);
    let ok = anchor == 0.1;
    passed &= ok;
    let _ = writeln!(table, "anchor v(0) = {anchor:?} {}", if ok { "yes" } else { "NO" });
    Ok(OracleCheck { table, passed })
}
