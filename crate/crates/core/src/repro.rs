//! Scripted reproductions of the two worked counterexamples.

use serde::{Deserialize, Serialize};

use crate::criteria::{
    chain_recurrence_trivial, gh_check, periodic_point_exists, psp_search, Evidence, Reason, DEFAULT_WINDOW,
};
use crate::error::Result;
use crate::solver::{finite_shadow_solve, ShadowMode, ShadowOutcome};
use crate::trajectories::{gen_genhyp, gen_ramp, validate};
use crate::weights::WeightSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproReport {
    pub case: String,
    pub pass: bool,
    pub checks: Vec<ReproCheck>,
}

fn check(name: &str, pass: bool, detail: String) -> ReproCheck {
    ReproCheck {
        name: name.to_string(),
        pass,
        detail,
    }
}

fn report(case: &str, checks: Vec<ReproCheck>) -> ReproReport {
    ReproReport {
        case: case.to_string(),
        pass: checks.iter().all(|c| c.pass),
        checks,
    }
}

/// Weights `1/2` at and left of 0, `2` to the right.
pub fn hyperbolic_spec() -> WeightSpec {
    WeightSpec::step(0.5, 2.0, 1).expect("valid")
}

/// Weights `1` left of 0, `1/2` at and right of 0.
pub fn trivcr_spec() -> WeightSpec {
    WeightSpec::step(1.0, 0.5, 0).expect("valid")
}

/// Generalized hyperbolic yet not shadowable with bounded support.
pub fn repro_genhyp() -> Result<ReproReport> {
    let spec = hyperbolic_spec();
    let (eps, m, length) = (1.0, 3, 20);
    let traj = gen_genhyp(eps, m, length)?;
    let mut checks = Vec::new();

    let gh = gh_check(&spec, 0);
    let t = match &gh.evidence {
        Evidence::GhSplit(s) => s.t,
        _ => f64::NAN,
    };
    checks.push(check("gh_split_at_0", gh.holds() && t <= 0.51, format!("status {:?}, t = {t}", gh.status)));

    let v = validate(&traj, &spec)?;
    let expect = eps * 2f64.powi(-(m as i32) - 1);
    checks.push(check(
        "defects_exact",
        v.defects.iter().all(|&d| d == expect),
        format!("max defect {} (expected {expect} at every step)", v.max_defect),
    ));

    let mut all = true;
    let mut detail = Vec::new();
    for bound in 5..=12 {
        let r = finite_shadow_solve(&traj, &spec, eps, ShadowMode::SupportBounded { bound })?;
        match r.outcome {
            ShadowOutcome::Infeasible { coordinate, .. } => {
                all &= coordinate > m + 1;
                detail.push(format!("M={bound}: conflict at {coordinate}"));
            }
            _ => {
                all = false;
                detail.push(format!("M={bound}: not infeasible"));
            }
        }
    }
    checks.push(check("support_bounded_infeasible", all, detail.join("; ")));

    let r = finite_shadow_solve(&traj, &spec, eps, ShadowMode::Unrestricted)?;
    let (pass, detail) = match &r.outcome {
        ShadowOutcome::Feasible { shadow, error, constrained } => {
            let dev = constrained
                .iter()
                .map(|&c| (shadow.get(c) - eps * 2f64.powi(-(c.abs() as i32))).abs())
                .fold(0.0, f64::max);
            (dev <= 1e-9, format!("error {error}, max deviation from y on {} coordinates {dev:e}", constrained.len()))
        }
        o => (false, format!("{o:?}")),
    };
    checks.push(check("unrestricted_matches_y", pass, detail));
    Ok(report("genhyp", checks))
}

/// No periodic shadowing although chain recurrence is trivial.
pub fn repro_trivcr(window: (i64, i64)) -> Result<ReproReport> {
    let spec = trivcr_spec();
    let mut checks = Vec::new();

    let cr = chain_recurrence_trivial(&spec);
    let sums_exact = match &cr.evidence {
        Evidence::Series(s) => s
            .right_partial_sums
            .iter()
            .enumerate()
            .all(|(n, &v)| v == 1.0 - 2f64.powi(-(n as i32) - 1)),
        _ => false,
    };
    checks.push(check(
        "chain_recurrence_iiiB",
        cr.holds() && cr.reason == Reason::IIIB && sums_exact,
        format!("{:?} via {:?}, partial sums exact: {sums_exact}", cr.status, cr.reason),
    ));

    let p = periodic_point_exists(&spec);
    checks.push(check("no_periodic_points", p.fails(), format!("{:?}", p.status)));

    let ramp = gen_ramp(0.1, 11)?;
    let v = validate(&ramp, &spec)?;
    let norm = ramp.max_norm()?;
    checks.push(check(
        "ramp_pseudotrajectory",
        v.max_defect <= 0.1 + 1e-12 && norm == 11.0 * 0.1 && norm > 1.0,
        format!("{} points, max defect {}, max norm {norm}", ramp.len(), v.max_defect),
    ));

    let grid: Vec<f64> = (1..=12).map(|j| 2f64.powi(-j)).collect();
    let search = psp_search(&spec, 1.0, window, &grid)?;
    let (pass, detail) = match (&search.delta, &search.verdict.evidence) {
        (None, Evidence::TripleSearch { per_delta }) => {
            let ok = per_delta
                .iter()
                .all(|(d, w)| w.as_ref().is_some_and(|w| w.a < *d && w.b < *d));
            (ok && per_delta.len() == grid.len(), format!("witnesses for all {} grid values", per_delta.len()))
        }
        (Some(d), _) => (false, format!("no witness on [{}, {}] at δ = {d}", window.0, window.1)),
        _ => (false, "unexpected evidence".into()),
    };
    checks.push(check("psp_witness_every_delta", pass, detail));
    Ok(report("trivcr", checks))
}

/// Runs `repro_trivcr` on the default window.
pub fn repro_trivcr_default() -> Result<ReproReport> {
    repro_trivcr(DEFAULT_WINDOW)
}
