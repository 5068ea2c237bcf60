//! Exact finite shadowing for the sup norm.
//!
//! `|x_j(n) − w(n+1)⋯w(n+j) x(n+j)| < ε` involves the single unknown
//! `x(n+j)`, so every source coordinate `c` collects one interval per step `j`
//! and the problem splits into independent interval intersections.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{basis, iterate, SeqVector, SpaceNorm};
use crate::trajectories::Pseudotrajectory;
use crate::weights::WeightSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShadowMode {
    Unrestricted,
    /// Forces `x(c) = 0` for `|c| > bound`.
    SupportBounded { bound: i64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintSource {
    /// `|x_j(c − j) − w(c−j+1)⋯w(c) x(c)| ≤ r` with `data = x_j(c − j)`.
    Step { j: usize, data: f64 },
    SupportBound { bound: i64 },
}

/// `x(c) ∈ [lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub source: ConstraintSource,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShadowOutcome {
    Feasible {
        shadow: SeqVector,
        error: f64,
        /// Coordinates carrying a constraint with nonzero data.
        constrained: Vec<i64>,
    },
    Infeasible {
        coordinate: i64,
        /// The constraint with the largest lower end and the one with the smallest upper end.
        conflict: (Constraint, Constraint),
        constraints: Vec<Constraint>,
    },
    Unknown {
        reason: String,
        error: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowResult {
    pub mode: ShadowMode,
    pub eps: f64,
    /// Interval half-width actually used.
    pub radius: f64,
    pub outcome: ShadowOutcome,
}

impl ShadowResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self.outcome, ShadowOutcome::Feasible { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self.outcome, ShadowOutcome::Infeasible { .. })
    }
}

/// `max_j ‖x_j − B_w^j x‖` in the trajectory's norm.
pub fn shadow_error(traj: &Pseudotrajectory, spec: &WeightSpec, x: &SeqVector) -> Result<f64> {
    traj.points.iter().enumerate().try_fold(0.0f64, |m, (j, xj)| {
        Ok(m.max(traj.space.norm(&xj.sub(&iterate(spec, x, j as i64)))?))
    })
}

fn radius(eps: f64) -> f64 {
    eps - 1e-12 * eps.min(1.0)
}

fn constraints_at(traj: &Pseudotrajectory, spec: &WeightSpec, c: i64, r: f64, mode: ShadowMode) -> Vec<Constraint> {
    let mut out: Vec<Constraint> = traj
        .points
        .iter()
        .enumerate()
        .map(|(j, xj)| {
            let data = xj.get(c - j as i64);
            let inv = spec.range_product(c - j as i64 + 1, c).recip();
            let (a, b) = (inv.scale(data - r), inv.scale(data + r));
            Constraint {
                source: ConstraintSource::Step { j, data },
                lo: a.min(b),
                hi: a.max(b),
            }
        })
        .collect();
    if let ShadowMode::SupportBounded { bound } = mode {
        if c.abs() > bound {
            out.push(Constraint {
                source: ConstraintSource::SupportBound { bound },
                lo: 0.0,
                hi: 0.0,
            });
        }
    }
    out
}

/// Coordinates reached by some nonzero datum: `supp x_j + j`.
fn data_coordinates(traj: &Pseudotrajectory) -> BTreeSet<i64> {
    traj.points
        .iter()
        .enumerate()
        .flat_map(|(j, xj)| xj.support().map(move |n| n + j as i64))
        .collect()
}

fn solve_sup(traj: &Pseudotrajectory, spec: &WeightSpec, eps: f64, mode: ShadowMode) -> Result<(f64, ShadowOutcome)> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
    }
    if let ShadowMode::SupportBounded { bound } = mode {
        if bound < 0 {
            return Err(Error::InvalidParameter(format!("support bound must be ≥ 0, got {bound}")));
        }
    }
    let r = radius(eps);
    let mut shadow = BTreeMap::new();
    let coords = data_coordinates(traj);
    for &c in &coords {
        let constraints = constraints_at(traj, spec, c, r, mode);
        let lower = constraints.iter().fold(&constraints[0], |best, k| if k.lo > best.lo { k } else { best });
        let upper = constraints.iter().fold(&constraints[0], |best, k| if k.hi < best.hi { k } else { best });
        if lower.lo > upper.hi {
            let conflict = (lower.clone(), upper.clone());
            return Ok((
                r,
                ShadowOutcome::Infeasible {
                    coordinate: c,
                    conflict,
                    constraints,
                },
            ));
        }
        shadow.insert(c, 0.5 * lower.lo + 0.5 * upper.hi);
    }
    let shadow = SeqVector::collect(shadow);
    let sup_traj = Pseudotrajectory {
        space: SpaceNorm::Sup,
        ..traj.clone()
    };
    let error = shadow_error(&sup_traj, spec, &shadow)?;
    if error < eps {
        Ok((
            r,
            ShadowOutcome::Feasible {
                shadow,
                error,
                constrained: coords.into_iter().collect(),
            },
        ))
    } else {
        Ok((
            r,
            ShadowOutcome::Unknown {
                reason: format!("midpoint shadow has sup error {error} ≥ ε"),
                error: Some(error),
            },
        ))
    }
}

/// Decides whether some `x` satisfies `‖x_j − B^j x‖ < ε` for every `j`.
///
/// Exact for c0. For ℓp the sup-norm problem is solved first: infeasibility
/// carries over because the ℓp ball lies inside the sup ball, and a sup
/// solution is accepted only if its true ℓp error is below `ε`.
pub fn finite_shadow_solve(traj: &Pseudotrajectory, spec: &WeightSpec, eps: f64, mode: ShadowMode) -> Result<ShadowResult> {
    if !traj.space.is_unit_basis() {
        return Err(Error::InvalidParameter("finite shadowing is solved on c0 and ℓp only".into()));
    }
    let (radius, outcome) = solve_sup(traj, spec, eps, mode)?;
    let outcome = match (outcome, &traj.space) {
        (ShadowOutcome::Feasible { shadow, constrained, .. }, SpaceNorm::Lp { p }) => {
            let error = shadow_error(traj, spec, &shadow)?;
            if error < eps {
                ShadowOutcome::Feasible {
                    shadow,
                    error,
                    constrained,
                }
            } else {
                ShadowOutcome::Unknown {
                    reason: format!("sup-norm shadow has ℓ{p} error {error} ≥ ε"),
                    error: Some(error),
                }
            }
        }
        (o, _) => o,
    };
    Ok(ShadowResult {
        mode,
        eps,
        radius,
        outcome,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteForce {
    pub feasible: bool,
    pub best_error: f64,
    pub shadow: SeqVector,
}

const BRUTE_MAX_COORDS: i64 = 9;
const BRUTE_MAX_POINTS: usize = 5;

/// Grid search over `x(c) ∈ k · step ∩ [−2‖traj‖, 2‖traj‖]` for `c` in the
/// window, `x = 0` elsewhere. In the sup norm the error is a maximum of
/// per-coordinate terms, so each coordinate is optimized on its own.
pub fn brute_force_shadow(
    traj: &Pseudotrajectory,
    spec: &WeightSpec,
    eps: f64,
    window: (i64, i64),
    grid_step: f64,
) -> Result<BruteForce> {
    if window.1 < window.0 || window.1 - window.0 + 1 > BRUTE_MAX_COORDS {
        return Err(Error::SizeGuard(format!("window must hold 1..={BRUTE_MAX_COORDS} coordinates")));
    }
    if traj.len() > BRUTE_MAX_POINTS {
        return Err(Error::SizeGuard(format!("at most {BRUTE_MAX_POINTS} points")));
    }
    if !(grid_step > 0.0) {
        return Err(Error::InvalidParameter("grid step must be positive".into()));
    }
    let sup_traj = Pseudotrajectory {
        space: SpaceNorm::Sup,
        ..traj.clone()
    };
    let bound = 2.0 * sup_traj.max_norm()?;
    let steps = (bound / grid_step).floor() as i64;

    let local_error = |c: i64, v: f64| -> f64 {
        let x = basis(c).scaled(v);
        sup_traj
            .points
            .iter()
            .enumerate()
            .map(|(j, xj)| (xj.get(c - j as i64) - iterate(spec, &x, j as i64).get(c - j as i64)).abs())
            .fold(0.0, f64::max)
    };

    let mut pairs = Vec::new();
    for c in window.0..=window.1 {
        let mut best = (local_error(c, 0.0), 0.0);
        for k in -steps..=steps {
            let v = k as f64 * grid_step;
            let e = local_error(c, v);
            if e < best.0 {
                best = (e, v);
            }
        }
        pairs.push((c, best.1));
    }
    let shadow = SeqVector::collect(pairs);
    let best_error = shadow_error(&sup_traj, spec, &shadow)?;
    Ok(BruteForce {
        feasible: best_error < eps,
        best_error,
        shadow,
    })
}
