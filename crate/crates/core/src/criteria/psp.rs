use serde::{Deserialize, Serialize};

use super::{check_window, Evidence, Reason, Status, Verdict};
use crate::error::{Error, Result};
use crate::spaces::{apply_backward, iterate, SeqVector, SpaceNorm};
use crate::trajectories::{gen_ramp, gen_sdelta_bridge, Pseudotrajectory};
use crate::weights::WeightSpec;

/// A triple `k ≤ l ≤ m` at which both quantities fall below `δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleWitness {
    pub k: i64,
    pub l: i64,
    pub m: i64,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PspSearch {
    /// First grid value whose triple check found no witness on the window.
    pub delta: Option<f64>,
    pub verdict: Verdict,
}

fn check_eps_delta(eps: f64, delta: f64) -> Result<()> {
    if !(delta > 0.0 && eps > delta && eps.is_finite()) {
        return Err(Error::Precondition(format!(
            "need ε > δ > 0, got ε = {eps}, δ = {delta}"
        )));
    }
    Ok(())
}

/// The two quantities at `k ≤ l ≤ m`, evaluated directly from weight products:
///
/// `a = |ε / |w(l+1)⋯w(m)| − δ Σ_{i=0}^{m−l−1} 1/|w(m−i)⋯w(m)||`
///
/// `b = |ε |w(k)⋯w(l)| − δ Σ_{i=0}^{l−k−1} |w(k)⋯w(k+i)||`
pub fn psp_quantities(spec: &WeightSpec, eps: f64, delta: f64, k: i64, l: i64, m: i64) -> Result<(f64, f64)> {
    if k > l || l > m {
        return Err(Error::InvalidParameter(format!("need k ≤ l ≤ m, got ({k}, {l}, {m})")));
    }
    let mut a = spec.range_product(l + 1, m).abs().recip().scale(eps);
    for i in 0..(m - l) {
        a -= spec.range_product(m - i, m).abs().recip().scale(delta);
    }
    let mut b = spec.range_product(k, l).abs().scale(eps);
    for i in 0..(l - k) {
        b -= spec.range_product(k, k + i).abs().scale(delta);
    }
    Ok((a.abs(), b.abs()))
}

/// Searches every triple `k ≤ l ≤ m` in the window for one where both
/// quantities are `< δ`. The first witness in lexicographic `(k, l, m)` order
/// is returned; a clean window yields `unknown` since only finitely many
/// triples were examined.
pub fn psp_triple_check(spec: &WeightSpec, eps: f64, delta: f64, window: (i64, i64)) -> Result<Verdict> {
    check_eps_delta(eps, delta)?;
    check_window(window)?;
    let (lo, hi) = window;
    let abs_w = |n: i64| spec.weight_at(n).abs();

    // For each l: smallest k ≥ lo with |b(k, l)| < δ and smallest m ≤ hi with |a(l, m)| < δ.
    let mut best: Option<(i64, i64, i64)> = None;
    for l in lo..=hi {
        let mut a = eps;
        let mut m_hit = (a.abs() < delta).then_some(l);
        if m_hit.is_none() {
            for m in l + 1..=hi {
                a = (a - delta) / abs_w(m);
                if a.abs() < delta {
                    m_hit = Some(m);
                    break;
                }
            }
        }
        let Some(m) = m_hit else { continue };
        let mut b = eps * abs_w(l);
        let mut k_hit = (b.abs() < delta).then_some(l);
        for k in (lo..l).rev() {
            b = abs_w(k) * (b - delta);
            if b.abs() < delta {
                k_hit = Some(k);
            }
        }
        let Some(k) = k_hit else { continue };
        if best.is_none_or(|cur| (k, l, m) < cur) {
            best = Some((k, l, m));
        }
    }

    if let Some((k, l, m)) = best {
        let (a, b) = psp_quantities(spec, eps, delta, k, l, m)?;
        return Ok(Verdict::new(
            Status::Fails,
            Reason::TripleWitness,
            Evidence::Triple(TripleWitness { k, l, m, a, b }),
        ));
    }
    let w = (hi - lo + 1) as u64;
    Ok(Verdict::new(
        Status::Unknown,
        Reason::WindowLimited,
        Evidence::Window {
            lo,
            hi,
            triples_checked: w * (w + 1) * (w + 2) / 6,
        },
    ))
}

/// `ε · 2^{-j}` for `j = 1..=levels`.
pub fn default_grid(eps: f64, levels: u32) -> Vec<f64> {
    (1..=levels as i32).map(|j| eps * 2f64.powi(-j)).collect()
}

/// Walks a descending δ grid and returns the first δ without a witness.
pub fn psp_search(spec: &WeightSpec, eps: f64, window: (i64, i64), grid: &[f64]) -> Result<PspSearch> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty δ grid".into()));
    }
    if grid.windows(2).any(|p| p[1] >= p[0]) {
        return Err(Error::InvalidParameter("δ grid must be strictly descending".into()));
    }
    let mut per_delta = Vec::with_capacity(grid.len());
    for &delta in grid {
        let verdict = psp_triple_check(spec, eps, delta, window)?;
        match verdict.evidence {
            Evidence::Triple(w) => per_delta.push((delta, Some(w))),
            _ => {
                return Ok(PspSearch {
                    delta: Some(delta),
                    verdict,
                })
            }
        }
    }
    Ok(PspSearch {
        delta: None,
        verdict: Verdict::new(
            Status::Fails,
            Reason::TripleWitness,
            Evidence::TripleSearch { per_delta },
        ),
    })
}

/// Outcome of testing one finite sequence `(y_i)` against the implication
/// "all `‖y_i‖ < δ` and the full sum in `B(0, δ)` ⇒ every partial sum
/// `Σ_{i=0}^{j−1} B^i y_{j−i}` in `B(0, ε)`".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionIiCheck {
    pub max_step_norm: f64,
    pub wrap_norm: f64,
    pub max_partial_norm: f64,
    /// `j` of the largest partial sum.
    pub worst_index: usize,
    pub violates: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationSource {
    Ramp { n: u64, delta: f64 },
    Bridge { k: i64, l: i64, m: i64, eps: f64, delta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionIiViolation {
    pub source: ViolationSource,
    /// `y_1, …, y_N`.
    pub steps: Vec<SeqVector>,
    pub check: ConditionIiCheck,
}

/// Evaluates the partial sums of `(y_1, …, y_N)` by explicit iteration.
pub fn check_condition_ii(
    spec: &WeightSpec,
    eps: f64,
    delta: f64,
    steps: &[SeqVector],
    space: &SpaceNorm,
) -> Result<ConditionIiCheck> {
    check_eps_delta(eps, delta)?;
    if steps.is_empty() {
        return Err(Error::InvalidParameter("empty step sequence".into()));
    }
    let mut max_step_norm: f64 = 0.0;
    for y in steps {
        max_step_norm = max_step_norm.max(space.norm(y)?);
    }
    let mut max_partial_norm: f64 = 0.0;
    let mut worst_index = 0;
    let mut wrap_norm = 0.0;
    for j in 1..=steps.len() {
        let mut sum = SeqVector::zero();
        for i in 0..j {
            sum = sum.add(&iterate(spec, &steps[j - i - 1], i as i64));
        }
        let norm = space.norm(&sum)?;
        if norm > max_partial_norm {
            max_partial_norm = norm;
            worst_index = j;
        }
        if j == steps.len() {
            wrap_norm = norm;
        }
    }
    Ok(ConditionIiCheck {
        max_step_norm,
        wrap_norm,
        max_partial_norm,
        worst_index,
        violates: max_step_norm < delta && wrap_norm < delta && max_partial_norm >= eps,
    })
}

fn step_defects(spec: &WeightSpec, traj: &Pseudotrajectory) -> Vec<SeqVector> {
    traj.points
        .windows(2)
        .map(|p| p[1].sub(&apply_backward(spec, &p[0])))
        .collect()
}

/// Tries the ramp and then the bridge at a witness triple, both built with a
/// slightly smaller step bound so that their defects are strictly below `δ`.
/// The bridge peaks at a radius slightly above `ε` so that leaving the open
/// ball does not hinge on the last bit of a rounded sum.
pub fn psp_condition_ii_falsify(
    spec: &WeightSpec,
    eps: f64,
    delta: f64,
    window: (i64, i64),
    space: &SpaceNorm,
) -> Result<Option<ConditionIiViolation>> {
    check_eps_delta(eps, delta)?;
    check_window(window)?;
    let inner = delta * (1.0 - 2f64.powi(-8));

    let n = (eps / inner).floor() as u64 + 1;
    let ramp = gen_ramp(inner, n)?;
    let steps = step_defects(spec, &ramp);
    let check = check_condition_ii(spec, eps, delta, &steps, space)?;
    if check.violates {
        return Ok(Some(ConditionIiViolation {
            source: ViolationSource::Ramp { n, delta: inner },
            steps,
            check,
        }));
    }

    let outer = eps * (1.0 + 2f64.powi(-20));
    if let Evidence::Triple(w) = psp_triple_check(spec, outer, inner, window)?.evidence {
        let bridge = gen_sdelta_bridge(spec, outer, inner, w.k, w.l, w.m)?;
        let steps = step_defects(spec, &bridge);
        let check = check_condition_ii(spec, eps, delta, &steps, space)?;
        if check.violates {
            return Ok(Some(ConditionIiViolation {
                source: ViolationSource::Bridge {
                    k: w.k,
                    l: w.l,
                    m: w.m,
                    eps: outer,
                    delta: inner,
                },
                steps,
                check,
            }));
        }
    }
    Ok(None)
}
