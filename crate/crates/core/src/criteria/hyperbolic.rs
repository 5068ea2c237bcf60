use serde::{Deserialize, Serialize};

use super::{check_window, periodic_point_exists, Evidence, Reason, Status, Verdict, DEFAULT_N_MAX, DEFAULT_WINDOW};
use crate::error::Result;
use crate::weights::{RateClass, WeightProduct, WeightSpec};

/// Splitting `X = M ⊕ N` with `M = span{e_n : n ≤ s}` and `N = span{e_n : n > s}`.
///
/// `‖B^n y‖ ≤ c tⁿ ‖y‖` on `M` and `‖B^{-n} y‖ ≤ c tⁿ ‖y‖` on `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhSplit {
    pub split_index: i64,
    pub c: f64,
    pub t: f64,
    pub c_contract: f64,
    pub c_expand: f64,
    /// Largest `ln(‖B^{±n} e_i‖ / (c tⁿ))` seen by the window sweep; ≤ 0 when the pair is valid.
    pub worst_log_excess: f64,
    pub validated: bool,
}

/// Partial sums of `Σ 1/|w(−n+1)⋯w(0)|` and `Σ |w(1)⋯w(n)|` for `n = 1..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesEvidence {
    pub left_partial_sums: Vec<f64>,
    pub right_partial_sums: Vec<f64>,
}

const SERIES_TERMS: usize = 64;
const SWEEP_TOLERANCE: f64 = 1e-9;

pub fn gh_check(spec: &WeightSpec, s: i64) -> Verdict {
    gh_check_on(spec, s, DEFAULT_WINDOW, DEFAULT_N_MAX).unwrap_or_else(|_| unreachable!("default window is valid"))
}

/// Decides generalized hyperbolicity for the split at `s`, then checks the
/// constants on basis vectors indexed by `window` for `n ≤ n_max`.
pub fn gh_check_on(spec: &WeightSpec, s: i64, window: (i64, i64), n_max: usize) -> Result<Verdict> {
    check_window(window)?;
    let rates = spec.rates();
    if rates.left_class() != RateClass::Contracting || rates.right_class() != RateClass::Expanding {
        return Ok(Verdict::new(Status::Fails, Reason::RateTest, Evidence::Rates(rates)));
    }
    let t = rates.r_left.max(1.0 / rates.r_right);
    let ln_t = t.ln();
    let (Some(up), Some(down)) = (
        spec.window_sup(1.0, ln_t, None, Some(s), 0),
        spec.window_sup(-1.0, ln_t, Some(s + 2), None, 0),
    ) else {
        return Ok(Verdict::new(Status::Fails, Reason::RateTest, Evidence::Rates(rates)));
    };
    let c_contract = up.exp();
    let c_expand = down.exp();
    let c = c_contract.max(c_expand).max(1.0);
    let worst = sweep(spec, s, window, n_max, c.ln(), ln_t);
    let split = GhSplit {
        split_index: s,
        c,
        t,
        c_contract,
        c_expand,
        worst_log_excess: worst,
        validated: worst <= SWEEP_TOLERANCE,
    };
    let status = if split.validated { Status::Holds } else { Status::Unknown };
    let reason = if split.validated { Reason::Gh } else { Reason::WindowLimited };
    Ok(Verdict::new(status, reason, Evidence::GhSplit(split)))
}

// max over i in window and 1 ≤ n ≤ n_max of ln‖B^{±n} e_i‖ − ln c − n ln t.
fn sweep(spec: &WeightSpec, s: i64, window: (i64, i64), n_max: usize, ln_c: f64, ln_t: f64) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for i in window.0..=window.1 {
        let mut p = WeightProduct::ONE;
        for n in 1..=n_max as i64 {
            let ln_norm = if i <= s {
                p = p.mul_scalar(spec.weight_at(i - n + 1));
                p.ln_abs()
            } else {
                p = p.mul_scalar(spec.weight_at(i + n));
                -p.ln_abs()
            };
            worst = worst.max(ln_norm - ln_c - n as f64 * ln_t);
        }
    }
    worst
}

/// Sufficient rules for the shadowing property: uniform contraction (iA),
/// uniform expansion (iB), or generalized hyperbolicity.
pub fn shadowing_criterion(spec: &WeightSpec) -> Verdict {
    let rates = spec.rates();
    let (l, r) = (rates.left_class(), rates.right_class());
    if l == RateClass::Contracting && r == RateClass::Contracting {
        return Verdict::new(Status::Holds, Reason::IA, Evidence::Rates(rates));
    }
    if l == RateClass::Expanding && r == RateClass::Expanding {
        return Verdict::new(Status::Holds, Reason::IB, Evidence::Rates(rates));
    }
    let gh = gh_check(spec, spec.core_end() - 1);
    if gh.holds() {
        return gh;
    }
    if periodic_point_exists(spec).holds() {
        return Verdict::new(Status::Unknown, Reason::ConditionCOutOfScope, Evidence::Rates(rates));
    }
    Verdict::new(Status::Fails, Reason::Sandwich, Evidence::Rates(rates))
}

/// `CR(B_w) = {0}` via summability of inverse products on the left (iiiA) or
/// of products on the right (iiiB).
pub fn chain_recurrence_trivial(spec: &WeightSpec) -> Verdict {
    let rates = spec.rates();
    let mut left = Vec::with_capacity(SERIES_TERMS);
    let mut right = Vec::with_capacity(SERIES_TERMS);
    let (mut pl, mut pr) = (WeightProduct::ONE, WeightProduct::ONE);
    let (mut sl, mut sr) = (0.0, 0.0);
    for n in 1..=SERIES_TERMS as i64 {
        pl = pl.mul_scalar(spec.weight_at(-n + 1));
        pr = pr.mul_scalar(spec.weight_at(n));
        sl += pl.abs().recip().value();
        sr += pr.abs().value();
        left.push(sl);
        right.push(sr);
    }
    let evidence = Evidence::Series(SeriesEvidence {
        left_partial_sums: left,
        right_partial_sums: right,
    });
    if rates.left_class() == RateClass::Expanding {
        Verdict::new(Status::Holds, Reason::IIIA, evidence)
    } else if rates.right_class() == RateClass::Contracting {
        Verdict::new(Status::Holds, Reason::IIIB, evidence)
    } else {
        Verdict::new(Status::Fails, Reason::SeriesDiverge, evidence)
    }
}
