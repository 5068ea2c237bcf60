use serde::{Deserialize, Serialize};

use super::{check_window, Evidence, Reason, Status, Verdict};
use crate::error::{Error, Result};
use crate::spaces::SeqVector;
use crate::weights::{RateClass, WeightSpec};

/// A truncated periodic point of `B_w` together with a bound on its defect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPoint {
    pub point: SeqVector,
    pub period: u64,
    /// Anchor index carrying the value 1.
    pub residue: i64,
    /// Bound on `‖B_w^period x − x‖`, valid in c0 and every ℓp.
    pub defect_bound: f64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn default_period(spec: &WeightSpec) -> u64 {
    let ql = spec.left_period().len() as u64;
    let qr = spec.right_period().len() as u64;
    ql / gcd(ql, qr) * qr
}

/// `B_w^k x = x` forces `x(n + k) = x(n) / (w(n+1)⋯w(n+k))`, so a nonzero
/// periodic point exists exactly when the forced values decay in both
/// directions: expansion on the right and contraction on the left.
pub fn periodic_point_exists(spec: &WeightSpec) -> Verdict {
    let rates = spec.rates();
    if rates.left_class() == RateClass::Contracting && rates.right_class() == RateClass::Expanding {
        Verdict::new(
            Status::Holds,
            Reason::DensePeriodic,
            Evidence::PeriodicPoint {
                residue: 0,
                period: default_period(spec),
            },
        )
    } else {
        Verdict::new(Status::Fails, Reason::TrivialPeriodic, Evidence::Rates(rates))
    }
}

/// Materializes the sequence forced by `B_w^period x = x` and `x(anchor) = 1`
/// on the residue class of `anchor` inside the window, whether or not it decays.
pub fn materialize_candidate(
    spec: &WeightSpec,
    window: (i64, i64),
    period: u64,
    anchor: i64,
) -> Result<SeqVector> {
    check_window(window)?;
    if period == 0 {
        return Err(Error::InvalidParameter("period must be ≥ 1".into()));
    }
    if !(window.0..=window.1).contains(&anchor) {
        return Err(Error::OutOfWindow {
            index: anchor,
            lo: window.0,
            hi: window.1,
        });
    }
    Ok(SeqVector::collect(class_indices(window, period, anchor).map(|i| (i, forced_value(spec, anchor, i)))))
}

fn class_indices(window: (i64, i64), period: u64, anchor: i64) -> impl Iterator<Item = i64> {
    let k = period as i64;
    let first = window.0 + (anchor - window.0).rem_euclid(k);
    (first..=window.1).step_by(period as usize)
}

fn forced_value(spec: &WeightSpec, anchor: i64, i: i64) -> f64 {
    if i >= anchor {
        spec.range_product(anchor + 1, i).recip().value()
    } else {
        spec.range_product(i + 1, anchor).value()
    }
}

/// Truncates the periodic point anchored at `clamp(0, lo, hi)` to the window.
///
/// The defect `B_w^k x − x` of the truncation lives on one period's worth of
/// indices at each end of the window: the last `k` retained values on the
/// right and the first `k` dropped values on the left. The bound is their ℓ1
/// norm plus a rounding allowance.
pub fn make_periodic_point(spec: &WeightSpec, window: (i64, i64)) -> Result<PeriodicPoint> {
    check_window(window)?;
    let verdict = periodic_point_exists(spec);
    let Evidence::PeriodicPoint { period, .. } = verdict.evidence else {
        return Err(Error::Precondition(
            "the shift has no nontrivial periodic point".into(),
        ));
    };
    let anchor = 0i64.clamp(window.0, window.1);
    let point = materialize_candidate(spec, window, period, anchor)?;
    let k = period as i64;
    let right_layer: f64 = point
        .iter()
        .filter(|&(i, _)| i > window.1 - k)
        .map(|(_, v)| v.abs())
        .sum();
    let left_layer: f64 = class_indices((window.0 - k, window.0 - 1), period, anchor)
        .map(|i| forced_value(spec, anchor, i).abs())
        .sum();
    let mass: f64 = point.iter().map(|(_, v)| v.abs()).sum();
    Ok(PeriodicPoint {
        point,
        period,
        residue: anchor,
        defect_bound: right_layer + left_layer + 1e-15 * mass,
    })
}
