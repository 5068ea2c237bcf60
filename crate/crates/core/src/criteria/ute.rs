//! Uniform topological expansivity of the forward shift `F_w e_i = w_i e_{i+1}`,
//! for which `‖F^n e_i‖ = |w_i ⋯ w_{i+n−1}|` and `‖F^{−n} e_i‖ = 1/|w_{i−n} ⋯ w_{i−1}|`.

use serde::{Deserialize, Serialize};

use super::{check_window, Evidence, Reason, Status, Verdict, DEFAULT_N_MAX, DEFAULT_WINDOW};
use crate::error::{Error, Result};
use crate::spaces::{KoetheMatrix, SpaceNorm};
use crate::weights::{RateClass, WeightProduct, WeightSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

/// `I_+ ∪ I_− = ℤ`. A threshold puts `i ≤ t_minus` in `I_−`, `i ≥ t_plus` in
/// `I_+` and assigns the gap `t_minus < i < t_plus` explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decomposition {
    AllPlus,
    AllMinus,
    Threshold { t_minus: i64, t_plus: i64, gap: Vec<Side> },
}

impl Decomposition {
    /// `I_− = (−∞, at]`, `I_+ = [at + 1, ∞)`.
    pub fn split(at: i64) -> Self {
        Decomposition::Threshold {
            t_minus: at,
            t_plus: at + 1,
            gap: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Decomposition::Threshold { t_minus, t_plus, gap } = self {
            if t_plus <= t_minus || (t_plus - t_minus - 1) as usize != gap.len() {
                return Err(Error::InvalidParameter(format!(
                    "threshold ({t_minus}, {t_plus}) needs {} gap entries, got {}",
                    (t_plus - t_minus - 1).max(0),
                    gap.len()
                )));
            }
        }
        Ok(())
    }

    pub fn side_of(&self, i: i64) -> Side {
        match self {
            Decomposition::AllPlus => Side::Plus,
            Decomposition::AllMinus => Side::Minus,
            Decomposition::Threshold { t_minus, t_plus, gap } => {
                if i <= *t_minus {
                    Side::Minus
                } else if i >= *t_plus {
                    Side::Plus
                } else {
                    gap[(i - t_minus - 1) as usize]
                }
            }
        }
    }
}

/// Lower envelope that `‖F^{±n} e_i‖` must exceed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    /// `c · ρⁿ`
    Geometric { c: f64, rho: f64 },
    /// `c · n^power`
    Polynomial { c: f64, power: f64 },
}

impl Schedule {
    pub fn ln_value(&self, n: usize) -> f64 {
        match *self {
            Schedule::Geometric { c, rho } => c.ln() + n as f64 * rho.ln(),
            Schedule::Polynomial { c, power } => c.ln() + power * (n as f64).ln(),
        }
    }

    fn validate(&self) -> Result<()> {
        let (c, x) = match *self {
            Schedule::Geometric { c, rho } => (c, rho),
            Schedule::Polynomial { c, power } => (c, power),
        };
        if c > 0.0 && c.is_finite() && x.is_finite() && x > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid schedule {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub pass: bool,
    /// Index and horizon minimizing `ln‖F^{±n} e_i‖ − ln schedule(n)`.
    pub worst_index: Option<i64>,
    pub worst_n: Option<usize>,
    pub worst_margin: Option<f64>,
    /// `min_{i ∈ I_+ ∩ window} ‖F^n e_i‖` for `n = 1..=n_max`; `None` when `I_+` misses the window.
    pub envelope_plus: Vec<Option<f64>>,
    pub envelope_minus: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UteClassification {
    pub verdict: Verdict,
    pub schedule: Option<Schedule>,
    pub envelope: Option<EnvelopeReport>,
}

// For index i, side and horizon n: Some((value, ln value)) or None to skip the index.
type Scale<'a> = dyn Fn(i64, Side, usize) -> Result<Option<f64>> + 'a;

fn envelope(
    spec: &WeightSpec,
    decomposition: &Decomposition,
    window: (i64, i64),
    n_max: usize,
    schedule: &Schedule,
    scale: &Scale<'_>,
) -> Result<EnvelopeReport> {
    check_window(window)?;
    decomposition.validate()?;
    schedule.validate()?;
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be ≥ 1".into()));
    }
    let mut plus = vec![None; n_max];
    let mut minus = vec![None; n_max];
    let mut worst: Option<(f64, i64, usize)> = None;
    for i in window.0..=window.1 {
        let side = decomposition.side_of(i);
        let mut p = WeightProduct::ONE;
        for n in 1..=n_max {
            let ni = n as i64;
            let Some(factor) = scale(i, side, n)? else { break };
            let (value, ln_value) = match side {
                Side::Plus => {
                    p = p.mul_scalar(spec.weight_at(i + ni - 1));
                    (p.abs().scale(factor), p.ln_abs() + factor.ln())
                }
                Side::Minus => {
                    p = p.mul_scalar(spec.weight_at(i - ni));
                    (p.abs().recip().scale(factor), -p.ln_abs() + factor.ln())
                }
            };
            let slot = match side {
                Side::Plus => &mut plus[n - 1],
                Side::Minus => &mut minus[n - 1],
            };
            *slot = Some(slot.map_or(value, |v: f64| v.min(value)));
            let margin = ln_value - schedule.ln_value(n);
            if worst.is_none_or(|(w, _, _)| margin < w) {
                worst = Some((margin, i, n));
            }
        }
    }
    Ok(EnvelopeReport {
        pass: worst.is_none_or(|(w, _, _)| w > 0.0),
        worst_index: worst.map(|w| w.1),
        worst_n: worst.map(|w| w.2),
        worst_margin: worst.map(|w| w.0),
        envelope_plus: plus,
        envelope_minus: minus,
    })
}

/// Checks `‖F^n e_i‖ > schedule(n)` on `I_+ ∩ window` and
/// `‖F^{−n} e_i‖ > schedule(n)` on `I_− ∩ window` for `1 ≤ n ≤ n_max`.
pub fn ute_numeric_check(
    spec: &WeightSpec,
    decomposition: &Decomposition,
    window: (i64, i64),
    n_max: usize,
    schedule: &Schedule,
) -> Result<EnvelopeReport> {
    envelope(spec, decomposition, window, n_max, schedule, &|_, _, _| Ok(Some(1.0)))
}

/// The Köthe version: `|w_i ⋯ w_{i+n−1}| a_{i+n,l} / a_{i,k}` on `I_+` and
/// `a_{i−n,l} / (|w_{i−n} ⋯ w_{i−1}| a_{i,k})` on `I_−`. Indices with
/// `a_{i,k} = 0` are excluded.
#[allow(clippy::too_many_arguments)]
pub fn koethe_ute_check(
    matrix: &KoetheMatrix,
    spec: &WeightSpec,
    k: usize,
    l: usize,
    decomposition: &Decomposition,
    window: (i64, i64),
    n_max: usize,
    schedule: &Schedule,
) -> Result<EnvelopeReport> {
    for level in [k, l] {
        if level == 0 || level > matrix.levels() {
            return Err(Error::InvalidParameter(format!("Köthe level {level} out of range")));
        }
    }
    envelope(spec, decomposition, window, n_max, schedule, &|i, side, n| {
        let base = matrix.get(i, k)?;
        if base == 0.0 {
            return Ok(None);
        }
        let target = match side {
            Side::Plus => i + n as i64,
            Side::Minus => i - n as i64,
        };
        Ok(Some(matrix.get(target, l)? / base))
    })
}

/// Decides uniform topological expansivity on c0 or ℓp from the side rates and
/// cross-validates every positive verdict with an envelope on the default window.
pub fn ute_classify(spec: &WeightSpec, space: &SpaceNorm) -> Result<UteClassification> {
    space.validate()?;
    if !space.is_unit_basis() {
        return Err(Error::InvalidParameter(
            "rate classification applies to c0 and ℓp only; use koethe_ute_check".into(),
        ));
    }
    let rates = spec.rates();
    let s = spec.core_end() - 1;
    let (decomposition, rho_eff) = match (rates.left_class(), rates.right_class()) {
        (RateClass::Expanding, RateClass::Expanding) => (Decomposition::AllPlus, rates.r_left.min(rates.r_right)),
        (RateClass::Contracting, RateClass::Contracting) => {
            (Decomposition::AllMinus, (1.0 / rates.r_left).min(1.0 / rates.r_right))
        }
        (RateClass::Contracting, RateClass::Expanding) => (Decomposition::split(s), rates.r_right.min(1.0 / rates.r_left)),
        _ => {
            return Ok(UteClassification {
                verdict: Verdict::new(Status::Fails, Reason::RateTest, Evidence::Rates(rates)),
                schedule: None,
                envelope: None,
            })
        }
    };
    let rho = rho_eff.sqrt();
    let ln_rho = rho.ln();
    // inf over the relevant windows of ln‖F^{±n} e_i‖ − n ln ρ.
    let sup = |sign: f64, a: Option<i64>, b: Option<i64>| spec.window_sup(sign, -ln_rho, a, b, 1);
    let c_low = match &decomposition {
        Decomposition::AllPlus => sup(-1.0, None, None).map(|v| -v),
        Decomposition::AllMinus => sup(1.0, None, None).map(|v| -v),
        Decomposition::Threshold { .. } => {
            match (sup(-1.0, Some(s + 1), None), sup(1.0, None, Some(s - 1))) {
                (Some(p), Some(m)) => Some((-p).min(-m)),
                _ => None,
            }
        }
    };
    let Some(c_low) = c_low else {
        unreachable!("drift is negative at ρ = sqrt(ρ_eff)")
    };
    let schedule = Schedule::Geometric {
        c: c_low.exp() / 2.0,
        rho,
    };
    let report = ute_numeric_check(spec, &decomposition, DEFAULT_WINDOW, DEFAULT_N_MAX, &schedule)?;
    let verdict = if report.pass {
        Verdict::new(Status::Holds, Reason::RateTest, Evidence::Decomposition(decomposition))
    } else {
        Verdict::new(Status::Unknown, Reason::WindowLimited, Evidence::Decomposition(decomposition))
    };
    Ok(UteClassification {
        verdict,
        schedule: Some(schedule),
        envelope: Some(report),
    })
}
