//! Decision procedures for dynamical properties of the backward shift `B_w`
//! (and, for expansivity, the forward shift `F_w`).
//!
//! Every procedure returns a [`Verdict`] whose evidence can be rechecked from
//! the weight spec alone. Conditions quantified over all of ℤ are decided
//! exactly from the period rates where eventual periodicity allows it;
//! everything else is certified on a finite window and then reported as
//! [`Status::Unknown`] with [`Reason::WindowLimited`], never as holds.

mod hyperbolic;
mod periodic;
mod psp;
mod ute;

use serde::{Deserialize, Serialize};

use crate::weights::RateSummary;

pub use hyperbolic::{chain_recurrence_trivial, gh_check, gh_check_on, shadowing_criterion, GhSplit, SeriesEvidence};
pub use periodic::{materialize_candidate, make_periodic_point, periodic_point_exists, PeriodicPoint};
pub use psp::{
    check_condition_ii, default_grid, psp_condition_ii_falsify, psp_quantities, psp_search,
    psp_triple_check, ConditionIiCheck, ConditionIiViolation, PspSearch, TripleWitness, ViolationSource,
};
pub use ute::{
    koethe_ute_check, ute_classify, ute_numeric_check, Decomposition, EnvelopeReport, Schedule, Side,
    UteClassification,
};

/// Default window `[-64, 64]` for window-certified checks.
pub const DEFAULT_WINDOW: (i64, i64) = (-64, 64);
/// Default horizon for envelope sweeps.
pub const DEFAULT_N_MAX: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    Unknown,
}

/// The rule that produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    /// Uniform contraction on both sides.
    #[serde(rename = "iA")]
    IA,
    /// Uniform expansion on both sides.
    #[serde(rename = "iB")]
    IB,
    /// Summable inverse products on the left.
    #[serde(rename = "iiiA")]
    IIIA,
    /// Summable products on the right.
    #[serde(rename = "iiiB")]
    IIIB,
    /// Generalized hyperbolic splitting.
    Gh,
    /// Nontrivial, hence dense, periodic points.
    DensePeriodic,
    /// Only the zero periodic point.
    TrivialPeriodic,
    /// Decided from the side rates.
    RateTest,
    /// Both chain-recurrence series diverge.
    SeriesDiverge,
    /// No periodic points and neither uniform rule applies, so shadowing fails.
    Sandwich,
    /// A triple `k ≤ l ≤ m` violates both alternatives.
    TripleWitness,
    /// Uniform divergence certified by an envelope.
    Envelope,
    /// Only a finite window was examined.
    WindowLimited,
    /// Dense periodic points and no sufficient rule fired.
    ConditionCOutOfScope,
}

/// Machine-checkable payload attached to a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Evidence {
    None,
    Rates(RateSummary),
    PeriodicPoint { residue: i64, period: u64 },
    GhSplit(GhSplit),
    Series(SeriesEvidence),
    Triple(TripleWitness),
    TripleSearch { per_delta: Vec<(f64, Option<TripleWitness>)> },
    Window { lo: i64, hi: i64, triples_checked: u64 },
    Decomposition(Decomposition),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub reason: Reason,
    pub evidence: Evidence,
}

impl Verdict {
    pub fn new(status: Status, reason: Reason, evidence: Evidence) -> Self {
        debug_assert!(
            status != Status::Unknown
                || matches!(reason, Reason::WindowLimited | Reason::ConditionCOutOfScope)
        );
        Verdict {
            status,
            reason,
            evidence,
        }
    }

    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn fails(&self) -> bool {
        self.status == Status::Fails
    }
}

pub(crate) fn check_window(window: (i64, i64)) -> crate::Result<()> {
    if window.0 > window.1 {
        return Err(crate::Error::InvalidParameter(format!(
            "empty window [{}, {}]",
            window.0, window.1
        )));
    }
    Ok(())
}
