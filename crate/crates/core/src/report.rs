//! Property reports assembled from the decision procedures.

use serde::{Deserialize, Serialize};

use crate::criteria::{
    chain_recurrence_trivial, default_grid, gh_check, periodic_point_exists, psp_condition_ii_falsify, psp_search,
    shadowing_criterion, ute_classify, ConditionIiViolation, Evidence, Reason, Status, Verdict, DEFAULT_WINDOW,
};
use crate::error::{Error, Result};
use crate::spaces::SpaceNorm;
use crate::weights::{RateSummary, WeightSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOptions {
    pub window: (i64, i64),
    pub eps: f64,
    /// Grid `ε · 2^{-j}`, `j = 1..=grid_levels`.
    pub grid_levels: u32,
    /// Supplies a single δ instead of the grid when set.
    pub delta: Option<f64>,
    pub space: SpaceNorm,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            window: DEFAULT_WINDOW,
            eps: 1.0,
            grid_levels: 12,
            delta: None,
            space: SpaceNorm::Sup,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyEntry {
    pub property: String,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub spec: WeightSpec,
    pub options: AnalyzeOptions,
    pub rates: RateSummary,
    pub properties: Vec<PropertyEntry>,
    /// δ found by the triple search, if any.
    pub psp_delta: Option<f64>,
    /// Sequence falsifying the summation condition at the first grid δ, if one was found.
    pub condition_ii: Option<ConditionIiViolation>,
}

impl PropertyReport {
    pub fn get(&self, property: &str) -> Option<&Verdict> {
        self.properties.iter().find(|e| e.property == property).map(|e| &e.verdict)
    }
}

fn entry(property: &str, verdict: Verdict) -> PropertyEntry {
    PropertyEntry {
        property: property.to_string(),
        verdict,
    }
}

/// Runs every decision procedure on `spec`. Deterministic in its inputs.
pub fn analyze(spec: &WeightSpec, options: &AnalyzeOptions) -> Result<PropertyReport> {
    options.space.validate()?;
    if !options.space.is_unit_basis() {
        return Err(Error::InvalidParameter("analysis runs on c0 or ℓp".into()));
    }
    let grid = match options.delta {
        Some(d) => vec![d],
        None => {
            if options.grid_levels == 0 {
                return Err(Error::InvalidParameter("grid needs at least one level".into()));
            }
            default_grid(options.eps, options.grid_levels)
        }
    };

    let periodic = periodic_point_exists(spec);
    let shadowing = shadowing_criterion(spec);
    let chain = chain_recurrence_trivial(spec);
    let gh = gh_check(spec, spec.core_end() - 1);
    let psp = psp_search(spec, options.eps, options.window, &grid)?;
    let condition_ii = psp_condition_ii_falsify(spec, options.eps, grid[0], options.window, &options.space)?;
    let ute = ute_classify(spec, &options.space)?;

    let mut properties = vec![
        entry("periodic_points", periodic.clone()),
        entry("shadowing", shadowing.clone()),
        entry("chain_recurrence_trivial", chain.clone()),
        entry("generalized_hyperbolic", gh),
        entry("psp_c0_triples", psp.verdict),
        entry("uniform_topological_expansivity", ute.verdict),
    ];
    if let SpaceNorm::Lp { .. } = options.space {
        // Sandwich bounds only: iA/iB give PSP, nontrivial CR rules it out.
        let rates = spec.rates();
        let lp = if matches!(shadowing.reason, Reason::IA | Reason::IB) {
            Verdict::new(Status::Holds, shadowing.reason, Evidence::Rates(rates))
        } else if chain.fails() {
            Verdict::new(Status::Fails, Reason::SeriesDiverge, Evidence::Rates(rates))
        } else if periodic.holds() {
            Verdict::new(Status::Unknown, Reason::ConditionCOutOfScope, Evidence::Rates(rates))
        } else {
            Verdict::new(Status::Unknown, Reason::WindowLimited, Evidence::Rates(rates))
        };
        properties.push(entry("psp_lp_sandwich", lp));
    }
    Ok(PropertyReport {
        spec: spec.clone(),
        options: options.clone(),
        rates: spec.rates(),
        properties,
        psp_delta: psp.delta,
        condition_ii,
    })
}
