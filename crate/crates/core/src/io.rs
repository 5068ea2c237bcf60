//! JSON documents for weight specs, vectors, Köthe matrices, trajectories and reports.

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spaces::{KoetheMatrix, SeqVector};
use crate::trajectories::Pseudotrajectory;
use crate::weights::WeightSpec;

fn parse<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        what: what.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn parse_spec(text: &str) -> Result<WeightSpec> {
    parse(text, "weight spec")
}

pub fn parse_vector(text: &str) -> Result<SeqVector> {
    parse(text, "vector")
}

pub fn parse_koethe(text: &str) -> Result<KoetheMatrix> {
    parse(text, "Köthe matrix")
}

/// Parses and re-validates a trajectory document.
pub fn parse_trajectory(text: &str) -> Result<Pseudotrajectory> {
    let t: Pseudotrajectory = parse(text, "trajectory")?;
    Pseudotrajectory::new(t.points, t.delta, t.space, t.periodic)
}

/// Pretty JSON with a trailing newline. `f64` values round-trip exactly.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}
