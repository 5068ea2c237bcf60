//! Dynamics of bilateral weighted shifts on c0, ℓp and Köthe sequence spaces:
//! exact weight products, decision procedures with checkable evidence,
//! explicit pseudotrajectories and an exact finite shadowing solver.

pub mod criteria;
pub mod error;
pub mod io;
pub mod report;
pub mod repro;
pub mod solver;
pub mod spaces;
pub mod trajectories;
pub mod weights;

pub use error::{Error, Result};
pub use spaces::{basis, KoetheMatrix, SeqVector, SpaceNorm};
pub use trajectories::Pseudotrajectory;
pub use weights::{RateSummary, WeightProduct, WeightSpec};
