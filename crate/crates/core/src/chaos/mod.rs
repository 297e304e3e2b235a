//! Probes for sensitive dependence, divergence statistics and transitivity.
//!
//! Everything here is finite-horizon evidence. The quantities in the
//! definitions are asymptotic, so the reports name their proxies.

mod attraction;
mod coverage;
mod divergence;

pub use attraction::{
    lsys_transitivity_probe, mutual_attraction_check, AttractionReport, LsysProbeReport, PairAttraction,
    SampleFailure,
};
pub use coverage::{transitivity_mod_r, CoverageReport};
pub use divergence::{divergence_probe, DivergenceOptions, DivergencePoint, DivergenceReport, GrowthTrend};

use thiserror::Error;

use crate::engine::EngineError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChaosError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{0}")]
    InvalidArgument(String),
}
