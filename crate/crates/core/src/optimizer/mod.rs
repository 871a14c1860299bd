//! Multi-objective Tree-structured Parzen Estimator and Pareto bookkeeping.

pub mod pareto;
pub mod parzen;
mod study;

use serde::{Deserialize, Serialize};

pub use pareto::{crowding_distance, dominates, hypervolume, nondominated_sort};
pub use study::{DesignStudy, ParetoArchive, SamplerConfig, Study, Trial};

/// One dimension of a flat parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ParamSpec {
    Continuous { lo: f64, hi: f64 },
    /// Values are category indices `0..n` stored as floats.
    Categorical { n: usize },
}
