//! Run diagnostics.
//!
//! The convergence statements these checks mirror are asymptotic; every
//! monitor here is a finite-run surrogate built from decile trends, and its
//! report says which surrogate was applied.

mod interpolate;
mod monitors;
mod wolfe;

use serde::{Deserialize, Serialize};

pub use interpolate::{interpolated_process, InterpolatedPath};
pub use monitors::{
    boundedness_monitor, lr_ratio_monitor, step_displacement_monitor, BoundednessMonitor, LrBranch,
    LrRatioMonitor, StepDisplacementMonitor, DIMINISHING_RATIO,
};
pub use wolfe::{min_norm_in_hull, MinNormPoint, MAX_MAJOR_CYCLES, WOLFE_TOL};

use crate::error::Result;
use crate::framework::StepTrace;
use crate::problems::{clarke_generators, FiniteSumProblem};
use crate::vector::ParamVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Informational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub name: String,
    /// `(step, value)` with strictly increasing steps.
    pub series: Vec<(u64, f64)>,
    pub verdict: Verdict,
    pub threshold: f64,
    /// The number compared against `threshold`.
    pub statistic: f64,
    pub note: String,
}

/// Per-step observer attached to a run.
pub trait Monitor {
    fn start(&mut self, _x0: &ParamVector) {}

    /// Called after every step with the new iterate.
    fn observe(&mut self, trace: &StepTrace, x_next: &ParamVector);

    fn report(&self) -> MonitorReport;
}

/// `dist(0, conv((1/N) Σ D_{f_i}(x)))`.
///
/// Fails with [`crate::Error::Unsupported`] for problems without generator
/// enumeration; there is no approximate fallback.
pub fn stationarity_measure(problem: &dyn FiniteSumProblem, x: &ParamVector) -> Result<f64> {
    let gens = clarke_generators(problem, x)?;
    Ok(min_norm_in_hull(&gens)?.norm)
}

/// Mean of the first and last `ceil(len / 10)` entries.
pub(crate) fn decile_means(values: &[f64]) -> (f64, f64) {
    let w = values.len().div_ceil(10).max(1);
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    (mean(&values[..w]), mean(&values[values.len() - w..]))
}
