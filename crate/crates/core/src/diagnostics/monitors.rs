use serde::{Deserialize, Serialize};

use super::{decile_means, Monitor, MonitorReport, Verdict};
use crate::framework::StepTrace;
use crate::vector::ParamVector;

/// The η series counts as diminishing when its final-decile mean is below
/// this fraction of its mean over the decile starting at mid-run.
pub const DIMINISHING_RATIO: f64 = 0.95;

/// Sliding-window displacement `s_k = max_{k≤j≤k+N} ‖x_j − x_k‖`.
///
/// Pass when the final-decile mean is at most `threshold`, fail otherwise.
/// A run shorter than `2N` steps is informational.
pub fn step_displacement_monitor(
    xs: &[ParamVector],
    window: usize,
    threshold: f64,
) -> MonitorReport {
    let name = "step_displacement".to_string();
    let steps = xs.len().saturating_sub(1);
    if window == 0 || steps < 2 * window {
        return MonitorReport {
            name,
            series: Vec::new(),
            verdict: Verdict::Informational,
            threshold,
            statistic: f64::NAN,
            note: format!("run of {steps} steps is shorter than twice the window {window}"),
        };
    }
    let series: Vec<(u64, f64)> = (0..=steps - window)
        .map(|k| {
            let s = xs[k + 1..=k + window]
                .iter()
                .map(|xj| xj.distance(&xs[k]).unwrap_or(f64::INFINITY))
                .fold(0.0, f64::max);
            (k as u64, s)
        })
        .collect();
    let values: Vec<f64> = series.iter().map(|&(_, v)| v).collect();
    let (first, last) = decile_means(&values);
    let verdict = if values.iter().any(|v| !v.is_finite()) {
        Verdict::Fail
    } else if last <= threshold {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    MonitorReport {
        name,
        series,
        verdict,
        threshold,
        statistic: last,
        note: format!("window {window}; first-decile mean {first:e}, final-decile mean {last:e}"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LrBranch {
    /// η appears to tend to zero.
    Diminishing,
    /// η appears bounded away from zero.
    BoundedBelow,
}

/// Ratios `r_k = η_{k+1} / η_k` over consecutive traces, and a classifier
/// for which branch of the η dichotomy the run appears to be in.
///
/// In the diminishing branch the verdict is pass/fail on the final-decile
/// `max |r_k − 1| ≤ tolerance`; in the bounded branch it is informational.
/// The classification is a heuristic over a finite run.
pub fn lr_ratio_monitor(traces: &[StepTrace], tolerance: f64) -> MonitorReport {
    let name = "lr_ratio".to_string();
    let series: Vec<(u64, f64)> = traces
        .windows(2)
        .map(|w| (w[0].k, w[1].eta / w[0].eta))
        .collect();
    if series.is_empty() {
        return MonitorReport {
            name,
            series,
            verdict: Verdict::Informational,
            threshold: tolerance,
            statistic: f64::NAN,
            note: "fewer than two steps".into(),
        };
    }
    let branch = classify_branch(traces);
    let w = series.len().div_ceil(10);
    let worst = series[series.len() - w..]
        .iter()
        .map(|&(_, r)| (r - 1.0).abs())
        .fold(0.0, f64::max);
    let verdict = match branch {
        LrBranch::Diminishing if worst <= tolerance => Verdict::Pass,
        LrBranch::Diminishing => Verdict::Fail,
        LrBranch::BoundedBelow => Verdict::Informational,
    };
    let branch_name = match branch {
        LrBranch::Diminishing => "diminishing",
        LrBranch::BoundedBelow => "bounded_below",
    };
    MonitorReport {
        name,
        series,
        verdict,
        threshold: tolerance,
        statistic: worst,
        note: format!("branch {branch_name}; final-decile max |r-1| = {worst:e}"),
    }
}

pub(crate) fn classify_branch(traces: &[StepTrace]) -> LrBranch {
    let etas: Vec<f64> = traces.iter().map(|t| t.eta).collect();
    let w = etas.len().div_ceil(10).max(1);
    let mid = etas.len() / 2;
    let mid_end = (mid + w).min(etas.len());
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let mid_mean = mean(&etas[mid..mid_end]);
    let (_, last_mean) = decile_means(&etas);
    if last_mean < DIMINISHING_RATIO * mid_mean {
        LrBranch::Diminishing
    } else {
        LrBranch::BoundedBelow
    }
}

/// Pass when every iterate is finite with `‖x_k‖ ≤ radius`.
pub fn boundedness_monitor(xs: &[ParamVector], radius: f64) -> MonitorReport {
    boundedness_from_norms(
        xs.iter()
            .map(ParamVector::norm2)
            .enumerate()
            .map(|(k, n)| (k as u64, n))
            .collect(),
        radius,
    )
}

fn boundedness_from_norms(series: Vec<(u64, f64)>, radius: f64) -> MonitorReport {
    let max = series.iter().map(|&(_, n)| n).fold(0.0, f64::max);
    let finite = series.iter().all(|&(_, n)| n.is_finite());
    let verdict = if finite && max <= radius {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    MonitorReport {
        name: "boundedness".into(),
        series,
        verdict,
        threshold: radius,
        statistic: if finite { max } else { f64::INFINITY },
        note: format!("max ‖x_k‖ = {max:e} against radius {radius:e}"),
    }
}

#[derive(Clone, Debug)]
pub struct StepDisplacementMonitor {
    window: usize,
    threshold: f64,
    xs: Vec<ParamVector>,
}

impl StepDisplacementMonitor {
    pub fn new(window: usize, threshold: f64) -> Self {
        Self {
            window,
            threshold,
            xs: Vec::new(),
        }
    }
}

impl Monitor for StepDisplacementMonitor {
    fn start(&mut self, x0: &ParamVector) {
        self.xs.clear();
        self.xs.push(x0.clone());
    }

    fn observe(&mut self, _trace: &StepTrace, x_next: &ParamVector) {
        self.xs.push(x_next.clone());
    }

    fn report(&self) -> MonitorReport {
        step_displacement_monitor(&self.xs, self.window, self.threshold)
    }
}

#[derive(Clone, Debug)]
pub struct LrRatioMonitor {
    tolerance: f64,
    traces: Vec<StepTrace>,
}

impl LrRatioMonitor {
    pub fn new(tolerance: f64) -> Self {
        Self {
            tolerance,
            traces: Vec::new(),
        }
    }
}

impl Monitor for LrRatioMonitor {
    fn start(&mut self, _x0: &ParamVector) {
        self.traces.clear();
    }

    fn observe(&mut self, trace: &StepTrace, _x_next: &ParamVector) {
        self.traces.push(trace.clone());
    }

    fn report(&self) -> MonitorReport {
        lr_ratio_monitor(&self.traces, self.tolerance)
    }
}

#[derive(Clone, Debug)]
pub struct BoundednessMonitor {
    radius: f64,
    norms: Vec<(u64, f64)>,
}

impl BoundednessMonitor {
    pub fn new(radius: f64) -> Self {
        Self {
            radius,
            norms: Vec::new(),
        }
    }
}

impl Monitor for BoundednessMonitor {
    fn start(&mut self, x0: &ParamVector) {
        self.norms.clear();
        self.norms.push((0, x0.norm2()));
    }

    fn observe(&mut self, trace: &StepTrace, x_next: &ParamVector) {
        self.norms.push((trace.k + 1, x_next.norm2()));
    }

    fn report(&self) -> MonitorReport {
        boundedness_from_norms(self.norms.clone(), self.radius)
    }
}
