//! Single seeded runs and their artifacts.
//!
//! A run directory holds `manifest.json`, `trace.csv`, `summary.json` and
//! `monitors.json`. All four are pure functions of the configuration; the
//! wall-clock time lives only on the in-memory [`RunRecord`].

use std::fs;
use std::path::Path;
use std::time::Instant;

use lfsgd::diagnostics::{
    BoundednessMonitor, LrRatioMonitor, Monitor, MonitorReport, StepDisplacementMonitor, Verdict,
};
use lfsgd::framework::EpochSummary;
use lfsgd::problems::full_value;
use lfsgd::{
    run_epochs, FiniteSumProblem, IndexSchedule, OptimizerState, ParamVector, RunOptions,
    ScalingRule, StepTrace,
};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::HarnessError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// The configuration with every default filled in, plus derived quantities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config: RunConfig,
    pub rule: ScalingRule,
    pub problem_name: String,
    pub dim: usize,
    pub num_components: usize,
    pub sampler_seed: u64,
    pub batch: usize,
    pub steps_per_epoch: usize,
    pub x0: ParamVector,
    pub f_x0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub epochs: Vec<EpochSummary>,
    pub total_steps: u64,
    pub final_f: f64,
    pub final_x: ParamVector,
    pub max_dist: f64,
    pub final_denom: f64,
    pub sup_g_plus_m: f64,
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub manifest: Manifest,
    pub steps: Vec<StepTrace>,
    pub summary: RunSummary,
    pub monitors: Vec<MonitorReport>,
    pub wall_clock_ms: u128,
}

impl RunRecord {
    pub fn final_f(&self) -> f64 {
        self.summary.final_f
    }

    pub fn failed_monitor(&self) -> Option<&MonitorReport> {
        self.monitors.iter().find(|m| m.verdict == Verdict::Fail)
    }
}

/// Row of `trace.csv`.
#[derive(Debug, Serialize)]
struct TraceRow {
    k: u64,
    epoch: u64,
    i_k: Option<usize>,
    f_component: f64,
    f_full: Option<f64>,
    eta: f64,
    mu: f64,
    denom: f64,
    g_norm: f64,
    m_norm: f64,
    step_norm: f64,
}

fn build_monitors(
    config: &RunConfig,
    problem: &dyn FiniteSumProblem,
    f_x0: f64,
    steps_per_epoch: usize,
) -> Result<Vec<Box<dyn Monitor>>, HarnessError> {
    let s = &config.monitor_settings;
    config
        .monitors
        .iter()
        .map(|name| -> Result<Box<dyn Monitor>, HarnessError> {
            Ok(match name.as_str() {
                "step_displacement" => Box::new(StepDisplacementMonitor::new(
                    s.displacement_window.unwrap_or(steps_per_epoch),
                    s.displacement_threshold,
                )),
                "lr_ratio" => Box::new(LrRatioMonitor::new(s.lr_ratio_tolerance)),
                "boundedness" => {
                    let level = s.level_multiplier * f_x0;
                    let radius = problem.level_set_radius(level).ok_or_else(|| {
                        HarnessError::config(
                            "monitors",
                            format!("problem `{}` has no level-set radius", problem.name()),
                        )
                    })?;
                    Box::new(BoundednessMonitor::new(radius))
                }
                other => {
                    return Err(HarnessError::config(
                        "monitors",
                        format!("unknown monitor `{other}`"),
                    ))
                }
            })
        })
        .collect()
}

/// Runs `config` in memory.
pub fn execute(config: &RunConfig) -> Result<RunRecord, HarnessError> {
    config.validate()?;
    let started = Instant::now();
    let problem = config.problem.build()?;
    let x0 = config
        .problem
        .initial_point(problem.as_ref(), config.seed)?;
    let rule = config.optimizer.resolve(&x0)?;
    let mut schedule =
        IndexSchedule::from_config(&config.sampler, problem.num_components(), config.seed)?;
    let full_gradient = config.optimizer.full_gradient;
    let steps_per_epoch = if full_gradient {
        1
    } else {
        schedule.groups_per_epoch()
    };
    let f_x0 = full_value(problem.as_ref(), &x0)?;

    let mut resolved = config.clone();
    resolved.optimizer.r_eps = Some(rule.r_eps);
    resolved.optimizer.beta = rule.beta;
    resolved.sampler.seed = Some(config.sampler.seed.unwrap_or(config.seed));
    let manifest = Manifest {
        version: VERSION.to_string(),
        config: resolved,
        rule: rule.clone(),
        problem_name: problem.name().to_string(),
        dim: problem.dim(),
        num_components: problem.num_components(),
        sampler_seed: config.sampler.seed.unwrap_or(config.seed),
        batch: schedule.batch(),
        steps_per_epoch,
        x0: x0.clone(),
        f_x0,
    };

    let mut monitors = build_monitors(config, problem.as_ref(), f_x0, steps_per_epoch)?;
    let mut state = OptimizerState::new(x0, &rule);
    let options = RunOptions {
        record_every: config.record_every,
        keep_iterates: false,
        full_gradient,
    };
    let trace = {
        let mut monitor_refs: Vec<&mut dyn Monitor> = monitors
            .iter_mut()
            .map(|m| &mut **m as &mut dyn Monitor)
            .collect();
        run_epochs(
            &mut state,
            &rule,
            problem.as_ref(),
            &mut schedule,
            config.epochs,
            &mut monitor_refs,
            &options,
        )?
    };
    let reports = monitors.iter().map(|m| m.report()).collect();
    let final_f = trace.epochs.last().map(|e| e.final_f).unwrap_or(f_x0);

    Ok(RunRecord {
        manifest,
        steps: trace.steps,
        summary: RunSummary {
            epochs: trace.epochs,
            total_steps: trace.total_steps,
            final_f,
            final_x: state.x,
            max_dist: state.max_dist,
            final_denom: state.denom,
            sup_g_plus_m: trace.sup_g_plus_m,
        },
        monitors: reports,
        wall_clock_ms: started.elapsed().as_millis(),
    })
}

/// Writes the four run artifacts into `dir`, creating it if needed.
pub fn write_record(record: &RunRecord, dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir.display().to_string(), e))?;
    write_json(&dir.join("manifest.json"), &record.manifest)?;
    write_json(&dir.join("summary.json"), &record.summary)?;
    write_json(&dir.join("monitors.json"), &record.monitors)?;
    write_trace(record, &dir.join("trace.csv"))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| HarnessError::io(path.display().to_string(), e))
}

fn write_trace(record: &RunRecord, path: &Path) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    let mut epochs = record.summary.epochs.iter().peekable();
    for step in &record.steps {
        while epochs.peek().is_some_and(|e| e.last_step < step.k) {
            epochs.next();
        }
        let f_full = epochs
            .peek()
            .filter(|e| e.last_step == step.k)
            .map(|e| e.final_f);
        w.serialize(TraceRow {
            k: step.k,
            epoch: step.epoch,
            i_k: step.i_k,
            f_component: step.f_component,
            f_full,
            eta: step.eta,
            mu: step.mu,
            denom: step.denom_after,
            g_norm: step.g_norm,
            m_norm: step.m_norm_after,
            step_norm: step.step_norm,
        })?;
    }
    if record.steps.is_empty() {
        w.write_record([
            "k",
            "epoch",
            "i_k",
            "f_component",
            "f_full",
            "eta",
            "mu",
            "denom",
            "g_norm",
            "m_norm",
            "step_norm",
        ])?;
    }
    w.flush()
        .map_err(|e| HarnessError::io(path.display().to_string(), e))
}

/// Runs `config` and, when `config.out` is set, writes its artifacts there.
pub fn run_single(config: &RunConfig) -> Result<RunRecord, HarnessError> {
    let record = execute(config)?;
    if let Some(dir) = &config.out {
        write_record(&record, dir)?;
    }
    Ok(record)
}
