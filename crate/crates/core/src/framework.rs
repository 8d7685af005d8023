//! The generic learning-rate-free momentum stepper and its scaling rules.
//!
//! One step, in order:
//!
//! 1. `g ← oracle(x_k)` (one component, a mini-batch average, or the full
//!    average in deterministic mode);
//! 2. `(μ, τ, c) ← rule.emit(state, g)`;
//! 3. `denom ← denom + c` (so `denom = ε₀ + Σ contributions`);
//! 4. `η ← μ / sqrt(denom)`;
//! 5. `m_{k+1} ← β m_k + (1 − β) g`;
//! 6. `x_{k+1} ← x_k − η m_{k+1}`;
//! 7. `max_dist ← max(max_dist, ‖x_{k+1} − x_0‖)`;
//! 8. `k ← k + 1`.
//!
//! The distance scale used by DoG, DoWG and LFM is
//! `d_k = max(r_eps, max_{i≤k} ‖x_i − x_0‖)`; the floor `r_eps` keeps the
//! first step from being exactly zero.
//!
//! | rule       | μ_k          | τ_k | contribution at step k |
//! |------------|--------------|-----|------------------------|
//! | `dog`      | ρ d_k        | 1   | ‖g_k‖²                 |
//! | `dowg`     | (ρ d_k)²     | μ_k | μ_k ‖g_k‖²             |
//! | `lfm`      | ρ d_k        | 1   | ‖m_k‖² (pre-update)    |
//! | `constant` | fixed_lr     | –   | 0, and η = fixed_lr    |
//!
//! DoG and DoWG always run with β = 0.

use serde::{Deserialize, Serialize};

use crate::diagnostics::Monitor;
use crate::error::{Error, Result};
use crate::problems::{batch_subgrad, batch_value, full_subgrad, full_value, FiniteSumProblem};
use crate::sampler::IndexSchedule;
use crate::vector::ParamVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Dog,
    Dowg,
    Lfm,
    Constant,
}

impl RuleKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "dog" => Ok(Self::Dog),
            "dowg" => Ok(Self::Dowg),
            "lfm" => Ok(Self::Lfm),
            "constant" => Ok(Self::Constant),
            other => Err(Error::config(
                "optimizer.rule",
                format!("unknown rule `{other}`; expected dog, dowg, lfm or constant"),
            )),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Dog => "dog",
            Self::Dowg => "dowg",
            Self::Lfm => "lfm",
            Self::Constant => "constant",
        }
    }
}

/// Optimizer block of a run configuration, before defaults depending on
/// the initial point are filled in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub rule: RuleKind,
    pub rho: f64,
    pub beta: f64,
    pub eps0: f64,
    /// Initial-movement floor; `None` resolves to `1e-6 (1 + ‖x_0‖)`.
    pub r_eps: Option<f64>,
    pub fixed_lr: f64,
    /// DoWG only: weight every past squared gradient by the current μ
    /// instead of the μ in force when it was taken.
    pub dowg_reweight_history: bool,
    /// Deterministic mode: every step uses the full-average subgradient.
    pub full_gradient: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            rule: RuleKind::Lfm,
            rho: 1.0,
            beta: 0.9,
            eps0: 1e-8,
            r_eps: None,
            fixed_lr: 0.01,
            dowg_reweight_history: false,
            full_gradient: false,
        }
    }
}

impl OptimizerConfig {
    pub fn with_rule(rule: RuleKind) -> Self {
        Self {
            rule,
            ..Self::default()
        }
    }

    /// Validates the block and fills defaults that depend on `x0`.
    pub fn resolve(&self, x0: &ParamVector) -> Result<ScalingRule> {
        let positive = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(
                    field,
                    format!("must be finite and positive, got {v}"),
                ))
            }
        };
        positive("optimizer.rho", self.rho)?;
        positive("optimizer.eps0", self.eps0)?;
        positive("optimizer.fixed_lr", self.fixed_lr)?;
        let r_eps = self.r_eps.unwrap_or(1e-6 * (1.0 + x0.norm2()));
        positive("optimizer.r_eps", r_eps)?;
        let beta = match self.rule {
            RuleKind::Dog | RuleKind::Dowg => 0.0,
            RuleKind::Lfm | RuleKind::Constant => {
                if !(0.0..1.0).contains(&self.beta) {
                    return Err(Error::config(
                        "optimizer.beta",
                        format!("must lie in [0, 1), got {}", self.beta),
                    ));
                }
                self.beta
            }
        };
        Ok(ScalingRule {
            kind: self.rule,
            rho: self.rho,
            beta,
            eps0: self.eps0,
            r_eps,
            fixed_lr: self.fixed_lr,
            dowg_reweight_history: self.dowg_reweight_history,
        })
    }
}

/// A fully resolved scaling rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRule {
    pub kind: RuleKind,
    pub rho: f64,
    pub beta: f64,
    pub eps0: f64,
    pub r_eps: f64,
    pub fixed_lr: f64,
    pub dowg_reweight_history: bool,
}

/// What a rule hands the stepper at one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Emission {
    pub mu: f64,
    pub tau: f64,
    pub contribution: f64,
}

impl ScalingRule {
    fn distance_scale(&self, state: &OptimizerState) -> f64 {
        self.r_eps.max(state.max_dist)
    }

    pub fn emit(&self, state: &OptimizerState, g: &ParamVector) -> Emission {
        match self.kind {
            RuleKind::Dog => Emission {
                mu: self.rho * self.distance_scale(state),
                tau: 1.0,
                contribution: g.norm2_squared(),
            },
            RuleKind::Dowg => {
                let scaled = self.rho * self.distance_scale(state);
                let mu = scaled * scaled;
                let g_sq = g.norm2_squared();
                let contribution = if self.dowg_reweight_history {
                    let target = mu * (state.grad_sq_sum + g_sq);
                    (target - (state.denom - self.eps0)).max(0.0)
                } else {
                    mu * g_sq
                };
                Emission {
                    mu,
                    tau: mu,
                    contribution,
                }
            }
            RuleKind::Lfm => Emission {
                mu: self.rho * self.distance_scale(state),
                tau: 1.0,
                contribution: state.m.norm2_squared(),
            },
            RuleKind::Constant => Emission {
                mu: self.fixed_lr,
                tau: 1.0,
                contribution: 0.0,
            },
        }
    }
}

/// Free-function form of [`ScalingRule::emit`].
pub fn scaler_emit(rule: &ScalingRule, state: &OptimizerState, g: &ParamVector) -> Emission {
    rule.emit(state, g)
}

/// `μ / sqrt(denom)`.
pub fn compute_learning_rate(mu: f64, denom: f64) -> Result<f64> {
    if !(denom > 0.0) {
        return Err(Error::contract(format!(
            "denominator must be positive, got {denom}"
        )));
    }
    if !(mu >= 0.0) {
        return Err(Error::contract(format!(
            "scale must be nonnegative, got {mu}"
        )));
    }
    Ok(mu / denom.sqrt())
}

/// `β m + (1 − β) g`.
pub fn update_momentum(m: &ParamVector, g: &ParamVector, beta: f64) -> Result<ParamVector> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::contract(format!(
            "momentum must lie in [0, 1), got {beta}"
        )));
    }
    g.check_dim(m.dim())?;
    Ok(ParamVector::new(
        m.iter()
            .zip(g.iter())
            .map(|(mi, gi)| beta * mi + (1.0 - beta) * gi)
            .collect(),
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerState {
    pub x: ParamVector,
    pub m: ParamVector,
    /// `ε₀ + Σ` contributions so far.
    pub denom: f64,
    /// `max_{i≤k} ‖x_i − x_0‖`.
    pub max_dist: f64,
    pub x0: ParamVector,
    pub k: u64,
    /// `Σ ‖g_i‖²`, kept for the reweighted DoWG variant.
    pub grad_sq_sum: f64,
}

impl OptimizerState {
    /// Fresh state at `x0` with zero momentum.
    pub fn new(x0: ParamVector, rule: &ScalingRule) -> Self {
        let dim = x0.dim();
        Self {
            x: x0.clone(),
            m: ParamVector::zeros(dim),
            denom: rule.eps0,
            max_dist: 0.0,
            x0,
            k: 0,
            grad_sq_sum: 0.0,
        }
    }
}

/// Per-step record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepTrace {
    pub k: u64,
    pub epoch: u64,
    /// First component index of the group (`None` in full-gradient mode).
    pub i_k: Option<usize>,
    pub eta: f64,
    pub mu: f64,
    pub tau: f64,
    pub denom_after: f64,
    pub g_norm: f64,
    pub m_norm_before: f64,
    pub m_norm_after: f64,
    pub step_norm: f64,
    /// Objective over the sampled group, evaluated at `x_k`.
    pub f_component: f64,
}

/// Where a step's subgradient comes from.
#[derive(Clone, Copy, Debug)]
pub enum Direction<'a> {
    Components(&'a [usize]),
    Full,
}

fn finite(step: u64, quantity: &'static str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::NonFinite { step, quantity })
    }
}

/// Executes one step in place and returns its trace.
pub fn lfsgd_step(
    state: &mut OptimizerState,
    rule: &ScalingRule,
    problem: &dyn FiniteSumProblem,
    direction: Direction<'_>,
) -> Result<StepTrace> {
    let step = state.k;
    let (g, f_component, i_k) = match direction {
        Direction::Components(indices) => (
            batch_subgrad(problem, indices, &state.x)?,
            batch_value(problem, indices, &state.x)?,
            indices.first().copied(),
        ),
        Direction::Full => (
            full_subgrad(problem, &state.x)?,
            full_value(problem, &state.x)?,
            None,
        ),
    };
    finite(step, "subgradient", g.is_finite())?;
    finite(step, "objective", f_component.is_finite())?;

    let emission = rule.emit(state, &g);
    let denom = state.denom + emission.contribution;
    finite(step, "denominator", denom.is_finite())?;
    let eta = match rule.kind {
        RuleKind::Constant => rule.fixed_lr,
        _ => compute_learning_rate(emission.mu, denom)?,
    };
    finite(step, "learning rate", eta.is_finite())?;

    let m_norm_before = state.m.norm2();
    let m = update_momentum(&state.m, &g, rule.beta)?;
    let mut x = state.x.clone();
    x.add_scaled(-eta, &m)?;
    finite(step, "iterate", x.is_finite())?;

    let step_norm = x.distance(&state.x)?;
    let dist = x.distance(&state.x0)?;
    let g_sq = g.norm2_squared();

    state.denom = denom;
    state.grad_sq_sum += g_sq;
    state.max_dist = state.max_dist.max(dist);
    state.m = m;
    state.x = x;
    state.k += 1;

    Ok(StepTrace {
        k: step,
        epoch: 0,
        i_k,
        eta,
        mu: emission.mu,
        tau: emission.tau,
        denom_after: denom,
        g_norm: g_sq.sqrt(),
        m_norm_before,
        m_norm_after: state.m.norm2(),
        step_norm,
        f_component,
    })
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Keep every `record_every`-th step trace (epoch summaries stay complete).
    pub record_every: u64,
    /// Keep the full iterate series `x_0, …, x_K`.
    pub keep_iterates: bool,
    /// One full-gradient step per epoch instead of sampled components.
    pub full_gradient: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            record_every: 1,
            keep_iterates: false,
            full_gradient: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochSummary {
    pub epoch: u64,
    /// Index of the epoch's last step.
    pub last_step: u64,
    pub mean_f_component: f64,
    /// Full objective at the end of the epoch.
    pub final_f: f64,
    pub max_step_norm: f64,
}

#[derive(Clone, Debug, Default)]
pub struct RunTrace {
    pub steps: Vec<StepTrace>,
    pub epochs: Vec<EpochSummary>,
    /// `x_0 … x_K` when requested.
    pub iterates: Option<Vec<ParamVector>>,
    pub total_steps: u64,
    /// `max_k (‖g_k‖ + ‖m_k‖)` over the run.
    pub sup_g_plus_m: f64,
}

/// Runs `epochs` passes, each visiting every component once in the order the
/// schedule dictates. State carries across epoch boundaries unchanged.
pub fn run_epochs(
    state: &mut OptimizerState,
    rule: &ScalingRule,
    problem: &dyn FiniteSumProblem,
    schedule: &mut IndexSchedule,
    epochs: u64,
    monitors: &mut [&mut dyn Monitor],
    options: &RunOptions,
) -> Result<RunTrace> {
    if epochs == 0 {
        return Err(Error::config("epochs", "must be at least 1"));
    }
    if options.record_every == 0 {
        return Err(Error::config("record_every", "must be at least 1"));
    }
    if schedule.num_components() != problem.num_components() {
        return Err(Error::contract(format!(
            "schedule covers {} components, problem has {}",
            schedule.num_components(),
            problem.num_components()
        )));
    }
    state.x.check_dim(problem.dim())?;

    let mut run = RunTrace::default();
    if options.keep_iterates {
        run.iterates = Some(vec![state.x.clone()]);
    }
    for monitor in monitors.iter_mut() {
        monitor.start(&state.x);
    }

    for epoch in 0..epochs {
        let groups = if options.full_gradient {
            Vec::new()
        } else {
            schedule.next_epoch()?
        };
        let n_steps = if options.full_gradient {
            1
        } else {
            groups.len()
        };
        let mut f_sum = 0.0;
        let mut max_step: f64 = 0.0;
        let mut last_step = state.k;
        for s in 0..n_steps {
            let direction = if options.full_gradient {
                Direction::Full
            } else {
                Direction::Components(&groups[s])
            };
            let mut trace = lfsgd_step(state, rule, problem, direction)?;
            trace.epoch = epoch;
            f_sum += trace.f_component;
            max_step = max_step.max(trace.step_norm);
            last_step = trace.k;
            run.sup_g_plus_m = run.sup_g_plus_m.max(trace.g_norm + trace.m_norm_before);
            for monitor in monitors.iter_mut() {
                monitor.observe(&trace, &state.x);
            }
            if let Some(xs) = run.iterates.as_mut() {
                xs.push(state.x.clone());
            }
            if trace.k % options.record_every == 0 {
                run.steps.push(trace);
            }
        }
        let final_f = full_value(problem, &state.x)?;
        if !final_f.is_finite() {
            return Err(Error::NonFinite {
                step: last_step,
                quantity: "objective",
            });
        }
        run.epochs.push(EpochSummary {
            epoch,
            last_step,
            mean_f_component: f_sum / n_steps as f64,
            final_f,
            max_step_norm: max_step,
        });
    }
    run.total_steps = state.k;
    Ok(run)
}
