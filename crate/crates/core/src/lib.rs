//! Learning-rate-free stochastic subgradient optimization.
//!
//! The crate is organised bottom-up:
//!
//! - [`vector`] and [`rng`]: dense `f64` vectors and the seeded ChaCha20 stream
//!   that every stochastic choice flows through.
//! - [`problems`]: finite-sum nonsmooth objectives `f = (1/N) Σ f_i` with exact
//!   subgradient oracles and, where tractable, generator sets of the averaged
//!   conservative field.
//! - [`sampler`]: per-epoch index streams in which every component is visited
//!   exactly once.
//! - [`framework`]: the generic momentum stepper
//!   `η_k = μ_k / sqrt(ε₀ + Σ τ_i ‖m_i‖²)`, `m_{k+1} = β m_k + (1-β) g_k`,
//!   `x_{k+1} = x_k - η_k m_{k+1}` with DoG, DoWG, LFM and constant-rate rules.
//! - [`diagnostics`]: min-norm points of convex hulls, stationarity measures,
//!   trend monitors and the piecewise-linear interpolated path.

pub mod diagnostics;
pub mod error;
pub mod framework;
pub mod problems;
pub mod rng;
pub mod sampler;
pub mod vector;

pub use error::{Error, Result};
pub use framework::{
    compute_learning_rate, lfsgd_step, run_epochs, update_momentum, Direction, OptimizerConfig,
    OptimizerState, RuleKind, RunOptions, RunTrace, ScalingRule, StepTrace,
};
pub use problems::{FiniteSumProblem, GeneratorSet, ProblemConfig, SubgradientSample};
pub use rng::SeededRng;
pub use sampler::{IndexSchedule, SamplerConfig, SamplerKind};
pub use vector::ParamVector;
