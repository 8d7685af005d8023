//! Finite-sum nonsmooth test problems.
//!
//! Every problem is an average `f(x) = (1/N) Σ_i f_i(x)` of locally Lipschitz
//! components. Oracles return one element of the conservative field of a
//! component, chosen by a fixed convention at kinks: `sign(0) = 0`,
//! `ReLU'(0) = 0`, an inactive hinge at margin exactly one, and the
//! lowest-index branch of a pointwise minimum.
//!
//! All built-in problems are nonnegative. Whether the set of critical values
//! `{f(x) : 0 ∈ D_f(x)}` has empty interior is checked by hand for the
//! built-ins (each has finitely many critical values); for user-supplied
//! problems it remains the caller's obligation.

mod hinge;
mod lad;
mod mlp;
mod pwnc;

use serde::{Deserialize, Serialize};

pub use hinge::{HingeConfig, HingeSvm};
pub use lad::{Lad, LadConfig};
pub use mlp::{MlpConfig, ReluMlp};
pub use pwnc::{PiecewiseNonconvex, PwncConfig};

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::vector::ParamVector;

/// Upper bound on the number of generators [`clarke_generators`] will
/// enumerate before refusing.
pub const MAX_GENERATORS: usize = 1 << 14;

/// One conservative-field element of a single component.
#[derive(Clone, Debug, PartialEq)]
pub struct SubgradientSample {
    pub vector: ParamVector,
    pub component_index: usize,
}

/// Finite generator list whose convex hull is `D_f(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub generators: Vec<ParamVector>,
}

impl GeneratorSet {
    pub fn new(generators: Vec<ParamVector>) -> Self {
        Self { generators }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

pub trait FiniteSumProblem: Send + Sync {
    /// Registry name (`lad`, `hinge`, `pwnc`, `relu-mlp`).
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn num_components(&self) -> usize;

    fn component_value(&self, i: usize, x: &ParamVector) -> Result<f64>;

    fn component_subgrad(&self, i: usize, x: &ParamVector) -> Result<SubgradientSample>;

    /// Generators of `D_{f_i}(x)`. Active kinks are detected by exact
    /// equality only; near-kink points get the single gradient.
    fn component_generators(&self, _i: usize, _x: &ParamVector) -> Result<Vec<ParamVector>> {
        Err(Error::Unsupported {
            op: "clarke_generators",
            problem: self.name().to_string(),
        })
    }

    /// Distance-like margin to the nearest nondifferentiability of `f_i`
    /// (zero on a kink).
    fn kink_margin(&self, i: usize, x: &ParamVector) -> Result<f64>;

    /// Problem-default initial point drawn from `rng`.
    fn initial_point(&self, rng: &mut SeededRng) -> ParamVector;

    /// Radius of a ball containing the sublevel set `{f ≤ level}`, for
    /// coercive problems.
    fn level_set_radius(&self, _level: f64) -> Option<f64> {
        None
    }

    /// Constants `(c1, c2)` with `f(x) ≥ c1 ‖x‖² − c2` for all `x`.
    fn coercivity_witness(&self) -> Option<(f64, f64)> {
        None
    }
}

pub(crate) fn check_args(
    problem: &(impl FiniteSumProblem + ?Sized),
    i: usize,
    x: &ParamVector,
) -> Result<()> {
    if i >= problem.num_components() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: problem.num_components(),
        });
    }
    x.check_dim(problem.dim())
}

/// Mean of the component values, summed in index order.
pub fn full_value(problem: &dyn FiniteSumProblem, x: &ParamVector) -> Result<f64> {
    x.check_dim(problem.dim())?;
    let n = problem.num_components();
    let mut sum = 0.0;
    for i in 0..n {
        sum += problem.component_value(i, x)?;
    }
    Ok(sum / n as f64)
}

/// Mean of component values over an index group.
pub fn batch_value(
    problem: &dyn FiniteSumProblem,
    indices: &[usize],
    x: &ParamVector,
) -> Result<f64> {
    if indices.is_empty() {
        return Err(Error::contract("empty index group"));
    }
    let mut sum = 0.0;
    for &i in indices {
        sum += problem.component_value(i, x)?;
    }
    Ok(sum / indices.len() as f64)
}

/// Average of component subgradients over an index group.
pub fn batch_subgrad(
    problem: &dyn FiniteSumProblem,
    indices: &[usize],
    x: &ParamVector,
) -> Result<ParamVector> {
    if indices.is_empty() {
        return Err(Error::contract("empty index group"));
    }
    let mut sum = ParamVector::zeros(problem.dim());
    for &i in indices {
        sum.add_scaled(1.0, &problem.component_subgrad(i, x)?.vector)?;
    }
    Ok(sum.scaled(1.0 / indices.len() as f64))
}

/// Element of `(1/N) Σ D_{f_i}(x)` obtained by averaging every component
/// oracle; the direction used by the deterministic full-gradient mode.
pub fn full_subgrad(problem: &dyn FiniteSumProblem, x: &ParamVector) -> Result<ParamVector> {
    x.check_dim(problem.dim())?;
    let all: Vec<usize> = (0..problem.num_components()).collect();
    batch_subgrad(problem, &all, x)
}

/// Generators of `conv((1/N) Σ_i D_{f_i}(x))`, built as the Minkowski sum
/// of the per-component generator lists (duplicates removed) and then scaled
/// by `1/N`.
pub fn clarke_generators(problem: &dyn FiniteSumProblem, x: &ParamVector) -> Result<GeneratorSet> {
    x.check_dim(problem.dim())?;
    let n = problem.num_components();
    let mut sums = vec![ParamVector::zeros(problem.dim())];
    for i in 0..n {
        let gens = problem.component_generators(i, x)?;
        if gens.len() == 1 {
            for s in &mut sums {
                s.add_scaled(1.0, &gens[0])?;
            }
            continue;
        }
        if sums.len() * gens.len() > MAX_GENERATORS {
            return Err(Error::contract(format!(
                "more than {MAX_GENERATORS} generators at this point; too many active kinks"
            )));
        }
        let mut next: Vec<ParamVector> = Vec::with_capacity(sums.len() * gens.len());
        for s in &sums {
            for g in &gens {
                let mut v = s.clone();
                v.add_scaled(1.0, g)?;
                if !next.contains(&v) {
                    next.push(v);
                }
            }
        }
        sums = next;
    }
    let inv = 1.0 / n as f64;
    Ok(GeneratorSet::new(
        sums.into_iter().map(|s| s.scaled(inv)).collect(),
    ))
}

/// Central differences `(f(x + h e_j) − f(x − h e_j)) / 2h` of any scalar
/// function.
pub fn central_difference<F>(f: F, x: &ParamVector, h: f64) -> Result<ParamVector>
where
    F: Fn(&ParamVector) -> Result<f64>,
{
    if !(h > 0.0) {
        return Err(Error::contract("finite-difference step must be positive"));
    }
    let mut grad = ParamVector::zeros(x.dim());
    let mut probe = x.clone();
    for j in 0..x.dim() {
        let orig = probe[j];
        probe[j] = orig + h;
        let up = f(&probe)?;
        probe[j] = orig - h;
        let down = f(&probe)?;
        probe[j] = orig;
        grad[j] = (up - down) / (2.0 * h);
    }
    Ok(grad)
}

/// Central-difference gradient of component `i`.
pub fn finite_difference_gradient(
    problem: &dyn FiniteSumProblem,
    i: usize,
    x: &ParamVector,
    h: f64,
) -> Result<ParamVector> {
    check_args(problem, i, x)?;
    central_difference(|p| problem.component_value(i, p), x, h)
}

/// Registry entry: a problem name plus its parameter block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name")]
pub enum ProblemConfig {
    #[serde(rename = "lad")]
    Lad(LadConfig),
    #[serde(rename = "hinge")]
    Hinge(HingeConfig),
    #[serde(rename = "pwnc")]
    Pwnc(PwncConfig),
    #[serde(rename = "relu-mlp")]
    ReluMlp(MlpConfig),
}

impl ProblemConfig {
    pub const NAMES: [&'static str; 4] = ["lad", "hinge", "pwnc", "relu-mlp"];

    /// Default parameter block for a registry name.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "lad" => Ok(Self::Lad(LadConfig::default())),
            "hinge" => Ok(Self::Hinge(HingeConfig::default())),
            "pwnc" => Ok(Self::Pwnc(PwncConfig::default())),
            "relu-mlp" => Ok(Self::ReluMlp(MlpConfig::default())),
            other => Err(Error::config(
                "problem.name",
                format!(
                    "unknown problem `{other}`; expected one of {:?}",
                    Self::NAMES
                ),
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Lad(_) => "lad",
            Self::Hinge(_) => "hinge",
            Self::Pwnc(_) => "pwnc",
            Self::ReluMlp(_) => "relu-mlp",
        }
    }

    pub fn build(&self) -> Result<Box<dyn FiniteSumProblem>> {
        Ok(match self {
            Self::Lad(c) => Box::new(Lad::from_config(c)?),
            Self::Hinge(c) => Box::new(HingeSvm::from_config(c)?),
            Self::Pwnc(c) => Box::new(PiecewiseNonconvex::from_config(c)?),
            Self::ReluMlp(c) => Box::new(ReluMlp::from_config(c)?),
        })
    }

    fn explicit_x0(&self) -> Option<&Vec<f64>> {
        match self {
            Self::Lad(c) => c.x0.as_ref(),
            Self::Hinge(c) => c.x0.as_ref(),
            Self::Pwnc(c) => c.x0.as_ref(),
            Self::ReluMlp(c) => c.x0.as_ref(),
        }
    }

    /// Starting point: the explicit `x0` when given, otherwise the problem
    /// default drawn from stream 1 of the run seed.
    pub fn initial_point(
        &self,
        problem: &dyn FiniteSumProblem,
        run_seed: u64,
    ) -> Result<ParamVector> {
        match self.explicit_x0() {
            Some(x0) => {
                let x0 = ParamVector::from(x0.as_slice());
                x0.check_dim(problem.dim()).map_err(|_| {
                    Error::config(
                        "problem.x0",
                        format!("expected {} components, got {}", problem.dim(), x0.dim()),
                    )
                })?;
                if !x0.is_finite() {
                    return Err(Error::config("problem.x0", "components must be finite"));
                }
                Ok(x0)
            }
            None => {
                let mut rng = SeededRng::with_stream(run_seed, 1);
                Ok(problem.initial_point(&mut rng))
            }
        }
    }
}

pub(crate) fn require_positive(field: &str, value: usize) -> Result<()> {
    if value == 0 {
        Err(Error::config(field, "must be at least 1"))
    } else {
        Ok(())
    }
}

pub(crate) fn require_finite_nonneg(field: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::config(field, "must be finite and nonnegative"))
    }
}
