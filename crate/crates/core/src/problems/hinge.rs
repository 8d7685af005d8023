//! L2-regularized hinge-loss SVM:
//! `f_i(w) = max(0, 1 − y_i ⟨w, z_i⟩) + (λ/2) ‖w‖²`.
//!
//! Data: labels alternate `+1` (even `i`) and `−1` (odd `i`); features are
//! `z_i ~ N(y_i · separation / sqrt(dim) · 1, I)`.

use serde::{Deserialize, Serialize};

use super::{
    check_args, require_finite_nonneg, require_positive, FiniteSumProblem, SubgradientSample,
};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::vector::ParamVector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HingeConfig {
    pub dim: usize,
    pub n: usize,
    pub seed: u64,
    pub lambda: f64,
    pub separation: f64,
    /// Default initial point is `N(0, init_scale² I)`; zero gives `w = 0`.
    pub init_scale: f64,
    pub x0: Option<Vec<f64>>,
}

impl Default for HingeConfig {
    fn default() -> Self {
        Self {
            dim: 5,
            n: 32,
            seed: 0,
            lambda: 1e-2,
            separation: 1.0,
            init_scale: 0.0,
            x0: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct HingeSvm {
    features: Vec<ParamVector>,
    labels: Vec<f64>,
    lambda: f64,
    dim: usize,
    init_scale: f64,
}

impl HingeSvm {
    pub fn from_config(cfg: &HingeConfig) -> Result<Self> {
        require_positive("problem.dim", cfg.dim)?;
        require_positive("problem.n", cfg.n)?;
        require_finite_nonneg("problem.separation", cfg.separation)?;
        require_finite_nonneg("problem.init_scale", cfg.init_scale)?;
        if !(cfg.lambda.is_finite() && cfg.lambda > 0.0) {
            return Err(Error::config(
                "problem.lambda",
                "must be finite and positive",
            ));
        }
        let mut rng = SeededRng::new(cfg.seed);
        let shift = cfg.separation / (cfg.dim as f64).sqrt();
        let mut features = Vec::with_capacity(cfg.n);
        let mut labels = Vec::with_capacity(cfg.n);
        for i in 0..cfg.n {
            let y = if i % 2 == 0 { 1.0 } else { -1.0 };
            let z = (0..cfg.dim).map(|_| rng.normal(y * shift, 1.0)).collect();
            features.push(ParamVector::new(z));
            labels.push(y);
        }
        Ok(Self {
            features,
            labels,
            lambda: cfg.lambda,
            dim: cfg.dim,
            init_scale: cfg.init_scale,
        })
    }

    pub fn from_data(features: Vec<Vec<f64>>, labels: Vec<f64>, lambda: f64) -> Result<Self> {
        let dim = features.first().map(Vec::len).unwrap_or(0);
        if features.is_empty() || dim == 0 || features.iter().any(|z| z.len() != dim) {
            return Err(Error::config(
                "problem.features",
                "need equal-length nonempty rows",
            ));
        }
        if labels.len() != features.len() || labels.iter().any(|&y| y != 1.0 && y != -1.0) {
            return Err(Error::config("problem.labels", "one ±1 label per row"));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::config(
                "problem.lambda",
                "must be finite and positive",
            ));
        }
        Ok(Self {
            features: features.into_iter().map(ParamVector::new).collect(),
            labels,
            lambda,
            dim,
            init_scale: 0.0,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `1 − y_i ⟨w, z_i⟩`; the hinge is active when positive.
    fn slack(&self, i: usize, w: &ParamVector) -> f64 {
        let dot: f64 = w
            .iter()
            .zip(self.features[i].iter())
            .map(|(a, b)| a * b)
            .sum();
        1.0 - self.labels[i] * dot
    }

    fn gradient_with_hinge(&self, i: usize, w: &ParamVector, active: bool) -> ParamVector {
        let mut g = w.scaled(self.lambda);
        if active {
            let y = self.labels[i];
            for (gj, zj) in g.as_mut_slice().iter_mut().zip(self.features[i].iter()) {
                *gj -= y * zj;
            }
        }
        g
    }
}

impl FiniteSumProblem for HingeSvm {
    fn name(&self) -> &str {
        "hinge"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn num_components(&self) -> usize {
        self.labels.len()
    }

    fn component_value(&self, i: usize, w: &ParamVector) -> Result<f64> {
        check_args(self, i, w)?;
        Ok(self.slack(i, w).max(0.0) + 0.5 * self.lambda * w.norm2_squared())
    }

    fn component_subgrad(&self, i: usize, w: &ParamVector) -> Result<SubgradientSample> {
        check_args(self, i, w)?;
        // slack exactly zero counts as inactive, like ReLU'(0) = 0
        let active = self.slack(i, w) > 0.0;
        Ok(SubgradientSample {
            vector: self.gradient_with_hinge(i, w, active),
            component_index: i,
        })
    }

    fn component_generators(&self, i: usize, w: &ParamVector) -> Result<Vec<ParamVector>> {
        check_args(self, i, w)?;
        let slack = self.slack(i, w);
        Ok(if slack == 0.0 {
            vec![
                self.gradient_with_hinge(i, w, false),
                self.gradient_with_hinge(i, w, true),
            ]
        } else {
            vec![self.gradient_with_hinge(i, w, slack > 0.0)]
        })
    }

    fn kink_margin(&self, i: usize, w: &ParamVector) -> Result<f64> {
        check_args(self, i, w)?;
        Ok(self.slack(i, w).abs())
    }

    fn initial_point(&self, rng: &mut SeededRng) -> ParamVector {
        if self.init_scale == 0.0 {
            return ParamVector::zeros(self.dim);
        }
        ParamVector::new(
            (0..self.dim)
                .map(|_| rng.normal(0.0, self.init_scale))
                .collect(),
        )
    }

    // f ≥ (λ/2)‖w‖²
    fn level_set_radius(&self, level: f64) -> Option<f64> {
        Some((2.0 * level.max(0.0) / self.lambda).sqrt())
    }

    fn coercivity_witness(&self) -> Option<(f64, f64)> {
        Some((0.5 * self.lambda, 0.0))
    }
}
