//! One-hidden-layer ReLU network with squared loss on two Gaussian blobs.
//!
//! Parameters are packed as `[W1 (width × input, row-major), b1 (width),
//! w2 (width), b2]`. Component `i` owns samples `i·s .. (i+1)·s` (with `s =
//! samples_per_component`) and its value is the mean over those samples of
//! `½ (out − y)²`. Sample `t` has label `y = +1` for even `t`, `−1` for odd
//! `t`, and features `N(y · blob_offset · 1, I)`.
//!
//! Backpropagation uses `ReLU'(0) = 0`, which yields an element of the
//! conservative field of the network (not necessarily a Clarke
//! subgradient), the same element automatic differentiation returns.

use serde::{Deserialize, Serialize};

use super::{
    check_args, require_finite_nonneg, require_positive, FiniteSumProblem, SubgradientSample,
};
use crate::error::Result;
use crate::rng::SeededRng;
use crate::vector::ParamVector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpConfig {
    pub input_dim: usize,
    pub width: usize,
    pub n: usize,
    pub samples_per_component: usize,
    pub seed: u64,
    pub blob_offset: f64,
    /// Multiplier on the He-style initial weights.
    pub init_scale: f64,
    pub x0: Option<Vec<f64>>,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            input_dim: 2,
            width: 8,
            n: 32,
            samples_per_component: 4,
            seed: 0,
            blob_offset: 1.0,
            init_scale: 1.0,
            x0: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReluMlp {
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    input_dim: usize,
    width: usize,
    per_component: usize,
    init_scale: f64,
}

struct Layout {
    w1: usize,
    b1: usize,
    w2: usize,
    b2: usize,
}

impl ReluMlp {
    pub fn from_config(cfg: &MlpConfig) -> Result<Self> {
        require_positive("problem.input_dim", cfg.input_dim)?;
        require_positive("problem.width", cfg.width)?;
        require_positive("problem.n", cfg.n)?;
        require_positive("problem.samples_per_component", cfg.samples_per_component)?;
        require_finite_nonneg("problem.blob_offset", cfg.blob_offset)?;
        require_finite_nonneg("problem.init_scale", cfg.init_scale)?;
        let mut rng = SeededRng::new(cfg.seed);
        let total = cfg.n * cfg.samples_per_component;
        let mut inputs = Vec::with_capacity(total);
        let mut targets = Vec::with_capacity(total);
        for t in 0..total {
            let y = if t % 2 == 0 { 1.0 } else { -1.0 };
            inputs.push(
                (0..cfg.input_dim)
                    .map(|_| rng.normal(y * cfg.blob_offset, 1.0))
                    .collect(),
            );
            targets.push(y);
        }
        Ok(Self {
            inputs,
            targets,
            input_dim: cfg.input_dim,
            width: cfg.width,
            per_component: cfg.samples_per_component,
            init_scale: cfg.init_scale,
        })
    }

    fn layout(&self) -> Layout {
        let w1 = 0;
        let b1 = self.width * self.input_dim;
        let w2 = b1 + self.width;
        let b2 = w2 + self.width;
        Layout { w1, b1, w2, b2 }
    }

    fn samples(&self, i: usize) -> std::ops::Range<usize> {
        i * self.per_component..(i + 1) * self.per_component
    }

    fn pre_activations(&self, p: &[f64], z: &[f64], out: &mut [f64]) {
        let l = self.layout();
        for (u, h) in out.iter_mut().enumerate() {
            let row = &p[l.w1 + u * self.input_dim..l.w1 + (u + 1) * self.input_dim];
            *h = row.iter().zip(z).map(|(w, zj)| w * zj).sum::<f64>() + p[l.b1 + u];
        }
    }

    fn output(&self, p: &[f64], pre: &[f64]) -> f64 {
        let l = self.layout();
        pre.iter()
            .enumerate()
            .map(|(u, &h)| p[l.w2 + u] * h.max(0.0))
            .sum::<f64>()
            + p[l.b2]
    }
}

impl FiniteSumProblem for ReluMlp {
    fn name(&self) -> &str {
        "relu-mlp"
    }

    fn dim(&self) -> usize {
        self.width * self.input_dim + 2 * self.width + 1
    }

    fn num_components(&self) -> usize {
        self.targets.len() / self.per_component
    }

    fn component_value(&self, i: usize, x: &ParamVector) -> Result<f64> {
        check_args(self, i, x)?;
        let p = x.as_slice();
        let mut pre = vec![0.0; self.width];
        let mut loss = 0.0;
        for t in self.samples(i) {
            self.pre_activations(p, &self.inputs[t], &mut pre);
            let r = self.output(p, &pre) - self.targets[t];
            loss += 0.5 * r * r;
        }
        Ok(loss / self.per_component as f64)
    }

    fn component_subgrad(&self, i: usize, x: &ParamVector) -> Result<SubgradientSample> {
        check_args(self, i, x)?;
        let p = x.as_slice();
        let l = self.layout();
        let mut grad = vec![0.0; self.dim()];
        let mut pre = vec![0.0; self.width];
        for t in self.samples(i) {
            let z = &self.inputs[t];
            self.pre_activations(p, z, &mut pre);
            let r = self.output(p, &pre) - self.targets[t];
            grad[l.b2] += r;
            for (u, &h) in pre.iter().enumerate() {
                grad[l.w2 + u] += r * h.max(0.0);
                if h > 0.0 {
                    let dh = r * p[l.w2 + u];
                    grad[l.b1 + u] += dh;
                    for (j, zj) in z.iter().enumerate() {
                        grad[l.w1 + u * self.input_dim + j] += dh * zj;
                    }
                }
            }
        }
        let inv = 1.0 / self.per_component as f64;
        Ok(SubgradientSample {
            vector: ParamVector::new(grad.into_iter().map(|g| g * inv).collect()),
            component_index: i,
        })
    }

    fn kink_margin(&self, i: usize, x: &ParamVector) -> Result<f64> {
        check_args(self, i, x)?;
        let mut pre = vec![0.0; self.width];
        let mut margin = f64::INFINITY;
        for t in self.samples(i) {
            self.pre_activations(x.as_slice(), &self.inputs[t], &mut pre);
            margin = pre.iter().fold(margin, |m, h| m.min(h.abs()));
        }
        Ok(margin)
    }

    fn initial_point(&self, rng: &mut SeededRng) -> ParamVector {
        let l = self.layout();
        let mut p = vec![0.0; self.dim()];
        let w1_std = self.init_scale * (2.0 / self.input_dim as f64).sqrt();
        let w2_std = self.init_scale * (1.0 / self.width as f64).sqrt();
        for v in &mut p[l.w1..l.b1] {
            *v = rng.normal(0.0, w1_std);
        }
        for v in &mut p[l.w2..l.b2] {
            *v = rng.normal(0.0, w2_std);
        }
        ParamVector::new(p)
    }
}
