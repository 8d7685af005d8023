//! Least absolute deviations: `f_i(x) = ‖x − a_i‖₁`.
//!
//! Convex and piecewise linear. The minimizers of the average are the
//! coordinate-wise medians of the anchors.

use serde::{Deserialize, Serialize};

use super::{
    check_args, require_finite_nonneg, require_positive, FiniteSumProblem, SubgradientSample,
};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::vector::ParamVector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LadConfig {
    pub dim: usize,
    pub n: usize,
    /// Seed of the anchor data.
    pub seed: u64,
    /// Anchors are drawn i.i.d. `N(0, anchor_std²)` per coordinate.
    pub anchor_std: f64,
    /// Explicit anchors; overrides `dim`, `n` and the seeded draw.
    pub anchors: Option<Vec<Vec<f64>>>,
    /// Default initial point is `N(0, init_scale² I)`; zero gives the origin.
    pub init_scale: f64,
    pub x0: Option<Vec<f64>>,
}

impl Default for LadConfig {
    fn default() -> Self {
        Self {
            dim: 5,
            n: 20,
            seed: 0,
            anchor_std: 1.0,
            anchors: None,
            init_scale: 0.0,
            x0: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Lad {
    anchors: Vec<ParamVector>,
    dim: usize,
    init_scale: f64,
}

impl Lad {
    pub fn from_config(cfg: &LadConfig) -> Result<Self> {
        require_finite_nonneg("problem.init_scale", cfg.init_scale)?;
        let mut lad = match &cfg.anchors {
            Some(anchors) => Self::from_anchors(anchors.clone())?,
            None => {
                require_positive("problem.dim", cfg.dim)?;
                require_positive("problem.n", cfg.n)?;
                require_finite_nonneg("problem.anchor_std", cfg.anchor_std)?;
                let mut rng = SeededRng::new(cfg.seed);
                let anchors = (0..cfg.n)
                    .map(|_| {
                        (0..cfg.dim)
                            .map(|_| rng.normal(0.0, cfg.anchor_std))
                            .collect()
                    })
                    .collect();
                Self::from_anchors(anchors)?
            }
        };
        lad.init_scale = cfg.init_scale;
        Ok(lad)
    }

    pub fn from_anchors(anchors: Vec<Vec<f64>>) -> Result<Self> {
        let dim = anchors.first().map(Vec::len).unwrap_or(0);
        if anchors.is_empty() || dim == 0 {
            return Err(Error::config(
                "problem.anchors",
                "need at least one nonempty anchor",
            ));
        }
        if anchors.iter().any(|a| a.len() != dim) {
            return Err(Error::config(
                "problem.anchors",
                "anchors must share one dimension",
            ));
        }
        if anchors.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::config("problem.anchors", "anchors must be finite"));
        }
        Ok(Self {
            anchors: anchors.into_iter().map(ParamVector::new).collect(),
            dim,
            init_scale: 0.0,
        })
    }

    pub fn anchors(&self) -> &[ParamVector] {
        &self.anchors
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl FiniteSumProblem for Lad {
    fn name(&self) -> &str {
        "lad"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn num_components(&self) -> usize {
        self.anchors.len()
    }

    fn component_value(&self, i: usize, x: &ParamVector) -> Result<f64> {
        check_args(self, i, x)?;
        Ok(x.iter()
            .zip(self.anchors[i].iter())
            .map(|(xj, aj)| (xj - aj).abs())
            .sum())
    }

    fn component_subgrad(&self, i: usize, x: &ParamVector) -> Result<SubgradientSample> {
        check_args(self, i, x)?;
        let g = x
            .iter()
            .zip(self.anchors[i].iter())
            .map(|(xj, aj)| sign(xj - aj))
            .collect();
        Ok(SubgradientSample {
            vector: ParamVector::new(g),
            component_index: i,
        })
    }

    fn component_generators(&self, i: usize, x: &ParamVector) -> Result<Vec<ParamVector>> {
        check_args(self, i, x)?;
        // every coordinate sitting exactly on its anchor contributes {−1, +1}
        let mut gens = vec![ParamVector::zeros(self.dim)];
        for (j, (xj, aj)) in x.iter().zip(self.anchors[i].iter()).enumerate() {
            let s = sign(xj - aj);
            if s != 0.0 {
                for g in &mut gens {
                    g[j] = s;
                }
            } else {
                let mut next = Vec::with_capacity(2 * gens.len());
                for g in &gens {
                    for s in [-1.0, 1.0] {
                        let mut v = g.clone();
                        v[j] = s;
                        next.push(v);
                    }
                }
                gens = next;
            }
        }
        Ok(gens)
    }

    fn kink_margin(&self, i: usize, x: &ParamVector) -> Result<f64> {
        check_args(self, i, x)?;
        Ok(x.iter()
            .zip(self.anchors[i].iter())
            .map(|(xj, aj)| (xj - aj).abs())
            .fold(f64::INFINITY, f64::min))
    }

    fn initial_point(&self, rng: &mut SeededRng) -> ParamVector {
        ParamVector::new(
            (0..self.dim)
                .map(|_| rng.normal(0.0, self.init_scale))
                .collect(),
        )
    }

    // ‖x − a‖₁ ≥ ‖x‖₂ − ‖a‖₂, so f(x) ≥ ‖x‖₂ − mean ‖a_i‖₂.
    fn level_set_radius(&self, level: f64) -> Option<f64> {
        let mean_norm =
            self.anchors.iter().map(ParamVector::norm2).sum::<f64>() / self.anchors.len() as f64;
        Some(level.max(0.0) + mean_norm)
    }
}
