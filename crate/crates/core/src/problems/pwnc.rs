//! Piecewise nonconvex toy:
//! `f_i(x) = min(‖x − c_i‖², ‖x + c_i‖²)`.
//!
//! Each component is the pointwise minimum of two quadratics centred at the
//! branch centres `±c_i` (branch 0 is `+c_i`). On the region where branch
//! signs `s_i` are active the average is `mean ‖x − s_i c_i‖²`, so its only
//! candidate critical point is `mean(s_i c_i)`; the stationary set is
//! enumerable by branch analysis for small `N`.

use serde::{Deserialize, Serialize};

use super::{
    check_args, require_finite_nonneg, require_positive, FiniteSumProblem, SubgradientSample,
};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::vector::ParamVector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PwncConfig {
    pub dim: usize,
    pub n: usize,
    pub seed: u64,
    /// Centres are drawn i.i.d. `N(0, center_std² I)`.
    pub center_std: f64,
    pub init_scale: f64,
    pub x0: Option<Vec<f64>>,
}

impl Default for PwncConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            n: 8,
            seed: 0,
            center_std: 1.0,
            init_scale: 2.0,
            x0: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PiecewiseNonconvex {
    centers: Vec<ParamVector>,
    dim: usize,
    init_scale: f64,
}

impl PiecewiseNonconvex {
    pub fn from_config(cfg: &PwncConfig) -> Result<Self> {
        require_positive("problem.dim", cfg.dim)?;
        require_positive("problem.n", cfg.n)?;
        require_finite_nonneg("problem.center_std", cfg.center_std)?;
        require_finite_nonneg("problem.init_scale", cfg.init_scale)?;
        let mut rng = SeededRng::new(cfg.seed);
        let centers = (0..cfg.n)
            .map(|_| {
                ParamVector::new(
                    (0..cfg.dim)
                        .map(|_| rng.normal(0.0, cfg.center_std))
                        .collect(),
                )
            })
            .collect();
        Ok(Self {
            centers,
            dim: cfg.dim,
            init_scale: cfg.init_scale,
        })
    }

    pub fn from_centers(centers: Vec<Vec<f64>>) -> Result<Self> {
        let dim = centers.first().map(Vec::len).unwrap_or(0);
        if centers.is_empty() || dim == 0 || centers.iter().any(|c| c.len() != dim) {
            return Err(Error::config(
                "problem.centers",
                "need equal-length nonempty centres",
            ));
        }
        Ok(Self {
            centers: centers.into_iter().map(ParamVector::new).collect(),
            dim,
            init_scale: 1.0,
        })
    }

    pub fn centers(&self) -> &[ParamVector] {
        &self.centers
    }

    /// Squared distances to the `+c_i` and `−c_i` branch centres.
    fn branch_values(&self, i: usize, x: &ParamVector) -> (f64, f64) {
        let mut plus = 0.0;
        let mut minus = 0.0;
        for (xj, cj) in x.iter().zip(self.centers[i].iter()) {
            plus += (xj - cj) * (xj - cj);
            minus += (xj + cj) * (xj + cj);
        }
        (plus, minus)
    }

    fn branch_gradient(&self, i: usize, x: &ParamVector, sign: f64) -> ParamVector {
        ParamVector::new(
            x.iter()
                .zip(self.centers[i].iter())
                .map(|(xj, cj)| 2.0 * (xj - sign * cj))
                .collect(),
        )
    }
}

impl FiniteSumProblem for PiecewiseNonconvex {
    fn name(&self) -> &str {
        "pwnc"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn num_components(&self) -> usize {
        self.centers.len()
    }

    fn component_value(&self, i: usize, x: &ParamVector) -> Result<f64> {
        check_args(self, i, x)?;
        let (plus, minus) = self.branch_values(i, x);
        Ok(plus.min(minus))
    }

    fn component_subgrad(&self, i: usize, x: &ParamVector) -> Result<SubgradientSample> {
        check_args(self, i, x)?;
        let (plus, minus) = self.branch_values(i, x);
        // ties go to branch 0
        let sign = if plus <= minus { 1.0 } else { -1.0 };
        Ok(SubgradientSample {
            vector: self.branch_gradient(i, x, sign),
            component_index: i,
        })
    }

    fn component_generators(&self, i: usize, x: &ParamVector) -> Result<Vec<ParamVector>> {
        check_args(self, i, x)?;
        let (plus, minus) = self.branch_values(i, x);
        Ok(if plus == minus {
            vec![
                self.branch_gradient(i, x, 1.0),
                self.branch_gradient(i, x, -1.0),
            ]
        } else if plus < minus {
            vec![self.branch_gradient(i, x, 1.0)]
        } else {
            vec![self.branch_gradient(i, x, -1.0)]
        })
    }

    fn kink_margin(&self, i: usize, x: &ParamVector) -> Result<f64> {
        check_args(self, i, x)?;
        let (plus, minus) = self.branch_values(i, x);
        Ok((plus - minus).abs())
    }

    fn initial_point(&self, rng: &mut SeededRng) -> ParamVector {
        ParamVector::new(
            (0..self.dim)
                .map(|_| rng.normal(0.0, self.init_scale))
                .collect(),
        )
    }

    // For ‖x‖ ≥ max ‖c_i‖ each branch minimum is at least (‖x‖ − ‖c_i‖)², so
    // f ≤ r forces (‖x‖ − mean‖c‖)² ≤ r − mean‖c‖² + (mean‖c‖)².
    fn level_set_radius(&self, level: f64) -> Option<f64> {
        let n = self.centers.len() as f64;
        let norms: Vec<f64> = self.centers.iter().map(ParamVector::norm2).collect();
        let max_norm = norms.iter().copied().fold(0.0, f64::max);
        let mean_norm = norms.iter().sum::<f64>() / n;
        let mean_sq = norms.iter().map(|v| v * v).sum::<f64>() / n;
        let slack = (level - mean_sq + mean_norm * mean_norm).max(0.0);
        Some(max_norm.max(mean_norm + slack.sqrt()))
    }

    // ‖x ∓ c‖² ≥ ‖x‖² − 2‖x‖‖c‖ + ‖c‖² ≥ ½‖x‖² − ‖c‖²
    fn coercivity_witness(&self) -> Option<(f64, f64)> {
        let n = self.centers.len() as f64;
        let mean_sq = self
            .centers
            .iter()
            .map(ParamVector::norm2_squared)
            .sum::<f64>()
            / n;
        Some((0.5, mean_sq))
    }
}
