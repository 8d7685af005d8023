//! Epoch index streams.
//!
//! Every epoch visits each component index exactly once, either in identity
//! order or in a fresh Fisher–Yates permutation, optionally cut into
//! consecutive mini-batches. The last short batch is kept.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    RandomReshuffle,
    Sequential,
    MinibatchReshuffle,
}

/// Sampler block of a run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    pub kind: SamplerKind,
    pub batch: usize,
    /// Permutation seed; `None` means "use the run seed".
    pub seed: Option<u64>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            kind: SamplerKind::RandomReshuffle,
            batch: 1,
            seed: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IndexSchedule {
    kind: SamplerKind,
    n: usize,
    batch: usize,
    rng: SeededRng,
    epochs: u64,
}

impl IndexSchedule {
    pub fn new(kind: SamplerKind, n: usize, batch: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("problem.n", "need at least one component"));
        }
        let batch = match kind {
            SamplerKind::MinibatchReshuffle => batch,
            _ => {
                if batch != 1 {
                    return Err(Error::config(
                        "sampler.batch",
                        "batch > 1 requires kind minibatch_reshuffle",
                    ));
                }
                1
            }
        };
        if batch == 0 || batch > n {
            return Err(Error::config(
                "sampler.batch",
                format!("batch must lie in 1..={n}, got {batch}"),
            ));
        }
        Ok(Self {
            kind,
            n,
            batch,
            rng: SeededRng::new(seed),
            epochs: 0,
        })
    }

    pub fn from_config(cfg: &SamplerConfig, n: usize, run_seed: u64) -> Result<Self> {
        Self::new(cfg.kind, n, cfg.batch, cfg.seed.unwrap_or(run_seed))
    }

    pub fn kind(&self) -> SamplerKind {
        self.kind
    }

    pub fn num_components(&self) -> usize {
        self.n
    }

    pub fn batch(&self) -> usize {
        self.batch
    }

    /// Number of groups per epoch.
    pub fn groups_per_epoch(&self) -> usize {
        self.n.div_ceil(self.batch)
    }

    pub fn epochs_drawn(&self) -> u64 {
        self.epochs
    }

    /// Words consumed from the owned random stream so far.
    pub fn rng_position(&self) -> u64 {
        self.rng.position()
    }

    pub fn next_epoch(&mut self) -> Result<Vec<Vec<usize>>> {
        let order = match self.kind {
            SamplerKind::Sequential => (0..self.n).collect(),
            SamplerKind::RandomReshuffle | SamplerKind::MinibatchReshuffle => {
                self.rng.permutation(self.n)?
            }
        };
        self.epochs += 1;
        Ok(order.chunks(self.batch).map(<[usize]>::to_vec).collect())
    }
}
