//! ρ × β grids over several seeds.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::HarnessError;
use crate::runner::{execute, write_record};

pub const DEFAULT_RHOS: [f64; 7] = [0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0];
pub const DEFAULT_BETAS: [f64; 5] = [0.8, 0.85, 0.9, 0.95, 0.99];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub rhos: Vec<f64>,
    pub betas: Vec<f64>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            rhos: DEFAULT_RHOS.to_vec(),
            betas: DEFAULT_BETAS.to_vec(),
        }
    }
}

/// Outcome of one (ρ, β, seed) run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub rho: f64,
    pub beta: f64,
    pub seed: u64,
    pub final_f: Option<f64>,
    pub error: Option<String>,
}

/// Aggregate over seeds for one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub rho: f64,
    pub beta: f64,
    pub runs: usize,
    pub failures: usize,
    pub mean_final_f: Option<f64>,
    /// Population standard deviation over the successful runs.
    pub std_final_f: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub cells: Vec<SweepCell>,
    pub rows: Vec<SweepRow>,
}

impl SweepSummary {
    pub fn row(&self, rho: f64, beta: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.rho == rho && r.beta == beta)
    }

    /// Row with the smallest mean final objective among fully successful rows.
    pub fn best_row(&self) -> Option<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.failures == 0)
            .filter_map(|r| r.mean_final_f.map(|m| (r, m)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(r, _)| r)
    }
}

fn cell_dir_name(rho: f64, beta: f64, seed: u64) -> String {
    format!("rho{rho}_beta{beta}_seed{seed}")
}

/// Runs every (ρ, β, seed) combination with at most `jobs` runs in flight.
///
/// A failing cell is recorded with its error and does not stop the sweep.
/// When `out` is given each cell writes its artifacts into its own
/// subdirectory and the sweep writes `sweep.csv`, `cells.csv` and
/// `summary.json` at the top level.
pub fn run_sweep(
    base: &RunConfig,
    grid: &SweepGrid,
    seeds: &[u64],
    jobs: usize,
    out: Option<&Path>,
) -> Result<SweepSummary, HarnessError> {
    if grid.rhos.is_empty() || grid.betas.is_empty() {
        return Err(HarnessError::config(
            "grid",
            "need at least one rho and one beta",
        ));
    }
    if seeds.is_empty() {
        return Err(HarnessError::config("seeds", "need at least one seed"));
    }
    if jobs == 0 {
        return Err(HarnessError::config("jobs", "must be at least 1"));
    }
    base.validate()?;

    let mut plan = Vec::with_capacity(grid.rhos.len() * grid.betas.len() * seeds.len());
    for &rho in &grid.rhos {
        for &beta in &grid.betas {
            for &seed in seeds {
                plan.push((rho, beta, seed));
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| HarnessError::config("jobs", e.to_string()))?;
    let cells: Vec<SweepCell> = pool.install(|| {
        plan.par_iter()
            .map(|&(rho, beta, seed)| {
                let mut config = base.clone();
                config.optimizer.rho = rho;
                config.optimizer.beta = beta;
                config.seed = seed;
                config.out = out.map(|dir| dir.join(cell_dir_name(rho, beta, seed)));
                let outcome = execute(&config).and_then(|record| {
                    if let Some(dir) = &config.out {
                        write_record(&record, dir)?;
                    }
                    Ok(record.final_f())
                });
                match outcome {
                    Ok(f) if f.is_finite() => SweepCell {
                        rho,
                        beta,
                        seed,
                        final_f: Some(f),
                        error: None,
                    },
                    Ok(f) => SweepCell {
                        rho,
                        beta,
                        seed,
                        final_f: None,
                        error: Some(format!("non-finite final objective {f}")),
                    },
                    Err(e) => SweepCell {
                        rho,
                        beta,
                        seed,
                        final_f: None,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    });

    let rows = cells
        .chunks(seeds.len())
        .map(|chunk| {
            let values: Vec<f64> = chunk.iter().filter_map(|c| c.final_f).collect();
            let (mean, std) = if values.is_empty() {
                (None, None)
            } else {
                let n = values.len() as f64;
                let mean = values.iter().sum::<f64>() / n;
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                (Some(mean), Some(var.sqrt()))
            };
            SweepRow {
                rho: chunk[0].rho,
                beta: chunk[0].beta,
                runs: chunk.len(),
                failures: chunk.len() - values.len(),
                mean_final_f: mean,
                std_final_f: std,
            }
        })
        .collect();
    let summary = SweepSummary { cells, rows };
    if let Some(dir) = out {
        write_sweep(&summary, dir)?;
    }
    Ok(summary)
}

fn write_sweep(summary: &SweepSummary, dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir.display().to_string(), e))?;
    let mut rows = csv::Writer::from_path(dir.join("sweep.csv"))?;
    for row in &summary.rows {
        rows.serialize(row)?;
    }
    rows.flush().map_err(|e| HarnessError::io("sweep.csv", e))?;
    let mut cells = csv::Writer::from_path(dir.join("cells.csv"))?;
    for cell in &summary.cells {
        cells.serialize(cell)?;
    }
    cells
        .flush()
        .map_err(|e| HarnessError::io("cells.csv", e))?;
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    std::fs::write(dir.join("summary.json"), text).map_err(|e| HarnessError::io("summary.json", e))
}
