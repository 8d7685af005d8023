//! Several optimizers on one problem, one seed and one permutation stream.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::HarnessError;
use crate::runner::{execute, write_record, RunRecord};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmResult {
    pub label: String,
    /// `final_f` at the end of each epoch.
    pub per_epoch_f: Vec<f64>,
    pub final_f: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub arms: Vec<ArmResult>,
}

fn labels(configs: &[RunConfig]) -> Vec<String> {
    configs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let rule = c.optimizer.rule.as_str();
            let dup = configs
                .iter()
                .filter(|o| o.optimizer.rule == c.optimizer.rule)
                .count()
                > 1;
            if dup {
                format!("{rule}#{i}")
            } else {
                rule.to_string()
            }
        })
        .collect()
}

/// Everything except the optimizer block must match, including the
/// deterministic-mode switch, so every arm consumes the same index stream.
fn check_aligned(configs: &[RunConfig]) -> Result<(), HarnessError> {
    let Some(first) = configs.first() else {
        return Err(HarnessError::config(
            "arms",
            "need at least one configuration",
        ));
    };
    for (i, c) in configs.iter().enumerate().skip(1) {
        let mismatch = if c.problem != first.problem {
            Some("problem")
        } else if c.sampler != first.sampler {
            Some("sampler")
        } else if c.seed != first.seed {
            Some("seed")
        } else if c.epochs != first.epochs {
            Some("epochs")
        } else if c.optimizer.full_gradient != first.optimizer.full_gradient {
            Some("optimizer.full_gradient")
        } else {
            None
        };
        if let Some(block) = mismatch {
            return Err(HarnessError::Optimizer(lfsgd::Error::Contract(format!(
                "arm {i} differs from arm 0 in `{block}`; compared runs may differ only in the optimizer block"
            ))));
        }
    }
    Ok(())
}

/// Runs every arm and returns aligned per-epoch objective series. When
/// `out` is given, each arm writes its artifacts into `out/<label>/` and
/// the aligned table goes to `out/comparison.csv`.
pub fn compare_optimizers(
    configs: &[RunConfig],
    out: Option<&Path>,
) -> Result<(Comparison, Vec<RunRecord>), HarnessError> {
    check_aligned(configs)?;
    let names = labels(configs);
    let mut records = Vec::with_capacity(configs.len());
    let mut arms = Vec::with_capacity(configs.len());
    for (config, label) in configs.iter().zip(&names) {
        let record = execute(config)?;
        if let Some(dir) = out {
            write_record(&record, &dir.join(label))?;
        }
        arms.push(ArmResult {
            label: label.clone(),
            per_epoch_f: record.summary.epochs.iter().map(|e| e.final_f).collect(),
            final_f: record.final_f(),
        });
        records.push(record);
    }
    let comparison = Comparison { arms };
    if let Some(dir) = out {
        write_table(&comparison, dir)?;
    }
    Ok((comparison, records))
}

fn write_table(comparison: &Comparison, dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir.display().to_string(), e))?;
    let mut w = csv::Writer::from_path(dir.join("comparison.csv"))?;
    let mut header = vec!["epoch".to_string()];
    header.extend(comparison.arms.iter().map(|a| a.label.clone()));
    w.write_record(&header)?;
    let epochs = comparison
        .arms
        .iter()
        .map(|a| a.per_epoch_f.len())
        .max()
        .unwrap_or(0);
    for e in 0..epochs {
        let mut row = vec![e.to_string()];
        for arm in &comparison.arms {
            row.push(
                arm.per_epoch_f
                    .get(e)
                    .map(|v| v.to_string())
                    .unwrap_or_default(),
            );
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| HarnessError::io("comparison.csv", e))
}
