//! Multi-method, multi-seed training runs.
//!
//! Output layout under `output_dir`:
//! `config.toml`, `<METHOD>.csv` per method, `aggregate.csv`, and
//! `<METHOD>/seed_<n>/iter_NNN.model` plus `final.model` per run.

use std::path::PathBuf;

use super::config::ExperimentConfig;
use super::records::{aggregate, write_aggregate_csv, write_iteration_csv, AggregateRecord, IterationRecord};
use super::HarnessError;
use crate::curriculum::CurriculumKind;
use crate::ppo::{train, TrainConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedFailure {
    pub method: CurriculumKind,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<IterationRecord>,
    pub aggregate: Vec<AggregateRecord>,
    pub failures: Vec<SeedFailure>,
    pub files: Vec<PathBuf>,
}

/// Trains every (method, seed) pair and writes the result files. A failing
/// seed is recorded and the remaining seeds still run.
pub fn run_experiment(
    config: &ExperimentConfig,
    mut on_record: impl FnMut(&IterationRecord) + Send,
) -> Result<ExperimentReport, HarnessError> {
    config.validate()?;
    let out = &config.output_dir;
    std::fs::create_dir_all(out).map_err(|e| HarnessError::io(out, e))?;
    let mut files = Vec::new();
    let cfg_path = out.join("config.toml");
    std::fs::write(&cfg_path, config.to_toml_string()).map_err(|e| HarnessError::io(&cfg_path, e))?;
    files.push(cfg_path);

    let train_cfg = TrainConfig { workers: if config.deterministic { 1 } else { config.train.workers }, ..config.train };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(if config.deterministic { 1 } else { 0 })
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &kind in &config.methods {
        let label = kind.method_label();
        let mut method_rows = Vec::new();
        for &seed in &config.seeds {
            let run_dir = out.join(label).join(format!("seed_{seed}"));
            let mut seed_rows = Vec::new();
            let result = pool.install(|| {
                train(kind, &train_cfg, &config.engagement, seed, Some(&run_dir), |s, _| {
                    let rec = IterationRecord {
                        method: label.to_string(),
                        seed,
                        iteration: s.iteration,
                        stage: s.stage,
                        wins: s.tally.wins,
                        losses: s.tally.losses,
                        draws: s.tally.draws,
                    };
                    on_record(&rec);
                    seed_rows.push(rec);
                })
            });
            match result {
                Ok(r) => {
                    let p = run_dir.join("final.model");
                    r.policy.params.save(&p).map_err(|source| HarnessError::Model { path: p.clone(), source })?;
                    method_rows.extend(seed_rows);
                }
                Err(e) => failures.push(SeedFailure { method: kind, seed, message: e.to_string() }),
            }
        }
        let p = out.join(format!("{label}.csv"));
        write_iteration_csv(&p, &method_rows)?;
        files.push(p);
        rows.extend(method_rows);
    }

    let agg = aggregate(&rows);
    let p = out.join("aggregate.csv");
    write_aggregate_csv(&p, &agg)?;
    files.push(p);
    Ok(ExperimentReport { rows, aggregate: agg, failures, files })
}
