//! Per-iteration result rows and their across-seed aggregates.
//!
//! Raw file columns: `method,seed,iteration,stage,wins,losses,draws`.
//! Aggregate file columns:
//! `method,iteration,seeds,win_mean,win_std,loss_mean,loss_std,draw_mean,draw_std`,
//! where the standard deviations are population (divide by the seed count).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use super::HarnessError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub method: String,
    pub seed: u64,
    pub iteration: usize,
    pub stage: usize,
    pub wins: u64,
    pub losses: u64,
    pub draws: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRecord {
    pub method: String,
    pub iteration: usize,
    pub seeds: usize,
    pub win_mean: f64,
    pub win_std: f64,
    pub loss_mean: f64,
    pub loss_std: f64,
    pub draw_mean: f64,
    pub draw_std: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Groups rows by (method, iteration) and summarises across seeds.
pub fn aggregate(rows: &[IterationRecord]) -> Vec<AggregateRecord> {
    let mut groups: BTreeMap<(&str, usize), Vec<&IterationRecord>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.method.as_str(), r.iteration)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((method, iteration), g)| {
            let col = |f: fn(&IterationRecord) -> u64| mean_std(&g.iter().map(|r| f(r) as f64).collect::<Vec<_>>());
            let (win_mean, win_std) = col(|r| r.wins);
            let (loss_mean, loss_std) = col(|r| r.losses);
            let (draw_mean, draw_std) = col(|r| r.draws);
            AggregateRecord {
                method: method.to_string(),
                iteration,
                seeds: g.len(),
                win_mean,
                win_std,
                loss_mean,
                loss_std,
                draw_mean,
                draw_std,
            }
        })
        .collect()
}

fn write_csv<R: Serialize>(path: &Path, rows: &[R], header: &[&str]) -> Result<(), HarnessError> {
    let err = |e: csv::Error| HarnessError::Parse { path: path.to_path_buf(), message: e.to_string() };
    let file = std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    // Header is written explicitly so empty files still carry the schema.
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

fn read_csv<R: DeserializeOwned>(path: &Path, header: &[&str]) -> Result<Vec<R>, HarnessError> {
    let err = |message: String| HarnessError::Parse { path: path.to_path_buf(), message };
    let mut rdr = csv::Reader::from_path(path).map_err(|e| err(e.to_string()))?;
    let found: Vec<String> = rdr.headers().map_err(|e| err(e.to_string()))?.iter().map(str::to_string).collect();
    if found != header {
        return Err(err(format!("unexpected header {found:?}, expected {header:?}")));
    }
    rdr.deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| err(format!("row {}: {e}", i + 2))))
        .collect()
}

pub const ITERATION_HEADER: [&str; 7] = ["method", "seed", "iteration", "stage", "wins", "losses", "draws"];
pub const AGGREGATE_HEADER: [&str; 9] =
    ["method", "iteration", "seeds", "win_mean", "win_std", "loss_mean", "loss_std", "draw_mean", "draw_std"];

pub fn write_iteration_csv(path: &Path, rows: &[IterationRecord]) -> Result<(), HarnessError> {
    write_csv(path, rows, &ITERATION_HEADER)
}

pub fn read_iteration_csv(path: &Path) -> Result<Vec<IterationRecord>, HarnessError> {
    read_csv(path, &ITERATION_HEADER)
}

pub fn write_aggregate_csv(path: &Path, rows: &[AggregateRecord]) -> Result<(), HarnessError> {
    write_csv(path, rows, &AGGREGATE_HEADER)
}

pub fn read_aggregate_csv(path: &Path) -> Result<Vec<AggregateRecord>, HarnessError> {
    read_csv(path, &AGGREGATE_HEADER)
}
