//! One-parameter sweeps over the multi-modal model.
//!
//! Every (value, seed, fold) cell trains and evaluates one model and writes
//! its metrics to its own file under `cells/`. A cell whose file exists with
//! the current config hash is read back instead of recomputed, so an
//! interrupted sweep resumes where it stopped. The aggregate is written after
//! all cells, in grid order.

use std::path::Path;

use super::config::ExperimentConfig;
use super::output::{num, RunDir, Table};
use super::pool::parallel_map;
use super::run::train_and_evaluate;
use crate::metrics::mean_and_se;
use crate::{Error, Result};

pub const METRICS: &[&str] = &[
    "train_f1",
    "test_f1",
    "mixed_f1",
    "train_edit_distance",
    "test_edit_distance",
    "mixed_edit_distance",
    "somatosensory_d_avg",
    "somatosensory_d_rel",
    "somatosensory_d_inter",
    "somatosensory_d_intra",
    "visual_d_avg",
    "visual_d_rel",
    "epochs_auditory",
    "epochs_somatosensory",
    "epochs_visual",
    "epochs_associator",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub grid_index: usize,
    pub value: f64,
    pub seed_index: usize,
    pub fold: usize,
}

impl Cell {
    pub fn file_name(&self) -> String {
        format!("cell_g{:03}_s{:03}_f{:02}.csv", self.grid_index, self.seed_index, self.fold)
    }
}

pub fn cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    let s = &cfg.sweep;
    let mut out = Vec::new();
    for (grid_index, &value) in s.grid.iter().enumerate() {
        for seed_index in 0..s.seeds {
            for fold in 0..s.folds {
                out.push(Cell { grid_index, value, seed_index, fold });
            }
        }
    }
    out
}

/// Trains and scores one cell. Seed index `k` uses master seed `seed + k`
/// for every grid value, so cells differ only in the swept parameter.
pub fn run_cell(cfg: &ExperimentConfig, cell: &Cell) -> Result<Vec<f64>> {
    let cfg = cfg.with_value(&cfg.sweep.parameter, cell.value)?;
    let run = train_and_evaluate(&cfg, cfg.seed + cell.seed_index as u64, cell.fold, &mut |_, _| {})?;
    let e = &run.evaluation;
    let test = e.test.unwrap_or_default();
    let r = &run.report;
    Ok(vec![
        e.train.f1,
        test.f1,
        e.mixed_f1(),
        e.train.edit_distance,
        test.edit_distance,
        e.mixed_edit_distance(),
        e.somatosensory.d_avg,
        e.somatosensory.d_rel,
        e.somatosensory.d_inter,
        e.somatosensory.d_intra,
        e.visual.d_avg,
        e.visual.d_rel,
        r.auditory.epochs() as f64,
        r.somatosensory.epochs() as f64,
        r.visual.epochs() as f64,
        r.associator.epochs() as f64,
    ])
}

fn cell_table(cfg: &ExperimentConfig, cell: &Cell, metrics: &[f64]) -> Table {
    let mut header = vec!["parameter", "value", "seed_index", "fold"];
    header.extend_from_slice(METRICS);
    let mut t = Table::new(&header);
    let mut row =
        vec![cfg.sweep.parameter.clone(), num(cell.value), cell.seed_index.to_string(), cell.fold.to_string()];
    row.extend(metrics.iter().map(|v| num(*v)));
    t.push(row);
    t
}

/// Metrics of a finished cell, if its file exists and matches `hash`.
fn read_cell(path: &Path, hash: &str) -> Option<Vec<f64>> {
    let text = std::fs::read_to_string(path).ok()?;
    let (h, t) = Table::parse(&text).ok()?;
    if h != hash || t.rows.len() != 1 {
        return None;
    }
    METRICS.iter().map(|m| t.column(m).and_then(|c| t.rows[0][c].parse().ok())).collect()
}

pub struct SweepOutcome {
    pub computed: usize,
    pub reused: usize,
    pub summary: Table,
}

pub fn run_sweep(cfg: &ExperimentConfig, out: &RunDir, jobs: usize) -> Result<SweepOutcome> {
    // Reject a bad parameter before any work starts.
    cfg.with_value(&cfg.sweep.parameter, cfg.sweep.grid[0])?;
    let dir = RunDir::create(&out.file("cells"), &out.hash)?;
    let all = cells(cfg);
    let results = parallel_map(all.len(), jobs, |i| {
        let cell = &all[i];
        let path = dir.file(&cell.file_name());
        if let Some(m) = read_cell(&path, &out.hash) {
            return Ok((m, false));
        }
        let m = run_cell(cfg, cell)?;
        dir.write_csv(&cell.file_name(), &cell_table(cfg, cell, &m))?;
        eprintln!("sweep: {} = {} seed {} fold {} done", cfg.sweep.parameter, cell.value, cell.seed_index, cell.fold);
        Ok((m, true))
    });
    let mut metrics = Vec::with_capacity(all.len());
    let mut computed = 0;
    for r in results {
        let (m, fresh): (Vec<f64>, bool) = r?;
        computed += fresh as usize;
        metrics.push(m);
    }
    let summary = aggregate(cfg, &all, &metrics)?;
    out.write_csv("sweep.csv", &summary)?;
    Ok(SweepOutcome { computed, reused: all.len() - computed, summary })
}

/// Mean and standard error of every metric per grid value.
pub fn aggregate(cfg: &ExperimentConfig, all: &[Cell], metrics: &[Vec<f64>]) -> Result<Table> {
    if all.len() != metrics.len() {
        return Err(Error::Data("one metric row per cell required".into()));
    }
    let mut header = vec!["parameter".to_string(), "value".to_string(), "runs".to_string()];
    for m in METRICS {
        header.push(format!("{m}_mean"));
        header.push(format!("{m}_se"));
    }
    let mut t = Table::new(&header);
    for (g, &value) in cfg.sweep.grid.iter().enumerate() {
        let rows: Vec<&Vec<f64>> = all.iter().zip(metrics).filter(|(c, _)| c.grid_index == g).map(|(_, m)| m).collect();
        let mut row = vec![cfg.sweep.parameter.clone(), num(value), rows.len().to_string()];
        for k in 0..METRICS.len() {
            let (mean, se) = mean_and_se(&rows.iter().map(|m| m[k]).collect::<Vec<_>>());
            row.push(num(mean));
            row.push(num(se));
        }
        t.push(row);
    }
    Ok(t)
}
