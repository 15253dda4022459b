//! The cosine toy experiment: four phase-shifted cosine sequences abstracted
//! by a small context-abstraction net, repeated over a grid of
//! self-organisation forcing constants and seeds.

use super::config::CosineConfig;
use super::pool::parallel_map;
use crate::encoders::cosine_dataset;
use crate::metrics::{d_avg, d_rel, mean_and_se};
use crate::net::{CscKind, CscStore, Direction, IoActivation};
use crate::rng::SeedTree;
use crate::train::{Network, Trainer};
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct CosineRun {
    pub psi: f64,
    pub seed_index: usize,
    pub epochs: usize,
    pub converged: bool,
    pub final_error: f64,
    pub d_avg: f64,
    pub d_rel: f64,
    /// Final Csc target patterns, one per sequence.
    pub patterns: Vec<Vec<f64>>,
}

/// One net. Seed index `k` gives the same initial weights and Csc targets for
/// every `psi`, so the grid compares like with like.
pub fn run_one(cfg: &CosineConfig, master: u64, psi: f64, seed_index: usize) -> Result<CosineRun> {
    let tree = SeedTree::new(master).child("cosine", seed_index as u64);
    let topology = cfg.net.topology(Direction::ContextAbstraction, IoActivation::Sigmoid)?;
    let data: Vec<_> = cosine_dataset().into_iter().map(|s| s.data).collect();
    let net = Network::random(topology.clone(), cfg.weight_range, &mut tree.stream("init", 0))?;
    let csc = CscStore::random(
        CscKind::Final,
        data.len(),
        topology.csc_count,
        cfg.net.csc_init_range,
        &mut tree.stream("csc", 0),
    );
    let mut hyper = cfg.net.hyper.clone();
    hyper.psi = psi;
    let mut trainer = Trainer::new(net, csc, data, hyper)?;
    let report = trainer.run()?;
    let patterns = trainer.csc.values;
    Ok(CosineRun {
        psi,
        seed_index,
        epochs: report.epochs(),
        converged: report.converged,
        final_error: report.records.last().map_or(f64::NAN, |r| r.normalised_error),
        d_avg: d_avg(&patterns)?,
        d_rel: d_rel(&patterns)?.value,
        patterns,
    })
}

/// All (psi, seed) runs, ordered by psi then seed whatever `jobs` is.
pub fn run_grid(cfg: &CosineConfig, master: u64, jobs: usize) -> Result<Vec<CosineRun>> {
    let cells: Vec<(f64, usize)> = cfg.psi.iter().flat_map(|&p| (0..cfg.seeds).map(move |s| (p, s))).collect();
    parallel_map(cells.len(), jobs, |i| run_one(cfg, master, cells[i].0, cells[i].1)).into_iter().collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CosineSummary {
    pub psi: f64,
    pub runs: usize,
    pub d_avg: (f64, f64),
    pub d_rel: (f64, f64),
    pub epochs: (f64, f64),
    pub converged: usize,
}

/// Mean and standard error per psi, in grid order.
pub fn summarise(psis: &[f64], runs: &[CosineRun]) -> Vec<CosineSummary> {
    psis.iter()
        .map(|&psi| {
            let cell: Vec<&CosineRun> = runs.iter().filter(|r| r.psi == psi).collect();
            let stat = |f: fn(&CosineRun) -> f64| mean_and_se(&cell.iter().map(|r| f(r)).collect::<Vec<_>>());
            CosineSummary {
                psi,
                runs: cell.len(),
                d_avg: stat(|r| r.d_avg),
                d_rel: stat(|r| r.d_rel),
                epochs: stat(|r| r.epochs as f64),
                converged: cell.iter().filter(|r| r.converged).count(),
            }
        })
        .collect()
}
