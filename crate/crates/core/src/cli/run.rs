//! Training one model on the configured scenario.

use super::config::ExperimentConfig;
use crate::assembly::{evaluate, train_model, Evaluation, ModelReport, MultiModalModel, Stage, TrainingSet};
use crate::encoders::{build_scenario, Lexicon, SceneDataset};
use crate::rng::SeedTree;
use crate::train::EpochRecord;
use crate::Result;

/// The scenario for `seed`. Fold 0 is the split drawn with the dataset; other
/// folds redraw the triple split from their own stream.
pub fn scenario_dataset(cfg: &ExperimentConfig, seed: u64, fold: usize) -> Result<SceneDataset> {
    let mut ds = build_scenario(&cfg.scenario, seed)?;
    if fold > 0 {
        ds.resplit(SeedTree::new(seed).child("fold", fold as u64).master());
    }
    Ok(ds)
}

pub struct TrainedRun {
    pub dataset: SceneDataset,
    pub model: MultiModalModel,
    pub report: ModelReport,
    pub evaluation: Evaluation,
}

/// Trains on the training split of the scenario and evaluates on both splits.
pub fn train_and_evaluate(
    cfg: &ExperimentConfig,
    seed: u64,
    fold: usize,
    on_epoch: &mut dyn FnMut(Stage, &EpochRecord),
) -> Result<TrainedRun> {
    let dataset = scenario_dataset(cfg, seed, fold)?;
    let set = TrainingSet::from_scenes(&dataset, &dataset.train)?;
    let (model, report) = train_model(&cfg.model, &set, &SeedTree::new(seed), on_epoch)?;
    let evaluation = evaluate(&model, &dataset, &dataset.test, &cfg.encoding, &Lexicon::default())?;
    Ok(TrainedRun { dataset, model, report, evaluation })
}
