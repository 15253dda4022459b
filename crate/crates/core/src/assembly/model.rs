use serde::{Deserialize, Serialize};

use super::associator::{fit_associator, AssociationPair, Associator, AssociatorState};
use super::spec::{ModelSpec, NetSpec};
use crate::encoders::{decode_utterance, Decoded, EncodingSpec, Lexicon, SceneDataset};
use crate::net::{run_sequence, CscKind, CscStore, Direction, Drive, IoActivation};
use crate::rng::SeedTree;
use crate::train::{EpochRecord, Network, OptimizerState, TrainReport, Trainer};
use crate::{Error, Matrix, Result};

/// The sequences one model is trained on, grouped per modality.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSet {
    /// Distinct sentences, in order of first appearance.
    pub utterances: Vec<String>,
    pub utterance_data: Vec<Matrix>,
    pub scene_ids: Vec<usize>,
    /// Index into `utterances` for every scene.
    pub scene_utterance: Vec<usize>,
    pub proprio: Vec<Matrix>,
    pub vision: Vec<Matrix>,
}

impl TrainingSet {
    pub fn from_scenes(dataset: &SceneDataset, ids: &[usize]) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::Data("no training scenes selected".into()));
        }
        let mut set = TrainingSet {
            utterances: Vec::new(),
            utterance_data: Vec::new(),
            scene_ids: Vec::new(),
            scene_utterance: Vec::new(),
            proprio: Vec::new(),
            vision: Vec::new(),
        };
        for &id in ids {
            let s = dataset.scene(id)?;
            let u = match set.utterances.iter().position(|x| x == &s.sentence) {
                Some(u) => u,
                None => {
                    set.utterances.push(s.sentence.clone());
                    set.utterance_data.push(s.utterance.data.clone());
                    set.utterances.len() - 1
                }
            };
            set.scene_ids.push(id);
            set.scene_utterance.push(u);
            set.proprio.push(s.proprio.data.clone());
            set.vision.push(s.vision.data.clone());
        }
        Ok(set)
    }

    pub fn longest_utterance(&self) -> usize {
        self.utterance_data.iter().map(Matrix::rows).max().unwrap_or(0)
    }
}

/// A trained network with its Csc store and training history.
#[derive(Clone, Debug)]
pub struct StageResult {
    pub net: Network,
    pub csc: CscStore,
    pub optimizer: OptimizerState,
    pub report: TrainReport,
}

fn train_stage(
    spec: &NetSpec,
    direction: Direction,
    io_activation: IoActivation,
    weight_range: f64,
    sequences: Vec<Matrix>,
    seeds: &SeedTree,
    on_epoch: &mut dyn FnMut(&EpochRecord),
) -> Result<StageResult> {
    let topology = spec.topology(direction, io_activation)?;
    let kind = match direction {
        Direction::ContextBias => CscKind::Initial,
        Direction::ContextAbstraction => CscKind::Final,
    };
    let net = Network::random(topology.clone(), weight_range, &mut seeds.stream("init", 0))?;
    let csc =
        CscStore::random(kind, sequences.len(), topology.csc_count, spec.csc_init_range, &mut seeds.stream("csc", 0));
    let mut trainer = Trainer::new(net, csc, sequences, spec.hyper.clone())?;
    let report = trainer.run_with(on_epoch)?;
    Ok(StageResult { net: trainer.net, csc: trainer.csc, optimizer: trainer.optimizer, report })
}

/// Trains the utterance generator: softmax IO, one initial state per sentence.
pub fn train_generation_net(
    spec: &NetSpec,
    weight_range: f64,
    utterances: Vec<Matrix>,
    seeds: &SeedTree,
    on_epoch: &mut dyn FnMut(&EpochRecord),
) -> Result<StageResult> {
    let act = IoActivation::DecisiveNormalisation;
    train_stage(spec, Direction::ContextBias, act, weight_range, utterances, seeds, on_epoch)
}

/// Trains a sensory abstractor: sigmoid IO, one final state per sequence.
pub fn train_abstraction_net(
    spec: &NetSpec,
    weight_range: f64,
    sequences: Vec<Matrix>,
    seeds: &SeedTree,
    on_epoch: &mut dyn FnMut(&EpochRecord),
) -> Result<StageResult> {
    let act = IoActivation::Sigmoid;
    train_stage(spec, Direction::ContextAbstraction, act, weight_range, sequences, seeds, on_epoch)
}

/// Three modality networks joined by the cell-assembly associator.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiModalModel {
    pub spec: ModelSpec,
    pub auditory: Network,
    pub somatosensory: Network,
    pub visual: Network,
    pub utterances: Vec<String>,
    /// Initial auditory Csc state per entry of `utterances`.
    pub auditory_csc: CscStore,
    /// Training scene ids, in the order of the sensory Csc stores.
    pub scene_ids: Vec<usize>,
    pub scene_utterance: Vec<usize>,
    pub somatosensory_csc: CscStore,
    pub visual_csc: CscStore,
    pub associator: Associator,
    pub generation_steps: usize,
}

#[derive(Clone, Debug, Default)]
pub struct ModelReport {
    pub auditory: TrainReport,
    pub somatosensory: TrainReport,
    pub visual: TrainReport,
    pub associator: TrainReport,
    pub optimizers: Option<OptimizerStates>,
}

/// Learning-rate state of every trained part, as training left it.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerStates {
    pub auditory: OptimizerState,
    pub somatosensory: OptimizerState,
    pub visual: OptimizerState,
    pub associator: AssociatorState,
}

/// Which part of the model an epoch record belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Auditory,
    Somatosensory,
    Visual,
    Associator,
}

impl Stage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Auditory => "auditory",
            Stage::Somatosensory => "somatosensory",
            Stage::Visual => "visual",
            Stage::Associator => "associator",
        }
    }
}

/// What the model perceived and said for one scene.
#[derive(Clone, Debug, PartialEq)]
pub struct Production {
    pub somatosensory: Vec<f64>,
    pub visual: Vec<f64>,
    pub auditory_c0: Vec<f64>,
    pub decoded: Decoded,
}

/// Trains all three networks and the associator on one training set.
/// Every network draws from its own branch of `seeds`.
pub fn train_model(
    spec: &ModelSpec,
    set: &TrainingSet,
    seeds: &SeedTree,
    on_epoch: &mut dyn FnMut(Stage, &EpochRecord),
) -> Result<(MultiModalModel, ModelReport)> {
    spec.validate()?;
    let w = spec.weight_range;
    let aud =
        train_generation_net(&spec.auditory, w, set.utterance_data.clone(), &seeds.child("auditory", 0), &mut |r| {
            on_epoch(Stage::Auditory, r)
        })?;
    let (som, vis) = train_sensory(spec, set, seeds, on_epoch)?;
    complete_model(spec, set, aud, som, vis, &mut |r| on_epoch(Stage::Associator, r))
}

/// Assembles trained networks and fits the associator.
pub fn complete_model(
    spec: &ModelSpec,
    set: &TrainingSet,
    auditory: StageResult,
    somatosensory: StageResult,
    visual: StageResult,
    on_epoch: &mut dyn FnMut(&EpochRecord),
) -> Result<(MultiModalModel, ModelReport)> {
    let mut report = ModelReport {
        auditory: auditory.report.clone(),
        somatosensory: somatosensory.report.clone(),
        visual: visual.report.clone(),
        ..ModelReport::default()
    };
    let optimizers = (auditory.optimizer.clone(), somatosensory.optimizer.clone(), visual.optimizer.clone());
    let mut model = MultiModalModel::assemble(spec, set, auditory, somatosensory, visual)?;
    let (assoc, state) = model.train_associator(on_epoch)?;
    report.associator = assoc;
    report.optimizers = Some(OptimizerStates {
        auditory: optimizers.0,
        somatosensory: optimizers.1,
        visual: optimizers.2,
        associator: state,
    });
    Ok((model, report))
}

/// Trains the two sensory abstractors of a model.
pub fn train_sensory(
    spec: &ModelSpec,
    set: &TrainingSet,
    seeds: &SeedTree,
    on_epoch: &mut dyn FnMut(Stage, &EpochRecord),
) -> Result<(StageResult, StageResult)> {
    let w = spec.weight_range;
    let som = train_abstraction_net(
        &spec.somatosensory,
        w,
        set.proprio.clone(),
        &seeds.child("somatosensory", 0),
        &mut |r| on_epoch(Stage::Somatosensory, r),
    )?;
    let vis = train_abstraction_net(&spec.visual, w, set.vision.clone(), &seeds.child("visual", 0), &mut |r| {
        on_epoch(Stage::Visual, r)
    })?;
    Ok((som, vis))
}

impl MultiModalModel {
    /// Joins trained networks into a model with an untrained associator.
    pub fn assemble(
        spec: &ModelSpec,
        set: &TrainingSet,
        auditory: StageResult,
        somatosensory: StageResult,
        visual: StageResult,
    ) -> Result<Self> {
        let n = set.scene_ids.len();
        if auditory.csc.len() != set.utterances.len() || somatosensory.csc.len() != n || visual.csc.len() != n {
            return Err(Error::Data("Csc stores do not match the training set".into()));
        }
        let associator = Associator::zeros(
            auditory.net.topology.csc_count,
            somatosensory.net.topology.csc_count,
            visual.net.topology.csc_count,
        );
        Ok(MultiModalModel {
            spec: spec.clone(),
            auditory: auditory.net,
            somatosensory: somatosensory.net,
            visual: visual.net,
            utterances: set.utterances.clone(),
            auditory_csc: auditory.csc,
            scene_ids: set.scene_ids.clone(),
            scene_utterance: set.scene_utterance.clone(),
            somatosensory_csc: somatosensory.csc,
            visual_csc: visual.csc,
            associator,
            generation_steps: set.longest_utterance().saturating_sub(1) + spec.generation_margin,
        })
    }

    /// One association pair per training scene from the stored Csc states.
    pub fn association_pairs(&self) -> Result<Vec<AssociationPair>> {
        (0..self.scene_ids.len())
            .map(|k| {
                let u =
                    *self.scene_utterance.get(k).ok_or_else(|| Error::Data(format!("scene {k} has no utterance")))?;
                Ok(AssociationPair {
                    somatosensory: self.somatosensory_csc.get(k)?.to_vec(),
                    visual: self.visual_csc.get(k)?.to_vec(),
                    auditory: self.auditory_csc.get(u)?.to_vec(),
                })
            })
            .collect()
    }

    /// Fits the associator on the stored Csc states of all training scenes.
    pub fn train_associator(
        &mut self,
        on_epoch: &mut dyn FnMut(&EpochRecord),
    ) -> Result<(TrainReport, AssociatorState)> {
        let pairs = self.association_pairs()?;
        let (report, state) = fit_associator(&mut self.associator, &pairs, &self.spec.associator)?;
        for r in &report.records {
            on_epoch(r);
        }
        Ok((report, state))
    }

    /// Final Csc states of both abstractors, shifted by the Csc biases so they
    /// are comparable with the stored target states.
    pub fn abstract_percepts(&self, proprio: &Matrix, vision: &Matrix) -> Result<(Vec<f64>, Vec<f64>)> {
        Ok((abstraction(&self.somatosensory, proprio)?, abstraction(&self.visual, vision)?))
    }

    pub fn associate(&self, somatosensory: &[f64], visual: &[f64]) -> Result<Vec<f64>> {
        self.associator.associate(somatosensory, visual)
    }

    /// Closed-loop IO outputs for `t = 0..=generation_steps`.
    pub fn generate(&self, c0: &[f64]) -> Result<Matrix> {
        let topo = &self.auditory.topology;
        let traj = run_sequence(topo, &self.auditory.params, Some(c0), Drive::ClosedLoop, self.generation_steps)?;
        Ok(traj.io_outputs(topo))
    }

    pub fn describe(&self, c0: &[f64], encoding: &EncodingSpec, lexicon: &Lexicon) -> Result<Decoded> {
        decode_utterance(&self.generate(c0)?, encoding, lexicon)
    }

    /// Abstract both percepts, associate them with an auditory initial state
    /// and speak from it.
    pub fn perceive_and_describe(
        &self,
        proprio: &Matrix,
        vision: &Matrix,
        encoding: &EncodingSpec,
        lexicon: &Lexicon,
    ) -> Result<Production> {
        let (s, v) = self.abstract_percepts(proprio, vision)?;
        let c0 = self.associate(&s, &v)?;
        let decoded = self.describe(&c0, encoding, lexicon)?;
        Ok(Production { somatosensory: s, visual: v, auditory_c0: c0, decoded })
    }
}

fn abstraction(net: &Network, input: &Matrix) -> Result<Vec<f64>> {
    let topo = &net.topology;
    if input.cols() != topo.io_count {
        return Err(Error::Argument(format!("input has {} channels, network expects {}", input.cols(), topo.io_count)));
    }
    let traj = run_sequence(topo, &net.params, None, Drive::Clamped(input), input.rows())?;
    let b = &net.params.biases()[topo.csc_range()];
    Ok(traj.final_csc(topo).iter().zip(b).map(|(z, b)| z - b).collect())
}
