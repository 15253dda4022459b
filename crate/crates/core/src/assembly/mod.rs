//! The multi-modal model: an utterance generator and two sensory abstractors
//! whose Csc codes are linked by a cell-assembly associator.
//!
//! Training runs the three networks independently, then fits the associator
//! from the sensory final states of each scene to the initial auditory state
//! of its sentence. Production abstracts new percepts, associates them and
//! lets the generator speak from the associated initial state.

mod associator;
mod evaluate;
mod model;
mod spec;

pub use associator::{
    associator_step, fit_associator, AssociationPair, Associator, AssociatorGradients, AssociatorState,
};
pub use evaluate::{
    describe_scenes, evaluate, score, sentence_words, CscGeometry, Evaluation, SceneOutcome, SplitScores,
};
pub use model::{
    complete_model, train_abstraction_net, train_generation_net, train_model, train_sensory, ModelReport,
    MultiModalModel, OptimizerStates, Production, Stage, StageResult, TrainingSet,
};
pub use spec::{ModelSpec, NetSpec};
