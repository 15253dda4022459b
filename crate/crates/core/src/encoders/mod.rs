//! Data side: the scene grammar, phoneme spike-train encoding, and synthetic
//! proprioceptive and visual sequences.

pub mod alphabet;
mod grammar;
mod lexicon;
mod scenes;
mod sequence;
pub mod synth;
mod utterance;

pub use grammar::{enumerate_subset, grammar_enumerate, Action, Colour, Object, Triple};
pub use lexicon::{Lexicon, Segment, DEFAULT_PRONUNCIATIONS};
pub use scenes::{
    build_scenario, build_scene_dataset, split_by_triple, ScenarioSpec, SceneDataset, SceneSample, DEFAULT_NOISE,
};
pub use sequence::{EncodedSequence, Modality};
pub use synth::{cosine_dataset, synth_proprioception, synth_vision};
pub use utterance::{
    decode_indices, decode_utterance, encode_phonemes, encode_utterance, sentence_phonemes, Decoded, EncodingSpec,
};
