//! Scene datasets: every grammar triple recorded several times, each variant
//! pairing one utterance with jittered proprioceptive and visual sequences.

use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::grammar::{enumerate_subset, Action, Colour, Object, Triple};
use super::lexicon::Lexicon;
use super::sequence::EncodedSequence;
use super::synth::{synth_proprioception_with, synth_vision_with, variant_length};
use super::utterance::{encode_utterance, EncodingSpec};
use crate::rng::SeedTree;
use crate::{Error, Result};

pub const DEFAULT_NOISE: f64 = 0.03;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub actions: Vec<Action>,
    pub colours: Vec<Colour>,
    pub objects: Vec<Object>,
    pub variants: usize,
    pub noise: f64,
    /// Fraction of triples (not samples) placed in the training split.
    pub train_fraction: f64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec {
            actions: Action::ALL.to_vec(),
            colours: Colour::ALL.to_vec(),
            objects: Object::ALL.to_vec(),
            variants: 4,
            noise: DEFAULT_NOISE,
            train_fraction: 0.5,
        }
    }
}

impl ScenarioSpec {
    /// Two actions, two colours and two objects.
    pub fn reduced() -> Self {
        ScenarioSpec {
            actions: vec![Action::Pull, Action::Slide],
            colours: vec![Colour::Red, Colour::Blue],
            objects: vec![Object::Apple, Object::Phone],
            ..ScenarioSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let distinct = |n: usize, m: usize| n == m && n > 0;
        if !distinct(self.actions.iter().collect::<BTreeSet<_>>().len(), self.actions.len())
            || !distinct(self.colours.iter().collect::<BTreeSet<_>>().len(), self.colours.len())
            || !distinct(self.objects.iter().collect::<BTreeSet<_>>().len(), self.objects.len())
        {
            return Err(Error::Config("scenario word lists must be non-empty and distinct".into()));
        }
        if self.variants == 0 || !(self.noise >= 0.0) || !(self.train_fraction > 0.0 && self.train_fraction <= 1.0) {
            return Err(Error::Config("scenario needs variants ≥ 1, noise ≥ 0, train_fraction in (0,1]".into()));
        }
        Ok(())
    }

    pub fn triples(&self) -> Vec<Triple> {
        enumerate_subset(&self.actions, &self.colours, &self.objects).into_iter().map(|(_, t)| t).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneSample {
    pub id: usize,
    pub triple: Triple,
    pub variant: usize,
    pub sentence: String,
    pub utterance: EncodedSequence,
    pub proprio: EncodedSequence,
    pub vision: EncodedSequence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneDataset {
    pub seed: u64,
    pub spec: ScenarioSpec,
    pub scenes: Vec<SceneSample>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Partition sample ids so that all variants of a triple share a side.
pub fn split_by_triple(scenes: &[SceneSample], train_fraction: f64, split_seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut triples: Vec<Triple> = scenes.iter().map(|s| s.triple).collect::<BTreeSet<_>>().into_iter().collect();
    triples.shuffle(&mut SeedTree::new(split_seed).stream("split", 0));
    let n_train = ((triples.len() as f64 * train_fraction).round() as usize).clamp(1, triples.len());
    let train_set: BTreeSet<Triple> = triples[..n_train].iter().copied().collect();
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for s in scenes {
        if train_set.contains(&s.triple) {
            train.push(s.id);
        } else {
            test.push(s.id);
        }
    }
    (train, test)
}

pub fn build_scenario(spec: &ScenarioSpec, seed: u64) -> Result<SceneDataset> {
    spec.validate()?;
    let tree = SeedTree::new(seed);
    let encoding = EncodingSpec::default();
    let lexicon = Lexicon::default();
    let mut scenes = Vec::new();
    for triple in spec.triples() {
        let sentence = triple.sentence();
        let utterance = encode_utterance(&sentence, &encoding, &lexicon)?;
        for variant in 0..spec.variants {
            let id = scenes.len();
            let mut rng = tree.stream("scene", id as u64);
            let length = variant_length(spec.noise, &mut rng);
            let proprio = synth_proprioception_with(triple.action, length, spec.noise, &mut rng);
            let vision = synth_vision_with(triple.colour, triple.object, length, spec.noise, &mut rng);
            scenes.push(SceneSample {
                id,
                triple,
                variant,
                sentence: sentence.clone(),
                utterance: utterance.clone(),
                proprio,
                vision,
            });
        }
    }
    let (train, test) = split_by_triple(&scenes, spec.train_fraction, tree.child("split", 0).master());
    Ok(SceneDataset { seed, spec: spec.clone(), scenes, train, test })
}

/// The full 64-triple, 4-variant dataset with a seeded 50:50 split.
pub fn build_scene_dataset(seed: u64) -> SceneDataset {
    build_scenario(&ScenarioSpec::default(), seed).expect("default scenario is valid")
}

impl SceneDataset {
    pub fn scene(&self, id: usize) -> Result<&SceneSample> {
        self.scenes.get(id).filter(|s| s.id == id).ok_or_else(|| Error::Data(format!("no scene with id {id}")))
    }

    pub fn resplit(&mut self, split_seed: u64) {
        let (train, test) = split_by_triple(&self.scenes, self.spec.train_fraction, split_seed);
        self.train = train;
        self.test = test;
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ds: SceneDataset = serde_json::from_str(text).map_err(|e| Error::Serde(e.to_string()))?;
        for (i, s) in ds.scenes.iter().enumerate() {
            if s.id != i {
                return Err(Error::Data(format!("scene {i} carries id {}", s.id)));
            }
        }
        if ds.train.iter().chain(&ds.test).any(|&i| i >= ds.scenes.len()) {
            return Err(Error::Data("split refers to a missing scene".into()));
        }
        Ok(ds)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
