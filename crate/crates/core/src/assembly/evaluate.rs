//! Scoring a trained model on the scenes of a dataset.

use super::model::MultiModalModel;
use crate::encoders::alphabet::PHONEMES;
use crate::encoders::{sentence_phonemes, Decoded, EncodingSpec, Lexicon, SceneDataset};
use crate::metrics::{cluster_distances, d_avg, d_rel, f1_word, mixed, normalised_edit_distance};
use crate::{Error, Result};

/// What the model said for one scene and how close it came.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneOutcome {
    pub scene_id: usize,
    pub target: String,
    pub produced: Decoded,
    pub f1: f64,
    /// Phoneme edit distance divided by the target length.
    pub edit_distance: f64,
}

impl SceneOutcome {
    pub fn exact(&self) -> bool {
        self.edit_distance == 0.0 && self.f1 == 1.0
    }
}

/// Mean scores over a set of scenes.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SplitScores {
    pub scenes: usize,
    pub f1: f64,
    pub edit_distance: f64,
    /// Scenes reproduced word for word and phoneme for phoneme.
    pub exact: usize,
}

/// Geometry of one sensory Csc space over the training scenes.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CscGeometry {
    pub d_avg: f64,
    pub d_rel: f64,
    pub d_inter: f64,
    pub d_intra: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub train: SplitScores,
    pub test: Option<SplitScores>,
    /// Clustered by action.
    pub somatosensory: CscGeometry,
    /// Clustered by object.
    pub visual: CscGeometry,
}

impl Evaluation {
    /// Train and test averaged with equal weight; the train value alone
    /// when there is no test split.
    pub fn mixed_f1(&self) -> f64 {
        self.test.map_or(self.train.f1, |t| mixed(self.train.f1, t.f1))
    }

    pub fn mixed_edit_distance(&self) -> f64 {
        self.test.map_or(self.train.edit_distance, |t| mixed(self.train.edit_distance, t.edit_distance))
    }
}

/// Target words of a sentence, without the terminal mark.
pub fn sentence_words(sentence: &str) -> Vec<String> {
    sentence.trim_end_matches(['.', '!', '?']).split_whitespace().map(str::to_string).collect()
}

/// Perceives and describes each listed scene.
pub fn describe_scenes(
    model: &MultiModalModel,
    dataset: &SceneDataset,
    ids: &[usize],
    encoding: &EncodingSpec,
    lexicon: &Lexicon,
) -> Result<Vec<SceneOutcome>> {
    ids.iter()
        .map(|&id| {
            let scene = dataset.scene(id)?;
            let produced =
                model.perceive_and_describe(&scene.proprio.data, &scene.vision.data, encoding, lexicon)?.decoded;
            let target_phonemes: Vec<String> =
                sentence_phonemes(&scene.sentence, lexicon)?.into_iter().map(|p| PHONEMES[p].to_string()).collect();
            Ok(SceneOutcome {
                scene_id: id,
                target: scene.sentence.clone(),
                f1: f1_word(&produced.words, &sentence_words(&scene.sentence)),
                edit_distance: normalised_edit_distance(&produced.phonemes, &target_phonemes),
                produced,
            })
        })
        .collect()
}

pub fn score(outcomes: &[SceneOutcome]) -> SplitScores {
    let n = outcomes.len();
    if n == 0 {
        return SplitScores::default();
    }
    SplitScores {
        scenes: n,
        f1: outcomes.iter().map(|o| o.f1).sum::<f64>() / n as f64,
        edit_distance: outcomes.iter().map(|o| o.edit_distance).sum::<f64>() / n as f64,
        exact: outcomes.iter().filter(|o| o.exact()).count(),
    }
}

fn geometry<L: Ord + Clone>(patterns: &[Vec<f64>], labels: &[L]) -> Result<CscGeometry> {
    let mut g =
        CscGeometry { d_avg: d_avg(patterns)?, d_rel: d_rel(patterns)?.value, d_inter: f64::NAN, d_intra: f64::NAN };
    // A single class (or only singletons) has no cluster structure to report.
    if let Ok(c) = cluster_distances(patterns, labels) {
        g.d_inter = c.d_inter;
        g.d_intra = c.d_intra;
    }
    Ok(g)
}

/// Scores the model on its training scenes and on `test` scenes, and measures
/// the stored sensory Csc patterns.
pub fn evaluate(
    model: &MultiModalModel,
    dataset: &SceneDataset,
    test: &[usize],
    encoding: &EncodingSpec,
    lexicon: &Lexicon,
) -> Result<Evaluation> {
    if model.scene_ids.len() < 2 {
        return Err(Error::Data("evaluation needs at least two training scenes".into()));
    }
    let train = score(&describe_scenes(model, dataset, &model.scene_ids, encoding, lexicon)?);
    let test =
        if test.is_empty() { None } else { Some(score(&describe_scenes(model, dataset, test, encoding, lexicon)?)) };
    let triples = model.scene_ids.iter().map(|&id| dataset.scene(id).map(|s| s.triple)).collect::<Result<Vec<_>>>()?;
    let actions: Vec<_> = triples.iter().map(|t| t.action).collect();
    let objects: Vec<_> = triples.iter().map(|t| t.object).collect();
    Ok(Evaluation {
        train,
        test,
        somatosensory: geometry(&model.somatosensory_csc.values, &actions)?,
        visual: geometry(&model.visual_csc.values, &objects)?,
    })
}
