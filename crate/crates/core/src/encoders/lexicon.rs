use std::collections::BTreeMap;

use super::alphabet::index_of;
use crate::{Error, Result};

/// Pronunciations of the grammar words (CMU dictionary, stress marks removed).
pub const DEFAULT_PRONUNCIATIONS: [(&str, &str); 14] = [
    ("pull", "P UH L"),
    ("push", "P UH SH"),
    ("show", "SH OW"),
    ("me", "M IY"),
    ("slide", "S L AY D"),
    ("the", "DH AH"),
    ("blue", "B L UW"),
    ("green", "G R IY N"),
    ("red", "R EH D"),
    ("yellow", "Y EH L OW"),
    ("apple", "AE P AH L"),
    ("banana", "B AH N AE N AH"),
    ("dice", "D AY S"),
    ("phone", "F OW N"),
];

/// Word to phoneme-index table.
#[derive(Clone, Debug, PartialEq)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<usize>>,
}

/// A word found by segmentation, or a run of phonemes no word matched.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Segment {
    Word(String),
    Unmatched(Vec<usize>),
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon::from_table(&DEFAULT_PRONUNCIATIONS).expect("built-in lexicon is valid")
    }
}

impl Lexicon {
    pub fn from_table(table: &[(&str, &str)]) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (word, pron) in table {
            let phonemes = pron
                .split_whitespace()
                .map(|p| index_of(p).ok_or_else(|| Error::Data(format!("'{p}' in '{word}' is not a phoneme"))))
                .collect::<Result<Vec<_>>>()?;
            if phonemes.is_empty() {
                return Err(Error::Data(format!("'{word}' has an empty pronunciation")));
            }
            if entries.insert(word.to_string(), phonemes).is_some() {
                return Err(Error::Data(format!("'{word}' has two pronunciations")));
            }
        }
        Ok(Lexicon { entries })
    }

    pub fn pronounce(&self, word: &str) -> Result<&[usize]> {
        self.entries.get(word).map(Vec::as_slice).ok_or_else(|| Error::Lexicon(word.to_string()))
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Greedy longest-match segmentation; phonemes that start no word are
    /// collected into [`Segment::Unmatched`] runs.
    pub fn segment(&self, phonemes: &[usize]) -> Vec<Segment> {
        let mut out = Vec::new();
        let mut pending = Vec::new();
        let mut pos = 0;
        while pos < phonemes.len() {
            let best = self.entries.iter().filter(|(_, p)| phonemes[pos..].starts_with(p)).max_by_key(|(_, p)| p.len());
            match best {
                Some((word, p)) => {
                    if !pending.is_empty() {
                        out.push(Segment::Unmatched(std::mem::take(&mut pending)));
                    }
                    out.push(Segment::Word(word.clone()));
                    pos += p.len();
                }
                None => {
                    pending.push(phonemes[pos]);
                    pos += 1;
                }
            }
        }
        if !pending.is_empty() {
            out.push(Segment::Unmatched(pending));
        }
        out
    }
}
