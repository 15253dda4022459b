use serde::{Deserialize, Serialize};

use crate::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Auditory,
    Proprioception,
    Vision,
    Synthetic,
}

/// A T×N matrix of target or clamped activations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodedSequence {
    pub modality: Modality,
    pub data: Matrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotation: Option<String>,
}

impl EncodedSequence {
    pub fn new(modality: Modality, data: Matrix) -> Self {
        EncodedSequence { modality, data, annotation: None }
    }

    pub fn with_annotation(mut self, text: impl Into<String>) -> Self {
        self.annotation = Some(text.into());
        self
    }

    pub fn len(&self) -> usize {
        self.data.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.data.rows() == 0
    }

    pub fn channels(&self) -> usize {
        self.data.cols()
    }
}
