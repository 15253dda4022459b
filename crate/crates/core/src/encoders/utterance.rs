//! Phoneme spike-train encoding of sentences and its inverse.
//!
//! Phoneme `k` of a sentence peaks at step `γ + k·v` with a Gaussian of
//! sharpness `σ²` spread over `ω + 1` steps; each step is then softmax
//! normalised so that an isolated peak reaches 0.9.

use serde::{Deserialize, Serialize};

use super::alphabet::{self, terminal_for_mark, terminal_mark, PHONEMES};
use super::lexicon::{Lexicon, Segment};
use super::sequence::{EncodedSequence, Modality};
use crate::net::activation::softmax_into;
use crate::{Error, Matrix, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodingSpec {
    pub gamma: usize,
    pub omega: usize,
    pub sigma2: f64,
    pub interval: usize,
    pub io_count: usize,
    /// Activation of an isolated peak after normalisation.
    pub peak: f64,
}

impl Default for EncodingSpec {
    fn default() -> Self {
        EncodingSpec { gamma: 4, omega: 4, sigma2: 0.3, interval: 2, io_count: PHONEMES.len(), peak: 0.9 }
    }
}

impl EncodingSpec {
    /// Scale λ such that `exp(λ) / (exp(λ) + N − 1)` equals the peak value.
    pub fn lambda(&self) -> f64 {
        (self.peak / (1.0 - self.peak) * (self.io_count as f64 - 1.0)).ln()
    }

    pub fn gaussian(&self, t_rel: f64) -> f64 {
        (-t_rel * t_rel / (2.0 * self.sigma2)).exp()
    }

    pub fn peak_step(&self, k: usize) -> usize {
        self.gamma + k * self.interval
    }

    pub fn steps_for(&self, phonemes: usize) -> usize {
        self.gamma + phonemes * self.interval + self.omega / 2 + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.interval == 0 || self.omega == 0 || !(self.sigma2 > 0.0) {
            return Err(Error::Config("encoding constants must be positive".into()));
        }
        if !(self.peak > 0.0 && self.peak < 1.0) || self.io_count != PHONEMES.len() {
            return Err(Error::Config(format!("encoding needs peak in (0,1) and io_count = {}", PHONEMES.len())));
        }
        Ok(())
    }
}

/// Phoneme indices of a sentence, terminal sign included.
pub fn sentence_phonemes(sentence: &str, lexicon: &Lexicon) -> Result<Vec<usize>> {
    let trimmed = sentence.trim();
    let (body, terminal) = match trimmed.chars().last().and_then(terminal_for_mark) {
        Some(t) => (&trimmed[..trimmed.len() - 1], t),
        None => (trimmed, alphabet::PER),
    };
    let mut out = Vec::new();
    for word in body.split_whitespace() {
        out.extend_from_slice(lexicon.pronounce(&word.to_ascii_lowercase())?);
    }
    if out.is_empty() {
        return Err(Error::Lexicon(format!("empty sentence '{sentence}'")));
    }
    out.push(terminal);
    Ok(out)
}

pub fn encode_phonemes(phonemes: &[usize], spec: &EncodingSpec) -> Result<Matrix> {
    spec.validate()?;
    let n = spec.io_count;
    let steps = spec.steps_for(phonemes.len());
    let lambda = spec.lambda();
    let half = (spec.omega / 2) as isize;
    let mut m = Matrix::zeros(steps, n);
    for (k, &p) in phonemes.iter().enumerate() {
        if p >= n {
            return Err(Error::Argument(format!("phoneme index {p} out of range")));
        }
        let centre = spec.peak_step(k) as isize;
        for t_rel in -half..=half {
            let t = centre + t_rel;
            if t < 0 || t as usize >= steps {
                continue;
            }
            let v = lambda * spec.gaussian(t_rel as f64);
            let cell = &mut m.row_mut(t as usize)[p];
            *cell = cell.max(v);
        }
    }
    let mut buf = vec![0.0; n];
    for t in 0..steps {
        softmax_into(m.row(t), &mut buf);
        m.row_mut(t).copy_from_slice(&buf);
    }
    Ok(m)
}

pub fn encode_utterance(sentence: &str, spec: &EncodingSpec, lexicon: &Lexicon) -> Result<EncodedSequence> {
    let phonemes = sentence_phonemes(sentence, lexicon)?;
    let data = encode_phonemes(&phonemes, spec)?;
    Ok(EncodedSequence::new(Modality::Auditory, data).with_annotation(sentence.trim()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decoded {
    pub phonemes: Vec<String>,
    /// Recognised words and bracketed unmatched phoneme runs, plus the
    /// terminal mark when one was produced.
    pub text: String,
    pub words: Vec<String>,
    /// Some phonemes could not be segmented into lexicon words.
    pub unmatched: bool,
    /// No terminal sign appeared before the trajectory ended.
    pub truncated: bool,
}

impl Decoded {
    pub fn phoneme_string(&self) -> String {
        self.phonemes.join(" ")
    }
}

/// Read the argmax channel at every expected peak slot (ties go to the lowest
/// index) until a terminal sign or the end of the trajectory.
pub fn decode_indices(trajectory: &Matrix, spec: &EncodingSpec) -> (Vec<usize>, bool) {
    let mut out = Vec::new();
    let mut k = 0;
    loop {
        let t = spec.peak_step(k);
        if t >= trajectory.rows() {
            return (out, false);
        }
        let row = trajectory.row(t);
        let mut best = 0;
        for (i, &v) in row.iter().enumerate() {
            if v > row[best] {
                best = i;
            }
        }
        out.push(best);
        if alphabet::is_terminal(best) {
            return (out, true);
        }
        k += 1;
    }
}

pub fn decode_utterance(trajectory: &Matrix, spec: &EncodingSpec, lexicon: &Lexicon) -> Result<Decoded> {
    if trajectory.cols() != spec.io_count {
        return Err(Error::Argument(format!(
            "trajectory has {} channels, expected {}",
            trajectory.cols(),
            spec.io_count
        )));
    }
    let (indices, terminated) = decode_indices(trajectory, spec);
    let body = if terminated { &indices[..indices.len() - 1] } else { &indices[..] };
    let mut words = Vec::new();
    let mut unmatched = false;
    for seg in lexicon.segment(body) {
        match seg {
            Segment::Word(w) => words.push(w),
            Segment::Unmatched(run) => {
                unmatched = true;
                let raw: Vec<&str> = run.iter().map(|&i| PHONEMES[i]).collect();
                words.push(format!("[{}]", raw.join(" ")));
            }
        }
    }
    let mut text = words.join(" ");
    if terminated {
        text.extend(terminal_mark(indices[indices.len() - 1]));
    }
    Ok(Decoded {
        phonemes: indices.iter().map(|&i| PHONEMES[i].to_string()).collect(),
        text,
        words,
        unmatched,
        truncated: !terminated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoders::grammar::grammar_enumerate;

    #[test]
    fn lambda_matches_closed_form() {
        let spec = EncodingSpec::default();
        assert!((spec.lambda() - 387f64.ln()).abs() < 1e-12);
        assert!((spec.lambda() - 5.9584).abs() < 1e-4);
        assert!((spec.gaussian(1.0) - 0.18888).abs() < 1e-5);
    }

    #[test]
    fn isolated_peak_is_point_nine() {
        let spec = EncodingSpec::default();
        let m = encode_phonemes(&[7], &spec).unwrap();
        assert!((m.get(4, 7) - 0.9).abs() < 1e-12);
        for t in 0..m.rows() {
            let s: f64 = m.row(t).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn peaks_sit_at_gamma_plus_kv() {
        let spec = EncodingSpec::default();
        let lex = Lexicon::default();
        let ph = sentence_phonemes("slide the red apple.", &lex).unwrap();
        let m = encode_phonemes(&ph, &spec).unwrap();
        assert_eq!(m.rows(), 4 + ph.len() * 2 + 3);
        let argmax = |t: usize| {
            let r = m.row(t);
            (0..r.len()).max_by(|&a, &b| r[a].total_cmp(&r[b])).unwrap()
        };
        assert_eq!(argmax(4), ph[0]);
        assert_eq!(argmax(6), ph[1]);
    }

    #[test]
    fn round_trip_all_sentences() {
        let spec = EncodingSpec::default();
        let lex = Lexicon::default();
        for (s, _) in grammar_enumerate() {
            let enc = encode_utterance(&s, &spec, &lex).unwrap();
            let dec = decode_utterance(&enc.data, &spec, &lex).unwrap();
            assert_eq!(dec.text, s);
            assert!(!dec.unmatched && !dec.truncated);
        }
    }

    #[test]
    fn uniform_trajectory_ties_to_first_symbol() {
        let spec = EncodingSpec::default();
        let m = Matrix::from_vec(12, 44, vec![1.0 / 44.0; 12 * 44]).unwrap();
        let dec = decode_utterance(&m, &spec, &Lexicon::default()).unwrap();
        assert_eq!(dec.phonemes, vec!["AA"; 4]);
        assert!(dec.unmatched && dec.truncated);
    }

    #[test]
    fn unknown_word_is_lexicon_error() {
        let e = encode_utterance("eat the red grape.", &EncodingSpec::default(), &Lexicon::default());
        assert!(matches!(e, Err(Error::Lexicon(_))));
    }
}
