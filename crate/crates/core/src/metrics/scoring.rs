use std::collections::HashMap;
use std::hash::Hash;

const INSERT: usize = 1;
const DELETE: usize = 1;
const SUBSTITUTE: usize = 2;

/// Levenshtein distance with insertion 1, deletion 1, substitution 2.
pub fn edit_distance<T: PartialEq>(produced: &[T], target: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=target.len()).map(|j| j * INSERT).collect();
    let mut cur = vec![0; target.len() + 1];
    for (i, p) in produced.iter().enumerate() {
        cur[0] = (i + 1) * DELETE;
        for (j, t) in target.iter().enumerate() {
            let sub = prev[j] + if p == t { 0 } else { SUBSTITUTE };
            cur[j + 1] = sub.min(prev[j + 1] + DELETE).min(cur[j] + INSERT);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[target.len()]
}

/// Edit distance divided by the target length.
pub fn normalised_edit_distance<T: PartialEq>(produced: &[T], target: &[T]) -> f64 {
    edit_distance(produced, target) as f64 / target.len().max(1) as f64
}

/// F1 of the produced word multiset against the target multiset.
pub fn f1_word<S: AsRef<str>>(produced: &[S], target: &[S]) -> f64 {
    if produced.is_empty() || target.is_empty() {
        return 0.0;
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for w in target {
        *counts.entry(w.as_ref()).or_default() += 1;
    }
    let mut hits = 0;
    for w in produced {
        if let Some(c) = counts.get_mut(w.as_ref()).filter(|c| **c > 0) {
            *c -= 1;
            hits += 1;
        }
    }
    if hits == 0 {
        return 0.0;
    }
    let precision = hits as f64 / produced.len() as f64;
    let recall = hits as f64 / target.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Macro average of per-utterance F1.
pub fn mean_f1<S: AsRef<str> + Eq + Hash>(pairs: &[(Vec<S>, Vec<S>)]) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    pairs.iter().map(|(p, t)| f1_word(p, t)).sum::<f64>() / pairs.len() as f64
}

/// Equal-weight combination of a training and a test value.
pub fn mixed(train: f64, test: f64) -> f64 {
    0.5 * (train + test)
}
