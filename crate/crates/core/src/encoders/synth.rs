//! Seeded stand-ins for the robot recordings: cosine toy data, joint-angle
//! trajectories per action and quasi-static shape/colour features per object.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::grammar::{Action, Colour, Object};
use super::sequence::{EncodedSequence, Modality};
use crate::rng::SeedTree;
use crate::Matrix;

pub const PROPRIO_CHANNELS: usize = 5;
pub const SHAPE_CHANNELS: usize = 16;
pub const VISION_CHANNELS: usize = SHAPE_CHANNELS + 3;
pub const BASE_LENGTH: usize = 50;
pub const LENGTH_JITTER: f64 = 0.2;

/// Four two-channel antiphase cosine waves over 33 steps, one per quarter
/// period phase shift, mapped to [0.1, 0.9].
pub fn cosine_dataset() -> Vec<EncodedSequence> {
    (0..4)
        .map(|k| {
            let shift = k as f64 * PI / 2.0;
            let mut m = Matrix::zeros(33, 2);
            for t in 0..33 {
                let c = 0.5 + 0.4 * (2.0 * PI * t as f64 / 32.0 + shift).cos();
                m.set(t, 0, c);
                m.set(t, 1, 1.0 - c);
            }
            EncodedSequence::new(Modality::Synthetic, m).with_annotation(format!("phase {k}/4"))
        })
        .collect()
}

/// Sequence length for a variant: the base length without noise, otherwise
/// uniform within ±20%.
pub fn variant_length<R: Rng>(noise_level: f64, rng: &mut R) -> usize {
    if noise_level <= 0.0 {
        return BASE_LENGTH;
    }
    let spread = (BASE_LENGTH as f64 * LENGTH_JITTER).round() as usize;
    rng.random_range(BASE_LENGTH - spread..=BASE_LENGTH + spread)
}

const REST: [f64; PROPRIO_CHANNELS] = [0.5, 0.3, 0.5, 0.5, 0.5];

/// Keyframe poses after the rest pose, and their relative times.
fn keyframes(action: Action) -> ([[f64; PROPRIO_CHANNELS]; 2], [f64; 2]) {
    match action {
        Action::Pull => ([[0.72, 0.45, 0.3, 0.5, 0.62], [0.42, 0.36, 0.76, 0.5, 0.62]], [0.35, 0.8]),
        Action::Push => ([[0.42, 0.36, 0.72, 0.5, 0.38], [0.76, 0.44, 0.26, 0.5, 0.38]], [0.35, 0.8]),
        Action::ShowMe => ([[0.66, 0.3, 0.38, 0.5, 0.56], [0.86, 0.2, 0.62, 0.8, 0.8]], [0.3, 0.75]),
        Action::Slide => ([[0.62, 0.3, 0.48, 0.5, 0.5], [0.62, 0.76, 0.48, 0.28, 0.5]], [0.3, 0.8]),
    }
}

fn ramp(a: f64, b: f64, s: f64) -> f64 {
    a + (b - a) * 0.5 * (1.0 - (PI * s.clamp(0.0, 1.0)).cos())
}

fn normal(sd: f64) -> Normal<f64> {
    Normal::new(0.0, sd.max(0.0)).expect("finite standard deviation")
}

pub fn synth_proprioception_with<R: Rng>(
    action: Action,
    length: usize,
    noise_level: f64,
    rng: &mut R,
) -> EncodedSequence {
    let (poses, times) = keyframes(action);
    let amp = normal(noise_level);
    let timing = normal(0.5 * noise_level);
    let frame = normal(0.2 * noise_level);
    let mut knots = vec![(0.0, REST)];
    for (pose, &t) in poses.iter().zip(&times) {
        let mut p = *pose;
        for v in &mut p {
            *v += amp.sample(rng);
        }
        knots.push(((t + timing.sample(rng)).clamp(0.1, 0.95), p));
    }
    knots.push((1.0, knots[knots.len() - 1].1));
    for i in 2..knots.len() {
        knots[i].0 = knots[i].0.max(knots[i - 1].0 + 0.05);
    }

    let mut m = Matrix::zeros(length, PROPRIO_CHANNELS);
    for t in 0..length {
        let s = if length > 1 { t as f64 / (length - 1) as f64 } else { 0.0 };
        let seg = knots.windows(2).position(|w| s <= w[1].0).unwrap_or(knots.len() - 2);
        let (t0, a) = knots[seg];
        let (t1, b) = knots[seg + 1];
        let local = if t1 > t0 { (s - t0) / (t1 - t0) } else { 1.0 };
        for j in 0..PROPRIO_CHANNELS {
            m.set(t, j, (ramp(a[j], b[j], local) + frame.sample(rng)).clamp(0.0, 1.0));
        }
    }
    EncodedSequence::new(Modality::Proprioception, m).with_annotation(action.as_str())
}

/// Joint-angle trajectory of an action; depends on the action only.
pub fn synth_proprioception(action: Action, seed: u64, noise_level: f64) -> EncodedSequence {
    let mut rng = SeedTree::new(seed).stream("proprio", 0);
    let length = variant_length(noise_level, &mut rng);
    synth_proprioception_with(action, length, noise_level, &mut rng)
}

/// Contour radius at angle `theta` for an object silhouette of unit scale.
fn radius(object: Object, theta: f64) -> f64 {
    let (c, s) = (theta.cos(), theta.sin());
    match object {
        Object::Apple => {
            let d = (theta - PI / 2.0 + PI).rem_euclid(2.0 * PI) - PI;
            1.0 - 0.15 * (-(d / 0.3).powi(2)).exp()
        }
        Object::Banana => {
            let (a, b) = (1.8, 0.55);
            (1.0 + 0.2 * s) / ((c / a).powi(2) + (s / b).powi(2)).sqrt()
        }
        Object::Dice => 1.0 / c.abs().max(s.abs()),
        Object::Phone => (1.0 / c.abs().max(1e-12)).min(0.5 / s.abs().max(1e-12)),
    }
}

/// Sixteen contour distances sorted descending, normalised by the square root
/// of the silhouette area so they do not depend on object scale.
pub fn shape_profile(object: Object) -> [f64; SHAPE_CHANNELS] {
    const N: usize = 7200;
    let area: f64 = (0..N)
        .map(|i| {
            let r = radius(object, 2.0 * PI * (i as f64 + 0.5) / N as f64);
            0.5 * r * r * 2.0 * PI / N as f64
        })
        .sum();
    let mut p = [0.0; SHAPE_CHANNELS];
    for (k, v) in p.iter_mut().enumerate() {
        *v = radius(object, 2.0 * PI * k as f64 / SHAPE_CHANNELS as f64) / area.sqrt() / 1.1;
    }
    p.sort_by(|a, b| b.total_cmp(a));
    p
}

pub fn colour_rgb(colour: Colour) -> [f64; 3] {
    match colour {
        Colour::Blue => [0.15, 0.25, 0.8],
        Colour::Green => [0.2, 0.7, 0.25],
        Colour::Red => [0.8, 0.15, 0.15],
        Colour::Yellow => [0.85, 0.8, 0.15],
    }
}

pub fn synth_vision_with<R: Rng>(
    colour: Colour,
    object: Object,
    length: usize,
    noise_level: f64,
    rng: &mut R,
) -> EncodedSequence {
    let variant = normal(noise_level);
    let frame = normal(0.3 * noise_level);
    let mut base = [0.0; VISION_CHANNELS];
    base[..SHAPE_CHANNELS].copy_from_slice(&shape_profile(object));
    base[SHAPE_CHANNELS..].copy_from_slice(&colour_rgb(colour));
    for v in &mut base {
        *v += variant.sample(rng);
    }
    let mut m = Matrix::zeros(length, VISION_CHANNELS);
    for t in 0..length {
        let row = m.row_mut(t);
        for (r, b) in row.iter_mut().zip(&base) {
            *r = (b + frame.sample(rng)).clamp(0.0, 1.0);
        }
        row[..SHAPE_CHANNELS].sort_by(|a, b| b.total_cmp(a));
    }
    EncodedSequence::new(Modality::Vision, m).with_annotation(format!("{colour} {object}"))
}

/// Shape and colour features of an object; independent of the action.
pub fn synth_vision(colour: Colour, object: Object, seed: u64, noise_level: f64) -> EncodedSequence {
    let mut rng = SeedTree::new(seed).stream("vision", 0);
    let length = variant_length(noise_level, &mut rng);
    synth_vision_with(colour, object, length, noise_level, &mut rng)
}
