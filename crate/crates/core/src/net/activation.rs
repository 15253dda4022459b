//! Activation functions.
//!
//! The sigmoid is a logistic curve stretched to the range
//! `(-KAPPA_H, 1 + KAPPA_H)` with slope factor `KAPPA_W`, so that targets in
//! `[0, 1]` sit inside the non-saturated part of the curve.

pub const KAPPA_H: f64 = 0.35795;
pub const KAPPA_W: f64 = 0.92;

#[inline]
fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    (1.0 + 2.0 * KAPPA_H) * logistic(KAPPA_W * x) - KAPPA_H
}

/// Derivative of [`sigmoid`] with respect to its argument.
#[inline]
pub fn sigmoid_prime(x: f64) -> f64 {
    let s = logistic(KAPPA_W * x);
    (1.0 + 2.0 * KAPPA_H) * KAPPA_W * s * (1.0 - s)
}

/// Inverse of [`sigmoid`]; `None` outside the open range of the function.
pub fn sigmoid_inverse(y: f64) -> Option<f64> {
    let s = (y + KAPPA_H) / (1.0 + 2.0 * KAPPA_H);
    (s > 0.0 && s < 1.0).then(|| (s / (1.0 - s)).ln() / KAPPA_W)
}

/// Softmax with max-subtraction, written into `out`.
pub fn softmax_into(z: &[f64], out: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (o, &v) in out.iter_mut().zip(z) {
        *o = (v - max).exp();
        sum += *o;
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
}

pub fn softmax(z: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; z.len()];
    softmax_into(z, &mut out);
    out
}

/// Vector-Jacobian product of softmax: given `y = softmax(z)` and `g = dE/dy`,
/// returns `dE/dz` accumulated into `out`.
pub fn softmax_vjp_add(y: &[f64], g: &[f64], out: &mut [f64]) {
    let dot: f64 = y.iter().zip(g).map(|(a, b)| a * b).sum();
    for ((o, &yi), &gi) in out.iter_mut().zip(y).zip(g) {
        *o += yi * (gi - dot);
    }
}
