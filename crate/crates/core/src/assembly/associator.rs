//! Cell-assembly association from the sensory Csc codes to the initial
//! auditory Csc states, trained with the least-mean-squares delta rule.

use serde::{Deserialize, Serialize};

use crate::net::activation::{sigmoid, sigmoid_prime};
use crate::train::{EpochRecord, TrainHyper, TrainReport};
use crate::{Error, Matrix, Result};

/// `z = W [f(s); f(v)] + b`, one row per auditory Csc unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Associator {
    pub weights: Matrix,
    pub biases: Vec<f64>,
}

/// One association example: sensory codes and the auditory target state.
#[derive(Clone, Debug, PartialEq)]
pub struct AssociationPair {
    pub somatosensory: Vec<f64>,
    pub visual: Vec<f64>,
    pub auditory: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssociatorGradients {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub error: f64,
}

/// Adaptive rates and last gradient signs of the associator parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssociatorState {
    pub weight_rates: Vec<f64>,
    pub bias_rates: Vec<f64>,
    pub weight_signs: Vec<i8>,
    pub bias_signs: Vec<i8>,
}

impl Associator {
    pub fn zeros(outputs: usize, somatosensory: usize, visual: usize) -> Self {
        Associator { weights: Matrix::zeros(outputs, somatosensory + visual), biases: vec![0.0; outputs] }
    }

    pub fn outputs(&self) -> usize {
        self.weights.rows()
    }

    pub fn inputs(&self) -> usize {
        self.weights.cols()
    }

    fn input(&self, s: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        if s.len() + v.len() != self.inputs() {
            return Err(Error::Argument(format!(
                "associator takes {} sensory values, got {} + {}",
                self.inputs(),
                s.len(),
                v.len()
            )));
        }
        Ok(s.iter().chain(v).map(|&c| sigmoid(c)).collect())
    }

    /// Auditory Csc pre-activation associated with two sensory codes.
    pub fn associate(&self, s: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        let x = self.input(s, v)?;
        Ok((0..self.outputs())
            .map(|i| self.weights.row(i).iter().zip(&x).map(|(w, xj)| w * xj).sum::<f64>() + self.biases[i])
            .collect())
    }

    /// Delta-rule gradients: `(f(z_i) - f(c_i)) f'(z_i)` times the input.
    pub fn gradients(&self, pairs: &[AssociationPair]) -> Result<AssociatorGradients> {
        let (rows, cols) = (self.outputs(), self.inputs());
        let mut g = AssociatorGradients { weights: vec![0.0; rows * cols], biases: vec![0.0; rows], error: 0.0 };
        for p in pairs {
            if p.auditory.len() != rows {
                return Err(Error::Argument(format!(
                    "auditory target has {} entries, expected {rows}",
                    p.auditory.len()
                )));
            }
            let x = self.input(&p.somatosensory, &p.visual)?;
            for i in 0..rows {
                let z = self.weights.row(i).iter().zip(&x).map(|(w, xj)| w * xj).sum::<f64>() + self.biases[i];
                let diff = sigmoid(z) - sigmoid(p.auditory[i]);
                g.error += 0.5 * diff * diff;
                let delta = diff * sigmoid_prime(z);
                for (gw, xj) in g.weights[i * cols..(i + 1) * cols].iter_mut().zip(&x) {
                    *gw += delta * xj;
                }
                g.biases[i] += delta;
            }
        }
        Ok(g)
    }
}

impl AssociatorState {
    pub fn new(assoc: &Associator, hyper: &TrainHyper) -> Self {
        let w = assoc.outputs() * assoc.inputs();
        AssociatorState {
            weight_rates: vec![hyper.eta0; w],
            bias_rates: vec![hyper.beta0; assoc.outputs()],
            weight_signs: vec![0; w],
            bias_signs: vec![0; assoc.outputs()],
        }
    }
}

/// Applies one adaptive-rate update; the same rule as the network weights.
pub fn associator_step(
    assoc: &mut Associator,
    state: &mut AssociatorState,
    g: &AssociatorGradients,
    hyper: &TrainHyper,
) {
    use crate::train::adapt_rate;
    for (k, w) in assoc.weights.as_mut_slice().iter_mut().enumerate() {
        *w -= adapt_rate(&mut state.weight_rates[k], &mut state.weight_signs[k], g.weights[k], hyper);
    }
    for (i, b) in assoc.biases.iter_mut().enumerate() {
        *b -= adapt_rate(&mut state.bias_rates[i], &mut state.bias_signs[i], g.biases[i], hyper);
    }
}

/// Trains the associator until the error per pair drops below the threshold.
/// Returns the history and the final rate state.
pub fn fit_associator(
    assoc: &mut Associator,
    pairs: &[AssociationPair],
    hyper: &TrainHyper,
) -> Result<(TrainReport, AssociatorState)> {
    hyper.validate()?;
    if pairs.is_empty() {
        return Err(Error::Argument("association needs at least one pair".into()));
    }
    let mut state = AssociatorState::new(assoc, hyper);
    let mut report = TrainReport::default();
    for epoch in 1..=hyper.max_epochs {
        let g = assoc.gradients(pairs)?;
        if !g.error.is_finite() {
            return Err(Error::Divergence { epoch, block: "associator".into() });
        }
        let normalised_error = g.error / pairs.len() as f64;
        let done = normalised_error < hyper.convergence_threshold;
        if !done {
            associator_step(assoc, &mut state, &g, hyper);
        }
        let rates = &state.weight_rates;
        report.records.push(EpochRecord {
            epoch,
            error: g.error,
            normalised_error,
            mean_rate: rates.iter().sum::<f64>() / rates.len().max(1) as f64,
            min_rate: rates.iter().copied().fold(f64::INFINITY, f64::min),
            max_rate: rates.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean_zeta: 0.0,
        });
        if done {
            report.converged = true;
            break;
        }
    }
    Ok((report, state))
}
