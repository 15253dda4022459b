//! Per-parameter adaptive learning rates in the spirit of resilient
//! propagation: each rate grows by `xi_plus` while its gradient keeps its sign
//! and shrinks by `xi_minus` when the sign flips; the step itself is the plain
//! `rate * gradient`.

use super::hyper::TrainHyper;
use crate::net::{Params, Topology};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerState {
    /// Rates `eta_ij`, row-major like the weights; masked entries unused.
    pub weight_rates: Vec<f64>,
    pub bias_rates: Vec<f64>,
    pub weight_signs: Vec<i8>,
    pub bias_signs: Vec<i8>,
    /// Rates `zeta_i` for the Csc state updates.
    pub zeta: Vec<f64>,
}

impl OptimizerState {
    pub fn new(topology: &Topology, hyper: &TrainHyper) -> Self {
        let n = topology.neuron_count();
        OptimizerState {
            weight_rates: vec![hyper.eta0; n * n],
            bias_rates: vec![hyper.beta0; n],
            weight_signs: vec![0; n * n],
            bias_signs: vec![0; n],
            zeta: vec![hyper.zeta0; topology.csc_count],
        }
    }
}

#[inline]
fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Adapts one rate from the sign agreement and returns the parameter step.
#[inline]
pub fn adapt(rate: &mut f64, prev_sign: &mut i8, grad: f64, hyper: &TrainHyper) -> f64 {
    let s = sign(grad);
    match s * *prev_sign {
        1 => *rate = (*rate * hyper.xi_plus).min(hyper.eta_max),
        -1 => *rate = (*rate * hyper.xi_minus).max(hyper.eta_min),
        _ => {}
    }
    *prev_sign = s;
    *rate * grad
}

/// One update of all connected weights and all biases from epoch gradients.
pub fn rprop_update(
    topology: &Topology,
    params: &mut Params,
    state: &mut OptimizerState,
    weight_grads: &[f64],
    bias_grads: &[f64],
    hyper: &TrainHyper,
) -> Result<()> {
    let n = topology.neuron_count();
    params.check(topology)?;
    if weight_grads.len() != n * n || bias_grads.len() != n || state.weight_rates.len() != n * n {
        return Err(Error::Argument("gradient or optimizer size does not match the network".into()));
    }
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        for j in topology.inputs_of(i) {
            let k = i * n + j;
            let step = adapt(&mut state.weight_rates[k], &mut state.weight_signs[k], weight_grads[k], hyper);
            params.weights[k] -= step;
        }
        let step = adapt(&mut state.bias_rates[i], &mut state.bias_signs[i], bias_grads[i], hyper);
        params.biases[i] -= step;
    }
    Ok(())
}
