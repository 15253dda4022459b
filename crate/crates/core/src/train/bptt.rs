//! Backpropagation through time for both network directions.
//!
//! The gradients are exact partial derivatives of the sequence error with
//! respect to every parameter, so each one can be checked against finite
//! differences of the forward pass:
//!
//! * `weights`, `biases`: `dE/dw_ij = sum_t (1/tau_i) dE/dz[t,i] x[t,j]` and
//!   `dE/db_i = sum_t (1/tau_i) dE/dz[t,i]`, the paths through the dynamics;
//! * `target_biases`: for abstraction nets, the extra path of a Csc bias
//!   through its target `f(c_T + b)`, so `biases + target_biases` is the total
//!   derivative;
//! * `csc`: `dE/dc0` (context bias) or `dE/dcT` (context abstraction).
//!
//! Training updates biases along the dynamics path only and treats the target
//! as fixed; following the total derivative lets the Csc biases grow until
//! output and target saturate together, which zeroes the error without
//! abstracting anything. The update rules in [`super::csc`] apply their own
//! step scaling on top.

use super::loss::{kld_term, lms_error};
use crate::net::activation::{sigmoid, sigmoid_prime, softmax_vjp_add};
use crate::net::{Direction, IoActivation, Params, Topology, Trajectory};
use crate::{Error, Matrix, Result};

/// Gradients of one sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientSet {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    /// Bias derivative through the Csc targets (abstraction nets only).
    pub target_biases: Vec<f64>,
    /// `dE/dc` for the Csc units of this sequence.
    pub csc: Vec<f64>,
    /// `dE/dz[t,i]`, row-major over `t = 0..=T`.
    pub dz: Vec<f64>,
    /// Sequence error.
    pub error: f64,
    n: usize,
}

impl GradientSet {
    fn zeros(topology: &Topology, steps: usize) -> Self {
        let n = topology.neuron_count();
        GradientSet {
            weights: vec![0.0; n * n],
            biases: vec![0.0; n],
            target_biases: vec![0.0; n],
            csc: vec![0.0; topology.csc_count],
            dz: vec![0.0; (steps + 1) * n],
            error: 0.0,
            n,
        }
    }

    /// Total `dE/db`, both paths.
    pub fn total_biases(&self) -> Vec<f64> {
        self.biases.iter().zip(&self.target_biases).map(|(a, b)| a + b).collect()
    }

    pub fn dz(&self, t: usize) -> &[f64] {
        &self.dz[t * self.n..(t + 1) * self.n]
    }

    pub fn is_finite(&self) -> bool {
        self.error.is_finite()
            && self.weights.iter().all(|v| v.is_finite())
            && self.biases.iter().all(|v| v.is_finite())
            && self.csc.iter().all(|v| v.is_finite())
    }

    /// Name of the first parameter block holding a non-finite value.
    pub fn non_finite_block(&self) -> Option<&'static str> {
        if !self.error.is_finite() {
            Some("error")
        } else if !self.weights.iter().all(|v| v.is_finite()) {
            Some("weights")
        } else if !self.biases.iter().all(|v| v.is_finite()) {
            Some("biases")
        } else if !self.csc.iter().all(|v| v.is_finite()) {
            Some("csc")
        } else {
            None
        }
    }
}

/// `out = W^T v`, i.e. `out_j = sum_k w_kj v_k`, over the connectivity mask.
fn transpose_mul(topology: &Topology, params: &Params, v: &[f64], out: &mut [f64]) {
    out.fill(0.0);
    for (k, &vk) in v.iter().enumerate() {
        if vk == 0.0 {
            continue;
        }
        let cols = topology.inputs_of(k);
        for (o, &w) in out[cols.clone()].iter_mut().zip(&params.weight_row(k)[cols]) {
            *o += w * vk;
        }
    }
}

fn accumulate_step(
    topology: &Topology,
    inv_tau: &[f64],
    delta: &[f64],
    x: &[f64],
    weights: &mut [f64],
    biases: &mut [f64],
) {
    let n = delta.len();
    for (i, &d) in delta.iter().enumerate() {
        let scaled = d * inv_tau[i];
        if scaled == 0.0 {
            continue;
        }
        biases[i] += scaled;
        let cols = topology.inputs_of(i);
        for (g, &xj) in weights[i * n..(i + 1) * n][cols.clone()].iter_mut().zip(&x[cols]) {
            *g += scaled * xj;
        }
    }
}

fn check_shapes(topology: &Topology, params: &Params, traj: &Trajectory) -> Result<()> {
    params.check(topology)?;
    if traj.neuron_count() != topology.neuron_count() {
        return Err(Error::Argument("trajectory does not belong to this topology".into()));
    }
    Ok(())
}

/// Gradients of a context-bias network trained with teacher forcing `alpha`.
///
/// `targets` row `t` is the desired IO output at step `t` (row 0 is the
/// initial activation and carries no error). The error is the KLD for a
/// softmax IO layer and half squared error for a sigmoid IO layer. Besides the
/// direct output error and the leaky carry-over from `t+1`, an IO neuron
/// receives the error of its own fed-back output, weighted by `1 - alpha`.
/// With `alpha = 1` that path vanishes, which gives the truncated gradient the
/// trainer uses whatever the forward `alpha` was.
pub fn bptt_context_bias(
    topology: &Topology,
    params: &Params,
    traj: &Trajectory,
    targets: &Matrix,
    alpha: f64,
) -> Result<GradientSet> {
    check_shapes(topology, params, traj)?;
    if topology.direction != Direction::ContextBias {
        return Err(Error::Argument("bptt_context_bias needs a context-bias network".into()));
    }
    let steps = traj.steps();
    if targets.rows() != steps + 1 || targets.cols() != topology.io_count {
        return Err(Error::Argument(format!(
            "targets are {}x{}, expected {}x{}",
            targets.rows(),
            targets.cols(),
            steps + 1,
            topology.io_count
        )));
    }

    let n = topology.neuron_count();
    let io = topology.io_count;
    let inv_tau: Vec<f64> = topology.taus().iter().map(|t| 1.0 / t).collect();
    let mut g = GradientSet::zeros(topology, steps);
    let mut back = vec![0.0; n];
    let mut carried = vec![0.0; n];
    let mut feedback = vec![0.0; io];

    for t in (1..=steps).rev() {
        let (head, tail) = g.dz.split_at_mut((t + 1) * n);
        let delta = &mut head[t * n..];
        let next: &[f64] = if t == steps { &[] } else { &tail[..n] };
        if t < steps {
            for k in 0..n {
                back[k] = next[k] * inv_tau[k];
            }
            transpose_mul(topology, params, &back, &mut carried);
        } else {
            carried.fill(0.0);
        }
        let z = traj.z(t);
        let y = traj.y(t);
        let target = targets.row(t);
        for i in io..n {
            let leak = if t < steps { (1.0 - inv_tau[i]) * next[i] } else { 0.0 };
            delta[i] = carried[i] * sigmoid_prime(z[i]) + leak;
        }
        for (f, &c) in feedback.iter_mut().zip(&carried[..io]) {
            *f = (1.0 - alpha) * c;
        }
        match topology.io_activation {
            IoActivation::DecisiveNormalisation => {
                for i in 0..io {
                    delta[i] = y[i] - target[i];
                    g.error += kld_term(target[i], y[i]);
                }
                softmax_vjp_add(&y[..io], &feedback, &mut delta[..io]);
            }
            IoActivation::Sigmoid => {
                for i in 0..io {
                    delta[i] = (y[i] - target[i] + feedback[i]) * sigmoid_prime(z[i]);
                }
                g.error += lms_error(&target[..io], &y[..io]);
            }
        }
        if t < steps {
            for i in 0..io {
                delta[i] += (1.0 - inv_tau[i]) * next[i];
            }
        }
        accumulate_step(topology, &inv_tau, delta, traj.x(t), &mut g.weights, &mut g.biases);
    }

    // t = 0: only the Csc units carry parameters (their initial states).
    let (head, tail) = g.dz.split_at_mut(n);
    let next = &tail[..n];
    for k in 0..n {
        back[k] = next[k] * inv_tau[k];
    }
    transpose_mul(topology, params, &back, &mut carried);
    let z0 = traj.z(0);
    for i in topology.csc_range() {
        head[i] = carried[i] * sigmoid_prime(z0[i]) + (1.0 - inv_tau[i]) * next[i];
    }
    g.csc.copy_from_slice(&head[topology.csc_range()]);
    Ok(g)
}

/// Gradients of a context-abstraction network with self-organisation forcing.
///
/// The only error source is the Csc layer at `t = T`:
/// `E = (1 - psi) * 1/2 * sum_i (y[T,i] - f(c_i + b_i))^2`.
/// `csc` holds `dE/dc_i` of the target states `c`.
pub fn bptt_context_abstraction(
    topology: &Topology,
    params: &Params,
    traj: &Trajectory,
    target_csc: &[f64],
    psi: f64,
) -> Result<GradientSet> {
    check_shapes(topology, params, traj)?;
    if topology.direction != Direction::ContextAbstraction {
        return Err(Error::Argument("bptt_context_abstraction needs a context-abstraction network".into()));
    }
    if target_csc.len() != topology.csc_count {
        return Err(Error::Argument(format!(
            "Csc target has {} entries, expected {}",
            target_csc.len(),
            topology.csc_count
        )));
    }
    let steps = traj.steps();
    let n = topology.neuron_count();
    let io = topology.io_count;
    let inv_tau: Vec<f64> = topology.taus().iter().map(|t| 1.0 / t).collect();
    let mut g = GradientSet::zeros(topology, steps);
    let mut back = vec![0.0; n];
    let mut carried = vec![0.0; n];

    let csc = topology.csc_range();
    {
        let z = traj.z(steps);
        let y = traj.y(steps);
        let delta = &mut g.dz[steps * n..];
        for (k, i) in csc.clone().enumerate() {
            let pre = target_csc[k] + params.biases[i];
            let diff = y[i] - sigmoid(pre);
            g.error += 0.5 * (1.0 - psi) * diff * diff;
            delta[i] = (1.0 - psi) * diff * sigmoid_prime(z[i]);
            g.csc[k] = -(1.0 - psi) * diff * sigmoid_prime(pre);
        }
        accumulate_step(topology, &inv_tau, delta, traj.x(steps), &mut g.weights, &mut g.biases);
    }

    for t in (1..steps).rev() {
        let (head, tail) = g.dz.split_at_mut((t + 1) * n);
        let delta = &mut head[t * n..];
        let next = &tail[..n];
        for k in 0..n {
            back[k] = next[k] * inv_tau[k];
        }
        transpose_mul(topology, params, &back, &mut carried);
        let z = traj.z(t);
        // IO inputs are clamped, so IO outputs feed nothing forward.
        for i in 0..io {
            delta[i] = (1.0 - inv_tau[i]) * next[i];
        }
        for i in io..n {
            delta[i] = carried[i] * sigmoid_prime(z[i]) + (1.0 - inv_tau[i]) * next[i];
        }
        accumulate_step(topology, &inv_tau, delta, traj.x(t), &mut g.weights, &mut g.biases);
    }

    for (k, i) in csc.enumerate() {
        g.target_biases[i] = g.csc[k];
    }
    Ok(g)
}
