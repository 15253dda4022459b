//! Shared helpers for the integration suites: an independent finite-difference
//! oracle for the BPTT gradients and random network builders.
#![allow(dead_code)]

pub mod oracles;

use mtrnn::net::activation::{sigmoid, softmax};
use mtrnn::net::{run_sequence, Direction, Drive, IoActivation, Params, Topology};
use mtrnn::train::{bptt_context_abstraction, bptt_context_bias, kld_error, GradientSet};
use mtrnn::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-5;

/// `|a - b| / max(|a|, |b|, floor)`; the floor keeps round-off on
/// near-zero gradients from dominating.
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

pub struct BiasCase {
    pub topology: Topology,
    pub params: Params,
    pub c0: Vec<f64>,
    pub targets: Matrix,
    pub alpha: f64,
}

pub struct AbstractionCase {
    pub topology: Topology,
    pub params: Params,
    pub input: Matrix,
    pub c_t: Vec<f64>,
    pub psi: f64,
}

fn random_params(t: &Topology, rng: &mut ChaCha8Rng, scale: f64) -> Params {
    let n = t.neuron_count();
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in t.inputs_of(i) {
            w[i * n + j] = rng.random_range(-scale..scale);
        }
    }
    let b = (0..n).map(|_| rng.random_range(-0.3..0.3)).collect();
    Params::from_parts(t, w, b).unwrap()
}

pub fn bias_case(seed: u64, io: usize, cf: usize, cs: usize, steps: usize) -> BiasCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let taus = [rng.random_range(1.0..3.0), rng.random_range(2.0..6.0), rng.random_range(4.0..30.0)];
    let topology =
        Topology::new(io, cf, cs, taus, Direction::ContextBias, IoActivation::DecisiveNormalisation).unwrap();
    let params = random_params(&topology, &mut rng, 0.6);
    let c0 = (0..topology.csc_count).map(|_| rng.random_range(-1.0..1.0)).collect();
    let rows: Vec<Vec<f64>> =
        (0..=steps).map(|_| softmax(&(0..io).map(|_| rng.random_range(-2.0..2.0)).collect::<Vec<_>>())).collect();
    BiasCase { topology, params, c0, targets: Matrix::from_rows(&rows).unwrap(), alpha: rng.random_range(0.05..0.95) }
}

pub fn abstraction_case(seed: u64, io: usize, cf: usize, cs: usize, steps: usize, psi: f64) -> AbstractionCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let taus = [rng.random_range(1.0..3.0), rng.random_range(2.0..6.0), rng.random_range(4.0..30.0)];
    let topology = Topology::new(io, cf, cs, taus, Direction::ContextAbstraction, IoActivation::Sigmoid).unwrap();
    let params = random_params(&topology, &mut rng, 0.6);
    let rows: Vec<Vec<f64>> = (0..steps).map(|_| (0..io).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
    let c_t = (0..topology.csc_count).map(|_| rng.random_range(-1.0..1.0)).collect();
    AbstractionCase { topology, params, input: Matrix::from_rows(&rows).unwrap(), c_t, psi }
}

/// Sequence error computed straight from a forward pass.
pub fn bias_error(t: &Topology, p: &Params, c0: &[f64], targets: &Matrix, alpha: f64) -> f64 {
    let traj = run_sequence(t, p, Some(c0), Drive::TeacherForced { alpha, targets }, targets.rows() - 1).unwrap();
    let produced = traj.io_outputs(t);
    let tail = |m: &Matrix| Matrix::from_rows(&m.to_rows()[1..]).unwrap();
    kld_error(&tail(targets), &tail(&produced)).unwrap().value
}

pub fn abstraction_error(t: &Topology, p: &Params, input: &Matrix, c_t: &[f64], psi: f64) -> f64 {
    let traj = run_sequence(t, p, None, Drive::Clamped(input), input.rows()).unwrap();
    let y = traj.y(traj.steps());
    t.csc_range()
        .enumerate()
        .map(|(k, i)| {
            let d = y[i] - sigmoid(c_t[k] + p.biases()[i]);
            0.5 * (1.0 - psi) * d * d
        })
        .sum()
}

/// Largest relative error over every weight, bias and Csc gradient.
pub fn check_all(
    topology: &Topology,
    params: &Params,
    analytic: &GradientSet,
    csc: &[f64],
    error: &dyn Fn(&Params, &[f64]) -> f64,
    floor: f64,
) -> f64 {
    let n = topology.neuron_count();
    let mut worst: f64 = 0.0;
    let central = |plus: f64, minus: f64| (plus - minus) / (2.0 * FD_STEP);
    for i in 0..n {
        for j in topology.inputs_of(i) {
            let w = params.weight(i, j);
            let mut p = params.clone();
            p.set_weight(topology, i, j, w + FD_STEP).unwrap();
            let plus = error(&p, csc);
            p.set_weight(topology, i, j, w - FD_STEP).unwrap();
            let minus = error(&p, csc);
            worst = worst.max(rel_err(analytic.weights[i * n + j], central(plus, minus), floor));
        }
        let mut p = params.clone();
        p.biases_mut()[i] += FD_STEP;
        let plus = error(&p, csc);
        p.biases_mut()[i] -= 2.0 * FD_STEP;
        let minus = error(&p, csc);
        worst = worst.max(rel_err(analytic.total_biases()[i], central(plus, minus), floor));
    }
    for k in 0..csc.len() {
        let mut c = csc.to_vec();
        c[k] += FD_STEP;
        let plus = error(params, &c);
        c[k] -= 2.0 * FD_STEP;
        let minus = error(params, &c);
        worst = worst.max(rel_err(analytic.csc[k], central(plus, minus), floor));
    }
    worst
}

pub fn check_bias_case(c: &BiasCase, floor: f64) -> f64 {
    let traj = run_sequence(
        &c.topology,
        &c.params,
        Some(&c.c0),
        Drive::TeacherForced { alpha: c.alpha, targets: &c.targets },
        c.targets.rows() - 1,
    )
    .unwrap();
    let g = bptt_context_bias(&c.topology, &c.params, &traj, &c.targets, c.alpha).unwrap();
    let err = |p: &Params, c0: &[f64]| bias_error(&c.topology, p, c0, &c.targets, c.alpha);
    check_all(&c.topology, &c.params, &g, &c.c0, &err, floor)
}

pub fn check_abstraction_case(c: &AbstractionCase, floor: f64) -> f64 {
    let traj = run_sequence(&c.topology, &c.params, None, Drive::Clamped(&c.input), c.input.rows()).unwrap();
    let g = bptt_context_abstraction(&c.topology, &c.params, &traj, &c.c_t, c.psi).unwrap();
    let err = |p: &Params, ct: &[f64]| abstraction_error(&c.topology, p, &c.input, ct, c.psi);
    check_all(&c.topology, &c.params, &g, &c.c_t, &err, floor)
}
