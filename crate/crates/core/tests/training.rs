//! Training-side properties: vanishing gradients, update steps replayed by
//! hand, optimiser bounds and short training runs.

use mtrnn::assembly::{fit_associator, AssociationPair, Associator};
use mtrnn::net::activation::{sigmoid, softmax};
use mtrnn::net::{run_sequence, CscKind, CscStore, Direction, Drive, IoActivation, Params, Topology};
use mtrnn::train::{
    bptt_context_abstraction, bptt_context_bias, kld_error, update_final_csc, update_initial_csc, Network, TrainHyper,
    Trainer,
};
use mtrnn::{Error, Matrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn bias_net(seed: u64, tau_cs: f64) -> (Network, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = Topology::new(4, 6, 4, [2.0, 5.0, tau_cs], Direction::ContextBias, IoActivation::DecisiveNormalisation)
        .unwrap();
    let mut net = Network::random(t, 0.5, &mut rng).unwrap();
    for b in net.params.biases_mut() {
        *b = rng.random_range(-0.3..0.3);
    }
    (net, rng)
}

fn abstraction_net(seed: u64) -> (Network, Matrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = Topology::new(2, 6, 4, [2.0, 5.0, 20.0], Direction::ContextAbstraction, IoActivation::Sigmoid).unwrap();
    let net = Network::random(t, 0.5, &mut rng).unwrap();
    let rows: Vec<Vec<f64>> = (0..15).map(|_| vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)]).collect();
    (net, Matrix::from_rows(&rows).unwrap())
}

#[test]
fn reproduced_sequence_has_zero_gradient() {
    let (net, _) = bias_net(3, 30.0);
    let c0 = [0.4, -0.7];
    let t = &net.topology;
    let free = run_sequence(t, &net.params, Some(&c0), Drive::ClosedLoop, 12).unwrap();
    let targets = free.io_outputs(t);
    // Teacher forcing with the network's own output is the free run, exactly
    // so for full forcing and up to round-off otherwise.
    for (alpha, tol) in [(1.0, 0.0), (0.1, 1e-13)] {
        let forced = net.training_pass(&c0, &targets, alpha).unwrap();
        let g = bptt_context_bias(t, &net.params, &forced, &targets, alpha).unwrap();
        assert!(max_abs(&g.weights) <= tol && max_abs(&g.biases) <= tol && max_abs(&g.csc) <= tol);
        assert!(g.error.abs() <= tol);
    }
}

#[test]
fn matched_abstraction_target_has_zero_gradient() {
    let (net, input) = abstraction_net(4);
    let t = &net.topology;
    let traj = net.training_pass(&[0.0, 0.0], &input, 0.0).unwrap();
    let c_t: Vec<f64> = t.csc_range().map(|i| traj.z(input.rows())[i] - net.params.biases()[i]).collect();
    let g = bptt_context_abstraction(t, &net.params, &traj, &c_t, 0.0).unwrap();
    assert!(max_abs(&g.weights) < 1e-15 && max_abs(&g.total_biases()) < 1e-15 && max_abs(&g.csc) < 1e-15);
}

#[test]
fn forcing_constant_scales_weight_gradients() {
    let (net, input) = abstraction_net(5);
    let c_t = [0.6, -0.4];
    let base = TrainHyper::default();
    let g0 = net.sequence_gradients(&c_t, &input, &TrainHyper { psi: 0.0, ..base.clone() }).unwrap();
    for psi in [5e-4, 0.3] {
        let g = net.sequence_gradients(&c_t, &input, &TrainHyper { psi, ..base.clone() }).unwrap();
        for (a, b) in g.weights.iter().zip(&g0.weights) {
            assert!((a - (1.0 - psi) * b).abs() <= 1e-14 * b.abs().max(1e-300), "{a} vs {b}");
        }
    }
    let traj = net.training_pass(&c_t, &input, 0.0).unwrap();
    let g1 = bptt_context_abstraction(&net.topology, &net.params, &traj, &c_t, 1.0).unwrap();
    assert_eq!(max_abs(&g1.weights), 0.0);
    assert_eq!(max_abs(&g1.biases), 0.0);
}

#[test]
fn initial_state_step_replays_by_hand() {
    let (net, _) = bias_net(6, 30.0);
    let t = &net.topology;
    let mut store = CscStore { kind: CscKind::Initial, values: vec![vec![0.5, -0.25], vec![0.0, 1.0]] };
    let grads = vec![vec![0.2, -0.4], vec![0.0, 3.0]];
    let zeta = [0.05, 0.1];
    update_initial_csc(&mut store, &grads, &zeta, t).unwrap();
    let hand = [[0.5 - 0.05 * 0.2 / 30.0, -0.25 + 0.1 * 0.4 / 30.0], [0.0, 1.0 - 0.1 * 3.0 / 30.0]];
    for (row, h) in store.values.iter().zip(hand) {
        assert_eq!(row.as_slice(), h.as_slice());
    }

    // The same gradient moves a slow context 2/200 as far as a fast one.
    let (slow, _) = bias_net(6, 200.0);
    let (fast, _) = bias_net(6, 2.0);
    let step = |topo: &Topology| {
        let mut s = CscStore { kind: CscKind::Initial, values: vec![vec![0.0, 0.0]] };
        update_initial_csc(&mut s, &[vec![1.0, -1.0]], &[0.05, 0.05], topo).unwrap();
        s.values[0][0]
    };
    assert!((step(&slow.topology) / step(&fast.topology) - 2.0 / 200.0).abs() < 1e-15);
}

#[test]
fn final_state_step_replays_by_hand() {
    let (net, _) = abstraction_net(7);
    let t = &net.topology;
    let start = vec![vec![0.5, -0.25], vec![0.1, 0.9]];
    let grads = vec![vec![0.2, -1e-9], vec![0.0, 3.0]];
    let zeta = [0.05, 0.2];
    let mut store = CscStore { kind: CscKind::Final, values: start.clone() };
    update_final_csc(&mut store, &grads, &zeta, 5e-4, t).unwrap();
    let hand = [[0.5 - 5e-4 * 0.05, -0.25 + 5e-4 * 0.2], [0.1, 0.9 - 5e-4 * 0.2]];
    for (row, h) in store.values.iter().zip(hand) {
        assert_eq!(row.as_slice(), h.as_slice());
    }
    let mut frozen = CscStore { kind: CscKind::Final, values: start.clone() };
    update_final_csc(&mut frozen, &grads, &zeta, 0.0, t).unwrap();
    assert_eq!(frozen.values, start);
}

fn constant_sequence(io: usize, steps: usize, peak: usize) -> Matrix {
    let mut z = vec![0.0; io];
    z[peak] = 2.0;
    let row = softmax(&z);
    Matrix::from_rows(&vec![row; steps + 1]).unwrap()
}

#[test]
fn rates_stay_bounded_during_training() {
    let (net, _) = bias_net(8, 30.0);
    let hyper = TrainHyper { eta_max: 0.08, ..TrainHyper::default() };
    let csc = CscStore { kind: CscKind::Initial, values: vec![vec![0.1, -0.1], vec![-0.2, 0.3]] };
    let data = vec![constant_sequence(4, 10, 0), constant_sequence(4, 10, 2)];
    let mut trainer = Trainer::new(net, csc, data, hyper.clone()).unwrap();
    for _ in 0..10 {
        trainer.step().unwrap();
        let o = &trainer.optimizer;
        for r in o.weight_rates.iter().chain(&o.bias_rates).chain(&o.zeta) {
            assert!((hyper.eta_min..=hyper.eta_max).contains(r), "rate {r}");
        }
    }
}

#[test]
fn error_falls_over_the_first_epochs() {
    let mut decreasing = 0;
    for seed in 0..10 {
        let (net, mut rng) = bias_net(100 + seed, 30.0);
        let csc = CscStore::random(CscKind::Initial, 1, 2, 1.0, &mut rng);
        let mut trainer = Trainer::new(net, csc, vec![constant_sequence(4, 10, 1)], TrainHyper::default()).unwrap();
        let errors: Vec<f64> = (0..10).map(|_| trainer.step().unwrap().error).collect();
        decreasing += errors.windows(2).all(|w| w[1] < w[0]) as usize;
    }
    assert!(decreasing >= 9, "{decreasing}/10 seeds decreased monotonically");
}

#[test]
fn training_errors() {
    let (net, _) = bias_net(9, 30.0);
    let empty = CscStore { kind: CscKind::Initial, values: vec![] };
    assert!(matches!(Trainer::new(net.clone(), empty, vec![], TrainHyper::default()), Err(Error::Argument(_))));

    let mut wild = net.clone();
    let n = wild.topology.neuron_count();
    let weights = vec![1e308; n * n];
    let masked: Vec<f64> =
        (0..n * n).map(|k| if wild.topology.is_connected(k / n, k % n) { weights[k] } else { 0.0 }).collect();
    wild.params = Params::from_parts(&wild.topology, masked, vec![0.0; n]).unwrap();
    let csc = CscStore { kind: CscKind::Initial, values: vec![vec![0.0, 0.0]] };
    let mut trainer = Trainer::new(wild, csc, vec![constant_sequence(4, 5, 0)], TrainHyper::default()).unwrap();
    assert!(matches!(trainer.step(), Err(Error::Divergence { epoch: 1, .. })));
}

#[test]
fn associator_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut assoc = Associator::zeros(3, 2, 2);
    for w in assoc.weights.as_mut_slice() {
        *w = rng.random_range(-1.0..1.0);
    }
    for b in &mut assoc.biases {
        *b = rng.random_range(-0.5..0.5);
    }
    let pairs: Vec<AssociationPair> = (0..4)
        .map(|_| AssociationPair {
            somatosensory: (0..2).map(|_| rng.random_range(-1.0..1.0)).collect(),
            visual: (0..2).map(|_| rng.random_range(-1.0..1.0)).collect(),
            auditory: (0..3).map(|_| rng.random_range(-0.1..0.1)).collect(),
        })
        .collect();
    // Independent error: half the squared distance of the activated outputs.
    let error = |a: &Associator| -> f64 {
        pairs
            .iter()
            .map(|p| {
                let z = a.associate(&p.somatosensory, &p.visual).unwrap();
                z.iter().zip(&p.auditory).map(|(zi, ci)| 0.5 * (sigmoid(*zi) - sigmoid(*ci)).powi(2)).sum::<f64>()
            })
            .sum()
    };
    let g = assoc.gradients(&pairs).unwrap();
    assert!((g.error - error(&assoc)).abs() < 1e-14);
    let h = 1e-6;
    let check = |analytic: f64, plus: f64, minus: f64| {
        let fd = (plus - minus) / (2.0 * h);
        assert!((analytic - fd).abs() / analytic.abs().max(fd.abs()).max(1e-8) <= 1e-6, "{analytic} vs {fd}");
    };
    for k in 0..assoc.weights.as_slice().len() {
        let (mut p, mut m) = (assoc.clone(), assoc.clone());
        p.weights.as_mut_slice()[k] += h;
        m.weights.as_mut_slice()[k] -= h;
        check(g.weights[k], error(&p), error(&m));
    }
    for i in 0..3 {
        let (mut p, mut m) = (assoc.clone(), assoc.clone());
        p.biases[i] += h;
        m.biases[i] -= h;
        check(g.biases[i], error(&p), error(&m));
    }

    let hyper = TrainHyper { max_epochs: 3000, convergence_threshold: 1e-10, ..TrainHyper::default() };
    let (report, _) = fit_associator(&mut assoc, &pairs, &hyper).unwrap();
    assert!(report.final_error().unwrap() < error(&Associator::zeros(3, 2, 2)));
    let bad = vec![AssociationPair { somatosensory: vec![0.0], visual: vec![0.0, 0.0], auditory: vec![0.0; 3] }];
    assert!(matches!(assoc.gradients(&bad), Err(Error::Argument(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn divergence_is_never_negative(seed in any::<u64>(), io in 2usize..8, steps in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || Matrix::from_rows(
            &(0..steps).map(|_| softmax(&(0..io).map(|_| rng.random_range(-4.0..4.0)).collect::<Vec<_>>())).collect::<Vec<_>>(),
        ).unwrap();
        let (a, b) = (draw(), draw());
        prop_assert!(kld_error(&a, &b).unwrap().value >= -1e-15);
        prop_assert!(kld_error(&a, &a).unwrap().value.abs() < 1e-12);
    }
}
