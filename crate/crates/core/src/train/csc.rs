//! Updates of the Csc states and their learning rates.

use super::hyper::TrainHyper;
use super::rprop::OptimizerState;
use crate::net::{CscKind, CscStore, Topology};
use crate::{Error, Result};

/// `zeta_i` = mean of the weight rates `eta_ij` from the Cf and Cs layers into
/// Csc unit `i`, clamped to `[eta_min, eta_max]`.
pub fn adapt_zeta(state: &mut OptimizerState, topology: &Topology, hyper: &TrainHyper) -> Vec<f64> {
    let n = topology.neuron_count();
    let from = topology.io_count..n;
    let count = (topology.cf_count + topology.cs_count) as f64;
    let zeta: Vec<f64> = topology
        .csc_range()
        .map(|i| {
            let sum: f64 = state.weight_rates[i * n..(i + 1) * n][from.clone()].iter().sum();
            (sum / count).clamp(hyper.eta_min, hyper.eta_max)
        })
        .collect();
    state.zeta.clone_from(&zeta);
    zeta
}

fn check(store: &CscStore, grads: &[Vec<f64>], zeta: &[f64], topology: &Topology, kind: CscKind) -> Result<()> {
    if store.kind != kind {
        return Err(Error::Argument(format!("expected a {kind:?} Csc store, got {:?}", store.kind)));
    }
    if grads.len() != store.len() {
        return Err(Error::Argument(format!("{} gradient vectors for {} stored sequences", grads.len(), store.len())));
    }
    let d = topology.csc_count;
    if zeta.len() != d || grads.iter().chain(&store.values).any(|v| v.len() != d) {
        return Err(Error::Argument(format!("Csc vectors must have {d} entries")));
    }
    Ok(())
}

/// `c0_i <- c0_i - zeta_i (1/tau_i) dE/dc0_i` for every stored sequence.
pub fn update_initial_csc(store: &mut CscStore, grads: &[Vec<f64>], zeta: &[f64], topology: &Topology) -> Result<()> {
    check(store, grads, zeta, topology, CscKind::Initial)?;
    let inv_tau = 1.0 / topology.tau_cs;
    for (c, g) in store.values.iter_mut().zip(grads) {
        for ((ci, gi), zi) in c.iter_mut().zip(g).zip(zeta) {
            *ci -= zi * inv_tau * gi;
        }
    }
    Ok(())
}

/// `cT_i <- cT_i - psi zeta_i sign(dE/dcT_i)` for every stored sequence.
///
/// The step is resilient-propagation style: only the direction of the exact
/// gradient is used, so a target moves by `psi * zeta_i` per epoch towards the
/// activity the network produces. With `psi = 0` the targets stay fixed.
pub fn update_final_csc(
    store: &mut CscStore,
    grads: &[Vec<f64>],
    zeta: &[f64],
    psi: f64,
    topology: &Topology,
) -> Result<()> {
    check(store, grads, zeta, topology, CscKind::Final)?;
    for (c, g) in store.values.iter_mut().zip(grads) {
        for ((ci, gi), zi) in c.iter_mut().zip(g).zip(zeta) {
            if *gi != 0.0 {
                *ci -= psi * zi * gi.signum();
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{Direction, IoActivation};

    fn topo(direction: Direction) -> Topology {
        Topology::new(2, 3, 4, [2.0, 5.0, 10.0], direction, IoActivation::Sigmoid).unwrap()
    }

    #[test]
    fn zeta_is_mean_of_cf_and_cs_rates() {
        let t = topo(Direction::ContextBias);
        let h = TrainHyper::default();
        let mut s = OptimizerState::new(&t, &h);
        assert!(adapt_zeta(&mut s, &t, &h).iter().all(|z| (z - 0.05).abs() < 1e-15));
        let n = t.neuron_count();
        for i in t.csc_range() {
            for (k, j) in (t.io_count..n).enumerate() {
                s.weight_rates[i * n + j] = if k % 2 == 0 { 0.1 } else { 0.2 };
            }
        }
        // 7 presynaptic Cf/Cs neurons, 4 at 0.1 and 3 at 0.2.
        let expected = (4.0 * 0.1 + 3.0 * 0.2) / 7.0;
        for z in adapt_zeta(&mut s, &t, &h) {
            assert!((z - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_gradient_leaves_states() {
        let t = topo(Direction::ContextBias);
        let mut store = CscStore { kind: CscKind::Initial, values: vec![vec![0.3, -0.1]; 2] };
        let before = store.clone();
        update_initial_csc(&mut store, &[vec![0.0; 2], vec![0.0; 2]], &[0.5, 0.5], &t).unwrap();
        assert_eq!(store, before);
    }

    #[test]
    fn sequences_update_independently() {
        let t = topo(Direction::ContextBias);
        let mut store = CscStore { kind: CscKind::Initial, values: vec![vec![0.0, 0.0], vec![1.0, 1.0]] };
        update_initial_csc(&mut store, &[vec![1.0, 0.0], vec![0.0, 0.0]], &[0.5, 0.5], &t).unwrap();
        assert_eq!(store.values[0], vec![-0.05, 0.0]);
        assert_eq!(store.values[1], vec![1.0, 1.0]);
    }

    #[test]
    fn final_states_frozen_without_forcing() {
        let t = topo(Direction::ContextAbstraction);
        let mut store = CscStore { kind: CscKind::Final, values: vec![vec![0.4, -0.9]] };
        update_final_csc(&mut store, &[vec![2.0, -3.0]], &[1.0, 1.0], 0.0, &t).unwrap();
        assert_eq!(store.values[0], vec![0.4, -0.9]);
        update_final_csc(&mut store, &[vec![2.0, -3.0]], &[1.0, 1.0], 0.5, &t).unwrap();
        assert!((store.values[0][0] - (0.4 - 0.5)).abs() < 1e-15);
        assert!((store.values[0][1] - (-0.9 + 0.5)).abs() < 1e-15);
        update_final_csc(&mut store, &[vec![0.0, 1e-9]], &[0.2, 0.2], 1e-3, &t).unwrap();
        assert!((store.values[0][0] - (0.4 - 0.5)).abs() < 1e-15);
        assert!((store.values[0][1] - (-0.9 + 0.5 - 2e-4)).abs() < 1e-15);
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let t = topo(Direction::ContextBias);
        let mut store = CscStore { kind: CscKind::Final, values: vec![vec![0.0; 2]] };
        assert!(update_initial_csc(&mut store, &[vec![0.0; 2]], &[0.1, 0.1], &t).is_err());
    }
}
