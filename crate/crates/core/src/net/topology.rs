use std::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Initial Csc states drive generation of the IO sequence.
    ContextBias,
    /// A clamped IO sequence is abstracted into final Csc states.
    ContextAbstraction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IoActivation {
    /// Softmax over the IO layer.
    DecisiveNormalisation,
    Sigmoid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layer {
    Io,
    Cf,
    Cs,
}

/// Layer sizes, timescales and the role of one MTRNN.
///
/// Neurons are indexed IO first, then Cf, then Cs; the Csc units are the
/// leading `csc_count` neurons of the Cs layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub io_count: usize,
    pub cf_count: usize,
    pub cs_count: usize,
    pub csc_count: usize,
    pub tau_io: f64,
    pub tau_cf: f64,
    pub tau_cs: f64,
    pub direction: Direction,
    pub io_activation: IoActivation,
}

impl Topology {
    /// Builds a topology with `csc_count = ceil(cs_count / 2)`.
    pub fn new(
        io_count: usize,
        cf_count: usize,
        cs_count: usize,
        taus: [f64; 3],
        direction: Direction,
        io_activation: IoActivation,
    ) -> Result<Self> {
        let t = Topology {
            io_count,
            cf_count,
            cs_count,
            csc_count: cs_count.div_ceil(2),
            tau_io: taus[0],
            tau_cf: taus[1],
            tau_cs: taus[2],
            direction,
            io_activation,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn with_csc_count(mut self, csc_count: usize) -> Result<Self> {
        self.csc_count = csc_count;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.io_count == 0 || self.cf_count == 0 || self.cs_count == 0 || self.csc_count == 0 {
            return Err(Error::Config("all layer sizes must be at least 1".into()));
        }
        if self.csc_count > self.cs_count {
            return Err(Error::Config(format!("csc_count {} exceeds cs_count {}", self.csc_count, self.cs_count)));
        }
        for (name, tau) in [("tau_io", self.tau_io), ("tau_cf", self.tau_cf), ("tau_cs", self.tau_cs)] {
            if !(tau >= 1.0) || !tau.is_finite() {
                return Err(Error::Config(format!("{name} = {tau} must be a finite value >= 1")));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn neuron_count(&self) -> usize {
        self.io_count + self.cf_count + self.cs_count
    }

    pub fn io_range(&self) -> Range<usize> {
        0..self.io_count
    }

    pub fn cf_range(&self) -> Range<usize> {
        self.io_count..self.io_count + self.cf_count
    }

    pub fn cs_range(&self) -> Range<usize> {
        self.io_count + self.cf_count..self.neuron_count()
    }

    pub fn csc_range(&self) -> Range<usize> {
        let start = self.io_count + self.cf_count;
        start..start + self.csc_count
    }

    pub fn layer(&self, i: usize) -> Layer {
        if i < self.io_count {
            Layer::Io
        } else if i < self.io_count + self.cf_count {
            Layer::Cf
        } else {
            Layer::Cs
        }
    }

    pub fn tau(&self, i: usize) -> f64 {
        match self.layer(i) {
            Layer::Io => self.tau_io,
            Layer::Cf => self.tau_cf,
            Layer::Cs => self.tau_cs,
        }
    }

    pub fn taus(&self) -> Vec<f64> {
        (0..self.neuron_count()).map(|i| self.tau(i)).collect()
    }

    /// Presynaptic neurons of `i`: its own layer plus the adjacent layer(s).
    /// IO and Cs are never linked directly, so the range is contiguous.
    pub fn inputs_of(&self, i: usize) -> Range<usize> {
        match self.layer(i) {
            Layer::Io => 0..self.io_count + self.cf_count,
            Layer::Cf => 0..self.neuron_count(),
            Layer::Cs => self.io_count..self.neuron_count(),
        }
    }

    #[inline]
    pub fn is_connected(&self, to: usize, from: usize) -> bool {
        self.inputs_of(to).contains(&from)
    }
}

/// Weights `w[i][j]` (from neuron `j` to neuron `i`) and biases of one MTRNN.
///
/// Entries outside [`Topology::inputs_of`] are structurally absent: they are
/// zero and no operation in this crate ever writes them.
#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    n: usize,
    pub(crate) weights: Vec<f64>,
    pub(crate) biases: Vec<f64>,
}

impl Params {
    pub fn zeros(topology: &Topology) -> Self {
        let n = topology.neuron_count();
        Params { n, weights: vec![0.0; n * n], biases: vec![0.0; n] }
    }

    /// Connected weights uniform in `[-range, range]`, biases zero.
    pub fn random<R: Rng>(topology: &Topology, range: f64, rng: &mut R) -> Self {
        let mut p = Params::zeros(topology);
        for i in 0..p.n {
            for j in topology.inputs_of(i) {
                p.weights[i * p.n + j] = rng.random_range(-range..=range);
            }
        }
        p
    }

    pub fn from_parts(topology: &Topology, weights: Vec<f64>, biases: Vec<f64>) -> Result<Self> {
        let n = topology.neuron_count();
        if weights.len() != n * n || biases.len() != n {
            return Err(Error::Config(format!(
                "parameter dimensions ({} weights, {} biases) do not match {n} neurons",
                weights.len(),
                biases.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                if !topology.is_connected(i, j) && weights[i * n + j] != 0.0 {
                    return Err(Error::Config(format!("weight {i}<-{j} is masked but non-zero")));
                }
            }
        }
        Ok(Params { n, weights, biases })
    }

    pub fn neuron_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, to: usize, from: usize) -> f64 {
        self.weights[to * self.n + from]
    }

    pub fn set_weight(&mut self, topology: &Topology, to: usize, from: usize, w: f64) -> Result<()> {
        if !topology.is_connected(to, from) {
            return Err(Error::Argument(format!("weight {to}<-{from} is not a connection")));
        }
        self.weights[to * self.n + from] = w;
        Ok(())
    }

    #[inline]
    pub fn weight_row(&self, to: usize) -> &[f64] {
        &self.weights[to * self.n..(to + 1) * self.n]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn biases_mut(&mut self) -> &mut [f64] {
        &mut self.biases
    }

    pub(crate) fn check(&self, topology: &Topology) -> Result<()> {
        let n = topology.neuron_count();
        if self.n != n || self.weights.len() != n * n || self.biases.len() != n {
            return Err(Error::Config(format!("parameters sized for {} neurons, topology has {n}", self.n)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CscKind {
    /// States at t = 0 that trigger generation.
    Initial,
    /// Target states at t = T produced by abstraction.
    Final,
}

/// One Csc vector per training sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CscStore {
    pub kind: CscKind,
    pub values: Vec<Vec<f64>>,
}

impl CscStore {
    pub fn random<R: Rng>(kind: CscKind, sequences: usize, dim: usize, range: f64, rng: &mut R) -> Self {
        let values = (0..sequences).map(|_| (0..dim).map(|_| rng.random_range(-range..=range)).collect()).collect();
        CscStore { kind, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, seq: usize) -> Result<&[f64]> {
        self.values.get(seq).map(Vec::as_slice).ok_or_else(|| Error::Data(format!("no Csc entry for sequence {seq}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedTree;

    fn topo() -> Topology {
        Topology::new(3, 4, 5, [2.0, 5.0, 70.0], Direction::ContextBias, IoActivation::DecisiveNormalisation).unwrap()
    }

    #[test]
    fn default_csc_is_half_of_cs_rounded_up() {
        assert_eq!(topo().csc_count, 3);
        assert_eq!(topo().csc_range(), 7..10);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(topo().with_csc_count(6).is_err());
        let mut t = topo();
        t.tau_cf = 0.5;
        assert!(t.validate().is_err());
        let mut t = topo();
        t.io_count = 0;
        assert!(t.validate().is_err());
    }

    #[test]
    fn no_direct_io_cs_links() {
        let t = topo();
        for i in t.io_range() {
            for j in t.cs_range() {
                assert!(!t.is_connected(i, j));
                assert!(!t.is_connected(j, i));
            }
        }
        for i in t.cf_range() {
            assert_eq!(t.inputs_of(i), 0..12);
        }
    }

    #[test]
    fn random_params_respect_mask() {
        let t = topo();
        let p = Params::random(&t, 0.025, &mut SeedTree::new(1).stream("w", 0));
        for i in 0..12 {
            for j in 0..12 {
                let w = p.weight(i, j);
                if t.is_connected(i, j) {
                    assert!(w.abs() <= 0.025);
                } else {
                    assert_eq!(w, 0.0);
                }
            }
        }
        let mut q = p.clone();
        assert!(q.set_weight(&t, 0, 11, 1.0).is_err());
    }
}
