use serde::{Deserialize, Serialize};

use crate::net::{Direction, IoActivation, Topology};
use crate::train::TrainHyper;
use crate::{Error, Result};

/// Size, timescales and training settings of one modality network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetSpec {
    pub io: usize,
    pub cf: usize,
    pub cs: usize,
    pub csc: usize,
    pub tau_io: f64,
    pub tau_cf: f64,
    pub tau_cs: f64,
    /// Csc states are drawn uniformly from `[-range, range]`.
    pub csc_init_range: f64,
    pub hyper: TrainHyper,
}

impl NetSpec {
    pub fn topology(&self, direction: Direction, io_activation: IoActivation) -> Result<Topology> {
        Topology::new(self.io, self.cf, self.cs, [self.tau_io, self.tau_cf, self.tau_cs], direction, io_activation)?
            .with_csc_count(self.csc)
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.csc_init_range >= 0.0 && self.csc_init_range.is_finite()) {
            return Err(Error::Config(format!("{name}.csc_init_range must be finite and ≥ 0")));
        }
        self.hyper.validate().map_err(|e| Error::Config(format!("{name}.hyper: {e}")))?;
        self.topology(Direction::ContextBias, IoActivation::Sigmoid)
            .map(|_| ())
            .map_err(|e| Error::Config(format!("{name}: {e}")))
    }
}

/// The three-network model with its cell-assembly associator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub auditory: NetSpec,
    pub somatosensory: NetSpec,
    pub visual: NetSpec,
    /// Initial weights are drawn uniformly from `[-range, range]`.
    pub weight_range: f64,
    pub associator: TrainHyper,
    /// Steps generated beyond the longest training utterance.
    pub generation_margin: usize,
}

impl Default for ModelSpec {
    fn default() -> Self {
        let hyper = |psi: f64| TrainHyper { psi, max_epochs: 50_000, ..TrainHyper::default() };
        ModelSpec {
            auditory: NetSpec {
                io: 44,
                cf: 80,
                cs: 23,
                csc: 12,
                tau_io: 2.0,
                tau_cf: 5.0,
                tau_cs: 70.0,
                csc_init_range: 0.01,
                hyper: hyper(0.0),
            },
            somatosensory: NetSpec {
                io: 5,
                cf: 40,
                cs: 23,
                csc: 12,
                tau_io: 2.0,
                tau_cf: 5.0,
                tau_cs: 50.0,
                csc_init_range: 1.0,
                hyper: hyper(5e-4),
            },
            visual: NetSpec {
                io: 19,
                cf: 40,
                cs: 23,
                csc: 12,
                tau_io: 2.0,
                tau_cf: 5.0,
                tau_cs: 16.0,
                csc_init_range: 1.0,
                hyper: hyper(5e-5),
            },
            weight_range: 0.025,
            associator: TrainHyper { max_epochs: 50_000, convergence_threshold: 1e-8, ..TrainHyper::default() },
            generation_margin: 10,
        }
    }
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        self.auditory.validate("auditory")?;
        self.somatosensory.validate("somatosensory")?;
        self.visual.validate("visual")?;
        self.associator.validate().map_err(|e| Error::Config(format!("associator: {e}")))?;
        if self.auditory.hyper.psi != 0.0 {
            return Err(Error::Config("auditory.hyper.psi has no effect on a generation net; keep it 0".into()));
        }
        if !(self.weight_range > 0.0 && self.weight_range.is_finite()) {
            return Err(Error::Config("weight_range must be positive".into()));
        }
        Ok(())
    }
}
