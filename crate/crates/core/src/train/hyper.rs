use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Training meta-parameters. Defaults are the standard evaluation settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainHyper {
    /// Teacher-forcing fraction of the desired output fed back as IO input.
    pub alpha: f64,
    pub eta0: f64,
    pub beta0: f64,
    pub zeta0: f64,
    pub xi_plus: f64,
    pub xi_minus: f64,
    pub eta_max: f64,
    pub eta_min: f64,
    /// Self-organisation forcing constant (abstraction nets only).
    pub psi: f64,
    pub max_epochs: usize,
    /// Stop once the epoch error per error-carrying step falls below this.
    pub convergence_threshold: f64,
}

impl Default for TrainHyper {
    fn default() -> Self {
        TrainHyper {
            alpha: 0.1,
            eta0: 0.05,
            beta0: 0.05,
            zeta0: 0.05,
            xi_plus: 1.01,
            xi_minus: 0.96,
            eta_max: 1.0,
            eta_min: 1e-6,
            psi: 0.0,
            max_epochs: 20_000,
            convergence_threshold: 1e-3,
        }
    }
}

impl TrainHyper {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if !(0.0 < self.xi_minus && self.xi_minus < 1.0 && 1.0 < self.xi_plus) {
            return fail(format!("need 0 < xi_minus < 1 < xi_plus, got {} and {}", self.xi_minus, self.xi_plus));
        }
        if !(0.0 < self.eta_min && self.eta_min <= self.eta_max) {
            return fail(format!("need 0 < eta_min <= eta_max, got {} and {}", self.eta_min, self.eta_max));
        }
        for (name, v) in [("eta0", self.eta0), ("beta0", self.beta0), ("zeta0", self.zeta0)] {
            if !(self.eta_min <= v && v <= self.eta_max) {
                return fail(format!("{name} = {v} outside [eta_min, eta_max]"));
            }
        }
        if !(0.0..1.0).contains(&self.psi) {
            return fail(format!("psi = {} must lie in [0, 1)", self.psi));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return fail(format!("alpha = {} must lie in [0, 1]", self.alpha));
        }
        if self.max_epochs == 0 {
            return fail("max_epochs must be positive".into());
        }
        if !(self.convergence_threshold >= 0.0) {
            return fail("convergence_threshold must be non-negative".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let h = TrainHyper::default();
        h.validate().unwrap();
        assert_eq!((h.xi_plus, h.xi_minus, h.eta_max, h.eta_min), (1.01, 0.96, 1.0, 1e-6));
        assert_eq!((h.eta0, h.beta0, h.zeta0, h.alpha), (0.05, 0.05, 0.05, 0.1));
    }

    #[test]
    fn rejects_out_of_range_values() {
        let bad = [
            TrainHyper { xi_plus: 0.99, ..Default::default() },
            TrainHyper { xi_minus: 1.0, ..Default::default() },
            TrainHyper { psi: 1.0, ..Default::default() },
            TrainHyper { eta0: 2.0, ..Default::default() },
            TrainHyper { max_epochs: 0, ..Default::default() },
        ];
        for h in bad {
            assert!(h.validate().is_err(), "{h:?}");
        }
    }
}
