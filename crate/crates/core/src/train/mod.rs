//! Gradients, adaptive learning rates and the training loop.

mod bptt;
mod csc;
mod hyper;
mod loss;
mod rprop;
mod trainer;

pub use bptt::{bptt_context_abstraction, bptt_context_bias, GradientSet};
pub use csc::{adapt_zeta, update_final_csc, update_initial_csc};
pub use hyper::TrainHyper;
pub use loss::{kld_error, lms_error, Kld};
pub use rprop::{adapt as adapt_rate, rprop_update, OptimizerState};
pub use trainer::{accumulate_gradients, train, EpochGradients, EpochRecord, Network, TrainReport, Trainer};
