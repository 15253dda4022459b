//! Multiple-timescale recurrent neural networks (MTRNNs).
//!
//! Two network directions share one leaky-integrator core:
//!
//! * **context bias** – an initial state of the context-controlling (Csc)
//!   units drives the generation of a sequence (used for utterances);
//! * **context abstraction** – a clamped input sequence is compressed into the
//!   final state of the Csc units, whose targets self-organise during training.
//!
//! [`assembly`] joins one generator and two abstractors through a cell-assembly
//! associator so that proprioceptive and visual percepts can be described by a
//! phoneme sequence. [`encoders`] provides the data side (grammar, phoneme
//! spike trains, synthetic sensors) and [`metrics`] the analysis side.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod cli;
pub mod encoders;
mod error;
pub mod matrix;
pub mod metrics;
pub mod net;
pub mod rng;
pub mod train;

pub use error::{Error, Result};
pub use matrix::Matrix;
