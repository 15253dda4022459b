//! Network topology, parameters and forward dynamics.

pub mod activation;
mod forward;
mod topology;

pub use forward::{forward_step, initial_state, run_sequence, Drive, NeuronState, StepInput, Trajectory};
pub use topology::{CscKind, CscStore, Direction, IoActivation, Layer, Params, Topology};
