//! Forward dynamics of the leaky-integrator network.
//!
//! Time step 0 holds initial states only. For `t >= 1`:
//!
//! ```text
//! x[t,i] = y[t-1,i]                    for non-IO neurons
//! x[t,i] = clamped / fed back / mixed  for IO neurons (see StepInput)
//! z[t,i] = (1 - 1/tau_i) z[t-1,i] + (1/tau_i) (sum_j w_ij x[t,j] + b_i)
//! y[t,i] = f(z[t,i])
//! ```

use super::activation::{sigmoid, softmax_into};
use super::topology::{Direction, IoActivation, Params, Topology};
use crate::{Error, Matrix, Result};

/// How the IO layer receives its input at one step.
#[derive(Clone, Copy, Debug)]
pub enum StepInput<'a> {
    /// External input replaces the recurrent IO input.
    Clamped(&'a [f64]),
    /// The previous IO output is fed back.
    ClosedLoop,
    /// `alpha * target[t-1] + (1 - alpha) * y[t-1]`.
    TeacherForced { alpha: f64, previous_target: &'a [f64] },
}

/// Input activation, internal state and output of every neuron at one step.
#[derive(Clone, Debug, PartialEq)]
pub struct NeuronState {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub y: Vec<f64>,
}

/// How a whole sequence drives the IO layer.
#[derive(Clone, Copy, Debug)]
pub enum Drive<'a> {
    /// Row `t-1` is the IO input at step `t`; the sequence has `rows` steps.
    Clamped(&'a Matrix),
    ClosedLoop,
    /// Row `t` is the desired IO output at step `t` (row 0 is the initial
    /// activation), so the sequence has `rows - 1` steps.
    TeacherForced {
        alpha: f64,
        targets: &'a Matrix,
    },
}

impl Drive<'_> {
    /// Number of steps implied by the drive, if it carries data.
    pub fn implied_steps(&self) -> Option<usize> {
        match self {
            Drive::Clamped(m) => Some(m.rows()),
            Drive::ClosedLoop => None,
            Drive::TeacherForced { targets, .. } => Some(targets.rows().saturating_sub(1)),
        }
    }
}

/// The full trajectory `x, z, y` for `t = 0..=T`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    n: usize,
    steps: usize,
    pub(crate) x: Vec<f64>,
    pub(crate) z: Vec<f64>,
    pub(crate) y: Vec<f64>,
}

impl Trajectory {
    /// Sequence length `T` (number of dynamic steps).
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn neuron_count(&self) -> usize {
        self.n
    }

    pub fn x(&self, t: usize) -> &[f64] {
        &self.x[t * self.n..(t + 1) * self.n]
    }

    pub fn z(&self, t: usize) -> &[f64] {
        &self.z[t * self.n..(t + 1) * self.n]
    }

    pub fn y(&self, t: usize) -> &[f64] {
        &self.y[t * self.n..(t + 1) * self.n]
    }

    /// Internal states of the Csc units at the final step.
    pub fn final_csc(&self, topology: &Topology) -> Vec<f64> {
        self.z(self.steps)[topology.csc_range()].to_vec()
    }

    /// IO outputs for `t = 0..=T` as a matrix.
    pub fn io_outputs(&self, topology: &Topology) -> Matrix {
        let io = topology.io_range();
        let data = (0..=self.steps).flat_map(|t| self.y(t)[io.clone()].iter().copied()).collect();
        Matrix::from_vec(self.steps + 1, topology.io_count, data).expect("consistent sizes")
    }
}

/// State at `t = 0`: all internal states zero except the Csc units of a
/// context-bias network, which start at `c0`.
pub fn initial_state(topology: &Topology, c0: Option<&[f64]>) -> Result<NeuronState> {
    let n = topology.neuron_count();
    let mut z = vec![0.0; n];
    match (topology.direction, c0) {
        (Direction::ContextBias, Some(c)) => {
            if c.len() != topology.csc_count {
                return Err(Error::Argument(format!(
                    "initial Csc vector has {} entries, expected {}",
                    c.len(),
                    topology.csc_count
                )));
            }
            z[topology.csc_range()].copy_from_slice(c);
        }
        (Direction::ContextBias, None) => {
            return Err(Error::Argument("a context-bias network needs initial Csc states".into()))
        }
        (Direction::ContextAbstraction, _) => {}
    }
    let mut y = vec![0.0; n];
    activate(topology, &z, &mut y);
    Ok(NeuronState { x: vec![0.0; n], z, y })
}

fn activate(topology: &Topology, z: &[f64], y: &mut [f64]) {
    let io = topology.io_count;
    match topology.io_activation {
        IoActivation::DecisiveNormalisation => softmax_into(&z[..io], &mut y[..io]),
        IoActivation::Sigmoid => {
            for (o, &v) in y[..io].iter_mut().zip(&z[..io]) {
                *o = sigmoid(v);
            }
        }
    }
    for (o, &v) in y[io..].iter_mut().zip(&z[io..]) {
        *o = sigmoid(v);
    }
}

fn io_input(input: StepInput<'_>, prev_y_io: &[f64], out: &mut [f64]) -> Result<()> {
    match input {
        StepInput::Clamped(v) => {
            if v.len() != out.len() {
                return Err(Error::Argument(format!(
                    "clamped input has {} channels, IO layer has {}",
                    v.len(),
                    out.len()
                )));
            }
            out.copy_from_slice(v);
        }
        StepInput::ClosedLoop => out.copy_from_slice(prev_y_io),
        StepInput::TeacherForced { alpha, previous_target } => {
            if previous_target.len() != out.len() {
                return Err(Error::Argument("teacher signal width differs from IO layer".into()));
            }
            for ((o, &t), &y) in out.iter_mut().zip(previous_target).zip(prev_y_io) {
                *o = alpha * t + (1.0 - alpha) * y;
            }
        }
    }
    Ok(())
}

/// Allocation-free step on raw slices; `x`, `z`, `y` are the outputs.
#[allow(clippy::too_many_arguments)]
fn step_into(
    topology: &Topology,
    params: &Params,
    inv_tau: &[f64],
    prev_z: &[f64],
    prev_y: &[f64],
    input: StepInput<'_>,
    x: &mut [f64],
    z: &mut [f64],
    y: &mut [f64],
) -> Result<()> {
    let io = topology.io_count;
    io_input(input, &prev_y[..io], &mut x[..io])?;
    x[io..].copy_from_slice(&prev_y[io..]);
    for (i, zi) in z.iter_mut().enumerate() {
        let cols = topology.inputs_of(i);
        let w = &params.weight_row(i)[cols.clone()];
        let drive: f64 = w.iter().zip(&x[cols]).map(|(a, b)| a * b).sum::<f64>() + params.biases[i];
        *zi = (1.0 - inv_tau[i]) * prev_z[i] + inv_tau[i] * drive;
    }
    activate(topology, z, y);
    Ok(())
}

/// One step of the dynamics from `prev` (state at `t-1`) to the state at `t`.
pub fn forward_step(
    topology: &Topology,
    params: &Params,
    prev: &NeuronState,
    input: StepInput<'_>,
) -> Result<NeuronState> {
    params.check(topology)?;
    let n = topology.neuron_count();
    if prev.z.len() != n || prev.y.len() != n {
        return Err(Error::Config("state size does not match topology".into()));
    }
    let inv_tau: Vec<f64> = topology.taus().iter().map(|t| 1.0 / t).collect();
    let mut next = NeuronState { x: vec![0.0; n], z: vec![0.0; n], y: vec![0.0; n] };
    step_into(topology, params, &inv_tau, &prev.z, &prev.y, input, &mut next.x, &mut next.z, &mut next.y)?;
    Ok(next)
}

/// Runs a whole sequence of `steps` dynamic steps.
///
/// Context-bias networks need `c0`; context-abstraction networks must be
/// driven by clamped input. For data-carrying drives `steps` must agree with
/// the data (see [`Drive`]).
pub fn run_sequence(
    topology: &Topology,
    params: &Params,
    c0: Option<&[f64]>,
    drive: Drive<'_>,
    steps: usize,
) -> Result<Trajectory> {
    params.check(topology)?;
    if steps < 1 {
        return Err(Error::Argument("a sequence needs at least one step".into()));
    }
    if let Some(implied) = drive.implied_steps() {
        if implied != steps {
            return Err(Error::Argument(format!("drive provides {implied} steps, {steps} requested")));
        }
    }
    let io = topology.io_count;
    match drive {
        Drive::Clamped(m) if m.cols() != io => {
            return Err(Error::Argument(format!("input has {} channels, IO layer has {io}", m.cols())))
        }
        Drive::TeacherForced { targets, .. } if targets.cols() != io => {
            return Err(Error::Argument(format!("targets have {} channels, IO layer has {io}", targets.cols())))
        }
        Drive::Clamped(_) => {}
        _ if topology.direction == Direction::ContextAbstraction => {
            return Err(Error::Argument("a context-abstraction network must be driven by clamped input".into()))
        }
        _ => {}
    }

    let n = topology.neuron_count();
    let init = initial_state(topology, c0)?;
    let mut traj = Trajectory {
        n,
        steps,
        x: vec![0.0; (steps + 1) * n],
        z: vec![0.0; (steps + 1) * n],
        y: vec![0.0; (steps + 1) * n],
    };
    traj.z[..n].copy_from_slice(&init.z);
    traj.y[..n].copy_from_slice(&init.y);
    let inv_tau: Vec<f64> = topology.taus().iter().map(|t| 1.0 / t).collect();

    for t in 1..=steps {
        let input = match drive {
            Drive::Clamped(m) => StepInput::Clamped(m.row(t - 1)),
            Drive::ClosedLoop => StepInput::ClosedLoop,
            Drive::TeacherForced { alpha, targets } => {
                StepInput::TeacherForced { alpha, previous_target: targets.row(t - 1) }
            }
        };
        let (z_prev, z_next) = traj.z.split_at_mut(t * n);
        let (y_prev, y_next) = traj.y.split_at_mut(t * n);
        step_into(
            topology,
            params,
            &inv_tau,
            &z_prev[(t - 1) * n..],
            &y_prev[(t - 1) * n..],
            input,
            &mut traj.x[t * n..(t + 1) * n],
            &mut z_next[..n],
            &mut y_next[..n],
        )?;
    }
    Ok(traj)
}
