//! Open-quantum-system engine.
//!
//! Operators are sparse complex matrices on a composite [`HilbertSpace`].
//! [`evolve_master`] integrates the Lindblad master equation with an adaptive
//! Dormand–Prince scheme; [`run_trajectory`] and [`batch_trajectories`] unravel
//! the same [`LindbladModel`] into Monte Carlo wave-function trajectories.

mod master;
mod model;
mod ode;
mod operator;
mod space;
mod state;
mod trajectory;

pub use master::{evolve_master, MasterOptions};
pub use model::{Coefficient, CollapseChannel, HamiltonianTerm, LindbladModel};
pub use ode::{DenseStep, Dopri5, Tolerances};
pub use operator::Operator;
pub use space::HilbertSpace;
pub use state::{expectation, QuantumState};
pub use trajectory::{
    batch_trajectories, evolve_no_jump, run_ensemble, run_trajectory, ChannelStats, EnsembleSummary, JumpEvent,
    TrajectoryOptions, TrajectoryRecord,
};

pub use num_complex::Complex64 as C64;
