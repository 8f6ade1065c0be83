//! Design and verification toolkit for ultra-fast two-qubit phase gates on
//! trapped ions driven by trains of resonant, spin-dependent momentum kicks.
//!
//! The workflow is split in the same stages as the crate layout:
//!
//! * [`kinematics`]: closed-form gate mathematics (mode structure, orbit
//!   closure, geometric phase, trap-frequency tuning, trajectories).
//! * [`designer`]: multi-start continuous search for closed kick sequences.
//! * [`ga`]: snapping onto the laser pulse grid and genetic fine tuning of the
//!   pulse picking.
//! * [`oracle`]: independent displacement-algebra verification.
//! * [`budget`]: analytic error estimates.
//! * [`pipeline`]: configuration, end-to-end runs, sweeps and data export.
//!
//! All phases inside the math core are dimensionless, `x = ω t`.

pub mod budget;
pub mod constants;
pub mod designer;
pub mod error;
pub mod ga;
pub mod kinematics;
pub mod oracle;
pub mod pipeline;
pub mod rng;

pub use error::{Error, Result};
pub use kinematics::{
    closure_residual, gate_time, mode_set, phase_factor, trajectory, tune_trap_frequency,
    ClosureResidual, GateDesign, GateTime, KickSequence, Mode, ModeSet, SpinBranch,
    TrapLaserSpec,
};
