//! Closed-form gate mathematics in dimensionless phases `x_n = ω t_n`.
//!
//! Two ions share a center-of-mass mode at `ω` and a stretch mode at `√3 ω`.
//! Each kick displaces both modes by a spin-dependent amount; the gate is
//! clean when both phasor sums vanish, and the enclosed phase-space area sets
//! the two-qubit phase.

mod design;
mod sequence;
mod trajectory;
mod trap;
pub mod tuning;

pub use design::GateDesign;
pub use sequence::{closure_residual, gate_time, phase_factor, ClosureResidual, GateTime, KickSequence};
pub(crate) use sequence::weighted_error;
pub use trajectory::{trajectory, Mode, SpinBranch};
pub use trap::{mode_set, ModeSet, TrapLaserSpec};
pub use tuning::{tune_trap_frequency, Tuning};
