use serde::{Deserialize, Serialize};

use super::sequence::KickSequence;
use super::trap::TrapLaserSpec;
use super::tuning::phase_mismatch;
use crate::error::{Error, Result};

/// A finished, grid-aligned gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateDesign {
    /// Decoded pulse phases, sorted, first pulse at zero.
    pub sequence: KickSequence,
    /// Picked grid slot indices, one per pulse.
    pub slots: Vec<i64>,
    pub n_batches: usize,
    pub pulses_per_batch: usize,
    /// Signed `φ̃`; the tuning uses `|φ̃|`.
    pub phase_factor: f64,
    pub omega_star: f64,
    pub overshoot: u64,
    /// Closure error `|S_c|² + |S_s|²/√3` of the decoded sequence.
    pub epsilon: f64,
    pub gate_time_periods: f64,
    pub gate_time_s: f64,
    /// Repetition rate the grid corresponds to at `omega_star`, Hz.
    pub implied_rep_rate: f64,
}

impl GateDesign {
    /// Check the phase-frequency relation to `rel_tol` and the trap window.
    pub fn check(&self, spec: &TrapLaserSpec, rel_tol: f64) -> Result<()> {
        if !spec.contains(self.omega_star) {
            return Err(Error::Verification(format!(
                "omega_star {:.6e} outside [{:.6e}, {:.6e}]",
                self.omega_star, spec.omega_min, spec.omega_max
            )));
        }
        let mismatch = phase_mismatch(self.phase_factor, spec, self.omega_star, self.overshoot)?;
        if mismatch.abs() > rel_tol {
            return Err(Error::Verification(format!(
                "alpha_c^2 |phi| misses pi/4 + 2 pi n by relative {mismatch:.3e}"
            )));
        }
        Ok(())
    }
}
