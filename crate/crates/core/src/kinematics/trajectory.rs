use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sequence::KickSequence;
use crate::constants::SQRT3;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    CenterOfMass,
    Stretch,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::CenterOfMass, Mode::Stretch];

    /// Mode frequency in units of the trap frequency.
    pub fn frequency_ratio(self) -> f64 {
        match self {
            Mode::CenterOfMass => 1.0,
            Mode::Stretch => SQRT3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::CenterOfMass => "c",
            Mode::Stretch => "s",
        }
    }
}

/// σ_z eigenvalues `(s1, s2)` of the two ions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinBranch(pub i8, pub i8);

impl SpinBranch {
    pub const ALL: [SpinBranch; 4] =
        [SpinBranch(1, 1), SpinBranch(1, -1), SpinBranch(-1, 1), SpinBranch(-1, -1)];

    pub fn new(s1: i8, s2: i8) -> Result<Self> {
        if s1.abs() != 1 || s2.abs() != 1 {
            return Err(Error::Contract(format!("spin eigenvalues must be ±1, got ({s1}, {s2})")));
        }
        Ok(Self(s1, s2))
    }

    /// Spin factor multiplying the kick amplitude of `mode`:
    /// `s1 + s2` for the center of mass, `s1 - s2` for the stretch mode.
    pub fn factor(self, mode: Mode) -> f64 {
        let (a, b) = (f64::from(self.0), f64::from(self.1));
        match mode {
            Mode::CenterOfMass => a + b,
            Mode::Stretch => a - b,
        }
    }
}

/// Phase-space polygon `⟨a e^{iω_m t}⟩` of one mode on one spin branch.
///
/// Starts at the origin and appends one vertex per kick. A kick at phase `x`
/// is a momentum kick, so in the co-rotating frame it moves the state by
/// `i · factor · amplitude · e^{i r x}` with `r` the mode frequency ratio.
/// The polygon closes exactly when the corresponding phasor sum vanishes.
pub fn trajectory(seq: &KickSequence, mode: Mode, branch: SpinBranch, alpha_c: f64) -> Vec<Complex64> {
    let amplitude = match mode {
        Mode::CenterOfMass => alpha_c,
        Mode::Stretch => alpha_c / 3f64.powf(0.25),
    };
    let step = Complex64::new(0.0, branch.factor(mode) * amplitude);
    let ratio = mode.frequency_ratio();
    let mut at = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(seq.len() + 1);
    out.push(at);
    for &x in seq.phases() {
        at += step * Complex64::cis(ratio * x);
        out.push(at);
    }
    out
}
