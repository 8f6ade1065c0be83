use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::SQRT3;
use crate::error::{Error, Result};

/// Kick arrival phases `x_n = ω t_n` in radians.
///
/// The canonical form is sorted ascending with the first kick at zero.
/// Repeated phases are allowed; they stand for co-located pulses of a batch.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KickSequence(Vec<f64>);

impl KickSequence {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = phases.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::Domain { what: "kick phases must be finite and non-negative", value: bad });
        }
        Ok(Self(phases))
    }

    /// Sort ascending and translate so that the first kick sits at zero.
    pub fn canonical(phases: &[f64]) -> Result<Self> {
        let mut v = phases.to_vec();
        if let Some(&bad) = v.iter().find(|x| !x.is_finite()) {
            return Err(Error::Domain { what: "kick phases must be finite", value: bad });
        }
        v.sort_by(f64::total_cmp);
        if let Some(&first) = v.first() {
            v.iter_mut().for_each(|x| *x -= first);
        }
        Ok(Self(v))
    }

    pub fn phases(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Every kick replaced by `m` coincident kicks.
    pub fn batched(&self, m: usize) -> Self {
        Self(self.0.iter().flat_map(|&x| std::iter::repeat_n(x, m)).collect())
    }

    /// `x_last - x_first` of the sorted sequence; zero for fewer than two kicks.
    pub fn span(&self) -> f64 {
        let (lo, hi) = self
            .0
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        if self.0.len() < 2 { 0.0 } else { hi - lo }
    }
}

/// Phasor sums of both modes and the weighted closure error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosureResidual {
    pub s_c: Complex64,
    pub s_s: Complex64,
    /// `|S_c|² + |S_s|²/√3`, the frequency-independent optimizer objective.
    pub epsilon_dimless: f64,
}

impl ClosureResidual {
    /// Motional error `|A_c|² + |A_s|²` on the worst spin branch
    /// (`|σ_1^z ± σ_2^z| = 2`), i.e. `4 α_c² ε_dimless`.
    pub fn epsilon(&self, alpha_c: f64) -> f64 {
        4.0 * alpha_c * alpha_c * self.epsilon_dimless
    }

    pub fn is_closed(&self, tolerance: f64) -> bool {
        self.epsilon_dimless < tolerance
    }
}

pub(crate) fn weighted_error(s_c: Complex64, s_s: Complex64) -> f64 {
    s_c.norm_sqr() + s_s.norm_sqr() / SQRT3
}

pub fn closure_residual(seq: &KickSequence) -> ClosureResidual {
    let (s_c, s_s) = seq.phases().iter().fold(
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
        |(c, s), &x| (c + Complex64::cis(x), s + Complex64::cis(SQRT3 * x)),
    );
    ClosureResidual { s_c, s_s, epsilon_dimless: weighted_error(s_c, s_s) }
}

/// Dimensionless geometric phase factor `φ̃`; the gate phase is `α_c² φ̃`.
///
/// Double sum over ordered pairs `k < j` of
/// `sin(√3 (x_j - x_k))/√3 - sin(x_j - x_k)`, evaluated term by term.
pub fn phase_factor(seq: &KickSequence) -> f64 {
    let x = seq.phases();
    let mut total = 0.0;
    for j in 1..x.len() {
        for k in 0..j {
            let d = x[j] - x[k];
            total += (SQRT3 * d).sin() / SQRT3 - d.sin();
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateTime {
    pub seconds: f64,
    /// Duration in trap periods `2π/ω`.
    pub periods: f64,
}

pub fn gate_time(seq: &KickSequence, omega: f64) -> Result<GateTime> {
    if seq.is_empty() {
        return Err(Error::Contract("gate time of an empty kick sequence".into()));
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::Domain { what: "trap frequency must be positive", value: omega });
    }
    let span = seq.span();
    Ok(GateTime { seconds: span / omega, periods: span / (2.0 * PI) })
}
