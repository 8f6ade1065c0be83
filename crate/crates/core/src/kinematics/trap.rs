use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::*;
use crate::error::{Error, Result};

/// Physical context of a gate: trap window, ion, kick laser and pulse timing.
///
/// Frequencies are angular (rad/s), times in s, lengths in m, mass in kg.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrapLaserSpec {
    pub omega_min: f64,
    pub omega_max: f64,
    pub ion_mass: f64,
    pub wavelength: f64,
    /// Pulse-train repetition rate `R` in Hz.
    pub rep_rate: f64,
    pub pulse_duration: f64,
    /// Delay `τ` between the two counter-propagating pulses of a kick.
    pub pair_delay: f64,
    /// Excited-state lifetime `t_γ`.
    pub lifetime: f64,
    /// Net kick orientation `z`, fixed for the whole experiment.
    pub kick_sign: i8,
}

impl Default for TrapLaserSpec {
    fn default() -> Self {
        Self {
            omega_min: OMEGA_MIN,
            omega_max: OMEGA_MAX,
            ion_mass: CA40_MASS,
            wavelength: KICK_WAVELENGTH,
            rep_rate: REP_RATE,
            pulse_duration: PULSE_DURATION,
            pair_delay: PAIR_DELAY,
            lifetime: P32_LIFETIME,
            kick_sign: 1,
        }
    }
}

impl TrapLaserSpec {
    /// Laser wavevector `k = 2π/λ`.
    pub fn wavevector(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// Pulse period `t_R = 1/R`.
    pub fn rep_period(&self) -> f64 {
        1.0 / self.rep_rate
    }

    pub fn decay_rate(&self) -> f64 {
        1.0 / self.lifetime
    }

    /// Excited-state dwell time of one kick, `δt + τ`.
    pub fn excited_time(&self) -> f64 {
        self.pulse_duration + self.pair_delay
    }

    pub fn contains(&self, omega: f64) -> bool {
        self.omega_min <= omega && omega <= self.omega_max
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(format!("trap_laser.{key}"), format!("must be positive, got {v}")))
            }
        };
        positive("omega_min", self.omega_min)?;
        positive("omega_max", self.omega_max)?;
        positive("ion_mass", self.ion_mass)?;
        positive("wavelength", self.wavelength)?;
        positive("rep_rate", self.rep_rate)?;
        positive("pulse_duration", self.pulse_duration)?;
        positive("lifetime", self.lifetime)?;
        if self.omega_min >= self.omega_max {
            return Err(Error::config(
                "trap_laser.omega_min",
                format!("must be below omega_max ({} >= {})", self.omega_min, self.omega_max),
            ));
        }
        if self.pair_delay.is_nan() || self.pair_delay < self.pulse_duration {
            return Err(Error::config(
                "trap_laser.pair_delay",
                format!("must be at least pulse_duration ({} < {})", self.pair_delay, self.pulse_duration),
            ));
        }
        if self.kick_sign != 1 && self.kick_sign != -1 {
            return Err(Error::config("trap_laser.kick_sign", format!("must be +1 or -1, got {}", self.kick_sign)));
        }
        Ok(())
    }

    /// Non-fatal findings about the parameter set.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let fastest = self.omega_max / (2.0 * PI);
        if self.rep_rate < 10.0 * fastest {
            out.push(format!(
                "repetition rate {:.3e} Hz is less than 10x the highest trap frequency {:.3e} Hz",
                self.rep_rate, fastest
            ));
        }
        out
    }
}

/// Normal-mode structure of a two-ion crystal at a given trap frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSet {
    pub omega_c: f64,
    pub omega_s: f64,
    /// Center-of-mass kick amplitude, signed by the kick orientation.
    pub alpha_c: f64,
    pub alpha_s: f64,
    /// Lamb-Dicke parameter `k sqrt(ħ / 2 m ω)`.
    pub eta: f64,
}

/// Modes and kick amplitudes for trap frequency `omega`.
pub fn mode_set(omega: f64, spec: &TrapLaserSpec) -> Result<ModeSet> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::Domain { what: "trap frequency must be positive", value: omega });
    }
    let eta = spec.wavevector() * (HBAR / (2.0 * spec.ion_mass * omega)).sqrt();
    let alpha_c = eta * f64::from(spec.kick_sign) / 2f64.powf(1.5);
    Ok(ModeSet {
        omega_c: omega,
        omega_s: SQRT3 * omega,
        alpha_c,
        alpha_s: alpha_c / 3f64.powf(0.25),
        eta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Mass and wavelength picked so that η = 1 at ω = 1 rad/s.
    fn unit_spec() -> TrapLaserSpec {
        let wavelength = 1.0;
        let k = 2.0 * PI / wavelength;
        TrapLaserSpec { ion_mass: HBAR * k * k / 2.0, wavelength, ..TrapLaserSpec::default() }
    }

    #[test]
    fn unit_mode_identities() {
        let m = mode_set(1.0, &unit_spec()).unwrap();
        assert_relative_eq!(m.eta, 1.0, max_relative = 1e-14);
        assert_relative_eq!(m.omega_s, 1.732_050_807_568_877_2, max_relative = 1e-15);
        assert_relative_eq!(m.alpha_c, 0.353_553_390_593_273_8, max_relative = 1e-14);
        assert_relative_eq!(m.alpha_s, m.alpha_c / 3f64.powf(0.25), max_relative = 1e-15);
    }

    #[test]
    fn calcium_at_working_point() {
        // η = k sqrt(ħ/2mω) evaluated by hand with CODATA ħ and m = 40 u:
        // 0.1982518..., α_c = η / 2^{3/2} = 0.0700926...
        let m = mode_set(2.0 * PI * 0.82e6, &TrapLaserSpec::default()).unwrap();
        assert!((m.eta - 0.198).abs() < 5e-4, "eta = {}", m.eta);
        assert!((m.alpha_c - 0.0701).abs() < 2e-4, "alpha_c = {}", m.alpha_c);
    }

    #[test]
    fn kick_sign_flips_amplitude() {
        let plus = mode_set(3.0e6, &TrapLaserSpec::default()).unwrap();
        let minus = mode_set(3.0e6, &TrapLaserSpec { kick_sign: -1, ..TrapLaserSpec::default() }).unwrap();
        assert_eq!(plus.alpha_c, -minus.alpha_c);
        assert_eq!(plus.alpha_s, -minus.alpha_s);
        assert_eq!(plus.eta, minus.eta);
    }

    #[test]
    fn rejects_non_positive_frequency() {
        assert!(matches!(mode_set(0.0, &TrapLaserSpec::default()), Err(Error::Domain { .. })));
        assert!(mode_set(-2.0, &TrapLaserSpec::default()).is_err());
    }

    #[test]
    fn validation() {
        assert!(TrapLaserSpec::default().validate().is_ok());
        assert!(TrapLaserSpec::default().warnings().is_empty());
        let swapped = TrapLaserSpec { omega_min: 3.0, omega_max: 2.0, ..Default::default() };
        assert!(swapped.validate().is_err());
        let short_delay = TrapLaserSpec { pair_delay: 0.1e-12, ..Default::default() };
        assert!(short_delay.validate().is_err());
        let bad_sign = TrapLaserSpec { kick_sign: 0, ..Default::default() };
        assert!(bad_sign.validate().is_err());
        let slow = TrapLaserSpec { rep_rate: 1.0e6, ..Default::default() };
        assert_eq!(slow.warnings().len(), 1);
    }
}
