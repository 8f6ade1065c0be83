use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::trap::{mode_set, TrapLaserSpec};
use crate::constants::HBAR;
use crate::error::{Error, Result};

/// Largest overshoot tried before giving up.
pub const MAX_OVERSHOOT: u64 = 1_000_000;

/// CZ phase with `n` extra turns, `π/4 + 2πn`.
pub fn target_phase(overshoot: u64) -> f64 {
    PI / 4.0 + 2.0 * PI * overshoot as f64
}

/// Trap frequency at which `α_c(ω)² |φ̃|` equals `π/4 + 2πn`.
pub fn required_frequency(phase_factor: f64, spec: &TrapLaserSpec, overshoot: u64) -> f64 {
    let k = spec.wavevector();
    HBAR * k * k * phase_factor.abs() / (16.0 * spec.ion_mass * target_phase(overshoot))
}

/// Relative mismatch `(α_c(ω)² |φ̃| - (π/4 + 2πn)) / (π/4 + 2πn)`.
pub fn phase_mismatch(phase_factor: f64, spec: &TrapLaserSpec, omega: f64, overshoot: u64) -> Result<f64> {
    let modes = mode_set(omega, spec)?;
    let target = target_phase(overshoot);
    Ok((modes.alpha_c * modes.alpha_c * phase_factor.abs() - target) / target)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tuning {
    pub omega: f64,
    pub overshoot: u64,
}

/// Pick the in-window frequency closest to `target_omega` over all overshoots.
///
/// `ω(n)` falls monotonically with `n`, so the scan stops as soon as it drops
/// below the window. Ties go to the smaller `n`.
pub fn tune_trap_frequency(phase_factor: f64, spec: &TrapLaserSpec, target_omega: f64) -> Result<Tuning> {
    if phase_factor == 0.0 || !phase_factor.is_finite() {
        return Err(Error::Domain { what: "phase factor must be finite and non-zero", value: phase_factor });
    }
    let mut best: Option<Tuning> = None;
    // Out-of-window candidate closest to the window, reported on failure.
    let mut nearest = Tuning { omega: f64::NAN, overshoot: 0 };
    let mut nearest_gap = f64::INFINITY;
    for n in 0..=MAX_OVERSHOOT {
        let omega = required_frequency(phase_factor, spec, n);
        if spec.contains(omega) {
            let better = match best {
                None => true,
                Some(b) => (omega - target_omega).abs() < (b.omega - target_omega).abs(),
            };
            if better {
                best = Some(Tuning { omega, overshoot: n });
            }
        } else {
            let gap = if omega < spec.omega_min { spec.omega_min - omega } else { omega - spec.omega_max };
            if gap < nearest_gap {
                nearest_gap = gap;
                nearest = Tuning { omega, overshoot: n };
            }
        }
        if omega < spec.omega_min {
            break;
        }
    }
    best.ok_or(Error::NoFeasibleFrequency { nearest_omega: nearest.omega, nearest_n: nearest.overshoot })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_phase_frequency() {
        // ħk²/(4πm) for 40 u at 393.4 nm, evaluated separately: 3.22291e4 rad/s.
        let w = required_frequency(1.0, &TrapLaserSpec::default(), 0);
        assert_relative_eq!(w, 3.222_910_412e4, max_relative = 1e-9);
    }

    #[test]
    fn linear_in_phase_factor() {
        let spec = TrapLaserSpec::default();
        for n in [0, 3, 17] {
            assert_relative_eq!(
                required_frequency(2.0 * 7.3, &spec, n),
                2.0 * required_frequency(7.3, &spec, n),
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn picks_closest_in_window() {
        let spec = TrapLaserSpec::default();
        let target = 2.0 * PI * 0.82e6;
        let phi = 2500.0;
        let t = tune_trap_frequency(phi, &spec, target).unwrap();
        assert!(t.overshoot > 0);
        assert!(spec.contains(t.omega));
        // brute force over a generous range
        let brute = (0..10_000u64)
            .map(|n| (n, required_frequency(phi, &spec, n)))
            .filter(|(_, w)| spec.contains(*w))
            .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
            .unwrap();
        assert_eq!(brute.0, t.overshoot);
        let mismatch = phase_mismatch(phi, &spec, t.omega, t.overshoot).unwrap();
        assert!(mismatch.abs() < 1e-12, "{mismatch}");
    }

    #[test]
    fn sign_of_phase_factor_is_irrelevant() {
        let spec = TrapLaserSpec::default();
        let a = tune_trap_frequency(321.0, &spec, 5.0e6).unwrap();
        let b = tune_trap_frequency(-321.0, &spec, 5.0e6).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn infeasible_small_phase() {
        let spec = TrapLaserSpec::default();
        match tune_trap_frequency(1.0, &spec, 5.0e6) {
            Err(Error::NoFeasibleFrequency { nearest_omega, nearest_n }) => {
                assert_eq!(nearest_n, 0);
                assert!(nearest_omega < spec.omega_min);
            }
            other => panic!("expected NoFeasibleFrequency, got {other:?}"),
        }
        assert!(tune_trap_frequency(0.0, &spec, 5.0e6).is_err());
    }
}
