//! Physical constants and default experimental parameters.

use std::f64::consts::PI;

/// Reduced Planck constant in J s (CODATA 2018, exact since the SI redefinition).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Atomic mass unit in kg (CODATA 2018).
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Nominal 40Ca+ mass, mass number times the atomic mass unit.
pub const CA40_MASS: f64 = 40.0 * ATOMIC_MASS_UNIT;

/// 4S1/2 -> 4P3/2 kick transition wavelength in m.
pub const KICK_WAVELENGTH: f64 = 393.4e-9;

/// 4P3/2 lifetime in s.
pub const P32_LIFETIME: f64 = 6.9e-9;

/// Pulse-train repetition rate in Hz.
pub const REP_RATE: f64 = 5.0e9;

/// Lower edge of the trap frequency window, rad/s.
pub const OMEGA_MIN: f64 = 2.0 * PI * 78.0e3;

/// Upper edge of the trap frequency window, rad/s.
pub const OMEGA_MAX: f64 = 2.0 * PI * 2.0e6;

/// Working trap frequency the tuning stage aims for, rad/s.
pub const TARGET_OMEGA: f64 = 2.0 * PI * 0.82e6;

/// Picosecond pulse length and counter-propagating pair delay, s. Their sum is
/// the 1 ps excited-state dwell time of a kick.
pub const PULSE_DURATION: f64 = 0.5e-12;
pub const PAIR_DELAY: f64 = 0.5e-12;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;
