//! Closed-form experimental error estimates: spontaneous emission during the
//! kicks and pulse-area fluctuations.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::TrapLaserSpec;

/// Above this area error the second-order fidelity expansion is unreliable.
pub const AREA_EXPANSION_LIMIT: f64 = 0.3;

/// Emission probability during an excited-state dwell `t_e`: `1 - exp(-t_e/t_gamma)`.
pub fn spontaneous_emission_error(t_e: f64, t_gamma: f64) -> Result<f64> {
    if !(t_e.is_finite() && t_e >= 0.0) {
        return Err(Error::Domain { what: "excited-state time must be non-negative", value: t_e });
    }
    if t_gamma.is_nan() || t_gamma <= 0.0 {
        return Err(Error::Domain { what: "lifetime must be positive", value: t_gamma });
    }
    Ok(-(-t_e / t_gamma).exp_m1())
}

/// Infidelity after `n` independent kicks, `1 - (1 - eps)^n`.
pub fn gate_emission_infidelity(eps_gamma: f64, n: u32) -> f64 {
    if n == 0 {
        return 0.0;
    }
    -(f64::from(n) * (-eps_gamma).ln_1p()).exp_m1()
}

/// Fidelity with pulse-area error `delta_theta` over `n` kicks:
/// `(1 - n ε_A + n² ε_A² / 4) F0` with `ε_A = Δθ²`.
pub fn area_fluctuation_fidelity(delta_theta: f64, n: u32, f0: f64) -> f64 {
    if delta_theta.abs() > AREA_EXPANSION_LIMIT {
        warn!("area error {delta_theta} rad is outside the validity of the quadratic expansion");
    }
    let eps_a = delta_theta * delta_theta;
    let n = f64::from(n);
    (1.0 - n * eps_a + n * n * eps_a * eps_a / 4.0) * f0
}

/// Speedup of a gate of duration `t` over a reference of duration `t_bar`.
pub fn speedup_report(t: f64, t_bar: f64) -> Result<f64> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::Domain { what: "gate duration must be positive", value: t });
    }
    Ok(t_bar / t)
}

/// Error inputs that are not part of the trap and laser description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetConfig {
    /// RMS pulse-area error in rad.
    pub delta_theta: f64,
    /// Fidelity of the gate without area errors.
    pub f0: f64,
    /// Overrides the excited-state time `δt + τ` of the trap spec, s.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excited_time: Option<f64>,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self { delta_theta: 1e-3f64.sqrt(), f0: 1.0, excited_time: None }
    }
}

impl BudgetConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.delta_theta.is_finite() {
            return Err(Error::config("budget.delta_theta", "must be finite"));
        }
        if !(0.0..=1.0).contains(&self.f0) {
            return Err(Error::config("budget.f0", format!("must lie in [0, 1], got {}", self.f0)));
        }
        if let Some(t) = self.excited_time {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::config("budget.excited_time", format!("must be non-negative, got {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    /// Number of kicks the gate applies.
    pub n_kicks: u32,
    pub t_e: f64,
    pub eps_gamma: f64,
    pub eps_gamma_gate: f64,
    pub eps_a: f64,
    /// `F / F0` from area fluctuations.
    pub fidelity_factor: f64,
    pub fidelity: f64,
}

impl ErrorBudget {
    pub fn new(spec: &TrapLaserSpec, cfg: &BudgetConfig, n_kicks: u32) -> Result<Self> {
        let t_e = cfg.excited_time.unwrap_or_else(|| spec.excited_time());
        let eps_gamma = spontaneous_emission_error(t_e, spec.lifetime)?;
        let fidelity_factor = area_fluctuation_fidelity(cfg.delta_theta, n_kicks, 1.0);
        Ok(Self {
            n_kicks,
            t_e,
            eps_gamma,
            eps_gamma_gate: gate_emission_infidelity(eps_gamma, n_kicks),
            eps_a: cfg.delta_theta * cfg.delta_theta,
            fidelity_factor,
            fidelity: fidelity_factor * cfg.f0,
        })
    }
}
