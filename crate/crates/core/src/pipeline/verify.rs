use serde::{Deserialize, Serialize};

use super::run::RunReport;
use crate::kinematics::{closure_residual, mode_set, phase_factor, KickSequence};
use crate::oracle::check_phase;

/// Relative agreement required between stored and recomputed values.
const RECOMPUTE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl VerificationSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn close(a: f64, b: f64, abs_floor: f64) -> bool {
    (a - b).abs() <= RECOMPUTE_TOL * a.abs().max(b.abs()) + abs_floor
}

/// Re-check every stored design from its pulse slots alone: closure, phase
/// factor, trap window and phase-frequency relation, and oracle agreement.
pub fn verify_report(report: &RunReport) -> VerificationSummary {
    let cfg = &report.config;
    let spec = &cfg.trap_laser;
    let mut out = VerificationSummary::default();
    for (i, d) in report.designs.iter().enumerate() {
        out.checked += 1;
        let mut fail = |msg: String| out.failures.push(format!("design {i}: {msg}"));

        let raw: Vec<f64> = d.slots.iter().map(|&s| cfg.grid.slot_phase(s)).collect();
        let rebuilt = match KickSequence::canonical(&raw) {
            Ok(s) => s,
            Err(e) => {
                fail(format!("slots do not decode: {e}"));
                continue;
            }
        };
        if rebuilt.len() != d.sequence.len()
            || rebuilt.phases().iter().zip(d.sequence.phases()).any(|(a, b)| !close(*a, *b, 1e-12))
        {
            fail("stored sequence differs from its slots".into());
        }
        if d.slots.len() != d.n_batches * d.pulses_per_batch {
            fail(format!("{} slots for {} batches of {}", d.slots.len(), d.n_batches, d.pulses_per_batch));
        }
        let eps = closure_residual(&rebuilt).epsilon_dimless;
        if eps > cfg.closure_tolerance {
            fail(format!("closure error {eps:.3e} above {:.3e}", cfg.closure_tolerance));
        }
        if !close(eps, d.epsilon, 1e-15) {
            fail(format!("stored closure error {:.6e}, recomputed {eps:.6e}", d.epsilon));
        }
        let phi = phase_factor(&rebuilt);
        if !close(phi, d.phase_factor, 1e-12) {
            fail(format!("stored phase factor {:.12e}, recomputed {phi:.12e}", d.phase_factor));
        }
        if let Err(e) = d.check(spec, cfg.phase_tolerance) {
            fail(e.to_string());
        }
        match mode_set(d.omega_star, spec) {
            Ok(modes) => {
                let c = check_phase(&rebuilt, modes.alpha_c, phi, cfg.closure_tolerance);
                if !c.agrees {
                    fail(format!("oracle phase {:.6e}, closed form {:.6e}", c.zz_phase, c.formula_phase));
                }
                if c.open_orbit {
                    fail("oracle reports open orbits".into());
                }
            }
            Err(e) => fail(e.to_string()),
        }
    }
    out
}
