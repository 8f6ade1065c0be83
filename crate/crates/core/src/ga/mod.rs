//! Discrete stage: pulse picking on the laser grid.
//!
//! Continuous kick phases are snapped onto the pulse train (one slot every
//! `Δx = ω t_R` radians). Around each kick a window of `M_max` consecutive
//! slots is opened and `M` of them are picked; a chromosome is the bit vector
//! of all `N × M_max` slot choices. A small genetic algorithm then re-picks
//! pulses inside the windows to minimize the closure error.

mod chromosome;
mod evolve;
mod grid;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use chromosome::{crossover, fitness, mutate, Chromosome};
pub use evolve::{evolve, initial_population, EvolveOutcome};
pub use grid::{snap_to_grid, GridSpec, WindowLayout};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaConfig {
    /// Pulses picked per batch.
    pub m: usize,
    /// Window size around each kick; defaults to `2M + 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
    /// Population size.
    pub k_ind: usize,
    /// Parents kept per generation.
    pub k_p: usize,
    /// Generation limit.
    pub k_ite: usize,
    /// Stop once the best fitness is at or below this.
    pub fitness_tol: f64,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self { m: 1, m_max: None, k_ind: 64, k_p: 16, k_ite: 500, fitness_tol: 1e-9, seed: 0 }
    }
}

impl GaConfig {
    pub fn window(&self) -> usize {
        self.m_max.unwrap_or(2 * self.m + 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::config("ga.m", "must be at least 1"));
        }
        if self.window() < self.m {
            return Err(Error::config("ga.m_max", format!("must be at least m = {}, got {}", self.m, self.window())));
        }
        if self.k_ind == 0 {
            return Err(Error::config("ga.k_ind", "must be at least 1"));
        }
        if self.k_p == 0 || self.k_p > self.k_ind {
            return Err(Error::config("ga.k_p", format!("must be in 1..={} (k_ind), got {}", self.k_ind, self.k_p)));
        }
        if self.k_ite == 0 {
            return Err(Error::config("ga.k_ite", "must be at least 1"));
        }
        if self.fitness_tol.is_nan() || self.fitness_tol < 0.0 {
            return Err(Error::config("ga.fitness_tol", format!("must be non-negative, got {}", self.fitness_tol)));
        }
        Ok(())
    }
}
