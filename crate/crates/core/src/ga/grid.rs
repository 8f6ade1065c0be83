use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::chromosome::Chromosome;
use super::GaConfig;
use crate::designer::ContinuousSolution;
use crate::error::{Error, Result};

/// Laser pulse grid in dimensionless phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    /// `R / ω`: pulses per radian of trap phase.
    pub ratio: f64,
    /// Phase of slot 0.
    pub origin: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { ratio: 5000.0, origin: 0.0 }
    }
}

impl GridSpec {
    /// Slot spacing `Δx = ω t_R = 1 / ratio`.
    pub fn spacing(&self) -> f64 {
        1.0 / self.ratio
    }

    pub fn slot_phase(&self, slot: i64) -> f64 {
        self.origin + slot as f64 * self.spacing()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ratio.is_finite() && self.ratio >= 10.0) {
            return Err(Error::config("grid.ratio", format!("must be at least 10, got {}", self.ratio)));
        }
        if !self.origin.is_finite() {
            return Err(Error::config("grid.origin", "must be finite"));
        }
        Ok(())
    }
}

/// Slot windows shared by every chromosome of one snapped solution.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowLayout {
    pub grid: GridSpec,
    pub m: usize,
    pub m_max: usize,
    /// First slot of each window.
    pub starts: Vec<i64>,
    /// Continuous kick phase each window was opened around.
    pub targets: Vec<f64>,
    /// `|target - centroid of picked slots|` right after snapping.
    pub snap_distances: Vec<f64>,
}

impl WindowLayout {
    pub fn n_windows(&self) -> usize {
        self.starts.len()
    }

    pub fn slot(&self, window: usize, offset: usize) -> i64 {
        self.starts[window] + offset as i64
    }

    pub fn phase(&self, window: usize, offset: usize) -> f64 {
        self.grid.slot_phase(self.slot(window, offset))
    }

    /// Window offsets ordered by distance to the window target, nearest first.
    pub(crate) fn offsets_by_distance(&self, window: usize) -> Vec<usize> {
        let target = self.targets[window];
        let mut offsets: Vec<usize> = (0..self.m_max).collect();
        offsets.sort_by(|&a, &b| {
            (self.phase(window, a) - target).abs().total_cmp(&(self.phase(window, b) - target).abs())
        });
        offsets
    }
}

/// Open an `M_max` window around every kick and pick the `M` nearest slots.
pub fn snap_to_grid(sol: &ContinuousSolution, grid: &GridSpec, ga: &GaConfig) -> Result<Chromosome> {
    grid.validate()?;
    ga.validate()?;
    let m_max = ga.window();
    let dx = grid.spacing();
    let targets = sol.sequence.phases().to_vec();
    let starts: Vec<i64> = targets
        .iter()
        .map(|&x| (((x - grid.origin) / dx) - (m_max as f64 - 1.0) / 2.0).round() as i64)
        .collect();
    for (n, pair) in starts.windows(2).enumerate() {
        if pair[0] + m_max as i64 > pair[1] {
            return Err(Error::GridTooCoarse { first: n, second: n + 1 });
        }
    }
    let mut layout =
        WindowLayout { grid: *grid, m: ga.m, m_max, starts, targets, snap_distances: Vec::new() };
    let mut genes = vec![false; layout.n_windows() * m_max];
    for w in 0..layout.n_windows() {
        for &off in layout.offsets_by_distance(w).iter().take(ga.m) {
            genes[w * m_max + off] = true;
        }
    }
    layout.snap_distances = (0..layout.n_windows())
        .map(|w| {
            let picked: Vec<f64> =
                (0..m_max).filter(|&o| genes[w * m_max + o]).map(|o| layout.phase(w, o)).collect();
            let centroid = picked.iter().sum::<f64>() / picked.len() as f64;
            (centroid - layout.targets[w]).abs()
        })
        .collect();
    Ok(Chromosome::from_parts(genes, Arc::new(layout)))
}
