use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::run::{designer_config, discretize, keys, window_separation, Discrete};
use crate::designer::design_continuous;
use crate::error::{Error, Result};
use crate::ga::{GaConfig, GridSpec};
use crate::kinematics::tune_trap_frequency;
use crate::rng::derive_seed;

/// Continuous library statistics for one kick count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n_pulses: usize,
    pub solutions: usize,
    pub max_abs_phase_factor: f64,
    pub min_t_periods: f64,
}

/// One library solution and its trap-frequency tuning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LibraryEntry {
    pub n_pulses: usize,
    pub phase_factor: f64,
    pub t_periods: f64,
    pub feasible: bool,
    /// Tuned frequency, or the nearest out-of-window candidate if infeasible.
    pub omega: f64,
    pub overshoot: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSeries {
    pub rows: Vec<ScalingRow>,
    pub library: Vec<LibraryEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSample {
    pub ratio: f64,
    pub seed: usize,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorMedian {
    pub ratio: f64,
    pub samples: usize,
    pub median_epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorVsRSeries {
    pub samples: Vec<ErrorSample>,
    pub medians: Vec<ErrorMedian>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchingRow {
    pub m: usize,
    pub phase_factor: f64,
    /// `φ̃(M) / φ̃(1)`, when the sweep includes `M = 1`.
    pub ratio_to_m1: Option<f64>,
    pub epsilon: f64,
    /// First to last picked pulse, trap periods.
    pub span_periods: f64,
    /// First to last batch centroid, trap periods.
    pub centroid_span_periods: f64,
    /// One grid slot, trap periods.
    pub slot_periods: f64,
}

/// Continuous libraries for every `sweep.scaling_n`, all converged solutions
/// kept, each tuned against the trap window.
pub fn scaling_sweep(cfg: &PipelineConfig) -> Result<ScalingSeries> {
    let mut rows = Vec::new();
    let mut library = Vec::new();
    for &n in &cfg.sweep.scaling_n {
        let mut d = cfg.designer.clone();
        d.n_pulses = n;
        d.k_opt = d.k_seed;
        d.seed = derive_seed(cfg.master_seed, keys::SCALING + n as u64);
        let out = design_continuous(&d)?;
        let sols = out.solutions;
        rows.push(ScalingRow {
            n_pulses: n,
            solutions: sols.len(),
            max_abs_phase_factor: sols.iter().map(|s| s.phase_factor.abs()).fold(f64::NAN, f64::max),
            min_t_periods: sols.iter().map(|s| s.t_periods).fold(f64::NAN, f64::min),
        });
        for s in &sols {
            let (feasible, omega, overshoot) = match tune_trap_frequency(s.phase_factor, &cfg.trap_laser, cfg.target_omega) {
                Ok(t) => (true, t.omega, t.overshoot),
                Err(Error::NoFeasibleFrequency { nearest_omega, nearest_n }) => (false, nearest_omega, nearest_n),
                Err(e) => return Err(e),
            };
            library.push(LibraryEntry {
                n_pulses: n,
                phase_factor: s.phase_factor,
                t_periods: s.t_periods,
                feasible,
                omega,
                overshoot,
            });
        }
    }
    Ok(ScalingSeries { rows, library })
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// GA closure error against grid ratio over `sweep.seeds` independent
/// designs. Each seed designs once, with a separation that fits the coarsest
/// grid, and the best-ranked solution is discretized on every grid.
pub fn error_vs_r_sweep(cfg: &PipelineConfig) -> Result<ErrorVsRSeries> {
    let coarsest = cfg.sweep.ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let separation = window_separation(&GridSpec { ratio: coarsest, ..cfg.grid }, &cfg.ga);
    let mut samples = Vec::new();
    for seed in 0..cfg.sweep.seeds {
        let d = designer_config(cfg, keys::ERROR_DESIGN + seed as u64, separation);
        let Some(sol) = design_continuous(&d)?.solutions.into_iter().next() else {
            log::warn!("error sweep seed {seed}: no closed continuous solution");
            continue;
        };
        let ga = GaConfig { seed: derive_seed(cfg.master_seed, keys::ERROR_GA + seed as u64), ..cfg.ga.clone() };
        for &ratio in &cfg.sweep.ratios {
            match discretize(&sol, &GridSpec { ratio, ..cfg.grid }, &ga) {
                Ok(dis) => samples.push(ErrorSample { ratio, seed, epsilon: dis.epsilon }),
                Err(e @ Error::GridTooCoarse { .. }) => log::warn!("error sweep seed {seed}, ratio {ratio}: {e}"),
                Err(e) => return Err(e),
            }
        }
    }
    let medians = cfg
        .sweep
        .ratios
        .iter()
        .map(|&ratio| {
            let mut eps: Vec<f64> = samples.iter().filter(|s| s.ratio == ratio).map(|s| s.epsilon).collect();
            ErrorMedian { ratio, samples: eps.len(), median_epsilon: median(&mut eps) }
        })
        .collect();
    Ok(ErrorVsRSeries { samples, medians })
}

/// First-to-last distance between batch centroids, radians.
pub fn centroid_span(d: &Discrete) -> f64 {
    let layout = d.chromosome.layout();
    let centroids: Vec<f64> = (0..layout.n_windows())
        .map(|w| {
            let picked: Vec<f64> = d
                .chromosome
                .window_genes(w)
                .iter()
                .enumerate()
                .filter(|(_, g)| **g)
                .map(|(o, _)| layout.phase(w, o))
                .collect();
            picked.iter().sum::<f64>() / picked.len() as f64
        })
        .collect();
    match (centroids.first(), centroids.last()) {
        (Some(a), Some(b)) => b - a,
        _ => 0.0,
    }
}

/// One continuous design discretized with every batch size of `sweep.batch_m`.
pub fn batching_sweep(cfg: &PipelineConfig) -> Result<Vec<BatchingRow>> {
    let widest = cfg.sweep.batch_m.iter().copied().max().unwrap_or(1);
    let widest_ga = GaConfig { m: widest, m_max: None, ..cfg.ga.clone() };
    let d = designer_config(cfg, keys::BATCH_DESIGN, window_separation(&cfg.grid, &widest_ga));
    let sol = design_continuous(&d)?
        .solutions
        .into_iter()
        .next()
        .ok_or(Error::NoClosedSolution { n_pulses: d.n_pulses, starts: d.k_seed })?;
    let mut rows: Vec<BatchingRow> = Vec::new();
    for &m in &cfg.sweep.batch_m {
        let ga = GaConfig {
            m,
            m_max: None,
            seed: derive_seed(cfg.master_seed, keys::BATCH_GA + m as u64),
            ..cfg.ga.clone()
        };
        let dis = discretize(&sol, &cfg.grid, &ga)?;
        rows.push(BatchingRow {
            m,
            phase_factor: dis.phase_factor,
            ratio_to_m1: None,
            epsilon: dis.epsilon,
            span_periods: dis.sequence.span() / (2.0 * PI),
            centroid_span_periods: centroid_span(&dis) / (2.0 * PI),
            slot_periods: cfg.grid.spacing() / (2.0 * PI),
        });
    }
    if let Some(base) = rows.iter().find(|r| r.m == 1).map(|r| r.phase_factor) {
        for r in &mut rows {
            r.ratio_to_m1 = Some(r.phase_factor / base);
        }
    }
    Ok(rows)
}
