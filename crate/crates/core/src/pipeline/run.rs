use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::sweep::{BatchingRow, ErrorVsRSeries, ScalingSeries};
use crate::budget::ErrorBudget;
use crate::designer::{design_continuous, ContinuousSolution, DesignStats, DesignerConfig};
use crate::error::{Error, Result};
use crate::ga::{evolve, initial_population, snap_to_grid, Chromosome, GaConfig, GridSpec};
use crate::kinematics::{
    closure_residual, gate_time, mode_set, phase_factor, trajectory, tune_trap_frequency, GateDesign,
    KickSequence, Mode, SpinBranch,
};
use crate::oracle::{check_phase, PhaseCheck};
use crate::rng::derive_seed;

/// Seed keys of the pipeline stages, mixed into `master_seed`.
pub(crate) mod keys {
    pub const DESIGNER: u64 = 1;
    pub const GA: u64 = 1_000;
    pub const SCALING: u64 = 10_000;
    pub const ERROR_DESIGN: u64 = 20_000;
    pub const ERROR_GA: u64 = 30_000;
    pub const BATCH_DESIGN: u64 = 40_000;
    pub const BATCH_GA: u64 = 50_000;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub config_hash: String,
    pub master_seed: u64,
}

/// Phase-space polygon of one mode on one spin branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub mode: Mode,
    pub branch: SpinBranch,
    pub points: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySet {
    pub alpha_c: f64,
    pub polylines: Vec<Polyline>,
}

/// A continuous candidate that did not become a design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub candidate: usize,
    pub stage: String,
    pub exit_code: i32,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub designer: Option<DesignStats>,
    pub warnings: Vec<String>,
}

/// Everything a run produced. `designs`, `candidates`, `budgets`,
/// `verifications`, `traces` and `trajectories` are index-aligned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub provenance: Provenance,
    pub config: PipelineConfig,
    /// Continuous solutions that fed the discrete stage, ranked.
    pub continuous: Vec<ContinuousSolution>,
    pub designs: Vec<GateDesign>,
    /// Index into `continuous` of each design.
    pub candidates: Vec<usize>,
    pub budgets: Vec<ErrorBudget>,
    pub verifications: Vec<PhaseCheck>,
    /// Best-so-far GA fitness per generation.
    pub traces: Vec<Vec<f64>>,
    pub trajectories: Vec<TrajectorySet>,
    pub rejections: Vec<Rejection>,
    pub diagnostics: Diagnostics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingSeries>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_vs_r: Option<ErrorVsRSeries>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batching: Option<Vec<BatchingRow>>,
}

impl RunReport {
    pub fn empty(cfg: &PipelineConfig) -> Self {
        Self {
            provenance: Provenance {
                version: env!("CARGO_PKG_VERSION").to_string(),
                config_hash: cfg.hash(),
                master_seed: cfg.master_seed,
            },
            config: cfg.clone(),
            continuous: Vec::new(),
            designs: Vec::new(),
            candidates: Vec::new(),
            budgets: Vec::new(),
            verifications: Vec::new(),
            traces: Vec::new(),
            trajectories: Vec::new(),
            rejections: Vec::new(),
            diagnostics: Diagnostics { designer: None, warnings: cfg.trap_laser.warnings() },
            scaling: None,
            error_vs_r: None,
            batching: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Write `report.json`-style output to `path`, creating parent directories.
    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// A run that produced no design. The report keeps the continuous stage and
/// every rejection.
#[derive(Debug, thiserror::Error)]
#[error("{error}")]
pub struct RunFailure {
    #[source]
    pub error: Error,
    pub report: Box<RunReport>,
}

/// Result of the discrete stage for one continuous solution.
#[derive(Debug, Clone)]
pub struct Discrete {
    pub chromosome: Chromosome,
    pub sequence: KickSequence,
    pub epsilon: f64,
    pub phase_factor: f64,
    pub trace: Vec<f64>,
}

/// Snap a solution onto the grid and evolve the pulse picking.
pub fn discretize(sol: &ContinuousSolution, grid: &GridSpec, ga: &GaConfig) -> Result<Discrete> {
    let snap = snap_to_grid(sol, grid, ga)?;
    let out = evolve(initial_population(&snap, ga), ga)?;
    let sequence = out.best.decode();
    Ok(Discrete {
        epsilon: closure_residual(&sequence).epsilon_dimless,
        phase_factor: phase_factor(&sequence),
        sequence,
        chromosome: out.best,
        trace: out.trace,
    })
}

/// Gap between kicks that keeps neighbouring pulse windows apart on `grid`.
pub fn window_separation(grid: &GridSpec, ga: &GaConfig) -> f64 {
    (ga.window() as f64 + 1.0) * grid.spacing()
}

/// Designer settings of a pipeline run: derived seed, and a window-safe
/// minimum kick separation unless one is configured.
pub fn designer_config(cfg: &PipelineConfig, seed_key: u64, min_separation: f64) -> DesignerConfig {
    let mut d = cfg.designer.clone();
    d.seed = derive_seed(cfg.master_seed, seed_key);
    d.min_separation = Some(d.min_separation.unwrap_or(min_separation));
    d
}

fn trajectories(seq: &KickSequence, alpha_c: f64) -> TrajectorySet {
    let mut polylines = Vec::new();
    for mode in Mode::ALL {
        for branch in SpinBranch::ALL {
            if branch.factor(mode) != 0.0 {
                polylines.push(Polyline { mode, branch, points: trajectory(seq, mode, branch, alpha_c) });
            }
        }
    }
    TrajectorySet { alpha_c, polylines }
}

struct Finished {
    design: GateDesign,
    budget: ErrorBudget,
    verification: PhaseCheck,
    trace: Vec<f64>,
    trajectories: TrajectorySet,
}

fn finish(cfg: &PipelineConfig, sol: &ContinuousSolution, ga: &GaConfig) -> Result<Finished, (&'static str, Error)> {
    let spec = &cfg.trap_laser;
    let d = discretize(sol, &cfg.grid, ga).map_err(|e| ("discrete", e))?;
    if d.epsilon > cfg.closure_tolerance {
        return Err((
            "discrete",
            Error::Verification(format!(
                "closure error {:.3e} above tolerance {:.3e}",
                d.epsilon, cfg.closure_tolerance
            )),
        ));
    }
    let tuning = tune_trap_frequency(d.phase_factor, spec, cfg.target_omega).map_err(|e| ("tuning", e))?;
    let time = gate_time(&d.sequence, tuning.omega).map_err(|e| ("tuning", e))?;
    let modes = mode_set(tuning.omega, spec).map_err(|e| ("tuning", e))?;
    let design = GateDesign {
        slots: d.chromosome.active_slots(),
        n_batches: d.chromosome.layout().n_windows(),
        pulses_per_batch: ga.m,
        phase_factor: d.phase_factor,
        omega_star: tuning.omega,
        overshoot: tuning.overshoot,
        epsilon: d.epsilon,
        gate_time_periods: time.periods,
        gate_time_s: time.seconds,
        implied_rep_rate: tuning.omega * cfg.grid.ratio,
        sequence: d.sequence,
    };
    design.check(spec, cfg.phase_tolerance).map_err(|e| ("tuning", e))?;
    let verification = check_phase(&design.sequence, modes.alpha_c, design.phase_factor, cfg.closure_tolerance);
    if !verification.agrees || verification.open_orbit {
        return Err((
            "oracle",
            Error::Verification(format!(
                "oracle phase {:.6e} vs closed form {:.6e} (open orbit: {})",
                verification.zz_phase, verification.formula_phase, verification.open_orbit
            )),
        ));
    }
    let n_kicks = u32::try_from(design.sequence.len()).expect("kick count fits in u32");
    let budget = ErrorBudget::new(spec, &cfg.budget, n_kicks).map_err(|e| ("budget", e))?;
    Ok(Finished {
        trajectories: trajectories(&design.sequence, modes.alpha_c),
        design,
        budget,
        verification,
        trace: d.trace,
    })
}

/// Continuous design, grid snap, GA, frequency tuning, oracle check and
/// error budget for every ranked continuous solution.
///
/// Candidates that fail a stage are listed as rejections. If none survives
/// the error of the first rejection is returned alongside the report.
pub fn run_design(cfg: &PipelineConfig) -> Result<RunReport, RunFailure> {
    let mut report = RunReport::empty(cfg);
    let fail = |error: Error, report: RunReport| RunFailure { error, report: Box::new(report) };
    if let Err(e) = cfg.validate() {
        return Err(fail(e, report));
    }
    let dcfg = designer_config(cfg, keys::DESIGNER, window_separation(&cfg.grid, &cfg.ga));
    let outcome = match design_continuous(&dcfg) {
        Ok(o) => o,
        Err(e) => return Err(fail(e, report)),
    };
    report.diagnostics.designer = Some(outcome.stats.clone());
    report.continuous = outcome.solutions;
    if report.continuous.is_empty() {
        let e = Error::NoClosedSolution { n_pulses: dcfg.n_pulses, starts: dcfg.k_seed };
        return Err(fail(e, report));
    }

    let mut first_error = None;
    for (i, sol) in report.continuous.clone().iter().enumerate() {
        let ga = GaConfig { seed: derive_seed(cfg.master_seed, keys::GA + i as u64), ..cfg.ga.clone() };
        match finish(cfg, sol, &ga) {
            Ok(f) => {
                report.designs.push(f.design);
                report.candidates.push(i);
                report.budgets.push(f.budget);
                report.verifications.push(f.verification);
                report.traces.push(f.trace);
                report.trajectories.push(f.trajectories);
            }
            Err((stage, e)) => {
                log::info!("candidate {i} rejected at {stage}: {e}");
                report.rejections.push(Rejection {
                    candidate: i,
                    stage: stage.to_string(),
                    exit_code: e.exit_code(),
                    message: e.to_string(),
                });
                first_error.get_or_insert(e);
            }
        }
    }
    match first_error {
        Some(e) if report.designs.is_empty() => Err(fail(e, report)),
        _ => Ok(report),
    }
}
