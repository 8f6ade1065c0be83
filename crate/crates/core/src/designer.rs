//! Multi-start continuous search for closed kick sequences.
//!
//! Each start draws `N` random phases inside the seed span, pins the first
//! kick to zero and drives the closure error `|S_c|² + |S_s|²/√3` to zero with
//! a damped Gauss-Newton (Levenberg-Marquardt) iteration on the four real
//! residuals `(Re S_c, Im S_c, 3^{-1/4} Re S_s, 3^{-1/4} Im S_s)`. Converged,
//! short enough and distinct solutions are ranked by `|φ̃|`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::SQRT3;
use crate::error::{Error, Result};
use crate::kinematics::{closure_residual, phase_factor, weighted_error, KickSequence};
use crate::rng::substream;

/// Two solutions closer than this (L∞, radians) after canonicalization are the same.
pub const DEDUP_DISTANCE: f64 = 1e-6;

/// Error level the converged points are polished to before reporting.
const POLISH_TARGET: f64 = 1e-26;

const PENALTY_WEIGHT: f64 = 1.0;

/// The penalty leaves gaps a hair under the minimum; accept within this.
const SEPARATION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DesignerConfig {
    /// Number of kicks `N`.
    pub n_pulses: usize,
    /// Random starts.
    pub k_seed: usize,
    /// Solutions kept after ranking.
    pub k_opt: usize,
    /// Slowest accepted gate, in trap periods.
    pub t_max_periods: f64,
    /// Seed phases are drawn from `[0, 2π · seed_span_periods)`.
    pub seed_span_periods: f64,
    /// Closure threshold on `ε_dimless`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Minimum gap between adjacent kicks (radians), enforced as a penalty.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_separation: Option<f64>,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for DesignerConfig {
    fn default() -> Self {
        Self {
            n_pulses: 6,
            k_seed: 500,
            k_opt: 20,
            t_max_periods: 2.0,
            seed_span_periods: 1.0,
            tolerance: 1e-10,
            max_iterations: 500,
            min_separation: None,
            seed: 0,
        }
    }
}

impl DesignerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_pulses < 3 {
            return Err(Error::config("designer.n_pulses", format!("need at least 3 kicks, got {}", self.n_pulses)));
        }
        if self.k_seed == 0 {
            return Err(Error::config("designer.k_seed", "must be at least 1"));
        }
        if self.k_opt == 0 || self.k_opt > self.k_seed {
            return Err(Error::config(
                "designer.k_opt",
                format!("must be in 1..={} (k_seed), got {}", self.k_seed, self.k_opt),
            ));
        }
        for (key, v) in [
            ("designer.t_max_periods", self.t_max_periods),
            ("designer.seed_span_periods", self.seed_span_periods),
            ("designer.tolerance", self.tolerance),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(key, format!("must be positive, got {v}")));
            }
        }
        if let Some(d) = self.min_separation {
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::config("designer.min_separation", format!("must be non-negative, got {d}")));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::config("designer.max_iterations", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousSolution {
    pub sequence: KickSequence,
    pub phase_factor: f64,
    pub epsilon_dimless: f64,
    pub t_periods: f64,
    pub converged: bool,
    /// Index of the random start that produced it.
    pub start: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignStats {
    pub starts: usize,
    pub converged: usize,
    pub too_slow: usize,
    pub duplicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignOutcome {
    pub solutions: Vec<ContinuousSolution>,
    pub stats: DesignStats,
}

/// Random start number `index`: `N` sorted phases, first one at zero.
pub fn sample_seed(cfg: &DesignerConfig, index: usize) -> KickSequence {
    let mut rng = substream(cfg.seed, index as u64);
    let span = 2.0 * PI * cfg.seed_span_periods;
    let raw: Vec<f64> = (0..cfg.n_pulses).map(|_| rng.gen_range(0.0..span)).collect();
    KickSequence::canonical(&raw).expect("uniform draws are finite")
}

fn phasor_sums(x: &[f64]) -> (Complex64, Complex64) {
    x.iter().fold((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), |(c, s), &xn| {
        (c + Complex64::cis(xn), s + Complex64::cis(SQRT3 * xn))
    })
}

/// Closure error `|S_c|² + |S_s|²/√3` of raw, possibly unsorted phases.
pub fn objective(x: &[f64]) -> f64 {
    let (c, s) = phasor_sums(x);
    weighted_error(c, s)
}

/// Analytic gradient of [`objective`] with respect to every phase:
/// `-2 [Im(S̄_c e^{i x_n}) + Im(S̄_s e^{i√3 x_n})]`.
pub fn closure_gradient(x: &[f64]) -> Vec<f64> {
    let (s_c, s_s) = phasor_sums(x);
    x.iter()
        .map(|&xn| {
            let c = (s_c.conj() * Complex64::cis(xn)).im;
            let s = (s_s.conj() * Complex64::cis(SQRT3 * xn)).im;
            -2.0 * (c + s)
        })
        .collect()
}

/// Residual vector and Jacobian with respect to `x[1..]` (`x[0]` is pinned).
fn residuals(x: &[f64], min_sep: Option<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = x.len();
    let w = 3f64.powf(-0.25);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let violations: Vec<(usize, usize, f64)> = match min_sep {
        Some(d) if d > 0.0 => order
            .windows(2)
            .filter_map(|p| {
                let gap = x[p[1]] - x[p[0]];
                (gap < d).then_some((p[0], p[1], d - gap))
            })
            .collect(),
        _ => Vec::new(),
    };
    let rows = 4 + violations.len();
    let mut r = DVector::zeros(rows);
    let mut jac = DMatrix::zeros(rows, n - 1);
    for (i, &xi) in x.iter().enumerate() {
        let (sc, cc) = xi.sin_cos();
        let (ss, cs) = (SQRT3 * xi).sin_cos();
        r[0] += cc;
        r[1] += sc;
        r[2] += w * cs;
        r[3] += w * ss;
        if i > 0 {
            jac[(0, i - 1)] = -sc;
            jac[(1, i - 1)] = cc;
            jac[(2, i - 1)] = -w * SQRT3 * ss;
            jac[(3, i - 1)] = w * SQRT3 * cs;
        }
    }
    for (row, &(lo, hi, short)) in violations.iter().enumerate() {
        r[4 + row] = PENALTY_WEIGHT * short;
        if hi > 0 {
            jac[(4 + row, hi - 1)] -= PENALTY_WEIGHT;
        }
        if lo > 0 {
            jac[(4 + row, lo - 1)] += PENALTY_WEIGHT;
        }
    }
    (r, jac)
}

fn closure_only(r: &DVector<f64>) -> f64 {
    r.rows(0, 4).norm_squared()
}

fn finish(x: &[f64], cfg: &DesignerConfig, start: usize) -> ContinuousSolution {
    let sequence = KickSequence::canonical(x).expect("optimizer keeps phases finite");
    let res = closure_residual(&sequence);
    let t_periods = sequence.span() / (2.0 * PI);
    let separated = match cfg.min_separation {
        Some(d) if d > 0.0 => sequence.phases().windows(2).all(|p| p[1] - p[0] >= d - SEPARATION_SLACK),
        _ => true,
    };
    ContinuousSolution {
        phase_factor: phase_factor(&sequence),
        epsilon_dimless: res.epsilon_dimless,
        t_periods,
        converged: res.epsilon_dimless < cfg.tolerance && t_periods <= cfg.t_max_periods && separated,
        sequence,
        start,
    }
}

/// Local descent from `start` with the first kick held at zero.
pub fn local_minimize(start: &KickSequence, cfg: &DesignerConfig) -> ContinuousSolution {
    local_minimize_from(start, cfg, 0)
}

fn local_minimize_from(start: &KickSequence, cfg: &DesignerConfig, index: usize) -> ContinuousSolution {
    let mut x = KickSequence::canonical(start.phases()).unwrap_or_default().into_inner();
    if x.len() < 2 {
        return finish(&x, cfg, index);
    }
    let (mut r, mut jac) = residuals(&x, cfg.min_separation);
    if closure_only(&r) < cfg.tolerance && r.len() == 4 {
        return finish(&x, cfg, index);
    }
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    for _ in 0..cfg.max_iterations {
        if cost < POLISH_TARGET {
            break;
        }
        let jt = jac.transpose();
        let normal = &jt * &jac;
        let grad = &jt * &r;
        let mut accepted = false;
        while lambda < 1e12 {
            let mut damped = normal.clone();
            for i in 0..damped.nrows() {
                damped[(i, i)] += lambda * (1.0 + normal[(i, i)]);
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 4.0;
                continue;
            };
            let step = chol.solve(&(-&grad));
            let mut trial = x.clone();
            for (xi, d) in trial[1..].iter_mut().zip(step.iter()) {
                *xi += d;
            }
            let (tr, tj) = residuals(&trial, cfg.min_separation);
            let trial_cost = tr.norm_squared();
            if trial_cost < cost {
                x = trial;
                r = tr;
                jac = tj;
                cost = trial_cost;
                lambda = (lambda / 3.0).max(1e-15);
                accepted = true;
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    finish(&x, cfg, index)
}

/// Run all starts, keep converged and distinct solutions, rank by `|φ̃|`.
pub fn design_continuous(cfg: &DesignerConfig) -> Result<DesignOutcome> {
    cfg.validate()?;
    let runs: Vec<ContinuousSolution> = (0..cfg.k_seed)
        .into_par_iter()
        .map(|i| local_minimize_from(&sample_seed(cfg, i), cfg, i))
        .collect();

    let mut stats = DesignStats { starts: cfg.k_seed, ..DesignStats::default() };
    let mut kept: Vec<ContinuousSolution> = Vec::new();
    for sol in runs {
        let closed = sol.epsilon_dimless < cfg.tolerance;
        if closed {
            stats.converged += 1;
        }
        if closed && sol.t_periods > cfg.t_max_periods {
            stats.too_slow += 1;
        }
        if !sol.converged {
            continue;
        }
        if kept.iter().any(|k| same_solution(&k.sequence, &sol.sequence)) {
            stats.duplicates += 1;
            continue;
        }
        kept.push(sol);
    }
    kept.sort_by(|a, b| b.phase_factor.abs().total_cmp(&a.phase_factor.abs()));
    kept.truncate(cfg.k_opt);
    if kept.is_empty() {
        log::warn!(
            "no converged solution for N = {}: {} starts, {} closed, {} too slow",
            cfg.n_pulses, stats.starts, stats.converged, stats.too_slow
        );
    }
    Ok(DesignOutcome { solutions: kept, stats })
}

fn same_solution(a: &KickSequence, b: &KickSequence) -> bool {
    a.len() == b.len()
        && a.phases().iter().zip(b.phases()).all(|(p, q)| (p - q).abs() <= DEDUP_DISTANCE)
}
