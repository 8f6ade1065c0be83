//! CSV export of the plottable series of a report.
//!
//! | series          | file                                      | columns |
//! |-----------------|-------------------------------------------|---------|
//! | `trajectories`  | `trajectories.csv`                        | `design, mode, s1, s2, vertex, re, im` |
//! | `scaling`       | `scaling.csv`                             | `n_pulses, solutions, max_abs_phase_factor, min_t_periods` |
//! | `error_vs_r`    | `error_vs_r.csv`, `error_vs_r_median.csv` | `ratio, seed, epsilon` / `ratio, samples, median_epsilon` |
//! | `frequency_map` | `frequency_map.csv`                       | `n_pulses, phase_factor, t_periods, feasible, omega, overshoot` |
//! | `batching`      | `batching.csv`                            | `m, phase_factor, ratio_to_m1, epsilon, span_periods, centroid_span_periods, slot_periods` |
//!
//! Floats are written in shortest round-trip form.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::run::RunReport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureSeries {
    Trajectories,
    Scaling,
    ErrorVsR,
    FrequencyMap,
    Batching,
}

impl FigureSeries {
    pub const ALL: [FigureSeries; 5] = [
        FigureSeries::Trajectories,
        FigureSeries::Scaling,
        FigureSeries::ErrorVsR,
        FigureSeries::FrequencyMap,
        FigureSeries::Batching,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureSeries::Trajectories => "trajectories",
            FigureSeries::Scaling => "scaling",
            FigureSeries::ErrorVsR => "error_vs_r",
            FigureSeries::FrequencyMap => "frequency_map",
            FigureSeries::Batching => "batching",
        }
    }
}

impl fmt::Display for FigureSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureSeries {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureSeries::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::config("series", format!("unknown series `{s}`")))
    }
}

#[derive(Serialize)]
struct TrajectoryRow<'a> {
    design: usize,
    mode: &'a str,
    s1: i8,
    s2: i8,
    vertex: usize,
    re: f64,
    im: f64,
}

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Write the files of `which` into `dir` and return their paths.
pub fn export_figure_data(report: &RunReport, which: FigureSeries, dir: &Path) -> Result<Vec<PathBuf>> {
    let missing = || Error::MissingSeries(which.name().to_string());
    std::fs::create_dir_all(dir)?;
    let file = |name: &str| dir.join(name);
    let written = match which {
        FigureSeries::Trajectories => {
            if report.trajectories.is_empty() {
                return Err(missing());
            }
            let path = file("trajectories.csv");
            let rows = report.trajectories.iter().enumerate().flat_map(|(design, set)| {
                set.polylines.iter().flat_map(move |p| {
                    p.points.iter().enumerate().map(move |(vertex, z)| TrajectoryRow {
                        design,
                        mode: p.mode.label(),
                        s1: p.branch.0,
                        s2: p.branch.1,
                        vertex,
                        re: z.re,
                        im: z.im,
                    })
                })
            });
            write_rows(&path, rows)?;
            vec![path]
        }
        FigureSeries::Scaling => {
            let s = report.scaling.as_ref().ok_or_else(missing)?;
            let path = file("scaling.csv");
            write_rows(&path, &s.rows)?;
            vec![path]
        }
        FigureSeries::FrequencyMap => {
            let s = report.scaling.as_ref().ok_or_else(missing)?;
            let path = file("frequency_map.csv");
            write_rows(&path, &s.library)?;
            vec![path]
        }
        FigureSeries::ErrorVsR => {
            let s = report.error_vs_r.as_ref().ok_or_else(missing)?;
            let (samples, medians) = (file("error_vs_r.csv"), file("error_vs_r_median.csv"));
            write_rows(&samples, &s.samples)?;
            write_rows(&medians, &s.medians)?;
            vec![samples, medians]
        }
        FigureSeries::Batching => {
            let rows = report.batching.as_ref().ok_or_else(missing)?;
            let path = file("batching.csv");
            write_rows(&path, rows)?;
            vec![path]
        }
    };
    Ok(written)
}
