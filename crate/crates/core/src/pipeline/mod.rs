//! Configuration, end-to-end design runs, sweeps, verification and export.

mod config;
mod export;
mod run;
mod sweep;
mod verify;

pub use config::{load_config, parse_config, parse_override, PipelineConfig, SweepConfig, OUTPUT_DIR_ENV};
pub use export::{export_figure_data, FigureSeries};
pub use run::{
    designer_config, discretize, run_design, window_separation, Diagnostics, Discrete, Polyline, Provenance,
    Rejection, RunFailure, RunReport, TrajectorySet,
};
pub use sweep::{
    batching_sweep, centroid_span, error_vs_r_sweep, scaling_sweep, BatchingRow, ErrorMedian, ErrorSample,
    ErrorVsRSeries, LibraryEntry, ScalingRow, ScalingSeries,
};
pub use verify::{verify_report, VerificationSummary};
