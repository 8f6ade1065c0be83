use std::path::Path;
use std::process::Command;

use num_complex::Complex64;

use kickgate::designer::{design_continuous, DesignerConfig};
use kickgate::pipeline::{
    export_figure_data, load_config, parse_config, parse_override, run_design, verify_report, FigureSeries,
    PipelineConfig, Polyline, RunReport, TrajectorySet,
};
use kickgate::{closure_residual, trajectory, Error, Mode, SpinBranch};

/// Small N = 6 run with batches of two, which tunes into the trap window.
fn small_config() -> PipelineConfig {
    let text = "master_seed = 3\ndesigner.k_seed = 60\ndesigner.k_opt = 4\nga.m = 2\nga.k_ite = 200\n";
    parse_config(text, &[]).unwrap()
}

#[test]
fn design_run_is_complete_and_verifies() {
    let cfg = small_config();
    let report = run_design(&cfg).unwrap();
    assert!(!report.designs.is_empty());
    let n = report.designs.len();
    for len in [report.candidates.len(), report.budgets.len(), report.verifications.len(), report.traces.len(), report.trajectories.len()] {
        assert_eq!(len, n);
    }
    for d in &report.designs {
        assert!(d.epsilon <= 1e-6);
        assert!(cfg.trap_laser.contains(d.omega_star));
        assert_eq!(d.sequence.len(), 12);
        assert!(d.gate_time_periods < 1.06);
    }
    assert!(report.verifications.iter().all(|v| v.agrees && !v.open_orbit));
    assert_eq!(report.provenance.config_hash, cfg.hash());
    let summary = verify_report(&report);
    assert!(summary.passed(), "{:?}", summary.failures);
    assert_eq!(summary.checked, n);

    let back = RunReport::from_json(&report.to_json().unwrap()).unwrap();
    assert!(verify_report(&back).passed());
}

#[test]
fn same_seed_same_bytes() {
    let cfg = small_config();
    let a = run_design(&cfg).unwrap().to_json().unwrap();
    let b = run_design(&cfg).unwrap().to_json().unwrap();
    assert_eq!(a, b);
    let other = PipelineConfig { master_seed: 4, ..cfg };
    assert_ne!(run_design(&other).unwrap().to_json().unwrap(), a);
}

#[test]
fn tampered_report_fails_verification() {
    let mut report = run_design(&small_config()).unwrap();
    report.designs[0].omega_star *= 1.0 + 1e-6;
    report.designs[0].slots[1] += 3;
    let summary = verify_report(&report);
    assert!(summary.failures.len() >= 2, "{:?}", summary.failures);
    assert!(summary.failures.iter().all(|f| f.starts_with("design 0")));
}

#[test]
fn infeasible_run_keeps_partial_report() {
    // Single pulses: |φ̃| ≈ 4.3 needs a trap below the 78 kHz floor.
    let cfg = parse_config("designer.k_seed = 40\ndesigner.k_opt = 3\n", &[]).unwrap();
    let failure = run_design(&cfg).unwrap_err();
    assert!(matches!(failure.error, Error::NoFeasibleFrequency { .. }));
    assert_eq!(failure.error.exit_code(), 3);
    assert_eq!(failure.report.continuous.len(), 3);
    assert_eq!(failure.report.rejections.len(), 3);
    assert!(failure.report.rejections.iter().all(|r| r.stage == "tuning"));
}

#[test]
fn coarse_grid_is_reported() {
    // A tiny explicit separation and a very coarse grid make windows collide.
    let text = "designer.k_seed = 40\ndesigner.k_opt = 2\ndesigner.min_separation = 0.0\ngrid.ratio = 10.0\nga.m = 3\n";
    let failure = run_design(&parse_config(text, &[]).unwrap()).unwrap_err();
    assert!(matches!(failure.error, Error::GridTooCoarse { .. }), "{}", failure.error);
    assert_eq!(failure.error.exit_code(), 4);
}

/// Final vertex of every polyline in `trajectories.csv`, keyed by design.
fn polyline_ends(path: &Path) -> Vec<(usize, Complex64)> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["design", "mode", "s1", "s2", "vertex", "re", "im"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    let key = |r: &csv::StringRecord| (r[0].to_string(), r[1].to_string(), r[2].to_string(), r[3].to_string());
    rows.iter()
        .enumerate()
        .filter(|(i, row)| rows.get(i + 1).is_none_or(|next| key(next) != key(row)))
        .map(|(_, row)| (row[0].parse().unwrap(), Complex64::new(row[5].parse().unwrap(), row[6].parse().unwrap())))
        .collect()
}

#[test]
fn trajectory_export_ends_at_residual() {
    let report = run_design(&small_config()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = export_figure_data(&report, FigureSeries::Trajectories, dir.path()).unwrap();
    let ends = polyline_ends(&files[0]);
    assert_eq!(ends.len(), report.designs.len() * 4);
    for (design, end) in ends {
        let d = &report.designs[design];
        let alpha = report.trajectories[design].alpha_c;
        let r = closure_residual(&d.sequence);
        // Each polyline ends at 2α|S| for its mode; both are bounded by the closure error.
        let bound = 2.0 * alpha * (r.s_c.norm().max(r.s_s.norm())) * (1.0 + 1e-9) + 1e-15;
        assert!(end.norm() <= bound, "{} > {bound}", end.norm());
        assert!(end.norm() <= 2.0 * alpha * (3f64.sqrt() * d.epsilon).sqrt() * (1.0 + 1e-9) + 1e-15);
    }
}

#[test]
fn trajectory_export_of_closed_sequence_returns_to_origin() {
    let cfg = small_config();
    let mut report = RunReport::empty(&cfg);
    let dcfg = DesignerConfig { k_seed: 10, k_opt: 3, seed: 1, ..DesignerConfig::default() };
    let alpha = 0.07;
    for sol in design_continuous(&dcfg).unwrap().solutions {
        let mut polylines = Vec::new();
        for mode in Mode::ALL {
            for branch in SpinBranch::ALL {
                polylines.push(Polyline { mode, branch, points: trajectory(&sol.sequence, mode, branch, alpha) });
            }
        }
        report.trajectories.push(TrajectorySet { alpha_c: alpha, polylines });
    }
    let dir = tempfile::tempdir().unwrap();
    let files = export_figure_data(&report, FigureSeries::Trajectories, dir.path()).unwrap();
    let ends = polyline_ends(&files[0]);
    assert_eq!(ends.len(), 3 * 8);
    assert!(ends.iter().all(|(_, z)| z.norm() < 1e-10));
}

#[test]
fn missing_series_is_an_error() {
    let report = run_design(&small_config()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for s in [FigureSeries::Scaling, FigureSeries::ErrorVsR, FigureSeries::FrequencyMap, FigureSeries::Batching] {
        match export_figure_data(&report, s, dir.path()) {
            Err(Error::MissingSeries(name)) => assert_eq!(name, s.name()),
            other => panic!("{s}: {other:?}"),
        }
    }
    assert!("nonsense".parse::<FigureSeries>().is_err());
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    let mut cfg = small_config();
    cfg.output_dir = dir.path().join("out");
    cfg.save(&path).unwrap();
    let loaded = load_config(Some(&path), &[]).unwrap();
    if std::env::var_os(kickgate::pipeline::OUTPUT_DIR_ENV).is_none() {
        assert_eq!(loaded, cfg);
    }
    let over = load_config(Some(&path), &[parse_override("ga.k_p=8").unwrap()]).unwrap();
    assert_eq!(over.ga.k_p, 8);
    assert!(matches!(load_config(Some(&dir.path().join("absent.conf")), &[]), Err(Error::Io(_))));
}

fn kickgate(args: &[&str], env_out: Option<&Path>) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kickgate"));
    cmd.args(args);
    match env_out {
        Some(p) => cmd.env("KICKGATE_OUTPUT_DIR", p),
        None => cmd.env_remove("KICKGATE_OUTPUT_DIR"),
    };
    let out = cmd.output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn cli_verbs_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let base = ["--set", "designer.k_seed=40", "--set", "designer.k_opt=2", "--set", "ga.k_ite=100"];

    let mut args = vec!["design"];
    args.extend(base);
    args.extend(["--set", "ga.m=2"]);
    let (code, _) = kickgate(&args, Some(&out));
    assert_eq!(code, 0);
    let report = out.join("report.json");
    assert!(report.exists() && out.join("config.conf").exists());

    assert_eq!(kickgate(&["verify", report.to_str().unwrap()], None).0, 0);
    let csv_dir = dir.path().join("csv");
    let (code, stdout) =
        kickgate(&["export", report.to_str().unwrap(), "--out", csv_dir.to_str().unwrap()], None);
    assert_eq!(code, 0);
    assert!(stdout.contains("trajectories.csv"));
    let (code, _) = kickgate(
        &["export", report.to_str().unwrap(), "--series", "scaling", "--out", csv_dir.to_str().unwrap()],
        None,
    );
    assert_eq!(code, 6);

    let mut args = vec!["design"];
    args.extend(base);
    let (code, _) = kickgate(&args, Some(&dir.path().join("infeasible")));
    assert_eq!(code, 3);
    assert!(dir.path().join("infeasible/report.json").exists());

    assert_eq!(kickgate(&["design", "--set", "colour=red"], Some(&out)).0, 2);
    assert_eq!(kickgate(&["verify", dir.path().join("none.json").to_str().unwrap()], None).0, 7);

    let (code, stdout) = kickgate(&["budget", "--kicks", "6", "--gate-time", "7.14e-7"], None);
    assert_eq!(code, 0);
    assert!(stdout.contains("eps_gamma") && stdout.contains("speedup 56"));
}
