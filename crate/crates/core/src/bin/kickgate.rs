use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use kickgate::budget::{speedup_report, ErrorBudget};
use kickgate::pipeline::{
    batching_sweep, error_vs_r_sweep, export_figure_data, load_config, parse_override, run_design, scaling_sweep,
    verify_report, FigureSeries, PipelineConfig, RunReport,
};
use kickgate::{Error, Result};

#[derive(Parser)]
#[command(name = "kickgate", version, about = "Design and verify pulse-train phase gates for two trapped ions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Configuration file (flat `key = value` lines).
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set ga.m=2`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Shorthand for `--set master_seed=N`.
    #[arg(long)]
    seed: Option<u64>,
    /// Shorthand for `--set output_dir=DIR`.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl ConfigArgs {
    fn load(&self) -> Result<PipelineConfig> {
        let mut overrides = Vec::new();
        if let Some(seed) = self.seed {
            overrides.push(("master_seed".to_string(), seed.to_string()));
        }
        if let Some(dir) = &self.output_dir {
            overrides.push(("output_dir".to_string(), toml_string(&dir.to_string_lossy())));
        }
        for s in &self.set {
            overrides.push(parse_override(s)?);
        }
        load_config(self.config.as_deref(), &overrides)
    }
}

fn toml_string(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Scaling,
    ErrorVsR,
    Batching,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full design pipeline and write `report.json`.
    Design(ConfigArgs),
    /// Re-validate every design stored in a report.
    Verify {
        report: PathBuf,
    },
    /// Run parameter sweeps and write `sweep.json`.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_enum, default_value = "all")]
        kind: SweepKind,
    },
    /// Write CSV files for one series of a report, or all present ones.
    Export {
        report: PathBuf,
        /// trajectories, scaling, error_vs_r, frequency_map, batching or all.
        #[arg(long, default_value = "all")]
        series: String,
        /// Target directory; defaults to the report's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the error budget of a gate with the given number of kicks.
    Budget {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        kicks: u32,
        /// Gate duration in s; prints the speedup against `--reference`.
        #[arg(long)]
        gate_time: Option<f64>,
        #[arg(long, default_value_t = 40e-6)]
        reference: f64,
    },
}

fn read_report(path: &Path) -> Result<RunReport> {
    RunReport::from_json(&std::fs::read_to_string(path)?)
}

fn write_outputs(cfg: &PipelineConfig, report: &RunReport, name: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    cfg.save(&cfg.output_dir.join("config.conf"))?;
    let path = cfg.output_dir.join(name);
    report.write(&path)?;
    Ok(path)
}

fn design(args: &ConfigArgs) -> Result<()> {
    let cfg = args.load()?;
    match run_design(&cfg) {
        Ok(report) => {
            let path = write_outputs(&cfg, &report, "report.json")?;
            println!(
                "{} designs, {} rejected candidates -> {}",
                report.designs.len(),
                report.rejections.len(),
                path.display()
            );
            for (d, b) in report.designs.iter().zip(&report.budgets) {
                println!(
                    "  phi={:+.6} omega*/2pi={:.4} kHz n={} eps={:.3e} T={:.4} periods F={:.6}",
                    d.phase_factor,
                    d.omega_star / (2.0 * std::f64::consts::PI) / 1e3,
                    d.overshoot,
                    d.epsilon,
                    d.gate_time_periods,
                    b.fidelity * (1.0 - b.eps_gamma_gate)
                );
            }
            Ok(())
        }
        Err(failure) => {
            let path = write_outputs(&cfg, &failure.report, "report.json")?;
            eprintln!("partial report written to {}", path.display());
            Err(failure.error)
        }
    }
}

fn verify(path: &Path) -> Result<()> {
    let summary = verify_report(&read_report(path)?);
    for f in &summary.failures {
        eprintln!("{f}");
    }
    println!("{} designs checked, {} failures", summary.checked, summary.failures.len());
    if summary.passed() {
        Ok(())
    } else {
        Err(Error::Verification(format!("{} failures", summary.failures.len())))
    }
}

fn sweep(args: &ConfigArgs, kind: SweepKind) -> Result<()> {
    let cfg = args.load()?;
    let mut report = RunReport::empty(&cfg);
    let all = matches!(kind, SweepKind::All);
    if all || matches!(kind, SweepKind::Scaling) {
        info!("scaling sweep");
        report.scaling = Some(scaling_sweep(&cfg)?);
    }
    if all || matches!(kind, SweepKind::ErrorVsR) {
        info!("error sweep");
        report.error_vs_r = Some(error_vs_r_sweep(&cfg)?);
    }
    if all || matches!(kind, SweepKind::Batching) {
        info!("batching sweep");
        report.batching = Some(batching_sweep(&cfg)?);
    }
    let path = write_outputs(&cfg, &report, "sweep.json")?;
    println!("sweep written to {}", path.display());
    Ok(())
}

fn export(path: &Path, series: &str, out: Option<&Path>) -> Result<()> {
    let report = read_report(path)?;
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| path.parent().unwrap_or(Path::new(".")).to_path_buf());
    let which: Vec<FigureSeries> = if series == "all" {
        FigureSeries::ALL.to_vec()
    } else {
        vec![series.parse()?]
    };
    let mut written = 0;
    for s in which {
        match export_figure_data(&report, s, &dir) {
            Ok(files) => {
                for f in files {
                    println!("{}", f.display());
                    written += 1;
                }
            }
            Err(Error::MissingSeries(_)) if series == "all" => {}
            Err(e) => return Err(e),
        }
    }
    if written == 0 {
        return Err(Error::MissingSeries(series.to_string()));
    }
    Ok(())
}

fn budget(args: &ConfigArgs, kicks: u32, gate_time: Option<f64>, reference: f64) -> Result<()> {
    let cfg = args.load()?;
    let b = ErrorBudget::new(&cfg.trap_laser, &cfg.budget, kicks)?;
    println!("{}", serde_json::to_string_pretty(&b)?);
    if let Some(t) = gate_time {
        println!("speedup {:.3}", speedup_report(t, reference)?);
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Design(args) => design(args),
        Command::Verify { report } => verify(report),
        Command::Sweep { config, kind } => sweep(config, *kind),
        Command::Export { report, series, out } => export(report, series, out.as_deref()),
        Command::Budget { config, kicks, gate_time, reference } => budget(config, *kicks, *gate_time, *reference),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
