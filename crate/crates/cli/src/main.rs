use std::path::{Path, PathBuf};
use std::process::ExitCode;

use capillary1d::config::{apply_override, SimulationConfig};
use capillary1d::experiments::{
    curvature_profile_study, run_sweep, threshold_study, write_profile_study, write_sweep_report,
    write_threshold_report, SweepParameter, SweepSpec,
};
use capillary1d::run::run_config;
use capillary1d::verify::{reference, run_verification, VerifyOptions};
use capillary1d::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "capillary1d",
    version,
    about = "Thin-film flow with exact curvature: simulations, sweeps and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file; the built-in default is used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.directory`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dotted override such as `model.delta=0.05`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write series.csv, snap_<i>.csv and summary.json.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Sweep eta, epsilon, delta or N and compare the trajectories.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        param: String,
        /// Comma-separated values; defaults depend on the parameter.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Extend the default value list by one refinement level.
        #[arg(long)]
        deep: bool,
    },
    /// Run both pressure modes and compare curvature equilibration.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Positivity measurements across mobility exponents.
    Thresholds {
        #[command(flatten)]
        common: Common,
        #[arg(
            long = "n-values",
            value_delimiter = ',',
            default_value = "1.5,2,2.5,3"
        )]
        n_values: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Run the acceptance checks on the built-in reference configurations.
    Verify {
        #[arg(long, default_value = "out/verify")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        deep: bool,
    },
}

fn load_config(common: &Common, fallback: SimulationConfig) -> Result<SimulationConfig, Error> {
    let mut doc = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)?
        }
        None => serde_json::to_value(fallback)?,
    };
    for o in &common.overrides {
        apply_override(&mut doc, o)?;
    }
    SimulationConfig::from_value(doc)
}

fn out_dir(common: &Common, config: &SimulationConfig) -> PathBuf {
    common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&config.output.directory))
}

fn report_error(e: &Error) -> ExitCode {
    let record = serde_json::json!({
        "error": e.kind(),
        "message": e.to_string(),
        "exit_code": e.exit_code(),
    });
    eprintln!("{record}");
    ExitCode::from(e.exit_code() as u8)
}

fn done(dir: &Path, what: &str) {
    println!("{what} written to {}", dir.display());
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Simulate { common } => {
            let config = load_config(&common, SimulationConfig::default())?;
            let dir = out_dir(&common, &config);
            let outcome = run_config(&config, &dir)?;
            let v = &outcome.summary.verdicts;
            println!(
                "mass drift {:.2e}, energy residual {:.2e} (relative), min u {:.3e}, {} steps",
                v.mass_drift_rel,
                v.energy_residual_rel,
                outcome.summary.positivity.global_min,
                outcome.summary.stats.accepted
            );
            done(&dir, "series.csv, snapshots and summary.json");
        }
        Command::Sweep {
            common,
            param,
            values,
            jobs,
            deep,
        } => {
            let config = load_config(&common, SimulationConfig::default())?;
            let parameter: SweepParameter = param.parse()?;
            let spec = SweepSpec {
                parameter,
                values: values.unwrap_or_else(|| parameter.default_values(deep)),
                base: config.clone(),
                jobs,
            };
            let report = run_sweep(&spec)?;
            let dir = out_dir(&common, &config);
            write_sweep_report(&report, &dir)?;
            for p in &report.plateaus {
                println!("{:<12} {:<8} ratio {:.3}", p.quantity, p.verdict, p.ratio);
            }
            done(&dir, "sweep_report.json");
            if let Some(f) = &report.failure {
                return Err(Error::Experiment(format!(
                    "member {} failed: {}",
                    f.value, f.message
                )));
            }
        }
        Command::Compare { common, jobs } => {
            let config = load_config(&common, reference::droplet())?;
            let study = curvature_profile_study(&config, jobs)?;
            let dir = out_dir(&common, &config);
            write_profile_study(&study, &dir)?;
            let r = &study.report;
            println!(
                "nonlinear CoV(kappa) {:.4} -> {:.4}; linear CoV(u_xx) {:.4} -> {:.4}",
                r.nonlinear.initial.cov_kappa,
                r.nonlinear.final_stats.cov_kappa,
                r.linear.initial.cov_uxx,
                r.linear.final_stats.cov_uxx
            );
            done(&dir, "profile_report.json");
        }
        Command::Thresholds {
            common,
            n_values,
            jobs,
        } => {
            let config = load_config(&common, SimulationConfig::default())?;
            let report = threshold_study(&n_values, &config, jobs)?;
            let dir = out_dir(&common, &config);
            write_threshold_report(&report, &dir)?;
            for r in &report.rows {
                println!(
                    "n = {:<5} {:<8} min u {}",
                    r.n,
                    r.status,
                    r.global_min.map_or("-".into(), |m| format!("{m:.3e}"))
                );
            }
            done(&dir, "thresholds_report.json");
        }
        Command::Verify { out, jobs, deep } => {
            let report = run_verification(VerifyOptions { jobs, deep });
            report.write(&out)?;
            print!("{}", report.table());
            if !report.all_passed {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => report_error(&e),
    }
}
