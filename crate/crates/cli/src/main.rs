use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use colreg_risk::colregs::TABLE_I;
use colreg_risk::estimator::{Method, PropagationSetup};
use colreg_risk::sampling::Interpretation;
use colreg_risk::Exec;
use colreg_risk_cli::analyze::{parse_selector, run_analysis, AnalyzeOptions};
use colreg_risk_cli::config::ScenarioConfig;
use colreg_risk_cli::run::{run_scenario, write_csv, write_table, RunOverrides};
use colreg_risk_cli::{selftest, CliError, CliResult, FailureKind};

/// Probabilistic COLREGs collision-risk and situation assessment.
#[derive(Parser)]
#[command(name = "colreg-risk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Kde,
    Des,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum InterpretationArg {
    StdDev,
    Variance,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario file for every scale factor.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Also write full-precision results here.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Propagation study: target on a ring of bearings, buffers and densities to CSV.
    Analyze {
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 30.0, 60.0, 90.0, 120.0, 150.0, 180.0])]
        bearings: Vec<f64>,
        #[arg(long, default_value_t = 1000.0)]
        range: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value = "analysis")]
        out: PathBuf,
        #[arg(long, default_value = "isj")]
        bandwidth: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "variance")]
        interpretation: InterpretationArg,
    },
    /// Built-in consistency checks.
    Selftest,
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("COLREG_RISK_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::config(format!("COLREG_RISK_THREADS: '{raw}' is not a non-negative integer")))?;
    #[cfg(feature = "parallel")]
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("COLREG_RISK_THREADS: {e}")))?;
    }
    log::debug!(
        "worker threads: {}",
        if n == 0 { "auto".to_string() } else { n.to_string() }
    );
    Ok(())
}

fn execute(cli: Cli) -> CliResult<bool> {
    configure_threads()?;
    let exec = Exec::Parallel;
    match cli.command {
        Command::Run {
            config,
            csv,
            seed,
            samples,
            method,
        } => {
            let cfg = ScenarioConfig::load(&config)?;
            let overrides = RunOverrides {
                seed,
                samples,
                methods: method.map(|m| match m {
                    MethodArg::Kde => vec![Method::Kde],
                    MethodArg::Des => vec![Method::Des],
                    MethodArg::Both => vec![Method::Kde, Method::Des],
                }),
            };
            let rows = run_scenario(&cfg, &overrides, exec)?;
            let stdout = io::stdout();
            write_table(&mut stdout.lock(), &cfg.name, &rows).map_err(|e| CliError::io("<stdout>".as_ref(), e))?;
            if let Some(path) = csv {
                let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
                let mut w = BufWriter::new(file);
                write_csv(&mut w, &rows)
                    .and_then(|_| w.flush())
                    .map_err(|e| CliError::io(&path, e))?;
            }
            Ok(true)
        }
        Command::Analyze {
            bearings,
            range,
            samples,
            out,
            bandwidth,
            seed,
            interpretation,
        } => {
            let selector = parse_selector(&bandwidth)
                .ok_or_else(|| CliError::config(format!("--bandwidth: unknown selector '{bandwidth}'")))?;
            let setup = PropagationSetup {
                bearings,
                range_m: range,
                n: samples,
                seed,
                interpretation: match interpretation {
                    InterpretationArg::StdDev => Interpretation::StdDev,
                    InterpretationArg::Variance => Interpretation::Variance,
                },
                ..PropagationSetup::default()
            };
            if setup.n == 0 || !setup.range_m.is_finite() || setup.range_m <= 0.0 || setup.bearings.is_empty() {
                return Err(CliError::config(
                    "analyze: need samples >= 1, range > 0 and at least one bearing",
                ));
            }
            let opts = AnalyzeOptions {
                setup,
                out_dir: out,
                selector,
            };
            let files = run_analysis(&opts, exec)?;
            println!("wrote {} files to {}", files.len(), opts.out_dir.display());
            Ok(true)
        }
        Command::Selftest => {
            let stdout = io::stdout();
            selftest::run(&mut stdout.lock(), &TABLE_I).map_err(|e| CliError::io("<stdout>".as_ref(), e))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(FailureKind::SelfTest.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.kind.exit_code())
        }
    }
}
