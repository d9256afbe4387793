use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mimo_papr::error::Error;
use mimo_papr::harness::{
    run_experiment, sweep, write_outputs, ExperimentConfig, MetricsReport, CONFIG_KEYS,
};
use mimo_papr::solvers::Engine;

#[derive(Parser)]
#[command(
    name = "mimo-papr",
    version,
    about = "PAPR reduction with EVM and ACLR control for multi-antenna OFDM",
    after_long_help = CONFIG_KEYS
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every drop of one configuration.
    #[command(after_long_help = CONFIG_KEYS)]
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        engine: Option<Engine>,
        #[arg(long)]
        iters: Option<usize>,
    },
    /// Run one configuration per value of a dotted key such as `mimo.n_tx`.
    #[command(after_long_help = CONFIG_KEYS)]
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<String>,
        #[arg(long, default_value = "sweep_out")]
        out: PathBuf,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Parameter(_) | Error::Sizing(_) => Failure::Config(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, Failure> {
    ExperimentConfig::load(path).map_err(|e| match e {
        // an unreadable config file is still a configuration problem
        Error::Io { .. } => Failure::Config(e.to_string()),
        e => e.into(),
    })
}

fn report_line(r: &MetricsReport) -> String {
    match &r.aggregate {
        Some(a) => format!(
            "drops {}/{}  papr max {:.3} dB  aclr max {:.2} dB  est EVM {:.4}  tx EVM {:.4}",
            a.drops_ok, r.config.drops, a.papr_db_max, a.aclr_db_max, a.estevm_wb, a.txevm_wb
        ),
        None => format!("drops 0/{}", r.config.drops),
    }
}

fn finish(r: &MetricsReport, out: &Path) -> Result<(), Failure> {
    write_outputs(r, out)?;
    for f in &r.failures {
        eprintln!("drop {} failed: {}", f.drop, f.error);
    }
    println!("{}  -> {}", report_line(r), out.display());
    if r.all_failed() {
        return Err(Failure::Runtime("every drop failed".into()));
    }
    Ok(())
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Run {
            config,
            out,
            seed,
            engine,
            iters,
        } => {
            let mut cfg = load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(e) = engine {
                cfg.solver.engine = e;
            }
            if let Some(n) = iters {
                cfg.solver.max_iters = n;
            }
            cfg.validate()?;
            let report = run_experiment(&cfg)?;
            finish(&report, &out)
        }
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => {
            let cfg = load(&config)?;
            let values: Vec<String> = values.into_iter().filter(|v| !v.trim().is_empty()).collect();
            let reports = sweep(&cfg, &param, &values)?;
            let mut failed = 0;
            for (i, (r, v)) in reports.iter().zip(&values).enumerate() {
                let dir = out.join(format!("{i:02}_{param}={v}"));
                match finish(r, &dir) {
                    Err(Failure::Runtime(_)) => failed += 1,
                    other => other?,
                }
            }
            if !reports.is_empty() && failed == reports.len() {
                return Err(Failure::Runtime("every drop of every sweep point failed".into()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
