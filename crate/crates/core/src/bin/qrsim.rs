use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qrsim::scenario::{load_scenario, render, run_scenario, OutputFormat, RunKind};
use qrsim::Error;

#[derive(Parser)]
#[command(
    name = "qrsim",
    version,
    about = "Phase-flip quantum refrigerator simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Steady-state polarization and heat currents.
    Steady(RunArgs),
    /// Cold-bath cooling trajectory.
    Cool(RunArgs),
    /// Parameter sweep over steady-state or cooling runs.
    Sweep(RunArgs),
    /// Load and validate a scenario without running it.
    Validate(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Output file; stdout when neither this nor the scenario names one.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads for sweeps; falls back to QRSIM_THREADS.
    #[arg(long)]
    threads: Option<usize>,
    /// Reserved for randomized property suites; runs are deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

fn fail(err: &Error) -> ExitCode {
    eprintln!("qrsim: {err}");
    ExitCode::from(err.exit_code() as u8)
}

fn threads(arg: Option<usize>) -> Result<Option<usize>, String> {
    if let Some(n) = arg {
        return Ok(Some(n));
    }
    match std::env::var("QRSIM_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| format!("QRSIM_THREADS must be a positive integer, got `{v}`")),
        Err(_) => Ok(None),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (expected, args) = match &cli.command {
        Command::Steady(a) => (Some(RunKind::SteadyState), a),
        Command::Cool(a) => (Some(RunKind::Cooling), a),
        Command::Sweep(a) => (Some(RunKind::Sweep), a),
        Command::Validate(a) => (None, a),
    };
    let threads = match threads(args.threads) {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("qrsim: {msg}");
            return ExitCode::from(1);
        }
    };
    if threads == Some(0) {
        eprintln!("qrsim: --threads must be at least 1");
        return ExitCode::from(1);
    }
    let scenario = match load_scenario(&args.scenario) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let Some(expected) = expected else {
        println!("ok {} {}", scenario.name, scenario.config_hash());
        return ExitCode::SUCCESS;
    };
    if scenario.run.kind() != expected {
        return fail(&Error::Validation {
            path: "run.kind".into(),
            constraint: format!("this subcommand needs a {expected:?} run"),
        });
    }
    let result = match run_scenario(&scenario, threads) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let format = match args.format {
        Some(Format::Csv) => OutputFormat::Csv,
        Some(Format::Json) => OutputFormat::Json,
        None => scenario.output.format,
    };
    let text = render(&scenario, &result, format);
    let out = args.out.clone().or_else(|| scenario.output.path.clone());
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                return fail(&Error::Io(e));
            }
        }
        None => print!("{text}"),
    }
    match result.failure_code() {
        Some(code) => {
            eprintln!("qrsim: one or more points failed; see the output records");
            ExitCode::from(code as u8)
        }
        None => ExitCode::SUCCESS,
    }
}
