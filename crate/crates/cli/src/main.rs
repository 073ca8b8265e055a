use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use epstein_cli::error::{EXIT_CONFIG, EXIT_OK};
use epstein_cli::{dispatch, CliError, Command, ConfigMode, ExperimentConfig, Suite};

/// Epstein surfaces of conformal metrics and their foliations of hyperbolic ends.
#[derive(Parser)]
#[command(name = "epstein", version)]
struct Cli {
    /// JSON experiment config; the bundled cylinder experiment when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Mode override: k-surface, cmc, epstein-sample or verify-suite.
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve at `sample.k` and write the Epstein surface as OBJ plus CSV.
    Sample,
    /// Solve the branch over the k list and write it as JSON.
    Solve,
    /// Solve the branch and estimate the tangent coefficients.
    Asymptotics,
    /// Tabulate k, c(k), K(I), H for Fuchsian surfaces.
    FuchsianTable,
    /// Run a named property suite.
    Verify {
        /// flow, distance, curvature, schwarzian, naturality, nehari, jet, branch or all.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Run the command implied by the config's mode.
    Run,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("EPSTEIN_NUM_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "EPSTEIN_NUM_THREADS must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size the thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(m) = &cli.mode {
        config.mode = m.parse::<ConfigMode>()?;
    }
    if let Some(dir) = &cli.out {
        config.output.dir = dir.to_string_lossy().into_owned();
    }
    let command = match cli.command {
        Cmd::Sample => Command::Sample,
        Cmd::Solve => Command::Solve,
        Cmd::Asymptotics => Command::Asymptotics,
        Cmd::FuchsianTable => Command::FuchsianTable,
        Cmd::Verify { suite } => {
            let suite = match suite {
                Some(s) => s.parse::<Suite>()?,
                None => config.verify.suite,
            };
            config.verify.suite = suite;
            Command::Verify(suite)
        }
        Cmd::Run => Command::Run,
    };
    let mut log: Box<dyn std::io::Write> = if cli.quiet {
        Box::new(std::io::sink())
    } else {
        Box::new(std::io::stdout().lock())
    };
    dispatch(command, &config, &mut *log).map(|_| ())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("epstein: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
