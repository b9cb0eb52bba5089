use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ifc_cli::{commands, write_outputs, CliError, ScenarioFile};

#[derive(Parser)]
#[command(name = "ifc", version, about = "Certify and run interference-function power control")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Directory for report.json / trace.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of the text summary.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a contraction certificate.
    Certify {
        #[command(flatten)]
        common: Common,
    },
    /// Run the synchronous or asynchronous iteration.
    Run {
        #[command(flatten)]
        common: Common,
        /// Overrides `run.seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Randomised axiom checks.
    CheckAxioms {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Sampler seed; defaults to `run.seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Spectral radius of every assignment matrix.
    Enumerate {
        #[command(flatten)]
        common: Common,
    },
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    let common = match &cli.command {
        Command::Certify { common }
        | Command::Enumerate { common }
        | Command::Run { common, .. }
        | Command::CheckAxioms { common, .. } => common,
    };
    let file = ScenarioFile::load(&common.scenario).map_err(CliError::Parse)?;
    let outcome = match &cli.command {
        Command::Certify { .. } => commands::certify(&file)?,
        Command::Enumerate { .. } => commands::enumerate(&file)?,
        Command::Run { seed, .. } => commands::run(&file, *seed)?,
        Command::CheckAxioms { samples, seed, .. } => {
            commands::check_axioms(&file, *samples, seed.unwrap_or(file.run.seed))?
        }
    };
    if common.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&outcome.report).expect("report serialises")
        );
    } else {
        print!("{}", commands::summary(&outcome.report));
    }
    if let Some(dir) = &common.out {
        write_outputs(&file, &outcome, dir)?;
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("IFC_LOG_LEVEL", "warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
