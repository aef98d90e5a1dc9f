use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::Failure;

#[derive(Parser, Debug)]
#[command(name = "sedmap", version, about = "Fuzzy cognitive maps for municipal development planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a map document and list every violation.
    Validate { map: PathBuf },
    /// Propagate impulses through a map.
    Simulate(SimulateArgs),
    /// Closure, influence indicators and stability.
    Analyze {
        map: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Search for weight halvings that make the map stable.
    Stabilize {
        map: PathBuf,
        /// Edge that must not change, as `source->target`.
        #[arg(long = "lock", value_name = "EDGE")]
        locked: Vec<String>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run, rank or invert scenarios from a scenario file.
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
    /// Resolve a municipality type and list its indicators.
    Template {
        registry: PathBuf,
        #[arg(long)]
        climate: String,
        /// Population count.
        #[arg(long)]
        population: u64,
        #[arg(long)]
        specialization: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = "SEDMAP_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "SEDMAP_DATA", default_value = "sedmap-data")]
        data: PathBuf,
        /// Allowed browser origin; repeat or comma-separate for several.
        #[arg(long, env = "SEDMAP_CORS", value_delimiter = ',')]
        cors: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
enum ScenarioAction {
    Run(ScenarioArgs),
    Compare(ScenarioArgs),
    Invert(ScenarioArgs),
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    map: PathBuf,
    file: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    map: PathBuf,
    /// Impulse as `factor=value` (step 0) or `factor@step=value`.
    #[arg(long = "impulse", value_name = "SPEC")]
    impulses: Vec<String>,
    #[arg(long)]
    horizon: usize,
    /// Clamp levels to [0, 1] after each step.
    #[arg(long)]
    clamp: bool,
    /// Baseline level as `factor=value`; absent factors start at 0.
    #[arg(long = "baseline", value_name = "SPEC", conflicts_with = "indicators")]
    baseline: Vec<String>,
    /// Indicator series (CSV) to normalize into the baseline.
    #[arg(long, requires = "period")]
    indicators: Option<PathBuf>,
    #[arg(long)]
    period: Option<String>,
    #[arg(long)]
    municipality: Option<String>,
    /// Write the trajectory here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone, Copy)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Table,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Rejected(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}
