use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use ramify::commands::{self, AnalyzeOptions, CommandError, LiftDemoOptions};
use ramify::selfcheck::Budget;

#[derive(Parser)]
#[command(name = "ramify", version, about = "Ramification of wild automorphisms of the formal disk")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Require gcd(j_0, p) = 1 for orbit profiles.
    #[arg(long, global = true)]
    strict: bool,
    /// Series precision N.
    #[arg(long, global = true)]
    precision: Option<usize>,
    /// p-adic depth M of the lifting ring.
    #[arg(long, global = true)]
    depth: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Ramification report for a series literal (file, `-` for stdin, or inline JSON).
    Analyze { input: String },
    /// Jump profile to generic-fiber orbit profile.
    Jumps2orbits { input: String },
    /// Orbit profile to jump profile.
    Orbits2jumps { input: String },
    /// Lift `zeta T / (1 + c T)` and factor its fixed-point divisor.
    LiftDemo {
        prime: u64,
        /// The unit c: an integer or comma-separated coordinates.
        #[arg(default_value = "1", allow_hyphen_values = true)]
        unit: String,
    },
    /// Run the built-in property suites.
    Selfcheck {
        #[arg(long, default_value = "default")]
        budget: Budget,
    },
}

fn read_input(arg: &str) -> Result<String, CommandError> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        return Ok(arg.to_string());
    }
    let mut text = String::new();
    let res = if arg == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| text)
    } else {
        std::fs::read_to_string(arg)
    };
    res.map_err(|e| CommandError::Parse(format!("cannot read {arg}: {e}")))
}

fn parse_unit(s: &str) -> Result<Vec<i64>, CommandError> {
    s.split(',')
        .map(|c| c.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CommandError::Parse(format!("invalid unit {s:?}: {e}")))
}

fn run(cli: &Cli) -> Result<Value, CommandError> {
    match &cli.command {
        Command::Analyze { input } => commands::analyze(
            &read_input(input)?,
            AnalyzeOptions { precision: cli.precision, strict: cli.strict },
        ),
        Command::Jumps2orbits { input } => commands::jumps2orbits(&read_input(input)?, cli.strict),
        Command::Orbits2jumps { input } => commands::orbits2jumps(&read_input(input)?, cli.strict),
        Command::LiftDemo { prime, unit } => commands::lift_demo(
            *prime,
            &LiftDemoOptions { unit: parse_unit(unit)?, depth: cli.depth, precision: cli.precision },
        ),
        Command::Selfcheck { budget } => commands::selfcheck(*budget, cli.seed),
    }
}

fn emit(value: &Value, format: Format) {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(value).expect("serializable") + "\n",
        Format::Table => commands::render_table(value),
    };
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(value) => {
            emit(&value, cli.format);
            ExitCode::SUCCESS
        }
        Err(e) => {
            if !matches!(e, CommandError::ChecksFailed(_)) {
                eprintln!("ramify: {e}");
            }
            emit(&e.diagnostic(), cli.format);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
