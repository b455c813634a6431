use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use weylcalc::commands::{self, FieldSource, TransformOptions};
use weylcalc::{CliError, CommandOutcome, Suite, SuiteParams};
use weylcalc_core::OrderTag;

/// Exact operator-ordering conversions, commutators and phase-space numerics.
#[derive(Debug, Parser)]
#[command(name = "weylcalc", version)]
struct Cli {
    /// Print the command outcome as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Tag {
    Pq,
    Qp,
    Weyl,
}

impl From<Tag> for OrderTag {
    fn from(t: Tag) -> Self {
        match t {
            Tag::Pq => OrderTag::PQ,
            Tag::Qp => OrderTag::QP,
            Tag::Weyl => OrderTag::Weyl,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Re-express an expression in P-Q, Q-P or Weyl order.
    Convert {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, value_enum)]
        to: Tag,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Commutator [x, y] in P-Q order.
    Commutator {
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        y: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Raise an expression to a power and order the result.
    Expand {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, default_value_t = 1)]
        power: u32,
        #[arg(long, value_enum, default_value = "pq")]
        to: Tag,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the syntax tree of an expression as JSON.
    Ast {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Run a verification suite; exits 1 if any check fails.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 6)]
        max_degree: u32,
        #[arg(long, default_value_t = 64)]
        dim: usize,
    },
    /// Phase-space transform of a sampled field.
    Transform {
        /// Field in CSV (or JSON, by extension).
        #[arg(long, required_unless_present = "gaussian", conflicts_with = "gaussian")]
        input: Option<PathBuf>,
        /// Use exp(-q^2 - p^2) sampled on [-w, w]^2.
        #[arg(long)]
        gaussian: bool,
        #[arg(long, default_value_t = 8.0, requires = "gaussian")]
        half_width: f64,
        #[arg(long, default_value_t = 400, requires = "gaussian")]
        points: usize,
        #[arg(long)]
        inverse: bool,
        /// Print the norms of the field and of its image.
        #[arg(long)]
        parseval: bool,
        /// Output file; CSV unless the extension is .json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Matrix of a polynomial on the first N number states.
    Matrix {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, default_value_t = 16)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(command: Command) -> (&'static str, Result<CommandOutcome, CliError>, bool) {
    match command {
        Command::Convert { expr, to, format } => ("convert", commands::convert(&expr, to.into()), format == Format::Json),
        Command::Commutator { x, y, format } => ("commutator", commands::commutator_of(&x, &y), format == Format::Json),
        Command::Expand { expr, power, to, format } => {
            ("expand", commands::expand_power(&expr, power, to.into()), format == Format::Json)
        }
        Command::Ast { expr } => ("ast", commands::ast(&expr), false),
        Command::Verify { suite, max_degree, dim } => {
            ("verify", commands::verify(suite, SuiteParams { max_degree, dim }), false)
        }
        Command::Transform { input, gaussian: _, half_width, points, inverse, parseval, out } => {
            let source = match input {
                Some(path) => FieldSource::File(path),
                None => FieldSource::Gaussian { half_width, points },
            };
            ("transform", commands::transform(&TransformOptions { source, inverse, parseval, out }), false)
        }
        Command::Matrix { expr, dim, out } => ("matrix", commands::matrix(&expr, dim, out.as_ref()), false),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, result, format_json) = run(cli.command);
    let outcome = result.unwrap_or_else(|e| CommandOutcome::error(name, &e));
    if cli.json || format_json {
        println!("{}", outcome.to_json());
    } else if outcome.status == weylcalc::Status::Error {
        eprintln!("error: {}", outcome.text);
    } else {
        println!("{}", outcome.text);
    }
    ExitCode::from(outcome.exit_code())
}
