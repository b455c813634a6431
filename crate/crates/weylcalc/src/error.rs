use weylcalc_core::exprio::ReadError;
use weylcalc_core::fockspace::FockError;
use weylcalc_core::opalg::OpalgError;
use weylcalc_core::phasexform::TransformError;
use weylcalc_core::ParseError;

/// Everything that ends a command with exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{annotated}")]
    Parse { message: String, annotated: String, span: (usize, usize), expected: Vec<String> },
    #[error("{0}")]
    Algebra(#[from] OpalgError),
    #[error("{0}")]
    Fock(#[from] FockError),
    #[error("{0}")]
    Transform(#[from] TransformError),
    #[error("{}", input_message(.line, .column, .message))]
    Input { message: String, line: Option<u64>, column: Option<usize> },
    #[error("resource guard: {0}")]
    Guard(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn input_message(line: &Option<u64>, column: &Option<usize>, message: &str) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!("line {l}, column {c}: {message}"),
        (Some(l), None) => format!("line {l}: {message}"),
        _ => message.to_string(),
    }
}

impl CliError {
    pub fn from_parse(e: &ParseError, source: &str) -> Self {
        CliError::Parse {
            message: e.message.clone(),
            annotated: e.annotate(source),
            span: (e.span.start, e.span.end),
            expected: e.expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn from_read(e: ReadError, source: &str) -> Self {
        match e {
            ReadError::Parse(p) => Self::from_parse(&p, source),
            ReadError::Algebra(a) => CliError::Algebra(a),
        }
    }

    pub fn input(message: impl Into<String>, line: Option<u64>, column: Option<usize>) -> Self {
        CliError::Input { message: message.into(), line, column }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Algebra(_) => "algebra",
            CliError::Fock(_) => "fock",
            CliError::Transform(_) => "transform",
            CliError::Input { .. } => "input",
            CliError::Guard(_) => "guard",
            CliError::Io { .. } => "io",
        }
    }
}
