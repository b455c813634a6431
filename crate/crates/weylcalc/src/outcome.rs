use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Mismatch,
    Error,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Mismatch => 1,
            Status::Error => 2,
        }
    }
}

/// Result of one command: a status plus a JSON payload.
///
/// `text` is the human-readable rendering printed without `--json`.
#[derive(Debug, Clone, Serialize)]
pub struct CommandOutcome {
    pub command: &'static str,
    pub status: Status,
    pub payload: Value,
    #[serde(skip)]
    pub text: String,
}

impl CommandOutcome {
    pub fn ok(command: &'static str, payload: Value, text: String) -> Self {
        CommandOutcome { command, status: Status::Ok, payload, text }
    }

    pub fn error(command: &'static str, err: &CliError) -> Self {
        let mut payload = json!({ "kind": err.kind(), "message": err.to_string() });
        match err {
            CliError::Parse { message, span, expected, annotated } => {
                payload["message"] = json!(message);
                payload["span"] = json!({ "start": span.0, "end": span.1 });
                payload["expected"] = json!(expected);
                payload["annotated"] = json!(annotated);
            }
            CliError::Input { line, column, .. } => {
                payload["line"] = json!(line);
                payload["column"] = json!(column);
            }
            _ => {}
        }
        CommandOutcome { command, status: Status::Error, payload, text: err.to_string() }
    }

    pub fn exit_code(&self) -> u8 {
        self.status.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("outcome serializes")
    }
}
