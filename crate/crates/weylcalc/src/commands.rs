//! The subcommands, independent of argument parsing.

use std::path::PathBuf;

use serde_json::{json, Value};

use weylcalc_core::exprio::{interpret, parse, render};
use weylcalc_core::fockspace::evaluate;
use weylcalc_core::opalg::commutator;
use weylcalc_core::phasexform::{forward_transform, inverse_transform, parseval_check};
use weylcalc_core::{FreeExpression, OrderTag, OrderedPolynomial, Parsed, SampledField};

use crate::error::CliError;
use crate::formats::{self, parsed_ast, polynomial_json, tag_name, MatrixJson, MAX_AXIS_SAMPLES};
use crate::outcome::{CommandOutcome, Status};
use crate::suites::{self, Suite, SuiteParams};

pub const MAX_POWER: u32 = 32;
pub const MAX_MATRIX_DIM: usize = 256;

fn parse_text(text: &str) -> Result<Parsed, CliError> {
    parse(text).map_err(|e| CliError::from_parse(&e, text))
}

fn canonical(text: &str) -> Result<FreeExpression, CliError> {
    Ok(parse_text(text)?.to_expression().to_canonical())
}

fn polynomial_outcome(command: &'static str, mut payload: Value, result: &OrderedPolynomial) -> CommandOutcome {
    payload["result"] = polynomial_json(result);
    CommandOutcome::ok(command, payload, render(result))
}

/// Reads `text` and expresses it in the `to` ordering.
pub fn convert(text: &str, to: OrderTag) -> Result<CommandOutcome, CliError> {
    let result = interpret(&parse_text(text)?, to)?;
    Ok(polynomial_outcome("convert", json!({ "input": text, "to": tag_name(to) }), &result))
}

/// `[x, y]` in P-Q order.
pub fn commutator_of(x: &str, y: &str) -> Result<CommandOutcome, CliError> {
    let result = commutator(&canonical(x)?, &canonical(y)?)?;
    Ok(polynomial_outcome("commutator", json!({ "x": x, "y": y, "to": "pq" }), &result))
}

/// `(text)^power` expressed in the `to` ordering.
pub fn expand_power(text: &str, power: u32, to: OrderTag) -> Result<CommandOutcome, CliError> {
    if power > MAX_POWER {
        return Err(CliError::Guard(format!("--power {power} exceeds {MAX_POWER}")));
    }
    let base = parse_text(text)?.to_expression();
    let result = interpret(&Parsed::Expression(base.pow(power)), to)?;
    Ok(polynomial_outcome("expand", json!({ "input": text, "power": power, "to": tag_name(to) }), &result))
}

/// JSON syntax tree of `text`.
pub fn ast(text: &str) -> Result<CommandOutcome, CliError> {
    let tree = parsed_ast(&parse_text(text)?);
    let rendered = serde_json::to_string_pretty(&tree).expect("tree serializes");
    Ok(CommandOutcome::ok("ast", json!({ "input": text, "ast": tree }), rendered))
}

pub fn verify(suite: Suite, params: SuiteParams) -> Result<CommandOutcome, CliError> {
    let report = suites::run(suite, params)?;
    let text = report.render_text();
    let status = if report.passed { Status::Ok } else { Status::Mismatch };
    let payload = serde_json::to_value(&report).expect("report serializes");
    Ok(CommandOutcome { command: "verify", status, payload, text })
}

/// Matrix of `text` (read in P-Q order) on the first `dim` number states.
pub fn matrix(text: &str, dim: usize, out: Option<&PathBuf>) -> Result<CommandOutcome, CliError> {
    if dim > MAX_MATRIX_DIM {
        return Err(CliError::Guard(format!("--dim {dim} exceeds {MAX_MATRIX_DIM}")));
    }
    let poly = interpret(&parse_text(text)?, OrderTag::PQ)?;
    let m = evaluate(&poly, dim)?;
    let mut payload = json!({ "input": text, "dim": m.dim(), "reliable_dim": m.reliable_dim() });
    let text = match out {
        Some(path) => {
            formats::write_matrix(path, &m)?;
            payload["output"] = json!(path.display().to_string());
            format!("wrote {} ({}x{}, reliable block {})", path.display(), m.dim(), m.dim(), m.reliable_dim())
        }
        None => {
            payload["matrix"] = serde_json::to_value(MatrixJson::from_matrix(&m)).expect("matrix serializes");
            let mut buf = Vec::new();
            formats::write_matrix_csv(&m, &mut buf).expect("in-memory write");
            String::from_utf8(buf).expect("ASCII").trim_end().to_string()
        }
    };
    Ok(CommandOutcome::ok("matrix", payload, text))
}

#[derive(Debug, Clone)]
pub enum FieldSource {
    File(PathBuf),
    Gaussian { half_width: f64, points: usize },
}

#[derive(Debug, Clone)]
pub struct TransformOptions {
    pub source: FieldSource,
    pub inverse: bool,
    pub parseval: bool,
    pub out: Option<PathBuf>,
}

pub fn transform(opts: &TransformOptions) -> Result<CommandOutcome, CliError> {
    let field = match &opts.source {
        FieldSource::File(path) => formats::read_field(path)?,
        FieldSource::Gaussian { half_width, points } => {
            if *points > MAX_AXIS_SAMPLES {
                return Err(CliError::Guard(format!("--points {points} exceeds {MAX_AXIS_SAMPLES}")));
            }
            if !(*half_width > 0.0 && half_width.is_finite()) {
                return Err(CliError::input("--half-width must be positive", None, None));
            }
            SampledField::gaussian(*half_width, *points)?
        }
    };
    let direction = if opts.inverse { "inverse" } else { "forward" };
    let mut payload = json!({
        "direction": direction,
        "nq": field.nq(),
        "np": field.np(),
        "q_range": [field.q_range().0, field.q_range().1],
        "p_range": [field.p_range().0, field.p_range().1],
    });
    let mut lines = Vec::new();
    if opts.parseval {
        let (lhs, rhs) = parseval_check(&field);
        payload["parseval"] = json!({ "field": lhs, "image": rhs });
        lines.push(format!("field norm  {lhs:.10}"));
        lines.push(format!("image norm  {rhs:.10}"));
    }
    if opts.out.is_some() || !opts.parseval {
        let result = if opts.inverse { inverse_transform(&field) } else { forward_transform(&field) };
        payload["reliable"] = json!(result.is_reliable());
        payload["boundary_max"] = json!(field.boundary_max());
        if let Some(w) = &result.warning {
            lines.push(format!(
                "warning: input reaches {:.3e} on the domain boundary; the result may be truncated",
                w.boundary_max
            ));
        }
        if let Some(path) = &opts.out {
            formats::write_field(path, &result.field)?;
            payload["output"] = json!(path.display().to_string());
            lines.push(format!("wrote {} ({}x{}, {direction})", path.display(), result.field.nq(), result.field.np()));
        } else {
            lines.push(format!(
                "{direction} transform of {}x{} samples; image norm {:.10}",
                result.field.nq(),
                result.field.np(),
                result.field.norm_squared()
            ));
        }
    }
    Ok(CommandOutcome::ok("transform", payload, lines.join("\n")))
}
