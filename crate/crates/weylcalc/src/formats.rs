//! File and JSON formats: polynomials, expression ASTs, sampled fields and
//! Fock matrices.
//!
//! Sampled-field CSV:
//!
//! ```text
//! qmin,qmax,pmin,pmax,nq,np
//! -8,8,-8,8,400,400
//! re,im            (nq·np lines, row-major: q index outer, p index inner)
//! ```
//!
//! The header line is optional. Matrices use the same layout with the
//! header `dim,reliable_dim`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use weylcalc_core::exprio::render;
use weylcalc_core::{FockMatrix, FreeExpression, OrderTag, OrderedPolynomial, Parsed, SampledField};

use crate::error::CliError;

pub const FIELD_HEADER: [&str; 6] = ["qmin", "qmax", "pmin", "pmax", "nq", "np"];
pub const MATRIX_HEADER: [&str; 2] = ["dim", "reliable_dim"];
/// Largest accepted sample count per axis.
pub const MAX_AXIS_SAMPLES: usize = 2048;

pub fn tag_name(tag: OrderTag) -> &'static str {
    tag.keyword()
}

pub fn polynomial_json(p: &OrderedPolynomial) -> Value {
    let terms: Vec<Value> = p
        .sorted_terms()
        .into_iter()
        .map(|(mono, c)| json!({ "m": mono.m, "r": mono.r, "coefficient": c.to_string() }))
        .collect();
    json!({ "tag": tag_name(p.tag()), "text": render(p), "terms": terms })
}

pub fn expression_ast(e: &FreeExpression) -> Value {
    match e {
        FreeExpression::Scalar(c) => json!({ "type": "scalar", "value": c.to_string() }),
        FreeExpression::Symbol(s) => json!({ "type": "symbol", "name": s.as_str() }),
        FreeExpression::Sum(xs) => json!({ "type": "sum", "terms": xs.iter().map(expression_ast).collect::<Vec<_>>() }),
        FreeExpression::Product(xs) => {
            json!({ "type": "product", "factors": xs.iter().map(expression_ast).collect::<Vec<_>>() })
        }
        FreeExpression::Power(base, k) => json!({ "type": "power", "base": expression_ast(base), "exponent": k }),
        FreeExpression::Block(p) => json!({ "type": "block", "polynomial": polynomial_json(p) }),
    }
}

pub fn parsed_ast(parsed: &Parsed) -> Value {
    match parsed {
        Parsed::Expression(e) => expression_ast(e),
        Parsed::Ordered(p) => json!({ "type": "block", "polynomial": polynomial_json(p) }),
    }
}

fn complex_pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FieldJson {
    pub qmin: f64,
    pub qmax: f64,
    pub pmin: f64,
    pub pmax: f64,
    pub nq: usize,
    pub np: usize,
    pub values: Vec<[f64; 2]>,
}

impl FieldJson {
    pub fn from_field(f: &SampledField) -> Self {
        let (qmin, qmax) = f.q_range();
        let (pmin, pmax) = f.p_range();
        FieldJson { qmin, qmax, pmin, pmax, nq: f.nq(), np: f.np(), values: f.values().iter().map(complex_pair).collect() }
    }

    pub fn into_field(self) -> Result<SampledField, CliError> {
        check_axes(self.nq, self.np)?;
        let values = self.values.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
        Ok(SampledField::new((self.qmin, self.qmax), (self.pmin, self.pmax), self.nq, self.np, values)?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub reliable_dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &FockMatrix) -> Self {
        MatrixJson { dim: m.dim(), reliable_dim: m.reliable_dim(), entries: m.entries().iter().map(complex_pair).collect() }
    }

    pub fn into_matrix(self) -> Result<FockMatrix, CliError> {
        let entries = self.entries.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
        FockMatrix::from_entries(self.dim, entries)
            .map(|m| m.with_reliable_dim(self.reliable_dim.min(self.dim)))
            .ok_or_else(|| CliError::input("matrix entry count is not dim²", None, None))
    }
}

fn check_axes(nq: usize, np: usize) -> Result<(), CliError> {
    if nq > MAX_AXIS_SAMPLES || np > MAX_AXIS_SAMPLES {
        return Err(CliError::Guard(format!("at most {MAX_AXIS_SAMPLES} samples per axis, got {nq}x{np}")));
    }
    Ok(())
}

fn csv_error(e: csv::Error) -> CliError {
    let line = e.position().map(|p| p.line());
    CliError::input(format!("malformed CSV: {e}"), line, None)
}

struct CsvCells<R: Read> {
    records: csv::StringRecordsIntoIter<R>,
}

impl<R: Read> CsvCells<R> {
    fn new(reader: R) -> Self {
        let rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        CsvCells { records: rdr.into_records() }
    }

    fn next_record(&mut self) -> Result<Option<(u64, csv::StringRecord)>, CliError> {
        match self.records.next() {
            None => Ok(None),
            Some(Err(e)) => Err(csv_error(e)),
            Some(Ok(rec)) => {
                let line = rec.position().map(|p| p.line()).unwrap_or(0);
                Ok(Some((line, rec)))
            }
        }
    }

    /// Reads the header-and-values preamble, returning the values record.
    fn preamble(&mut self, header: &[&str]) -> Result<(u64, csv::StringRecord), CliError> {
        let (line, first) = self.next_record()?.ok_or_else(|| CliError::input("empty input", Some(1), None))?;
        let is_header = first.iter().zip(header).all(|(a, b)| a.eq_ignore_ascii_case(b)) && first.len() == header.len();
        let (line, values) = if is_header {
            self.next_record()?
                .ok_or_else(|| CliError::input("missing values line after header", Some(line + 1), None))?
        } else {
            (line, first)
        };
        if values.len() != header.len() {
            return Err(CliError::input(
                format!("expected {} fields ({}), found {}", header.len(), header.join(","), values.len()),
                Some(line),
                None,
            ));
        }
        Ok((line, values))
    }

    fn cells(&mut self, count: usize) -> Result<Vec<Complex64>, CliError> {
        let mut out = Vec::with_capacity(count);
        let mut last_line = 0;
        while let Some((line, rec)) = self.next_record()? {
            last_line = line;
            if out.len() == count {
                return Err(CliError::input(format!("more than the expected {count} cells"), Some(line), None));
            }
            if rec.len() != 2 {
                return Err(CliError::input(format!("expected 2 fields \"re,im\", found {}", rec.len()), Some(line), None));
            }
            let re = parse_number::<f64>(&rec[0], line, 1)?;
            let im = parse_number::<f64>(&rec[1], line, 2)?;
            out.push(Complex64::new(re, im));
        }
        if out.len() != count {
            return Err(CliError::input(
                format!("expected {count} cells, found {}", out.len()),
                Some(last_line + 1),
                None,
            ));
        }
        Ok(out)
    }
}

fn parse_number<T: std::str::FromStr>(text: &str, line: u64, column: usize) -> Result<T, CliError> {
    text.parse::<T>()
        .map_err(|_| CliError::input(format!("cannot read {text:?} as a number"), Some(line), Some(column)))
}

pub fn read_field_csv<R: Read>(reader: R) -> Result<SampledField, CliError> {
    let mut cells = CsvCells::new(reader);
    let (line, v) = cells.preamble(&FIELD_HEADER)?;
    let mut bounds = [0.0f64; 4];
    for (k, b) in bounds.iter_mut().enumerate() {
        *b = parse_number(&v[k], line, k + 1)?;
    }
    let nq: usize = parse_number(&v[4], line, 5)?;
    let np: usize = parse_number(&v[5], line, 6)?;
    check_axes(nq, np)?;
    let values = cells.cells(nq * np)?;
    Ok(SampledField::new((bounds[0], bounds[1]), (bounds[2], bounds[3]), nq, np, values)?)
}

pub fn write_field_csv<W: Write>(f: &SampledField, writer: W) -> std::io::Result<()> {
    let mut w = BufWriter::new(writer);
    let (qmin, qmax) = f.q_range();
    let (pmin, pmax) = f.p_range();
    writeln!(w, "{}", FIELD_HEADER.join(","))?;
    writeln!(w, "{qmin},{qmax},{pmin},{pmax},{},{}", f.nq(), f.np())?;
    for z in f.values() {
        writeln!(w, "{},{}", z.re, z.im)?;
    }
    w.flush()
}

pub fn read_matrix_csv<R: Read>(reader: R) -> Result<FockMatrix, CliError> {
    let mut cells = CsvCells::new(reader);
    let (line, v) = cells.preamble(&MATRIX_HEADER)?;
    let dim: usize = parse_number(&v[0], line, 1)?;
    let reliable: usize = parse_number(&v[1], line, 2)?;
    if dim == 0 || dim > MAX_AXIS_SAMPLES {
        return Err(CliError::input(format!("dimension {dim} outside 1..={MAX_AXIS_SAMPLES}"), Some(line), Some(1)));
    }
    let entries = cells.cells(dim * dim)?;
    Ok(FockMatrix::from_entries(dim, entries).expect("counted").with_reliable_dim(reliable.min(dim)))
}

pub fn write_matrix_csv<W: Write>(m: &FockMatrix, writer: W) -> std::io::Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "{}", MATRIX_HEADER.join(","))?;
    writeln!(w, "{},{}", m.dim(), m.reliable_dim())?;
    for z in m.entries() {
        writeln!(w, "{},{}", z.re, z.im)?;
    }
    w.flush()
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io { path: path.display().to_string(), source }
}

/// Reads a field, choosing JSON for `.json` paths and CSV otherwise.
pub fn read_field(path: &Path) -> Result<SampledField, CliError> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    if is_json(path) {
        let parsed: FieldJson = serde_json::from_reader(BufReader::new(file)).map_err(|e| {
            CliError::input(format!("malformed field JSON: {e}"), Some(e.line() as u64), Some(e.column()))
        })?;
        parsed.into_field()
    } else {
        read_field_csv(BufReader::new(file))
    }
}

pub fn write_field(path: &Path, f: &SampledField) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    if is_json(path) {
        serde_json::to_writer(BufWriter::new(file), &FieldJson::from_field(f))
            .map_err(|e| io_error(path, std::io::Error::other(e)))
    } else {
        write_field_csv(f, file).map_err(|e| io_error(path, e))
    }
}

pub fn write_matrix(path: &Path, m: &FockMatrix) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    if is_json(path) {
        serde_json::to_writer(BufWriter::new(file), &MatrixJson::from_matrix(m))
            .map_err(|e| io_error(path, std::io::Error::other(e)))
    } else {
        write_matrix_csv(m, file).map_err(|e| io_error(path, e))
    }
}
