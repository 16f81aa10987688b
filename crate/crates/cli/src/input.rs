//! CSV and kernel-spec ingestion.

use std::fs;
use std::path::Path;

use pdik::{KernelSpec, Sample, SpaceShape};

use crate::CliError;

/// Parses `d1,...,dn` into positive block sizes.
pub fn parse_groups(text: &str) -> Result<Vec<usize>, CliError> {
    let groups = text
        .split(',')
        .map(|part| match part.trim().parse::<usize>() {
            Ok(d) if d > 0 => Ok(d),
            _ => Err(CliError::Input(format!("--groups: {part:?} is not a positive integer"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(groups)
}

/// Comma-separated reals, as used by `frechet --t`.
pub fn parse_reals(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|part| part.trim().parse::<f64>().map_err(|_| CliError::Input(format!("{part:?} is not a number"))))
        .collect()
}

/// Numeric rows of a CSV document. Errors name the 1-based line of the file.
pub fn read_rows(text: &str, header: bool) -> Result<Vec<Vec<f64>>, CliError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(header).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { pos, expected_len, len } => CliError::Input(format!(
                "line {}: expected {expected_len} fields, found {len}",
                pos.as_ref().map_or(0, |p| p.line())
            )),
            _ => CliError::Input(format!("malformed CSV: {e}")),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .enumerate()
            .map(|(col, cell)| match cell.trim().parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(CliError::Input(format!("line {line}, column {}: {cell:?} is not a finite number", col + 1))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Input("the CSV contains no data rows".into()));
    }
    Ok(rows)
}

/// Reads a sample and splits its columns left to right by `groups`.
pub fn read_sample(path: &Path, groups: &[usize], header: bool) -> Result<Sample, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let rows = read_rows(&text, header)?;
    let columns = rows[0].len();
    let total: usize = groups.iter().sum();
    if total != columns {
        return Err(CliError::Input(format!("--groups covers {total} columns but the CSV has {columns}")));
    }
    let shape = SpaceShape::new(groups.to_vec())?;
    Ok(Sample::from_flat(shape, rows)?)
}

pub fn read_kernel(path: &Path) -> Result<KernelSpec, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let spec: KernelSpec =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("kernel spec {}: {e}", path.display())))?;
    spec.validate()?;
    Ok(spec)
}
