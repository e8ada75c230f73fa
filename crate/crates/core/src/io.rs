//! CSV ingestion for samples and asset panels.
//!
//! Lines starting with `#` are comments. Sample files hold one column of values
//! and an optional second column of weights; a first row with no numeric field
//! is taken as a header. Panel files start with a header of asset names and may
//! carry a probability column named `p`.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use csv::{ReaderBuilder, StringRecord, Trim};

use crate::empirical::EmpiricalDistribution;
use crate::error::{Error, Result};
use crate::portfolio::AssetPanel;

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(Trim::All)
        .flexible(true)
        .from_reader(input)
}

fn line_of(record: &StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn parse_error(line: u64, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => parse_error(line, 1, format!("{other:?}")),
    }
}

fn number(record: &StringRecord, column: usize) -> Result<f64> {
    let field = &record[column];
    field
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| {
            parse_error(
                line_of(record),
                column + 1,
                format!("`{field}` is not a finite number"),
            )
        })
}

fn is_header(record: &StringRecord) -> bool {
    record.iter().all(|f| f.parse::<f64>().is_err())
}

pub fn read_samples(path: impl AsRef<Path>) -> Result<EmpiricalDistribution> {
    read_samples_from(File::open(path)?)
}

/// Samples with optional weights; weights are rescaled to sum to one.
pub fn read_samples_from<R: Read>(input: R) -> Result<EmpiricalDistribution> {
    let mut values = Vec::new();
    let mut weights = Vec::new();
    let mut width = None;
    for (k, record) in reader(input).records().enumerate() {
        let record = record.map_err(csv_error)?;
        if k == 0 && is_header(&record) {
            continue;
        }
        let line = line_of(&record);
        let w = *width.get_or_insert(record.len());
        if !(1..=2).contains(&record.len()) || record.len() != w {
            return Err(parse_error(
                line,
                record.len().min(w) + 1,
                format!("expected {w} column(s), found {}", record.len()),
            ));
        }
        values.push(number(&record, 0)?);
        if w == 2 {
            let weight = number(&record, 1)?;
            if weight <= 0.0 {
                return Err(parse_error(
                    line,
                    2,
                    format!("weight {weight} is not positive"),
                ));
            }
            weights.push(weight);
        }
    }
    if values.is_empty() {
        return Err(Error::EmptyData);
    }
    if weights.is_empty() {
        EmpiricalDistribution::from_samples(&values)
    } else {
        EmpiricalDistribution::from_weighted(values, weights)
    }
}

pub fn read_panel(path: impl AsRef<Path>) -> Result<AssetPanel> {
    read_panel_from(File::open(path)?)
}

/// Header of asset names, then one row of losses per scenario. A column named
/// `p` holds scenario weights, rescaled to sum to one.
pub fn read_panel_from<R: Read>(input: R) -> Result<AssetPanel> {
    let mut records = reader(input).into_records();
    let header = match records.next() {
        Some(r) => r.map_err(csv_error)?,
        None => return Err(Error::EmptyData),
    };
    if !is_header(&header) {
        return Err(parse_error(
            line_of(&header),
            1,
            "expected a header row of asset names",
        ));
    }
    let p_col = header.iter().position(|h| h == "p");
    let names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != p_col)
        .map(|(_, h)| h.to_string())
        .collect();

    let mut rows = Vec::new();
    let mut weights = Vec::new();
    for record in records {
        let record = record.map_err(csv_error)?;
        if record.len() != header.len() {
            return Err(parse_error(
                line_of(&record),
                record.len().min(header.len()) + 1,
                format!("expected {} columns, found {}", header.len(), record.len()),
            ));
        }
        let mut row = Vec::with_capacity(names.len());
        for i in 0..record.len() {
            let v = number(&record, i)?;
            if Some(i) == p_col {
                if v <= 0.0 {
                    return Err(parse_error(
                        line_of(&record),
                        i + 1,
                        format!("probability {v} is not positive"),
                    ));
                }
                weights.push(v);
            } else {
                row.push(v);
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyData);
    }
    let probs = p_col.map(|_| {
        let total: f64 = weights.iter().sum();
        weights.iter().map(|w| w / total).collect()
    });
    AssetPanel::new(names, rows, probs)
}
