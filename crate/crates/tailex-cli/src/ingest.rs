//! Turning delimited files into analysis-ready series.
//!
//! A column selector is matched against the header first; if no header cell
//! matches and the selector parses as an integer, it is a 0-based column
//! index. Values that are absent, non-numeric or non-finite mark their row
//! as missing: the row is dropped (across all selected columns, keeping the
//! pair aligned) and the total is reported on standard error. The
//! `neg-log-return` transform then maps consecutive prices to
//! −log(P_{t+1}/P_t), insisting on strictly positive prices.

use std::fs::File;

use tailex::{BivariateSeries, Series};

use crate::args::{DataArgs, Transform};
use crate::fail::{CliResult, Failure};

pub enum Ingested {
    Uni(Series),
    Bi(BivariateSeries),
}

impl Ingested {
    pub fn n(&self) -> usize {
        match self {
            Ingested::Uni(s) => s.n(),
            Ingested::Bi(b) => b.n(),
        }
    }
}

fn resolve_column(headers: &csv::StringRecord, selector: &str) -> CliResult<usize> {
    if let Some(idx) = headers.iter().position(|h| h.trim() == selector) {
        return Ok(idx);
    }
    if let Ok(idx) = selector.parse::<usize>() {
        if idx < headers.len() {
            return Ok(idx);
        }
        return Err(Failure::Data(format!(
            "column index {idx} out of range: the file has {} columns",
            headers.len()
        )));
    }
    Err(Failure::Data(format!(
        "column '{selector}' not found; header is [{}]",
        headers.iter().collect::<Vec<_>>().join(", ")
    )))
}

fn parse_cell(field: Option<&str>) -> Option<f64> {
    let text = field?.trim();
    if text.is_empty() {
        return None;
    }
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Some(v),
        _ => None,
    }
}

/// Prices → one-step negative log-returns.
fn neg_log_returns(prices: &[f64], label: &str) -> CliResult<Vec<f64>> {
    if let Some(bad) = prices.iter().find(|&&p| p <= 0.0) {
        return Err(Failure::Data(format!(
            "neg-log-return needs strictly positive prices; {label} contains {bad}"
        )));
    }
    Ok(prices.windows(2).map(|w| -(w[1] / w[0]).ln()).collect())
}

pub fn ingest(args: &DataArgs) -> CliResult<Ingested> {
    let delim = u8::try_from(args.delimiter as u32)
        .map_err(|_| Failure::Usage("delimiter must be a single-byte character".into()))?;
    if args.column.is_empty() || args.column.len() > 2 {
        return Err(Failure::Usage(format!(
            "--column takes one selector, or two for an (x, y) pair; got {}",
            args.column.len()
        )));
    }

    let file = File::open(&args.input)
        .map_err(|e| Failure::Data(format!("cannot open {}: {e}", args.input.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delim)
        .has_headers(true)
        .flexible(true)
        .from_reader(file);
    let headers = reader.headers()?.clone();
    let cols: Vec<usize> = args
        .column
        .iter()
        .map(|sel| resolve_column(&headers, sel))
        .collect::<CliResult<_>>()?;

    let mut kept: Vec<Vec<f64>> = vec![Vec::new(); cols.len()];
    let mut dropped = 0usize;
    for record in reader.records() {
        let record = record?;
        let cells: Vec<Option<f64>> = cols.iter().map(|&c| parse_cell(record.get(c))).collect();
        if cells.iter().all(|c| c.is_some()) {
            for (store, cell) in kept.iter_mut().zip(&cells) {
                store.push(cell.unwrap());
            }
        } else {
            dropped += 1;
        }
    }
    if dropped > 0 {
        eprintln!("ingest: dropped {dropped} rows with missing values");
    }
    let usable = kept[0].len();
    if usable < 2 {
        return Err(Failure::Data(format!(
            "{} has {usable} usable rows; at least 2 are required",
            args.input.display()
        )));
    }

    let transformed: Vec<Vec<f64>> = match args.transform {
        Transform::None => kept,
        Transform::NegLogReturn => kept
            .iter()
            .zip(&args.column)
            .map(|(values, name)| neg_log_returns(values, name))
            .collect::<CliResult<_>>()?,
    };

    match transformed.len() {
        1 => {
            let values = transformed.into_iter().next().unwrap();
            Ok(Ingested::Uni(Series::new(values).map_err(Failure::from)?))
        }
        _ => {
            let mut it = transformed.into_iter();
            let x = it.next().unwrap();
            let y = it.next().unwrap();
            Ok(Ingested::Bi(BivariateSeries::from_values(x, y).map_err(Failure::from)?))
        }
    }
}
