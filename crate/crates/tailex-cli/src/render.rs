//! Result serialization: CSV (canonical) and JSON (for tooling).

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Map, Value};
use tailex::coverage::CoverageReport;
use tailex::pipeline::EstimateRow;

use crate::args::Format;
use crate::fail::{CliResult, Failure};

/// Open the output target: a file when a path was given, stdout otherwise.
pub fn sink(out: Option<&Path>) -> CliResult<Box<dyn Write>> {
    match out {
        Some(p) => {
            let f = File::create(p)
                .map_err(|e| Failure::Data(format!("cannot write {}: {e}", p.display())))?;
            Ok(Box::new(f))
        }
        None => Ok(Box::new(io::stdout())),
    }
}

fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

fn opt_num(v: Option<f64>) -> Value {
    v.map(num).unwrap_or(Value::Null)
}

fn opt_string(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn emit_json(w: &mut dyn Write, value: &Value) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *w, value)
        .map_err(|e| Failure::Data(format!("cannot serialize output: {e}")))?;
    writeln!(w)?;
    Ok(())
}

/// Emit named value columns (a plain series, or an x,y pair).
pub fn write_series(
    w: &mut dyn Write,
    format: Format,
    columns: &[(&str, &[f64])],
) -> CliResult<()> {
    match format {
        Format::Csv => {
            let mut csvw = csv::Writer::from_writer(w);
            csvw.write_record(columns.iter().map(|(name, _)| *name))?;
            let rows = columns[0].1.len();
            for i in 0..rows {
                csvw.write_record(columns.iter().map(|(_, vals)| vals[i].to_string()))?;
            }
            csvw.flush()?;
        }
        Format::Json => {
            let mut obj = Map::new();
            for (name, vals) in columns {
                obj.insert((*name).to_string(), Value::Array(vals.iter().map(|&v| num(v)).collect()));
            }
            emit_json(w, &Value::Object(obj))?;
        }
    }
    Ok(())
}

pub const ESTIMATE_HEADER: [&str; 10] = [
    "k", "tau_n", "gamma_hat", "gamma_y", "tau_prime", "estimate", "ci_lower", "ci_upper",
    "w_hat", "b_hat",
];

/// Emit estimate rows, one line per k.
pub fn write_rows(w: &mut dyn Write, format: Format, rows: &[EstimateRow]) -> CliResult<()> {
    match format {
        Format::Csv => {
            let mut csvw = csv::Writer::from_writer(w);
            csvw.write_record(ESTIMATE_HEADER)?;
            for r in rows {
                csvw.write_record(&[
                    r.k.to_string(),
                    r.tau_n.to_string(),
                    r.gamma_hat.to_string(),
                    opt_string(r.gamma_y),
                    r.tau_prime.to_string(),
                    r.estimate.to_string(),
                    opt_string(r.ci_lower),
                    opt_string(r.ci_upper),
                    opt_string(r.w_hat),
                    opt_string(r.b_hat),
                ])?;
            }
            csvw.flush()?;
        }
        Format::Json => {
            let arr: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "k": r.k,
                        "tau_n": num(r.tau_n),
                        "gamma_hat": num(r.gamma_hat),
                        "gamma_y": opt_num(r.gamma_y),
                        "tau_prime": num(r.tau_prime),
                        "estimate": num(r.estimate),
                        "ci_lower": opt_num(r.ci_lower),
                        "ci_upper": opt_num(r.ci_upper),
                        "w_hat": opt_num(r.w_hat),
                        "b_hat": opt_num(r.b_hat),
                    })
                })
                .collect();
            emit_json(w, &Value::Array(arr))?;
        }
    }
    Ok(())
}

/// Emit a coverage report: flat CSV (metadata repeated per cell row) or a
/// nested JSON object.
pub fn write_coverage(w: &mut dyn Write, format: Format, rep: &CoverageReport) -> CliResult<()> {
    match format {
        Format::Csv => {
            let mut csvw = csv::Writer::from_writer(w);
            csvw.write_record([
                "model",
                "n",
                "reps",
                "tau_prime",
                "alpha",
                "nominal_error_percent",
                "truth",
                "truth_se",
                "k",
                "variant",
                "misses",
                "failures",
                "evaluated",
                "error_rate_percent",
            ])?;
            for cell in &rep.cells {
                csvw.write_record(&[
                    rep.model.letter().to_string(),
                    rep.n.to_string(),
                    rep.reps.to_string(),
                    rep.tau_prime.to_string(),
                    opt_string(rep.alpha),
                    rep.nominal_error_percent.to_string(),
                    rep.truth.to_string(),
                    opt_string(rep.truth_se),
                    cell.k.to_string(),
                    cell.variant.clone(),
                    cell.misses.to_string(),
                    cell.failures.to_string(),
                    cell.evaluated.to_string(),
                    opt_string(cell.error_rate_percent()),
                ])?;
            }
            csvw.flush()?;
        }
        Format::Json => {
            let cells: Vec<Value> = rep
                .cells
                .iter()
                .map(|c| {
                    json!({
                        "k": c.k,
                        "variant": c.variant,
                        "misses": c.misses,
                        "failures": c.failures,
                        "evaluated": c.evaluated,
                        "error_rate_percent": opt_num(c.error_rate_percent()),
                    })
                })
                .collect();
            let doc = json!({
                "model": rep.model.letter().to_string(),
                "n": rep.n,
                "reps": rep.reps,
                "tau_prime": num(rep.tau_prime),
                "alpha": opt_num(rep.alpha),
                "nominal_error_percent": num(rep.nominal_error_percent),
                "truth": num(rep.truth),
                "truth_se": opt_num(rep.truth_se),
                "cells": cells,
            });
            emit_json(w, &doc)?;
        }
    }
    Ok(())
}
