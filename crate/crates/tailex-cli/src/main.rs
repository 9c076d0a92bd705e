//! `tailex` — tail risk estimation from the command line.
//!
//! Subcommands: `ingest` (file → series), `estimate` (series → rows of
//! extreme expectile / quantile / MES estimates with optional confidence
//! intervals), `simulate` (benchmark model → CSV path), `coverage`
//! (empirical interval error rates on a benchmark model) and `plot`
//! (estimate table → SVG).
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

mod args;
mod fail;
mod ingest;
mod plot;
mod render;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use tailex::coverage::{self, CoverageConfig};
use tailex::pipeline::{self, EstimateRequest};
use tailex::{simulate_bivariate, simulate_univariate, CiVariant, ModelId, ModelSpec};

use args::{Cli, Command, CoverageArgs, EstimateArgs, Format, IngestArgs, PlotArgs, SimulateArgs};
use fail::{CliResult, Failure};
use ingest::Ingested;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let benign = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if benign { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    if let Some(t) = cli.threads {
        // a later duplicate init (e.g. in tests) is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Ingest(a) => cmd_ingest(cli, a),
        Command::Estimate(a) => cmd_estimate(cli, a),
        Command::Simulate(a) => cmd_simulate(cli, a),
        Command::Coverage(a) => cmd_coverage(cli, a),
        Command::Plot(a) => cmd_plot(a),
    }
}

/// Parse "start:stop:step" or a comma list into tail sample sizes.
fn parse_grid(text: &str) -> CliResult<Vec<usize>> {
    let bad = |reason: String| Failure::Usage(format!("k grid '{text}': {reason}"));
    let ks: Vec<usize> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:step".into()));
        }
        let nums: Vec<usize> = parts
            .iter()
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(e.to_string()))?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if step == 0 {
            return Err(bad("step must be positive".into()));
        }
        if start > stop {
            return Err(bad("start exceeds stop".into()));
        }
        (start..=stop).step_by(step).collect()
    } else {
        text.split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(e.to_string()))?
    };
    if ks.is_empty() {
        return Err(bad("no values".into()));
    }
    Ok(ks)
}

fn cmd_ingest(cli: &Cli, a: &IngestArgs) -> CliResult<()> {
    let data = ingest::ingest(&a.data)?;
    let mut w = render::sink(a.out.as_deref())?;
    match &data {
        Ingested::Uni(s) => render::write_series(&mut *w, cli.format, &[("value", s.values())]),
        Ingested::Bi(b) => render::write_series(
            &mut *w,
            cli.format,
            &[("x", b.x().values()), ("y", b.y().values())],
        ),
    }
}

fn cmd_estimate(cli: &Cli, a: &EstimateArgs) -> CliResult<()> {
    let data = ingest::ingest(&a.data)?;
    let method = a.method.to_method();
    match (&data, method.is_bivariate()) {
        (Ingested::Uni(_), true) => {
            return Err(Failure::Usage(format!(
                "{} needs two --column selectors forming an (x, y) pair",
                method.label()
            )))
        }
        (Ingested::Bi(_), false) => {
            return Err(Failure::Usage(format!(
                "{} runs on a single column; one --column selector expected",
                method.label()
            )))
        }
        _ => {}
    }

    let n = data.n();
    let alpha = a.alpha.unwrap_or(1.0 - 1.0 / n as f64);
    let ks = match (a.k, &a.k_grid) {
        (Some(k), None) => vec![k],
        (None, Some(grid)) => parse_grid(grid)?,
        _ => unreachable!("clap enforces exactly one of --k/--k-grid"),
    };
    let ci = match a.ci.as_str() {
        "none" => None,
        other => Some(CiVariant::parse(other).ok_or_else(|| {
            Failure::Usage(format!(
                "unknown interval variant '{other}' (expected iid, d, d-adj or none)"
            ))
        })?),
    };
    let blocks = match a.blocks.as_str() {
        "auto" => None,
        pair => {
            let parts: Vec<&str> = pair.split(',').collect();
            let parsed: Option<(usize, usize)> = match parts.as_slice() {
                [r, l] => r.trim().parse().ok().zip(l.trim().parse().ok()),
                _ => None,
            };
            Some(parsed.ok_or_else(|| {
                Failure::Usage(format!("blocks '{pair}' should be \"r,l\" or \"auto\""))
            })?)
        }
    };

    let mut rows = Vec::with_capacity(ks.len());
    for k in ks {
        let req = EstimateRequest { k, alpha, method, ci, level: a.level, blocks };
        let row = match &data {
            Ingested::Uni(s) => pipeline::estimate_series(s, &req),
            Ingested::Bi(b) => pipeline::estimate_bivariate(b, &req),
        }
        .map_err(|e| Failure::from(e).at_k(k))?;
        rows.push(row);
    }
    let mut w = render::sink(a.out.as_deref())?;
    render::write_rows(&mut *w, cli.format, &rows)
}

fn cmd_simulate(cli: &Cli, a: &SimulateArgs) -> CliResult<()> {
    let id = ModelId::from_letter(a.model).ok_or_else(|| {
        Failure::Usage(format!("unknown model '{}' (expected a..h)", a.model))
    })?;
    let mut w = render::sink(a.out.as_deref())?;
    // simulated paths are always CSV: they are data files, not result tables
    if a.n == 0 {
        let empty: &[f64] = &[];
        return if id.is_bivariate() {
            render::write_series(&mut *w, Format::Csv, &[("x", empty), ("y", empty)])
        } else {
            render::write_series(&mut *w, Format::Csv, &[("y", empty)])
        };
    }
    let mut spec = ModelSpec::new(id, a.n, cli.seed);
    if let Some(b) = a.burn_in {
        spec = spec.with_burn_in(b);
    }
    if id.is_bivariate() {
        let b = simulate_bivariate(spec);
        render::write_series(&mut *w, Format::Csv, &[("x", b.x().values()), ("y", b.y().values())])
    } else {
        let s = simulate_univariate(spec);
        render::write_series(&mut *w, Format::Csv, &[("y", s.values())])
    }
}

fn read_truth(path: &Path) -> CliResult<f64> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Data(format!("cannot read {}: {e}", path.display())))?;
    text.split(|c: char| c.is_whitespace() || c == ',')
        .find(|t| !t.is_empty())
        .and_then(|t| t.parse::<f64>().ok())
        .ok_or_else(|| Failure::Data(format!("{} holds no readable number", path.display())))
}

fn cmd_coverage(cli: &Cli, a: &CoverageArgs) -> CliResult<()> {
    let id = ModelId::from_letter(a.model).ok_or_else(|| {
        Failure::Usage(format!("unknown model '{}' (expected a..h)", a.model))
    })?;
    if a.alpha_from_tau_prime.is_some() && !id.is_bivariate() {
        return Err(Failure::Usage(
            "--alpha-from-tau-prime applies to the MES models (e..h); use --tau-prime".into(),
        ));
    }
    let mut cfg = CoverageConfig::new(id);
    cfg.n = a.n;
    cfg.reps = a.reps;
    cfg.seed = cli.seed;
    cfg.level = a.level;
    cfg.tau_prime = a.alpha_from_tau_prime.unwrap_or(a.tau_prime);
    cfg.k_grid = parse_grid(&a.k_grid)?;
    cfg.truth = match (a.truth, &a.truth_file) {
        (Some(v), None) => Some(v),
        (None, Some(path)) => Some(read_truth(path)?),
        (None, None) => None,
        (Some(_), Some(_)) => unreachable!("clap keeps --truth and --truth-file exclusive"),
    };
    let report = coverage::run(&cfg)?;
    let mut w = render::sink(a.out.as_deref())?;
    render::write_coverage(&mut *w, cli.format, &report)
}

fn cmd_plot(a: &PlotArgs) -> CliResult<()> {
    let svg = plot::render(&a.input)?;
    let mut w = render::sink(a.out.as_deref())?;
    w.write_all(svg.as_bytes())?;
    Ok(())
}
