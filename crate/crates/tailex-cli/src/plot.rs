//! Static SVG rendering of an estimate table: point estimate and interval
//! bounds against k, as three polylines (or lone markers for a single row).

use std::path::Path;

use crate::fail::{CliResult, Failure};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const ML: f64 = 64.0; // left margin leaves room for y labels
const MR: f64 = 18.0;
const MT: f64 = 18.0;
const MB: f64 = 48.0;

const ESTIMATE_COLOR: &str = "#1a6fb5";
const BOUND_COLOR: &str = "#c77d2e";

struct Row {
    k: f64,
    estimate: f64,
    lower: Option<f64>,
    upper: Option<f64>,
}

fn parse_rows(path: &Path) -> CliResult<Vec<Row>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Failure::Data(format!("cannot open {}: {e}", path.display())))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let k_col = col("k").ok_or_else(|| Failure::Data("input has no 'k' column".into()))?;
    let est_col =
        col("estimate").ok_or_else(|| Failure::Data("input has no 'estimate' column".into()))?;
    let lo_col = col("ci_lower");
    let hi_col = col("ci_upper");

    let parse = |field: Option<&str>| -> Option<f64> {
        let text = field?.trim();
        if text.is_empty() {
            return None;
        }
        text.parse::<f64>().ok().filter(|v| v.is_finite())
    };

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let k = parse(record.get(k_col))
            .ok_or_else(|| Failure::Data(format!("row {}: unreadable k", i + 1)))?;
        let estimate = parse(record.get(est_col))
            .ok_or_else(|| Failure::Data(format!("row {}: unreadable estimate", i + 1)))?;
        rows.push(Row {
            k,
            estimate,
            lower: lo_col.and_then(|c| parse(record.get(c))),
            upper: hi_col.and_then(|c| parse(record.get(c))),
        });
    }
    Ok(rows)
}

fn ticks(lo: f64, hi: f64) -> [f64; 4] {
    let span = hi - lo;
    [lo, lo + span / 3.0, lo + 2.0 * span / 3.0, hi]
}

fn fmt(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if a >= 1000.0 {
        format!("{v:.0}")
    } else if a >= 1.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.4}")
    }
}

pub fn render(path: &Path) -> CliResult<String> {
    let rows = parse_rows(path)?;
    if rows.is_empty() {
        return Err(Failure::Data("no rows to plot".into()));
    }

    let (mut kmin, mut kmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in &rows {
        kmin = kmin.min(r.k);
        kmax = kmax.max(r.k);
        for v in [Some(r.estimate), r.lower, r.upper].into_iter().flatten() {
            ymin = ymin.min(v);
            ymax = ymax.max(v);
        }
    }
    if kmin == kmax {
        kmin -= 1.0;
        kmax += 1.0;
    }
    let pad = 0.05 * (ymax - ymin).max(1e-12 * ymax.abs().max(1.0));
    ymin -= pad;
    ymax += pad;

    let sx = |k: f64| ML + (k - kmin) / (kmax - kmin) * (WIDTH - ML - MR);
    let sy = |v: f64| HEIGHT - MB - (v - ymin) / (ymax - ymin) * (HEIGHT - MT - MB);

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" \
         height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));

    // axes
    svg.push_str(&format!(
        "  <line x1=\"{ML}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n",
        HEIGHT - MB,
        WIDTH - MR
    ));
    svg.push_str(&format!(
        "  <line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>\n",
        HEIGHT - MB
    ));
    for t in ticks(kmin, kmax) {
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"monospace\" \
             font-size=\"12\">{}</text>\n",
            sx(t),
            HEIGHT - MB + 18.0,
            fmt(t)
        ));
    }
    for t in ticks(ymin, ymax) {
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-family=\"monospace\" \
             font-size=\"12\">{}</text>\n",
            ML - 6.0,
            sy(t) + 4.0,
            fmt(t)
        ));
    }
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"monospace\" \
         font-size=\"13\">k</text>\n",
        (ML + WIDTH - MR) / 2.0,
        HEIGHT - 8.0
    ));

    // series: (name, color, dash, points)
    let series: [(&str, &str, Option<&str>, Vec<(f64, f64)>); 3] = [
        (
            "ci-lower",
            BOUND_COLOR,
            Some("6 4"),
            rows.iter().filter_map(|r| r.lower.map(|v| (r.k, v))).collect(),
        ),
        (
            "ci-upper",
            BOUND_COLOR,
            Some("6 4"),
            rows.iter().filter_map(|r| r.upper.map(|v| (r.k, v))).collect(),
        ),
        (
            "estimate",
            ESTIMATE_COLOR,
            None,
            rows.iter().map(|r| (r.k, r.estimate)).collect(),
        ),
    ];

    for (name, color, dash, pts) in &series {
        if pts.is_empty() {
            continue;
        }
        let dash_attr =
            dash.map(|d| format!(" stroke-dasharray=\"{d}\"")).unwrap_or_default();
        if pts.len() == 1 {
            let (k, v) = pts[0];
            svg.push_str(&format!(
                "  <circle class=\"{name}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{color}\"/>\n",
                sx(k),
                sy(v)
            ));
        } else {
            let coords: Vec<String> =
                pts.iter().map(|&(k, v)| format!("{:.2},{:.2}", sx(k), sy(v))).collect();
            svg.push_str(&format!(
                "  <polyline class=\"{name}\" fill=\"none\" stroke=\"{color}\" \
                 stroke-width=\"1.6\"{dash_attr} points=\"{}\"/>\n",
                coords.join(" ")
            ));
        }
    }

    // legend
    let has_ci = rows.iter().any(|r| r.lower.is_some() || r.upper.is_some());
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-family=\"monospace\" \
         font-size=\"12\" fill=\"{ESTIMATE_COLOR}\">estimate</text>\n",
        WIDTH - MR - 6.0,
        MT + 16.0
    ));
    if has_ci {
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-family=\"monospace\" \
             font-size=\"12\" fill=\"{BOUND_COLOR}\">confidence bounds</text>\n",
            WIDTH - MR - 6.0,
            MT + 32.0
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
