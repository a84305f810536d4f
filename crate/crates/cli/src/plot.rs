//! Single-series SVG rendering of a sweep CSV.

use std::fmt::Write as _;
use std::io::Read;

use tachyon_core::nullshell::singular_velocity_at;

use crate::args::Series;
use crate::error::CliError;
use crate::output::HEADER;

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub beta: f64,
    /// `None` for rows that are not `ok` or carry no value for the series.
    pub value: Option<f64>,
}

pub fn read_series<R: Read>(input: R, series: Series) -> Result<Vec<Sample>, CliError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(CliError::MalformedCsv(format!("expected header `{}`", HEADER.join(","))));
    }
    let column = match series {
        Series::Z => 5,
        Series::Epsilon => 6,
    };
    let mut samples = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let beta: f64 = record[0]
            .parse()
            .map_err(|_| CliError::MalformedCsv(format!("line {line}: bad beta {:?}", &record[0])))?;
        let status = &record[8];
        if !matches!(status, "ok" | "precision_exhausted" | "skipped_singular") {
            return Err(CliError::MalformedCsv(format!("line {line}: unknown status {status:?}")));
        }
        let field = &record[column];
        let value = if status == "ok" && !field.is_empty() {
            let v: f64 = field.parse().map_err(|_| CliError::MalformedCsv(format!("line {line}: bad value {field:?}")))?;
            Some(v)
        } else {
            None
        };
        samples.push(Sample { beta, value });
    }
    if samples.is_empty() {
        return Err(CliError::MalformedCsv("no data rows".into()));
    }
    Ok(samples)
}

/// Runs of consecutive samples with a value.
pub fn segments(samples: &[Sample]) -> Vec<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    for s in samples {
        match s.value {
            Some(v) => current.push((s.beta, v)),
            None if !current.is_empty() => out.push(std::mem::take(&mut current)),
            None => {}
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

fn singular_in(lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 1.. {
        let Ok(s) = singular_velocity_at(k, 128) else { break };
        let b = s.beta.to_f64();
        if b > hi {
            break;
        }
        if b >= lo {
            out.push(b);
        }
    }
    out
}

pub fn render(samples: &[Sample], series: Series, width: u32, height: u32) -> String {
    let (w, h) = (f64::from(width), f64::from(height));
    let (left, right, top, bottom) = (70.0, 20.0, 20.0, 50.0);
    let x_lo = samples.iter().map(|s| s.beta).fold(f64::INFINITY, f64::min);
    let x_hi = samples.iter().map(|s| s.beta).fold(f64::NEG_INFINITY, f64::max);
    let values = samples.iter().filter_map(|s| s.value);
    let (mut y_lo, mut y_hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !y_lo.is_finite() {
        (y_lo, y_hi) = (-1.0, 1.0);
    }
    if y_hi - y_lo < f64::EPSILON * y_hi.abs().max(1.0) {
        (y_lo, y_hi) = (y_lo - 0.5, y_hi + 0.5);
    }
    let x_span = if x_hi > x_lo { x_hi - x_lo } else { 1.0 };
    let px = |b: f64| left + (b - x_lo) / x_span * (w - left - right);
    let py = |v: f64| top + (y_hi - v) / (y_hi - y_lo) * (h - top - bottom);

    let label = match series {
        Series::Z => "Z",
        Series::Epsilon => "epsilon",
    };
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<g class="axes" stroke="black" stroke-width="1"><line x1="{left}" y1="{0:.3}" x2="{1:.3}" y2="{0:.3}"/><line x1="{left}" y1="{top}" x2="{left}" y2="{0:.3}"/></g>"#,
        h - bottom,
        w - right
    );
    if y_lo < 0.0 && y_hi > 0.0 {
        let _ = writeln!(
            svg,
            r#"<line class="zero" x1="{left}" y1="{0:.3}" x2="{1:.3}" y2="{0:.3}" stroke="gray" stroke-width="0.5"/>"#,
            py(0.0),
            w - right
        );
    }
    for b in singular_in(x_lo, x_hi) {
        let _ = writeln!(
            svg,
            r#"<line class="singular" x1="{0:.3}" y1="{top}" x2="{0:.3}" y2="{1:.3}" stroke="red" stroke-width="0.5" stroke-dasharray="4 3"/>"#,
            px(b),
            h - bottom
        );
    }
    for seg in segments(samples) {
        let points: Vec<String> = seg.iter().map(|&(b, v)| format!("{:.3},{:.3}", px(b), py(v))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="navy" stroke-width="1.2" points="{}"/>"#,
            points.join(" ")
        );
    }
    let _ = writeln!(
        svg,
        r#"<g font-family="sans-serif" font-size="12"><text x="{0:.3}" y="{1:.3}" text-anchor="middle">beta</text><text x="14" y="{2:.3}" transform="rotate(-90 14 {2:.3})" text-anchor="middle">{label}</text>"#,
        (left + w - right) / 2.0,
        h - 12.0,
        (top + h - bottom) / 2.0
    );
    for (x, anchor, v) in [(left, "start", x_lo), (w - right, "end", x_hi)] {
        let _ = writeln!(svg, r#"<text x="{x:.3}" y="{:.3}" text-anchor="{anchor}">{v}</text>"#, h - bottom + 16.0);
    }
    for (y, v) in [(top + 4.0, y_hi), (h - bottom, y_lo)] {
        let _ = writeln!(svg, r#"<text x="{:.3}" y="{y:.3}" text-anchor="end">{v:.4}</text>"#, left - 4.0);
    }
    svg.push_str("</g>\n</svg>\n");
    svg
}
