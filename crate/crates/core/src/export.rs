//! Versioned CSV, JSON and SVG encodings of the computed results, and the
//! matching decoders.
//!
//! CSV uses `,` separators, `.` decimals and LF line endings. Every CSV
//! document starts with a `#schema=<name>/<version>` comment line.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bifurcation::SweepRow;
use crate::classify::StabilityClass;
use crate::energy::ExtendedEnergy;
use crate::equilibria::{EquilibriumBranch, Properness};
use crate::error::{Error, Result};
use crate::landscape::LandscapeGrid;
use crate::nsearch::MultistartReport;

pub const EQUILIBRIA_SCHEMA: &str = "equilibria/1";
pub const SWEEP_SCHEMA: &str = "sweep/1";
pub const LANDSCAPE_SCHEMA: &str = "landscape/1";
pub const SEARCH_SCHEMA: &str = "search/1";

pub const EQUILIBRIA_COLUMNS: [&str; 8] = [
    "branch",
    "gamma_star",
    "log_xi",
    "energy",
    "class",
    "properness",
    "underflow_gamma",
    "note",
];
pub const SWEEP_COLUMNS: [&str; 8] = [
    "s",
    "branch",
    "gamma",
    "energy",
    "class",
    "log_xi",
    "properness",
    "underflow_gamma",
];
pub const LANDSCAPE_COLUMNS: [&str; 4] = ["alpha", "beta", "gamma", "energy"];

/// 17 significant digits; positional for `1e-5 <= |x| < 1e16`, scientific
/// otherwise. Infinities print as `inf` / `-inf`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let a = x.abs();
    if (1e-5..1e16).contains(&a) {
        let exponent = a.log10().floor() as i32;
        let decimals = (16 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.16e}")
    }
}

fn format_energy(e: ExtendedEnergy) -> String {
    match e {
        ExtendedEnergy::Finite(v) => format_number(v),
        ExtendedEnergy::PositiveInfinity => "inf".into(),
    }
}

fn parse_number(field: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| Error::Decode(format!("not a number: {field:?}")))
}

fn parse_energy(field: &str) -> Result<ExtendedEnergy> {
    if field == "inf" {
        return Ok(ExtendedEnergy::PositiveInfinity);
    }
    let v = parse_number(field)?;
    if v.is_finite() {
        Ok(ExtendedEnergy::Finite(v))
    } else {
        Err(Error::Decode(format!("bad energy {field:?}")))
    }
}

fn csv_writer(buf: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(buf)
}

fn csv_document<F>(schema: &str, header: &[&str], body: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> csv::Result<()>,
{
    let mut buf = format!("#schema={schema}\n").into_bytes();
    {
        let mut w = csv_writer(&mut buf);
        w.write_record(header)
            .and_then(|_| body(&mut w))
            .and_then(|_| w.flush().map_err(csv::Error::from))
            .map_err(|e| Error::Decode(e.to_string()))?;
    }
    String::from_utf8(buf).map_err(|e| Error::Decode(e.to_string()))
}

fn opt_number(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

/// One row per equilibrium at a single `s`.
pub fn equilibria_csv(row: &SweepRow) -> Result<String> {
    csv_document(EQUILIBRIA_SCHEMA, &EQUILIBRIA_COLUMNS, |w| {
        for r in &row.records {
            w.write_record([
                r.branch.name().to_string(),
                format_number(r.gamma_star),
                opt_number(r.log_xi),
                format_energy(r.energy),
                r.class.name().to_string(),
                r.properness.name().to_string(),
                r.underflow_gamma.to_string(),
                r.note.clone().unwrap_or_default(),
            ])?;
        }
        Ok(())
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriaDocument {
    pub schema: String,
    #[serde(flatten)]
    pub row: SweepRow,
}

pub fn equilibria_json(row: &SweepRow) -> Result<String> {
    to_json(&EquilibriaDocument {
        schema: EQUILIBRIA_SCHEMA.into(),
        row: row.clone(),
    })
}

/// Long format: one line per `(s, branch)` that exists.
pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    csv_document(SWEEP_SCHEMA, &SWEEP_COLUMNS, |w| {
        for row in rows {
            for r in &row.records {
                w.write_record([
                    format_number(row.s),
                    r.branch.name().to_string(),
                    format_number(r.gamma_star),
                    format_energy(r.energy),
                    r.class.name().to_string(),
                    opt_number(r.log_xi),
                    r.properness.name().to_string(),
                    r.underflow_gamma.to_string(),
                ])?;
            }
        }
        Ok(())
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub schema: String,
    pub rows: Vec<SweepRow>,
}

pub fn sweep_json(rows: &[SweepRow]) -> Result<String> {
    to_json(&SweepDocument {
        schema: SWEEP_SCHEMA.into(),
        rows: rows.to_vec(),
    })
}

/// A decoded line of the long-format sweep CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCsvRecord {
    pub s: f64,
    pub branch: EquilibriumBranch,
    pub gamma: f64,
    pub energy: ExtendedEnergy,
    pub class: StabilityClass,
    pub log_xi: Option<f64>,
    pub properness: Properness,
    pub underflow_gamma: bool,
}

fn check_schema(text: &str, schema: &str) -> Result<()> {
    let first = text.lines().next().unwrap_or_default();
    match first.strip_prefix("#schema=") {
        Some(found) if found.trim_end_matches('\r') == schema => Ok(()),
        Some(found) => Err(Error::Decode(format!("expected schema {schema}, found {found}"))),
        None => Err(Error::Decode("missing #schema line".into())),
    }
}

/// Parses [`sweep_csv`] output.
pub fn decode_sweep_csv(text: &str) -> Result<Vec<SweepCsvRecord>> {
    check_schema(text, SWEEP_SCHEMA)?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Decode(e.to_string()))?;
    if header.iter().ne(SWEEP_COLUMNS.iter().copied()) {
        return Err(Error::Decode(format!("unexpected columns {header:?}")));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Decode(e.to_string()))?;
        let field = |k: usize| record.get(k).unwrap_or_default();
        let branch = EquilibriumBranch::from_name(field(1))
            .ok_or_else(|| Error::Decode(format!("unknown branch {:?}", field(1))))?;
        let class = StabilityClass::from_name(field(4))
            .ok_or_else(|| Error::Decode(format!("unknown class {:?}", field(4))))?;
        let properness = Properness::from_name(field(6))
            .ok_or_else(|| Error::Decode(format!("unknown properness {:?}", field(6))))?;
        let log_xi = match field(5) {
            "" => None,
            f => Some(parse_number(f)?),
        };
        let underflow_gamma = match field(7) {
            "true" => true,
            "false" => false,
            f => return Err(Error::Decode(format!("bad flag {f:?}"))),
        };
        out.push(SweepCsvRecord {
            s: parse_number(field(0))?,
            branch,
            gamma: parse_number(field(2))?,
            energy: parse_energy(field(3))?,
            class,
            log_xi,
            properness,
            underflow_gamma,
        });
    }
    Ok(out)
}

/// Unmasked cells only, row-major.
pub fn landscape_csv(grid: &LandscapeGrid) -> Result<String> {
    csv_document(LANDSCAPE_SCHEMA, &LANDSCAPE_COLUMNS, |w| {
        for p in grid.points() {
            w.write_record([
                format_number(p.alpha),
                format_number(p.beta),
                format_number(p.gamma),
                format_energy(p.energy),
            ])?;
        }
        Ok(())
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeDocument {
    pub schema: String,
    #[serde(flatten)]
    pub grid: LandscapeGrid,
}

pub fn landscape_json(grid: &LandscapeGrid) -> Result<String> {
    to_json(&LandscapeDocument {
        schema: LANDSCAPE_SCHEMA.into(),
        grid: grid.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchDocument {
    pub schema: String,
    #[serde(flatten)]
    pub report: MultistartReport,
    /// Present when some descent runs did not converge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

pub fn search_json(report: &MultistartReport) -> Result<String> {
    let warning = (!report.failures.is_empty()).then(|| {
        format!(
            "{} of {} descent runs did not converge; results are partial",
            report.failures.len(),
            report.starts
        )
    });
    to_json(&SearchDocument {
        schema: SEARCH_SCHEMA.into(),
        report: report.clone(),
        warning,
    })
}

/// Parses [`search_json`] output.
pub fn decode_search_json(text: &str) -> Result<SearchDocument> {
    let doc: SearchDocument =
        serde_json::from_str(text).map_err(|e| Error::Decode(e.to_string()))?;
    if doc.schema != SEARCH_SCHEMA {
        return Err(Error::Decode(format!(
            "expected schema {SEARCH_SCHEMA}, found {}",
            doc.schema
        )));
    }
    Ok(doc)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Decode(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn class_color(c: StabilityClass) -> &'static str {
    match c {
        StabilityClass::AbsoluteMin => "#d62728",
        StabilityClass::RelativeMin => "#e6b400",
        StabilityClass::Saddle => "#2ca02c",
        StabilityClass::RelativeMax => "#17a2a2",
        StabilityClass::AbsoluteMax => "#1f4fd6",
        StabilityClass::InfiniteEnergy => "#888888",
    }
}

/// Static plot of `gamma` against `s`, one polyline per run of equal class
/// along each branch.
pub fn sweep_svg(rows: &[SweepRow]) -> String {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    const M: f64 = 50.0;
    let (s_lo, s_hi) = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) if b.s > a.s => (a.s, b.s),
        _ => (0.0, 1.0),
    };
    let x = |s: f64| M + (s - s_lo) / (s_hi - s_lo) * (W - 2.0 * M);
    let y = |g: f64| H - M - g / std::f64::consts::PI * (H - 2.0 * M);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(out, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        out,
        "<path d=\"M{M} {M} V{} H{}\" stroke=\"black\" fill=\"none\"/>",
        H - M,
        W - M
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">s</text>",
        W / 2.0,
        H - 12.0
    );
    let _ = writeln!(out, "<text x=\"14\" y=\"{}\" font-size=\"14\">gamma</text>", H / 2.0);
    for (s, anchor) in [(s_lo, "start"), (s_hi, "end")] {
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{}\" font-size=\"12\" text-anchor=\"{anchor}\">{}</text>",
            x(s),
            H - M + 16.0,
            format_number(s)
        );
    }
    for branch in EquilibriumBranch::ALL {
        let mut run: Vec<(f64, f64)> = Vec::new();
        let mut run_class: Option<StabilityClass> = None;
        let flush = |run: &mut Vec<(f64, f64)>, class: Option<StabilityClass>, out: &mut String| {
            if let (Some(c), false) = (class, run.is_empty()) {
                let pts: Vec<String> = run.iter().map(|(a, b)| format!("{a:.2},{b:.2}")).collect();
                let _ = writeln!(
                    out,
                    "<polyline class=\"{}\" data-branch=\"{}\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>",
                    c.name(),
                    branch.name(),
                    pts.join(" "),
                    class_color(c)
                );
            }
            run.clear();
        };
        for row in rows {
            match row.record(branch) {
                Some(r) if r.gamma_star.is_finite() => {
                    if run_class != Some(r.class) {
                        flush(&mut run, run_class, &mut out);
                        run_class = Some(r.class);
                    }
                    run.push((x(row.s), y(r.gamma_star)));
                }
                _ => {
                    flush(&mut run, run_class, &mut out);
                    run_class = None;
                }
            }
        }
        flush(&mut run, run_class, &mut out);
    }
    for (k, c) in StabilityClass::ALL.iter().enumerate() {
        let ly = M + 16.0 * k as f64;
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{}\" stroke-width=\"3\"/>",
            W - M - 150.0,
            W - M - 130.0,
            class_color(*c)
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>",
            W - M - 125.0,
            ly + 4.0,
            c.name()
        );
    }
    out.push_str("</svg>\n");
    out
}
