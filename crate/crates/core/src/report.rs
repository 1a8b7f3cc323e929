//! CSV and text serialisation of experiment results, bound reports and
//! Kaplan–Meier curves.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::km::KmEstimate;
use crate::sim::RegretCurve;

pub const REGRET_HEADER: &str = "period,policy,mean_cum_regret,stderr,trials";

/// Six significant digits, positional for magnitudes in `[1e-5, 1e6)` and
/// scientific otherwise. Zero prints
/// as `0.000000`.
pub fn format_sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_finite() { "0.000000".into() } else { format!("{v}") };
    }
    let sci = format!("{v:.5e}");
    let exp: i32 = sci.split_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if !(-5..=5).contains(&exp) {
        return sci;
    }
    let decimals = (5 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

/// One parsed data row of a regret CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretRow {
    pub period: u64,
    pub policy: String,
    pub mean_cum_regret: f64,
    pub stderr: f64,
    pub trials: u64,
}

pub fn format_regret_csv(curves: &BTreeMap<String, RegretCurve>) -> Result<String> {
    if curves.is_empty() {
        return Err(Error::params("no regret curves to write"));
    }
    let mut out = String::from(REGRET_HEADER);
    out.push('\n');
    for (policy, curve) in curves {
        let mut points = curve.points.clone();
        points.sort_by_key(|p| p.period);
        for p in points {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                p.period,
                policy,
                format_sig6(p.mean),
                format_sig6(p.stderr),
                p.trials
            );
        }
    }
    Ok(out)
}

pub fn emit_regret_csv(curves: &BTreeMap<String, RegretCurve>, path: &Path) -> Result<()> {
    let text = format_regret_csv(curves)?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn parse_regret_csv(text: &str) -> Result<Vec<RegretRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_error)?;
    if header.iter().collect::<Vec<_>>().join(",") != REGRET_HEADER {
        return Err(Error::params("regret CSV header mismatch"));
    }
    reader
        .records()
        .map(|record| {
            let record = record.map_err(csv_error)?;
            let bad = || Error::params(format!("malformed regret row {record:?}"));
            let field = |i: usize| record.get(i).ok_or_else(bad);
            Ok(RegretRow {
                period: field(0)?.parse().map_err(|_| bad())?,
                policy: field(1)?.to_string(),
                mean_cum_regret: field(2)?.parse().map_err(|_| bad())?,
                stderr: field(3)?.parse().map_err(|_| bad())?,
                trials: field(4)?.parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

fn csv_error(e: csv::Error) -> Error {
    Error::params(format!("CSV: {e}"))
}

pub fn format_bound_report(report: &BoundReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "L={}", report.l);
    let _ = writeln!(out, "T0={}", report.t0);
    let _ = writeln!(out, "C0={}", report.c0);
    let _ = writeln!(out, "theorem1_bound={}", report.theorem1_bound);
    out.push_str("t,epsilon_t\n");
    for (t, eps) in &report.widths {
        let _ = writeln!(out, "{t},{eps}");
    }
    out
}

pub fn emit_bound_report(report: &BoundReport, path: &Path) -> Result<()> {
    std::fs::write(path, format_bound_report(report))?;
    Ok(())
}

/// Read `sale,censored` rows; `censored=1` marks a stock-out period whose
/// demand was not observed.
pub fn parse_km_csv(text: &str) -> Result<KmEstimate> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_error)?;
    if header.len() != 2 || &header[0] != "sale" || &header[1] != "censored" {
        return Err(Error::params("KM CSV must start with header `sale,censored`"));
    }
    let pairs = reader
        .records()
        .map(|record| {
            let record = record.map_err(csv_error)?;
            let bad = || Error::params(format!("malformed KM row {record:?}"));
            let sale: f64 = record[0].parse().map_err(|_| bad())?;
            if !(sale.is_finite() && sale >= 0.0) {
                return Err(bad());
            }
            let uncensored = match &record[1] {
                "0" => true,
                "1" => false,
                _ => return Err(bad()),
            };
            Ok((sale, uncensored))
        })
        .collect::<Result<Vec<_>>>()?;
    KmEstimate::from_pairs(pairs)
}

/// The survival step function: one row per jump, giving the value from that
/// point until the next row. Survival is 1 before the first row.
pub fn format_km_csv(km: &KmEstimate) -> String {
    let mut out = String::from("x,survival\n");
    for (x, s) in km.breakpoints().iter().zip(km.survival_values()) {
        let _ = writeln!(out, "{x},{s}");
    }
    out
}
