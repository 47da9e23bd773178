//! Output files and their readers.

use multigof::studies::{AnovaDemo, PowerResult, Summary, Type1Table, RC_LABEL};
use multigof::TestReport;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::runtime(e.to_string())
}

fn unreadable(e: impl std::fmt::Display) -> CliError {
    CliError::unreadable(e.to_string())
}

pub fn write_rows<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(runtime)?;
    }
    let bytes = w.into_inner().map_err(runtime)?;
    String::from_utf8(bytes).map_err(runtime)
}

pub fn read_rows<T: DeserializeOwned>(text: &str) -> CliResult<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(unreadable)
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(runtime)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(unreadable)
}

/// One method of a test report; the combined test has no statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub statistic: Option<f64>,
    pub pvalue: f64,
}

pub fn report_rows(report: &TestReport) -> Vec<ReportRow> {
    let mut rows: Vec<ReportRow> = report
        .methods
        .iter()
        .map(|m| ReportRow {
            method: m.name().to_string(),
            statistic: report.statistics.get(m.name()).copied(),
            pvalue: report.pvalues[m.name()],
        })
        .collect();
    rows.push(ReportRow {
        method: RC_LABEL.to_string(),
        statistic: None,
        pvalue: report.rc,
    });
    rows
}

pub fn format_report(report: &TestReport, format: Format) -> CliResult<String> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => write_rows(&report_rows(report)),
    }
}

fn alpha_header(a: f64) -> String {
    format!("alpha={a}")
}

/// Type I error table: one row per cell, one rate column per alpha.
pub fn format_type1(table: &Type1Table) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["family".to_string(), "estimation".into(), "n".into()];
    header.extend(table.alphas.iter().map(|&a| alpha_header(a)));
    w.write_record(&header).map_err(runtime)?;
    for r in &table.rows {
        let mut rec = vec![
            r.family.name().to_string(),
            if r.estimated { "Estimated" } else { "Fixed" }.to_string(),
            r.n.to_string(),
        ];
        rec.extend(r.rates.iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(runtime)?;
    }
    String::from_utf8(w.into_inner().map_err(runtime)?).map_err(runtime)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Type1CsvRow {
    pub family: String,
    pub estimated: bool,
    pub n: usize,
    pub rates: Vec<f64>,
}

/// Parse [`format_type1`] output into the alpha levels and the rows.
pub fn read_type1(text: &str) -> CliResult<(Vec<f64>, Vec<Type1CsvRow>)> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(unreadable)?.clone();
    if header.len() < 4 || &header[0] != "family" || &header[1] != "estimation" || &header[2] != "n"
    {
        return Err(CliError::unreadable("not a type I error table"));
    }
    let alphas = header
        .iter()
        .skip(3)
        .map(|h| {
            h.strip_prefix("alpha=")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| CliError::unreadable(format!("bad column `{h}`")))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(unreadable)?;
        let num = |s: &str| s.parse::<f64>().map_err(unreadable);
        rows.push(Type1CsvRow {
            family: rec[0].to_string(),
            estimated: match &rec[1] {
                "Estimated" => true,
                "Fixed" => false,
                other => return Err(CliError::unreadable(format!("bad estimation `{other}`"))),
            },
            n: rec[2].parse().map_err(unreadable)?,
            rates: rec.iter().skip(3).map(num).collect::<CliResult<_>>()?,
        });
    }
    Ok((alphas, rows))
}

/// Rejection proportion of one method at one grid point and alpha.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub case: String,
    pub grid_index: usize,
    pub grid_value: f64,
    pub alpha: f64,
    pub method: String,
    pub power: f64,
    pub reps: usize,
}

pub fn power_rows(results: &[PowerResult]) -> Vec<PowerRow> {
    let mut rows = Vec::new();
    for r in results {
        for (ai, &alpha) in r.alphas.iter().enumerate() {
            for (gi, &g) in r.grid.iter().enumerate() {
                for (li, label) in r.labels.iter().enumerate() {
                    rows.push(PowerRow {
                        case: r.case.clone(),
                        grid_index: gi,
                        grid_value: g,
                        alpha,
                        method: label.clone(),
                        power: r.power[ai][gi][li],
                        reps: r.reps,
                    });
                }
            }
        }
    }
    rows
}

/// Case `ALL` carries the mean power over every case.
pub const ALL_CASES: &str = "ALL";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub case: String,
    pub alpha: f64,
    pub method: String,
    pub mean_power: f64,
    pub rank_best_first: Option<usize>,
    pub rank_worst_first: Option<usize>,
    pub gap_grid_value: Option<f64>,
    pub gap_power: Option<f64>,
    pub gap: Option<f64>,
}

pub fn summary_rows(summary: &Summary) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for c in &summary.cases {
        for (method, &mean_power) in &c.mean_power {
            rows.push(SummaryRow {
                case: c.case.clone(),
                alpha: summary.alpha,
                method: method.clone(),
                mean_power,
                rank_best_first: c.rank_best_first.get(method).copied(),
                rank_worst_first: c.rank_worst_first.get(method).copied(),
                gap_grid_value: c.gap.as_ref().map(|g| g.grid_value),
                gap_power: c.gap.as_ref().and_then(|g| g.power.get(method).copied()),
                gap: c.gap.as_ref().and_then(|g| g.gaps.get(method).copied()),
            });
        }
    }
    for (method, &mean_power) in &summary.mean_power {
        rows.push(SummaryRow {
            case: ALL_CASES.to_string(),
            alpha: summary.alpha,
            method: method.clone(),
            mean_power,
            rank_best_first: None,
            rank_worst_first: None,
            gap_grid_value: None,
            gap_power: None,
            gap: None,
        });
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoMinimaRow {
    pub rep: usize,
    pub raw: f64,
    pub adjusted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoCurveRow {
    pub p: f64,
    pub curve: f64,
    pub independent: f64,
    pub identity: f64,
}

pub fn demo_minima_rows(demo: &AnovaDemo) -> Vec<DemoMinimaRow> {
    demo.raw
        .iter()
        .zip(&demo.adjusted)
        .enumerate()
        .map(|(rep, (&raw, &adjusted))| DemoMinimaRow { rep, raw, adjusted })
        .collect()
}

pub fn demo_curve_rows(demo: &AnovaDemo) -> Vec<DemoCurveRow> {
    demo.curve
        .grid()
        .into_iter()
        .zip(demo.curve.values())
        .zip(demo.independent_overlay())
        .map(|((p, &curve), independent)| DemoCurveRow {
            p,
            curve,
            independent,
            identity: p,
        })
        .collect()
}
