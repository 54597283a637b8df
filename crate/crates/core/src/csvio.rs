//! CSV readers and writers for curves, simulation outputs and metric reports.
//!
//! Plain comma-separated, `\n` line ends, header row first. Times are written
//! with 9 significant digits, everything else in shortest round-trip form.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::analytic::{ResponseCurve, ResponseKind};
use crate::error::{Error, Result};
use crate::mcsim::EnsembleResult;
use crate::pipeline::{Summary, Table2Report};
use crate::scenario::round_sig;

const TIME_DIGITS: i32 = 9;

#[derive(Debug, Serialize, Deserialize)]
struct CurveRow {
    t: f64,
    value: f64,
    kind: ResponseKind,
}

#[derive(Debug, Serialize, Deserialize)]
struct CdfRow {
    t: f64,
    absorbed_fraction: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct HistogramRow {
    t_bin_start: f64,
    absorbed_count_per_molecule: f64,
}

/// One line of a metrics report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub example_id: String,
    pub rmse: f64,
    pub nmse: f64,
    pub nrmse: f64,
    pub n_samples: usize,
    pub seed: u64,
}

fn csv_err(label: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Csv {
        path: label.to_path_buf(),
        line,
        detail: e.to_string(),
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_rows<W: Write, T: Serialize>(w: W, rows: impl IntoIterator<Item = T>, label: &Path) -> Result<()> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    for row in rows {
        out.serialize(row).map_err(|e| csv_err(label, e))?;
    }
    out.flush().map_err(|e| io_err(label, e))
}

fn read_rows<R: Read, T: DeserializeOwned>(r: R, label: &Path, header: &[&str]) -> Result<Vec<T>> {
    let mut input = csv::ReaderBuilder::new().from_reader(r);
    let found = input.headers().map_err(|e| csv_err(label, e))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Csv {
            path: label.to_path_buf(),
            line: 1,
            detail: format!("expected header `{}`, found `{}`", header.join(","), found.iter().collect::<Vec<_>>().join(",")),
        });
    }
    input
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| csv_err(label, e))
}

fn time(t: f64) -> f64 {
    round_sig(t, TIME_DIGITS)
}

pub fn write_response_curve<W: Write>(w: W, c: &ResponseCurve) -> Result<()> {
    let rows = c.times.iter().zip(&c.values).map(|(&t, &value)| CurveRow {
        t: time(t),
        value,
        kind: c.kind,
    });
    write_rows(w, rows, Path::new("<response curve>"))
}

pub fn read_response_curve<R: Read>(r: R, label: &Path) -> Result<ResponseCurve> {
    let rows: Vec<CurveRow> = read_rows(r, label, &["t", "value", "kind"])?;
    let kind = rows.first().map(|r| r.kind).ok_or_else(|| Error::Csv {
        path: label.to_path_buf(),
        line: 2,
        detail: "no data rows".to_owned(),
    })?;
    if let Some(i) = rows.iter().position(|r| r.kind != kind) {
        return Err(Error::Csv {
            path: label.to_path_buf(),
            line: i + 2,
            detail: "mixed curve kinds".to_owned(),
        });
    }
    let (times, values) = rows.into_iter().map(|r| (r.t, r.value)).unzip();
    ResponseCurve::new(times, values, kind)
}

pub fn write_empirical_cdf<W: Write>(w: W, c: &ResponseCurve) -> Result<()> {
    let rows = c.times.iter().zip(&c.values).map(|(&t, &absorbed_fraction)| CdfRow {
        t: time(t),
        absorbed_fraction,
    });
    write_rows(w, rows, Path::new("<empirical cdf>"))
}

pub fn read_empirical_cdf<R: Read>(r: R, label: &Path) -> Result<ResponseCurve> {
    let rows: Vec<CdfRow> = read_rows(r, label, &["t", "absorbed_fraction"])?;
    let (times, values) = rows.into_iter().map(|r| (r.t, r.absorbed_fraction)).unzip();
    ResponseCurve::new(times, values, ResponseKind::ArrivalProbability)
}

pub fn write_rate_histogram<W: Write>(w: W, bins: &[(f64, f64)]) -> Result<()> {
    let rows = bins.iter().map(|&(start, v)| HistogramRow {
        t_bin_start: time(start),
        absorbed_count_per_molecule: v,
    });
    write_rows(w, rows, Path::new("<rate histogram>"))
}

pub fn read_rate_histogram<R: Read>(r: R, label: &Path) -> Result<Vec<(f64, f64)>> {
    let rows: Vec<HistogramRow> = read_rows(r, label, &["t_bin_start", "absorbed_count_per_molecule"])?;
    Ok(rows
        .into_iter()
        .map(|r| (r.t_bin_start, r.absorbed_count_per_molecule))
        .collect())
}

pub fn write_metrics<W: Write>(w: W, rows: &[MetricsRow]) -> Result<()> {
    write_rows(w, rows, Path::new("<metrics>"))
}

pub fn read_metrics<R: Read>(r: R, label: &Path) -> Result<Vec<MetricsRow>> {
    read_rows(r, label, &["example_id", "rmse", "nmse", "nrmse", "n_samples", "seed"])
}

/// One line of `table2.csv`; unavailable numbers are empty fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Record {
    pub example_id: u32,
    pub reynolds: f64,
    pub reynolds_ref: f64,
    pub peclet: f64,
    pub peclet_ref: f64,
    pub nrmse: Option<f64>,
    pub nrmse_ref: f64,
    pub rmse: Option<f64>,
    pub final_absorbed_fraction: Option<f64>,
    pub theory_at_horizon: Option<f64>,
    pub status: String,
}

const TABLE2_HEADER: [&str; 11] = [
    "example_id",
    "reynolds",
    "reynolds_ref",
    "peclet",
    "peclet_ref",
    "nrmse",
    "nrmse_ref",
    "rmse",
    "final_absorbed_fraction",
    "theory_at_horizon",
    "status",
];

pub fn write_table2<W: Write>(w: W, report: &Table2Report) -> Result<()> {
    let rows = report.rows.iter().map(|r| Table2Record {
        example_id: r.example_id,
        reynolds: r.reynolds,
        reynolds_ref: r.reynolds_ref,
        peclet: r.peclet,
        peclet_ref: r.peclet_ref,
        nrmse: r.scores.map(|s| s.nrmse),
        nrmse_ref: r.nrmse_ref,
        rmse: r.scores.map(|s| s.rmse),
        final_absorbed_fraction: r.final_absorbed_fraction,
        theory_at_horizon: r.theory_at_horizon,
        status: if r.passed() { "pass" } else { "fail" }.to_owned(),
    });
    write_rows(w, rows, Path::new("<table2>"))
}

pub fn read_table2<R: Read>(r: R, label: &Path) -> Result<Vec<Table2Record>> {
    read_rows(r, label, &TABLE2_HEADER)
}

/// One line of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub metric: String,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
}

/// `metric,min,max,mean,std` for each named summary.
pub fn write_summaries<W: Write>(w: W, summaries: &[(&str, Summary)]) -> Result<()> {
    let rows = summaries.iter().map(|(metric, s)| SummaryRecord {
        metric: (*metric).to_owned(),
        min: s.min,
        max: s.max,
        mean: s.mean,
        std: s.std,
    });
    write_rows(w, rows, Path::new("<summary>"))
}

pub fn read_summaries<R: Read>(r: R, label: &Path) -> Result<Vec<SummaryRecord>> {
    read_rows(r, label, &["metric", "min", "max", "mean", "std"])
}

/// Creates `path` and hands a buffered writer to `write`.
pub fn save<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    write(&mut w)?;
    w.flush().map_err(|e| io_err(path, e))
}

/// Opens `path` and hands it to `read` together with the path for messages.
pub fn load<T, F>(path: &Path, read: F) -> Result<T>
where
    F: FnOnce(File, &Path) -> Result<T>,
{
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    read(file, path)
}

/// `empirical_cdf.csv` and `rate_histogram.csv` in `dir`.
pub fn save_ensemble(dir: &Path, res: &EnsembleResult) -> Result<()> {
    save(&dir.join("empirical_cdf.csv"), |w| write_empirical_cdf(w, &res.empirical_cdf))?;
    save(&dir.join("rate_histogram.csv"), |w| write_rate_histogram(w, &res.rate_histogram))
}
