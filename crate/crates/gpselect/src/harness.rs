//! Experiment orchestration: the point-set text format, CSV emission,
//! registered scaling experiments, and log-log exponent fits.
//!
//! Every experiment is deterministic given its pinned size ladder and seed
//! list; re-running one reproduces identical CSV bytes. Wall-clock timings
//! are kept in the in-memory records but deliberately left out of the CSV
//! so the byte-reproducibility contract holds.

use crate::detectors::{self, count_descending_pairs};
use crate::generators::{self, SeededSampler};
use crate::geometry::{parse_coord, Point, PointSet};
use crate::selectors;
use crate::{Error, Result};
use num_rational::Ratio;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::time::Instant;

/// A parameter or measurement value carried by an [`ExperimentRecord`].
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(u64),
    Rational(Ratio<i64>),
    Real(f64),
}

impl Value {
    pub fn as_f64(&self) -> f64 {
        match self {
            Value::Int(v) => *v as f64,
            Value::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Real(v) => *v,
        }
    }

    /// CSV cell rendering: integers plainly, non-integers as decimals with
    /// 12 significant digits.
    fn render(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Rational(r) if r.is_integer() => r.numer().to_string(),
            other => format!("{:.11e}", other.as_f64()),
        }
    }
}

/// One row of a scaling experiment. The seed always rides along in
/// `params`, so any record can be reproduced exactly.
#[derive(Clone, Debug)]
pub struct ExperimentRecord {
    pub experiment_id: String,
    pub n: u64,
    pub s: u64,
    pub params: BTreeMap<String, Value>,
    pub measured: BTreeMap<String, Value>,
}

impl ExperimentRecord {
    fn new(experiment_id: &str, n: u64, s: u64) -> Self {
        ExperimentRecord {
            experiment_id: experiment_id.to_string(),
            n,
            s,
            params: BTreeMap::new(),
            measured: BTreeMap::new(),
        }
    }

    fn param(mut self, key: &str, value: Value) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn measure(mut self, key: &str, value: Value) -> Self {
        self.measured.insert(key.to_string(), value);
        self
    }
}

/// Fixed CSV schema; parameter and measurement names map onto these
/// columns, absent entries stay empty.
pub const CSV_COLUMNS: [&str; 14] = [
    "experiment_id",
    "n",
    "s",
    "alpha",
    "x",
    "prob",
    "c",
    "seed",
    "set_size",
    "subset_size",
    "triples",
    "trapezoids",
    "descending_pairs",
    "colors_used",
];

const PARAM_COLUMNS: [&str; 5] = ["alpha", "x", "prob", "c", "seed"];
const MEASURE_COLUMNS: [&str; 6] = [
    "set_size",
    "subset_size",
    "triples",
    "trapezoids",
    "descending_pairs",
    "colors_used",
];

/// Writes records with the fixed header row. Emission order follows the
/// record order, so identical runs produce identical bytes.
pub fn write_csv<W: std::io::Write>(records: &[ExperimentRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_COLUMNS)
        .map_err(|e| Error::Io(e.to_string()))?;
    for r in records {
        let mut row: Vec<String> = vec![
            r.experiment_id.clone(),
            r.n.to_string(),
            r.s.to_string(),
        ];
        for col in PARAM_COLUMNS {
            row.push(r.params.get(col).map(Value::render).unwrap_or_default());
        }
        for col in MEASURE_COLUMNS {
            row.push(r.measured.get(col).map(Value::render).unwrap_or_default());
        }
        w.write_record(&row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

pub fn write_csv_file(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(records, file)
}

/// Parses the point-set text format: one point per line as two
/// whitespace-separated fields (integer or `p/q`), `#` lines ignored.
pub fn parse_point_set(text: &str) -> Result<PointSet> {
    let mut points: Vec<Point> = Vec::new();
    let mut seen: std::collections::HashSet<Point> = std::collections::HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected two fields, found {}", fields.len()),
            });
        }
        let x = parse_coord(fields[0]).map_err(|msg| Error::Parse { line: line_no, msg })?;
        let y = parse_coord(fields[1]).map_err(|msg| Error::Parse { line: line_no, msg })?;
        let p = Point::new(x, y);
        if !seen.insert(p.clone()) {
            return Err(Error::DuplicatePoint { line: Some(line_no) });
        }
        points.push(p);
    }
    PointSet::new(points)
}

pub fn read_point_set(path: &Path) -> Result<PointSet> {
    let file = std::fs::File::open(path)?;
    let mut text = String::new();
    BufReader::new(file).read_to_string(&mut text)?;
    parse_point_set(&text)
}

use std::io::Read;

/// Writes the set in the text format; integer coordinates round-trip
/// losslessly, rationals as `p/q`.
pub fn write_point_set<W: Write>(set: &PointSet, mut writer: W) -> Result<()> {
    for p in set {
        writeln!(writer, "{p}")?;
    }
    Ok(())
}

pub fn write_point_set_file(set: &PointSet, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_point_set(set, file)
}

/// Least-squares power-law fit on log-log axes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fits `value ~ exp(intercept) * n^slope` by least squares over
/// `(ln n, ln value)`. Refuses series with fewer than 3 points or
/// non-positive entries.
pub fn fit_exponent(series: &[(f64, f64)]) -> Result<FitResult> {
    if series.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "exponent fit needs at least 3 points, got {}",
            series.len()
        )));
    }
    if series.iter().any(|&(n, v)| n <= 0.0 || v <= 0.0) {
        return Err(Error::InvalidParameter(
            "exponent fit needs positive sizes and values".into(),
        ));
    }
    let logs: Vec<(f64, f64)> = series.iter().map(|&(n, v)| (n.ln(), v.ln())).collect();
    let m = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    let denom = m * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(Error::InvalidParameter(
            "exponent fit needs at least two distinct sizes".into(),
        ));
    }
    let slope = (m * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / m;
    let mean_y = sy / m;
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = logs
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
    })
}

/// Registered experiment ids.
pub const EXPERIMENTS: [&str; 8] = [
    "triple-count-scaling",
    "trapezoid-count-scaling",
    "st-profile",
    "annulus-scaling",
    "monotone-gp-grid",
    "distinct-slopes-grid",
    "coloring-grid",
    "jarnik-scaling",
];

const GRID_COUNT_LADDER: [i64; 3] = [16, 32, 64];
const ST_PROFILE_LADDER: [i64; 4] = [16, 32, 64, 128];
const ANNULUS_LADDER: [i64; 5] = [32, 64, 128, 256, 512];
const SLOPES_LADDER: [i64; 4] = [16, 32, 64, 128];
const COLORING_LADDER: [i64; 3] = [16, 64, 144];
const JARNIK_LADDER: [i64; 6] = [32, 64, 128, 256, 512, 1024];
const MONOTONE_GP_SEEDS: u64 = 10;
const SLOPES_SEEDS: u64 = 20;

/// Runs a registered experiment and returns one record per (size, seed)
/// cell, in ladder order.
pub fn run_experiment(id: &str) -> Result<Vec<ExperimentRecord>> {
    match id {
        "triple-count-scaling" => grid_count_experiment(id, false),
        "trapezoid-count-scaling" => grid_count_experiment(id, true),
        "st-profile" => st_profile_experiment(id),
        "annulus-scaling" => annulus_scaling_experiment(id),
        "monotone-gp-grid" => monotone_gp_experiment(id),
        "distinct-slopes-grid" => distinct_slopes_experiment(id),
        "coloring-grid" => coloring_experiment(id),
        "jarnik-scaling" => jarnik_experiment(id),
        other => Err(Error::UnknownExperiment(other.to_string())),
    }
}

fn elapsed_record(record: ExperimentRecord, start: Instant) -> ExperimentRecord {
    record.measure(
        "elapsed_ms",
        Value::Real(start.elapsed().as_secs_f64() * 1e3),
    )
}

fn grid_count_experiment(id: &str, with_trapezoids: bool) -> Result<Vec<ExperimentRecord>> {
    GRID_COUNT_LADDER
        .into_iter()
        .map(|m| {
            let start = Instant::now();
            let g = generators::grid(m, m)?;
            let stats = detectors::line_statistics(&g)?;
            let mut rec = ExperimentRecord::new(id, g.len() as u64, stats.s_max() as u64)
                .param("seed", Value::Int(0))
                .measure("set_size", Value::Int(g.len() as u64))
                .measure("triples", Value::Int(stats.tuples(3)));
            if with_trapezoids {
                rec = rec.measure("trapezoids", Value::Int(detectors::count_trapezoids(&g)?));
            }
            Ok(elapsed_record(rec, start))
        })
        .collect()
}

fn st_profile_experiment(id: &str) -> Result<Vec<ExperimentRecord>> {
    ST_PROFILE_LADDER
        .into_iter()
        .map(|m| {
            let start = Instant::now();
            let g = generators::grid(m, m)?;
            let stats = detectors::line_statistics(&g)?;
            let n = g.len() as f64;
            let max_ratio = stats
                .b()
                .iter()
                .map(|(&i, &b_i)| {
                    let i = i as f64;
                    b_i as f64 / (n * n / (i * i * i) + n / i)
                })
                .fold(0.0f64, f64::max);
            let rec = ExperimentRecord::new(id, g.len() as u64, stats.s_max() as u64)
                .param("seed", Value::Int(0))
                .measure("set_size", Value::Int(g.len() as u64))
                .measure("triples", Value::Real(max_ratio));
            Ok(elapsed_record(rec, start))
        })
        .collect()
}

fn annulus_scaling_experiment(id: &str) -> Result<Vec<ExperimentRecord>> {
    let cells: Vec<i64> = ANNULUS_LADDER.to_vec();
    let results: Vec<Result<ExperimentRecord>> = cells
        .par_iter()
        .map(|&m| {
            let start = Instant::now();
            let x = selectors::annulus_width(m);
            let sector = generators::annulus_sector(m, x)?;
            let grid_points = ((2 * m + 1) * (2 * m + 1)) as u64;
            let stats = detectors::line_statistics(&sector)?;
            let rec = ExperimentRecord::new(id, grid_points, stats.s_max() as u64)
                .param("x", Value::Rational(x))
                .param("seed", Value::Int(0))
                .measure("set_size", Value::Int(sector.len() as u64))
                .measure("triples", Value::Int(stats.tuples(3)))
                .measure(
                    "descending_pairs",
                    Value::Int(count_descending_pairs(&sector)),
                );
            Ok(elapsed_record(rec, start))
        })
        .collect();
    results.into_iter().collect()
}

fn monotone_gp_experiment(id: &str) -> Result<Vec<ExperimentRecord>> {
    let mut cells: Vec<(i64, u64)> = Vec::new();
    for m in ANNULUS_LADDER {
        for seed in 0..MONOTONE_GP_SEEDS {
            cells.push((m, seed));
        }
    }
    let results: Vec<Result<ExperimentRecord>> = cells
        .par_iter()
        .map(|&(m, seed)| {
            let start = Instant::now();
            let r = selectors::annulus_monotone_gp(m, seed)?;
            let grid_points = ((2 * m + 1) * (2 * m + 1)) as u64;
            let rate = selectors::annulus_rate(m);
            let rec = ExperimentRecord::new(id, grid_points, 2 * m as u64 + 1)
                .param("x", Value::Rational(selectors::annulus_width(m)))
                .param(
                    "prob",
                    Value::Real(*rate.numer() as f64 / *rate.denom() as f64),
                )
                .param("c", Value::Real(selectors::ANNULUS_RETENTION_C))
                .param("seed", Value::Int(seed))
                .measure("subset_size", Value::Int(r.chosen.len() as u64));
            Ok(elapsed_record(rec, start))
        })
        .collect();
    results.into_iter().collect()
}

fn distinct_slopes_experiment(id: &str) -> Result<Vec<ExperimentRecord>> {
    let mut out = Vec::new();
    for m in SLOPES_LADDER {
        let g = generators::grid(m, m)?;
        let stats = detectors::line_statistics(&g)?;
        let rate = selectors::slopes_rate(g.len(), stats.s_max());
        let cells: Vec<u64> = (0..SLOPES_SEEDS).collect();
        let records: Vec<Result<ExperimentRecord>> = cells
            .par_iter()
            .map(|&seed| {
                let start = Instant::now();
                let r = selectors::distinct_slopes_select(&g, seed)?;
                let rec = ExperimentRecord::new(id, g.len() as u64, stats.s_max() as u64)
                    .param(
                        "prob",
                        Value::Real(*rate.numer() as f64 / *rate.denom() as f64),
                    )
                    .param("c", Value::Real(selectors::SLOPES_RETENTION_C))
                    .param("seed", Value::Int(seed))
                    .measure("subset_size", Value::Int(r.chosen.len() as u64));
                Ok(elapsed_record(rec, start))
            })
            .collect();
        for r in records {
            out.push(r?);
        }
    }
    Ok(out)
}

fn coloring_experiment(id: &str) -> Result<Vec<ExperimentRecord>> {
    COLORING_LADDER
        .into_iter()
        .map(|m| {
            let start = Instant::now();
            let g = generators::grid(m, m)?;
            let coloring = selectors::gp_coloring(&g)?;
            let rec = ExperimentRecord::new(id, g.len() as u64, m as u64)
                .param("seed", Value::Int(0))
                .measure("colors_used", Value::Int(coloring.colors_used as u64));
            Ok(elapsed_record(rec, start))
        })
        .collect()
}

fn jarnik_experiment(id: &str) -> Result<Vec<ExperimentRecord>> {
    JARNIK_LADDER
        .into_iter()
        .map(|m| {
            let start = Instant::now();
            let arc = generators::jarnik_arc(m)?;
            let rec = ExperimentRecord::new(id, (m * m) as u64, 2)
                .param("seed", Value::Int(0))
                .measure("set_size", Value::Int(arc.len() as u64));
            Ok(elapsed_record(rec, start))
        })
        .collect()
}

/// Reads `(x_col, y_col)` pairs from a CSV produced by [`write_csv`];
/// `mean` averages y over rows sharing an x.
pub fn fit_from_csv(path: &Path, x_col: &str, y_col: &str, mean: bool) -> Result<FitResult> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Io(e.to_string()))?
        .clone();
    let xi = headers
        .iter()
        .position(|h| h == x_col)
        .ok_or_else(|| Error::InvalidParameter(format!("no column named {x_col:?}")))?;
    let yi = headers
        .iter()
        .position(|h| h == y_col)
        .ok_or_else(|| Error::InvalidParameter(format!("no column named {y_col:?}")))?;
    let mut series: Vec<(f64, f64)> = Vec::new();
    for (row_idx, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::Io(e.to_string()))?;
        let xs = row.get(xi).unwrap_or("");
        let ys = row.get(yi).unwrap_or("");
        if xs.is_empty() || ys.is_empty() {
            continue;
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| Error::Parse {
                line: row_idx + 2,
                msg: format!("bad number {s:?}"),
            })
        };
        series.push((parse(xs)?, parse(ys)?));
    }
    if mean {
        let mut grouped: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
        for (x, y) in &series {
            let e = grouped.entry(x.to_bits()).or_insert((0.0, 0.0));
            e.0 += y;
            e.1 += 1.0;
        }
        series = grouped
            .into_iter()
            .map(|(bits, (sum, cnt))| (f64::from_bits(bits), sum / cnt))
            .collect();
        series.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    }
    fit_exponent(&series)
}
