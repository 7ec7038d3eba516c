//! Seed aggregation and CSV emission.
//!
//! Floats are written as `{:.16e}`, 17 significant digits, which parse
//! back to the identical `f64`. Missing values (censored times, undefined
//! standard errors) are empty cells.

use std::cmp::Ordering;
use std::path::Path;

use scalinglab_core::predictor::{MinTime, TradeoffCurve};

use crate::error::{HarnessError, Result};

/// Pointwise mean and standard error over seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSeries {
    pub x: Vec<f64>,
    pub mean: Vec<f64>,
    /// Sample standard deviation over `√n_seeds`; 0 for a single seed.
    pub std_err: Vec<f64>,
    pub label: String,
}

/// One seed's values on its x-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedSeries {
    pub seed: u64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Values at each x are sorted before summing, so the result does not
/// depend on the order of `per_seed`.
pub fn aggregate_seeds(per_seed: &[SeedSeries], grid: &[f64], label: &str) -> Result<AggregateSeries> {
    let mismatch = |reason: String| HarnessError::MismatchedGrid { label: label.to_string(), reason };
    if per_seed.is_empty() {
        return Err(mismatch("no seeds".into()));
    }
    for s in per_seed {
        if s.x.len() != grid.len() || s.y.len() != grid.len() {
            return Err(mismatch(format!("seed {} has {} points, grid has {}", s.seed, s.y.len(), grid.len())));
        }
        if s.x.iter().zip(grid).any(|(a, b)| a.to_bits() != b.to_bits()) {
            return Err(mismatch(format!("seed {} uses a different x-grid", s.seed)));
        }
    }
    let n = per_seed.len() as f64;
    let mut mean = Vec::with_capacity(grid.len());
    let mut std_err = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let mut values: Vec<f64> = per_seed.iter().map(|s| s.y[i]).collect();
        values.sort_by(f64::total_cmp);
        let m = values.iter().sum::<f64>() / n;
        let se = if per_seed.len() > 1 {
            let mut dev: Vec<f64> = values.iter().map(|v| (v - m) * (v - m)).collect();
            dev.sort_by(f64::total_cmp);
            (dev.iter().sum::<f64>() / (n - 1.0) / n).sqrt()
        } else {
            0.0
        };
        mean.push(m);
        std_err.push(se);
    }
    Ok(AggregateSeries { x: grid.to_vec(), mean, std_err, label: label.to_string() })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Float)
    }

    fn render(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn cmp_key(&self, other: &Cell) -> Ordering {
        use Cell::*;
        match (self, other) {
            (Float(a), Float(b)) => a.total_cmp(b),
            (Int(a), Int(b)) => a.cmp(b),
            (Int(a), Float(b)) => (*a as f64).total_cmp(b),
            (Float(a), Int(b)) => a.total_cmp(&(*b as f64)),
            (Text(a), Text(b)) => a.cmp(b),
            (Empty, Empty) => Ordering::Equal,
            (Empty, _) => Ordering::Greater,
            (_, Empty) => Ordering::Less,
            (Text(_), _) => Ordering::Greater,
            (_, Text(_)) => Ordering::Less,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// A header and rows. Rows are written sorted lexicographically by their
/// cells, so the leading columns act as the x key.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn sorted_rows(&self) -> Vec<&Vec<Cell>> {
        let mut rows: Vec<&Vec<Cell>> = self.rows.iter().collect();
        rows.sort_by(|a, b| a.iter().zip(b.iter()).map(|(x, y)| x.cmp_key(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal));
        rows
    }
}

pub fn emit_csv(table: &CsvTable, path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    w.write_record(&table.header)?;
    for row in table.sorted_rows() {
        w.write_record(row.iter().map(Cell::render))?;
    }
    w.flush().map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
    Ok(())
}

pub fn series_table(series: &AggregateSeries) -> CsvTable {
    let mut t = CsvTable::new(&["x", "mean", "std_err"]);
    for i in 0..series.x.len() {
        t.push(vec![series.x[i].into(), series.mean[i].into(), series.std_err[i].into()]);
    }
    t
}

/// Columns `scale,min_time,std_err,censored`; `censored` counts the seeds
/// that never reached the threshold.
pub fn tradeoff_table(curve: &TradeoffCurve) -> CsvTable {
    let mut t = CsvTable::new(&["scale", "min_time", "std_err", "censored"]);
    for i in 0..curve.scales.len() {
        t.push(vec![
            curve.scales[i].into(),
            Cell::opt(curve.min_times[i].value()),
            Cell::opt(curve.std_err[i]),
            curve.n_censored[i].into(),
        ]);
    }
    t
}

pub fn min_time_cell(t: MinTime) -> Cell {
    Cell::opt(t.value())
}

/// Reads an emitted file back as header plus string rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<_, _>>()?;
    Ok((header, rows))
}

/// Parses a cell written by [`emit_csv`]; empty cells are `None`.
pub fn parse_cell(s: &str) -> Option<f64> {
    if s.is_empty() {
        None
    } else {
        s.parse().ok()
    }
}
