//! Persistent result formats. Every run writes its tables plus a summary
//! and a manifest of content hashes.
//!
//! All files of one output directory go through a single [`write_outputs`]
//! call, after every computation has finished, so concurrent jobs never
//! race on the filesystem. Numbers are written in their shortest
//! round-tripping form and rows keep the order in which they were
//! produced, which makes reruns byte-identical.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::scalar::Real;

/// Name under which the tool reports itself.
pub const TOOL_NAME: &str = "rotgn";
/// Version recorded in every summary and manifest.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// File name of the structured summary.
pub const SUMMARY_FILE: &str = "summary.json";
/// File name of the manifest.
pub const MANIFEST_FILE: &str = "manifest.json";

/// Layout of a numeric table on disk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    /// Comma-separated with a header row.
    Csv,
    /// Whitespace-separated columns behind a `#` header line, readable by
    /// gnuplot.
    Columns,
}

/// A numeric table destined for one file.
#[derive(Clone, Debug)]
pub struct DataTable {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub format: TableFormat,
}

impl DataTable {
    pub fn csv(file: impl Into<String>, header: &[&str]) -> Self {
        Self {
            file: file.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            format: TableFormat::Csv,
        }
    }

    pub fn columns(file: impl Into<String>, header: &[&str]) -> Self {
        Self {
            format: TableFormat::Columns,
            ..Self::csv(file, header)
        }
    }

    /// Appends a row; panics when its width differs from the header.
    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header of {}", self.file);
        self.rows.push(row);
    }
}

/// Everything one command produces.
#[derive(Clone, Debug, Default)]
pub struct Report {
    /// Subcommand that produced the report.
    pub command: String,
    pub config: Option<ExperimentConfig>,
    /// Seed passed on the command line; the pipeline itself is
    /// deterministic and does not consume it.
    pub seed: Option<u64>,
    /// Structured results echoed in `summary.json`.
    pub results: serde_json::Value,
    pub tables: Vec<DataTable>,
}

/// Contents of `summary.json`.
#[derive(Serialize)]
struct Summary<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: Option<u64>,
    config: Option<&'a ExperimentConfig>,
    results: &'a serde_json::Value,
}

/// One file listed in the manifest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    /// Path relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Every file written for a report, in write order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub files: Vec<ManifestEntry>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Hex SHA-256 digest of a file.
pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn render_table(table: &DataTable) -> Result<Vec<u8>> {
    match table.format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let ser = |e: csv::Error| Error::Serialization(format!("{}: {e}", table.file));
            w.write_record(&table.header).map_err(ser)?;
            for row in &table.rows {
                w.write_record(row.iter().map(|x| format!("{x:?}"))).map_err(ser)?;
            }
            w.into_inner()
                .map_err(|e| Error::Serialization(format!("{}: {e}", table.file)))
        }
        TableFormat::Columns => {
            let mut out = format!("# {}\n", table.header.join(" "));
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
                out.push_str(&cells.join(" "));
                out.push('\n');
            }
            Ok(out.into_bytes())
        }
    }
}

fn write_file(dir: &Path, name: &str, bytes: &[u8], files: &mut Vec<ManifestEntry>) -> Result<()> {
    let path = dir.join(name);
    let mut f = fs::File::create(&path).map_err(io_err(&path))?;
    f.write_all(bytes).map_err(io_err(&path))?;
    f.sync_all().map_err(io_err(&path))?;
    files.push(ManifestEntry {
        path: name.to_string(),
        sha256: hex::encode(Sha256::digest(bytes)),
        bytes: bytes.len() as u64,
    });
    Ok(())
}

/// Writes the report's tables followed by the summary and manifest into
/// `dir`, creating it when needed. The returned manifest lists every file
/// except the manifest itself.
pub fn write_outputs(report: &Report, dir: &Path) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut files = Vec::new();
    for table in &report.tables {
        if table.file == SUMMARY_FILE || table.file == MANIFEST_FILE || table.file.contains(['/', '\\']) {
            return Err(Error::Serialization(format!("invalid table file name {}", table.file)));
        }
        write_file(dir, &table.file, &render_table(table)?, &mut files)?;
    }
    let summary = Summary {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        command: &report.command,
        seed: report.seed,
        config: report.config.as_ref(),
        results: &report.results,
    };
    let mut json = serde_json::to_vec_pretty(&summary).map_err(|e| Error::Serialization(e.to_string()))?;
    json.push(b'\n');
    write_file(dir, SUMMARY_FILE, &json, &mut files)?;
    let manifest = Manifest {
        tool: TOOL_NAME.to_string(),
        version: TOOL_VERSION.to_string(),
        files,
    };
    let mut json = serde_json::to_vec_pretty(&manifest).map_err(|e| Error::Serialization(e.to_string()))?;
    json.push(b'\n');
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, json).map_err(io_err(&path))?;
    Ok(manifest)
}

/// Reads a profile written as `x,value` rows, one per grid point.
pub fn read_profile<T: Real>(path: &Path, grid: &Arc<Grid<T>>) -> Result<Field<T>> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let bad = |msg: String| Error::Domain(format!("{}: {msg}", path.display()));
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.len() != 2 || &header[0] != "x" || &header[1] != "value" {
        return Err(bad("expected the header `x,value`".into()));
    }
    let points = grid.points();
    let tol = 1e-6 * grid.length().as_f64();
    let mut values = Vec::with_capacity(grid.n());
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let row = i + 2;
        let parse = |j: usize| -> Result<f64> {
            record[j]
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("line {row}: `{}` is not a finite number", &record[j])))
        };
        let (x, v) = (parse(0)?, parse(1)?);
        if let Some(xi) = points.get(i) {
            if (x - xi.as_f64()).abs() > tol {
                return Err(bad(format!("line {row}: x = {x} does not match grid point {}", xi.as_f64())));
            }
        }
        values.push(T::lit(v));
    }
    if values.len() != grid.n() {
        return Err(bad(format!("{} samples for a grid of {} points", values.len(), grid.n())));
    }
    Field::from_values(grid, values)
}

/// Appends `field` as `(x, value)` rows.
pub fn field_rows<T: Real>(field: &Field<T>) -> Vec<Vec<f64>> {
    field
        .grid()
        .points()
        .iter()
        .zip(field.values())
        .map(|(x, v)| vec![x.as_f64(), v.as_f64()])
        .collect()
}

/// Default output directory when neither the command line nor the
/// configuration names one.
pub fn default_dir(config: Option<&ExperimentConfig>) -> PathBuf {
    config.map(|c| c.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"))
}
