use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::snapshot::Snapshot;

/// Column order of `series.csv`.
pub const SERIES_COLUMNS: [&str; 17] = [
    "t", "tau", "E_N", "D_N", "E_N^h", "D_N^h", "int1", "int2", "int3", "gauss_E", "gauss_B",
    "norm_rho", "norm_u", "norm_E", "norm_B", "ratio_full", "ratio_high",
];

/// One observation of an `evolve` run. Energy columns are NaN when the
/// functionals were not evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t: f64,
    pub tau: f64,
    pub e_full: f64,
    pub d_full: f64,
    pub e_high: f64,
    pub d_high: f64,
    pub interactive: [f64; 3],
    pub gauss_e: f64,
    pub gauss_b: f64,
    /// `||n - n_st||`, `||u||`, `||E - E_st||`, `||B||`
    pub norms: [f64; 4],
    pub ratio_full: f64,
    pub ratio_high: f64,
}

impl SeriesRow {
    pub fn values(&self) -> [f64; 17] {
        let [i1, i2, i3] = self.interactive;
        let [a, b, c, d] = self.norms;
        [
            self.t, self.tau, self.e_full, self.d_full, self.e_high, self.d_high, i1, i2, i3,
            self.gauss_e, self.gauss_b, a, b, c, d, self.ratio_full, self.ratio_high,
        ]
    }

    pub fn from_values(v: &[f64; 17]) -> Self {
        Self {
            t: v[0],
            tau: v[1],
            e_full: v[2],
            d_full: v[3],
            e_high: v[4],
            d_high: v[5],
            interactive: [v[6], v[7], v[8]],
            gauss_e: v[9],
            gauss_b: v[10],
            norms: [v[11], v[12], v[13], v[14]],
            ratio_full: v[15],
            ratio_high: v[16],
        }
    }
}

/// 17 significant digits, enough to round-trip every f64.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write `contents` next to `path` and rename it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// CSV with a fixed header and [`format_float`] cells.
pub fn emit_table<R: AsRef<[f64]>>(path: &Path, header: &[&str], rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::io(path, e.into());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        let row = row.as_ref();
        if row.len() != header.len() {
            return Err(Error::Format {
                what: "csv",
                msg: format!("row of {} cells under {} columns", row.len(), header.len()),
            });
        }
        w.write_record(row.iter().map(|&x| format_float(x)))
            .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    write_atomic(path, &bytes)
}

pub fn emit_series(path: &Path, rows: &[SeriesRow]) -> Result<()> {
    let values: Vec<[f64; 17]> = rows.iter().map(SeriesRow::values).collect();
    emit_table(path, &SERIES_COLUMNS, &values)
}

pub fn read_series(path: &Path) -> Result<Vec<SeriesRow>> {
    let bad = |msg: String| Error::Format {
        what: "series",
        msg: format!("{}: {msg}", path.display()),
    };
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => bad(format!("{other:?}")),
    })?;
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().ne(SERIES_COLUMNS) {
        return Err(bad(format!(
            "header {:?} differs from {:?}",
            header.iter().collect::<Vec<_>>(),
            SERIES_COLUMNS
        )));
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let mut v = [0.0; 17];
        for (slot, cell) in v.iter_mut().zip(rec.iter()) {
            *slot = cell
                .trim()
                .parse()
                .map_err(|_| bad(format!("row {}: `{cell}` is not a number", line + 1)))?;
        }
        rows.push(SeriesRow::from_values(&v));
    }
    Ok(rows)
}

/// Pretty JSON; key order follows the struct declaration.
pub fn emit_report<T: Serialize>(path: &Path, report: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| Error::Format {
        what: "json",
        msg: e.to_string(),
    })?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn emit_snapshot(path: &Path, snap: &Snapshot) -> Result<()> {
    let mut bytes = Vec::new();
    snap.write_to(&mut bytes).map_err(|e| Error::io(path, e))?;
    write_atomic(path, &bytes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Not applicable to this configuration; does not affect the verdict.
    Skipped,
}

/// One in-run assertion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            status: if pass { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        }
    }

    pub fn skipped(name: &str, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            status: Status::Skipped,
            detail: detail.into(),
        }
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: PathBuf,
    pub sha256: String,
}

impl OutputRecord {
    pub fn of(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(Self {
            path: path.to_path_buf(),
            sha256: sha256_hex(&bytes),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    /// Effective configuration written alongside the outputs.
    pub config_file: PathBuf,
    pub config_sha256: String,
    pub seed: u64,
    pub threads: usize,
    pub started_unix: f64,
    pub wall_clock_s: f64,
    pub checks: Vec<Check>,
    pub outputs: Vec<OutputRecord>,
    pub pass: bool,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Format {
            what: "manifest",
            msg: e.to_string(),
        })
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}
