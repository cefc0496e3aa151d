//! Dataset files.
//!
//! `<stem>.csv` holds one entry per row after a version line; the sidecar
//! `<stem>.geometry.txt` holds one airfoil per line: the name, then the 50
//! upper-surface and 50 lower-surface values at the default stations.

use std::path::{Path, PathBuf};

use super::{DataEntry, Dataset, FlowCondition, Origin};
use crate::error::{Error, Result};
use crate::geometry::{AirfoilGeometry, Stations};
use crate::util::fmt_exact;

pub const DATASET_FORMAT_VERSION: u32 = 1;
pub const DATASET_HEADER: &str = "airfoil,alpha_deg,mach,reynolds,cl,origin";

const VERSION_PREFIX: &str = "#format_version:";

/// Sidecar geometry path for a dataset CSV path.
pub fn geometry_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("geometry.txt")
}

impl Dataset {
    /// Entry table in file form. Floats use the shortest exact representation.
    pub fn entries_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        for e in &self.entries {
            w.write_record([
                e.airfoil.clone(),
                e.flow.alpha.to_string(),
                e.flow.mach.to_string(),
                e.flow.reynolds.to_string(),
                e.cl.to_string(),
                e.origin.to_string(),
            ])
            .expect("writing to memory");
        }
        let body = String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8 input");
        format!("{VERSION_PREFIX}{DATASET_FORMAT_VERSION}\n{DATASET_HEADER}\n{body}")
    }

    /// Geometry sidecar in file form, airfoils in name order.
    pub fn geometry_text(&self) -> String {
        let mut out = format!("{VERSION_PREFIX}{DATASET_FORMAT_VERSION}\n");
        for g in self.airfoils.values() {
            out.push_str(&g.name);
            for v in g.y_upper.iter().chain(&g.y_lower) {
                out.push(' ');
                out.push_str(&fmt_exact(*v));
            }
            out.push('\n');
        }
        out
    }
}

pub fn save_dataset(data: &Dataset, csv_path: impl AsRef<Path>) -> Result<()> {
    let csv_path = csv_path.as_ref();
    let geo = geometry_path(csv_path);
    std::fs::write(csv_path, data.entries_csv()).map_err(|e| Error::io(csv_path, e))?;
    std::fs::write(&geo, data.geometry_text()).map_err(|e| Error::io(&geo, e))
}

pub fn load_dataset(csv_path: impl AsRef<Path>) -> Result<Dataset> {
    let csv_path = csv_path.as_ref();
    let geo = geometry_path(csv_path);
    let entries = std::fs::read_to_string(csv_path).map_err(|e| Error::io(csv_path, e))?;
    let geometry = std::fs::read_to_string(&geo).map_err(|e| Error::io(&geo, e))?;
    parse_dataset(&entries, &geometry)
}

fn check_version(first: Option<&str>) -> Result<()> {
    let found = first.unwrap_or("").trim();
    match found.strip_prefix(VERSION_PREFIX) {
        Some(v) if v.trim() == DATASET_FORMAT_VERSION.to_string() => Ok(()),
        _ => Err(Error::FormatVersionMismatch {
            found: found.to_string(),
            expected: DATASET_FORMAT_VERSION,
        }),
    }
}

/// Parses the two dataset files from memory.
pub fn parse_dataset(entries_csv: &str, geometry_text: &str) -> Result<Dataset> {
    let mut data = Dataset::new();
    let stations = Stations::default();
    let n = stations.len();

    let mut lines = geometry_text.lines();
    check_version(lines.next())?;
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let bad = |reason: String| Error::MalformedRecord { line: i + 2, reason };
        let parts: Vec<&str> = line.rsplitn(2 * n + 1, ' ').collect();
        if parts.len() != 2 * n + 1 {
            return Err(bad(format!("expected a name and {} values", 2 * n)));
        }
        let mut values = parts[..2 * n]
            .iter()
            .rev()
            .map(|t| t.parse::<f64>().map_err(|e| bad(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let lower = values.split_off(n);
        let g = AirfoilGeometry::new(parts[2 * n], stations.clone(), values, lower).map_err(|e| bad(e.to_string()))?;
        data.add_airfoil(g).map_err(|e| bad(e.to_string()))?;
    }

    let mut lines = entries_csv.splitn(2, '\n');
    check_version(lines.next())?;
    let body = lines.next().unwrap_or("");
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let header = reader.headers().map_err(|e| Error::MalformedRecord {
        line: 2,
        reason: e.to_string(),
    })?;
    if header.iter().collect::<Vec<_>>().join(",") != DATASET_HEADER {
        return Err(Error::MalformedRecord {
            line: 2,
            reason: format!("expected header {DATASET_HEADER:?}"),
        });
    }
    for (i, record) in reader.records().enumerate() {
        let line = i + 3;
        let bad = |reason: String| Error::MalformedRecord { line, reason };
        let record = record.map_err(|e| bad(e.to_string()))?;
        if record.len() != 6 {
            return Err(bad(format!("expected 6 fields, got {}", record.len())));
        }
        let num = |k: usize| record[k].parse::<f64>().map_err(|e| bad(format!("{:?}: {e}", &record[k])));
        let entry = DataEntry {
            airfoil: record[0].to_string(),
            flow: FlowCondition::new(num(1)?, num(2)?, num(3)?),
            cl: num(4)?,
            origin: record[5].parse::<Origin>().map_err(|e| bad(e.to_string()))?,
        };
        data.push(entry).map_err(|e| bad(e.to_string()))?;
    }
    Ok(data)
}
