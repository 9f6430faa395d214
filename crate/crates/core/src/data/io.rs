use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::Series;

/// Which CSV column holds the values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSpec {
    Name(String),
    /// Zero-based position.
    Index(usize),
}

/// Block structure, units and, for exceedance files, the threshold and
/// block count, stored next to a series file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_length: Option<usize>,
    #[serde(default)]
    pub units: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_blocks: Option<f64>,
}

/// `data.csv` → `data.csv.meta.toml`.
fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.toml");
    PathBuf::from(name)
}

pub fn read_sidecar(path: &Path) -> Result<Option<SeriesMeta>> {
    let side = sidecar_path(path);
    if !side.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&side)?;
    toml::from_str(&text)
        .map(Some)
        .map_err(|e| Error::usage(format!("{}: {e}", side.display())))
}

pub fn write_sidecar(path: &Path, meta: &SeriesMeta) -> Result<()> {
    let text = toml::to_string(meta).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(sidecar_path(path), text)?;
    Ok(())
}

/// Reads one numeric column of a headered CSV file, plus block metadata from
/// a `<file>.meta.toml` sidecar when present.
pub fn read_series(path: &Path, column: &ColumnSpec) -> Result<Series> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = match column {
        ColumnSpec::Index(i) if *i < headers.len() => *i,
        ColumnSpec::Name(n) => headers
            .iter()
            .position(|h| h.trim() == n)
            .ok_or_else(|| Error::usage(format!("{}: no column named {n:?}", path.display())))?,
        ColumnSpec::Index(i) => {
            return Err(Error::usage(format!("{}: column {i} out of range ({} columns)", path.display(), headers.len())))
        }
    };
    let mut values = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let raw = rec.get(col).unwrap_or("").trim();
        let v: f64 = raw
            .parse()
            .map_err(|_| Error::usage(format!("{}:{line}: {raw:?} is not a number", path.display())))?;
        if !v.is_finite() {
            return Err(Error::usage(format!("{}:{line}: {raw:?} is not finite", path.display())));
        }
        values.push(v);
    }
    let mut s = Series::new(values)?;
    if let Some(meta) = read_sidecar(path)? {
        if let Some(b) = meta.block_length {
            s = s.with_block_length(b)?;
        }
        s.units = meta.units;
    }
    Ok(s)
}

/// Writes a single `value` column (shortest round-trip formatting) and the
/// metadata sidecar.
pub fn write_series(path: &Path, s: &Series) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["value"])?;
    for v in &s.values {
        w.write_record([v.to_string()])?;
    }
    w.flush()?;
    write_sidecar(path, &SeriesMeta { block_length: s.block_length, units: s.units.clone(), ..SeriesMeta::default() })
}
