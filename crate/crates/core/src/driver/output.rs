//! CSV records and atomic file output.
//!
//! Every file is written under `<name>.partial` and renamed once complete, so
//! a finished name always holds a finished table.

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeseriesRow {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    /// Magnetic energy over the discrete initial energy.
    pub energy: f64,
    pub div_surface: f64,
    pub div_volume: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub n: usize,
    #[serde(rename = "N")]
    pub cells: usize,
    pub dx: f64,
    pub l1_bx: f64,
    pub l1_by: f64,
    /// Order against the previous resolution; empty for the coarsest.
    pub order_bx: Option<f64>,
    pub order_by: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldMapRow {
    pub i: usize,
    pub j: usize,
    pub x_center: f64,
    pub y_center: f64,
    pub energy_density_normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionRow {
    pub n: usize,
    pub k: f64,
    pub re_omega: f64,
    pub im_omega: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub n: usize,
    pub re_z: f64,
    pub im_z: f64,
    pub abs_p: f64,
}

/// One row of the merged comparison table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub scheme: String,
    pub n: usize,
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub energy: f64,
    pub div_surface: f64,
    pub div_volume: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedDofRow {
    pub n: usize,
    #[serde(rename = "N")]
    pub cells: usize,
    pub t: f64,
    pub energy: f64,
}

pub fn partial_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".partial");
    path.with_file_name(name)
}

/// A CSV file being written row by row under its `.partial` name.
pub struct PartialCsv {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl PartialCsv {
    pub fn create(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        let writer = csv::Writer::from_path(partial_path(&path))?;
        Ok(Self { path, writer })
    }

    pub fn write<T: Serialize>(&mut self, row: &T) -> Result<()> {
        self.writer.serialize(row)?;
        Ok(())
    }

    /// Flush and move to the final name.
    pub fn finish(mut self) -> Result<PathBuf> {
        self.writer.flush()?;
        drop(self.writer);
        fs::rename(partial_path(&self.path), &self.path)?;
        Ok(self.path)
    }
}

pub fn write_csv<T: Serialize>(path: impl Into<PathBuf>, rows: &[T]) -> Result<PathBuf> {
    let mut out = PartialCsv::create(path)?;
    for r in rows {
        out.write(r)?;
    }
    out.finish()
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for r in reader.deserialize() {
        rows.push(r?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headers_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("errors.csv");
        let rows = vec![
            ErrorRow { n: 1, cells: 8, dx: 0.125, l1_bx: 1e-3, l1_by: 1e-3, order_bx: None, order_by: None },
            ErrorRow { n: 1, cells: 16, dx: 0.0625, l1_bx: 2.5e-4, l1_by: 2.5e-4, order_bx: Some(2.0), order_by: Some(2.0) },
        ];
        write_csv(&path, &rows).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), "n,N,dx,l1_bx,l1_by,order_bx,order_by");
        assert_eq!(read_csv::<ErrorRow>(&path).unwrap(), rows);
        assert!(!partial_path(&path).exists());
    }

    #[test]
    fn unfinished_files_keep_the_partial_suffix() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub").join("timeseries.csv");
        let mut w = PartialCsv::create(&path).unwrap();
        w.write(&TimeseriesRow { step: 0, t: 0.0, dt: 0.0, energy: 1.0, div_surface: 0.0, div_volume: 0.0 })
            .unwrap();
        drop(w);
        assert!(!path.exists());
        let text = fs::read_to_string(partial_path(&path)).unwrap();
        assert!(text.starts_with("step,t,dt,energy,div_surface,div_volume"));
    }
}
