//! SRTM tile and geoid grid files.

use std::path::{Path, PathBuf};

use firescene_core::geodesy::{parse_anchor, GeodesyError};
use firescene_core::{DemSet, DemTile, GeoidGrid};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("{path}: {source}")]
    Geodesy {
        path: String,
        #[source]
        source: GeodesyError,
    },
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> GeoError + '_ {
    move |source| GeoError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn invalid(path: &Path, message: impl Into<String>) -> GeoError {
    GeoError::Invalid {
        path: path.display().to_string(),
        message: message.into(),
    }
}

/// Loads an `.hgt` tile; the anchor comes from the file name
/// (e.g. `N34W119.hgt`), the side from the file size.
pub fn load_hgt(path: &Path) -> Result<DemTile, GeoError> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or_default();
    let (lat, lon) = parse_anchor(stem)
        .ok_or_else(|| invalid(path, format!("cannot parse tile anchor from {stem:?}")))?;
    let bytes = std::fs::read(path).map_err(io(path))?;
    let side = match bytes.len() {
        n if n == 1201 * 1201 * 2 => 1201,
        n if n == 3601 * 3601 * 2 => 3601,
        n => {
            return Err(invalid(
                path,
                format!("{n} bytes is neither a 1201² nor a 3601² tile"),
            ))
        }
    };
    let heights = bytes
        .chunks_exact(2)
        .map(|c| i16::from_be_bytes([c[0], c[1]]))
        .collect();
    DemTile::new(lat, lon, side, heights).map_err(|source| GeoError::Geodesy {
        path: path.display().to_string(),
        source,
    })
}

/// Writes a tile as big-endian `.hgt` named after its anchor.
pub fn write_hgt(tile: &DemTile, dir: &Path) -> Result<PathBuf, GeoError> {
    let path = dir.join(format!("{}.hgt", tile.anchor_name()));
    let bytes: Vec<u8> = tile
        .heights()
        .iter()
        .flat_map(|h| h.to_be_bytes())
        .collect();
    std::fs::write(&path, bytes).map_err(io(&path))?;
    Ok(path)
}

/// Every `.hgt` file in `dir`, in file-name order.
pub fn load_dem_dir(dir: &Path) -> Result<DemSet, GeoError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("hgt")))
        .collect();
    paths.sort();
    let mut set = DemSet::new();
    for p in paths {
        set.insert(load_hgt(&p)?);
    }
    Ok(set)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowOrder {
    #[default]
    SouthToNorth,
    NorthToSouth,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridDtype {
    #[default]
    Float32,
    Float64,
}

/// Geoid grid file. Values come inline (`values`) or from a little-endian
/// flat binary (`data`, relative to the JSON file). `origin_lat` is the
/// latitude of the first stored row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoidFile {
    pub origin_lat: f64,
    pub origin_lon: f64,
    pub spacing_deg: f64,
    pub rows: usize,
    pub cols: usize,
    #[serde(default)]
    pub row_order: RowOrder,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<String>,
    #[serde(default)]
    pub dtype: GridDtype,
}

pub fn load_geoid(path: &Path) -> Result<GeoidGrid, GeoError> {
    let text = std::fs::read_to_string(path).map_err(io(path))?;
    let file: GeoidFile = serde_json::from_str(&text).map_err(|e| invalid(path, e.to_string()))?;
    let mut values = match (&file.values, &file.data) {
        (Some(v), None) => v.clone(),
        (None, Some(d)) => {
            let p = path.parent().unwrap_or(Path::new("")).join(d);
            let bytes = std::fs::read(&p).map_err(io(&p))?;
            match file.dtype {
                GridDtype::Float32 => bytes
                    .chunks_exact(4)
                    .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64)
                    .collect(),
                GridDtype::Float64 => bytes
                    .chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                    .collect(),
            }
        }
        _ => {
            return Err(invalid(
                path,
                "exactly one of `values` or `data` is required",
            ))
        }
    };
    if values.len() != file.rows * file.cols {
        return Err(invalid(
            path,
            format!(
                "{} values for a {}x{} grid",
                values.len(),
                file.rows,
                file.cols
            ),
        ));
    }
    let mut origin_lat = file.origin_lat;
    if file.row_order == RowOrder::NorthToSouth {
        origin_lat -= (file.rows.saturating_sub(1)) as f64 * file.spacing_deg;
        values = values.chunks(file.cols).rev().flatten().copied().collect();
    }
    GeoidGrid::new(
        origin_lat,
        file.origin_lon,
        file.spacing_deg,
        file.rows,
        file.cols,
        values,
    )
    .map_err(|source| GeoError::Geodesy {
        path: path.display().to_string(),
        source,
    })
}
