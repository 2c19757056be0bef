//! Height above ground from ellipsoidal GPS altitude, a geoid grid, and SRTM
//! terrain tiles.
//!
//! `AGL = (h - N(lat, lon)) - H_ground(lat, lon)` where `h` is the WGS84
//! ellipsoidal altitude, `N` the geoid undulation, and `H_ground` the
//! orthometric terrain height. Both lookups are bilinear.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math;

/// Default diagonal field of view of the thermal lens, degrees.
pub const DEFAULT_FOV_DIAG_DEG: f64 = 61.0;
/// Default thermal sensor width, pixels.
pub const DEFAULT_THERMAL_WIDTH_PX: usize = 640;
/// SRTM void marker.
pub const DEM_VOID: i16 = -32768;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeodesyError {
    #[error("invalid frame metadata: {0}")]
    InvalidMeta(String),
    #[error("invalid geoid grid: {0}")]
    InvalidGrid(String),
    #[error("point ({lat}, {lon}) outside geoid grid coverage")]
    OutsideGeoid { lat: f64, lon: f64 },
    #[error("no DEM tile covers ({lat}, {lon}); expected {anchor}")]
    MissingTile { lat: f64, lon: f64, anchor: String },
    #[error("DEM void among the interpolation nodes at ({lat}, {lon})")]
    DemVoid { lat: f64, lon: f64 },
    #[error("invalid DEM tile: {0}")]
    InvalidTile(String),
    #[error("non-finite altitude {0}")]
    NonFinite(f64),
}

/// Per-frame position and camera geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameMeta {
    pub lat: f64,
    pub lon: f64,
    /// Meters above the WGS84 ellipsoid.
    pub alt_ellipsoidal_m: f64,
    #[serde(default = "default_fov")]
    pub fov_diag_deg: f64,
    #[serde(default = "default_width")]
    pub thermal_width_px: usize,
}

fn default_fov() -> f64 {
    DEFAULT_FOV_DIAG_DEG
}

fn default_width() -> usize {
    DEFAULT_THERMAL_WIDTH_PX
}

impl FrameMeta {
    /// Position with the default camera geometry.
    pub fn new(lat: f64, lon: f64, alt_ellipsoidal_m: f64) -> Self {
        Self {
            lat,
            lon,
            alt_ellipsoidal_m,
            fov_diag_deg: DEFAULT_FOV_DIAG_DEG,
            thermal_width_px: DEFAULT_THERMAL_WIDTH_PX,
        }
    }

    pub fn validate(&self) -> Result<(), GeodesyError> {
        if !(-90.0..=90.0).contains(&self.lat) {
            return Err(GeodesyError::InvalidMeta(format!(
                "latitude {} out of range",
                self.lat
            )));
        }
        if !(-180.0..180.0).contains(&self.lon) {
            return Err(GeodesyError::InvalidMeta(format!(
                "longitude {} out of range",
                self.lon
            )));
        }
        if !self.alt_ellipsoidal_m.is_finite() {
            return Err(GeodesyError::NonFinite(self.alt_ellipsoidal_m));
        }
        if !(self.fov_diag_deg > 0.0 && self.fov_diag_deg < 180.0) {
            return Err(GeodesyError::InvalidMeta(format!(
                "field of view {} must be in (0, 180)",
                self.fov_diag_deg
            )));
        }
        if self.thermal_width_px == 0 {
            return Err(GeodesyError::InvalidMeta(
                "thermal width must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Degrees/minutes/seconds to signed decimal degrees. `S` and `W` references
/// are negative.
pub fn dms_to_degrees(degrees: f64, minutes: f64, seconds: f64, reference: char) -> f64 {
    let v = degrees + minutes / 60.0 + seconds / 3600.0;
    match reference.to_ascii_uppercase() {
        'S' | 'W' => -v,
        _ => v,
    }
}

/// Regular lat/lon grid of geoid undulations in meters.
///
/// Row 0 lies on `origin_lat` and rows step north by `spacing_deg`; column 0
/// lies on `origin_lon` and columns step east. A grid spanning 360° of
/// longitude wraps around the antimeridian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoidGrid {
    pub origin_lat: f64,
    pub origin_lon: f64,
    pub spacing_deg: f64,
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl GeoidGrid {
    pub fn new(
        origin_lat: f64,
        origin_lon: f64,
        spacing_deg: f64,
        rows: usize,
        cols: usize,
        values: Vec<f64>,
    ) -> Result<Self, GeodesyError> {
        let g = Self {
            origin_lat,
            origin_lon,
            spacing_deg,
            rows,
            cols,
            values,
        };
        g.validate()?;
        Ok(g)
    }

    /// Single-valued grid covering the whole globe.
    pub fn constant(value: f64) -> Self {
        Self {
            origin_lat: -90.0,
            origin_lon: -180.0,
            spacing_deg: 90.0,
            rows: 3,
            cols: 4,
            values: alloc::vec![value; 12],
        }
    }

    pub fn validate(&self) -> Result<(), GeodesyError> {
        if !(self.spacing_deg > 0.0 && self.spacing_deg.is_finite()) {
            return Err(GeodesyError::InvalidGrid(format!(
                "spacing {} must be > 0",
                self.spacing_deg
            )));
        }
        if self.rows < 2 || self.cols < 2 {
            return Err(GeodesyError::InvalidGrid(format!(
                "grid must be at least 2x2, got {}x{}",
                self.rows, self.cols
            )));
        }
        if self.values.len() != self.rows * self.cols {
            return Err(GeodesyError::InvalidGrid(format!(
                "expected {} values, got {}",
                self.rows * self.cols,
                self.values.len()
            )));
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(GeodesyError::InvalidGrid(format!(
                "non-finite undulation {v}"
            )));
        }
        Ok(())
    }

    fn wraps(&self) -> bool {
        self.cols as f64 * self.spacing_deg >= 360.0 - 1e-9
    }

    fn at(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col % self.cols]
    }

    /// Bilinear undulation at `(lat, lon)`.
    pub fn undulation(&self, lat: f64, lon: f64) -> Result<f64, GeodesyError> {
        let outside = GeodesyError::OutsideGeoid { lat, lon };
        if !lat.is_finite() || !lon.is_finite() {
            return Err(outside);
        }
        let fy = (lat - self.origin_lat) / self.spacing_deg;
        let mut dlon = lon - self.origin_lon;
        if self.wraps() {
            dlon -= 360.0 * math::floor(dlon / 360.0);
        }
        let fx = dlon / self.spacing_deg;
        let max_col = if self.wraps() {
            self.cols as f64
        } else {
            (self.cols - 1) as f64
        };
        let max_row = (self.rows - 1) as f64;
        if !(0.0..=max_row).contains(&fy) || !(0.0..=max_col).contains(&fx) {
            return Err(outside);
        }
        let (r0, ty) = cell(fy, self.rows - 1);
        let col_cells = if self.wraps() {
            self.cols
        } else {
            self.cols - 1
        };
        let (c0, tx) = cell(fx, col_cells);
        Ok(math::bilinear(
            self.at(r0, c0),
            self.at(r0, c0 + 1),
            self.at(r0 + 1, c0),
            self.at(r0 + 1, c0 + 1),
            tx,
            ty,
        ))
    }
}

/// Splits a continuous grid coordinate into a cell index and in-cell fraction,
/// keeping the far edge inside the last cell.
fn cell(f: f64, cells: usize) -> (usize, f64) {
    let i = (math::floor(f) as usize).min(cells - 1);
    (i, f - i as f64)
}

/// One SRTM `.hgt` tile: a square of big-endian 16-bit orthometric heights,
/// rows ordered north to south, anchored at its south-west corner.
#[derive(Debug, Clone, PartialEq)]
pub struct DemTile {
    /// Latitude of the southern edge, integer degrees.
    pub lat: i32,
    /// Longitude of the western edge, integer degrees.
    pub lon: i32,
    side: usize,
    heights: Vec<i16>,
}

impl DemTile {
    pub fn new(lat: i32, lon: i32, side: usize, heights: Vec<i16>) -> Result<Self, GeodesyError> {
        if side != 1201 && side != 3601 {
            return Err(GeodesyError::InvalidTile(format!(
                "side {side} is neither 1201 nor 3601"
            )));
        }
        if heights.len() != side * side {
            return Err(GeodesyError::InvalidTile(format!(
                "expected {} samples, got {}",
                side * side,
                heights.len()
            )));
        }
        Ok(Self {
            lat,
            lon,
            side,
            heights,
        })
    }

    pub fn flat(lat: i32, lon: i32, side: usize, height: i16) -> Result<Self, GeodesyError> {
        Self::new(lat, lon, side, alloc::vec![height; side * side])
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn heights(&self) -> &[i16] {
        &self.heights
    }

    /// Mutable sample at (row from north, column from west).
    pub fn height_mut(&mut self, row: usize, col: usize) -> &mut i16 {
        &mut self.heights[row * self.side + col]
    }

    pub fn anchor_name(&self) -> String {
        anchor_name(self.lat, self.lon)
    }

    pub fn covers(&self, lat: f64, lon: f64) -> bool {
        lat >= self.lat as f64
            && lat <= self.lat as f64 + 1.0
            && lon >= self.lon as f64
            && lon <= self.lon as f64 + 1.0
    }

    /// Bilinear terrain height. Nodes carrying non-zero weight must not be void.
    pub fn elevation(&self, lat: f64, lon: f64) -> Result<f64, GeodesyError> {
        if !self.covers(lat, lon) {
            return Err(GeodesyError::MissingTile {
                lat,
                lon,
                anchor: self.anchor_name(),
            });
        }
        let cells = self.side - 1;
        let fr = (self.lat as f64 + 1.0 - lat) * cells as f64;
        let fc = (lon - self.lon as f64) * cells as f64;
        let (r0, ty) = cell(fr, cells);
        let (c0, tx) = cell(fc, cells);
        let weights = [
            (r0, c0, (1.0 - tx) * (1.0 - ty)),
            (r0, c0 + 1, tx * (1.0 - ty)),
            (r0 + 1, c0, (1.0 - tx) * ty),
            (r0 + 1, c0 + 1, tx * ty),
        ];
        let mut v = [0.0; 4];
        for (k, &(r, c, w)) in weights.iter().enumerate() {
            let h = self.heights[r * self.side + c];
            if h == DEM_VOID {
                if w != 0.0 {
                    return Err(GeodesyError::DemVoid { lat, lon });
                }
                continue;
            }
            v[k] = h as f64;
        }
        Ok(math::bilinear(v[0], v[1], v[2], v[3], tx, ty))
    }
}

/// `N34W119`-style name of the tile whose south-west corner is `(lat, lon)`.
pub fn anchor_name(lat: i32, lon: i32) -> String {
    let ns = if lat < 0 { 'S' } else { 'N' };
    let ew = if lon < 0 { 'W' } else { 'E' };
    format!("{ns}{:02}{ew}{:03}", lat.unsigned_abs(), lon.unsigned_abs())
}

/// Parses an anchor such as `N34W119` (case-insensitive, optional `.hgt`
/// suffix) into `(lat, lon)` of the south-west corner.
pub fn parse_anchor(name: &str) -> Option<(i32, i32)> {
    let name = name
        .strip_suffix(".hgt")
        .or_else(|| name.strip_suffix(".HGT"))
        .unwrap_or(name);
    let b = name.as_bytes();
    if b.len() != 7 {
        return None;
    }
    let lat_sign = match b[0].to_ascii_uppercase() {
        b'N' => 1,
        b'S' => -1,
        _ => return None,
    };
    let lon_sign = match b[3].to_ascii_uppercase() {
        b'E' => 1,
        b'W' => -1,
        _ => return None,
    };
    let lat: i32 = name.get(1..3)?.parse().ok()?;
    let lon: i32 = name.get(4..7)?.parse().ok()?;
    if lat > 90 || lon > 180 {
        return None;
    }
    Some((lat_sign * lat, lon_sign * lon))
}

/// Tiles keyed by south-west anchor.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DemSet {
    tiles: BTreeMap<(i32, i32), DemTile>,
}

impl DemSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, tile: DemTile) {
        self.tiles.insert((tile.lat, tile.lon), tile);
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// Anchor of the tile that owns `(lat, lon)`.
    pub fn anchor_for(lat: f64, lon: f64) -> (i32, i32) {
        (math::floor(lat) as i32, math::floor(lon) as i32)
    }

    pub fn tile_for(&self, lat: f64, lon: f64) -> Option<&DemTile> {
        let (la, lo) = Self::anchor_for(lat, lon);
        // Points on a tile's north or east edge are also covered by the
        // neighbour below or to the west.
        [(la, lo), (la - 1, lo), (la, lo - 1), (la - 1, lo - 1)]
            .iter()
            .filter_map(|k| self.tiles.get(k))
            .find(|t| t.covers(lat, lon))
    }

    pub fn elevation(&self, lat: f64, lon: f64) -> Result<f64, GeodesyError> {
        match self.tile_for(lat, lon) {
            Some(t) => t.elevation(lat, lon),
            None => {
                let (la, lo) = Self::anchor_for(lat, lon);
                Err(GeodesyError::MissingTile {
                    lat,
                    lon,
                    anchor: anchor_name(la, lo),
                })
            }
        }
    }
}

/// Breakdown of one height-above-ground computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AglEstimate {
    pub ellipsoidal_m: f64,
    pub undulation_m: f64,
    pub orthometric_m: f64,
    pub ground_m: f64,
    pub agl_m: f64,
    /// Negative AGL: metadata or terrain data is inconsistent.
    pub suspect: bool,
}

/// Height above ground level for one frame.
pub fn agl(meta: &FrameMeta, geoid: &GeoidGrid, dem: &DemSet) -> Result<AglEstimate, GeodesyError> {
    meta.validate()?;
    let undulation_m = geoid.undulation(meta.lat, meta.lon)?;
    let ground_m = dem.elevation(meta.lat, meta.lon)?;
    let orthometric_m = meta.alt_ellipsoidal_m - undulation_m;
    let agl_m = orthometric_m - ground_m;
    Ok(AglEstimate {
        ellipsoidal_m: meta.alt_ellipsoidal_m,
        undulation_m,
        orthometric_m,
        ground_m,
        agl_m,
        suspect: agl_m < 0.0,
    })
}

/// Flight altitude answer categories; bins are lower-inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AltitudeBin {
    #[serde(rename = "0–50 m")]
    Below50,
    #[serde(rename = "50–100 m")]
    From50To100,
    #[serde(rename = "100–150 m")]
    From100To150,
    #[serde(rename = ">150 m")]
    Above150,
}

impl AltitudeBin {
    pub const ALL: [AltitudeBin; 4] = [
        AltitudeBin::Below50,
        AltitudeBin::From50To100,
        AltitudeBin::From100To150,
        AltitudeBin::Above150,
    ];

    pub fn label(self) -> &'static str {
        match self {
            AltitudeBin::Below50 => "0–50 m",
            AltitudeBin::From50To100 => "50–100 m",
            AltitudeBin::From100To150 => "100–150 m",
            AltitudeBin::Above150 => ">150 m",
        }
    }
}

impl fmt::Display for AltitudeBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinnedAltitude {
    pub bin: AltitudeBin,
    pub suspect: bool,
}

/// Bins AGL into `[0,50)`, `[50,100)`, `[100,150)`, `[150,inf)`. Negative
/// values fall in the lowest bin and are marked suspect.
pub fn altitude_bin(agl_m: f64) -> Result<BinnedAltitude, GeodesyError> {
    if !agl_m.is_finite() {
        return Err(GeodesyError::NonFinite(agl_m));
    }
    let bin = if agl_m < 50.0 {
        AltitudeBin::Below50
    } else if agl_m < 100.0 {
        AltitudeBin::From50To100
    } else if agl_m < 150.0 {
        AltitudeBin::From100To150
    } else {
        AltitudeBin::Above150
    };
    Ok(BinnedAltitude {
        bin,
        suspect: agl_m < 0.0,
    })
}
