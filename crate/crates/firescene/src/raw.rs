//! Raw raster fixtures: a JSON sidecar describing a flat binary blob.
//!
//! ```json
//! {"width": 640, "height": 512, "dtype": "float32", "endian": "little",
//!  "nodata": -9999.0, "data": "frame.bin"}
//! ```
//!
//! `data` is resolved relative to the sidecar and defaults to the sidecar
//! path with a `.bin` extension. Integer types accept an optional `scale`
//! and `offset`.

use std::path::{Path, PathBuf};

use firescene_core::ThermalRaster;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RawError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid sidecar: {source}")]
    Sidecar {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("length mismatch: {width}x{height} {dtype} needs {expected} bytes, data has {actual}")]
    LengthMismatch {
        width: usize,
        height: usize,
        dtype: String,
        expected: usize,
        actual: usize,
    },
    #[error(transparent)]
    Raster(#[from] firescene_core::raster::RasterError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dtype {
    Float32,
    Float64,
    Uint16,
    Int16,
}

impl Dtype {
    fn size(self) -> usize {
        match self {
            Dtype::Float32 => 4,
            Dtype::Float64 => 8,
            Dtype::Uint16 | Dtype::Int16 => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ByteOrder {
    Little,
    Big,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawHeader {
    pub width: usize,
    pub height: usize,
    pub dtype: Dtype,
    pub endian: ByteOrder,
    #[serde(default)]
    pub nodata: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<String>,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> RawError + '_ {
    move |source| RawError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Reads a sidecar and its blob.
pub fn load_raw_raster(sidecar: &Path) -> Result<ThermalRaster, RawError> {
    let text = std::fs::read_to_string(sidecar).map_err(io(sidecar))?;
    let header: RawHeader = serde_json::from_str(&text).map_err(|source| RawError::Sidecar {
        path: sidecar.display().to_string(),
        source,
    })?;
    let data_path = match &header.data {
        Some(d) => sidecar.parent().unwrap_or(Path::new("")).join(d),
        None => sidecar.with_extension("bin"),
    };
    let bytes = std::fs::read(&data_path).map_err(io(&data_path))?;
    decode_raw(&header, &bytes)
}

pub fn decode_raw(header: &RawHeader, bytes: &[u8]) -> Result<ThermalRaster, RawError> {
    let size = header.dtype.size();
    let expected = header.width * header.height * size;
    if bytes.len() != expected {
        return Err(RawError::LengthMismatch {
            width: header.width,
            height: header.height,
            dtype: format!("{:?}", header.dtype).to_lowercase(),
            expected,
            actual: bytes.len(),
        });
    }
    let big = header.endian == ByteOrder::Big;
    let (scale, offset) = (header.scale.unwrap_or(1.0), header.offset.unwrap_or(0.0));
    let mut temps = Vec::with_capacity(header.width * header.height);
    let mut measured = Vec::with_capacity(temps.capacity());
    for c in bytes.chunks_exact(size) {
        let (raw, integer) = match header.dtype {
            Dtype::Float32 => {
                let b = c.try_into().expect("4 bytes");
                (
                    (if big {
                        f32::from_be_bytes(b)
                    } else {
                        f32::from_le_bytes(b)
                    }) as f64,
                    false,
                )
            }
            Dtype::Float64 => {
                let b = c.try_into().expect("8 bytes");
                (
                    if big {
                        f64::from_be_bytes(b)
                    } else {
                        f64::from_le_bytes(b)
                    },
                    false,
                )
            }
            Dtype::Uint16 => {
                let b = c.try_into().expect("2 bytes");
                (
                    (if big {
                        u16::from_be_bytes(b)
                    } else {
                        u16::from_le_bytes(b)
                    }) as f64,
                    true,
                )
            }
            Dtype::Int16 => {
                let b = c.try_into().expect("2 bytes");
                (
                    (if big {
                        i16::from_be_bytes(b)
                    } else {
                        i16::from_le_bytes(b)
                    }) as f64,
                    true,
                )
            }
        };
        measured.push(header.nodata != Some(raw));
        temps.push(if integer { raw * scale + offset } else { raw });
    }
    Ok(ThermalRaster::from_parts(
        header.width,
        header.height,
        temps,
        measured,
    )?)
}

/// No-data marker written for invalid pixels.
pub const RAW_NODATA: f64 = -9999.0;

/// Writes `<stem>.json` and `<stem>.bin` (float64, little endian) into `dir`
/// and returns the sidecar path.
pub fn write_raw_raster(
    raster: &ThermalRaster,
    dir: &Path,
    stem: &str,
) -> Result<PathBuf, RawError> {
    let bin_name = format!("{stem}.bin");
    let header = RawHeader {
        width: raster.width(),
        height: raster.height(),
        dtype: Dtype::Float64,
        endian: ByteOrder::Little,
        nodata: Some(RAW_NODATA),
        scale: None,
        offset: None,
        data: Some(bin_name.clone()),
    };
    let mut blob = Vec::with_capacity(raster.len() * 8);
    for (&t, &v) in raster.temps().iter().zip(raster.valid_mask()) {
        blob.extend_from_slice(&(if v { t } else { RAW_NODATA }).to_le_bytes());
    }
    let bin_path = dir.join(bin_name);
    std::fs::write(&bin_path, blob).map_err(io(&bin_path))?;
    let json_path = dir.join(format!("{stem}.json"));
    let text = serde_json::to_string_pretty(&header).expect("header serializes");
    std::fs::write(&json_path, text + "\n").map_err(io(&json_path))?;
    Ok(json_path)
}
