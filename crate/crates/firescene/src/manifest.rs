//! Frame manifests (JSON or CSV) and per-frame input loading.
//!
//! JSON is either a list of entries or `{"frames": [...]}`. CSV has a header
//! row with the same field names; empty cells mean absent. Paths are
//! resolved relative to the manifest file.
//!
//! ```csv
//! id,thermal,rgb,thermal_vis,meta,sheet,agl_m
//! f001,f001.tif,f001.ppm,,f001.jpg,,
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use firescene_core::{FrameMeta, ThermalRaster};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exif::{parse_exif_gps, ExifError};
use crate::raw::{load_raw_raster, RawError};
use crate::tiff::{load_thermal_tiff, TiffError, TiffOptions};

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("{path}: {message}")]
    Read { path: String, message: String },
    #[error("manifest: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thermal: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rgb: Option<String>,
    /// Thermal visualization used when the RGB pair is inconclusive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thermal_vis: Option<String>,
    /// `.json` frame metadata or a JPEG carrying Exif GPS.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sheet: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agl_m: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Thermal,
    Rgb,
    ThermalVis,
    Meta,
    Sheet,
}

impl Field {
    const ALL: [Field; 5] = [
        Field::Thermal,
        Field::Rgb,
        Field::ThermalVis,
        Field::Meta,
        Field::Sheet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Field::Thermal => "thermal",
            Field::Rgb => "rgb",
            Field::ThermalVis => "thermal_vis",
            Field::Meta => "meta",
            Field::Sheet => "sheet",
        }
    }
}

impl FrameEntry {
    pub fn get(&self, field: Field) -> Option<&str> {
        match field {
            Field::Thermal => self.thermal.as_deref(),
            Field::Rgb => self.rgb.as_deref(),
            Field::ThermalVis => self.thermal_vis.as_deref(),
            Field::Meta => self.meta.as_deref(),
            Field::Sheet => self.sheet.as_deref(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub dir: PathBuf,
    pub frames: Vec<FrameEntry>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonManifest {
    List(Vec<FrameEntry>),
    Wrapped { frames: Vec<FrameEntry> },
}

/// Ids become file names, so they are restricted to a portable set.
pub fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let read = |message: String| ManifestError::Read {
            path: path.display().to_string(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| read(e.to_string()))?;
        let is_csv = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        let mut frames = if is_csv {
            let mut reader = csv::ReaderBuilder::new()
                .trim(csv::Trim::All)
                .from_reader(text.as_bytes());
            reader
                .deserialize()
                .collect::<Result<Vec<FrameEntry>, _>>()
                .map_err(|e| read(e.to_string()))?
        } else {
            match serde_json::from_str(&text).map_err(|e| read(e.to_string()))? {
                JsonManifest::List(f) | JsonManifest::Wrapped { frames: f } => f,
            }
        };
        for f in &mut frames {
            for slot in [
                &mut f.thermal,
                &mut f.rgb,
                &mut f.thermal_vis,
                &mut f.meta,
                &mut f.sheet,
            ] {
                if slot.as_deref().is_some_and(str::is_empty) {
                    *slot = None;
                }
            }
        }
        let manifest = Self {
            dir: path.parent().unwrap_or(Path::new("")).to_path_buf(),
            frames,
        };
        manifest.validate()?;
        Ok(manifest)
    }

    fn validate(&self) -> Result<(), ManifestError> {
        let mut seen = BTreeSet::new();
        for f in &self.frames {
            if !valid_id(&f.id) {
                return Err(ManifestError::Invalid(format!(
                    "frame id {:?} must be non-empty ASCII letters, digits, '_', '-' or '.'",
                    f.id
                )));
            }
            if !seen.insert(f.id.as_str()) {
                return Err(ManifestError::Invalid(format!(
                    "duplicate frame id {:?}",
                    f.id
                )));
            }
            if let Some(a) = f.agl_m {
                if !a.is_finite() {
                    return Err(ManifestError::Invalid(format!(
                        "frame {}: agl_m must be finite",
                        f.id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn resolve(&self, rel: &str) -> PathBuf {
        self.dir.join(rel)
    }

    pub fn path(&self, entry: &FrameEntry, field: Field) -> Option<PathBuf> {
        entry.get(field).map(|p| self.resolve(p))
    }

    /// Every listed field must be present; every present path must exist.
    pub fn check(&self, required: &[Field]) -> Result<(), ManifestError> {
        for f in &self.frames {
            for &field in required {
                if f.get(field).is_none() {
                    return Err(ManifestError::Invalid(format!(
                        "frame {}: missing `{}`",
                        f.id,
                        field.name()
                    )));
                }
            }
            for field in Field::ALL {
                if let Some(p) = self.path(f, field) {
                    if !p.is_file() {
                        return Err(ManifestError::Invalid(format!(
                            "frame {}: {} file {} does not exist",
                            f.id,
                            field.name(),
                            p.display()
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Tiff(#[from] TiffError),
    #[error(transparent)]
    Raw(#[from] RawError),
    #[error("{path}: {source}")]
    Exif {
        path: String,
        #[source]
        source: ExifError,
    },
    #[error("{path}: {message}")]
    Other { path: String, message: String },
}

/// `.tif`/`.tiff` radiometric TIFF or `.json` raw sidecar.
pub fn load_thermal(path: &Path, tiff: &TiffOptions) -> Result<ThermalRaster, LoadError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or_default()
        .to_ascii_lowercase();
    match ext.as_str() {
        "tif" | "tiff" => Ok(load_thermal_tiff(path, tiff)?),
        "json" => Ok(load_raw_raster(path)?),
        _ => Err(LoadError::Other {
            path: path.display().to_string(),
            message: "thermal input must be .tif, .tiff or a .json raw sidecar".into(),
        }),
    }
}

/// `.json` frame metadata, otherwise a JPEG with Exif GPS.
pub fn load_meta(path: &Path) -> Result<FrameMeta, LoadError> {
    let other = |message: String| LoadError::Other {
        path: path.display().to_string(),
        message,
    };
    let bytes = std::fs::read(path).map_err(|e| other(e.to_string()))?;
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
    {
        return serde_json::from_slice(&bytes).map_err(|e| other(e.to_string()));
    }
    parse_exif_gps(&bytes)
        .map(|g| g.to_meta())
        .map_err(|source| LoadError::Exif {
            path: path.display().to_string(),
            source,
        })
}
