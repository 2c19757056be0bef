//! Run parameters: analysis thresholds, matcher settings, audit slots and
//! raster decoding options. Every field defaults; a `--params` file only
//! needs the values it overrides.

use std::path::Path;

use firescene_core::consistency::DEFAULT_FIRE_SLOTS;
use firescene_core::questions;
use firescene_core::{AnalysisParams, HotspotParams, MatchConfig, SpatialParams};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tiff::TiffOptions;

#[derive(Debug, Error)]
pub enum ParamsError {
    #[error("{path}: {message}")]
    Read { path: String, message: String },
    #[error("invalid parameters: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunParams {
    pub hotspot: HotspotParams,
    pub spatial: SpatialParams,
    pub matcher: MatchConfig,
    /// Questions compared across near-duplicate groups.
    pub fire_slots: Vec<String>,
    /// Applied to integer TIFF samples.
    pub tiff: TiffOptions,
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            hotspot: HotspotParams::default(),
            spatial: SpatialParams::default(),
            matcher: MatchConfig::default(),
            fire_slots: DEFAULT_FIRE_SLOTS.iter().map(|s| s.to_string()).collect(),
            tiff: TiffOptions::default(),
        }
    }
}

impl RunParams {
    pub fn load(path: &Path) -> Result<Self, ParamsError> {
        let read = |message: String| ParamsError::Read {
            path: path.display().to_string(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| read(e.to_string()))?;
        let params: Self = serde_json::from_str(&text).map_err(|e| read(e.to_string()))?;
        params.validate()?;
        Ok(params)
    }

    pub fn analysis(&self) -> AnalysisParams {
        AnalysisParams {
            hotspot: self.hotspot,
            spatial: self.spatial,
        }
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        let invalid = |m: String| Err(ParamsError::Invalid(m));
        if let Err(e) = self.analysis().validate() {
            return invalid(e.to_string());
        }
        let m = &self.matcher;
        if m.max_features == 0 || m.inlier_min < 4 || m.ransac_iterations == 0 {
            return invalid(
                "matcher: max_features >= 1, inlier_min >= 4 and ransac_iterations >= 1 required"
                    .into(),
            );
        }
        if !(m.ratio > 0.0 && m.ratio <= 1.0) {
            return invalid(format!("matcher.ratio must be in (0, 1], got {}", m.ratio));
        }
        if !(m.reproj_threshold_px > 0.0 && m.reproj_threshold_px.is_finite()) {
            return invalid(format!(
                "matcher.reproj_threshold_px must be > 0, got {}",
                m.reproj_threshold_px
            ));
        }
        for s in &self.fire_slots {
            if questions::question(s).is_none() {
                return invalid(format!("fire_slots: unknown question {s:?}"));
            }
        }
        let c = self.tiff.calibration;
        if !(c.scale.is_finite() && c.scale != 0.0 && c.offset.is_finite()) {
            return invalid(
                "tiff.calibration: scale must be finite and non-zero, offset finite".into(),
            );
        }
        Ok(())
    }

    pub fn slot_refs(&self) -> Vec<&str> {
        self.fire_slots.iter().map(String::as_str).collect()
    }
}
