//! Deterministic scene analysis for radiometric wildfire imagery.
//!
//! The crate turns a single-band temperature raster (plus the UAV altitude
//! above ground) into a hotspot inventory and a set of categorical labels,
//! bins those into benchmark answer options, and audits answer sheets for
//! logical contradictions and near-duplicate disagreements.
//!
//! Pipeline stages:
//!
//! 1. [`raster`] – validated temperature grid, radiometric summary, coverage.
//! 2. [`geodesy`] – geoid/DEM interpolation and height above ground.
//! 3. [`hotspots`] – thresholding, 8-connected labeling, GSD, validity filters.
//! 4. [`spatial`] – single-linkage clustering, isolation, distribution and
//!    intensity-consistency classes.
//! 5. [`labeler`] – per-frame analysis record, answer bins, answer sheet.
//! 6. [`consistency`] – implication rules and near-duplicate group audits.
//! 7. [`features`] – FAST/steered-BRIEF matching with RANSAC homography.
//! 8. [`synth`] – synthetic scenes with independently computed ground truth.
//!
//! Everything here is `no_std` + `alloc`; file formats and the CLI live in the
//! `firescene` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod consistency;
pub mod features;
pub mod geodesy;
pub mod hotspots;
pub mod labeler;
pub mod questions;
pub mod raster;
pub mod spatial;
pub mod synth;

mod math;

pub use consistency::{AuditReport, ImplicationRule, Violation};
pub use features::{GrayImage, MatchConfig, MatchResult};
pub use geodesy::{AltitudeBin, DemSet, DemTile, FrameMeta, GeoidGrid};
pub use hotspots::{Hotspot, HotspotParams, Region};
pub use labeler::{AnalysisParams, AnswerSheet, FrameAnalysis};
pub use raster::{RadiometricSummary, ThermalRaster};
pub use spatial::{
    ClusterSet, IntensityConsistencyLabel, Isolation, SpatialDistributionLabel, SpatialParams,
};

/// Version stamped into every serialized analysis, sheet, and report.
pub const SCHEMA_VERSION: u32 = 1;
