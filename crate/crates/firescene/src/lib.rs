//! File formats, batch pipeline and command-line front end for
//! [`firescene_core`].
//!
//! Readers cover radiometric TIFF, raw fixtures with a JSON sidecar, SRTM
//! `.hgt` tiles, geoid grids, Exif GPS and Netpbm images. [`cli`] drives the
//! `analyze`, `audit`, `agl` and `synth` commands over a frame manifest.

pub mod cli;
pub mod exif;
pub mod geo;
pub mod ifd;
pub mod images;
pub mod manifest;
pub mod params;
pub mod raw;
pub mod tiff;

pub use firescene_core as core;
