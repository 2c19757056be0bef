//! Validated single-band temperature grids and their scene-level statistics.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math;

/// Lowest temperature accepted as a measurement, in °C.
pub const MIN_VALID_C: f64 = -100.0;
/// Highest temperature accepted as a measurement, in °C.
pub const MAX_VALID_C: f64 = 2000.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RasterError {
    #[error("raster dimensions must be at least 1x1, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },
    #[error("expected {expected} samples for {width}x{height}, got {actual}")]
    LengthMismatch {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },
    #[error("empty raster: no valid pixels")]
    EmptyRaster,
}

/// Row-major grid of temperatures in °C with a per-pixel validity flag.
///
/// Pixel `(x, y)` lives at index `y * width + x`; the origin is the top-left
/// corner. A pixel is valid only if it was measured (not no-data), is finite,
/// and lies in `[MIN_VALID_C, MAX_VALID_C]`. Invalid pixels keep their raw
/// value in `temps` but are ignored by every statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalRaster {
    width: usize,
    height: usize,
    temps: Vec<f64>,
    valid: Vec<bool>,
}

impl ThermalRaster {
    /// Builds a raster, marking non-finite and out-of-range samples invalid.
    pub fn new(width: usize, height: usize, temps: Vec<f64>) -> Result<Self, RasterError> {
        Self::with_nodata(width, height, temps, None)
    }

    /// Like [`ThermalRaster::new`], additionally marking samples equal to
    /// `nodata` invalid.
    pub fn with_nodata(
        width: usize,
        height: usize,
        temps: Vec<f64>,
        nodata: Option<f64>,
    ) -> Result<Self, RasterError> {
        let valid = temps.iter().map(|&t| nodata != Some(t)).collect();
        Self::from_parts(width, height, temps, valid)
    }

    /// Builds a raster from samples and an explicit measured-pixel mask. The
    /// range check is applied on top of `measured`.
    pub fn from_parts(
        width: usize,
        height: usize,
        temps: Vec<f64>,
        measured: Vec<bool>,
    ) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::ZeroDimension { width, height });
        }
        let expected = width
            .checked_mul(height)
            .ok_or(RasterError::ZeroDimension { width, height })?;
        for actual in [temps.len(), measured.len()] {
            if actual != expected {
                return Err(RasterError::LengthMismatch {
                    width,
                    height,
                    expected,
                    actual,
                });
            }
        }
        let valid = temps
            .iter()
            .zip(&measured)
            .map(|(&t, &m)| m && is_plausible(t))
            .collect();
        Ok(Self {
            width,
            height,
            temps,
            valid,
        })
    }

    /// Constant-temperature raster.
    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self, RasterError> {
        Self::new(
            width,
            height,
            alloc::vec![value; width.saturating_mul(height)],
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.temps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.temps.is_empty()
    }

    /// Raw samples, including invalid ones.
    pub fn temps(&self) -> &[f64] {
        &self.temps
    }

    pub fn valid_mask(&self) -> &[bool] {
        &self.valid
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    /// Temperature at `(x, y)`, or `None` when out of bounds or invalid.
    pub fn get(&self, x: usize, y: usize) -> Option<f64> {
        if x >= self.width || y >= self.height {
            return None;
        }
        let i = self.index(x, y);
        self.valid[i].then_some(self.temps[i])
    }

    #[inline]
    pub fn is_valid_index(&self, i: usize) -> bool {
        self.valid[i]
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// Iterator over `(index, temperature)` of valid pixels in row-major order.
    pub fn valid_pixels(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.temps
            .iter()
            .zip(&self.valid)
            .enumerate()
            .filter_map(|(i, (&t, &v))| v.then_some((i, t)))
    }

    /// Swaps the x and y axes.
    pub fn transpose(&self) -> Self {
        let (w, h) = (self.width, self.height);
        let mut temps = Vec::with_capacity(self.temps.len());
        let mut valid = Vec::with_capacity(self.valid.len());
        for x in 0..w {
            for y in 0..h {
                let i = y * w + x;
                temps.push(self.temps[i]);
                valid.push(self.valid[i]);
            }
        }
        Self {
            width: h,
            height: w,
            temps,
            valid,
        }
    }
}

fn is_plausible(t: f64) -> bool {
    t.is_finite() && (MIN_VALID_C..=MAX_VALID_C).contains(&t)
}

/// Scene-level statistics appended to annotation prompts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiometricSummary {
    pub min_c: f64,
    pub max_c: f64,
    pub mean_c: f64,
    /// Population standard deviation.
    pub std_c: f64,
    pub pct_above_200: f64,
    pub pct_above_400: f64,
    pub valid_pixels: usize,
}

/// Statistics over valid pixels. Percentages count pixels at or above the
/// threshold, identically to [`coverage_fraction`].
pub fn summarize(raster: &ThermalRaster) -> Result<RadiometricSummary, RasterError> {
    let n = raster.valid_count();
    if n == 0 {
        return Err(RasterError::EmptyRaster);
    }
    let mut min_c = f64::INFINITY;
    let mut max_c = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for (_, t) in raster.valid_pixels() {
        min_c = min_c.min(t);
        max_c = max_c.max(t);
        sum += t;
    }
    let mean = sum / n as f64;
    let var = raster
        .valid_pixels()
        .map(|(_, t)| (t - mean) * (t - mean))
        .sum::<f64>()
        / n as f64;
    Ok(RadiometricSummary {
        min_c,
        max_c,
        mean_c: mean.clamp(min_c, max_c),
        std_c: math::sqrt(var),
        pct_above_200: percent_at_or_above(raster, 200.0, n),
        pct_above_400: percent_at_or_above(raster, 400.0, n),
        valid_pixels: n,
    })
}

/// Percentage of valid pixels with `T >= tau`.
pub fn coverage_fraction(raster: &ThermalRaster, tau: f64) -> Result<f64, RasterError> {
    let n = raster.valid_count();
    if n == 0 {
        return Err(RasterError::EmptyRaster);
    }
    Ok(percent_at_or_above(raster, tau, n))
}

/// Number of valid pixels with `T >= tau`.
pub fn count_at_or_above(raster: &ThermalRaster, tau: f64) -> usize {
    raster.valid_pixels().filter(|&(_, t)| t >= tau).count()
}

fn percent_at_or_above(raster: &ThermalRaster, tau: f64, n_valid: usize) -> f64 {
    100.0 * count_at_or_above(raster, tau) as f64 / n_valid as f64
}
