//! Hot-pixel thresholding, 8-connected labeling, and physically filtered
//! hotspots.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math;
use crate::raster::ThermalRaster;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HotspotError {
    #[error("altitude above ground must be positive and finite, got {0} m")]
    NonPositiveAltitude(f64),
    #[error("image width must be >= 1")]
    ZeroWidth,
    #[error("invalid hotspot parameters: {0}")]
    InvalidParams(String),
}

/// Thresholds for hotspot validity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HotspotParams {
    pub temp_threshold_c: f64,
    pub r_min_m: f64,
    pub n_min_px: usize,
    pub fov_diag_deg: f64,
}

impl Default for HotspotParams {
    fn default() -> Self {
        Self {
            temp_threshold_c: 200.0,
            r_min_m: 0.75,
            n_min_px: 5,
            fov_diag_deg: 61.0,
        }
    }
}

impl HotspotParams {
    pub fn validate(&self) -> Result<(), HotspotError> {
        let bad = |what: &str| Err(HotspotError::InvalidParams(what.into()));
        if !(self.temp_threshold_c > 0.0 && self.temp_threshold_c.is_finite()) {
            return bad("temp_threshold_c must be > 0");
        }
        if !(self.r_min_m > 0.0 && self.r_min_m.is_finite()) {
            return bad("r_min_m must be > 0");
        }
        if self.n_min_px == 0 {
            return bad("n_min_px must be >= 1");
        }
        if !(self.fov_diag_deg > 0.0 && self.fov_diag_deg < 180.0) {
            return bad("fov_diag_deg must be in (0, 180)");
        }
        Ok(())
    }
}

/// Binary mask over a raster grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Self {
        assert_eq!(
            bits.len(),
            width * height,
            "mask length must equal width*height"
        );
        Self {
            width,
            height,
            bits,
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Valid pixels with `T >= threshold`.
pub fn hot_mask(raster: &ThermalRaster, threshold: f64) -> Mask {
    let bits = raster
        .temps()
        .iter()
        .zip(raster.valid_mask())
        .map(|(&t, &v)| v && t >= threshold)
        .collect();
    Mask::new(raster.width(), raster.height(), bits)
}

/// One maximal 8-connected set of mask pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub id: usize,
    /// Row-major pixel indices in ascending order.
    pub pixels: Vec<usize>,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        // Keep the smaller provisional label as root.
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi] = lo;
    }
}

/// Two-pass union-find labeling with 8-connectivity. Component ids follow
/// the row-major order in which each component is first encountered.
pub fn connected_components(mask: &Mask) -> Vec<Component> {
    let (w, h) = (mask.width, mask.height);
    const NONE: usize = usize::MAX;
    let mut labels = vec![NONE; w * h];
    let mut parent: Vec<usize> = Vec::new();

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if !mask.bits[i] {
                continue;
            }
            let mut current = NONE;
            // Already-visited neighbours: W, NW, N, NE.
            let mut neighbours = [NONE; 4];
            if x > 0 {
                neighbours[0] = labels[i - 1];
            }
            if y > 0 {
                let up = i - w;
                if x > 0 {
                    neighbours[1] = labels[up - 1];
                }
                neighbours[2] = labels[up];
                if x + 1 < w {
                    neighbours[3] = labels[up + 1];
                }
            }
            for &n in neighbours.iter().filter(|&&n| n != NONE) {
                if current == NONE {
                    current = n;
                } else {
                    union(&mut parent, current, n);
                }
            }
            if current == NONE {
                current = parent.len();
                parent.push(current);
            }
            labels[i] = current;
        }
    }

    // Roots are the smallest provisional label in their set, and provisional
    // labels are issued in scan order, so sorting by root gives first-encounter order.
    let mut root_to_id = vec![NONE; parent.len()];
    let mut components: Vec<Component> = Vec::new();
    for i in 0..w * h {
        let l = labels[i];
        if l == NONE {
            continue;
        }
        let root = find(&mut parent, l);
        if root_to_id[root] == NONE {
            root_to_id[root] = components.len();
            components.push(Component {
                id: components.len(),
                pixels: Vec::new(),
            });
        }
        components[root_to_id[root]].pixels.push(i);
    }
    components
}

/// Ground sampling distance in m/px: `2 H tan(theta / 2) / W`, with `theta`
/// the diagonal field of view applied to the image width.
pub fn gsd(agl_m: f64, fov_diag_deg: f64, width_px: usize) -> Result<f64, HotspotError> {
    if !(agl_m > 0.0 && agl_m.is_finite()) {
        return Err(HotspotError::NonPositiveAltitude(agl_m));
    }
    if width_px == 0 {
        return Err(HotspotError::ZeroWidth);
    }
    let half = fov_diag_deg.to_radians() / 2.0;
    Ok(2.0 * agl_m * math::tan(half) / width_px as f64)
}

/// A connected thermally active region that passed the validity filters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hotspot {
    /// Index of the underlying connected component.
    pub id: usize,
    pub pixel_count: usize,
    /// Unweighted mean of pixel coordinates `(x, y)`.
    pub centroid_px: [f64; 2],
    /// `centroid_px * gsd`, frame-local meters.
    pub centroid_m: [f64; 2],
    pub area_m2: f64,
    /// Equivalent circular radius `sqrt(area / pi)`.
    pub radius_m: f64,
    pub peak_temp_c: f64,
    /// First maximum in row-major order.
    pub peak_px: [usize; 2],
}

/// A hotspot together with the pixels it covers.
#[derive(Debug, Clone, PartialEq)]
pub struct HotspotRegion {
    pub hotspot: Hotspot,
    pub pixels: Vec<usize>,
}

/// Thresholds, labels, and filters hotspots by `N >= n_min` and `r >= r_min`.
pub fn extract_hotspot_regions(
    raster: &ThermalRaster,
    agl_m: f64,
    params: &HotspotParams,
) -> Result<Vec<HotspotRegion>, HotspotError> {
    params.validate()?;
    let gsd = gsd(agl_m, params.fov_diag_deg, raster.width())?;
    let pixel_area = gsd * gsd;
    let mask = hot_mask(raster, params.temp_threshold_c);
    let w = raster.width();

    let mut out = Vec::new();
    for comp in connected_components(&mask) {
        let n = comp.pixels.len();
        let area_m2 = n as f64 * pixel_area;
        let radius_m = math::sqrt(area_m2 / core::f64::consts::PI);
        if n < params.n_min_px || radius_m < params.r_min_m {
            continue;
        }
        let (mut sx, mut sy) = (0.0, 0.0);
        let mut peak = f64::NEG_INFINITY;
        let mut peak_idx = comp.pixels[0];
        for &i in &comp.pixels {
            sx += (i % w) as f64;
            sy += (i / w) as f64;
            let t = raster.temps()[i];
            if t > peak {
                peak = t;
                peak_idx = i;
            }
        }
        let centroid_px = [sx / n as f64, sy / n as f64];
        out.push(HotspotRegion {
            hotspot: Hotspot {
                id: comp.id,
                pixel_count: n,
                centroid_px,
                centroid_m: [centroid_px[0] * gsd, centroid_px[1] * gsd],
                area_m2,
                radius_m,
                peak_temp_c: peak,
                peak_px: [peak_idx % w, peak_idx / w],
            },
            pixels: comp.pixels,
        });
    }
    Ok(out)
}

/// Valid hotspots sorted by id.
pub fn extract_hotspots(
    raster: &ThermalRaster,
    agl_m: f64,
    params: &HotspotParams,
) -> Result<Vec<Hotspot>, HotspotError> {
    Ok(extract_hotspot_regions(raster, agl_m, params)?
        .into_iter()
        .map(|r| r.hotspot)
        .collect())
}

/// Frame region of the most intense hotspot pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
    Center,
    NoHotspots,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::TopLeft => "Top-left",
            Region::TopRight => "Top-right",
            Region::BottomLeft => "Bottom-left",
            Region::BottomRight => "Bottom-right",
            Region::Center => "Center",
            Region::NoHotspots => "No hotspots",
        }
    }

    /// Answer-sheet option text.
    pub fn option(self) -> &'static str {
        match self {
            Region::TopLeft => "TL",
            Region::TopRight => "TR",
            Region::BottomLeft => "BL",
            Region::BottomRight => "BR",
            Region::Center => "Center",
            Region::NoHotspots => "No hotspots",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Center is the middle third on both axes (`x in [W/3, 2W/3)`); everything
/// else goes to a quadrant split at the midlines, midline pixels counting as
/// right/bottom. Integer arithmetic keeps the boundaries exact.
pub fn region_of(x: usize, y: usize, width: usize, height: usize) -> Region {
    let in_mid = |v: usize, n: usize| 3 * v >= n && 3 * v < 2 * n;
    if in_mid(x, width) && in_mid(y, height) {
        return Region::Center;
    }
    let left = 2 * x < width;
    let top = 2 * y < height;
    match (left, top) {
        (true, true) => Region::TopLeft,
        (false, true) => Region::TopRight,
        (true, false) => Region::BottomLeft,
        (false, false) => Region::BottomRight,
    }
}

/// Region of the hottest pixel over all hotspots, first in row-major order
/// on ties.
pub fn hottest_location(raster: &ThermalRaster, hotspots: &[Hotspot]) -> Region {
    let best = hotspots.iter().max_by(|a, b| {
        a.peak_temp_c.total_cmp(&b.peak_temp_c).then_with(|| {
            // Earlier row-major position wins, so it must compare greater.
            let ia = (a.peak_px[1], a.peak_px[0]);
            let ib = (b.peak_px[1], b.peak_px[0]);
            ib.cmp(&ia)
        })
    });
    match best {
        None => Region::NoHotspots,
        Some(h) => region_of(h.peak_px[0], h.peak_px[1], raster.width(), raster.height()),
    }
}
