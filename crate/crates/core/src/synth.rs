//! Synthetic radiometric scenes with ground truth computed by a separate
//! brute-force path, plus simple textured images for the matcher.
//!
//! The truth path deliberately shares no code with the analysis modules:
//! components come from an explicit-stack flood fill, clusters from a
//! breadth-first search, linearity from the closed-form 2x2 eigenvalues of
//! the sample covariance, medians from order-statistic counting, and the
//! coverage bins from integer comparisons.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::GrayImage;
use crate::hotspots::Region;
use crate::raster::ThermalRaster;
use crate::spatial::{IntensityConsistencyLabel, Isolation, SpatialDistributionLabel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid scene: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// `peak` for pixels whose center lies within `radius_px`.
    Disk,
    /// `bg + (peak - bg) * exp(-d^2 / (2 sigma^2))` with `sigma = radius_px`.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Blob {
    pub center_px: [f64; 2],
    pub radius_px: f64,
    pub peak_c: f64,
    pub profile: Profile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub background_c: f64,
    /// Uniform noise amplitude added to the background, `+-noise_c`.
    #[serde(default)]
    pub noise_c: f64,
    pub blobs: Vec<Blob>,
    pub agl_m: f64,
    pub fov_diag_deg: f64,
}

impl SceneSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::InvalidSpec(m.into()));
        if self.width == 0 || self.height == 0 {
            return bad("dimensions must be >= 1");
        }
        if !self.background_c.is_finite() || !(self.noise_c >= 0.0 && self.noise_c.is_finite()) {
            return bad("background and noise must be finite, noise >= 0");
        }
        if !(self.agl_m > 0.0 && self.agl_m.is_finite()) {
            return bad("agl_m must be > 0");
        }
        if !(self.fov_diag_deg > 0.0 && self.fov_diag_deg < 180.0) {
            return bad("fov_diag_deg must be in (0, 180)");
        }
        for b in &self.blobs {
            if !(b.radius_px > 0.0 && b.radius_px.is_finite()) {
                return bad("blob radius must be > 0");
            }
            if !(b.peak_c > self.background_c && b.peak_c <= 2000.0) {
                return bad("blob peak must exceed the background and stay <= 2000");
            }
            let [cx, cy] = b.center_px;
            let (w, h) = ((self.width - 1) as f64, (self.height - 1) as f64);
            if !(cx - b.radius_px >= 0.0
                && cy - b.radius_px >= 0.0
                && cx + b.radius_px <= w
                && cy + b.radius_px <= h)
            {
                return bad("blob does not fit inside the raster");
            }
        }
        Ok(())
    }

    pub fn gsd(&self) -> f64 {
        let half = self.fov_diag_deg * core::f64::consts::PI / 360.0;
        self.agl_m * 2.0 * libm::tan(half) / self.width as f64
    }
}

/// Expected analysis outcome under the default thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneTruth {
    pub gsd_m: f64,
    pub hotspot_count: usize,
    pub centroids_px: Vec<[f64; 2]>,
    pub areas_m2: Vec<f64>,
    pub peaks_c: Vec<f64>,
    pub sdl: SpatialDistributionLabel,
    pub hicl: IntensityConsistencyLabel,
    pub isolation: Isolation,
    pub pixels_at_or_above_200: usize,
    pub pixels_at_or_above_400: usize,
    pub p200_option: &'static str,
    pub p400_option: &'static str,
    pub hottest_region: Region,
}

/// Renders the scene and computes its truth.
pub fn render(spec: &SceneSpec, seed: u64) -> Result<(ThermalRaster, SceneTruth), SynthError> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut temps = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let mut t = spec.background_c;
            if spec.noise_c > 0.0 {
                t += rng.gen_range(-spec.noise_c..=spec.noise_c);
            }
            for b in &spec.blobs {
                let dx = x as f64 - b.center_px[0];
                let dy = y as f64 - b.center_px[1];
                let d2 = dx * dx + dy * dy;
                let v = match b.profile {
                    Profile::Disk if d2 <= b.radius_px * b.radius_px => b.peak_c,
                    Profile::Disk => continue,
                    Profile::Gaussian => {
                        spec.background_c
                            + (b.peak_c - spec.background_c)
                                * libm::exp(-d2 / (2.0 * b.radius_px * b.radius_px))
                    }
                };
                if v > t {
                    t = v;
                }
            }
            temps.push(t);
        }
    }
    let truth = truth_of(&temps, w, h, spec.gsd());
    let raster = ThermalRaster::new(w, h, temps)
        .map_err(|e| SynthError::InvalidSpec(alloc::format!("{e}")))?;
    Ok((raster, truth))
}

struct Blobby {
    centroid: [f64; 2],
    area: f64,
    peak: f64,
    peak_index: usize,
}

/// Brute-force truth for a fully valid row-major temperature grid.
fn truth_of(temps: &[f64], w: usize, h: usize, gsd: f64) -> SceneTruth {
    let hot: Vec<bool> = temps.iter().map(|&t| t >= 200.0).collect();
    let mut seen = vec![false; w * h];
    let mut spots: Vec<Blobby> = Vec::new();
    for start in 0..w * h {
        if !hot[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut members = Vec::new();
        while let Some(i) = stack.pop() {
            members.push(i);
            let (x, y) = ((i % w) as i64, (i / w) as i64);
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let j = ny as usize * w + nx as usize;
                    if hot[j] && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        let count = members.len();
        let area = count as f64 * gsd * gsd;
        // r >= 0.75 compared without a square root: A / pi >= 0.5625.
        if count < 5 || area / core::f64::consts::PI < 0.5625 {
            continue;
        }
        members.sort_unstable();
        let mut peak_index = members[0];
        for &i in &members {
            if temps[i] > temps[peak_index] {
                peak_index = i;
            }
        }
        let sx: usize = members.iter().map(|i| i % w).sum();
        let sy: usize = members.iter().map(|i| i / w).sum();
        spots.push(Blobby {
            centroid: [sx as f64 / count as f64, sy as f64 / count as f64],
            area,
            peak: temps[peak_index],
            peak_index,
        });
    }

    let n = spots.len();
    let dist = |a: &Blobby, b: &Blobby| {
        libm::hypot(
            (a.centroid[0] - b.centroid[0]) * gsd,
            (a.centroid[1] - b.centroid[1]) * gsd,
        )
    };

    // Clusters by breadth-first search over the d <= 10 graph.
    let mut cluster_of = vec![usize::MAX; n];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if cluster_of[s] != usize::MAX {
            continue;
        }
        let k = clusters.len();
        cluster_of[s] = k;
        let mut queue = VecDeque::from([s]);
        let mut members = Vec::new();
        while let Some(i) = queue.pop_front() {
            members.push(i);
            for j in 0..n {
                if cluster_of[j] == usize::MAX && dist(&spots[i], &spots[j]) <= 10.0 {
                    cluster_of[j] = k;
                    queue.push_back(j);
                }
            }
        }
        clusters.push(members);
    }
    let isolation = if n == 0 {
        Isolation::NoFire
    } else {
        let areas: Vec<f64> = clusters
            .iter()
            .map(|c| c.iter().map(|&i| spots[i].area).sum())
            .collect();
        let mut main = 0;
        for k in 1..areas.len() {
            if areas[k] > areas[main] {
                main = k;
            }
        }
        let far = clusters.iter().enumerate().any(|(k, c)| {
            k != main
                && c.iter().all(|&i| {
                    clusters[main]
                        .iter()
                        .all(|&j| dist(&spots[i], &spots[j]) >= 30.0)
                })
        });
        if far {
            Isolation::Yes
        } else {
            Isolation::No
        }
    };

    let mut d_max: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d_max = d_max.max(dist(&spots[i], &spots[j]));
            }
        }
    }
    let sdl = if n == 0 {
        SpatialDistributionLabel::NoActiveHotspots
    } else if (n == 2 && d_max > 20.0)
        || (n >= 3 && d_max > 20.0 && eigen_linearity(&spots, gsd) >= 0.9)
    {
        SpatialDistributionLabel::Linear
    } else {
        let total: f64 = spots.iter().map(|s| s.area).sum();
        // D_max <= 4 r_eq, squared: D_max^2 <= 16 A / pi.
        if d_max * d_max <= 16.0 * total / core::f64::consts::PI {
            SpatialDistributionLabel::Concentrated
        } else {
            SpatialDistributionLabel::Scattered
        }
    };

    let peaks: Vec<f64> = spots.iter().map(|s| s.peak).collect();
    let hicl = if n == 0 {
        IntensityConsistencyLabel::NoActiveHotspots
    } else {
        let med = selection_median(&peaks);
        let deviations: Vec<f64> = peaks
            .iter()
            .map(|p| if *p > med { p - med } else { med - p })
            .collect();
        let mad = selection_median(&deviations);
        let denom = if med > 1e-6 { med } else { 1e-6 };
        let rcv = 1.4826 * mad / denom;
        let spread = peaks.iter().fold(f64::MIN, |a, &b| a.max(b))
            - peaks.iter().fold(f64::MAX, |a, &b| a.min(b));
        if rcv <= 0.1 || spread <= 20.0 {
            IntensityConsistencyLabel::SimilarIntensity
        } else {
            IntensityConsistencyLabel::ClearlyDifferent
        }
    };

    let c200 = temps.iter().filter(|&&t| t >= 200.0).count();
    let c400 = temps.iter().filter(|&&t| t >= 400.0).count();
    let total = w * h;
    let p400_option = match c400 {
        0 => "None",
        c if c * 100 < 2 * total => "<2%",
        c if c * 100 < 4 * total => "2–4%",
        c if c * 100 < 6 * total => "4–6%",
        _ => ">6%",
    };
    let p200_option = match c200 {
        0 => "None",
        c if c * 100 < 5 * total => "<5%",
        c if c * 100 < 10 * total => "5–10%",
        c if c * 100 < 15 * total => "10–15%",
        _ => ">15%",
    };

    let hottest_region = match spots.iter().map(|s| s.peak_index).reduce(|a, b| {
        if temps[b] > temps[a] || (temps[b] == temps[a] && b < a) {
            b
        } else {
            a
        }
    }) {
        None => Region::NoHotspots,
        Some(i) => {
            let (x, y) = (i % w, i / w);
            if 3 * x >= w && 3 * x < 2 * w && 3 * y >= h && 3 * y < 2 * h {
                Region::Center
            } else {
                match (2 * x >= w, 2 * y >= h) {
                    (false, false) => Region::TopLeft,
                    (true, false) => Region::TopRight,
                    (false, true) => Region::BottomLeft,
                    (true, true) => Region::BottomRight,
                }
            }
        }
    };

    SceneTruth {
        gsd_m: gsd,
        hotspot_count: n,
        centroids_px: spots.iter().map(|s| s.centroid).collect(),
        areas_m2: spots.iter().map(|s| s.area).collect(),
        peaks_c: peaks,
        sdl,
        hicl,
        isolation,
        pixels_at_or_above_200: c200,
        pixels_at_or_above_400: c400,
        p200_option,
        p400_option,
        hottest_region,
    }
}

/// `l1 / (l1 + l2)` from the closed-form eigenvalues of the sample
/// covariance; 0 when all centroids coincide.
fn eigen_linearity(spots: &[Blobby], gsd: f64) -> f64 {
    let n = spots.len() as f64;
    let mx = spots.iter().map(|s| s.centroid[0] * gsd).sum::<f64>() / n;
    let my = spots.iter().map(|s| s.centroid[1] * gsd).sum::<f64>() / n;
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for s in spots {
        let (dx, dy) = (s.centroid[0] * gsd - mx, s.centroid[1] * gsd - my);
        a += dx * dx;
        b += dx * dy;
        c += dy * dy;
    }
    let (a, b, c) = (a / (n - 1.0), b / (n - 1.0), c / (n - 1.0));
    let tr = a + c;
    let det = a * c - b * b;
    if tr <= 0.0 {
        return 0.0;
    }
    let disc = libm::sqrt((tr * tr - 4.0 * det).max(0.0));
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    l1 / (l1 + l2)
}

/// Median by counting: the k-th smallest value is the one with fewer than
/// `k` smaller elements and at least `k` elements no larger.
fn selection_median(v: &[f64]) -> f64 {
    let kth = |k: usize| {
        *v.iter()
            .find(|&&x| {
                let less = v.iter().filter(|&&y| y < x).count();
                let le = v.iter().filter(|&&y| y <= x).count();
                less < k && le >= k
            })
            .expect("non-empty")
    };
    let n = v.len();
    if n % 2 == 1 {
        kth(n / 2 + 1)
    } else {
        (kth(n / 2) + kth(n / 2 + 1)) / 2.0
    }
}

/// Ground radius the validity filter keys on.
pub const FUZZ_R_MIN_M: f64 = 0.75;

/// Seeded scene specs cycling through layouts that probe the classifier
/// boundaries: empty frames, single blobs, lines, tight clusters, scattered
/// blobs, pairs near the merge and line distances, isolated satellites, radii
/// near the validity limit, near-collinear triples, and gaussian blobs with
/// peaks around 200 and 400 °C.
pub fn fuzz_specs(count: usize, seed: u64) -> Vec<SceneSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| fuzz_one(&mut rng, i % 10)).collect()
}

fn peak(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..4) {
        0 => rng.gen_range(180.0..220.0),
        1 => rng.gen_range(380.0..420.0),
        2 => rng.gen_range(450.0..470.0),
        _ => rng.gen_range(250.0..900.0),
    }
}

fn place(
    spec: &mut SceneSpec,
    rng: &mut ChaCha8Rng,
    origin: [f64; 2],
    angle: f64,
    offsets_m: &[(f64, f64)],
    r_m: f64,
) {
    let gsd = spec.gsd();
    let (s, c) = (libm::sin(angle), libm::cos(angle));
    for &(along, across) in offsets_m {
        let x = origin[0] + (along * c - across * s) / gsd;
        let y = origin[1] + (along * s + across * c) / gsd;
        let radius_px = r_m * rng.gen_range(0.9..1.1) / gsd;
        let peak_c = peak(rng);
        spec.blobs.push(Blob {
            center_px: [x, y],
            radius_px,
            peak_c,
            profile: Profile::Disk,
        });
    }
}

fn fuzz_one(rng: &mut ChaCha8Rng, kind: usize) -> SceneSpec {
    let (width, height) = (160usize, 128usize);
    let agl_m = rng.gen_range(50.0..120.0);
    let mut spec = SceneSpec {
        width,
        height,
        background_c: rng.gen_range(10.0..40.0),
        noise_c: if rng.gen_bool(0.5) {
            rng.gen_range(0.0..5.0)
        } else {
            0.0
        },
        blobs: Vec::new(),
        agl_m,
        fov_diag_deg: 61.0,
    };
    let gsd = spec.gsd();
    let px = |m: f64| m / gsd;
    let disk = |c: [f64; 2], r_m: f64, peak_c: f64| Blob {
        center_px: c,
        radius_px: r_m / gsd,
        peak_c,
        profile: Profile::Disk,
    };
    let mid = [width as f64 / 2.0, height as f64 / 2.0];
    match kind {
        0 => {}
        1 => {
            let c = [rng.gen_range(20.0..140.0), rng.gen_range(20.0..108.0)];
            let r_m = rng.gen_range(1.2..4.0);
            place(&mut spec, rng, c, 0.0, &[(0.0, 0.0)], r_m);
        }
        2 => {
            let k = rng.gen_range(3..7);
            let step = rng.gen_range(5.0..9.0);
            let offs: Vec<(f64, f64)> = (0..k)
                .map(|i| {
                    (
                        (i as f64 - (k - 1) as f64 / 2.0) * step,
                        rng.gen_range(-0.3..0.3),
                    )
                })
                .collect();
            let angle = rng.gen_range(0.0..core::f64::consts::PI);
            let r_m = rng.gen_range(1.2..1.8);
            place(&mut spec, rng, mid, angle, &offs, r_m);
        }
        3 => {
            let k = rng.gen_range(2..6);
            let offs: Vec<(f64, f64)> = (0..k)
                .map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
                .collect();
            let r_m = rng.gen_range(1.5..2.5);
            place(&mut spec, rng, mid, 0.0, &offs, r_m);
        }
        4 => {
            let k = rng.gen_range(3..9);
            let (hw, hh) = (px(1.5) + 2.0, px(1.5) + 2.0);
            for _ in 0..k {
                let c = [
                    rng.gen_range(hw..width as f64 - hw - 1.0),
                    rng.gen_range(hh..height as f64 - hh - 1.0),
                ];
                spec.blobs.push(disk(c, rng.gen_range(1.0..1.4), peak(rng)));
            }
        }
        5 => {
            let d = if rng.gen_bool(0.5) {
                10.0 + rng.gen_range(-0.6..0.6)
            } else {
                20.0 + rng.gen_range(-0.6..0.6)
            };
            let angle = rng.gen_range(0.0..3.0);
            let r_m = rng.gen_range(1.0..1.5);
            place(
                &mut spec,
                rng,
                mid,
                angle,
                &[(-d / 2.0, 0.0), (d / 2.0, 0.0)],
                r_m,
            );
        }
        6 => {
            let gap = 30.0 + rng.gen_range(-2.0..2.0);
            let r = rng.gen_range(1.0..1.5);
            place(
                &mut spec,
                rng,
                mid,
                0.0,
                &[(-gap / 2.0, 0.0), (-gap / 2.0 - 4.0, 1.0)],
                r * 1.3,
            );
            place(&mut spec, rng, mid, 0.0, &[(gap / 2.0, 0.0)], r);
        }
        7 => {
            let k = rng.gen_range(1..4);
            let offs: Vec<(f64, f64)> = (0..k).map(|i| (i as f64 * 8.0 - 8.0, 0.0)).collect();
            let r_m = FUZZ_R_MIN_M * rng.gen_range(0.95..1.05);
            let (s, c) = (0.0f64, 1.0f64);
            for (along, across) in offs {
                let x = mid[0] + px(along * c - across * s);
                let y = mid[1] + px(along * s + across * c);
                spec.blobs.push(disk([x, y], r_m, peak(rng)));
            }
        }
        8 => {
            let spread = rng.gen_range(1.5..4.0);
            let offs = [
                (-12.0, 0.0),
                (0.0, spread),
                (12.0, 0.0),
                (rng.gen_range(-4.0..4.0), -spread),
            ];
            let k = rng.gen_range(3..5);
            let angle = rng.gen_range(0.0..3.0);
            place(&mut spec, rng, mid, angle, &offs[..k], 1.2);
        }
        _ => {
            let k = rng.gen_range(1..4);
            for i in 0..k {
                let sigma = rng.gen_range(1.5..4.0);
                let c = [
                    30.0 + 40.0 * i as f64 + rng.gen_range(-5.0..5.0),
                    rng.gen_range(20.0..108.0),
                ];
                let peak_c = if rng.gen_bool(0.5) {
                    rng.gen_range(190.0..230.0)
                } else {
                    rng.gen_range(390.0..430.0)
                };
                spec.blobs.push(Blob {
                    center_px: c,
                    radius_px: sigma,
                    peak_c,
                    profile: Profile::Gaussian,
                });
            }
        }
    }
    spec
}

/// Piecewise-constant random rectangles over a smooth gradient: plenty of
/// corners for the detector.
pub fn texture_image(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data: Vec<u8> = (0..width * height)
        .map(|i| {
            let (x, y) = (i % width, i / width);
            (64 + (x * 64 / width.max(1)) + (y * 32 / height.max(1))) as u8
        })
        .collect();
    let count = (width * height / 400).max(8);
    for _ in 0..count {
        let rw = rng.gen_range(4..=(width / 6).max(5));
        let rh = rng.gen_range(4..=(height / 6).max(5));
        let x0 = rng.gen_range(0..width.saturating_sub(rw).max(1));
        let y0 = rng.gen_range(0..height.saturating_sub(rh).max(1));
        let v: u8 = rng.gen();
        for y in y0..(y0 + rh).min(height) {
            for x in x0..(x0 + rw).min(width) {
                data[y * width + x] = v;
            }
        }
    }
    GrayImage::new(width, height, data).expect("sized buffer")
}

/// Independent uniform bytes.
pub fn noise_image(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GrayImage::from_fn(width, height, |_, _| rng.gen())
}

/// Rotates by `angle_deg` about the image center, then shifts by
/// `(tx, ty)`; bilinear sampling, `fill` outside the source.
pub fn warp_similarity(img: &GrayImage, angle_deg: f64, tx: f64, ty: f64, fill: u8) -> GrayImage {
    let (w, h) = (img.width(), img.height());
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    let a = angle_deg.to_radians();
    let (s, c) = (libm::sin(a), libm::cos(a));
    GrayImage::from_fn(w, h, |x, y| {
        let (u, v) = (x as f64 - tx - cx, y as f64 - ty - cy);
        let sx = c * u + s * v + cx;
        let sy = -s * u + c * v + cy;
        if sx < 0.0 || sy < 0.0 || sx > (w - 1) as f64 || sy > (h - 1) as f64 {
            return fill;
        }
        let (x0, y0) = (sx as usize, sy as usize);
        let (x1, y1) = ((x0 + 1).min(w - 1), (y0 + 1).min(h - 1));
        let (fx, fy) = (sx - x0 as f64, sy - y0 as f64);
        let p = |x: usize, y: usize| img.get(x, y) as f64;
        let top = p(x0, y0) * (1.0 - fx) + p(x1, y0) * fx;
        let bottom = p(x0, y1) * (1.0 - fx) + p(x1, y1) * fx;
        libm::round(top * (1.0 - fy) + bottom * fy) as u8
    })
}

/// Forward map of [`warp_similarity`] for a source point.
pub fn similarity_point(
    w: usize,
    h: usize,
    angle_deg: f64,
    tx: f64,
    ty: f64,
    p: [f64; 2],
) -> [f64; 2] {
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    let a = angle_deg.to_radians();
    let (s, c) = (libm::sin(a), libm::cos(a));
    let (u, v) = (p[0] - cx, p[1] - cy);
    [c * u - s * v + cx + tx, s * u + c * v + cy + ty]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labeler::{analyze_frame, AnalysisParams};
    use alloc::collections::BTreeSet;

    fn blank(blobs: Vec<Blob>, agl_m: f64) -> SceneSpec {
        SceneSpec {
            width: 160,
            height: 128,
            background_c: 25.0,
            noise_c: 0.0,
            blobs,
            agl_m,
            fov_diag_deg: 61.0,
        }
    }

    fn agl_for_gsd(gsd: f64, width: usize) -> f64 {
        gsd * width as f64 / (2.0 * libm::tan(30.5f64.to_radians()))
    }

    #[test]
    fn single_disk_truth() {
        let spec = blank(
            vec![Blob {
                center_px: [80.0, 64.0],
                radius_px: 10.0,
                peak_c: 450.0,
                profile: Profile::Disk,
            }],
            60.0,
        );
        let (r, t) = render(&spec, 1).unwrap();
        assert_eq!(t.hotspot_count, 1);
        // Lattice points in a radius-10 disk.
        assert_eq!(t.pixels_at_or_above_400, 317);
        let p400 = 100.0 * t.pixels_at_or_above_400 as f64 / r.len() as f64;
        let ideal = 100.0 * core::f64::consts::PI * 100.0 / r.len() as f64;
        assert!((p400 - ideal).abs() < 100.0 * 2.0 * core::f64::consts::PI * 10.0 / r.len() as f64);
        assert_eq!(t.centroids_px[0], [80.0, 64.0]);
        assert_eq!(t.hottest_region, Region::Center);
    }

    #[test]
    fn zero_blobs_truth() {
        let (_, t) = render(&blank(vec![], 60.0), 0).unwrap();
        assert_eq!(t.hotspot_count, 0);
        assert_eq!(t.sdl, SpatialDistributionLabel::NoActiveHotspots);
        assert_eq!(t.isolation, Isolation::NoFire);
        assert_eq!(t.p200_option, "None");
    }

    #[test]
    fn three_collinear_disks_are_linear() {
        let agl = agl_for_gsd(1.0, 160);
        let blobs = [40.0, 52.0, 64.0]
            .iter()
            .map(|&x| Blob {
                center_px: [x, 60.0],
                radius_px: 2.0,
                peak_c: 500.0,
                profile: Profile::Disk,
            })
            .collect();
        let (_, t) = render(&blank(blobs, agl), 0).unwrap();
        assert!((t.gsd_m - 1.0).abs() < 1e-12);
        assert_eq!(t.hotspot_count, 3);
        assert_eq!(t.sdl, SpatialDistributionLabel::Linear);
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut s = blank(
            vec![Blob {
                center_px: [2.0, 2.0],
                radius_px: 5.0,
                peak_c: 400.0,
                profile: Profile::Disk,
            }],
            60.0,
        );
        assert!(render(&s, 0).is_err());
        s.blobs[0].center_px = [50.0, 50.0];
        s.blobs[0].peak_c = 10.0;
        assert!(render(&s, 0).is_err());
        s.blobs[0].peak_c = 300.0;
        s.agl_m = 0.0;
        assert!(render(&s, 0).is_err());
    }

    #[test]
    fn selection_median_matches_sorting() {
        assert_eq!(selection_median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(selection_median(&[4.0, 1.0, 1.0, 3.0]), 2.0);
        assert_eq!(selection_median(&[5.0, 5.0, 5.0, 1.0]), 5.0);
    }

    #[test]
    fn fuzz_is_reproducible() {
        assert_eq!(fuzz_specs(100, 7), fuzz_specs(100, 7));
        assert_ne!(fuzz_specs(10, 7), fuzz_specs(10, 8));
    }

    #[test]
    fn fuzz_specs_are_valid_and_probe_r_min() {
        let specs = fuzz_specs(200, 7);
        for s in &specs {
            s.validate().unwrap();
        }
        let near = specs
            .iter()
            .flat_map(|s| s.blobs.iter().map(move |b| b.radius_px * s.gsd()))
            .filter(|r| (r / FUZZ_R_MIN_M - 1.0).abs() <= 0.05)
            .count();
        assert!(near > 0);
    }

    #[test]
    fn fuzz_covers_every_distribution_class() {
        for seed in [7u64, 11, 2024] {
            let classes: BTreeSet<_> = fuzz_specs(100, seed)
                .iter()
                .enumerate()
                .map(|(i, s)| alloc::format!("{:?}", render(s, i as u64).unwrap().1.sdl))
                .collect();
            assert_eq!(classes.len(), 4, "seed {seed}: {classes:?}");
        }
    }

    #[test]
    fn library_agrees_with_truth_on_fuzz_scenes() {
        let params = AnalysisParams::default();
        for (i, spec) in fuzz_specs(120, 3).iter().enumerate() {
            let (r, t) = render(spec, i as u64).unwrap();
            let a = analyze_frame("s", &r, Some(spec.agl_m), &params).unwrap();
            let hs = a.hotspots.as_ref().unwrap();
            assert_eq!(hs.len(), t.hotspot_count, "scene {i}");
            assert_eq!(a.sdl, Some(t.sdl), "scene {i}");
            assert_eq!(a.hicl, Some(t.hicl), "scene {i}");
            assert_eq!(a.isolated, Some(t.isolation), "scene {i}");
            assert_eq!(a.hottest_region, Some(t.hottest_region), "scene {i}");
        }
    }

    #[test]
    fn warp_point_matches_image_warp() {
        let mut img = GrayImage::from_fn(64, 64, |_, _| 0);
        img = GrayImage::from_fn(64, 64, |x, y| {
            if (x, y) == (20, 30) {
                255
            } else {
                img.get(x, y)
            }
        });
        let warped = warp_similarity(&img, 90.0, 0.0, 0.0, 0);
        let p = similarity_point(64, 64, 90.0, 0.0, 0.0, [20.0, 30.0]);
        assert!(warped.get(libm::round(p[0]) as usize, libm::round(p[1]) as usize) > 200);
    }
}
