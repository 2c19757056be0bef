//! Oriented FAST keypoints, steered BRIEF descriptors, Hamming matching with
//! a ratio test, and RANSAC homography verification.
//!
//! Detector parameters are fixed: FAST-9 on the radius-3 Bresenham circle,
//! intensity threshold 20, 3x3 non-maximum suppression and ranking by Harris
//! response (7x7 window, k = 0.04), intensity-centroid orientation over a
//! radius-15 disk, and a 16 px border margin. Descriptors compare 5x5 box
//! sums at 256 rotated point pairs from [`PATTERN_SEED`]. Detection is single
//! scale.

mod pattern;

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math;
pub(crate) use pattern::PATTERN;

/// Minimum image side accepted by [`detect`].
pub const MIN_IMAGE_SIDE: usize = 32;
/// Keypoints closer than this to any edge are discarded.
pub const BORDER_MARGIN: usize = 16;
const ORIENTATION_RADIUS: i32 = 15;
const HARRIS_HALF_WINDOW: i32 = 3;
const HARRIS_K: f64 = 0.04;
/// Seed of the splitmix64 stream that produced the frozen sampling pattern.
pub const PATTERN_SEED: u64 = 0x6f72_625f_7061_7474;
const PATTERN_RADIUS: i32 = 13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeatureError {
    #[error(
        "image {width}x{height} is smaller than the {MIN_IMAGE_SIDE}x{MIN_IMAGE_SIDE} minimum"
    )]
    ImageTooSmall { width: usize, height: usize },
    #[error("image buffer holds {actual} bytes, expected {expected}")]
    BadBuffer { expected: usize, actual: usize },
    #[error("insufficient correspondences: {0} < 4")]
    InsufficientCorrespondences(usize),
    #[error("every sampled minimal set was degenerate")]
    Degenerate,
}

/// 8-bit single-channel image, row-major.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, FeatureError> {
        if data.len() != width * height {
            return Err(FeatureError::BadBuffer {
                expected: width * height,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    /// Interleaved 8-bit RGB to luma with integer BT.601 weights:
    /// `(77 R + 150 G + 29 B + 128) >> 8`.
    pub fn from_rgb(width: usize, height: usize, rgb: &[u8]) -> Result<Self, FeatureError> {
        if rgb.len() != width * height * 3 {
            return Err(FeatureError::BadBuffer {
                expected: width * height * 3,
                actual: rgb.len(),
            });
        }
        let data = rgb
            .chunks_exact(3)
            .map(|p| luma(p[0], p[1], p[2]))
            .collect();
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    /// Rotates clockwise by 90 degrees: `(x, y)` moves to `(h - 1 - y, x)`.
    pub fn rotate90(&self) -> Self {
        let (w, h) = (self.width, self.height);
        Self::from_fn(h, w, |x, y| self.get(y, h - 1 - x))
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        (self.width, self.height, &self.data).cmp(&(other.width, other.height, &other.data))
    }
}

/// Integer BT.601 luma.
#[inline]
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    ((77 * r as u32 + 150 * g as u32 + 29 * b as u32 + 128) >> 8) as u8
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Keypoint {
    pub x: f64,
    pub y: f64,
    /// Harris corner response.
    pub response: f64,
    /// Intensity-centroid orientation in radians.
    pub angle: f64,
}

/// 256-bit binary descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Descriptor(pub [u64; 4]);

impl Descriptor {
    pub fn bit(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
}

pub fn hamming(a: &Descriptor, b: &Descriptor) -> u32 {
    a.0.iter()
        .zip(&b.0)
        .map(|(x, y)| (x ^ y).count_ones())
        .sum()
}

const CIRCLE: [(i32, i32); 16] = [
    (0, -3),
    (1, -3),
    (2, -2),
    (3, -1),
    (3, 0),
    (3, 1),
    (2, 2),
    (1, 3),
    (0, 3),
    (-1, 3),
    (-2, 2),
    (-3, 1),
    (-3, 0),
    (-3, -1),
    (-2, -2),
    (-1, -3),
];

fn check_size(image: &GrayImage) -> Result<(), FeatureError> {
    if image.width < MIN_IMAGE_SIDE || image.height < MIN_IMAGE_SIDE {
        return Err(FeatureError::ImageTooSmall {
            width: image.width,
            height: image.height,
        });
    }
    Ok(())
}

fn has_arc(flags: u16) -> bool {
    let doubled = flags as u32 | (flags as u32) << 16;
    let mut run = 0;
    for i in 0..32 {
        if doubled >> i & 1 == 1 {
            run += 1;
            if run >= 9 {
                return true;
            }
        } else {
            run = 0;
        }
    }
    false
}

fn is_fast_corner(img: &GrayImage, x: usize, y: usize, threshold: u8) -> bool {
    let c = img.get(x, y) as i32;
    let t = threshold as i32;
    let (mut bright, mut dark) = (0u16, 0u16);
    for (k, (dx, dy)) in CIRCLE.iter().enumerate() {
        let p = img.get((x as i32 + dx) as usize, (y as i32 + dy) as usize) as i32;
        if p > c + t {
            bright |= 1 << k;
        } else if p < c - t {
            dark |= 1 << k;
        }
    }
    has_arc(bright) || has_arc(dark)
}

fn harris_response(img: &GrayImage, x: usize, y: usize) -> f64 {
    let px = |x: i32, y: i32| img.get(x as usize, y as usize) as f64;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    let (cx, cy) = (x as i32, y as i32);
    for v in cy - HARRIS_HALF_WINDOW..=cy + HARRIS_HALF_WINDOW {
        for u in cx - HARRIS_HALF_WINDOW..=cx + HARRIS_HALF_WINDOW {
            let gx = (px(u + 1, v - 1) + 2.0 * px(u + 1, v) + px(u + 1, v + 1))
                - (px(u - 1, v - 1) + 2.0 * px(u - 1, v) + px(u - 1, v + 1));
            let gy = (px(u - 1, v + 1) + 2.0 * px(u, v + 1) + px(u + 1, v + 1))
                - (px(u - 1, v - 1) + 2.0 * px(u, v - 1) + px(u + 1, v - 1));
            sxx += gx * gx;
            syy += gy * gy;
            sxy += gx * gy;
        }
    }
    let tr = sxx + syy;
    sxx * syy - sxy * sxy - HARRIS_K * tr * tr
}

fn orientation(img: &GrayImage, x: usize, y: usize) -> f64 {
    let r = ORIENTATION_RADIUS;
    let (mut m10, mut m01) = (0i64, 0i64);
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy > r * r {
                continue;
            }
            let p = img.get((x as i32 + dx) as usize, (y as i32 + dy) as usize) as i64;
            m10 += dx as i64 * p;
            m01 += dy as i64 * p;
        }
    }
    math::atan2(m01 as f64, m10 as f64)
}

/// FAST-9 corners with the default threshold of 20.
pub fn detect(image: &GrayImage, max_features: usize) -> Result<Vec<Keypoint>, FeatureError> {
    detect_with_threshold(image, max_features, 20)
}

/// FAST-9 corners, suppressed to 3x3 local Harris maxima, strongest first
/// (ties in row-major order), at most `max_features`.
pub fn detect_with_threshold(
    image: &GrayImage,
    max_features: usize,
    threshold: u8,
) -> Result<Vec<Keypoint>, FeatureError> {
    check_size(image)?;
    let (w, h) = (image.width, image.height);
    let m = BORDER_MARGIN;
    let mut response = vec![f64::NEG_INFINITY; w * h];
    let mut corners = Vec::new();
    for y in m..h.saturating_sub(m) {
        for x in m..w.saturating_sub(m) {
            if is_fast_corner(image, x, y, threshold) {
                response[y * w + x] = harris_response(image, x, y);
                corners.push((x, y));
            }
        }
    }
    let mut kept: Vec<(usize, usize, f64)> = corners
        .into_iter()
        .filter(|&(x, y)| {
            let r = response[y * w + x];
            (y - 1..=y + 1).all(|v| (x - 1..=x + 1).all(|u| response[v * w + u] <= r))
        })
        .map(|(x, y)| (x, y, response[y * w + x]))
        .collect();
    kept.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.1.cmp(&b.1)).then(a.0.cmp(&b.0)));
    kept.truncate(max_features);
    Ok(kept
        .into_iter()
        .map(|(x, y, r)| Keypoint {
            x: x as f64,
            y: y as f64,
            response: r,
            angle: orientation(image, x, y),
        })
        .collect())
}

/// 5x5 box sums with edge clamping, via an integral image.
fn box_sums(img: &GrayImage) -> Vec<u16> {
    let (w, h) = (img.width, img.height);
    let mut integral = vec![0u32; (w + 1) * (h + 1)];
    for y in 0..h {
        let mut row = 0u32;
        for x in 0..w {
            row += img.get(x, y) as u32;
            integral[(y + 1) * (w + 1) + x + 1] = integral[y * (w + 1) + x + 1] + row;
        }
    }
    let mut out = vec![0u16; w * h];
    for y in 0..h {
        let (y0, y1) = (y.saturating_sub(2), (y + 3).min(h));
        for x in 0..w {
            let (x0, x1) = (x.saturating_sub(2), (x + 3).min(w));
            let s = integral[y1 * (w + 1) + x1] + integral[y0 * (w + 1) + x0]
                - integral[y0 * (w + 1) + x1]
                - integral[y1 * (w + 1) + x0];
            out[y * w + x] = s as u16;
        }
    }
    out
}

fn inside_margin(image: &GrayImage, k: &Keypoint) -> bool {
    let m = BORDER_MARGIN as f64;
    k.x >= m
        && k.y >= m
        && k.x < (image.width - BORDER_MARGIN) as f64
        && k.y < (image.height - BORDER_MARGIN) as f64
}

/// Steered BRIEF descriptors. Keypoints within the border margin are dropped;
/// the returned keypoints align 1:1 with the descriptors.
pub fn describe(
    image: &GrayImage,
    keypoints: &[Keypoint],
) -> Result<(Vec<Keypoint>, Vec<Descriptor>), FeatureError> {
    check_size(image)?;
    let sums = box_sums(image);
    let w = image.width as i32;
    let mut kps = Vec::with_capacity(keypoints.len());
    let mut descs = Vec::with_capacity(keypoints.len());
    for k in keypoints.iter().filter(|k| inside_margin(image, k)) {
        let (s, c) = (math::sin(k.angle), math::cos(k.angle));
        let (cx, cy) = (math::round(k.x) as i32, math::round(k.y) as i32);
        let sample = |px: i8, py: i8| {
            let (px, py) = (px as f64, py as f64);
            let rx = math::round(c * px - s * py) as i32;
            let ry = math::round(s * px + c * py) as i32;
            sums[((cy + ry) * w + cx + rx) as usize]
        };
        let mut bits = [0u64; 4];
        for (i, p) in PATTERN.iter().enumerate() {
            if sample(p[0], p[1]) < sample(p[2], p[3]) {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        kps.push(*k);
        descs.push(Descriptor(bits));
    }
    Ok((kps, descs))
}

/// Regenerates the sampling pattern: splitmix64 from `seed`; each point draws
/// `x` then `y` as `next % 27 - 13` until it falls in the radius-13 disk; the
/// second point of a pair is redrawn while it equals the first.
pub fn generate_pattern(seed: u64) -> [[i8; 4]; 256] {
    let mut state = seed;
    let mut next = move || {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    };
    let side = 2 * PATTERN_RADIUS as u64 + 1;
    let mut point = move || loop {
        let x = (next() % side) as i32 - PATTERN_RADIUS;
        let y = (next() % side) as i32 - PATTERN_RADIUS;
        if x * x + y * y <= PATTERN_RADIUS * PATTERN_RADIUS {
            return (x as i8, y as i8);
        }
    };
    let mut out = [[0i8; 4]; 256];
    for row in out.iter_mut() {
        let a = point();
        let mut b = point();
        while b == a {
            b = point();
        }
        *row = [a.0, a.1, b.0, b.1];
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptorMatch {
    pub query: usize,
    pub train: usize,
    pub distance: u32,
}

/// Nearest neighbour in `b` for each descriptor of `a`, kept iff
/// `d1 < ratio * d2`. Ties resolve to the lower index. With a single
/// candidate in `b` there is no second neighbour and the match is kept.
pub fn match_descriptors(a: &[Descriptor], b: &[Descriptor], ratio: f64) -> Vec<DescriptorMatch> {
    if b.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (qi, q) in a.iter().enumerate() {
        let (mut best, mut d1, mut d2) = (0usize, u32::MAX, u32::MAX);
        for (ti, t) in b.iter().enumerate() {
            let d = hamming(q, t);
            if d < d1 {
                d2 = d1;
                d1 = d;
                best = ti;
            } else if d < d2 {
                d2 = d;
            }
        }
        if b.len() == 1 || (d1 as f64) < ratio * d2 as f64 {
            out.push(DescriptorMatch {
                query: qi,
                train: best,
                distance: d1,
            });
        }
    }
    out
}

/// Maps `p` through a row-major homography; `None` at infinity.
pub fn project(h: &[f64; 9], p: [f64; 2]) -> Option<[f64; 2]> {
    let w = h[6] * p[0] + h[7] * p[1] + h[8];
    if w.abs() < 1e-12 {
        return None;
    }
    Some([
        (h[0] * p[0] + h[1] * p[1] + h[2]) / w,
        (h[3] * p[0] + h[4] * p[1] + h[5]) / w,
    ])
}

fn reprojection_error(h: &[f64; 9], src: [f64; 2], dst: [f64; 2]) -> f64 {
    match project(h, src) {
        Some(p) => math::hypot(p[0] - dst[0], p[1] - dst[1]),
        None => f64::INFINITY,
    }
}

/// Similarity normalization: centroid to the origin, mean distance sqrt(2).
fn normalizer(points: &[[f64; 2]]) -> Option<[f64; 9]> {
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = points.iter().map(|p| p[1]).sum::<f64>() / n;
    let mean = points
        .iter()
        .map(|p| math::hypot(p[0] - cx, p[1] - cy))
        .sum::<f64>()
        / n;
    if !(mean > 1e-12) {
        return None;
    }
    let s = core::f64::consts::SQRT_2 / mean;
    Some([s, 0.0, -s * cx, 0.0, s, -s * cy, 0.0, 0.0, 1.0])
}

fn apply_affine(t: &[f64; 9], p: [f64; 2]) -> [f64; 2] {
    [t[0] * p[0] + t[2], t[4] * p[1] + t[5]]
}

fn mat_mul(a: &[f64; 9], b: &[f64; 9]) -> [f64; 9] {
    let mut out = [0.0; 9];
    for r in 0..3 {
        for c in 0..3 {
            out[r * 3 + c] = (0..3).map(|k| a[r * 3 + k] * b[k * 3 + c]).sum();
        }
    }
    out
}

/// Gaussian elimination with partial pivoting on an 8x8 system.
fn solve8(mut a: [[f64; 8]; 8], mut b: [f64; 8]) -> Option<[f64; 8]> {
    for col in 0..8 {
        let pivot = (col..8).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..8 {
            let f = a[row][col] / a[col][col];
            for k in col..8 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 8];
    for row in (0..8).rev() {
        let s: f64 = (row + 1..8).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn dlt_rows(s: [f64; 2], d: [f64; 2]) -> [([f64; 8], f64); 2] {
    let (x, y, u, v) = (s[0], s[1], d[0], d[1]);
    [
        ([x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y], u),
        ([0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y], v),
    ]
}

/// Least-squares homography with `h33 = 1` over normalized correspondences.
/// Exactly four points give the minimal solution.
fn fit_normalized(pairs: impl Iterator<Item = ([f64; 2], [f64; 2])>) -> Option<[f64; 9]> {
    let mut ata = [[0.0; 8]; 8];
    let mut atb = [0.0; 8];
    for (s, d) in pairs {
        for (row, rhs) in dlt_rows(s, d) {
            for i in 0..8 {
                for j in 0..8 {
                    ata[i][j] += row[i] * row[j];
                }
                atb[i] += row[i] * rhs;
            }
        }
    }
    let h = solve8(ata, atb)?;
    Some([h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0])
}

fn minimal_fit(src: &[[f64; 2]; 4], dst: &[[f64; 2]; 4]) -> Option<[f64; 9]> {
    let mut a = [[0.0; 8]; 8];
    let mut b = [0.0; 8];
    for k in 0..4 {
        for (r, (row, rhs)) in dlt_rows(src[k], dst[k]).into_iter().enumerate() {
            a[2 * k + r] = row;
            b[2 * k + r] = rhs;
        }
    }
    let h = solve8(a, b)?;
    Some([h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0])
}

fn has_collinear_triple(p: &[[f64; 2]; 4]) -> bool {
    const TRIPLES: [(usize, usize, usize); 4] = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)];
    TRIPLES.iter().any(|&(i, j, k)| {
        let cross =
            (p[j][0] - p[i][0]) * (p[k][1] - p[i][1]) - (p[j][1] - p[i][1]) * (p[k][0] - p[i][0]);
        cross.abs() < 1e-9
    })
}

/// Pixel-space homography from a normalized-space one, scaled to `h33 = 1`.
fn denormalize(hn: &[f64; 9], t_src: &[f64; 9], t_dst: &[f64; 9]) -> Option<[f64; 9]> {
    let s = t_dst[0];
    let inv_dst = [
        1.0 / s,
        0.0,
        -t_dst[2] / s,
        0.0,
        1.0 / s,
        -t_dst[5] / s,
        0.0,
        0.0,
        1.0,
    ];
    let h = mat_mul(&inv_dst, &mat_mul(hn, t_src));
    if h[8].abs() < 1e-12 || h.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(h.map(|v| v / h[8]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RansacResult {
    /// Row-major, bottom-right entry 1.
    pub homography: Option<[f64; 9]>,
    pub inliers: usize,
    pub inlier_mask: Vec<bool>,
}

fn count_inliers(
    h: &[f64; 9],
    pairs: &[([f64; 2], [f64; 2])],
    threshold: f64,
) -> (usize, Vec<bool>) {
    let mask: Vec<bool> = pairs
        .iter()
        .map(|&(s, d)| reprojection_error(h, s, d) < threshold)
        .collect();
    (mask.iter().filter(|&&m| m).count(), mask)
}

/// Seeded RANSAC over minimal four-point fits in normalized coordinates. The
/// best model by inlier count (earliest on ties) is refit on all its
/// inliers; the refit is kept unless it loses inliers.
pub fn ransac_homography(
    pairs: &[([f64; 2], [f64; 2])],
    reproj_threshold: f64,
    iterations: usize,
    seed: u64,
) -> Result<RansacResult, FeatureError> {
    let n = pairs.len();
    if n < 4 {
        return Err(FeatureError::InsufficientCorrespondences(n));
    }
    let src: Vec<[f64; 2]> = pairs.iter().map(|p| p.0).collect();
    let dst: Vec<[f64; 2]> = pairs.iter().map(|p| p.1).collect();
    let (Some(t_src), Some(t_dst)) = (normalizer(&src), normalizer(&dst)) else {
        return Err(FeatureError::Degenerate);
    };
    let ns: Vec<[f64; 2]> = src.iter().map(|&p| apply_affine(&t_src, p)).collect();
    let nd: Vec<[f64; 2]> = dst.iter().map(|&p| apply_affine(&t_dst, p)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<([f64; 9], usize, Vec<bool>)> = None;
    for _ in 0..iterations {
        let mut idx = [0usize; 4];
        let mut k = 0;
        while k < 4 {
            let c = rng.gen_range(0..n);
            if !idx[..k].contains(&c) {
                idx[k] = c;
                k += 1;
            }
        }
        let s4 = idx.map(|i| ns[i]);
        let d4 = idx.map(|i| nd[i]);
        if has_collinear_triple(&s4) || has_collinear_triple(&d4) {
            continue;
        }
        let Some(h) = minimal_fit(&s4, &d4).and_then(|hn| denormalize(&hn, &t_src, &t_dst)) else {
            continue;
        };
        let (count, mask) = count_inliers(&h, pairs, reproj_threshold);
        if best.as_ref().map_or(true, |b| count > b.1) {
            best = Some((h, count, mask));
            if count == n {
                break;
            }
        }
    }
    let Some((mut h, mut count, mut mask)) = best else {
        return Err(FeatureError::Degenerate);
    };
    let refit = fit_normalized(
        mask.iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| (ns[i], nd[i])),
    )
    .and_then(|hn| denormalize(&hn, &t_src, &t_dst));
    if let Some(r) = refit {
        let (rc, rm) = count_inliers(&r, pairs, reproj_threshold);
        if rc >= count {
            h = r;
            count = rc;
            mask = rm;
        }
    }
    Ok(RansacResult {
        homography: (count >= 4).then_some(h),
        inliers: count,
        inlier_mask: mask,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatchConfig {
    pub max_features: usize,
    pub fast_threshold: u8,
    pub ratio: f64,
    pub reproj_threshold_px: f64,
    pub inlier_min: usize,
    pub ransac_iterations: usize,
    pub seed: u64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            max_features: 8000,
            fast_threshold: 20,
            ratio: 0.8,
            reproj_threshold_px: 20.0,
            inlier_min: 15,
            ransac_iterations: 2000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub keypoints_a: usize,
    pub keypoints_b: usize,
    /// Nearest-neighbour pairs before the ratio test.
    pub putative: usize,
    pub survivors: usize,
    pub inliers: usize,
    /// Maps the canonically first image onto the second.
    pub homography: Option<[f64; 9]>,
    pub near_duplicate: bool,
}

/// Full detect, describe, match, verify pipeline. The inputs are put in a
/// canonical order first so that swapping them gives the same result.
pub fn match_images(
    a: &GrayImage,
    b: &GrayImage,
    cfg: &MatchConfig,
) -> Result<MatchResult, FeatureError> {
    let (a, b) = if a.canonical_cmp(b) == Ordering::Greater {
        (b, a)
    } else {
        (a, b)
    };
    let (ka, da) = describe(
        a,
        &detect_with_threshold(a, cfg.max_features, cfg.fast_threshold)?,
    )?;
    let (kb, db) = describe(
        b,
        &detect_with_threshold(b, cfg.max_features, cfg.fast_threshold)?,
    )?;
    let putative = if db.is_empty() { 0 } else { da.len() };
    let matches = match_descriptors(&da, &db, cfg.ratio);
    let pairs: Vec<([f64; 2], [f64; 2])> = matches
        .iter()
        .map(|m| {
            (
                [ka[m.query].x, ka[m.query].y],
                [kb[m.train].x, kb[m.train].y],
            )
        })
        .collect();
    let (inliers, homography) = match ransac_homography(
        &pairs,
        cfg.reproj_threshold_px,
        cfg.ransac_iterations,
        cfg.seed,
    ) {
        Ok(r) => (r.inliers, r.homography),
        Err(FeatureError::InsufficientCorrespondences(_) | FeatureError::Degenerate) => (0, None),
        Err(e) => return Err(e),
    };
    Ok(MatchResult {
        keypoints_a: ka.len(),
        keypoints_b: kb.len(),
        putative,
        survivors: matches.len(),
        inliers,
        homography,
        near_duplicate: inliers >= cfg.inlier_min,
    })
}
