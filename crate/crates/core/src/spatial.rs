//! Spatial organization and intensity consistency of a frame's hotspots.
//!
//! All distances are centroid distances in meters (pixel offsets scaled by
//! the frame GSD).

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hotspots::Hotspot;
use crate::math;

/// MAD to standard-deviation consistency factor for normal data.
pub const MAD_SCALE: f64 = 1.4826;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpatialError {
    #[error("linearity needs at least 2 hotspots, got {0}")]
    TooFewPoints(usize),
    #[error("all hotspot centroids coincide; linearity is undefined")]
    Degenerate,
    #[error("invalid spatial parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpatialParams {
    /// Single-linkage merge distance.
    pub d_merge_m: f64,
    /// Minimum gap between a secondary cluster and the main cluster.
    pub isolation_m: f64,
    pub tau_lin: f64,
    pub d_lin_m: f64,
    /// Compactness factor on the equivalent radius.
    pub alpha: f64,
    pub tau_sim: f64,
    pub delta_t_sim_c: f64,
    pub epsilon: f64,
}

impl Default for SpatialParams {
    fn default() -> Self {
        Self {
            d_merge_m: 10.0,
            isolation_m: 30.0,
            tau_lin: 0.90,
            d_lin_m: 20.0,
            alpha: 4.0,
            tau_sim: 0.10,
            delta_t_sim_c: 20.0,
            epsilon: 1e-6,
        }
    }
}

impl SpatialParams {
    pub fn validate(&self) -> Result<(), SpatialError> {
        let fields = [
            ("d_merge_m", self.d_merge_m),
            ("isolation_m", self.isolation_m),
            ("tau_lin", self.tau_lin),
            ("d_lin_m", self.d_lin_m),
            ("alpha", self.alpha),
            ("tau_sim", self.tau_sim),
            ("delta_t_sim_c", self.delta_t_sim_c),
            ("epsilon", self.epsilon),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SpatialError::InvalidParams(alloc::format!(
                    "{name} must be > 0, got {v}"
                )));
            }
        }
        if !(self.tau_lin > 0.5 && self.tau_lin <= 1.0) {
            return Err(SpatialError::InvalidParams(alloc::format!(
                "tau_lin must be in (0.5, 1], got {}",
                self.tau_lin
            )));
        }
        Ok(())
    }
}

/// Centroid distance in meters.
pub fn centroid_distance(a: &Hotspot, b: &Hotspot, gsd: f64) -> f64 {
    let dx = (a.centroid_px[0] - b.centroid_px[0]) * gsd;
    let dy = (a.centroid_px[1] - b.centroid_px[1]) * gsd;
    math::sqrt(dx * dx + dy * dy)
}

/// Single-linkage partition of hotspot indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSet {
    /// Each cluster lists hotspot indices ascending; clusters are ordered by
    /// their smallest member, which is also their id.
    pub clusters: Vec<Vec<usize>>,
    pub total_area_m2: Vec<f64>,
    /// Cluster with the largest total area, lowest id on ties.
    pub main_index: Option<usize>,
}

impl ClusterSet {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn main(&self) -> Option<&[usize]> {
        self.main_index.map(|k| self.clusters[k].as_slice())
    }
}

/// Transitive closure of `d_ij <= d_merge`.
pub fn single_linkage_clusters(
    hotspots: &[Hotspot],
    gsd: f64,
    params: &SpatialParams,
) -> ClusterSet {
    let n = hotspots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if centroid_distance(&hotspots[i], &hotspots[j], gsd) <= params.d_merge_m {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = clusters.len();
            clusters.push(Vec::new());
        }
        clusters[slot[r]].push(i);
    }
    let total_area_m2: Vec<f64> = clusters
        .iter()
        .map(|c| c.iter().map(|&i| hotspots[i].area_m2).sum())
        .collect();
    let mut main_index = None;
    for (k, &a) in total_area_m2.iter().enumerate() {
        match main_index {
            Some(m) if total_area_m2[m] >= a => {}
            _ => main_index = Some(k),
        }
    }
    ClusterSet {
        clusters,
        total_area_m2,
        main_index,
    }
}

/// Isolated-heat-source verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Isolation {
    Yes,
    No,
    NoFire,
}

impl Isolation {
    pub fn option(self) -> &'static str {
        match self {
            Isolation::Yes => "Yes",
            Isolation::No => "No",
            Isolation::NoFire => "No fire",
        }
    }
}

impl fmt::Display for Isolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.option())
    }
}

/// `Yes` when some non-main cluster's nearest hotspot is at least
/// `isolation_m` from every hotspot of the main cluster.
pub fn isolated_heat_sources(
    clusters: &ClusterSet,
    hotspots: &[Hotspot],
    gsd: f64,
    params: &SpatialParams,
) -> Isolation {
    let Some(main_k) = clusters.main_index else {
        return Isolation::NoFire;
    };
    if hotspots.is_empty() {
        return Isolation::NoFire;
    }
    let main = &clusters.clusters[main_k];
    let isolated = clusters
        .clusters
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != main_k)
        .any(|(_, cluster)| {
            let gap = cluster
                .iter()
                .flat_map(|&i| main.iter().map(move |&j| (i, j)))
                .map(|(i, j)| centroid_distance(&hotspots[i], &hotspots[j], gsd))
                .fold(f64::INFINITY, f64::min);
            gap >= params.isolation_m
        });
    if isolated {
        Isolation::Yes
    } else {
        Isolation::No
    }
}

fn ground_points(hotspots: &[Hotspot], gsd: f64) -> Vec<[f64; 2]> {
    hotspots
        .iter()
        .map(|h| [h.centroid_px[0] * gsd, h.centroid_px[1] * gsd])
        .collect()
}

/// `lambda1 / (lambda1 + lambda2)` of the centroid covariance (1/N
/// normalization). 1 for collinear centroids, 0.5 for isotropic ones.
pub fn linearity_of_points(points: &[[f64; 2]]) -> Result<f64, SpatialError> {
    let n = points.len();
    if n < 2 {
        return Err(SpatialError::TooFewPoints(n));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p[0]).sum::<f64>() / nf;
    let my = points.iter().map(|p| p[1]).sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p[0] - mx, p[1] - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let (a, c, b) = (sxx / nf, syy / nf, sxy / nf);
    let trace = a + c;
    if !(trace > 0.0) {
        return Err(SpatialError::Degenerate);
    }
    let half = 0.5 * trace;
    let r = math::hypot(0.5 * (a - c), b);
    let l1 = half + r;
    let l2 = (half - r).max(0.0);
    Ok((l1 / (l1 + l2)).clamp(0.5, 1.0))
}

/// Linearity of ground-projected hotspot centroids.
pub fn linearity_score(hotspots: &[Hotspot], gsd: f64) -> Result<f64, SpatialError> {
    linearity_of_points(&ground_points(hotspots, gsd))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpatialDistributionLabel {
    NoActiveHotspots,
    Linear,
    Concentrated,
    Scattered,
}

impl SpatialDistributionLabel {
    pub fn option(self) -> &'static str {
        match self {
            SpatialDistributionLabel::NoActiveHotspots => "No active hotspots",
            SpatialDistributionLabel::Linear => "Linear",
            SpatialDistributionLabel::Concentrated => "Concentrated",
            SpatialDistributionLabel::Scattered => "Scattered",
        }
    }
}

impl fmt::Display for SpatialDistributionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.option())
    }
}

/// Distribution label together with the quantities that decided it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionDetails {
    pub label: SpatialDistributionLabel,
    /// Present for three or more hotspots with distinct centroids.
    pub linearity: Option<f64>,
    pub d_max_m: f64,
    pub r_eq_m: f64,
}

pub fn distribution_details(
    hotspots: &[Hotspot],
    gsd: f64,
    params: &SpatialParams,
) -> DistributionDetails {
    let n = hotspots.len();
    let a_tot: f64 = hotspots.iter().map(|h| h.area_m2).sum();
    let r_eq_m = math::sqrt(a_tot / core::f64::consts::PI);
    let mut d_max_m: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            d_max_m = d_max_m.max(centroid_distance(&hotspots[i], &hotspots[j], gsd));
        }
    }
    let linearity = if n >= 3 {
        linearity_score(hotspots, gsd).ok()
    } else {
        None
    };
    let label = if n == 0 {
        SpatialDistributionLabel::NoActiveHotspots
    } else if (n == 2 && d_max_m > params.d_lin_m)
        || (n >= 3 && d_max_m > params.d_lin_m && linearity.is_some_and(|l| l >= params.tau_lin))
    {
        SpatialDistributionLabel::Linear
    } else if d_max_m <= params.alpha * r_eq_m {
        SpatialDistributionLabel::Concentrated
    } else {
        SpatialDistributionLabel::Scattered
    };
    DistributionDetails {
        label,
        linearity,
        d_max_m,
        r_eq_m,
    }
}

pub fn classify_distribution(
    hotspots: &[Hotspot],
    gsd: f64,
    params: &SpatialParams,
) -> SpatialDistributionLabel {
    distribution_details(hotspots, gsd, params).label
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntensityConsistencyLabel {
    NoActiveHotspots,
    SimilarIntensity,
    ClearlyDifferent,
}

impl IntensityConsistencyLabel {
    pub fn label(self) -> &'static str {
        match self {
            IntensityConsistencyLabel::NoActiveHotspots => "No active hotspots",
            IntensityConsistencyLabel::SimilarIntensity => "Similar intensity",
            IntensityConsistencyLabel::ClearlyDifferent => "Clearly different",
        }
    }

    /// Answer-sheet wording.
    pub fn option(self) -> &'static str {
        match self {
            IntensityConsistencyLabel::NoActiveHotspots => "No active hotspots",
            IntensityConsistencyLabel::SimilarIntensity => "Similar intensity",
            IntensityConsistencyLabel::ClearlyDifferent => "Different intensity",
        }
    }
}

impl fmt::Display for IntensityConsistencyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityStats {
    pub label: IntensityConsistencyLabel,
    pub median_c: Option<f64>,
    pub mad_c: Option<f64>,
    /// Robust coefficient of variation, `1.4826 * MAD / max(median, eps)`.
    pub rcv: Option<f64>,
    /// Peak spread `max - min`.
    pub delta_c: Option<f64>,
}

pub fn intensity_stats(hotspots: &[Hotspot], params: &SpatialParams) -> IntensityStats {
    let peaks: Vec<f64> = hotspots.iter().map(|h| h.peak_temp_c).collect();
    let Some(median) = math::median(&peaks) else {
        return IntensityStats {
            label: IntensityConsistencyLabel::NoActiveHotspots,
            median_c: None,
            mad_c: None,
            rcv: None,
            delta_c: None,
        };
    };
    let deviations: Vec<f64> = peaks.iter().map(|p| (p - median).abs()).collect();
    let mad = math::median(&deviations).unwrap_or(0.0);
    let rcv = MAD_SCALE * mad / median.max(params.epsilon);
    let hi = peaks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = peaks.iter().copied().fold(f64::INFINITY, f64::min);
    let delta = hi - lo;
    let label = if rcv <= params.tau_sim || delta <= params.delta_t_sim_c {
        IntensityConsistencyLabel::SimilarIntensity
    } else {
        IntensityConsistencyLabel::ClearlyDifferent
    };
    IntensityStats {
        label,
        median_c: Some(median),
        mad_c: Some(mad),
        rcv: Some(rcv),
        delta_c: Some(delta),
    }
}

pub fn intensity_consistency(
    hotspots: &[Hotspot],
    params: &SpatialParams,
) -> IntensityConsistencyLabel {
    intensity_stats(hotspots, params).label
}
