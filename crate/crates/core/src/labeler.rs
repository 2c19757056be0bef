//! Per-frame analysis record, answer binning, and the deterministic answer
//! sheet.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geodesy::altitude_bin;
use crate::hotspots::{self, Hotspot, HotspotError, HotspotParams, Region};
use crate::questions::{self, QUESTIONS};
use crate::raster::{self, RadiometricSummary, RasterError, ThermalRaster};
use crate::spatial::{
    self, ClusterSet, DistributionDetails, IntensityConsistencyLabel, IntensityStats, Isolation,
    SpatialDistributionLabel, SpatialError, SpatialParams,
};
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabelError {
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Hotspot(#[from] HotspotError),
    #[error(transparent)]
    Spatial(#[from] SpatialError),
    #[error("percentage {0} outside [0, 100]")]
    OutOfRange(f64),
    #[error("unknown question id {0:?}")]
    UnknownQuestion(String),
    #[error("option {option:?} is not a canonical choice for {question}")]
    NonCanonical { question: String, option: String },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisParams {
    pub hotspot: HotspotParams,
    pub spatial: SpatialParams,
}

impl AnalysisParams {
    pub fn validate(&self) -> Result<(), LabelError> {
        self.hotspot.validate()?;
        self.spatial.validate()?;
        Ok(())
    }
}

/// A field that could not be computed, with the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

/// Complete deterministic output for one frame.
///
/// Fields that depend on the ground sampling distance are `None` when no
/// usable altitude was supplied; `errors` then explains why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameAnalysis {
    pub schema_version: u32,
    pub frame_id: String,
    pub params: AnalysisParams,
    pub width: usize,
    pub height: usize,
    pub summary: RadiometricSummary,
    pub p200: f64,
    pub p400: f64,
    pub pixels_at_or_above_200: usize,
    pub pixels_at_or_above_400: usize,
    pub agl_m: Option<f64>,
    pub gsd_m: Option<f64>,
    pub hotspots: Option<Vec<Hotspot>>,
    pub clusters: Option<ClusterSet>,
    pub sdl: Option<SpatialDistributionLabel>,
    pub distribution: Option<DistributionDetails>,
    pub hicl: Option<IntensityConsistencyLabel>,
    pub intensity: Option<IntensityStats>,
    pub isolated: Option<Isolation>,
    pub hottest_region: Option<Region>,
    pub errors: Vec<FieldError>,
}

const GSD_FIELDS: &[&str] = &[
    "hotspots",
    "clusters",
    "sdl",
    "hicl",
    "isolated",
    "hottest_region",
];

/// Runs the full per-frame pipeline. Without a positive `agl_m` only the
/// radiometric fields are filled.
pub fn analyze_frame(
    frame_id: &str,
    raster: &ThermalRaster,
    agl_m: Option<f64>,
    params: &AnalysisParams,
) -> Result<FrameAnalysis, LabelError> {
    params.validate()?;
    let summary = raster::summarize(raster)?;
    let mut out = FrameAnalysis {
        schema_version: SCHEMA_VERSION,
        frame_id: frame_id.to_string(),
        params: *params,
        width: raster.width(),
        height: raster.height(),
        summary,
        p200: summary.pct_above_200,
        p400: summary.pct_above_400,
        pixels_at_or_above_200: raster::count_at_or_above(raster, 200.0),
        pixels_at_or_above_400: raster::count_at_or_above(raster, 400.0),
        agl_m,
        gsd_m: None,
        hotspots: None,
        clusters: None,
        sdl: None,
        distribution: None,
        hicl: None,
        intensity: None,
        isolated: None,
        hottest_region: None,
        errors: Vec::new(),
    };

    let gsd = match agl_m {
        None => Err("no altitude above ground available".to_string()),
        Some(h) => {
            hotspots::gsd(h, params.hotspot.fov_diag_deg, raster.width()).map_err(|e| e.to_string())
        }
    };
    let gsd = match gsd {
        Ok(g) => g,
        Err(message) => {
            for f in GSD_FIELDS {
                out.errors.push(FieldError {
                    field: (*f).to_string(),
                    message: message.clone(),
                });
            }
            return Ok(out);
        }
    };

    let hs = hotspots::extract_hotspots(raster, agl_m.unwrap_or_default(), &params.hotspot)?;
    let clusters = spatial::single_linkage_clusters(&hs, gsd, &params.spatial);
    let distribution = spatial::distribution_details(&hs, gsd, &params.spatial);
    let intensity = spatial::intensity_stats(&hs, &params.spatial);
    out.isolated = Some(spatial::isolated_heat_sources(
        &clusters,
        &hs,
        gsd,
        &params.spatial,
    ));
    out.hottest_region = Some(hotspots::hottest_location(raster, &hs));
    out.gsd_m = Some(gsd);
    out.sdl = Some(distribution.label);
    out.distribution = Some(distribution);
    out.hicl = Some(intensity.label);
    out.intensity = Some(intensity);
    out.clusters = Some(clusters);
    out.hotspots = Some(hs);
    Ok(out)
}

fn check_pct(p: f64) -> Result<(), LabelError> {
    if (0.0..=100.0).contains(&p) {
        Ok(())
    } else {
        Err(LabelError::OutOfRange(p))
    }
}

/// Lower-inclusive bins; "None" only for exactly zero coverage.
fn bin_coverage(
    p: f64,
    edges: [f64; 3],
    options: [&'static str; 5],
) -> Result<&'static str, LabelError> {
    check_pct(p)?;
    if p == 0.0 {
        return Ok(options[0]);
    }
    let k = edges.iter().take_while(|&&e| p >= e).count();
    Ok(options[1 + k])
}

/// DS7 option for the percentage of pixels at or above 400 °C.
pub fn bin_p400(p: f64) -> Result<&'static str, LabelError> {
    bin_coverage(p, [2.0, 4.0, 6.0], ["None", "<2%", "2–4%", "4–6%", ">6%"])
}

/// DS8 option for the percentage of pixels at or above 200 °C.
pub fn bin_p200(p: f64) -> Result<&'static str, LabelError> {
    bin_coverage(
        p,
        [5.0, 10.0, 15.0],
        ["None", "<5%", "5–10%", "10–15%", ">15%"],
    )
}

/// CMR4 option for a hotspot peak temperature. `None` below 100 °C.
pub fn bin_peak_value(peak_c: f64) -> Option<&'static str> {
    const BINS: [(f64, &str); 5] = [
        (500.0, ">500"),
        (400.0, "400–500"),
        (300.0, "300–400"),
        (200.0, "200–300"),
        (100.0, "100–200"),
    ];
    BINS.iter().find(|&&(lo, _)| peak_c >= lo).map(|&(_, o)| o)
}

/// CMR4 option for a frame: hottest hotspot peak, or "No hotspots". `None`
/// when hotspots were not computed or the peak is below the lowest bin.
pub fn bin_peak_temp(analysis: &FrameAnalysis) -> Option<&'static str> {
    let hs = analysis.hotspots.as_ref()?;
    if hs.is_empty() {
        return Some("No hotspots");
    }
    let peak = hs
        .iter()
        .map(|h| h.peak_temp_c)
        .fold(f64::NEG_INFINITY, f64::max);
    bin_peak_value(peak)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Deterministic,
    External,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Answer {
    pub option: Option<String>,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Question id to chosen option for one frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerSheet {
    pub schema_version: u32,
    pub frame_id: String,
    pub answers: BTreeMap<String, Answer>,
}

impl AnswerSheet {
    /// Every catalogued slot present, unfilled and externally sourced.
    pub fn empty(frame_id: &str) -> Self {
        let answers = QUESTIONS
            .iter()
            .map(|q| {
                (
                    q.id.to_string(),
                    Answer {
                        option: None,
                        provenance: Provenance::External,
                        note: None,
                    },
                )
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            frame_id: frame_id.to_string(),
            answers,
        }
    }

    /// Filled option for `question`, if any.
    pub fn get(&self, question: &str) -> Option<&str> {
        self.answers.get(question)?.option.as_deref()
    }

    pub fn provenance(&self, question: &str) -> Option<Provenance> {
        self.answers.get(question).map(|a| a.provenance)
    }

    fn set(
        &mut self,
        question: &str,
        option: &str,
        provenance: Provenance,
    ) -> Result<(), LabelError> {
        let q = questions::question(question)
            .ok_or_else(|| LabelError::UnknownQuestion(question.to_string()))?;
        if !q.accepts(option) {
            return Err(LabelError::NonCanonical {
                question: question.to_string(),
                option: option.to_string(),
            });
        }
        self.answers.insert(
            question.to_string(),
            Answer {
                option: Some(option.to_string()),
                provenance,
                note: None,
            },
        );
        Ok(())
    }

    /// Records an answer produced outside this crate (model, detector, human).
    pub fn set_external(&mut self, question: &str, option: &str) -> Result<(), LabelError> {
        self.set(question, option, Provenance::External)
    }

    fn set_deterministic(&mut self, question: &str, option: &str) {
        self.set(question, option, Provenance::Deterministic)
            .expect("deterministic options come from the catalog");
    }

    fn leave_empty(&mut self, question: &str, note: String) {
        self.answers.insert(
            question.to_string(),
            Answer {
                option: None,
                provenance: Provenance::Deterministic,
                note: Some(note),
            },
        );
    }

    /// Rejects unknown ids and options outside the canonical choice lists.
    pub fn validate(&self) -> Result<(), LabelError> {
        for (id, a) in &self.answers {
            let q =
                questions::question(id).ok_or_else(|| LabelError::UnknownQuestion(id.clone()))?;
            if let Some(o) = &a.option {
                if !q.accepts(o) {
                    return Err(LabelError::NonCanonical {
                        question: id.clone(),
                        option: o.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Fills every slot this crate can answer from the analysis; all others
/// stay empty and externally sourced.
pub fn answer_sheet(analysis: &FrameAnalysis) -> AnswerSheet {
    let mut sheet = AnswerSheet::empty(&analysis.frame_id);
    let missing = |field: &str| -> String {
        analysis
            .errors
            .iter()
            .find(|e| e.field == field)
            .map_or_else(
                || format!("{field} unavailable"),
                |e| format!("{field}: {}", e.message),
            )
    };

    match &analysis.hotspots {
        Some(hs) => sheet.set_deterministic("PD1", if hs.is_empty() { "No" } else { "Yes" }),
        None => sheet.leave_empty("PD1", missing("hotspots")),
    }
    match analysis.isolated {
        Some(i) => sheet.set_deterministic("PD7", i.option()),
        None => sheet.leave_empty("PD7", missing("isolated")),
    }
    match analysis.sdl {
        Some(l) => sheet.set_deterministic("DS1", l.option()),
        None => sheet.leave_empty("DS1", missing("sdl")),
    }
    match analysis.hicl {
        Some(l) => sheet.set_deterministic("DS3", l.option()),
        None => sheet.leave_empty("DS3", missing("hicl")),
    }
    match bin_p400(analysis.p400) {
        Ok(o) => sheet.set_deterministic("DS7", o),
        Err(e) => sheet.leave_empty("DS7", e.to_string()),
    }
    match bin_p200(analysis.p200) {
        Ok(o) => sheet.set_deterministic("DS8", o),
        Err(e) => sheet.leave_empty("DS8", e.to_string()),
    }
    match analysis.hottest_region {
        Some(r) => sheet.set_deterministic("LD1", r.option()),
        None => sheet.leave_empty("LD1", missing("hottest_region")),
    }
    match bin_peak_temp(analysis) {
        Some(o) => sheet.set_deterministic("CMR4", o),
        None if analysis.hotspots.is_none() => sheet.leave_empty("CMR4", missing("hotspots")),
        None => sheet.leave_empty(
            "CMR4",
            "hottest peak below the lowest temperature bin".to_string(),
        ),
    }
    match analysis.agl_m.map(altitude_bin) {
        Some(Ok(b)) => {
            sheet.set_deterministic("FP2", b.bin.label());
            if b.suspect {
                if let Some(a) = sheet.answers.get_mut("FP2") {
                    a.note = Some(
                        "negative altitude above ground; metadata or terrain suspect".to_string(),
                    );
                }
            }
        }
        Some(Err(e)) => sheet.leave_empty("FP2", e.to_string()),
        None => sheet.leave_empty("FP2", "no altitude above ground available".to_string()),
    }
    sheet
}

/// Radiometric summary in both structured and prompt-text form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RagSummary {
    pub summary: RadiometricSummary,
    pub text: String,
}

/// Prompt block with one decimal per value in a fixed order.
pub fn rag_text(s: &RadiometricSummary) -> String {
    format!(
        "Temperature Summary (°C):\n\
         - Minimum Temp: {:.1}\n\
         - Maximum Temp: {:.1}\n\
         - Mean Temp: {:.1}\n\
         - Temperature standard deviation: {:.1}\n\
         - Percentage of pixels above 200°C: {:.1}\n\
         - Percentage of pixels above 400°C: {:.1}\n",
        s.min_c, s.max_c, s.mean_c, s.std_c, s.pct_above_200, s.pct_above_400
    )
}

pub fn rag_summary(raster: &ThermalRaster) -> Result<RagSummary, LabelError> {
    let summary = raster::summarize(raster)?;
    Ok(RagSummary {
        text: rag_text(&summary),
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn cold() -> ThermalRaster {
        ThermalRaster::filled(64, 48, 25.0).unwrap()
    }

    #[test]
    fn cold_frame_analysis_and_sheet() {
        let a = analyze_frame("cold", &cold(), Some(80.0), &AnalysisParams::default()).unwrap();
        assert_eq!(a.hotspots.as_deref(), Some(&[][..]));
        assert_eq!(a.sdl, Some(SpatialDistributionLabel::NoActiveHotspots));
        assert_eq!(a.hicl, Some(IntensityConsistencyLabel::NoActiveHotspots));
        assert_eq!(a.isolated, Some(Isolation::NoFire));
        assert_eq!(a.hottest_region, Some(Region::NoHotspots));
        assert_eq!(a.p200, 0.0);
        let s = answer_sheet(&a);
        for (q, o) in [
            ("PD1", "No"),
            ("PD7", "No fire"),
            ("DS1", "No active hotspots"),
            ("DS3", "No active hotspots"),
            ("DS7", "None"),
            ("DS8", "None"),
            ("LD1", "No hotspots"),
            ("CMR4", "No hotspots"),
            ("FP2", "50–100 m"),
        ] {
            assert_eq!(s.get(q), Some(o), "{q}");
            assert_eq!(s.provenance(q), Some(Provenance::Deterministic));
        }
        assert_eq!(s.get("CL1"), None);
        assert_eq!(s.provenance("CL1"), Some(Provenance::External));
        s.validate().unwrap();
    }

    #[test]
    fn analysis_without_altitude_marks_fields() {
        let a = analyze_frame("x", &cold(), None, &AnalysisParams::default()).unwrap();
        assert!(a.hotspots.is_none() && a.sdl.is_none());
        assert_eq!(a.errors.len(), GSD_FIELDS.len());
        let s = answer_sheet(&a);
        assert_eq!(s.get("PD1"), None);
        assert!(s.answers["PD1"]
            .note
            .as_deref()
            .unwrap()
            .contains("altitude"));
        assert_eq!(s.get("DS8"), Some("None"));
        assert_eq!(s.get("FP2"), None);

        let neg = analyze_frame("x", &cold(), Some(-4.0), &AnalysisParams::default()).unwrap();
        assert!(neg.hotspots.is_none());
        assert_eq!(answer_sheet(&neg).get("FP2"), Some("0–50 m"));
    }

    #[test]
    fn analysis_is_deterministic() {
        let mut t = vec![30.0; 64 * 48];
        for y in 10..20 {
            for x in 10..20 {
                t[y * 64 + x] = 350.0 + (x * y) as f64;
            }
        }
        let r = ThermalRaster::new(64, 48, t).unwrap();
        let a = analyze_frame("f", &r, Some(40.0), &AnalysisParams::default()).unwrap();
        let b = analyze_frame("f", &r, Some(40.0), &AnalysisParams::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.hotspots.as_ref().unwrap().len(), 1);
    }

    #[test]
    fn coverage_bin_examples() {
        assert_eq!(bin_p400(0.0).unwrap(), "None");
        assert_eq!(bin_p400(1.0).unwrap(), "<2%");
        assert_eq!(bin_p400(1e-6).unwrap(), "<2%");
        assert_eq!(bin_p400(4.0).unwrap(), "4–6%");
        assert_eq!(bin_p400(2.0).unwrap(), "2–4%");
        assert_eq!(bin_p400(6.0).unwrap(), ">6%");
        assert_eq!(bin_p200(0.0).unwrap(), "None");
        assert_eq!(bin_p200(7.0).unwrap(), "5–10%");
        assert_eq!(bin_p200(14.999).unwrap(), "10–15%");
        assert_eq!(bin_p200(15.0).unwrap(), ">15%");
        assert_eq!(bin_p200(100.0).unwrap(), ">15%");
        assert!(bin_p200(-1.0).is_err());
        assert!(bin_p400(100.5).is_err());
        assert!(bin_p400(f64::NAN).is_err());
    }

    #[test]
    fn peak_bin_examples() {
        assert_eq!(bin_peak_value(612.5), Some(">500"));
        assert_eq!(bin_peak_value(300.0), Some("300–400"));
        assert_eq!(bin_peak_value(500.0), Some(">500"));
        assert_eq!(bin_peak_value(199.9), Some("100–200"));
        assert_eq!(bin_peak_value(99.0), None);
        let a = analyze_frame("c", &cold(), Some(50.0), &AnalysisParams::default()).unwrap();
        assert_eq!(bin_peak_temp(&a), Some("No hotspots"));
    }

    #[test]
    fn fp2_from_agl() {
        let a = analyze_frame("c", &cold(), Some(110.0), &AnalysisParams::default()).unwrap();
        assert_eq!(answer_sheet(&a).get("FP2"), Some("100–150 m"));
    }

    #[test]
    fn sheet_rejects_non_canonical() {
        let mut s = AnswerSheet::empty("f");
        assert!(s.set_external("CL1", "No fire").is_ok());
        assert!(matches!(
            s.set_external("CL1", "Raging"),
            Err(LabelError::NonCanonical { .. })
        ));
        assert!(matches!(
            s.set_external("ZZ1", "Yes"),
            Err(LabelError::UnknownQuestion(_))
        ));
        s.answers.get_mut("DS7").unwrap().option = Some("lots".into());
        assert!(s.validate().is_err());
    }

    #[test]
    fn rag_constant_frame() {
        let r = rag_summary(&ThermalRaster::filled(10, 10, 25.0).unwrap()).unwrap();
        assert_eq!(
            r.text,
            "Temperature Summary (°C):\n- Minimum Temp: 25.0\n- Maximum Temp: 25.0\n- Mean Temp: 25.0\n\
             - Temperature standard deviation: 0.0\n- Percentage of pixels above 200°C: 0.0\n\
             - Percentage of pixels above 400°C: 0.0\n"
        );
    }

    #[test]
    fn rag_seven_hot_pixels() {
        let mut t = vec![20.0; 100];
        t[..7].fill(250.0);
        let r = rag_summary(&ThermalRaster::new(10, 10, t).unwrap()).unwrap();
        assert_eq!(r.summary.pct_above_200, 7.0);
        assert!(r.text.contains("Percentage of pixels above 200°C: 7.0\n"));
    }

    fn order(options: &[&str], o: &str) -> usize {
        options.iter().position(|x| *x == o).unwrap()
    }

    proptest! {
        #[test]
        fn bins_monotone(a in 0.0f64..=100.0, b in 0.0f64..=100.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let p4 = ["None", "<2%", "2–4%", "4–6%", ">6%"];
            let p2 = ["None", "<5%", "5–10%", "10–15%", ">15%"];
            prop_assert!(order(&p4, bin_p400(lo).unwrap()) <= order(&p4, bin_p400(hi).unwrap()));
            prop_assert!(order(&p2, bin_p200(lo).unwrap()) <= order(&p2, bin_p200(hi).unwrap()));
            let pk = ["100–200", "200–300", "300–400", "400–500", ">500"];
            let (tl, th) = (100.0 + lo * 6.0, 100.0 + hi * 6.0);
            prop_assert!(order(&pk, bin_peak_value(tl).unwrap()) <= order(&pk, bin_peak_value(th).unwrap()));
        }
    }
}
