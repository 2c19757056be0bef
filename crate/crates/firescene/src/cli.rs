//! Batch front end. Exit codes: 0 clean, 1 input error, 2 partial frame
//! failures, 3 audit violations.

use std::collections::{BTreeMap, BTreeSet};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{ArgGroup, Args, Parser, Subcommand};
use firescene_core::consistency::{self, builtin_rules, FrameImages, PairDecision};
use firescene_core::geodesy::{self, altitude_bin, DemSet, GeoidGrid};
use firescene_core::labeler::{analyze_frame, answer_sheet, rag_summary, FieldError};
use firescene_core::synth::{self, SceneSpec, SceneTruth};
use firescene_core::{
    AnswerSheet, AuditReport, FrameAnalysis, ImplicationRule, IntensityConsistencyLabel,
    SpatialDistributionLabel, SCHEMA_VERSION,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geo::{load_dem_dir, load_geoid};
use crate::images::load_gray;
use crate::manifest::{load_meta, load_thermal, Field, FrameEntry, Manifest};
use crate::params::RunParams;
use crate::raw::write_raw_raster;

/// Scenes rendered by `synth --demo`.
pub const DEMO_SCENES: &str = include_str!("../data/demo_scenes.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Clean = 0,
    InputError = 1,
    PartialFailure = 2,
    Violations = 3,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "firescene",
    version,
    about = "Deterministic analysis of radiometric wildfire frames"
)]
pub struct Cli {
    /// Worker threads; defaults to the number of cores. Outputs do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<NonZeroUsize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-frame analysis, answer sheet and prompt summary, plus a run summary.
    Analyze(AnalyzeArgs),
    /// Rule checks on answer sheets and label agreement across near-duplicate frames.
    Audit(AuditArgs),
    /// Height above ground and altitude bin for every frame, as CSV.
    Agl(AglArgs),
    /// Synthetic scenes with exact ground truth, in the raw fixture format.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// JSON parameter overrides.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Geoid grid; together with --dem-dir, frames without `agl_m` get it from `meta`.
    #[arg(long, requires = "dem_dir")]
    pub geoid: Option<PathBuf>,
    #[arg(long, requires = "geoid")]
    pub dem_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// JSON list of extra implication rules, added to the built-in set.
    #[arg(long)]
    pub rules: Option<PathBuf>,
    /// Directory holding `<id>.sheet.json` for frames without a `sheet` entry.
    #[arg(long)]
    pub sheets: Option<PathBuf>,
    /// RANSAC seed; overrides `matcher.seed` from --params.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct AglArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub geoid: PathBuf,
    #[arg(long)]
    pub dem_dir: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["spec", "demo", "fuzz"])))]
pub struct SynthArgs {
    /// A scene spec or a JSON list of them.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// The bundled demo scenes.
    #[arg(long)]
    pub demo: bool,
    /// Number of fuzzed scenes.
    #[arg(long)]
    pub fuzz: Option<NonZeroUsize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> ExitStatus {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.map_or(0, NonZeroUsize::get))
        .build();
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            log::error!("cannot start worker pool: {e}");
            return ExitStatus::InputError;
        }
    };
    let result = pool.install(|| match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Audit(a) => audit(a),
        Command::Agl(a) => agl(a),
        Command::Synth(a) => synth(a),
    });
    result.unwrap_or_else(|e| {
        log::error!("{e:#}");
        ExitStatus::InputError
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn create_dir(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn load_params(path: Option<&Path>) -> anyhow::Result<RunParams> {
    Ok(match path {
        Some(p) => RunParams::load(p)?,
        None => RunParams::default(),
    })
}

struct FrameOutput {
    analysis: FrameAnalysis,
    sheet: AnswerSheet,
    rag: String,
}

#[derive(Debug, Serialize)]
struct FrameFailure {
    frame_id: String,
    error: String,
}

#[derive(Debug, Serialize)]
struct RunSummary<'a> {
    schema_version: u32,
    params: &'a RunParams,
    frames: usize,
    analyzed: usize,
    /// Frames analyzed without a ground sampling distance.
    without_gsd: usize,
    sdl_counts: BTreeMap<&'static str, usize>,
    hicl_counts: BTreeMap<&'static str, usize>,
    failures: Vec<FrameFailure>,
}

fn analyze(args: &AnalyzeArgs) -> anyhow::Result<ExitStatus> {
    let params = load_params(args.params.as_deref())?;
    let manifest = Manifest::load(&args.manifest)?;
    manifest.check(&[Field::Thermal])?;
    let terrain = match (&args.geoid, &args.dem_dir) {
        (Some(g), Some(d)) => Some((load_geoid(g)?, load_dem_dir(d)?)),
        _ => None,
    };
    create_dir(&args.out)?;

    let results: Vec<Result<FrameOutput, String>> = manifest
        .frames
        .par_iter()
        .map(|f| analyze_one(&manifest, f, &params, terrain.as_ref()))
        .collect();

    let mut summary = RunSummary {
        schema_version: SCHEMA_VERSION,
        params: &params,
        frames: manifest.frames.len(),
        analyzed: 0,
        without_gsd: 0,
        sdl_counts: [
            SpatialDistributionLabel::NoActiveHotspots,
            SpatialDistributionLabel::Linear,
            SpatialDistributionLabel::Concentrated,
            SpatialDistributionLabel::Scattered,
        ]
        .iter()
        .map(|l| (l.option(), 0))
        .collect(),
        hicl_counts: [
            IntensityConsistencyLabel::NoActiveHotspots,
            IntensityConsistencyLabel::SimilarIntensity,
            IntensityConsistencyLabel::ClearlyDifferent,
        ]
        .iter()
        .map(|l| (l.option(), 0))
        .collect(),
        failures: Vec::new(),
    };
    for (f, result) in manifest.frames.iter().zip(results) {
        match result {
            Ok(out) => {
                let a = &out.analysis;
                write_json(&args.out.join(format!("{}.analysis.json", f.id)), a)?;
                write_json(&args.out.join(format!("{}.sheet.json", f.id)), &out.sheet)?;
                let rag = args.out.join(format!("{}.rag.txt", f.id));
                std::fs::write(&rag, &out.rag)
                    .with_context(|| format!("writing {}", rag.display()))?;
                summary.analyzed += 1;
                match (a.sdl, a.hicl) {
                    (Some(s), Some(h)) => {
                        *summary.sdl_counts.entry(s.option()).or_default() += 1;
                        *summary.hicl_counts.entry(h.option()).or_default() += 1;
                    }
                    _ => summary.without_gsd += 1,
                }
            }
            Err(error) => {
                log::error!("frame {}: {error}", f.id);
                summary.failures.push(FrameFailure {
                    frame_id: f.id.clone(),
                    error,
                });
            }
        }
    }
    write_json(&args.out.join("summary.json"), &summary)?;
    log::info!(
        "analyzed {} of {} frames into {}",
        summary.analyzed,
        summary.frames,
        args.out.display()
    );
    Ok(if summary.failures.is_empty() {
        ExitStatus::Clean
    } else {
        ExitStatus::PartialFailure
    })
}

fn analyze_one(
    manifest: &Manifest,
    f: &FrameEntry,
    params: &RunParams,
    terrain: Option<&(GeoidGrid, DemSet)>,
) -> Result<FrameOutput, String> {
    let path = manifest.path(f, Field::Thermal).ok_or("no thermal input")?;
    let raster = load_thermal(&path, &params.tiff).map_err(|e| e.to_string())?;
    let mut agl_error = None;
    let agl_m = match (f.agl_m, terrain, manifest.path(f, Field::Meta)) {
        (Some(a), _, _) => Some(a),
        (None, Some((geoid, dem)), Some(meta)) => {
            let est = load_meta(&meta)
                .map_err(|e| e.to_string())
                .and_then(|m| geodesy::agl(&m, geoid, dem).map_err(|e| e.to_string()));
            match est {
                Ok(e) => Some(e.agl_m),
                Err(e) => {
                    agl_error = Some(e);
                    None
                }
            }
        }
        _ => None,
    };
    let mut analysis =
        analyze_frame(&f.id, &raster, agl_m, &params.analysis()).map_err(|e| e.to_string())?;
    if let Some(message) = agl_error {
        analysis.errors.insert(
            0,
            FieldError {
                field: "agl_m".into(),
                message,
            },
        );
    }
    let sheet = answer_sheet(&analysis);
    let rag = rag_summary(&raster).map_err(|e| e.to_string())?.text;
    Ok(FrameOutput {
        analysis,
        sheet,
        rag,
    })
}

fn load_sheet(
    manifest: &Manifest,
    f: &FrameEntry,
    dir: Option<&Path>,
) -> anyhow::Result<AnswerSheet> {
    let path = match (manifest.path(f, Field::Sheet), dir) {
        (Some(p), _) => p,
        (None, Some(d)) => d.join(format!("{}.sheet.json", f.id)),
        (None, None) => bail!("frame {}: no `sheet` entry and no --sheets directory", f.id),
    };
    if !path.is_file() {
        bail!("frame {}: answer sheet {} not found", f.id, path.display());
    }
    let text =
        std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let sheet: AnswerSheet =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    sheet
        .validate()
        .with_context(|| format!("{}", path.display()))?;
    if sheet.frame_id != f.id {
        bail!(
            "{}: sheet is for frame {:?}, expected {:?}",
            path.display(),
            sheet.frame_id,
            f.id
        );
    }
    Ok(sheet)
}

fn load_rules(path: &Path) -> anyhow::Result<Vec<ImplicationRule>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let rules: Vec<ImplicationRule> =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    for r in &rules {
        r.validate()
            .with_context(|| format!("{}", path.display()))?;
    }
    Ok(rules)
}

#[derive(Debug, Serialize)]
struct AuditOutput<'a> {
    schema_version: u32,
    params: &'a RunParams,
    rules: &'a [ImplicationRule],
    report: &'a AuditReport,
    /// Near-duplicate groups with more than one frame.
    groups: Vec<Vec<String>>,
    pairs: &'a [PairDecision],
}

fn audit(args: &AuditArgs) -> anyhow::Result<ExitStatus> {
    let mut params = load_params(args.params.as_deref())?;
    if let Some(seed) = args.seed {
        params.matcher.seed = seed;
    }
    let manifest = Manifest::load(&args.manifest)?;
    manifest.check(&[])?;
    let mut rules = builtin_rules();
    if let Some(p) = &args.rules {
        rules.extend(load_rules(p)?);
    }
    let mut ids = BTreeSet::new();
    for r in &rules {
        if !ids.insert(r.id.as_str()) {
            bail!("duplicate rule id {:?}", r.id);
        }
    }
    let sheets: Vec<AnswerSheet> = manifest
        .frames
        .iter()
        .map(|f| load_sheet(&manifest, f, args.sheets.as_deref()))
        .collect::<anyhow::Result<_>>()?;
    let frame_reports: Vec<AuditReport> = sheets
        .par_iter()
        .map(|s| consistency::audit_frame(s, &rules))
        .collect::<Result<_, _>>()?;

    let images: Vec<FrameImages> = manifest
        .frames
        .par_iter()
        .filter(|f| f.rgb.is_some())
        .map(|f| -> anyhow::Result<FrameImages> {
            let rgb = load_gray(&manifest.path(f, Field::Rgb).expect("filtered"))?;
            let thermal = manifest
                .path(f, Field::ThermalVis)
                .map(|p| load_gray(&p))
                .transpose()?;
            Ok(FrameImages {
                id: f.id.clone(),
                rgb,
                thermal,
            })
        })
        .collect::<anyhow::Result<_>>()?;
    let pairs = consistency::all_pairs(images.len());
    let decisions: Vec<PairDecision> = pairs
        .par_iter()
        .map(|&(i, j)| consistency::compare_frames(&images[i], &images[j], &params.matcher))
        .collect::<Result<_, _>>()?;
    let duplicates: Vec<(usize, usize)> = pairs
        .iter()
        .zip(&decisions)
        .filter(|(_, d)| d.near_duplicate)
        .map(|(p, _)| *p)
        .collect();
    let image_ids: Vec<String> = images.iter().map(|i| i.id.clone()).collect();
    let groups = consistency::groups_from_pairs(&image_ids, &duplicates);
    let group_reports = consistency::audit_groups(&groups, &sheets, &params.slot_refs())?;

    let violations = frame_reports
        .iter()
        .chain(&group_reports)
        .flat_map(|r| r.violations.iter().cloned())
        .collect();
    let report = AuditReport::new(
        manifest.frames.iter().map(|f| f.id.clone()).collect(),
        violations,
    );
    let groups: Vec<Vec<String>> = groups.into_iter().filter(|g| g.len() > 1).collect();

    create_dir(&args.out)?;
    let mut text = report.render_text();
    text.push_str(&format!(
        "{} rule violation(s) over {} frame(s); {} near-duplicate group(s) from {} pair(s)\n",
        report.violations.len(),
        manifest.frames.len(),
        groups.len(),
        decisions.len()
    ));
    for g in &groups {
        text.push_str(&format!("  group: {}\n", g.join(", ")));
    }
    write_json(
        &args.out.join("audit.json"),
        &AuditOutput {
            schema_version: SCHEMA_VERSION,
            params: &params,
            rules: &rules,
            report: &report,
            groups,
            pairs: &decisions,
        },
    )?;
    let txt = args.out.join("audit.txt");
    std::fs::write(&txt, &text).with_context(|| format!("writing {}", txt.display()))?;
    print!("{text}");
    Ok(if report.is_clean() {
        ExitStatus::Clean
    } else {
        ExitStatus::Violations
    })
}

/// Column order of `agl.csv`.
pub const AGL_HEADER: [&str; 9] = [
    "frame_id", "lat", "lon", "h", "N", "ground", "agl", "bin", "suspect",
];

fn agl_row(
    manifest: &Manifest,
    f: &FrameEntry,
    geoid: &GeoidGrid,
    dem: &DemSet,
) -> Result<[String; 9], [String; 9]> {
    let mut row: [String; 9] = Default::default();
    row[0] = f.id.clone();
    let fail = |mut row: [String; 9], e: &dyn std::fmt::Display| {
        log::error!("frame {}: {e}", f.id);
        row[7] = "ERROR".into();
        row
    };
    let path = manifest.path(f, Field::Meta).expect("checked");
    let meta = load_meta(&path).map_err(|e| fail(row.clone(), &e))?;
    row[1] = meta.lat.to_string();
    row[2] = meta.lon.to_string();
    row[3] = meta.alt_ellipsoidal_m.to_string();
    let est = geodesy::agl(&meta, geoid, dem).map_err(|e| fail(row.clone(), &e))?;
    let bin = altitude_bin(est.agl_m).map_err(|e| fail(row.clone(), &e))?;
    row[4] = est.undulation_m.to_string();
    row[5] = est.ground_m.to_string();
    row[6] = est.agl_m.to_string();
    row[7] = bin.bin.label().into();
    row[8] = bin.suspect.to_string();
    if bin.suspect {
        log::warn!("frame {}: negative height above ground {}", f.id, est.agl_m);
    }
    Ok(row)
}

fn agl(args: &AglArgs) -> anyhow::Result<ExitStatus> {
    let manifest = Manifest::load(&args.manifest)?;
    manifest.check(&[Field::Meta])?;
    let geoid = load_geoid(&args.geoid)?;
    let dem = load_dem_dir(&args.dem_dir)?;
    let rows: Vec<Result<[String; 9], [String; 9]>> = manifest
        .frames
        .par_iter()
        .map(|f| agl_row(&manifest, f, &geoid, &dem))
        .collect();
    create_dir(&args.out)?;
    let path = args.out.join("agl.csv");
    let mut w =
        csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(AGL_HEADER)?;
    let mut failed = 0;
    for r in &rows {
        let row = r.as_ref().unwrap_or_else(|e| {
            failed += 1;
            e
        });
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(if failed == 0 {
        ExitStatus::Clean
    } else {
        ExitStatus::PartialFailure
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SpecFile {
    One(SceneSpec),
    Many(Vec<SceneSpec>),
}

#[derive(Debug, Serialize)]
struct TruthFile<'a> {
    schema_version: u32,
    seed: u64,
    spec: &'a SceneSpec,
    truth: &'a SceneTruth,
}

/// Seed used to render scene `index` of a run seeded with `seed`.
pub fn scene_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add(index as u64)
}

fn synth(args: &SynthArgs) -> anyhow::Result<ExitStatus> {
    let specs: Vec<SceneSpec> = if let Some(p) = &args.spec {
        let text =
            std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        match serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))? {
            SpecFile::One(s) => vec![s],
            SpecFile::Many(v) => v,
        }
    } else if args.demo {
        serde_json::from_str(DEMO_SCENES).expect("bundled demo scenes parse")
    } else {
        let n = args
            .fuzz
            .ok_or_else(|| anyhow!("one of --spec, --demo or --fuzz is required"))?;
        synth::fuzz_specs(n.get(), args.seed)
    };
    for (i, s) in specs.iter().enumerate() {
        s.validate().with_context(|| format!("scene {i}"))?;
    }
    let rendered = specs
        .par_iter()
        .enumerate()
        .map(|(i, s)| synth::render(s, scene_seed(args.seed, i)))
        .collect::<Result<Vec<_>, _>>()?;
    create_dir(&args.out)?;
    let mut entries = Vec::with_capacity(specs.len());
    for (i, (spec, (raster, truth))) in specs.iter().zip(&rendered).enumerate() {
        let id = format!("scene_{i:04}");
        write_raw_raster(raster, &args.out, &id)?;
        write_json(
            &args.out.join(format!("{id}.truth.json")),
            &TruthFile {
                schema_version: SCHEMA_VERSION,
                seed: scene_seed(args.seed, i),
                spec,
                truth,
            },
        )?;
        entries.push(FrameEntry {
            thermal: Some(format!("{id}.json")),
            agl_m: Some(spec.agl_m),
            id,
            ..Default::default()
        });
    }
    write_json(&args.out.join("manifest.json"), &entries)?;
    log::info!(
        "rendered {} scene(s) into {}",
        entries.len(),
        args.out.display()
    );
    Ok(ExitStatus::Clean)
}
