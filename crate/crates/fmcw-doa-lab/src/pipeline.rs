//! Stage orchestration: runs the simulate / process / detect / estimate
//! chain against a scenario file, writes each stage's artifacts into an
//! output directory, and records a manifest of what ran.
//!
//! Stages run in dependency order. A stage that needs an earlier stage's
//! product first looks at what this run already computed, then at the
//! output directory (`cube.bin`, `detections.csv`); if neither holds it,
//! the run fails with a dependency error instead of silently recomputing.
//! Every artifact is a pure function of the scenario document, the
//! command-line overrides, and the seed, so two identical invocations
//! write byte-identical data files.
//!
//! `FMCW_DOA_THREADS` caps worker-pool parallelism; unset means one
//! worker per core. Errors carry process exit codes: 2 for parse errors,
//! 3 for validation, 4 for missing dependencies, 5 for file I/O, 1 for
//! anything else.

use ndarray::{Array4, Axis};
use num_complex::Complex64;
use std::path::{Path, PathBuf};
use std::sync::Once;
use std::time::Instant;

use crate::cfar::{ca_cfar_2d, cluster_detections, Detection};
use crate::doa::{
    build_dictionary, covariance, cs_angle_spectrum, extract_snapshots, fft_angle_spectrum,
    find_local_maxima, music_pseudospectrum, range_angle_map, AngleSpectrum, DoaError, DoaMethod,
    SnapshotSet,
};
use crate::io::{self, IoError, RunManifest, StageReport};
use crate::scene::{validate, Scenario, Severity};
use crate::specproc::{doppler_maps, range_profile, RangeDopplerMap, Window};
use crate::synth::{synthesize, DataCube};

/// One pipeline stage, named as on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Simulate,
    RdMap,
    Detect,
    DoaFft,
    DoaMusic,
    DoaCs,
    RangeAngle,
}

impl Stage {
    /// Every stage, in dependency order.
    pub const ALL: [Stage; 7] = [
        Stage::Simulate,
        Stage::RdMap,
        Stage::Detect,
        Stage::DoaFft,
        Stage::DoaMusic,
        Stage::DoaCs,
        Stage::RangeAngle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Simulate => "simulate",
            Stage::RdMap => "rdmap",
            Stage::Detect => "detect",
            Stage::DoaFft => "doa-fft",
            Stage::DoaMusic => "doa-music",
            Stage::DoaCs => "doa-cs",
            Stage::RangeAngle => "range-angle",
        }
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything a run needs besides the stage list.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub scenario_path: PathBuf,
    pub out_dir: PathBuf,
    /// `key=value` scenario overrides, applied in order; `key` is a
    /// dot path into the scenario JSON (`radar.fc`, `targets.0.range_m`).
    pub overrides: Vec<String>,
    /// Noise seed override, applied after `overrides`.
    pub seed: Option<u64>,
    /// Merge touching detections before writing `detections.csv`.
    pub cluster: bool,
    /// Taper for both processing axes.
    pub window: Window,
}

impl RunOptions {
    /// Defaults: no overrides, no reseeding, raw detections, Hann taper.
    /// The Hann taper is the pipeline default because rectangular range
    /// sidelobes of a strong target routinely cross detector thresholds.
    pub fn new(scenario_path: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        RunOptions {
            scenario_path: scenario_path.into(),
            out_dir: out_dir.into(),
            overrides: Vec::new(),
            seed: None,
            cluster: false,
            window: Window::Hann,
        }
    }
}

/// Anything a run can fail with, tagged with its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("parse: {0}")]
    Parse(String),
    #[error("validation: {0}")]
    Validation(String),
    #[error("dependency: {0}")]
    Dependency(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("internal: {0}")]
    Internal(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Parse(_) => 2,
            PipelineError::Validation(_) => 3,
            PipelineError::Dependency(_) => 4,
            PipelineError::Io(_) => 5,
            PipelineError::Internal(_) => 1,
        }
    }
}

// ─── worker pool ─────────────────────────────────────────────────────────

static THREAD_POOL_INIT: Once = Once::new();

/// Applies `FMCW_DOA_THREADS` to the global worker pool, once per
/// process. A malformed value warns on stderr and keeps the default.
pub fn init_thread_pool() {
    THREAD_POOL_INIT.call_once(|| {
        let Ok(raw) = std::env::var("FMCW_DOA_THREADS") else {
            return;
        };
        match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!(
                "warning: ignoring FMCW_DOA_THREADS={raw:?}: expected a positive integer"
            ),
        }
    });
}

// ─── scenario loading and overrides ──────────────────────────────────────

/// Applies one `key=value` override to the scenario JSON document.
///
/// The key is a dot path; numeric segments index arrays. Intermediate
/// segments must exist, but the final segment may introduce an optional
/// key. The value is parsed as JSON when possible and kept as a string
/// otherwise, so `radar.fc=79e9`, `cfar.edge_policy=skip`, and
/// `radar.snr_db=null` all do what they look like.
fn apply_override(root: &mut serde_json::Value, spec: &str) -> Result<(), PipelineError> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| PipelineError::Parse(format!("override '{spec}' is not KEY=VALUE")))?;
    if path.is_empty() || path.split('.').any(str::is_empty) {
        return Err(PipelineError::Parse(format!("override key '{path}' has an empty segment")));
    }
    let value: serde_json::Value =
        serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));

    let (parent_path, leaf) = match path.rsplit_once('.') {
        Some((parent, leaf)) => (Some(parent), leaf),
        None => (None, path),
    };
    let parent = match parent_path {
        None => root,
        Some(p) => {
            let pointer = format!("/{}", p.replace('.', "/"));
            root.pointer_mut(&pointer).ok_or_else(|| {
                PipelineError::Parse(format!("override path '{p}' does not exist in the scenario"))
            })?
        }
    };
    match parent {
        serde_json::Value::Object(map) => {
            map.insert(leaf.to_string(), value);
            Ok(())
        }
        serde_json::Value::Array(items) => {
            let idx: usize = leaf.parse().map_err(|_| {
                PipelineError::Parse(format!("override index '{leaf}' in '{path}' is not a number"))
            })?;
            let len = items.len();
            let slot = items.get_mut(idx).ok_or_else(|| {
                PipelineError::Parse(format!(
                    "override index {idx} in '{path}' is out of bounds (length {len})"
                ))
            })?;
            *slot = value;
            Ok(())
        }
        _ => Err(PipelineError::Parse(format!(
            "override path '{path}' does not land in an object or array"
        ))),
    }
}

/// Reads, overrides, parses, and validates the scenario. Returns the
/// scenario plus the file's original text (hashed into the manifest).
/// Warning-severity validation findings go to stderr; error-severity
/// ones fail the run.
fn load_scenario(opts: &RunOptions) -> Result<(Scenario, String), PipelineError> {
    let path = &opts.scenario_path;
    let text = std::fs::read_to_string(path)
        .map_err(|source| IoError::File { path: path.clone(), source })?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| PipelineError::Parse(format!("{}: {e}", path.display())))?;
    for spec in &opts.overrides {
        apply_override(&mut value, spec)?;
    }
    if let Some(seed) = opts.seed {
        apply_override(&mut value, &format!("radar.rng_seed={seed}"))?;
    }
    let scenario: Scenario = serde_json::from_value(value)
        .map_err(|e| PipelineError::Parse(format!("{}: {e}", path.display())))?;
    if scenario.targets.is_empty() {
        return Err(PipelineError::Validation("targets: the target list is empty".into()));
    }

    let violations = validate(&scenario);
    let errors: Vec<String> = violations
        .iter()
        .filter(|v| v.severity == Severity::Error)
        .map(|v| format!("{}: {}", v.field, v.message))
        .collect();
    for v in violations.iter().filter(|v| v.severity == Severity::Warning) {
        eprintln!("{v}");
    }
    if !errors.is_empty() {
        return Err(PipelineError::Validation(errors.join("; ")));
    }
    Ok((scenario, text))
}

// ─── shared stage state ──────────────────────────────────────────────────

/// Products computed so far in this run, reused instead of recomputed.
struct Workspace {
    scenario: Scenario,
    cube: Option<DataCube>,
    rp: Option<Array4<Complex64>>,
    maps: Option<Vec<RangeDopplerMap>>,
}

impl Workspace {
    fn new(scenario: Scenario) -> Self {
        Workspace { scenario, cube: None, rp: None, maps: None }
    }
}

/// Cube from this run or from `cube.bin` in the output directory.
fn ensure_cube<'a>(ws: &'a mut Workspace, opts: &RunOptions) -> Result<&'a DataCube, PipelineError> {
    if ws.cube.is_none() {
        let path = opts.out_dir.join("cube.bin");
        if !path.exists() {
            return Err(PipelineError::Dependency(format!(
                "{} is missing; run the simulate stage first",
                path.display()
            )));
        }
        let loaded = io::read_cube(&path)?;
        if !loaded.matches(&ws.scenario.radar, ws.scenario.array.n_rx) {
            return Err(PipelineError::Dependency(format!(
                "{} was recorded with different radar constants than this scenario",
                path.display()
            )));
        }
        ws.cube = Some(DataCube {
            radar: ws.scenario.radar.clone(),
            array: ws.scenario.array.clone(),
            data: loaded.data,
        });
    }
    Ok(ws.cube.as_ref().unwrap())
}

fn ensure_range_profile<'a>(
    ws: &'a mut Workspace,
    opts: &RunOptions,
) -> Result<&'a Array4<Complex64>, PipelineError> {
    if ws.rp.is_none() {
        ensure_cube(ws, opts)?;
        let cube = ws.cube.as_ref().unwrap();
        let rp = range_profile(cube, opts.window)
            .map_err(|e| PipelineError::Validation(e.to_string()))?;
        ws.rp = Some(rp);
    }
    Ok(ws.rp.as_ref().unwrap())
}

fn ensure_maps<'a>(
    ws: &'a mut Workspace,
    opts: &RunOptions,
) -> Result<&'a [RangeDopplerMap], PipelineError> {
    if ws.maps.is_none() {
        ensure_range_profile(ws, opts)?;
        let (maps, _) = doppler_maps(ws.rp.as_ref().unwrap(), &ws.scenario.radar, opts.window)
            .map_err(|e| PipelineError::Validation(e.to_string()))?;
        ws.maps = Some(maps);
    }
    Ok(ws.maps.as_deref().unwrap())
}

/// Detections for the estimation stages: always read back from
/// `detections.csv` so a fresh `all` run and a later cached run follow
/// the identical code path, then narrowed to the first CPI and merged
/// into one detection per target blob.
fn load_cpi0_clusters(opts: &RunOptions) -> Result<Vec<Detection>, PipelineError> {
    let path = opts.out_dir.join("detections.csv");
    if !path.exists() {
        return Err(PipelineError::Dependency(format!(
            "{} is missing; run the detect stage first",
            path.display()
        )));
    }
    let detections = io::read_detections_csv(&path)?;
    let cpi0: Vec<Detection> = detections.into_iter().filter(|d| d.cpi_index == 0).collect();
    Ok(cluster_detections(&cpi0))
}

// ─── stage bodies ────────────────────────────────────────────────────────

fn stage_simulate(ws: &mut Workspace, opts: &RunOptions) -> Result<Vec<String>, PipelineError> {
    let mut cube =
        synthesize(&ws.scenario).map_err(|e| PipelineError::Validation(e.to_string()))?;
    // Round to the file's precision first, so downstream stages see the
    // same samples whether they run now or from the reloaded file.
    io::quantize_to_f32(&mut cube);
    io::write_cube(&opts.out_dir.join("cube.bin"), &cube)?;
    ws.cube = Some(cube);
    Ok(vec!["cube.bin".into()])
}

fn stage_rdmap(ws: &mut Workspace, opts: &RunOptions) -> Result<Vec<String>, PipelineError> {
    let maps = ensure_maps(ws, opts)?;
    let mut outputs = Vec::new();
    for map in maps {
        let csv = format!("rd_map_cpi{}.csv", map.cpi_index);
        let pgm = format!("rd_map_cpi{}.pgm", map.cpi_index);
        io::write_rd_map_csv(&opts.out_dir.join(&csv), map)?;
        io::write_pgm(&opts.out_dir.join(&pgm), &map.power)?;
        outputs.push(csv);
        outputs.push(pgm);
    }
    Ok(outputs)
}

fn stage_detect(ws: &mut Workspace, opts: &RunOptions) -> Result<Vec<String>, PipelineError> {
    let cfg = ws.scenario.cfar.clone();
    let maps = ensure_maps(ws, opts)?;
    let mut all = Vec::new();
    for map in maps {
        all.extend(ca_cfar_2d(map, &cfg).map_err(|e| PipelineError::Validation(e.to_string()))?);
    }
    if opts.cluster {
        all = cluster_detections(&all);
    }
    io::write_detections_csv(&opts.out_dir.join("detections.csv"), &all)?;
    Ok(vec!["detections.csv".into()])
}

/// One method's spectrum for one detection's snapshots.
fn estimate_one(
    method: DoaMethod,
    snap: &SnapshotSet,
    scenario: &Scenario,
    d: usize,
) -> Result<AngleSpectrum, DoaError> {
    match method {
        DoaMethod::Fft => fft_angle_spectrum(snap, &scenario.array, scenario.doa.fft_size),
        DoaMethod::Music => {
            let r = covariance(snap);
            music_pseudospectrum(&r, d, &scenario.doa.grid(), &scenario.array)
        }
        DoaMethod::Cs => {
            let dict = build_dictionary(&scenario.doa.cs_grid(), &scenario.array);
            cs_angle_spectrum(snap, &dict, &scenario.doa)
        }
    }
}

/// Element-wise sum of per-detection spectra (all on the same grid),
/// peaks recomputed on the sum. Empty input gives an empty spectrum.
fn sum_spectra(method: DoaMethod, mut specs: Vec<AngleSpectrum>) -> AngleSpectrum {
    let Some(mut total) = specs.pop() else {
        return AngleSpectrum {
            method,
            angles_deg: Vec::new(),
            power: Vec::new(),
            peaks: Vec::new(),
        };
    };
    for spec in &specs {
        for (acc, p) in total.power.iter_mut().zip(&spec.power) {
            *acc += *p;
        }
    }
    total.peaks = find_local_maxima(&total.angles_deg, &total.power);
    total
}

fn stage_doa(
    method: DoaMethod,
    ws: &mut Workspace,
    opts: &RunOptions,
) -> Result<Vec<String>, PipelineError> {
    let clusters = load_cpi0_clusters(opts)?;
    ensure_range_profile(ws, opts)?;
    let rp = ws.rp.as_ref().unwrap();
    let d = ws.scenario.doa.music_sources.unwrap_or(1);

    let mut specs = Vec::with_capacity(clusters.len());
    for det in &clusters {
        let snap = extract_snapshots(rp, det).map_err(|e| match e {
            DoaError::DetectionOutOfRange { .. } => PipelineError::Dependency(format!(
                "detections.csv does not match this scenario: {e}"
            )),
            other => PipelineError::Internal(other.to_string()),
        })?;
        specs.push(
            estimate_one(method, &snap, &ws.scenario, d)
                .map_err(|e| PipelineError::Internal(e.to_string()))?,
        );
    }
    let spec = sum_spectra(method, specs);
    let name = format!("angle_{method}.csv");
    io::write_angle_spectrum_csv(&opts.out_dir.join(&name), &spec)?;
    Ok(vec![name])
}

fn stage_range_angle(ws: &mut Workspace, opts: &RunOptions) -> Result<Vec<String>, PipelineError> {
    ensure_range_profile(ws, opts)?;
    let rp = ws.rp.as_ref().unwrap();
    let scenario = &ws.scenario;
    let d = scenario.doa.music_sources.unwrap_or(1);
    let grid = scenario.doa.grid();
    let map = range_angle_map(rp.index_axis(Axis(0), 0), &scenario.array, d, &grid)
        .map_err(|e| PipelineError::Internal(e.to_string()))?;
    let (rows, cols) = map.dim();
    io::write_matrix_csv(
        &opts.out_dir.join("range_angle.csv"),
        &map,
        &[
            ("cpi", "0".into()),
            ("rows", rows.to_string()),
            ("cols", cols.to_string()),
            ("range_start_m", "0".into()),
            ("range_step_m", scenario.radar.range_resolution().to_string()),
            ("angle_min_deg", scenario.doa.grid_min_deg.to_string()),
            ("angle_step_deg", scenario.doa.grid_step_deg.to_string()),
        ],
    )?;
    io::write_pgm(&opts.out_dir.join("range_angle.pgm"), &map)?;
    Ok(vec!["range_angle.csv".into(), "range_angle.pgm".into()])
}

// ─── entry points ────────────────────────────────────────────────────────

/// Runs the requested stages in dependency order and writes
/// `manifest.json`. Duplicate stage requests collapse; unrequested
/// stages never run, but their cached products may be read.
pub fn run(stages: &[Stage], opts: &RunOptions) -> Result<RunManifest, PipelineError> {
    init_thread_pool();
    let (scenario, text) = load_scenario(opts)?;
    std::fs::create_dir_all(&opts.out_dir)
        .map_err(|source| IoError::File { path: opts.out_dir.clone(), source })?;

    let mut ws = Workspace::new(scenario);
    let mut reports = Vec::new();
    for stage in Stage::ALL.into_iter().filter(|s| stages.contains(s)) {
        let started = Instant::now();
        let outputs = match stage {
            Stage::Simulate => stage_simulate(&mut ws, opts)?,
            Stage::RdMap => stage_rdmap(&mut ws, opts)?,
            Stage::Detect => stage_detect(&mut ws, opts)?,
            Stage::DoaFft => stage_doa(DoaMethod::Fft, &mut ws, opts)?,
            Stage::DoaMusic => stage_doa(DoaMethod::Music, &mut ws, opts)?,
            Stage::DoaCs => stage_doa(DoaMethod::Cs, &mut ws, opts)?,
            Stage::RangeAngle => stage_range_angle(&mut ws, opts)?,
        };
        reports.push(StageReport {
            stage: stage.name().into(),
            seconds: started.elapsed().as_secs_f64(),
            outputs,
        });
    }

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        scenario_path: opts.scenario_path.display().to_string(),
        scenario_sha256: io::sha256_hex(text.as_bytes()),
        out_dir: opts.out_dir.display().to_string(),
        stages: reports,
    };
    io::write_manifest(&opts.out_dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

// ─── method comparison ───────────────────────────────────────────────────

/// One method's showing in a [`ComparisonReport`].
#[derive(Debug, Clone)]
pub struct MethodRow {
    pub method: DoaMethod,
    /// Best (minimum) wall-clock seconds over the timed repetitions.
    pub seconds: f64,
    /// Strongest spectrum peaks, one per scenario target, descending
    /// power.
    pub peak_angles_deg: Vec<f64>,
    /// Per scenario target: distance to the peak assigned to it, NaN if
    /// no peak was assigned.
    pub abs_errors_deg: Vec<f64>,
    /// Targets matched by a distinct peak within the resolution
    /// tolerance (half the smallest target separation; 3 degrees for a
    /// lone target).
    pub resolved: usize,
}

/// All three estimators on identical inputs.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    /// Ascending by `seconds`.
    pub rows: Vec<MethodRow>,
}

/// Matches a spectrum's strongest peaks against the true angles.
/// Peaks are assigned in descending power order, each to the nearest
/// still-unmatched truth. Returns per-truth errors and the resolved
/// count.
fn match_peaks(spec: &AngleSpectrum, truths: &[f64], tolerance: f64) -> (Vec<f64>, Vec<f64>, usize) {
    let peaks = spec.top_peaks(truths.len());
    let peak_angles: Vec<f64> = peaks.iter().map(|p| p.angle_deg).collect();
    let mut errors = vec![f64::NAN; truths.len()];
    let mut taken = vec![false; truths.len()];
    let mut resolved = 0;
    for peak in peaks {
        let mut best: Option<(usize, f64)> = None;
        for (i, &truth) in truths.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let dist = (peak.angle_deg - truth).abs();
            if best.map_or(true, |(_, d)| dist < d) {
                best = Some((i, dist));
            }
        }
        if let Some((i, dist)) = best {
            taken[i] = true;
            errors[i] = dist;
            if dist <= tolerance {
                resolved += 1;
            }
        }
    }
    (peak_angles, errors, resolved)
}

/// Times all three estimators on the same CPI-0 detections and reports
/// peak angles, per-target errors, and wall time, ordered fastest first.
///
/// The cube comes from `cube.bin` when a matching one is cached in the
/// output directory and is synthesized in memory otherwise; detections
/// likewise come from `detections.csv` or a fresh detection pass.
/// Each method is timed from snapshots to summed spectrum, best of
/// five repetitions after a warmup. Writes `comparison.csv`.
pub fn compare_methods(opts: &RunOptions) -> Result<ComparisonReport, PipelineError> {
    init_thread_pool();
    let (scenario, _) = load_scenario(opts)?;
    std::fs::create_dir_all(&opts.out_dir)
        .map_err(|source| IoError::File { path: opts.out_dir.clone(), source })?;
    let mut ws = Workspace::new(scenario);

    // Reuse cached artifacts when they match; compute quietly otherwise.
    let cached_cube = opts.out_dir.join("cube.bin");
    if cached_cube.exists() {
        ensure_cube(&mut ws, opts)?;
    } else {
        let mut cube =
            synthesize(&ws.scenario).map_err(|e| PipelineError::Validation(e.to_string()))?;
        io::quantize_to_f32(&mut cube);
        ws.cube = Some(cube);
    }
    let clusters = {
        let cached = opts.out_dir.join("detections.csv");
        if cached.exists() {
            load_cpi0_clusters(opts)?
        } else {
            let cfg = ws.scenario.cfar.clone();
            let maps = ensure_maps(&mut ws, opts)?;
            let cpi0 = ca_cfar_2d(&maps[0], &cfg)
                .map_err(|e| PipelineError::Validation(e.to_string()))?;
            cluster_detections(&cpi0)
        }
    };
    if clusters.is_empty() {
        return Err(PipelineError::Validation(
            "no CPI-0 detections; nothing to compare the estimators on".into(),
        ));
    }
    ensure_range_profile(&mut ws, opts)?;
    let rp = ws.rp.as_ref().unwrap();
    let scenario = &ws.scenario;

    let truths: Vec<f64> = scenario.targets.iter().map(|t| t.angle_deg).collect();
    let tolerance = if truths.len() >= 2 {
        let mut min_sep = f64::INFINITY;
        for i in 0..truths.len() {
            for j in i + 1..truths.len() {
                min_sep = min_sep.min((truths[i] - truths[j]).abs());
            }
        }
        min_sep / 2.0
    } else {
        3.0
    };

    // Shared inputs, extracted once: identical snapshots for every
    // method, and the assumed source count per detection (configured, or
    // the number of true targets the detection's cell matched).
    let (range_axis, velocity_axis) = crate::specproc::map_axes(&scenario.radar);
    let mut inputs: Vec<(SnapshotSet, usize)> = Vec::with_capacity(clusters.len());
    for det in &clusters {
        let snap = extract_snapshots(rp, det)
            .map_err(|e| PipelineError::Internal(e.to_string()))?;
        let d = scenario.doa.music_sources.unwrap_or_else(|| {
            let matched = scenario
                .targets
                .iter()
                .filter(|t| {
                    let range_bin = (t.range_m / range_axis.step).round();
                    let doppler_bin =
                        ((t.vel_mps - velocity_axis.start) / velocity_axis.step).round();
                    (range_bin - det.range_bin as f64).abs() <= 1.5
                        && (doppler_bin - det.doppler_bin as f64).abs() <= 1.5
                })
                .count();
            matched.clamp(1, scenario.array.n_rx - 1)
        });
        inputs.push((snap, d));
    }

    let mut rows = Vec::new();
    for method in [DoaMethod::Fft, DoaMethod::Music, DoaMethod::Cs] {
        let estimate = || -> Result<AngleSpectrum, PipelineError> {
            let mut specs = Vec::with_capacity(inputs.len());
            for (snap, d) in &inputs {
                specs.push(
                    estimate_one(method, snap, scenario, *d)
                        .map_err(|e| PipelineError::Internal(e.to_string()))?,
                );
            }
            Ok(sum_spectra(method, specs))
        };
        let spec = estimate()?; // warmup, and the spectrum we report
        let mut seconds = f64::INFINITY;
        for _ in 0..5 {
            let started = Instant::now();
            estimate()?;
            seconds = seconds.min(started.elapsed().as_secs_f64());
        }
        let (peak_angles_deg, abs_errors_deg, resolved) = match_peaks(&spec, &truths, tolerance);
        rows.push(MethodRow { method, seconds, peak_angles_deg, abs_errors_deg, resolved });
    }
    rows.sort_by(|a, b| a.seconds.total_cmp(&b.seconds));

    write_comparison_csv(&opts.out_dir.join("comparison.csv"), &rows)?;
    Ok(ComparisonReport { rows })
}

fn write_comparison_csv(path: &Path, rows: &[MethodRow]) -> Result<(), PipelineError> {
    use std::io::Write;
    let file_err = |source| IoError::File { path: path.to_path_buf(), source };
    let mut w = std::io::BufWriter::new(std::fs::File::create(path).map_err(file_err)?);
    writeln!(w, "method,seconds,peak_angles_deg,abs_errors_deg,resolved").map_err(file_err)?;
    for row in rows {
        let join = |values: &[f64]| {
            values.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
        };
        writeln!(
            w,
            "{},{},{},{},{}",
            row.method,
            row.seconds,
            join(&row.peak_angles_deg),
            join(&row.abs_errors_deg),
            row.resolved
        )
        .map_err(file_err)?;
    }
    w.flush().map_err(file_err)?;
    Ok(())
}
