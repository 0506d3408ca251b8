//! Scenario configuration: waveform constants, receive-array geometry,
//! target truth, and per-stage processing settings.
//!
//! Scenarios live in UTF-8 JSON documents with five top-level objects:
//!
//! ```json
//! {
//!   "radar":   { "fc": 77.0e9, "B": 150.0e6, "T": 10.0e-6,
//!                "n_samples": 256, "n_chirps": 256, "n_cpi": 10,
//!                "snr_db": 20.0, "rng_seed": 7 },
//!   "array":   { "n_rx": 8, "rx_spacing_wl": 0.5, "tx_offset_wl": 2.0 },
//!   "targets": [ { "range_m": 50.0, "vel_mps": 10.0, "angle_deg": -15.0 } ],
//!   "cfar":    { "guard_half": 2, "train_half": 4, "pfa": 1.0e-3 },
//!   "doa":     { "grid_step_deg": 0.1 }
//! }
//! ```
//!
//! Unknown keys are rejected so typos fail loudly instead of silently
//! falling back to defaults. [`parse_scenario`] fills the documented
//! defaults; [`validate`] checks physical consistency and reports every
//! violated bound at once.

use serde::{Deserialize, Serialize};

use crate::cfar::CfarConfig;
use crate::doa::DoaConfig;
use crate::SPEED_OF_LIGHT;

/// Waveform and frame constants of the sawtooth FMCW radar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadarParams {
    /// Carrier frequency in Hz.
    pub fc: f64,
    /// Sweep bandwidth in Hz.
    #[serde(rename = "B")]
    pub bandwidth: f64,
    /// Chirp period in seconds; the sweep occupies the whole period
    /// (no idle time, so the period doubles as the pulse repetition
    /// interval).
    #[serde(rename = "T")]
    pub chirp_period: f64,
    /// Fast-time samples per chirp. Power of two.
    pub n_samples: usize,
    /// Chirps per coherent processing interval. Power of two.
    pub n_chirps: usize,
    /// Number of coherent processing intervals in the recording.
    pub n_cpi: usize,
    /// Per-channel, per-sample SNR in dB for a unit-amplitude target;
    /// absent means noiseless.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    /// Seed for the noise generator. Ignored when `snr_db` is absent.
    #[serde(default)]
    pub rng_seed: u64,
}

impl RadarParams {
    /// Complex sampling rate in Hz; the chirp is sampled end to end.
    pub fn sample_rate(&self) -> f64 {
        self.n_samples as f64 / self.chirp_period
    }

    /// Carrier wavelength in meters.
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.fc
    }

    /// Range covered by one fast-time bin, c / (2B), in meters.
    pub fn range_resolution(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.bandwidth)
    }

    /// Unambiguous range, in meters: the beat frequency of a target here
    /// reaches the complex sampling rate.
    pub fn max_range(&self) -> f64 {
        self.range_resolution() * self.n_samples as f64
    }

    /// Unambiguous radial speed, in m/s: one half cycle of carrier phase
    /// per chirp.
    pub fn max_velocity(&self) -> f64 {
        self.wavelength() / (4.0 * self.chirp_period)
    }

    /// Velocity covered by one Doppler bin, in m/s.
    pub fn velocity_resolution(&self) -> f64 {
        self.wavelength() / (2.0 * self.n_chirps as f64 * self.chirp_period)
    }

    /// Duration of one coherent processing interval, in seconds.
    pub fn cpi_duration(&self) -> f64 {
        self.n_chirps as f64 * self.chirp_period
    }
}

/// Uniform linear receive array, one transmitter offset to the side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayGeometry {
    /// Number of receive elements.
    pub n_rx: usize,
    /// Element pitch in carrier wavelengths.
    #[serde(default = "default_rx_spacing")]
    pub rx_spacing_wl: f64,
    /// Transmitter offset from element 0 in carrier wavelengths. Shared by
    /// every receive path, so it contributes one common phase per target
    /// and never affects angle estimates.
    #[serde(default = "default_tx_offset")]
    pub tx_offset_wl: f64,
}

fn default_rx_spacing() -> f64 {
    0.5
}

fn default_tx_offset() -> f64 {
    2.0
}

/// Point scatterer moving radially at constant speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target {
    /// Radial range at the start of the recording, in meters.
    pub range_m: f64,
    /// Radial velocity in m/s. Positive recedes from the radar, which
    /// raises the beat frequency.
    pub vel_mps: f64,
    /// Azimuth in degrees off array broadside, within (-90, 90).
    pub angle_deg: f64,
    /// Echo amplitude per receive channel. No range-dependent loss is
    /// modeled, so this is also the received amplitude.
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

fn default_amplitude() -> f64 {
    1.0
}

/// Complete simulation and processing description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub radar: RadarParams,
    pub array: ArrayGeometry,
    pub targets: Vec<Target>,
    #[serde(default)]
    pub cfar: CfarConfig,
    #[serde(default)]
    pub doa: DoaConfig,
}

/// Scenario document errors.
#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    /// Syntax error, unknown key, missing key, or type mismatch. The
    /// underlying message carries line and column.
    #[error("scenario JSON: {0}")]
    Json(#[from] serde_json::Error),
    /// The document parsed but lists no targets.
    #[error("missing targets: the target list is empty")]
    MissingTargets,
}

/// Parses a scenario document, filling defaults (0.5-wavelength spacing,
/// 2-wavelength transmitter offset, unit amplitudes, noiseless, default
/// detector and estimator settings).
pub fn parse_scenario(text: &str) -> Result<Scenario, SceneError> {
    let scenario: Scenario = serde_json::from_str(text)?;
    if scenario.targets.is_empty() {
        return Err(SceneError::MissingTargets);
    }
    Ok(scenario)
}

/// How bad a [`Violation`] is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    /// Unusual but simulatable; synthesis proceeds.
    Warning,
    /// Physically or structurally inconsistent; synthesis refuses.
    Error,
}

/// One violated invariant, naming the offending field and the computed
/// bound it broke.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Dotted path of the offending field, e.g. `targets[1].vel_mps`.
    pub field: String,
    /// Human-readable statement of the bound, with computed values.
    pub message: String,
    pub severity: Severity,
}

impl Violation {
    fn error(field: impl Into<String>, message: impl Into<String>) -> Self {
        Violation { field: field.into(), message: message.into(), severity: Severity::Error }
    }

    fn warning(field: impl Into<String>, message: impl Into<String>) -> Self {
        Violation { field: field.into(), message: message.into(), severity: Severity::Warning }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{tag}: {}: {}", self.field, self.message)
    }
}

fn positive_finite(violations: &mut Vec<Violation>, field: &str, value: f64) {
    if !(value.is_finite() && value > 0.0) {
        violations.push(Violation::error(field, format!("must be finite and positive, got {value}")));
    }
}

fn power_of_two(violations: &mut Vec<Violation>, field: &str, value: usize) {
    if value < 2 || !value.is_power_of_two() {
        violations.push(Violation::error(field, format!("must be a power of two >= 2, got {value}")));
    }
}

/// Checks every physical and structural invariant of a scenario and
/// returns all violations at once. Empty means valid; warning-severity
/// entries flag unusual but simulatable settings (spacing above half a
/// wavelength aliases angles, nothing more).
pub fn validate(scenario: &Scenario) -> Vec<Violation> {
    let mut v = Vec::new();
    let radar = &scenario.radar;

    positive_finite(&mut v, "radar.fc", radar.fc);
    positive_finite(&mut v, "radar.B", radar.bandwidth);
    positive_finite(&mut v, "radar.T", radar.chirp_period);
    power_of_two(&mut v, "radar.n_samples", radar.n_samples);
    power_of_two(&mut v, "radar.n_chirps", radar.n_chirps);
    if radar.n_cpi == 0 {
        v.push(Violation::error("radar.n_cpi", "must be at least 1"));
    }
    if let Some(snr) = radar.snr_db {
        if !snr.is_finite() {
            v.push(Violation::error("radar.snr_db", format!("must be finite, got {snr}")));
        }
    }

    let array = &scenario.array;
    if array.n_rx < 2 {
        v.push(Violation::error("array.n_rx", format!("need at least 2 elements, got {}", array.n_rx)));
    }
    positive_finite(&mut v, "array.rx_spacing_wl", array.rx_spacing_wl);
    if array.rx_spacing_wl.is_finite() && array.rx_spacing_wl > 0.5 {
        v.push(Violation::warning(
            "array.rx_spacing_wl",
            format!(
                "{} wavelengths exceeds 0.5; angles alias within +-90 deg",
                array.rx_spacing_wl
            ),
        ));
    }
    if !array.tx_offset_wl.is_finite() {
        v.push(Violation::error("array.tx_offset_wl", "must be finite"));
    }

    if scenario.targets.is_empty() {
        v.push(Violation::error("targets", "the target list is empty"));
    }
    // Bounds only make sense once the waveform constants do.
    let radar_ok = radar.fc > 0.0
        && radar.fc.is_finite()
        && radar.bandwidth > 0.0
        && radar.bandwidth.is_finite()
        && radar.chirp_period > 0.0
        && radar.chirp_period.is_finite()
        && radar.n_samples >= 2
        && radar.n_chirps >= 2;
    for (i, tgt) in scenario.targets.iter().enumerate() {
        let at = |name: &str| format!("targets[{i}].{name}");
        if !(tgt.amplitude.is_finite() && tgt.amplitude >= 0.0) {
            v.push(Violation::error(at("amplitude"), format!("must be finite and >= 0, got {}", tgt.amplitude)));
        }
        if !(tgt.angle_deg.is_finite() && tgt.angle_deg > -90.0 && tgt.angle_deg < 90.0) {
            v.push(Violation::error(
                at("angle_deg"),
                format!("must lie strictly inside (-90, 90) deg, got {}", tgt.angle_deg),
            ));
        }
        if radar_ok {
            let r_max = radar.max_range();
            if !(tgt.range_m.is_finite() && tgt.range_m > 0.0 && tgt.range_m < r_max) {
                v.push(Violation::error(
                    at("range_m"),
                    format!("{} m is outside the unambiguous span (0, {r_max:.3}) m", tgt.range_m),
                ));
            }
            let v_max = radar.max_velocity();
            if !(tgt.vel_mps.is_finite() && tgt.vel_mps.abs() < v_max) {
                v.push(Violation::error(
                    at("vel_mps"),
                    format!("{} m/s is outside the unambiguous span (-{v_max:.3}, {v_max:.3}) m/s", tgt.vel_mps),
                ));
            }
        }
    }

    let cfar = &scenario.cfar;
    if cfar.train_half <= cfar.guard_half {
        v.push(Violation::error(
            "cfar.train_half",
            format!("training half-width {} must exceed guard half-width {}", cfar.train_half, cfar.guard_half),
        ));
    }
    if !(cfar.pfa.is_finite() && cfar.pfa > 0.0 && cfar.pfa <= 1.0) {
        v.push(Violation::error("cfar.pfa", format!("must lie in (0, 1], got {}", cfar.pfa)));
    }
    let span = 2 * cfar.train_half + 1;
    if radar_ok && (span > radar.n_samples || span > radar.n_chirps) {
        v.push(Violation::error(
            "cfar.train_half",
            format!("window spans {span} cells but the map is {}x{}", radar.n_samples, radar.n_chirps),
        ));
    }

    let doa = &scenario.doa;
    positive_finite(&mut v, "doa.grid_step_deg", doa.grid_step_deg);
    positive_finite(&mut v, "doa.cs_grid_step_deg", doa.cs_grid_step_deg);
    if !(doa.grid_min_deg.is_finite()
        && doa.grid_max_deg.is_finite()
        && doa.grid_min_deg >= -90.0
        && doa.grid_max_deg <= 90.0
        && doa.grid_min_deg < doa.grid_max_deg)
    {
        v.push(Violation::error(
            "doa.grid_min_deg",
            format!("grid [{}, {}] must be ordered and within [-90, 90] deg", doa.grid_min_deg, doa.grid_max_deg),
        ));
    }
    if let Some(d) = doa.music_sources {
        if d == 0 || d >= array.n_rx {
            v.push(Violation::error(
                "doa.music_sources",
                format!("{d} sources need 1 <= D < n_rx = {}", array.n_rx),
            ));
        }
    }
    if let Some(lambda) = doa.cs_lambda {
        positive_finite(&mut v, "doa.cs_lambda", lambda);
    }
    if doa.cs_max_iter == 0 {
        v.push(Violation::error("doa.cs_max_iter", "must be at least 1"));
    }
    if !(doa.cs_tol.is_finite() && doa.cs_tol >= 0.0) {
        v.push(Violation::error("doa.cs_tol", format!("must be finite and >= 0, got {}", doa.cs_tol)));
    }
    if doa.fft_size < array.n_rx.max(2) || !doa.fft_size.is_power_of_two() {
        v.push(Violation::error(
            "doa.fft_size",
            format!("must be a power of two >= n_rx = {}, got {}", array.n_rx, doa.fft_size),
        ));
    }

    v
}

/// True when [`validate`] reports nothing of error severity.
pub fn is_simulatable(scenario: &Scenario) -> bool {
    validate(scenario).iter().all(|v| v.severity == Severity::Warning)
}
