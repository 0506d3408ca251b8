//! Multi-channel beat-signal synthesis.
//!
//! Produces the complex baseband cube a dechirped FMCW receiver would
//! record: one beat tone per target whose fast-time frequency encodes
//! range, whose chirp-to-chirp phase ramp encodes radial velocity, and
//! whose channel-to-channel phase ramp encodes direction. Stop-and-hop
//! timing: the target holds still within a chirp and moves between chirp
//! starts, with the chirp counter running globally across the whole
//! recording so velocity phase stays continuous from one coherent
//! processing interval into the next.
//!
//! Positive velocity recedes from the radar and shifts the beat upward.
//! No amplitude falloff with range is modeled; target `amplitude` is the
//! received amplitude.

use ndarray::{Array4, Axis};
use ndarray::parallel::prelude::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

use crate::scene::{ArrayGeometry, RadarParams, Scenario, Severity, Target};
use crate::SPEED_OF_LIGHT;

/// Synthesis errors.
#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("scenario failed validation:\n{0}")]
    InvalidScenario(String),
}

/// One recording: raw complex baseband samples plus the constants needed
/// to interpret them. Axes `[cpi, channel, chirp, sample]`, sample fastest.
#[derive(Debug, Clone)]
pub struct DataCube {
    pub radar: RadarParams,
    pub array: ArrayGeometry,
    pub data: Array4<Complex64>,
}

impl DataCube {
    /// `(n_cpi, n_rx, n_chirps, n_samples)`.
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        self.data.dim()
    }
}

/// Round-trip delay in seconds of a scatterer that started at `range_m`
/// and has been receding at `vel_mps` for `t` seconds.
pub fn target_delay(range_m: f64, vel_mps: f64, t: f64) -> f64 {
    2.0 * (range_m + vel_mps * t) / SPEED_OF_LIGHT
}

/// Instantaneous phase in radians of one target's beat tone at one sample.
///
/// `global_chirp` counts chirps from the start of the recording, not the
/// start of the current CPI. The carrier term `fc * tau` carries the
/// Doppler ramp; the sweep term `(B/T) * tau * t_s` is the beat tone; the
/// spatial term places the tone on the aperture, the transmitter offset
/// contributing a per-target constant common to all channels.
pub fn beat_phase(
    radar: &RadarParams,
    array: &ArrayGeometry,
    target: &Target,
    global_chirp: usize,
    channel: usize,
    sample: usize,
) -> f64 {
    let tau = target_delay(
        target.range_m,
        target.vel_mps,
        global_chirp as f64 * radar.chirp_period,
    );
    let t_s = sample as f64 / radar.sample_rate();
    let slope = radar.bandwidth / radar.chirp_period;
    let sin_theta = target.angle_deg.to_radians().sin();
    let spatial = (array.rx_spacing_wl * channel as f64 + array.tx_offset_wl) * sin_theta;
    2.0 * PI * (radar.fc * tau + slope * tau * t_s + spatial)
}

/// Synthesizes the full data cube for a scenario.
///
/// The deterministic target returns are evaluated sample by sample from
/// [`beat_phase`]. If `radar.snr_db` is set, circular complex Gaussian
/// noise with power `10^(-snr_db/10)` (relative to a unit-amplitude
/// target) is added; every `(cpi, channel)` pair draws from its own
/// counter-mode stream of the seeded generator, so the result is
/// independent of scheduling and reproducible from `rng_seed` alone.
pub fn synthesize(scenario: &Scenario) -> Result<DataCube, SynthError> {
    let errors: Vec<String> = crate::scene::validate(scenario)
        .into_iter()
        .filter(|v| v.severity == Severity::Error)
        .map(|v| v.to_string())
        .collect();
    if !errors.is_empty() {
        return Err(SynthError::InvalidScenario(errors.join("\n")));
    }

    let radar = &scenario.radar;
    let array = &scenario.array;
    let (n_cpi, n_rx) = (radar.n_cpi, array.n_rx);
    let (n_chirps, n_samples) = (radar.n_chirps, radar.n_samples);

    let mut data = Array4::<Complex64>::zeros((n_cpi, n_rx, n_chirps, n_samples));
    let noise_sigma = radar.snr_db.map(|snr| 10f64.powf(-snr / 20.0) / 2f64.sqrt());

    data.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(p, mut slab)| {
            for n in 0..n_rx {
                for k in 0..n_chirps {
                    let q = p * n_chirps + k;
                    for s in 0..n_samples {
                        let mut acc = Complex64::ZERO;
                        for target in &scenario.targets {
                            let phase = beat_phase(radar, array, target, q, n, s);
                            acc += target.amplitude * Complex64::from_polar(1.0, phase);
                        }
                        slab[[n, k, s]] = acc;
                    }
                }
                if let Some(sigma) = noise_sigma {
                    let mut rng = ChaCha8Rng::seed_from_u64(radar.rng_seed);
                    rng.set_stream((p * n_rx + n) as u64);
                    for k in 0..n_chirps {
                        for s in 0..n_samples {
                            let re: f64 = rng.sample(StandardNormal);
                            let im: f64 = rng.sample(StandardNormal);
                            slab[[n, k, s]] += Complex64::new(sigma * re, sigma * im);
                        }
                    }
                }
            }
        });

    Ok(DataCube { radar: radar.clone(), array: array.clone(), data })
}
