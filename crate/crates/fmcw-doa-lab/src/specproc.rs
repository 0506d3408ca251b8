//! Spectral processing: radix-2 FFT kernel, fast-time range profiles, and
//! zero-centered range-Doppler power maps.
//!
//! The transform is written here rather than pulled in because everything
//! downstream (detection statistics, angle estimation, the runtime
//! comparison between estimators) leans on its exact conventions:
//! forward `X[m] = sum_s x[s] exp(-j 2 pi m s / N)`, inverse scaled by
//! `1/N`, power-of-two lengths only, no implicit zero padding.

use ndarray::{Array2, Array4, Axis};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::scene::RadarParams;
use crate::synth::DataCube;

/// Spectral-processing errors.
#[derive(Debug, thiserror::Error)]
pub enum SpecprocError {
    #[error("transform length {0} is not a power of two >= 2")]
    BadLength(usize),
    #[error("cube dimension {axis} is {got}, radar constants say {expected}")]
    DimensionMismatch { axis: &'static str, got: usize, expected: usize },
}

// ─── FFT kernel ──────────────────────────────────────────────────────────

/// Precomputed twiddle factors for one transform length.
///
/// Reused across the tens of thousands of lanes in a data cube so the
/// trigonometry is paid once per length, not once per lane.
pub struct FftPlan {
    n: usize,
    // exp(-j 2 pi k / n) for k in 0..n/2
    twiddles: Vec<Complex64>,
}

impl FftPlan {
    /// Builds a plan for length `n`. Power of two, at least 2.
    pub fn new(n: usize) -> Result<Self, SpecprocError> {
        if n < 2 || !n.is_power_of_two() {
            return Err(SpecprocError::BadLength(n));
        }
        let twiddles = (0..n / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
            .collect();
        Ok(FftPlan { n, twiddles })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// In-place forward transform.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.transform(buf, false);
    }

    /// In-place inverse transform, scaled by `1/N`.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.transform(buf, true);
    }

    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.n;
        assert_eq!(buf.len(), n, "buffer length must match the plan");

        // Bit-reversal permutation, then iterative butterflies.
        let mut j = 0usize;
        for i in 0..n {
            if i < j {
                buf.swap(i, j);
            }
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
        }

        let mut len = 2;
        while len <= n {
            let stride = n / len;
            for base in (0..n).step_by(len) {
                for k in 0..len / 2 {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let t = w * buf[base + k + len / 2];
                    let u = buf[base + k];
                    buf[base + k] = u + t;
                    buf[base + k + len / 2] = u - t;
                }
            }
            len <<= 1;
        }

        if inverse {
            let scale = 1.0 / n as f64;
            for v in buf.iter_mut() {
                *v *= scale;
            }
        }
    }
}

/// One-shot discrete Fourier transform of a power-of-two-length vector.
///
/// `inverse = false` computes `X[m] = sum_s x[s] exp(-j 2 pi m s / N)`;
/// `inverse = true` applies the conjugate kernel and divides by `N`, so the
/// two compose to the identity.
pub fn dft(x: &[Complex64], inverse: bool) -> Result<Vec<Complex64>, SpecprocError> {
    let plan = FftPlan::new(x.len())?;
    let mut buf = x.to_vec();
    if inverse {
        plan.inverse(&mut buf);
    } else {
        plan.forward(&mut buf);
    }
    Ok(buf)
}

// ─── Windows ─────────────────────────────────────────────────────────────

/// Fast-time / slow-time taper applied before the transforms.
///
/// `Rect` is the default. `Hann` trades mainlobe width for sidelobe decay;
/// use it whenever CFAR runs downstream, otherwise the sidelobes of strong
/// off-grid returns contaminate the training cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    Rect,
    Hann,
}

impl Window {
    /// Taper coefficients for an `n`-point transform (periodic form).
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rect => vec![1.0; n],
            Window::Hann => (0..n)
                .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / n as f64).cos()))
                .collect(),
        }
    }
}

impl std::str::FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rect" => Ok(Window::Rect),
            "hann" => Ok(Window::Hann),
            other => Err(format!("unknown window '{other}' (expected rect or hann)")),
        }
    }
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Window::Rect => "rect",
            Window::Hann => "hann",
        })
    }
}

// ─── Range profile ───────────────────────────────────────────────────────

/// Fast-time transform of every chirp: axes `[cpi, channel, chirp, sample]`
/// in, `[cpi, channel, chirp, range_bin]` out. Range bin `b` sits at
/// `b * c / (2B)` meters; the full `n_samples` bins are kept because the
/// beat signal is complex.
pub fn range_profile(cube: &DataCube, window: Window) -> Result<Array4<Complex64>, SpecprocError> {
    let n = cube.radar.n_samples;
    let plan = FftPlan::new(n)?;
    let taper = window.coefficients(n);
    let mut out = cube.data.clone();
    for mut lane in out.lanes_mut(Axis(3)) {
        let buf = lane.as_slice_mut().expect("sample axis is contiguous");
        for (v, w) in buf.iter_mut().zip(&taper) {
            *v *= *w;
        }
        plan.forward(buf);
    }
    Ok(out)
}

// ─── Range-Doppler maps ──────────────────────────────────────────────────

/// Linear mapping from a bin index to a physical coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisScale {
    /// Physical value of bin 0.
    pub start: f64,
    /// Physical increment per bin.
    pub step: f64,
}

impl AxisScale {
    pub fn value_at(&self, bin: usize) -> f64 {
        self.start + self.step * bin as f64
    }
}

/// Non-coherent power map for one coherent processing interval, channels
/// summed, Doppler axis circularly shifted so zero velocity sits at column
/// `n_chirps / 2`.
#[derive(Debug, Clone)]
pub struct RangeDopplerMap {
    pub cpi_index: usize,
    /// Power, rows = range bins, columns = shifted Doppler bins.
    pub power: Array2<f64>,
    /// Row index to meters.
    pub range_axis: AxisScale,
    /// Column index to m/s; negative closes in, positive recedes.
    pub velocity_axis: AxisScale,
}

impl RangeDopplerMap {
    pub fn range_at(&self, bin: usize) -> f64 {
        self.range_axis.value_at(bin)
    }

    pub fn velocity_at(&self, bin: usize) -> f64 {
        self.velocity_axis.value_at(bin)
    }

    /// Location and value of the strongest cell.
    pub fn peak(&self) -> (usize, usize, f64) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for ((r, d), &p) in self.power.indexed_iter() {
            if p > best.2 {
                best = (r, d, p);
            }
        }
        best
    }
}

/// Axis scales shared by every map of a recording.
pub fn map_axes(radar: &RadarParams) -> (AxisScale, AxisScale) {
    let range = AxisScale { start: 0.0, step: radar.range_resolution() };
    let dv = radar.velocity_resolution();
    let velocity = AxisScale { start: -(radar.n_chirps as f64 / 2.0) * dv, step: dv };
    (range, velocity)
}

/// Slow-time transform of an existing range-profile cube.
///
/// Returns one power map per CPI (channels summed non-coherently) plus the
/// per-channel complex cube, axes `[cpi, channel, doppler_bin, range_bin]`
/// with the Doppler axis already zero-centered; angle estimation works on
/// complex values, so the per-channel cube is kept.
pub fn doppler_maps(
    profile: &Array4<Complex64>,
    radar: &RadarParams,
    window: Window,
) -> Result<(Vec<RangeDopplerMap>, Array4<Complex64>), SpecprocError> {
    let (n_cpi, n_rx, n_chirps, n_bins) = profile.dim();
    check_dims(radar, n_cpi, n_chirps, n_bins)?;
    let plan = FftPlan::new(n_chirps)?;
    let taper = window.coefficients(n_chirps);
    let half = n_chirps / 2;
    let (range_axis, velocity_axis) = map_axes(radar);

    let mut rd = Array4::<Complex64>::zeros((n_cpi, n_rx, n_chirps, n_bins));
    let mut maps = Vec::with_capacity(n_cpi);
    let mut buf = vec![Complex64::ZERO; n_chirps];
    for p in 0..n_cpi {
        let mut power = Array2::<f64>::zeros((n_bins, n_chirps));
        for ch in 0..n_rx {
            for bin in 0..n_bins {
                for (k, v) in buf.iter_mut().enumerate() {
                    *v = profile[[p, ch, k, bin]] * taper[k];
                }
                plan.forward(&mut buf);
                for d in 0..n_chirps {
                    let value = buf[(d + half) % n_chirps];
                    rd[[p, ch, d, bin]] = value;
                    power[[bin, d]] += value.norm_sqr();
                }
            }
        }
        maps.push(RangeDopplerMap { cpi_index: p, power, range_axis, velocity_axis });
    }
    Ok((maps, rd))
}

/// Full range-Doppler processing of a data cube: fast-time transform, then
/// slow-time transform per range bin per channel, the same taper on both
/// axes.
pub fn range_doppler(
    cube: &DataCube,
    window: Window,
) -> Result<(Vec<RangeDopplerMap>, Array4<Complex64>), SpecprocError> {
    let profile = range_profile(cube, window)?;
    doppler_maps(&profile, &cube.radar, window)
}

fn check_dims(radar: &RadarParams, n_cpi: usize, n_chirps: usize, n_bins: usize) -> Result<(), SpecprocError> {
    if n_cpi != radar.n_cpi {
        return Err(SpecprocError::DimensionMismatch { axis: "cpi", got: n_cpi, expected: radar.n_cpi });
    }
    if n_chirps != radar.n_chirps {
        return Err(SpecprocError::DimensionMismatch { axis: "chirp", got: n_chirps, expected: radar.n_chirps });
    }
    if n_bins != radar.n_samples {
        return Err(SpecprocError::DimensionMismatch { axis: "sample", got: n_bins, expected: radar.n_samples });
    }
    Ok(())
}
