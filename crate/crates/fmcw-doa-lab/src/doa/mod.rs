//! Direction-of-arrival estimation at detected range-Doppler cells.
//!
//! Three estimators share one container, [`AngleSpectrum`]: FFT
//! beamforming across the channel axis, the MUSIC pseudospectrum built
//! from a noise-subspace eigendecomposition, and a sparse reconstruction
//! over a steering dictionary. All of them consume [`SnapshotSet`]s:
//! channel vectors collected at one range bin across the chirps of one
//! coherent processing interval.
//!
//! Angle conventions: broadside is 0 degrees, positive angles toward
//! higher channel indices, usable span (-90, 90).

pub mod cs;
pub mod eig;
pub mod music;

use ndarray::{Array1, Array2, Array4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::cfar::Detection;
use crate::scene::ArrayGeometry;

pub use cs::{cs_angle_spectrum, cs_solve, soft_threshold, CsReg, CsSolution};
pub use eig::hermitian_eig;
pub use music::{music_pseudospectrum, range_angle_map};

/// Estimator configuration, all fields optional in scenario JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoaConfig {
    /// MUSIC evaluation grid, degrees.
    #[serde(default = "default_grid_min")]
    pub grid_min_deg: f64,
    #[serde(default = "default_grid_max")]
    pub grid_max_deg: f64,
    #[serde(default = "default_grid_step")]
    pub grid_step_deg: f64,
    /// Sparse-reconstruction grid step; coarser than the MUSIC grid
    /// because the dictionary must stay incoherent enough to recover
    /// supports (and the solver cost scales with columns).
    #[serde(default = "default_cs_grid_step")]
    pub cs_grid_step_deg: f64,
    /// Number of sources the subspace methods assume per detection.
    /// Unset means one per detection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub music_sources: Option<usize>,
    /// Sparse-reconstruction weight; unset picks 5% of the peak
    /// correlation `|dict^H y|` per solve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cs_lambda: Option<f64>,
    #[serde(default = "default_cs_max_iter")]
    pub cs_max_iter: usize,
    /// Stop when the relative objective decrease falls below this.
    #[serde(default = "default_cs_tol")]
    pub cs_tol: f64,
    /// Zero-padded channel-axis transform length for FFT beamforming.
    #[serde(default = "default_fft_size")]
    pub fft_size: usize,
}

fn default_grid_min() -> f64 {
    -90.0
}
fn default_grid_max() -> f64 {
    90.0
}
fn default_grid_step() -> f64 {
    0.1
}
fn default_cs_grid_step() -> f64 {
    1.0
}
fn default_cs_max_iter() -> usize {
    // Proximal gradient on a coherent steering dictionary is slow: a
    // clean two-source solve needs ~170k iterations to reach its fixed
    // point, so the cap has to sit well above that. Structureless
    // (noise-only) measurements never settle and run into this cap.
    200_000
}
fn default_cs_tol() -> f64 {
    1.0e-12
}
fn default_fft_size() -> usize {
    256
}

impl Default for DoaConfig {
    fn default() -> Self {
        DoaConfig {
            grid_min_deg: default_grid_min(),
            grid_max_deg: default_grid_max(),
            grid_step_deg: default_grid_step(),
            cs_grid_step_deg: default_cs_grid_step(),
            music_sources: None,
            cs_lambda: None,
            cs_max_iter: default_cs_max_iter(),
            cs_tol: default_cs_tol(),
            fft_size: default_fft_size(),
        }
    }
}

impl DoaConfig {
    /// The MUSIC evaluation grid in degrees.
    pub fn grid(&self) -> Vec<f64> {
        grid_angles(self.grid_min_deg, self.grid_max_deg, self.grid_step_deg)
    }

    /// The sparse-reconstruction grid in degrees.
    pub fn cs_grid(&self) -> Vec<f64> {
        grid_angles(self.grid_min_deg, self.grid_max_deg, self.cs_grid_step_deg)
    }
}

/// Uniform angle grid from `min` to `max` inclusive. The last point is
/// clamped onto `max` so accumulated rounding cannot push it past the
/// domain edge.
pub fn grid_angles(min_deg: f64, max_deg: f64, step_deg: f64) -> Vec<f64> {
    let count = ((max_deg - min_deg) / step_deg).round() as usize + 1;
    (0..count)
        .map(|i| (min_deg + i as f64 * step_deg).min(max_deg))
        .collect()
}

/// Estimation errors.
#[derive(Debug, thiserror::Error)]
pub enum DoaError {
    #[error("matrix is not Hermitian: max |R - R^H| entry {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("matrix must be square and non-empty, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("source count D = {d} must satisfy 1 <= D < n_rx = {n_rx}")]
    BadSourceCount { d: usize, n_rx: usize },
    #[error("angle grid is empty")]
    EmptyGrid,
    #[error("transform size {n_fft} must be a power of two >= the channel count {n_rx}")]
    BadFftSize { n_fft: usize, n_rx: usize },
    #[error("detection (cpi {cpi}, range bin {range_bin}) falls outside the cube")]
    DetectionOutOfRange { cpi: usize, range_bin: usize },
    #[error("{what} has {got} channels, expected {expected}")]
    ChannelMismatch { what: &'static str, got: usize, expected: usize },
    #[error("regularization weight must be positive and finite, got {0}")]
    BadLambda(f64),
    #[error("measurement length {got} does not match the dictionary's {expected} rows")]
    MeasurementMismatch { got: usize, expected: usize },
}

/// Ideal response of the receive array to a unit plane wave from
/// `theta_deg`: element `n` is `exp(j 2 pi n spacing sin(theta))`.
/// Channel 0 is the phase reference, so entry 0 is always 1.
pub fn steering_vector(theta_deg: f64, array: &ArrayGeometry) -> Array1<Complex64> {
    let sin_theta = theta_deg.to_radians().sin();
    Array1::from_iter((0..array.n_rx).map(|n| {
        Complex64::from_polar(1.0, 2.0 * PI * n as f64 * array.rx_spacing_wl * sin_theta)
    }))
}

/// Channel vectors gathered at one range bin: `snapshots` is
/// `[n_rx, n_chirps]`, one column per chirp of the detection's CPI.
#[derive(Debug, Clone)]
pub struct SnapshotSet {
    pub snapshots: Array2<Complex64>,
    pub cpi_index: usize,
    pub range_bin: usize,
}

impl SnapshotSet {
    pub fn n_rx(&self) -> usize {
        self.snapshots.nrows()
    }

    /// Snapshot count (columns).
    pub fn len(&self) -> usize {
        self.snapshots.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.ncols() == 0
    }
}

/// Pulls the angle-estimation input out of a range-profile cube (axes
/// `[cpi, channel, chirp, range_bin]`): the complex values at the
/// detection's range bin, across every chirp of the detection's CPI.
pub fn extract_snapshots(
    rp_cube: &Array4<Complex64>,
    det: &Detection,
) -> Result<SnapshotSet, DoaError> {
    let (n_cpi, n_rx, n_chirps, n_bins) = rp_cube.dim();
    if det.cpi_index >= n_cpi || det.range_bin >= n_bins {
        return Err(DoaError::DetectionOutOfRange { cpi: det.cpi_index, range_bin: det.range_bin });
    }
    let mut snapshots = Array2::<Complex64>::zeros((n_rx, n_chirps));
    for ch in 0..n_rx {
        for k in 0..n_chirps {
            snapshots[[ch, k]] = rp_cube[[det.cpi_index, ch, k, det.range_bin]];
        }
    }
    Ok(SnapshotSet { snapshots, cpi_index: det.cpi_index, range_bin: det.range_bin })
}

/// Unnormalized scatter `sum_t x_t x_t^H`, Hermitian by construction:
/// the upper triangle is computed and mirrored, and the diagonal is
/// exactly real.
fn scatter(snapshots: &Array2<Complex64>) -> Array2<Complex64> {
    let (n, t_snap) = snapshots.dim();
    let mut r = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let mut acc = Complex64::ZERO;
            for t in 0..t_snap {
                acc += snapshots[[i, t]] * snapshots[[j, t]].conj();
            }
            r[[i, j]] = acc;
            if i != j {
                r[[j, i]] = acc.conj();
            } else {
                r[[i, j]].im = 0.0;
            }
        }
    }
    r
}

/// Sample covariance `(1/T) sum_t x_t x_t^H`. Hermitian positive
/// semidefinite for every input.
pub fn covariance(snap: &SnapshotSet) -> Array2<Complex64> {
    let t_snap = snap.len().max(1) as f64;
    let mut r = scatter(&snap.snapshots);
    r.mapv_inplace(|v| v / t_snap);
    r
}

/// How an [`AngleSpectrum`] was produced; also the tag written to CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DoaMethod {
    Fft,
    Music,
    Cs,
}

impl std::fmt::Display for DoaMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DoaMethod::Fft => "fft",
            DoaMethod::Music => "music",
            DoaMethod::Cs => "cs",
        })
    }
}

/// One local maximum of an angle spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPeak {
    pub angle_deg: f64,
    pub power: f64,
}

/// Power versus angle for one estimator. Angles are strictly increasing,
/// power is non-negative, and the two vectors have equal length. `peaks`
/// holds local maxima strongest-first; the subspace estimator truncates
/// it to the assumed source count, the others keep all of them.
#[derive(Debug, Clone)]
pub struct AngleSpectrum {
    pub method: DoaMethod,
    pub angles_deg: Vec<f64>,
    pub power: Vec<f64>,
    pub peaks: Vec<SpectrumPeak>,
}

impl AngleSpectrum {
    /// The `count` strongest peaks, strongest first.
    pub fn top_peaks(&self, count: usize) -> &[SpectrumPeak] {
        &self.peaks[..count.min(self.peaks.len())]
    }
}

/// All strict local maxima of `power`, strongest first. Grid endpoints
/// count when they beat their single neighbor.
pub fn find_local_maxima(angles_deg: &[f64], power: &[f64]) -> Vec<SpectrumPeak> {
    let n = power.len();
    let mut peaks = Vec::new();
    for i in 0..n {
        let left_ok = i == 0 || power[i] > power[i - 1];
        let right_ok = i + 1 == n || power[i] > power[i + 1];
        if left_ok && right_ok && n > 1 {
            peaks.push(SpectrumPeak { angle_deg: angles_deg[i], power: power[i] });
        }
    }
    peaks.sort_by(|a, b| b.power.total_cmp(&a.power));
    peaks
}

/// FFT beamforming: zero-pad each snapshot's channel vector to `n_fft`,
/// transform, and sum power over snapshots.
///
/// Computed through the scatter matrix: the power of bin `k` summed over
/// snapshots equals the quadratic form `f_k^H (sum_t x_t x_t^H) f_k`
/// with `f_k[n] = exp(j 2 pi k n / n_fft)`, which is the same numbers at
/// a fraction of the work when snapshots outnumber channels. Bin `k`
/// (signed) maps to `sin(theta) = k / (n_fft * spacing)`; bins with
/// `|sin| > 1` do not correspond to a physical angle and are dropped.
pub fn fft_angle_spectrum(
    snap: &SnapshotSet,
    array: &ArrayGeometry,
    n_fft: usize,
) -> Result<AngleSpectrum, DoaError> {
    if snap.n_rx() != array.n_rx {
        return Err(DoaError::ChannelMismatch {
            what: "snapshot set",
            got: snap.n_rx(),
            expected: array.n_rx,
        });
    }
    if n_fft < array.n_rx || !n_fft.is_power_of_two() {
        return Err(DoaError::BadFftSize { n_fft, n_rx: array.n_rx });
    }

    let c = scatter(&snap.snapshots);
    let n_rx = array.n_rx;
    let half = (n_fft / 2) as i64;
    let mut angles = Vec::new();
    let mut power = Vec::new();
    for k in -half..=half {
        let sin_theta = k as f64 / (n_fft as f64 * array.rx_spacing_wl);
        if sin_theta.abs() > 1.0 {
            continue;
        }
        // f^H C f with f[n] = exp(j 2 pi k n / n_fft); real since C is
        // Hermitian, clamped against rounding.
        let f: Vec<Complex64> = (0..n_rx)
            .map(|n| Complex64::from_polar(1.0, 2.0 * PI * k as f64 * n as f64 / n_fft as f64))
            .collect();
        let mut acc = Complex64::ZERO;
        for i in 0..n_rx {
            for j in 0..n_rx {
                acc += f[i].conj() * c[[i, j]] * f[j];
            }
        }
        angles.push(sin_theta.asin().to_degrees());
        power.push(acc.re.max(0.0));
    }
    let peaks = find_local_maxima(&angles, &power);
    Ok(AngleSpectrum { method: DoaMethod::Fft, angles_deg: angles, power, peaks })
}

/// Dictionary of steering vectors on an angle grid: `phi` is
/// `[n_rx, grid length]`, column `g` = [`steering_vector`] at
/// `angles_deg[g]`. Doubles as the sensing matrix for the sparse solver.
#[derive(Debug, Clone)]
pub struct SteeringDictionary {
    pub phi: Array2<Complex64>,
    pub angles_deg: Vec<f64>,
}

impl SteeringDictionary {
    pub fn n_rx(&self) -> usize {
        self.phi.nrows()
    }

    pub fn len(&self) -> usize {
        self.phi.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.ncols() == 0
    }
}

/// Builds the steering dictionary for a grid. Useful grids are much
/// finer than the channel count.
pub fn build_dictionary(grid_deg: &[f64], array: &ArrayGeometry) -> SteeringDictionary {
    let mut phi = Array2::<Complex64>::zeros((array.n_rx, grid_deg.len()));
    for (g, &theta) in grid_deg.iter().enumerate() {
        let a = steering_vector(theta, array);
        for n in 0..array.n_rx {
            phi[[n, g]] = a[n];
        }
    }
    SteeringDictionary { phi, angles_deg: grid_deg.to_vec() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfar::Detection;
    use crate::scene::parse_scenario;
    use crate::specproc::{range_profile, Window};
    use crate::synth::synthesize;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn array(n_rx: usize) -> ArrayGeometry {
        ArrayGeometry { n_rx, rx_spacing_wl: 0.5, tx_offset_wl: 2.0 }
    }

    fn detection(cpi: usize, range_bin: usize) -> Detection {
        Detection {
            cpi_index: cpi,
            range_bin,
            doppler_bin: 0,
            range_m: 0.0,
            vel_mps: 0.0,
            cell_power: 1.0,
            threshold: 0.5,
        }
    }

    fn random_snapshots(rng: &mut ChaCha8Rng, n_rx: usize, t: usize) -> SnapshotSet {
        let snapshots = Array2::from_shape_fn((n_rx, t), |_| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        SnapshotSet { snapshots, cpi_index: 0, range_bin: 0 }
    }

    #[test]
    fn steering_at_broadside_is_all_ones() {
        let a = steering_vector(0.0, &array(8));
        for v in a.iter() {
            assert_eq!(*v, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn steering_at_thirty_degrees_walks_the_quarter_circle() {
        // sin 30 = 1/2 and half-wave spacing give phase steps of pi/2.
        let a = steering_vector(30.0, &array(4));
        let want = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        for (got, want) in a.iter().zip(want) {
            assert!((got - want).norm() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn steering_has_unit_modulus_and_conjugate_symmetry() {
        let arr = array(8);
        for theta in [-75.0, -15.0, 10.0, 42.5, 89.0] {
            let pos = steering_vector(theta, &arr);
            let neg = steering_vector(-theta, &arr);
            for (p, n) in pos.iter().zip(neg.iter()) {
                assert!((p.norm() - 1.0).abs() < 1e-12);
                assert!((p.conj() - n).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn grid_is_inclusive_strictly_increasing_and_clamped() {
        let grid = grid_angles(-90.0, 90.0, 0.1);
        assert_eq!(grid.len(), 1801);
        assert_eq!(grid[0], -90.0);
        assert_eq!(*grid.last().unwrap(), 90.0);
        for w in grid.windows(2) {
            assert!(w[1] > w[0]);
        }
        let coarse = grid_angles(-90.0, 90.0, 1.0);
        assert_eq!(coarse.len(), 181);
    }

    // ── snapshots ────────────────────────────────────────────────────────

    fn snapshot_scenario(angle_deg: f64) -> (crate::scene::Scenario, usize) {
        let s = parse_scenario(&format!(
            r#"{{
                "radar": {{ "fc": 77.0e9, "B": 150.0e6, "T": 10.0e-6,
                           "n_samples": 64, "n_chirps": 16, "n_cpi": 2 }},
                "array": {{ "n_rx": 8 }},
                "targets": [ {{ "range_m": 0.0, "vel_mps": 3.0, "angle_deg": {angle_deg} }} ]
            }}"#
        ))
        .unwrap();
        let mut s = s;
        let bin = 12;
        s.targets[0].range_m = bin as f64 * s.radar.range_resolution();
        (s, bin)
    }

    #[test]
    fn snapshot_channel_ratios_reproduce_the_steering_vector() {
        let (s, bin) = snapshot_scenario(-15.0);
        let cube = synthesize(&s).unwrap();
        let rp = range_profile(&cube, Window::Rect).unwrap();
        let snap = extract_snapshots(&rp, &detection(1, bin)).unwrap();
        assert_eq!(snap.snapshots.dim(), (8, 16));
        let a = steering_vector(-15.0, &s.array);
        for t in 0..snap.len() {
            let reference = snap.snapshots[[0, t]];
            assert!(reference.norm() > 1.0, "the target bin must hold signal");
            for ch in 0..8 {
                let ratio = snap.snapshots[[ch, t]] / reference;
                assert!(
                    (ratio - a[ch]).norm() < 1e-6,
                    "chirp {t} channel {ch}: {ratio} vs {}",
                    a[ch]
                );
            }
        }
    }

    #[test]
    fn snapshots_superpose_for_same_bin_targets() {
        let (mut s, bin) = snapshot_scenario(-15.0);
        s.targets.push(crate::scene::Target {
            range_m: s.targets[0].range_m,
            vel_mps: -5.0,
            angle_deg: 10.0,
            amplitude: 1.0,
        });
        let mut first = s.clone();
        first.targets.truncate(1);
        let mut second = s.clone();
        second.targets.remove(0);

        let joint = extract_snapshots(
            &range_profile(&synthesize(&s).unwrap(), Window::Rect).unwrap(),
            &detection(0, bin),
        )
        .unwrap();
        let a = extract_snapshots(
            &range_profile(&synthesize(&first).unwrap(), Window::Rect).unwrap(),
            &detection(0, bin),
        )
        .unwrap();
        let b = extract_snapshots(
            &range_profile(&synthesize(&second).unwrap(), Window::Rect).unwrap(),
            &detection(0, bin),
        )
        .unwrap();
        let scale = joint.snapshots.iter().map(|v| v.norm()).fold(1e-300, f64::max);
        for ((j, x), y) in joint
            .snapshots
            .iter()
            .zip(a.snapshots.iter())
            .zip(b.snapshots.iter())
        {
            assert!((j - (x + y)).norm() <= 1e-9 * scale);
        }
    }

    #[test]
    fn zero_cube_gives_zero_snapshots() {
        let (mut s, bin) = snapshot_scenario(0.0);
        s.targets[0].amplitude = 0.0;
        let rp = range_profile(&synthesize(&s).unwrap(), Window::Rect).unwrap();
        let snap = extract_snapshots(&rp, &detection(0, bin)).unwrap();
        assert!(snap.snapshots.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn out_of_range_detections_are_rejected() {
        let (s, _) = snapshot_scenario(0.0);
        let rp = range_profile(&synthesize(&s).unwrap(), Window::Rect).unwrap();
        assert!(matches!(
            extract_snapshots(&rp, &detection(5, 0)),
            Err(DoaError::DetectionOutOfRange { cpi: 5, .. })
        ));
        assert!(matches!(
            extract_snapshots(&rp, &detection(0, 64)),
            Err(DoaError::DetectionOutOfRange { range_bin: 64, .. })
        ));
    }

    // ── covariance ───────────────────────────────────────────────────────

    #[test]
    fn covariance_of_one_snapshot_is_the_outer_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let snap = random_snapshots(&mut rng, 4, 1);
        let r = covariance(&snap);
        for i in 0..4 {
            for j in 0..4 {
                let want = snap.snapshots[[i, 0]] * snap.snapshots[[j, 0]].conj();
                assert!((r[[i, j]] - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn covariance_of_identity_snapshots_is_scaled_identity() {
        let snapshots = Array2::from_shape_fn((4, 4), |(i, j)| {
            if i == j { Complex64::new(1.0, 0.0) } else { Complex64::ZERO }
        });
        let r = covariance(&SnapshotSet { snapshots, cpi_index: 0, range_bin: 0 });
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 0.25 } else { 0.0 };
                assert!((r[[i, j]] - Complex64::new(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn covariance_is_hermitian_and_nonnegative_definite() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let snap = random_snapshots(&mut rng, 6, 50);
        let r = covariance(&snap);
        let trace: f64 = (0..6).map(|i| r[[i, i]].re).sum();
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(r[[i, j]], r[[j, i]].conj(), "exactly Hermitian by construction");
            }
        }
        // Quadratic forms stay nonnegative for arbitrary probes.
        for _ in 0..50 {
            let z: Vec<Complex64> = (0..6)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let mut q = Complex64::ZERO;
            for i in 0..6 {
                for j in 0..6 {
                    q += z[i].conj() * r[[i, j]] * z[j];
                }
            }
            assert!(q.re >= -1e-10 * trace);
            assert!(q.im.abs() <= 1e-12 * trace);
        }
    }

    #[test]
    fn covariance_of_white_noise_approaches_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let snapshots = Array2::from_shape_fn((4, 10_000), |_| {
            // Unit-variance circular Gaussian entries.
            let re: f64 = rng.sample(rand_distr::StandardNormal);
            let im: f64 = rng.sample(rand_distr::StandardNormal);
            Complex64::new(re, im) / 2f64.sqrt()
        });
        let r = covariance(&SnapshotSet { snapshots, cpi_index: 0, range_bin: 0 });
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (r[[i, j]] - Complex64::new(want, 0.0)).norm() < 0.05,
                    "entry ({i}, {j}) = {}",
                    r[[i, j]]
                );
            }
        }
    }

    // ── FFT beamforming ──────────────────────────────────────────────────

    fn steering_snapshots(
        rng: &mut ChaCha8Rng,
        angles: &[f64],
        arr: &ArrayGeometry,
        t: usize,
        noise: f64,
    ) -> SnapshotSet {
        let mut snapshots = Array2::<Complex64>::zeros((arr.n_rx, t));
        for ti in 0..t {
            for &theta in angles {
                let a = steering_vector(theta, arr);
                let phase = Complex64::from_polar(1.0, rng.random::<f64>() * 2.0 * PI);
                for n in 0..arr.n_rx {
                    snapshots[[n, ti]] += phase * a[n];
                }
            }
            for n in 0..arr.n_rx {
                let re: f64 = rng.sample(rand_distr::StandardNormal);
                let im: f64 = rng.sample(rand_distr::StandardNormal);
                snapshots[[n, ti]] += Complex64::new(re, im) * noise / 2f64.sqrt();
            }
        }
        SnapshotSet { snapshots, cpi_index: 0, range_bin: 0 }
    }

    #[test]
    fn fft_spectrum_matches_the_per_snapshot_padded_transform() {
        // Oracle: literally zero-pad each snapshot, run the O(N^2)
        // transform definition, accumulate power, map bins to angles.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let arr = array(4);
        let snap = random_snapshots(&mut rng, 4, 7);
        let n_fft = 16usize;
        let got = fft_angle_spectrum(&snap, &arr, n_fft).unwrap();

        let mut by_bin = vec![0.0f64; n_fft];
        for t in 0..snap.len() {
            for (m, b) in by_bin.iter_mut().enumerate() {
                let mut acc = Complex64::ZERO;
                for n in 0..4 {
                    let phase = -2.0 * PI * (m * n) as f64 / n_fft as f64;
                    acc += snap.snapshots[[n, t]] * Complex64::from_polar(1.0, phase);
                }
                *b += acc.norm_sqr();
            }
        }
        let mut want = Vec::new();
        for k in -(n_fft as i64 / 2)..=(n_fft as i64 / 2) {
            let sin_theta = k as f64 / (n_fft as f64 * arr.rx_spacing_wl);
            if sin_theta.abs() > 1.0 {
                continue;
            }
            let bin = k.rem_euclid(n_fft as i64) as usize;
            want.push((sin_theta.asin().to_degrees(), by_bin[bin]));
        }
        assert_eq!(got.angles_deg.len(), want.len());
        let scale = want.iter().map(|w| w.1).fold(1e-300, f64::max);
        for ((ga, gp), (wa, wp)) in got
            .angles_deg
            .iter()
            .zip(&got.power)
            .zip(want.iter().map(|w| (w.0, w.1)))
        {
            assert!((ga - wa).abs() < 1e-12);
            assert!((gp - wp).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn fft_spectrum_peaks_at_broadside_for_a_broadside_source() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let arr = array(8);
        let snap = steering_snapshots(&mut rng, &[0.0], &arr, 32, 0.0);
        let spec = fft_angle_spectrum(&snap, &arr, 256).unwrap();
        assert_eq!(spec.peaks[0].angle_deg, 0.0);
    }

    #[test]
    fn fft_padding_moves_the_grid_not_the_peak() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let arr = array(8);
        let snap = steering_snapshots(&mut rng, &[10.0], &arr, 32, 0.0);
        let coarse = fft_angle_spectrum(&snap, &arr, 64).unwrap();
        let fine = fft_angle_spectrum(&snap, &arr, 256).unwrap();
        // Coarse bin width near 10 degrees is about 1.8 degrees.
        assert!((coarse.peaks[0].angle_deg - fine.peaks[0].angle_deg).abs() < 2.0);
        assert!((fine.peaks[0].angle_deg - 10.0).abs() < 0.5);
    }

    #[test]
    fn fft_spectrum_grid_is_physical_and_increasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let arr = array(8);
        let snap = steering_snapshots(&mut rng, &[-40.0, 25.0], &arr, 16, 0.1);
        let spec = fft_angle_spectrum(&snap, &arr, 128).unwrap();
        assert_eq!(spec.angles_deg.len(), spec.power.len());
        for w in spec.angles_deg.windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!(spec.angles_deg.iter().all(|a| a.abs() <= 90.0));
        assert!(spec.power.iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn fft_rejects_bad_transform_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let arr = array(8);
        let snap = random_snapshots(&mut rng, 8, 4);
        assert!(matches!(
            fft_angle_spectrum(&snap, &arr, 4),
            Err(DoaError::BadFftSize { n_fft: 4, .. })
        ));
        assert!(matches!(
            fft_angle_spectrum(&snap, &arr, 100),
            Err(DoaError::BadFftSize { n_fft: 100, .. })
        ));
    }

    // ── dictionary ───────────────────────────────────────────────────────

    #[test]
    fn dictionary_columns_are_steering_vectors() {
        let arr = array(8);
        let grid = grid_angles(-90.0, 90.0, 1.0);
        let dict = build_dictionary(&grid, &arr);
        assert_eq!(dict.phi.dim(), (8, 181));
        for (g, &theta) in grid.iter().enumerate() {
            let a = steering_vector(theta, &arr);
            for n in 0..8 {
                assert_eq!(dict.phi[[n, g]], a[n]);
                assert!((dict.phi[[n, g]].norm() - 1.0).abs() < 1e-12);
            }
        }
        // The broadside column is all ones.
        let zero_col = grid.iter().position(|&a| a == 0.0).unwrap();
        for n in 0..8 {
            assert_eq!(dict.phi[[n, zero_col]], Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn dictionary_respects_conjugate_symmetry() {
        let arr = array(4);
        let grid = grid_angles(-30.0, 30.0, 10.0);
        let dict = build_dictionary(&grid, &arr);
        let g = grid.len();
        for i in 0..g {
            for n in 0..4 {
                assert!((dict.phi[[n, i]] - dict.phi[[n, g - 1 - i]].conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn local_maxima_are_sorted_and_respect_edges() {
        let angles = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let power = [5.0, 1.0, 3.0, 1.0, 2.0, 4.0];
        let peaks = find_local_maxima(&angles, &power);
        let got: Vec<(f64, f64)> = peaks.iter().map(|p| (p.angle_deg, p.power)).collect();
        assert_eq!(got, vec![(0.0, 5.0), (5.0, 4.0), (2.0, 3.0)]);
    }
}
