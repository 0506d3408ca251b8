//! Subspace angle estimation: the MUSIC pseudospectrum and the
//! range-angle map built from it.
//!
//! With D sources, the covariance eigenvectors split into a signal
//! subspace (D largest eigenvalues) and a noise subspace U_n; steering
//! vectors of true arrival angles are orthogonal to U_n, so
//! `1 / ||U_n^H a(theta)||^2` spikes at the source angles. Resolution is
//! not tied to the aperture's beamwidth, which is the point of carrying
//! this estimator next to plain beamforming.

use ndarray::parallel::prelude::*;
use ndarray::{Array2, ArrayView3, Axis};
use num_complex::Complex64;

use super::eig::hermitian_eig;
use super::{find_local_maxima, steering_vector, AngleSpectrum, DoaError, DoaMethod};
use crate::scene::ArrayGeometry;

// Eigenvalues this far below the largest count as zero when deciding
// whether a covariance can support the requested source count.
const RANK_REL_TOL: f64 = 1e-12;

// Pseudospectrum denominators are clamped here so exact orthogonality
// yields a huge finite value instead of infinity.
const DENOM_FLOOR: f64 = 1e-300;

/// MUSIC pseudospectrum of a covariance matrix over an angle grid,
/// assuming exactly `d` sources. The peak list keeps the `d` largest
/// local maxima.
pub fn music_pseudospectrum(
    r: &Array2<Complex64>,
    d: usize,
    grid_deg: &[f64],
    array: &ArrayGeometry,
) -> Result<AngleSpectrum, DoaError> {
    if d == 0 || d >= array.n_rx {
        return Err(DoaError::BadSourceCount { d, n_rx: array.n_rx });
    }
    if grid_deg.is_empty() {
        return Err(DoaError::EmptyGrid);
    }
    if r.nrows() != array.n_rx {
        return Err(DoaError::ChannelMismatch {
            what: "covariance",
            got: r.nrows(),
            expected: array.n_rx,
        });
    }
    let (_, vecs) = hermitian_eig(r)?;
    let power = pseudospectrum_from_eig(&vecs, d, grid_deg, array);
    let mut peaks = find_local_maxima(grid_deg, &power);
    peaks.truncate(d);
    Ok(AngleSpectrum { method: DoaMethod::Music, angles_deg: grid_deg.to_vec(), power, peaks })
}

/// Evaluates `1 / ||U_n^H a(theta)||^2` on the grid given the eigenvector
/// matrix (columns ordered by descending eigenvalue); `d` columns belong
/// to the signal subspace, the rest form U_n.
fn pseudospectrum_from_eig(
    vecs: &Array2<Complex64>,
    d: usize,
    grid_deg: &[f64],
    array: &ArrayGeometry,
) -> Vec<f64> {
    let n = array.n_rx;
    grid_deg
        .iter()
        .map(|&theta| {
            let a = steering_vector(theta, array);
            let mut denom = 0.0;
            for col in d..n {
                let mut dot = Complex64::ZERO;
                for row in 0..n {
                    dot += vecs[[row, col]].conj() * a[row];
                }
                denom += dot.norm_sqr();
            }
            1.0 / denom.max(DENOM_FLOOR)
        })
        .collect()
}

/// MUSIC evaluated independently at every range bin of one CPI's
/// range-profile cube (axes `[channel, chirp, range_bin]`), chirps as
/// snapshots. Returns `[range_bin, grid angle]` pseudospectrum power.
///
/// A row whose covariance has fewer than `d` significant eigenvalues
/// (noiseless empty bins, for instance) cannot honor the requested source
/// count; such rows drop to a single assumed source instead of treating
/// near-null eigenvectors as signal.
pub fn range_angle_map(
    rp_cpi: ArrayView3<'_, Complex64>,
    array: &ArrayGeometry,
    d: usize,
    grid_deg: &[f64],
) -> Result<Array2<f64>, DoaError> {
    let (n_rx, n_chirps, n_bins) = rp_cpi.dim();
    if n_rx != array.n_rx {
        return Err(DoaError::ChannelMismatch { what: "range-profile cube", got: n_rx, expected: array.n_rx });
    }
    if d == 0 || d >= array.n_rx {
        return Err(DoaError::BadSourceCount { d, n_rx: array.n_rx });
    }
    if grid_deg.is_empty() {
        return Err(DoaError::EmptyGrid);
    }

    let mut out = Array2::<f64>::zeros((n_bins, grid_deg.len()));
    out.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(bin, mut row)| {
            let mut r = Array2::<Complex64>::zeros((n_rx, n_rx));
            for i in 0..n_rx {
                for j in i..n_rx {
                    let mut acc = Complex64::ZERO;
                    for k in 0..n_chirps {
                        acc += rp_cpi[[i, k, bin]] * rp_cpi[[j, k, bin]].conj();
                    }
                    let value = acc / n_chirps as f64;
                    r[[i, j]] = if i == j { Complex64::new(value.re, 0.0) } else { value };
                    if i != j {
                        r[[j, i]] = value.conj();
                    }
                }
            }
            let (vals, vecs) = hermitian_eig(&r).expect("sample covariance is Hermitian");
            let rank = if vals[0] > 0.0 {
                vals.iter().filter(|&&v| v > RANK_REL_TOL * vals[0]).count()
            } else {
                0
            };
            let d_eff = if rank < d { 1 } else { d };
            let power = pseudospectrum_from_eig(&vecs, d_eff, grid_deg, array);
            for (cell, p) in row.iter_mut().zip(power) {
                *cell = p;
            }
        });
    Ok(out)
}
