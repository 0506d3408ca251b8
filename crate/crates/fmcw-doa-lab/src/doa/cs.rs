//! Sparse angle estimation: reconstruct the arrival field as a sparse
//! coefficient vector over a steering dictionary.
//!
//! Solves the Lagrangian form `min 0.5 ||y - Phi s||^2 + lambda ||s||_1`
//! by proximal gradient iteration (a gradient step on the quadratic
//! followed by complex soft thresholding). With the step set from the
//! dictionary's spectral norm the objective never increases, which both
//! the stop rule and the tests lean on.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use super::{find_local_maxima, AngleSpectrum, DoaConfig, DoaError, DoaMethod, SnapshotSet, SteeringDictionary};

/// Solver parameters: `lambda` weights the sparsity term, `tol` is the
/// relative objective decrease that counts as converged.
#[derive(Debug, Clone, Copy)]
pub struct CsReg {
    pub lambda: f64,
    pub max_iter: usize,
    pub tol: f64,
}

/// Solver output. `objective` starts at the zero-vector objective and
/// records every iterate after it, so `objective.len() == iterations + 1`
/// and the sequence is non-increasing.
#[derive(Debug, Clone)]
pub struct CsSolution {
    pub coefficients: Vec<Complex64>,
    pub objective: Vec<f64>,
    pub iterations: usize,
}

/// Complex soft threshold: shrinks the magnitude by `t`, preserving the
/// phase; magnitudes at or below `t` collapse to zero.
pub fn soft_threshold(z: Complex64, t: f64) -> Complex64 {
    let mag = z.norm();
    if mag <= t {
        Complex64::ZERO
    } else {
        z * (1.0 - t / mag)
    }
}

/// Default sparsity weight: 5% of the strongest dictionary correlation
/// `||Phi^H y||_inf`. Zero exactly when `y` is zero.
pub fn default_lambda(dict: &SteeringDictionary, y: &Array1<Complex64>) -> f64 {
    let mut peak = 0.0f64;
    for g in 0..dict.len() {
        let mut dot = Complex64::ZERO;
        for i in 0..dict.n_rx() {
            dot += dict.phi[[i, g]].conj() * y[i];
        }
        peak = peak.max(dot.norm());
    }
    0.05 * peak
}

// Largest eigenvalue of Phi^H Phi by power iteration, run on the small
// Gram matrix Phi Phi^H (same nonzero spectrum). Deterministic start,
// padded so the returned value is never an underestimate of the true
// Lipschitz constant by more than rounding.
fn spectral_norm(phi: &Array2<Complex64>) -> f64 {
    let n = phi.nrows();
    let g = phi.ncols();
    let mut b = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let mut acc = Complex64::ZERO;
            for k in 0..g {
                acc += phi[[i, k]] * phi[[j, k]].conj();
            }
            b[[i, j]] = if i == j { Complex64::new(acc.re, 0.0) } else { acc };
            if i != j {
                b[[j, i]] = acc.conj();
            }
        }
    }
    let mut v = Array1::from_elem(n, Complex64::new(1.0 / (n as f64).sqrt(), 0.0));
    let mut lambda = 0.0f64;
    for _ in 0..1000 {
        let mut w = Array1::<Complex64>::zeros(n);
        for i in 0..n {
            for j in 0..n {
                w[i] += b[[i, j]] * v[j];
            }
        }
        let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next = w.iter().zip(v.iter()).map(|(wi, vi)| (vi.conj() * wi).re).sum::<f64>();
        v = w.mapv(|x| x / norm);
        if (next - lambda).abs() <= 1e-13 * next.abs().max(f64::MIN_POSITIVE) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda * (1.0 + 1e-6)
}

/// Proximal-gradient solve of the sparse reconstruction problem.
///
/// Iterates `s <- soft(s - mu Phi^H (Phi s - y), mu lambda)` with
/// `mu = 1 / L`, `L` the largest dictionary Gram eigenvalue, and stops
/// when the objective decrease drops below `tol` relative or `max_iter`
/// is reached.
pub fn cs_solve(
    y: &Array1<Complex64>,
    dict: &SteeringDictionary,
    reg: &CsReg,
) -> Result<CsSolution, DoaError> {
    let n = dict.n_rx();
    let g = dict.len();
    if y.len() != n {
        return Err(DoaError::MeasurementMismatch { got: y.len(), expected: n });
    }
    if !(reg.lambda.is_finite() && reg.lambda > 0.0) {
        return Err(DoaError::BadLambda(reg.lambda));
    }

    let mu = 1.0 / spectral_norm(&dict.phi).max(f64::MIN_POSITIVE);
    let shrink = mu * reg.lambda;

    // Flat copies keep the inner loops on contiguous memory: `rows[i]`
    // holds row i of Phi, `cols[gi]` holds column gi already conjugated.
    let phi_rows = dict.phi.as_standard_layout();
    let rows = phi_rows.as_slice().expect("standard layout").to_vec();
    let mut cols = vec![Complex64::ZERO; g * n];
    for gi in 0..g {
        for i in 0..n {
            cols[gi * n + i] = rows[i * g + gi].conj();
        }
    }

    let mut s = vec![Complex64::ZERO; g];
    let mut support: Vec<usize> = Vec::with_capacity(g);
    let mut residual: Vec<Complex64> = y.iter().map(|v| -v).collect(); // Phi s - y at s = 0
    let mut objective = Vec::with_capacity(reg.max_iter.min(1 << 20) + 1);
    objective.push(0.5 * y.iter().map(|v| v.norm_sqr()).sum::<f64>());
    let mut iterations = 0;

    for _ in 0..reg.max_iter {
        for (gi, sg) in s.iter_mut().enumerate() {
            let mut grad = Complex64::ZERO;
            for (c, r) in cols[gi * n..(gi + 1) * n].iter().zip(&residual) {
                grad += *c * *r;
            }
            *sg = soft_threshold(*sg - mu * grad, shrink);
        }
        support.clear();
        support.extend(
            s.iter().enumerate().filter(|(_, c)| c.re != 0.0 || c.im != 0.0).map(|(gi, _)| gi),
        );
        for (i, r) in residual.iter_mut().enumerate() {
            let row = &rows[i * g..(i + 1) * g];
            let mut acc = Complex64::ZERO;
            for &gi in &support {
                acc += row[gi] * s[gi];
            }
            *r = acc - y[i];
        }
        // Summing |s| over the support only is exact: dropped terms are 0.
        let obj = 0.5 * residual.iter().map(|v| v.norm_sqr()).sum::<f64>()
            + reg.lambda * support.iter().map(|&gi| s[gi].norm()).sum::<f64>();
        let prev = *objective.last().unwrap();
        objective.push(obj);
        iterations += 1;
        if prev - obj <= reg.tol * prev.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(CsSolution { coefficients: s, objective, iterations })
}

/// Coherent snapshot average: every snapshot is rotated so channel 0 has
/// zero phase, then the snapshots are averaged. Removes the per-snapshot
/// common phase so target contributions add instead of cancelling.
pub fn aligned_mean_snapshot(snap: &SnapshotSet) -> Array1<Complex64> {
    let n = snap.n_rx();
    let t_snap = snap.len();
    let mut mean = Array1::<Complex64>::zeros(n);
    for t in 0..t_snap {
        let align = Complex64::from_polar(1.0, -snap.snapshots[[0, t]].arg());
        for i in 0..n {
            mean[i] += snap.snapshots[[i, t]] * align;
        }
    }
    if t_snap > 0 {
        mean.mapv_inplace(|v| v / t_snap as f64);
    }
    mean
}

/// Sparse angle spectrum of a snapshot set: solve against the aligned
/// mean snapshot and report `|s_g|^2` over the dictionary grid.
///
/// `lambda` comes from the configuration or, unset, from
/// [`default_lambda`] on this measurement. An all-zero snapshot set
/// short-circuits to an all-zero spectrum.
pub fn cs_angle_spectrum(
    snap: &SnapshotSet,
    dict: &SteeringDictionary,
    cfg: &DoaConfig,
) -> Result<AngleSpectrum, DoaError> {
    if snap.n_rx() != dict.n_rx() {
        return Err(DoaError::ChannelMismatch {
            what: "snapshot set",
            got: snap.n_rx(),
            expected: dict.n_rx(),
        });
    }
    let y = aligned_mean_snapshot(snap);
    let energy: f64 = y.iter().map(|v| v.norm_sqr()).sum();
    if energy == 0.0 {
        return Ok(AngleSpectrum {
            method: DoaMethod::Cs,
            angles_deg: dict.angles_deg.clone(),
            power: vec![0.0; dict.len()],
            peaks: Vec::new(),
        });
    }
    let lambda = cfg.cs_lambda.unwrap_or_else(|| default_lambda(dict, &y));
    let reg = CsReg { lambda, max_iter: cfg.cs_max_iter, tol: cfg.cs_tol };
    let sol = cs_solve(&y, dict, &reg)?;
    let power: Vec<f64> = sol.coefficients.iter().map(|c| c.norm_sqr()).collect();
    let peaks = find_local_maxima(&dict.angles_deg, &power);
    Ok(AngleSpectrum { method: DoaMethod::Cs, angles_deg: dict.angles_deg.clone(), power, peaks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doa::{build_dictionary, grid_angles, hermitian_eig, steering_vector};
    use crate::scene::ArrayGeometry;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn array(n_rx: usize) -> ArrayGeometry {
        ArrayGeometry { n_rx, rx_spacing_wl: 0.5, tx_offset_wl: 2.0 }
    }

    fn degree_dictionary(arr: &ArrayGeometry) -> SteeringDictionary {
        build_dictionary(&grid_angles(-90.0, 90.0, 1.0), arr)
    }

    fn reg(lambda: f64) -> CsReg {
        CsReg { lambda, max_iter: 5000, tol: 1e-15 }
    }

    #[test]
    fn soft_threshold_zeroes_small_values_and_keeps_phase() {
        assert_eq!(soft_threshold(Complex64::new(0.3, -0.2), 1.0), Complex64::ZERO);
        assert_eq!(soft_threshold(Complex64::ZERO, 0.5), Complex64::ZERO);
        let z = Complex64::new(3.0, 4.0);
        let out = soft_threshold(z, 1.0);
        assert!((out - Complex64::new(2.4, 3.2)).norm() < 1e-15);
        assert!((out.arg() - z.arg()).abs() < 1e-15);
        // Exactly at the threshold collapses too.
        assert_eq!(soft_threshold(Complex64::new(1.0, 0.0), 1.0), Complex64::ZERO);
    }

    #[test]
    fn step_size_comes_from_the_true_spectral_norm() {
        let arr = array(8);
        let dict = degree_dictionary(&arr);
        let got = spectral_norm(&dict.phi);
        // Independent route: full eigendecomposition of Phi Phi^H.
        let n = 8;
        let mut b = Array2::<Complex64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                for k in 0..dict.len() {
                    b[[i, j]] += dict.phi[[i, k]] * dict.phi[[j, k]].conj();
                }
            }
        }
        for i in 0..n {
            b[[i, i]].im = 0.0;
            for j in 0..i {
                let sym = 0.5 * (b[[i, j]] + b[[j, i]].conj());
                b[[i, j]] = sym;
                b[[j, i]] = sym.conj();
            }
        }
        let (vals, _) = hermitian_eig(&b).unwrap();
        assert!(
            (got / (1.0 + 1e-6) - vals[0]).abs() <= 1e-9 * vals[0],
            "power iteration {got} vs eig {}",
            vals[0]
        );
        assert!(got >= vals[0], "the padded estimate must not undershoot");
    }

    fn best_single_column(dict: &SteeringDictionary, y: &Array1<Complex64>) -> usize {
        // Exhaustive one-sparse least squares: unit-modulus columns all
        // share ||phi||^2 = n_rx, so the best column maximizes |phi^H y|.
        let mut best = (0usize, -1.0f64);
        for g in 0..dict.len() {
            let mut dot = Complex64::ZERO;
            for i in 0..dict.n_rx() {
                dot += dict.phi[[i, g]].conj() * y[i];
            }
            if dot.norm() > best.1 {
                best = (g, dot.norm());
            }
        }
        best.0
    }

    #[test]
    fn single_on_grid_source_is_recovered_exactly() {
        let arr = array(8);
        let dict = degree_dictionary(&arr);
        let y = Array1::from_iter(steering_vector(10.0, &arr));
        let lambda = 1e-3 * default_lambda(&dict, &y) / 0.05; // 1e-3 * ||Phi^H y||_inf
        // At a weight this small the iteration crawls; with tol = 0 it
        // runs to its exact fixed point (about 3.75M iterations).
        let sol =
            cs_solve(&y, &dict, &CsReg { lambda, max_iter: 6_000_000, tol: 0.0 }).unwrap();
        assert!(sol.iterations < 6_000_000, "must stop on its own, not on the cap");

        let oracle = best_single_column(&dict, &y);
        assert_eq!(dict.angles_deg[oracle], 10.0);
        let peak_idx = sol
            .coefficients
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap()
            .0;
        assert_eq!(peak_idx, oracle, "solver and exhaustive search must agree");
        let peak = sol.coefficients[peak_idx].norm();
        for (g, c) in sol.coefficients.iter().enumerate() {
            if g != peak_idx {
                assert!(c.norm() < 0.01 * peak, "column {g} holds {:.3e}", c.norm());
            }
        }
    }

    fn best_pair(dict: &SteeringDictionary, y: &Array1<Complex64>) -> (usize, usize) {
        // Exhaustive two-sparse least squares over all column pairs.
        let n = dict.n_rx();
        let g = dict.len();
        let col = |k: usize| (0..n).map(|i| dict.phi[[i, k]]).collect::<Vec<_>>();
        let mut best = (0usize, 1usize, f64::INFINITY);
        for p in 0..g {
            let cp = col(p);
            let rp: Complex64 = cp.iter().zip(y.iter()).map(|(c, v)| c.conj() * v).sum();
            for q in p + 1..g {
                let cq = col(q);
                let gamma: Complex64 = cp.iter().zip(&cq).map(|(a, b)| a.conj() * b).sum();
                let det = (n * n) as f64 - gamma.norm_sqr();
                if det < 1e-9 * (n * n) as f64 {
                    continue;
                }
                let rq: Complex64 = cq.iter().zip(y.iter()).map(|(c, v)| c.conj() * v).sum();
                // Solve [[n, gamma], [conj(gamma), n]] c = (rp, rq).
                let c1 = (n as f64 * rp - gamma * rq) / det;
                let c2 = (n as f64 * rq - gamma.conj() * rp) / det;
                let mut residual = 0.0;
                for i in 0..n {
                    residual += (y[i] - c1 * cp[i] - c2 * cq[i]).norm_sqr();
                }
                if residual < best.2 {
                    best = (p, q, residual);
                }
            }
        }
        (best.0, best.1)
    }

    #[test]
    fn two_source_mixture_matches_the_exhaustive_pair_oracle() {
        let arr = array(8);
        let dict = degree_dictionary(&arr);
        let a1 = steering_vector(-15.0, &arr);
        let a2 = steering_vector(10.0, &arr);
        let y = Array1::from_shape_fn(8, |i| a1[i] + a2[i]);

        let (p, q) = best_pair(&dict, &y);
        assert_eq!(
            (dict.angles_deg[p], dict.angles_deg[q]),
            (-15.0, 10.0),
            "the exhaustive oracle must land on the truth"
        );

        let lambda = default_lambda(&dict, &y);
        let sol = cs_solve(&y, &dict, &reg(lambda)).unwrap();
        let peak = sol.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
        // Group the support into contiguous runs and compare centroids.
        let mut clusters: Vec<(f64, f64)> = Vec::new(); // (weighted angle sum, weight)
        let mut previous: Option<usize> = None;
        for (g, c) in sol.coefficients.iter().enumerate() {
            let w = c.norm();
            if w < 0.05 * peak {
                continue;
            }
            match previous {
                Some(last) if g == last + 1 => {
                    let tail = clusters.last_mut().unwrap();
                    tail.0 += dict.angles_deg[g] * w;
                    tail.1 += w;
                }
                _ => clusters.push((dict.angles_deg[g] * w, w)),
            }
            previous = Some(g);
        }
        assert_eq!(clusters.len(), 2, "support must form two clusters");
        let c0 = clusters[0].0 / clusters[0].1;
        let c1 = clusters[1].0 / clusters[1].1;
        assert!((c0 - -15.0).abs() <= 1.0, "first centroid {c0}");
        assert!((c1 - 10.0).abs() <= 1.0, "second centroid {c1}");
    }

    #[test]
    fn zero_measurement_stays_at_the_zero_fixed_point() {
        let arr = array(4);
        let dict = degree_dictionary(&arr);
        let y = Array1::<Complex64>::zeros(4);
        let sol = cs_solve(&y, &dict, &reg(0.1)).unwrap();
        assert!(sol.coefficients.iter().all(|c| *c == Complex64::ZERO));
        assert_eq!(sol.iterations, 1, "one no-op step settles it");
    }

    #[test]
    fn objective_never_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let arr = array(8);
        let dict = degree_dictionary(&arr);
        for _ in 0..5 {
            let y = Array1::from_shape_fn(8, |_| {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let lambda = default_lambda(&dict, &y);
            let sol = cs_solve(&y, &dict, &CsReg { lambda, max_iter: 300, tol: 0.0 }).unwrap();
            assert_eq!(sol.objective.len(), sol.iterations + 1);
            let slack = 1e-12 * sol.objective[0];
            for w in sol.objective.windows(2) {
                assert!(w[1] <= w[0] + slack, "objective rose: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn converged_solution_satisfies_the_subgradient_conditions() {
        let arr = array(8);
        let dict = degree_dictionary(&arr);
        let a1 = steering_vector(-15.0, &arr);
        let a2 = steering_vector(10.0, &arr);
        let y = Array1::from_shape_fn(8, |i| a1[i] + a2[i]);
        let lambda = default_lambda(&dict, &y);
        // Runs to the exact fixed point (about 170k iterations), where
        // the optimality conditions hold to rounding.
        let sol = cs_solve(&y, &dict, &CsReg { lambda, max_iter: 400_000, tol: 0.0 }).unwrap();
        assert!(sol.iterations < 400_000, "must stop on its own, not on the cap");

        // g = Phi^H (y - Phi s): |g| <= lambda everywhere, = lambda on
        // the support (where it also aligns with the coefficient phase).
        let n = dict.n_rx();
        let mut fitted = vec![Complex64::ZERO; n];
        for i in 0..n {
            for (gi, c) in sol.coefficients.iter().enumerate() {
                fitted[i] += dict.phi[[i, gi]] * c;
            }
        }
        for gi in 0..dict.len() {
            let mut grad = Complex64::ZERO;
            for i in 0..n {
                grad += dict.phi[[i, gi]].conj() * (y[i] - fitted[i]);
            }
            assert!(grad.norm() <= lambda + 1e-6, "column {gi}: |g| = {}", grad.norm());
            if sol.coefficients[gi].norm() > 1e-9 {
                assert!(
                    (grad.norm() - lambda).abs() <= 1e-6,
                    "support column {gi}: |g| = {} vs lambda = {lambda}",
                    grad.norm()
                );
            }
        }
    }

    #[test]
    fn solver_validates_inputs() {
        let arr = array(8);
        let dict = degree_dictionary(&arr);
        let y = Array1::<Complex64>::zeros(5);
        assert!(matches!(
            cs_solve(&y, &dict, &reg(0.1)),
            Err(DoaError::MeasurementMismatch { got: 5, expected: 8 })
        ));
        let y = Array1::<Complex64>::zeros(8);
        for lambda in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                cs_solve(&y, &dict, &reg(lambda)),
                Err(DoaError::BadLambda(_))
            ));
        }
    }

    // ── spectrum over snapshots ──────────────────────────────────────────

    fn snapshot_set(snapshots: Array2<Complex64>) -> SnapshotSet {
        SnapshotSet { snapshots, cpi_index: 0, range_bin: 0 }
    }

    #[test]
    fn single_steering_snapshot_peaks_at_its_angle() {
        let arr = array(8);
        let dict = degree_dictionary(&arr);
        let a = steering_vector(0.0, &arr);
        let snapshots = Array2::from_shape_fn((8, 1), |(i, _)| a[i]);
        let spec = cs_angle_spectrum(&snapshot_set(snapshots), &dict, &DoaConfig::default()).unwrap();
        assert_eq!(spec.peaks[0].angle_deg, 0.0);
    }

    #[test]
    fn aligned_mean_rescues_two_sources_from_random_common_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let arr = array(8);
        let dict = degree_dictionary(&arr);
        let a1 = steering_vector(-15.0, &arr);
        let a2 = steering_vector(10.0, &arr);
        let t = 256;
        let mut snapshots = Array2::<Complex64>::zeros((8, t));
        for ti in 0..t {
            let p1 = Complex64::from_polar(1.0, rng.random::<f64>() * 2.0 * PI);
            let p2 = Complex64::from_polar(1.0, rng.random::<f64>() * 2.0 * PI);
            for i in 0..8 {
                snapshots[[i, ti]] = p1 * a1[i] + p2 * a2[i];
            }
        }
        let snap = snapshot_set(snapshots);

        // A plain mean would average the random phases toward zero.
        let aligned = aligned_mean_snapshot(&snap);
        let aligned_energy: f64 = aligned.iter().map(|v| v.norm_sqr()).sum();
        assert!(aligned_energy > 0.5, "aligned mean kept signal energy");

        let spec = cs_angle_spectrum(&snap, &dict, &DoaConfig::default()).unwrap();
        let mut top: Vec<f64> = spec.top_peaks(2).iter().map(|p| p.angle_deg).collect();
        top.sort_by(f64::total_cmp);
        assert!((top[0] - -15.0).abs() <= 1.0, "peak at {}", top[0]);
        assert!((top[1] - 10.0).abs() <= 1.0, "peak at {}", top[1]);
    }

    #[test]
    fn noise_only_spectrum_stays_below_the_calibrated_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let arr = array(8);
        let dict = degree_dictionary(&arr);

        // Reference: a unit single-target measurement solved at the
        // default weight.
        let reference = {
            let a = steering_vector(10.0, &arr);
            let snapshots = Array2::from_shape_fn((8, 256), |(i, _)| a[i]);
            let spec =
                cs_angle_spectrum(&snapshot_set(snapshots), &dict, &DoaConfig::default()).unwrap();
            spec.power.iter().copied().fold(0.0, f64::max)
        };
        assert!(reference > 0.5);

        // Noise at the level a 20 dB scene leaves after averaging.
        for _ in 0..20 {
            let sigma = 0.1 / 2f64.sqrt();
            let snapshots = Array2::from_shape_fn((8, 256), |_| {
                let re: f64 = rng.sample(rand_distr::StandardNormal);
                let im: f64 = rng.sample(rand_distr::StandardNormal);
                Complex64::new(sigma * re, sigma * im)
            });
            let spec =
                cs_angle_spectrum(&snapshot_set(snapshots), &dict, &DoaConfig::default()).unwrap();
            let peak = spec.power.iter().copied().fold(0.0, f64::max);
            assert!(peak < 0.01 * reference, "noise peak {peak:e} vs reference {reference:e}");
        }
    }

    #[test]
    fn zero_snapshots_short_circuit_to_a_zero_spectrum() {
        let arr = array(8);
        let dict = degree_dictionary(&arr);
        let snap = snapshot_set(Array2::<Complex64>::zeros((8, 16)));
        let spec = cs_angle_spectrum(&snap, &dict, &DoaConfig::default()).unwrap();
        assert!(spec.power.iter().all(|&p| p == 0.0));
        assert!(spec.peaks.is_empty());
    }

    #[test]
    fn spectrum_validates_channel_counts() {
        let arr = array(8);
        let dict = degree_dictionary(&arr);
        let snap = snapshot_set(Array2::<Complex64>::zeros((4, 16)));
        assert!(matches!(
            cs_angle_spectrum(&snap, &dict, &DoaConfig::default()),
            Err(DoaError::ChannelMismatch { .. })
        ));
    }
}
