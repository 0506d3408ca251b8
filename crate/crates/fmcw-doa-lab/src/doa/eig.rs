//! Eigendecomposition of Hermitian matrices by cyclic Jacobi rotations.
//!
//! Covariance matrices here are tiny (channel count squared), so the
//! n-cubed-per-sweep cost of Jacobi is irrelevant and its properties are
//! exactly what the subspace estimator needs: guaranteed convergence on
//! Hermitian input, eigenvalues real by construction, and an eigenvector
//! matrix that is a product of plane unitaries and therefore unitary to
//! machine precision.

use ndarray::Array2;
use num_complex::Complex64;

use super::DoaError;

// Stop when the off-diagonal mass falls below this fraction of the
// Frobenius norm; 8x8 inputs reach it in a handful of sweeps.
const OFF_DIAGONAL_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 60;
// How far from exact Hermitian symmetry an input may be.
const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues (descending, real) and eigenvectors (matching columns,
/// unitary) of a Hermitian matrix.
///
/// One cyclic sweep visits every upper-triangle entry and annihilates it
/// with a unitary plane rotation; repeated sweeps drive the off-diagonal
/// mass to zero quadratically. For `A[p][q] = r e^{i phi}` the rotation
///
/// ```text
/// J[p][p] = c    J[p][q] = s e^{i phi}
/// J[q][p] = -s e^{-i phi}    J[q][q] = c
/// ```
///
/// with `tan` chosen from the smaller root of `t^2 + 2 theta t - 1 = 0`,
/// `theta = (A[q][q] - A[p][p]) / (2r)`, zeroes the pair while moving
/// `-tr` and `+tr` onto the two diagonal entries.
pub fn hermitian_eig(r: &Array2<Complex64>) -> Result<(Vec<f64>, Array2<Complex64>), DoaError> {
    let (rows, cols) = r.dim();
    if rows != cols || rows == 0 {
        return Err(DoaError::NotSquare { rows, cols });
    }
    let n = rows;

    let scale = r.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    let deviation = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (r[[i, j]] - r[[j, i]].conj()).norm())
        .fold(0.0f64, f64::max);
    let tolerance = HERMITIAN_TOL * scale;
    if deviation > tolerance {
        return Err(DoaError::NotHermitian { deviation, tolerance });
    }

    // Scrub the permitted asymmetry so the sweeps see an exactly
    // Hermitian matrix.
    let mut a = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let sym = 0.5 * (r[[i, j]] + r[[j, i]].conj());
            a[[i, j]] = if i == j { Complex64::new(sym.re, 0.0) } else { sym };
        }
    }
    let mut v = Array2::<Complex64>::eye(n);

    let fro = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if fro > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off = (0..n)
                .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
                .map(|(p, q)| 2.0 * a[[p, q]].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= OFF_DIAGONAL_TOL * fro {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[j, j]].re.total_cmp(&a[[i, i]].re));
    let values: Vec<f64> = order.iter().map(|&i| a[[i, i]].re).collect();
    let mut vectors = Array2::<Complex64>::zeros((n, n));
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[[row, new_col]] = v[[row, old_col]];
        }
    }
    Ok((values, vectors))
}

/// Annihilates `a[[p, q]]` with a plane rotation, updating `a` (two-sided)
/// and accumulating the rotation into `v` (right-multiplied).
fn rotate(a: &mut Array2<Complex64>, v: &mut Array2<Complex64>, p: usize, q: usize) {
    let apq = a[[p, q]];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r; // e^{i phi}
    let app = a[[p, p]].re;
    let aqq = a[[q, q]].re;
    let theta = (aqq - app) / (2.0 * r);
    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
    let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let s_pos = s * phase; // s e^{i phi}
    let s_neg = s * phase.conj(); // s e^{-i phi}

    let n = a.nrows();
    for i in 0..n {
        if i == p || i == q {
            continue;
        }
        let aip = a[[i, p]];
        let aiq = a[[i, q]];
        let new_ip = c * aip - s_neg * aiq;
        let new_iq = s_pos * aip + c * aiq;
        a[[i, p]] = new_ip;
        a[[p, i]] = new_ip.conj();
        a[[i, q]] = new_iq;
        a[[q, i]] = new_iq.conj();
    }
    a[[p, p]] = Complex64::new(app - t * r, 0.0);
    a[[q, q]] = Complex64::new(aqq + t * r, 0.0);
    a[[p, q]] = Complex64::ZERO;
    a[[q, p]] = Complex64::ZERO;

    for i in 0..n {
        let vip = v[[i, p]];
        let viq = v[[i, q]];
        v[[i, p]] = c * vip - s_neg * viq;
        v[[i, q]] = s_pos * vip + c * viq;
    }
}
