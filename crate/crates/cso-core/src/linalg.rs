//! Dense complex linear algebra: Hermitian eigendecomposition by cyclic
//! Jacobi rotations, operator norms, and the unitary exponential exp(iH).
//!
//! Everything here is self-contained (no BLAS/LAPACK binding) and sized for
//! desk-scale matrices (≤ 512×512).  The Jacobi method is chosen over power
//! iteration because the operator-norm computations downstream routinely meet
//! near-degenerate leading singular values (palindromic blocks have them by
//! construction), where power iteration stalls; Jacobi converges
//! unconditionally on Hermitian input and delivers the full spectrum.
//!
//! Conventions: matrices are `ndarray::Array2<Complex64>`; eigenvector
//! matrices hold eigenvectors in columns, so `A ≈ V · diag(λ) · V^H`.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::{CoreError, Result};

/// Dense complex matrix used throughout the numeric layer.
pub type CMat = Array2<Complex64>;

/// Relative off-diagonal mass at which a Jacobi sweep stops.
const JACOBI_TOL: f64 = 1e-15;
/// Hard sweep cap; cyclic Jacobi on Hermitian input converges far earlier.
const MAX_SWEEPS: usize = 64;
/// Allowed relative deviation from exact Hermitian symmetry on input.
const HERMITIAN_INPUT_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

/// Conjugate transpose.
pub fn adjoint(m: &CMat) -> CMat {
    m.t().mapv(|z| z.conj())
}

/// Plain (un-conjugated) transpose, owned.
pub fn transpose(m: &CMat) -> CMat {
    m.t().to_owned()
}

/// Entrywise conjugate.
pub fn conjugate(m: &CMat) -> CMat {
    m.mapv(|z| z.conj())
}

pub fn identity(n: usize) -> CMat {
    Array2::from_diag(&Array1::from_elem(n, Complex64::new(1.0, 0.0)))
}

/// Frobenius norm.
pub fn frobenius_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest absolute entry.
pub fn max_abs_entry(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// ‖A − B‖ in Frobenius norm.
pub fn frobenius_distance(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Deviation from unitarity: ‖M^H M − I‖_F.
pub fn unitarity_defect(m: &CMat) -> f64 {
    let n = m.ncols();
    frobenius_distance(&adjoint(m).dot(m), &identity(n))
}

/// Deviation from (complex) symmetry: ‖M − Mᵀ‖_F.
pub fn symmetry_defect(m: &CMat) -> f64 {
    frobenius_distance(m, &transpose(m))
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition
// ---------------------------------------------------------------------------

/// Eigendecomposition of a Hermitian matrix: `values` ascending,
/// eigenvectors in the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

/// Cyclic Jacobi eigendecomposition for complex Hermitian matrices.
///
/// Each pivot (p, q) first absorbs the phase of a_pq into column p, reducing
/// the 2×2 subproblem to the real symmetric case, then applies the classical
/// rotation that annihilates the off-diagonal pair.  Sweeps repeat until the
/// off-diagonal mass falls below `JACOBI_TOL` relative to the Frobenius norm.
pub fn hermitian_eigen(m: &CMat) -> Result<HermitianEigen> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(CoreError::domain(format!(
            "eigendecomposition requires a square matrix, got {rows}×{cols}"
        )));
    }
    let n = rows;
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: identity(0),
        });
    }
    let scale = frobenius_norm(m).max(1.0);
    let herm_dev = frobenius_distance(m, &adjoint(m));
    if herm_dev > HERMITIAN_INPUT_TOL * scale {
        return Err(CoreError::domain(format!(
            "matrix is not Hermitian: ‖M − M^H‖_F = {herm_dev:.3e} (scale {scale:.3e})"
        )));
    }

    // Symmetrize to remove rounding-level asymmetry, then iterate.
    let mut a = (m + &adjoint(m)).mapv(|z| z * 0.5);
    let mut v = identity(n);

    for _sweep in 0..MAX_SWEEPS {
        let off: f64 = {
            let mut acc = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    acc += a[(p, q)].norm_sqr();
                }
            }
            (2.0 * acc).sqrt()
        };
        if off <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let beta = a[(p, q)];
                let abs_beta = beta.norm();
                if abs_beta <= f64::EPSILON * scale * 1e-2 {
                    continue;
                }
                // Phase absorption: e^{iφ} = β/|β| makes the pivot real.
                let phase = beta / abs_beta;
                let alpha = a[(p, p)].re;
                let gamma = a[(q, q)].re;
                // Classical real Jacobi rotation on [[α, |β|], [|β|, γ]].
                let tau = (gamma - alpha) / (2.0 * abs_beta);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // G = [[e^{iφ}c, e^{iφ}s], [−s, c]] acting on columns (p, q);
                // apply A ← G^H A G and V ← V G with O(n) work per pivot.
                let (g_pp, g_pq) = (phase * c, phase * s);
                let (g_qp, g_qq) = (Complex64::new(-s, 0.0), Complex64::new(c, 0.0));

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
                // Pivot entries are now real up to rounding; pin them.
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
            }
        }
    }

    // Sort ascending by eigenvalue, permuting the vector columns alongside.
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = identity(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, new_col)] = v[(r, old_col)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

// ---------------------------------------------------------------------------
// Operator norm and matrix exponential
// ---------------------------------------------------------------------------

/// Operator (spectral) norm: the largest singular value, computed as
/// sqrt(λ_max(M^H M)).
pub fn operator_norm(m: &CMat) -> Result<f64> {
    if m.is_empty() {
        return Ok(0.0);
    }
    let gram = adjoint(m).dot(m);
    let eig = hermitian_eigen(&gram)?;
    let top = eig.values.last().copied().unwrap_or(0.0);
    Ok(top.max(0.0).sqrt())
}

/// Unitary exponential W = exp(iH) of a Hermitian parameter, via the
/// eigendecomposition H = V diag(λ) V^H so W = V diag(e^{iλ}) V^H.
pub fn expm_i_hermitian(h: &CMat) -> Result<CMat> {
    let eig = hermitian_eigen(h)?;
    let n = eig.values.len();
    let mut w = Array2::zeros((n, n));
    // V · diag(e^{iλ}) · V^H assembled column-by-column.
    for (k, &lambda) in eig.values.iter().enumerate() {
        let phase = Complex64::new(0.0, lambda).exp();
        for r in 0..n {
            for c in 0..n {
                w[(r, c)] += eig.vectors[(r, k)] * phase * eig.vectors[(c, k)].conj();
            }
        }
    }
    Ok(w)
}

// ---------------------------------------------------------------------------
