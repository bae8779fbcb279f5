//! Numerical upper bounds on the distance from a small matrix to the complex
//! symmetric operators.
//!
//! A conjugation C factors as C = S ∘ conj with S symmetric unitary, and
//! T = CT*C is equivalent to the commutation relation T·S = S·Tᵀ.  The
//! distance to complex symmetry is therefore bounded above by minimizing
//! [`defect`] = ‖TS − STᵀ‖ over symmetric unitaries.  Symmetric unitaries are
//! reached without constraints through the factorization S = W·Wᵀ with
//! W = exp(iH), H Hermitian — so the search space is plain Hermitian
//! matrices (n² real parameters).
//!
//! [`fit`] runs a deterministic multi-start Adam descent on the smooth
//! Frobenius version of the objective and re-evaluates the winner in operator
//! norm.  The first start is not random: H₀ = (π/4)(I − J) maps *exactly* to
//! S = J (the anti-diagonal reversal matrix), the canonical witness for
//! palindromic shift blocks, so those converge at iteration zero.
//!
//! The result is an upper bound only — a local method cannot certify the
//! infimum.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{self, expm_i_hermitian, frobenius_norm, operator_norm, transpose, CMat};
use crate::shift::CONJUGATION_MATRIX_TOL;
use crate::{CoreError, Result};

/// Largest matrix dimension the fitter accepts (desk scale).
pub const MAX_FIT_DIM: usize = 64;

/// Options for [`fit`].  `Default` gives a deterministic mid-effort search.
#[derive(Debug, Clone)]
pub struct FitOptions {
    /// Number of starts: the warm start plus `restarts − 1` random ones.
    pub restarts: u32,
    /// Adam iteration cap per start.
    pub max_iters: u32,
    /// Objective value treated as "reached zero" (Frobenius scale).
    pub tol: f64,
    /// RNG seed for the random starts.
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            restarts: 8,
            max_iters: 250,
            tol: 1e-12,
            seed: 0,
        }
    }
}

/// Outcome of a [`fit`] run.
#[derive(Debug, Clone)]
pub struct FitResult {
    /// The best symmetric unitary found.
    pub best_s: CMat,
    /// ‖T·best_s − best_s·Tᵀ‖ in *operator* norm, re-evaluated from `best_s`
    /// (never the optimizer's internal value).
    pub residual: f64,
    /// The optimizer's own objective at `best_s` (Frobenius norm).
    pub objective_frobenius: f64,
    /// Number of starts actually run.
    pub restarts_used: u32,
    /// Whether the winning start terminated by its convergence criterion
    /// rather than by exhausting `max_iters`.
    pub converged: bool,
    /// Index of the winning start (0 = warm start); ties break to the lowest.
    pub best_restart: u32,
}

// ---------------------------------------------------------------------------
// Defect
// ---------------------------------------------------------------------------

/// Validate that S is a plausible conjugation matrix: square, matching T,
/// symmetric and unitary within [`CONJUGATION_MATRIX_TOL`].
fn validate_s(t: &CMat, s: &CMat) -> Result<()> {
    let n = t.nrows();
    if t.ncols() != n {
        return Err(CoreError::domain(format!(
            "T must be square, got {}×{}",
            t.nrows(),
            t.ncols()
        )));
    }
    if s.dim() != (n, n) {
        return Err(CoreError::domain(format!(
            "S has shape {:?}, expected {n}×{n}",
            s.dim()
        )));
    }
    let sym = linalg::symmetry_defect(s);
    if sym > CONJUGATION_MATRIX_TOL {
        return Err(CoreError::domain(format!(
            "S is not symmetric: ‖S − Sᵀ‖_F = {sym:.3e}"
        )));
    }
    let uni = linalg::unitarity_defect(s);
    if uni > CONJUGATION_MATRIX_TOL {
        return Err(CoreError::domain(format!(
            "S is not unitary: ‖S^H S − I‖_F = {uni:.3e}"
        )));
    }
    Ok(())
}

/// The complex-symmetry defect of T under C = S ∘ conj, in operator norm:
/// ‖TS − STᵀ‖.  Zero exactly when T = CT*C.
pub fn defect(t: &CMat, s: &CMat) -> Result<f64> {
    validate_s(t, s)?;
    operator_norm(&commutator(t, s))
}

/// TS − STᵀ.
fn commutator(t: &CMat, s: &CMat) -> CMat {
    t.dot(s) - s.dot(&transpose(t))
}

/// Smooth optimization objective: ‖TS − STᵀ‖_F (no validation).
fn frobenius_defect(t: &CMat, s: &CMat) -> f64 {
    frobenius_norm(&commutator(t, s))
}

// ---------------------------------------------------------------------------
// Hermitian parametrization
// ---------------------------------------------------------------------------

/// Number of real parameters of an n×n Hermitian matrix.
fn param_count(n: usize) -> usize {
    n * n
}

/// Decode a parameter vector into a Hermitian matrix: the first n entries are
/// the (real) diagonal; each off-diagonal pair (i < j) takes two entries
/// (re, im) with H[j][i] the conjugate.
fn decode_hermitian(params: &[f64], n: usize) -> CMat {
    debug_assert_eq!(params.len(), param_count(n));
    let mut h = Array2::zeros((n, n));
    for i in 0..n {
        h[(i, i)] = Complex64::new(params[i], 0.0);
    }
    let mut at = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = Complex64::new(params[at], params[at + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            at += 2;
        }
    }
    h
}

/// Encode a Hermitian matrix into the parameter layout of
/// [`decode_hermitian`].
fn encode_hermitian(h: &CMat) -> Vec<f64> {
    let n = h.nrows();
    let mut params = Vec::with_capacity(param_count(n));
    for i in 0..n {
        params.push(h[(i, i)].re);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            params.push(h[(i, j)].re);
            params.push(h[(i, j)].im);
        }
    }
    params
}

/// S(H) = W·Wᵀ with W = exp(iH): symmetric by construction, unitary because
/// W and Wᵀ are.
pub fn symmetric_unitary_from_hermitian(h: &CMat) -> Result<CMat> {
    let w = expm_i_hermitian(h)?;
    Ok(w.dot(&transpose(&w)))
}

/// The warm start: H₀ = (π/4)(I − J) maps to S(H₀) = J exactly.
///
/// I − J has eigenvalues 0 and 2, so W = exp(iH₀) = P₊ + i·P₋ on the ±1
/// eigenspaces of J; both projections are real symmetric, hence
/// W·Wᵀ = W² = P₊ − P₋ = J.
fn warm_start(n: usize) -> CMat {
    let mut h = Array2::zeros((n, n));
    let quarter_pi = std::f64::consts::FRAC_PI_4;
    for i in 0..n {
        h[(i, i)] += Complex64::new(quarter_pi, 0.0);
        h[(i, n - 1 - i)] -= Complex64::new(quarter_pi, 0.0);
    }
    h
}

/// The anti-diagonal identity J (the reversal conjugation's matrix).
pub fn reversal_matrix(n: usize) -> CMat {
    let mut j = Array2::zeros((n, n));
    for i in 0..n {
        j[(i, n - 1 - i)] = Complex64::new(1.0, 0.0);
    }
    j
}

// ---------------------------------------------------------------------------
// Optimizer
// ---------------------------------------------------------------------------

/// Adam hyperparameters; fixed, standard values.
const ADAM_ALPHA: f64 = 0.05;
const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;
/// Central-difference step for the finite-difference gradient.
const FD_STEP: f64 = 1e-6;
/// Stop a start after this many consecutive iterations without material
/// improvement.
const STALL_WINDOW: u32 = 20;
/// Relative improvement below which an iteration counts as stalled.
const STALL_REL: f64 = 1e-9;

struct StartOutcome {
    params: Vec<f64>,
    objective: f64,
    converged: bool,
}

/// One Adam descent from `params0`.
fn descend(t: &CMat, n: usize, params0: Vec<f64>, opts: &FitOptions) -> Result<StartOutcome> {
    let eval = |params: &[f64]| -> Result<f64> {
        let s = symmetric_unitary_from_hermitian(&decode_hermitian(params, n))?;
        Ok(frobenius_defect(t, &s))
    };

    let dim = params0.len();
    let mut params = params0;
    let mut best_params = params.clone();
    let mut best = eval(&params)?;
    if best <= opts.tol {
        return Ok(StartOutcome {
            params: best_params,
            objective: best,
            converged: true,
        });
    }

    let mut m = vec![0.0; dim];
    let mut v = vec![0.0; dim];
    let mut stall = 0u32;
    let mut converged = false;

    for iter in 1..=opts.max_iters {
        // Central-difference gradient.
        let mut grad = vec![0.0; dim];
        for k in 0..dim {
            let saved = params[k];
            params[k] = saved + FD_STEP;
            let up = eval(&params)?;
            params[k] = saved - FD_STEP;
            let down = eval(&params)?;
            params[k] = saved;
            grad[k] = (up - down) / (2.0 * FD_STEP);
        }

        let t_pow = iter as i32;
        for k in 0..dim {
            m[k] = ADAM_BETA1 * m[k] + (1.0 - ADAM_BETA1) * grad[k];
            v[k] = ADAM_BETA2 * v[k] + (1.0 - ADAM_BETA2) * grad[k] * grad[k];
            let m_hat = m[k] / (1.0 - ADAM_BETA1.powi(t_pow));
            let v_hat = v[k] / (1.0 - ADAM_BETA2.powi(t_pow));
            params[k] -= ADAM_ALPHA * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }

        let value = eval(&params)?;
        if value < best - STALL_REL * best.max(1.0) {
            stall = 0;
        } else {
            stall += 1;
        }
        if value < best {
            best = value;
            best_params.copy_from_slice(&params);
        }
        if best <= opts.tol || stall >= STALL_WINDOW {
            converged = true;
            break;
        }
    }

    // Polish: shrinking coordinate steps from the best point; cheap and
    // greedy, just to tighten the last digits of a stalled Adam run.
    let mut step = 1e-3;
    for _round in 0..200 {
        if best <= opts.tol || step < 1e-9 {
            break;
        }
        let mut improved = false;
        for k in 0..dim {
            for dir in [step, -step] {
                let saved = best_params[k];
                best_params[k] = saved + dir;
                let value = eval(&best_params)?;
                if value < best {
                    best = value;
                    improved = true;
                } else {
                    best_params[k] = saved;
                }
            }
        }
        if !improved {
            step *= 0.25;
        }
    }

    Ok(StartOutcome {
        params: best_params,
        objective: best,
        converged,
    })
}

/// Multi-start search for the best conjugation witness.
///
/// Deterministic for a fixed seed: the warm start runs first, then
/// `restarts − 1` seeded random starts; ties break to the lowest start index.
/// A start that exhausts `max_iters` while still improving marks the result
/// non-converged (if it wins).
pub fn fit(t: &CMat, opts: &FitOptions) -> Result<FitResult> {
    let n = t.nrows();
    if t.ncols() != n {
        return Err(CoreError::domain(format!(
            "fit requires a square matrix, got {}×{}",
            t.nrows(),
            t.ncols()
        )));
    }
    if n == 0 {
        return Err(CoreError::domain("fit requires dimension ≥ 1"));
    }
    if n > MAX_FIT_DIM {
        return Err(CoreError::domain(format!(
            "fit is desk-scale only: dimension {n} exceeds {MAX_FIT_DIM}"
        )));
    }
    if opts.restarts == 0 {
        return Err(CoreError::domain("at least one start is required"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(u32, StartOutcome)> = None;
    for start in 0..opts.restarts {
        let params0 = if start == 0 {
            encode_hermitian(&warm_start(n))
        } else {
            (0..param_count(n))
                .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect()
        };
        let outcome = descend(t, n, params0, opts)?;
        let better = match &best {
            None => true,
            Some((_, incumbent)) => outcome.objective < incumbent.objective,
        };
        if better {
            best = Some((start, outcome));
        }
    }

    let (best_restart, outcome) = best.expect("at least one start ran");
    let best_s = symmetric_unitary_from_hermitian(&decode_hermitian(&outcome.params, n))?;
    let residual = defect(t, &best_s)?;
    Ok(FitResult {
        residual,
        objective_frobenius: outcome.objective,
        restarts_used: opts.restarts,
        converged: outcome.converged,
        best_restart,
        best_s,
    })
}

// ---------------------------------------------------------------------------
