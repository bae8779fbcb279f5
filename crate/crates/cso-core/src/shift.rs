//! Finite truncations of weighted shifts: block decomposition, palindromy
//! tests, explicit conjugations, norms and distances.
//!
//! A finite weight list (α_1, …, α_W) stands for the (W+1)×(W+1) matrix with
//! `T e_n = α_n e_{n+1}`.  Zero weights disconnect the basis, so the matrix
//! splits as a direct sum of irreducible blocks ⊕ T_i; each maximal positive
//! run of length L becomes an (L+1)×(L+1) [`FiniteShiftBlock`].  Such a
//! truncation is complex symmetric precisely when every block's weight list
//! is a palindrome, the witnessing conjugation being the block-wise
//! "reverse the coordinates and conjugate" map
//! C_i(z_1, …, z_{n_i}) = (conj z_{n_i}, …, conj z_1).
//!
//! Structural tests run on exact rational weight lists in O(n); dense
//! matrices are only materialized when a singular value is genuinely needed.

use ndarray::Array2;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::linalg::{self, CMat};
use crate::weights::WeightSequence;
use crate::{CoreError, Rational, Result};

/// Tolerance for accepting a matrix as a symmetric-unitary conjugation.
pub const CONJUGATION_MATRIX_TOL: f64 = 1e-8;

// ---------------------------------------------------------------------------
// Blocks and decompositions
// ---------------------------------------------------------------------------

/// One irreducible truncated-shift block: strictly positive weights
/// (α_1, …, α_{n−1}) of an n×n block.  An empty list is the 1×1 zero block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteShiftBlock {
    weights: Vec<Rational>,
}

impl FiniteShiftBlock {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if let Some(i) = weights.iter().position(|w| !w.is_positive()) {
            return Err(CoreError::domain(format!(
                "block weight {} (index {}) must be strictly positive",
                weights[i],
                i + 1
            )));
        }
        Ok(FiniteShiftBlock { weights })
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// Matrix dimension n of the block (weights + 1).
    pub fn dim(&self) -> usize {
        self.weights.len() + 1
    }
}

/// Direct-sum structure of a finite weight list: the irreducible blocks plus
/// the 1-based positions of the zero weights that separate them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub blocks: Vec<FiniteShiftBlock>,
    pub zero_positions: Vec<u64>,
}

impl BlockDecomposition {
    /// Length of the weight list this decomposition came from.
    pub fn input_len(&self) -> u64 {
        let block_weights: u64 = self.blocks.iter().map(|b| b.weights.len() as u64).sum();
        block_weights + self.zero_positions.len() as u64
    }

    /// Whether the input list ended with a zero weight (in which case the
    /// final basis vector forms an implicit trailing 1×1 block).
    pub fn ends_in_zero(&self) -> bool {
        self.zero_positions.last().copied() == Some(self.input_len())
    }

    /// Reconstruct the original weight list exactly.
    pub fn reassemble(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.input_len() as usize);
        let mut blocks = self.blocks.iter();
        for _ in &self.zero_positions {
            if let Some(b) = blocks.next() {
                out.extend(b.weights.iter().cloned());
            }
            out.push(Rational::zero());
        }
        for b in blocks {
            out.extend(b.weights.iter().cloned());
        }
        out
    }

    /// JSON-shaped view: blocks as arrays of rational strings.
    pub fn report(&self) -> DecompositionReport {
        DecompositionReport {
            blocks: self
                .blocks
                .iter()
                .map(|b| {
                    b.weights
                        .iter()
                        .map(crate::scalar::format_rational)
                        .collect()
                })
                .collect(),
            zero_positions: self.zero_positions.clone(),
            palindromic: is_cso_truncation(self),
        }
    }
}

/// Serializable decomposition summary.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub blocks: Vec<Vec<String>>,
    pub zero_positions: Vec<u64>,
    pub palindromic: bool,
}

/// Split a finite weight list at its zeros.
///
/// Every zero terminates the current (possibly empty) run — so consecutive
/// zeros yield 1×1 zero blocks — and a trailing nonempty run forms a final
/// block.  1×1 blocks are retained to keep reconstruction exact.
pub fn decompose(weights: &[Rational]) -> Result<BlockDecomposition> {
    let mut blocks = Vec::new();
    let mut zero_positions = Vec::new();
    let mut run: Vec<Rational> = Vec::new();
    for (idx, w) in weights.iter().enumerate() {
        if w.is_negative() {
            return Err(CoreError::domain(format!(
                "weight {} at position {} is negative",
                w,
                idx + 1
            )));
        }
        if w.is_zero() {
            blocks.push(FiniteShiftBlock::new(std::mem::take(&mut run))?);
            zero_positions.push(idx as u64 + 1);
        } else {
            run.push(w.clone());
        }
    }
    if !run.is_empty() {
        blocks.push(FiniteShiftBlock::new(run)?);
    }
    Ok(BlockDecomposition {
        blocks,
        zero_positions,
    })
}

/// Exact palindrome test on a block's weight list.
pub fn is_palindromic(block: &FiniteShiftBlock) -> bool {
    let w = &block.weights;
    let n = w.len();
    (0..n / 2).all(|i| w[i] == w[n - 1 - i])
}

/// A truncation is complex symmetric iff every direct summand is palindromic.
pub fn is_cso_truncation(d: &BlockDecomposition) -> bool {
    d.blocks.iter().all(is_palindromic)
}

// ---------------------------------------------------------------------------
// Conjugations
// ---------------------------------------------------------------------------

/// A conjugation (antilinear involution) usable as a complex-symmetry witness.
#[derive(Debug, Clone)]
pub enum ConjugationSpec {
    /// Block-wise coordinate reversal composed with entrywise conjugation:
    /// the canonical witness for palindromic truncations.
    BlockReversal { sizes: Vec<usize> },
    /// C = S ∘ conj for an explicit symmetric unitary S (the fitter's
    /// parametrization).
    SymmetricUnitary { s: CMat },
}

impl ConjugationSpec {
    /// Validated constructor for the matrix kind: S must be square,
    /// symmetric, and unitary within `CONJUGATION_MATRIX_TOL`.
    pub fn symmetric_unitary(s: CMat) -> Result<Self> {
        let (r, c) = s.dim();
        if r != c {
            return Err(CoreError::domain(format!(
                "conjugation matrix must be square, got {r}×{c}"
            )));
        }
        let sym = linalg::symmetry_defect(&s);
        if sym > CONJUGATION_MATRIX_TOL {
            return Err(CoreError::domain(format!(
                "conjugation matrix is not symmetric: ‖S − Sᵀ‖_F = {sym:.3e}"
            )));
        }
        let uni = linalg::unitarity_defect(&s);
        if uni > CONJUGATION_MATRIX_TOL {
            return Err(CoreError::domain(format!(
                "conjugation matrix is not unitary: ‖S^H S − I‖_F = {uni:.3e}"
            )));
        }
        Ok(ConjugationSpec::SymmetricUnitary { s })
    }

    /// The dimension of the space the conjugation acts on.
    pub fn dim(&self) -> usize {
        match self {
            ConjugationSpec::BlockReversal { sizes } => sizes.iter().sum(),
            ConjugationSpec::SymmetricUnitary { s } => s.nrows(),
        }
    }

    /// Apply the antilinear map to a coordinate vector.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim() {
            return Err(CoreError::domain(format!(
                "conjugation acts on dimension {}, got vector of length {}",
                self.dim(),
                v.len()
            )));
        }
        match self {
            ConjugationSpec::BlockReversal { sizes } => {
                let mut out = Vec::with_capacity(v.len());
                let mut start = 0;
                for &n in sizes {
                    out.extend(v[start..start + n].iter().rev().map(|z| z.conj()));
                    start += n;
                }
                Ok(out)
            }
            ConjugationSpec::SymmetricUnitary { s } => {
                let conj_v = ndarray::Array1::from_iter(v.iter().map(|z| z.conj()));
                Ok(s.dot(&conj_v).to_vec())
            }
        }
    }

    /// The dense matrix S of the conjugation C = S ∘ conj.
    ///
    /// For a block reversal this is the (real, symmetric, involutive)
    /// permutation matrix; for the matrix kind it is the stored S.
    pub fn matrix(&self) -> CMat {
        match self {
            ConjugationSpec::BlockReversal { sizes } => {
                let rho = Self::reversal_permutation(sizes);
                let n = rho.len();
                let mut m = CMat::zeros((n, n));
                for (i, &j) in rho.iter().enumerate() {
                    m[(i, j)] = Complex64::new(1.0, 0.0);
                }
                m
            }
            ConjugationSpec::SymmetricUnitary { s } => s.clone(),
        }
    }

    /// The 0-based coordinate permutation of a block reversal.
    fn reversal_permutation(sizes: &[usize]) -> Vec<usize> {
        let mut rho = Vec::with_capacity(sizes.iter().sum());
        let mut start = 0;
        for &n in sizes {
            rho.extend((start..start + n).rev());
            start += n;
        }
        rho
    }
}

/// The canonical conjugation C = ⊕ C_i adapted to a decomposition.
///
/// Block sizes follow the decomposition; when the input list ended in a zero
/// (or was empty — a 1×1 zero matrix) the final basis vector is outside every
/// explicit block, so a trailing 1×1 reversal is appended — the sizes always
/// sum to (input length + 1).
pub fn reversal_conjugation(d: &BlockDecomposition) -> ConjugationSpec {
    let mut sizes: Vec<usize> = d.blocks.iter().map(FiniteShiftBlock::dim).collect();
    if d.ends_in_zero() || d.input_len() == 0 {
        sizes.push(1);
    }
    debug_assert_eq!(sizes.iter().sum::<usize>() as u64, d.input_len() + 1);
    ConjugationSpec::BlockReversal { sizes }
}

// ---------------------------------------------------------------------------
// Defect, norm, distance
// ---------------------------------------------------------------------------

/// The complex-symmetry defect ‖T − C T* C‖, exact when possible.
#[derive(Debug, Clone, PartialEq)]
pub enum DefectValue {
    /// The difference matrix was exactly representable and its norm exact.
    Exact(Rational),
    /// Largest singular value of the difference matrix, computed in floats.
    Numeric(f64),
}

impl DefectValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            DefectValue::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            DefectValue::Numeric(x) => *x,
        }
    }

    /// True only for an exact rational zero.
    pub fn is_exact_zero(&self) -> bool {
        matches!(self, DefectValue::Exact(r) if r.is_zero())
    }
}

/// ‖T − C T* C‖ for the shift with the given weight list.
///
/// For a block reversal the difference is computed in exact rational
/// arithmetic: with R the reversal permutation, C T* C = R Tᵀ R, and the
/// difference of two subdiagonal matrices is subdiagonal whenever the
/// reversal is aligned with the zero structure — its operator norm is then
/// exactly the largest absolute entry.  A misaligned reversal can scatter
/// entries off the subdiagonal, in which case (like the symmetric-unitary
/// kind) the largest singular value is computed numerically.
pub fn cso_defect(weights: &[Rational], c: &ConjugationSpec) -> Result<DefectValue> {
    let dim = weights.len() + 1;
    if c.dim() != dim {
        return Err(CoreError::domain(format!(
            "conjugation dimension {} does not match shift dimension {dim}",
            c.dim()
        )));
    }
    match c {
        ConjugationSpec::BlockReversal { sizes } => {
            let rho = ConjugationSpec::reversal_permutation(sizes);
            // D = T − R Tᵀ R exactly: T[r][c] = w[c] iff r = c+1, and
            // (R Tᵀ R)[r][c] = T[ρ(c)][ρ(r)] = w[ρ(r)] iff ρ(c) = ρ(r)+1.
            let entry = |r: usize, col: usize| -> Rational {
                let t = if r == col + 1 {
                    weights[col].clone()
                } else {
                    Rational::zero()
                };
                let rtr = if rho[col] == rho[r] + 1 {
                    weights[rho[r]].clone()
                } else {
                    Rational::zero()
                };
                t - rtr
            };
            let mut subdiagonal_max = Rational::zero();
            let mut off_subdiagonal = Vec::new();
            for r in 0..dim {
                for col in 0..dim {
                    let d = entry(r, col);
                    if d.is_zero() {
                        continue;
                    }
                    if r == col + 1 {
                        let a = d.abs();
                        if a > subdiagonal_max {
                            subdiagonal_max = a;
                        }
                    } else {
                        off_subdiagonal.push((r, col, d));
                    }
                }
            }
            if off_subdiagonal.is_empty() {
                // Pure subdiagonal difference: a weighted shift again, whose
                // operator norm is exactly its largest weight.
                return Ok(DefectValue::Exact(subdiagonal_max));
            }
            // Misaligned reversal: fall through to the numeric norm.
            let mut diff = Array2::<Complex64>::zeros((dim, dim));
            for r in 0..dim {
                for col in 0..dim {
                    let d = entry(r, col);
                    if !d.is_zero() {
                        diff[(r, col)] = Complex64::new(
                            d.to_f64().ok_or_else(|| {
                                CoreError::invariant("difference entry exceeds f64 range")
                            })?,
                            0.0,
                        );
                    }
                }
            }
            Ok(DefectValue::Numeric(linalg::operator_norm(&diff)?))
        }
        ConjugationSpec::SymmetricUnitary { s } => {
            let t = assemble_shift_matrix(weights)?;
            let d = defect_matrix(&t, s);
            Ok(DefectValue::Numeric(linalg::operator_norm(&d)?))
        }
    }
}

/// T − S Tᵀ S^H, the difference whose norm is the symmetry defect under the
/// conjugation C = S ∘ conj (for which C T* C = S Tᵀ S^H).
pub fn defect_matrix(t: &CMat, s: &CMat) -> CMat {
    let ctc = s.dot(&linalg::transpose(t)).dot(&linalg::adjoint(s));
    t - &ctc
}

/// Dense f64 matrix of the weighted shift for a finite weight list.
pub fn assemble_shift_matrix(weights: &[Rational]) -> Result<CMat> {
    let dim = weights.len() + 1;
    let mut t = Array2::<Complex64>::zeros((dim, dim));
    for (n, w) in weights.iter().enumerate() {
        let x = w
            .to_f64()
            .ok_or_else(|| CoreError::invariant("weight exceeds f64 range"))?;
        t[(n + 1, n)] = Complex64::new(x, 0.0);
    }
    Ok(t)
}

/// ‖T‖ of the shift: exactly the largest weight (0 for the empty list).
pub fn shift_norm(weights: &[Rational]) -> Rational {
    weights
        .iter()
        .map(|w| w.abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

/// ‖T₁ − T₂‖ for same-length weight lists: the difference is again a shift,
/// so the norm is exactly max |α_n − β_n|.
pub fn shift_distance(w1: &[Rational], w2: &[Rational]) -> Result<Rational> {
    if w1.len() != w2.len() {
        return Err(CoreError::domain(format!(
            "shift_distance requires equal lengths, got {} and {}",
            w1.len(),
            w2.len()
        )));
    }
    Ok(w1
        .iter()
        .zip(w2.iter())
        .map(|(a, b)| (a - b).abs())
        .max()
        .unwrap_or_else(Rational::zero))
}

/// The zeroed prefix β_n = α_n·[α_n > ε] for n ≤ prefix_len.
///
/// The threshold is inclusive — α_n ≤ ε is zeroed, ties included — so the
/// distance to the original prefix never exceeds ε.
pub fn truncate_by_threshold(
    seq: &dyn WeightSequence,
    eps: &Rational,
    prefix_len: u64,
) -> Result<Vec<Rational>> {
    if !eps.is_positive() {
        return Err(CoreError::domain("threshold ε must be > 0"));
    }
    if prefix_len == 0 {
        return Err(CoreError::domain("prefix_len must be ≥ 1"));
    }
    let mut out = Vec::with_capacity(prefix_len as usize);
    for n in 1..=prefix_len {
        if seq.eval_scalar(n)?.cmp_rational(eps) == std::cmp::Ordering::Greater {
            out.push(seq.eval(n)?);
        } else {
            out.push(Rational::zero());
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Kernel obstruction
// ---------------------------------------------------------------------------

/// How the weight pattern is assumed to continue beyond the recorded prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailAssumption {
    /// All weights beyond the prefix are strictly positive, so the full
    /// sequence has exactly the recorded finitely many zeros.
    AllPositive,
    /// Zeros keep recurring forever.
    InfinitelyManyZeros,
}

/// Report on the kernel-dimension obstruction of the modeled infinite shift.
#[derive(Debug, Clone, Serialize)]
pub struct KernelReport {
    pub num_zeros: u64,
    pub tail: TailAssumption,
    /// True when the kernel count rules out complex symmetry.
    pub obstructed: bool,
    pub verdict: String,
}

/// The kernel-count obstruction: an infinite weighted shift whose weight
/// sequence has exactly N zeros (finitely many) satisfies
/// dim ker T = N ≠ N + 1 = dim ker T*, and no antilinear involution can
/// intertwine spaces of different dimension — the operator is not complex
/// symmetric.  With infinitely many zeros both kernels are infinite and the
/// count poses no obstruction.  This is a statement about the modeled
/// infinite operator, not about the finite pattern matrix itself.
pub fn kernel_obstruction(weights: &[Rational], tail: TailAssumption) -> KernelReport {
    let num_zeros = weights.iter().filter(|w| w.is_zero()).count() as u64;
    match tail {
        TailAssumption::AllPositive => KernelReport {
            num_zeros,
            tail,
            obstructed: true,
            verdict: format!(
                "infinite shift with exactly {num_zeros} zero weights: \
                 dim ker T = {num_zeros} ≠ {} = dim ker T*, so the operator \
                 is not complex symmetric",
                num_zeros + 1
            ),
        },
        TailAssumption::InfinitelyManyZeros => KernelReport {
            num_zeros,
            tail,
            obstructed: false,
            verdict: "zeros recur indefinitely: both kernels are infinite-dimensional \
                      and the kernel count poses no obstruction to complex symmetry"
                .to_string(),
        },
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;
    use crate::weights::KakutaniWeights;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        ratio(n, d)
    }

    fn rats(xs: &[(i64, i64)]) -> Vec<Rational> {
        xs.iter().map(|&(n, d)| r(n, d)).collect()
    }

    #[test]
    fn decompose_examples() {
        // [1, 1/2, 1, 0, 1/4] → blocks (1,1/2,1), (1/4); zero at 4.
        let d = decompose(&rats(&[(1, 1), (1, 2), (1, 1), (0, 1), (1, 4)])).unwrap();
        assert_eq!(d.blocks.len(), 2);
        assert_eq!(d.blocks[0].weights(), rats(&[(1, 1), (1, 2), (1, 1)]));
        assert_eq!(d.blocks[1].weights(), rats(&[(1, 4)]));
        assert_eq!(d.zero_positions, vec![4]);
        assert!(!d.ends_in_zero());

        // [0, 0] → two 1×1 zero blocks.
        let d = decompose(&rats(&[(0, 1), (0, 1)])).unwrap();
        assert_eq!(d.blocks.len(), 2);
        assert!(d.blocks.iter().all(|b| b.weights().is_empty()));
        assert_eq!(d.zero_positions, vec![1, 2]);
        assert!(d.ends_in_zero());

        // Empty input.
        let d = decompose(&[]).unwrap();
        assert!(d.blocks.is_empty() && d.zero_positions.is_empty());

        // Negative weight rejected.
        assert!(decompose(&rats(&[(-1, 2)])).is_err());
    }

    #[test]
    fn decompose_kakutani_quarter_truncation() {
        // Kakutani first 15 weights truncated at ε = 1/4: zeros exactly at
        // {4, 8, 12}, every block (1, 1/2, 1).
        let trunc = truncate_by_threshold(&KakutaniWeights, &r(1, 4), 15).unwrap();
        let d = decompose(&trunc).unwrap();
        assert_eq!(d.zero_positions, vec![4, 8, 12]);
        assert_eq!(d.blocks.len(), 4);
        for b in &d.blocks {
            assert_eq!(b.weights(), rats(&[(1, 1), (1, 2), (1, 1)]));
            assert!(is_palindromic(b));
        }
        assert!(is_cso_truncation(&d));
    }

    #[test]
    fn palindrome_tests() {
        let b = FiniteShiftBlock::new(rats(&[(1, 1), (1, 2), (1, 1)])).unwrap();
        assert!(is_palindromic(&b));
        let b = FiniteShiftBlock::new(rats(&[(1, 1), (1, 2)])).unwrap();
        assert!(!is_palindromic(&b));
        let b = FiniteShiftBlock::new(vec![]).unwrap();
        assert!(is_palindromic(&b));
        assert!(FiniteShiftBlock::new(rats(&[(0, 1)])).is_err());
    }

    #[test]
    fn cso_truncation_examples() {
        let d = decompose(&rats(&[
            (1, 1),
            (1, 2),
            (1, 1),
            (0, 1),
            (1, 1),
            (1, 2),
            (1, 1),
        ]))
        .unwrap();
        assert!(is_cso_truncation(&d));
        let d = decompose(&rats(&[(1, 1), (2, 1), (0, 1)])).unwrap();
        assert!(!is_cso_truncation(&d));
    }

    #[test]
    fn reversal_sizes_cover_the_space() {
        let d = decompose(&rats(&[(1, 1), (1, 2), (1, 1), (0, 1), (1, 4)])).unwrap();
        match reversal_conjugation(&d) {
            ConjugationSpec::BlockReversal { sizes } => assert_eq!(sizes, vec![4, 2]),
            _ => panic!("expected block reversal"),
        }

        // Trailing zero ⇒ trailing 1×1 block appended.
        let d = decompose(&rats(&[(0, 1), (0, 1)])).unwrap();
        match reversal_conjugation(&d) {
            ConjugationSpec::BlockReversal { sizes } => assert_eq!(sizes, vec![1, 1, 1]),
            _ => panic!("expected block reversal"),
        }
    }

    #[test]
    fn reversal_is_an_involution() {
        let c = ConjugationSpec::BlockReversal {
            sizes: vec![3, 1, 2],
        };
        let v: Vec<Complex64> = (0..6)
            .map(|k| Complex64::new(k as f64, -(k as f64) * 0.5))
            .collect();
        let twice = c.apply(&c.apply(&v).unwrap()).unwrap();
        assert_eq!(twice, v, "C² must be the identity, exactly");
        assert!(c.apply(&v[..4]).is_err(), "dimension mismatch rejected");
    }

    #[test]
    fn defect_examples() {
        // Palindromic block with its reversal: exactly zero.
        let w = rats(&[(1, 1), (1, 2), (1, 1)]);
        let c = reversal_conjugation(&decompose(&w).unwrap());
        assert!(cso_defect(&w, &c).unwrap().is_exact_zero());

        // Non-palindromic [1, 2] on a single 3×3 reversal: exactly 1.
        let w = rats(&[(1, 1), (2, 1)]);
        let c = ConjugationSpec::BlockReversal { sizes: vec![3] };
        assert_eq!(cso_defect(&w, &c).unwrap(), DefectValue::Exact(r(1, 1)));

        // [1, 1/2] on a single 3×3 reversal: exactly 1/2.
        let w = rats(&[(1, 1), (1, 2)]);
        let c = ConjugationSpec::BlockReversal { sizes: vec![3] };
        assert_eq!(cso_defect(&w, &c).unwrap(), DefectValue::Exact(r(1, 2)));

        // 1×1 zero shift: zero under any conjugation.
        let w = rats(&[(0, 1)]);
        let c = reversal_conjugation(&decompose(&w).unwrap());
        assert!(cso_defect(&w, &c).unwrap().is_exact_zero());

        // Dimension mismatch.
        let c = ConjugationSpec::BlockReversal { sizes: vec![7] };
        assert!(cso_defect(&rats(&[(1, 1)]), &c).is_err());
    }

    #[test]
    fn defect_misaligned_reversal_goes_numeric() {
        // All-positive [1, 1] split by a misaligned [1, 2] reversal: the
        // exact difference spills off the subdiagonal.
        let w = rats(&[(1, 1), (1, 1)]);
        let c = ConjugationSpec::BlockReversal { sizes: vec![1, 2] };
        match cso_defect(&w, &c).unwrap() {
            DefectValue::Numeric(x) => assert!(x > 0.5, "misaligned defect should be large"),
            DefectValue::Exact(_) => panic!("misaligned reversal must go numeric"),
        }
    }

    #[test]
    fn defect_symmetric_unitary_antidiagonal() {
        // Palindromic 3×3 shift block (weights 1, 1) with S = anti-diagonal
        // identity — the reversal's matrix: defect 0 within 1e-12.
        let mut s = Array2::<Complex64>::zeros((3, 3));
        for i in 0..3 {
            s[(i, 2 - i)] = Complex64::new(1.0, 0.0);
        }
        let c = ConjugationSpec::symmetric_unitary(s).unwrap();
        let w = rats(&[(1, 1), (1, 1)]);
        match cso_defect(&w, &c).unwrap() {
            DefectValue::Numeric(x) => assert!(x < 1e-12, "got {x}"),
            DefectValue::Exact(_) => panic!("matrix conjugation is numeric"),
        }
    }

    #[test]
    fn symmetric_unitary_validation() {
        // Non-symmetric unitary rejected.
        let mut s = Array2::<Complex64>::zeros((2, 2));
        s[(0, 1)] = Complex64::new(1.0, 0.0);
        s[(1, 0)] = Complex64::new(-1.0, 0.0);
        assert!(ConjugationSpec::symmetric_unitary(s).is_err());

        // Symmetric non-unitary rejected.
        let mut s = Array2::<Complex64>::zeros((2, 2));
        s[(0, 0)] = Complex64::new(2.0, 0.0);
        s[(1, 1)] = Complex64::new(2.0, 0.0);
        assert!(ConjugationSpec::symmetric_unitary(s).is_err());

        // Non-square rejected.
        assert!(ConjugationSpec::symmetric_unitary(Array2::zeros((2, 3))).is_err());
    }

    #[test]
    fn norm_and_distance() {
        assert_eq!(shift_norm(&rats(&[(1, 1), (1, 2), (1, 4)])), r(1, 1));
        assert_eq!(shift_norm(&[]), r(0, 1));

        let w = rats(&[(1, 1), (0, 1)]);
        let v = rats(&[(0, 1), (1, 1)]);
        assert_eq!(shift_distance(&w, &v).unwrap(), r(1, 1));
        assert_eq!(shift_distance(&w, &w).unwrap(), r(0, 1));
        assert!(shift_distance(&w, &v[..1]).is_err());
    }

    #[test]
    fn kakutani_truncation_distances() {
        // ε = 1/8: the largest zeroed Kakutani weight is exactly 1/8.
        let prefix: Vec<Rational> = (1..=31).map(|n| KakutaniWeights.eval(n).unwrap()).collect();
        let trunc = truncate_by_threshold(&KakutaniWeights, &r(1, 8), 31).unwrap();
        assert_eq!(shift_distance(&prefix, &trunc).unwrap(), r(1, 8));
    }

    #[test]
    fn truncation_examples() {
        let t = truncate_by_threshold(&KakutaniWeights, &r(1, 2), 7).unwrap();
        assert_eq!(
            t,
            rats(&[(1, 1), (0, 1), (1, 1), (0, 1), (1, 1), (0, 1), (1, 1)])
        );

        let t = truncate_by_threshold(&KakutaniWeights, &r(1, 1), 8).unwrap();
        assert!(t.iter().all(|w| w.is_zero()), "ε ≥ 1 zeroes everything");

        assert!(truncate_by_threshold(&KakutaniWeights, &r(0, 1), 4).is_err());
        assert!(truncate_by_threshold(&KakutaniWeights, &r(1, 4), 0).is_err());
    }

    #[test]
    fn kernel_obstruction_reports() {
        let rep = kernel_obstruction(&rats(&[(1, 1), (1, 2)]), TailAssumption::AllPositive);
        assert_eq!(rep.num_zeros, 0);
        assert!(rep.obstructed);
        assert!(rep.verdict.contains("not complex symmetric"));

        let rep = kernel_obstruction(
            &rats(&[(1, 1), (0, 1), (1, 2), (0, 1)]),
            TailAssumption::AllPositive,
        );
        assert_eq!(rep.num_zeros, 2);
        assert!(rep.obstructed);
        assert!(rep.verdict.contains("2 zero weights"));
        assert!(rep.verdict.contains("≠ 3"));

        let rep = kernel_obstruction(&rats(&[(0, 1)]), TailAssumption::InfinitelyManyZeros);
        assert!(!rep.obstructed);
        assert!(rep.verdict.contains("no obstruction"));
    }

    #[test]
    fn decomposition_report_shape() {
        let d = decompose(&rats(&[(1, 1), (1, 2), (1, 1), (0, 1)])).unwrap();
        let rep = d.report();
        assert_eq!(rep.blocks, vec![vec!["1", "1/2", "1"]]);
        assert_eq!(rep.zero_positions, vec![4]);
        assert!(rep.palindromic);
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("\"1/2\""));
    }

    // -- properties ---------------------------------------------------------

    fn weight_list_strategy(max_len: usize) -> impl Strategy<Value = Vec<Rational>> {
        proptest::collection::vec((0u8..=4, 1u8..=4), 0..max_len).prop_map(|pairs| {
            pairs
                .into_iter()
                .map(|(n, d)| ratio(n as i64, d as i64))
                .collect()
        })
    }

    proptest! {
        /// decompose then reassemble is the identity, exactly.
        #[test]
        fn reconstruction_identity(w in weight_list_strategy(24)) {
            let d = decompose(&w).unwrap();
            prop_assert_eq!(d.reassemble(), w);
        }

        /// Palindromy of every block ⟺ exactly-zero defect under the
        /// decomposition's own reversal conjugation.
        #[test]
        fn palindrome_iff_exact_zero_defect(w in weight_list_strategy(16)) {
            let d = decompose(&w).unwrap();
            let c = reversal_conjugation(&d);
            let defect = cso_defect(&w, &c).unwrap();
            prop_assert_eq!(is_cso_truncation(&d), defect.is_exact_zero());
        }

        /// shift_distance agrees with the numeric largest singular value of
        /// the assembled difference.
        #[test]
        fn distance_matches_singular_value(
            a in weight_list_strategy(10),
            b in weight_list_strategy(10),
        ) {
            let n = a.len().min(b.len());
            let (a, b) = (&a[..n], &b[..n]);
            let exact = shift_distance(a, b).unwrap().to_f64().unwrap();
            let diff = &assemble_shift_matrix(a).unwrap() - &assemble_shift_matrix(b).unwrap();
            let numeric = linalg::operator_norm(&diff).unwrap();
            prop_assert!((exact - numeric).abs() <= 1e-10 * (1.0 + exact));
        }

        /// Zeroing at threshold ε never moves the operator further than ε.
        #[test]
        fn truncation_bound(prefix_len in 1u64..64, num in 1i64..8, den in 1i64..8) {
            let eps = ratio(num, den);
            let trunc = truncate_by_threshold(&KakutaniWeights, &eps, prefix_len).unwrap();
            let prefix: Vec<Rational> =
                (1..=prefix_len).map(|n| KakutaniWeights.eval(n).unwrap()).collect();
            prop_assert!(shift_distance(&prefix, &trunc).unwrap() <= eps);
        }

        /// The reversal conjugation is an exact involution on random vectors.
        #[test]
        fn reversal_involution(
            sizes in proptest::collection::vec(1usize..5, 1..5),
            seed in 0u64..1000,
        ) {
            use rand::{Rng, SeedableRng};
            let dim: usize = sizes.iter().sum();
            let c = ConjugationSpec::BlockReversal { sizes };
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let v: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let twice = c.apply(&c.apply(&v).unwrap()).unwrap();
            prop_assert_eq!(twice, v);
        }
    }
}
