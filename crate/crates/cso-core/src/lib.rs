//! Exact and numerical tools for weighted unilateral shift operators.
//!
//! The crate is organized around one question: how close is a given weighted
//! shift to the set of complex symmetric operators (operators T with
//! T = C T* C for some conjugation C)?  An irreducible weighted shift is never
//! complex symmetric, but shifts whose weights cluster the right way sit in
//! the *closure* of that set, and the approximants can be written down
//! explicitly.  The modules here make every step of that construction
//! computable and independently checkable:
//!
//! - [`weights`]: exact rational weight-sequence generators (the classical
//!   Kakutani sequence and a strictly-distinct perturbed variant), plus
//!   distinctness / palindromicity / clustering analysis.
//! - [`shift`]: finite shift blocks, decomposition of a weight list at its
//!   zeros, palindrome tests, reversal conjugations, exact defect and distance
//!   computations.
//! - [`approx`]: the approximation pipeline — index oracles, the recursive
//!   index plan, threshold truncation, block reversal, and a machine-checkable
//!   [`approx::ApproxCertificate`] with an independent verifier.
//! - [`sst`]: finite-dimensional approximants A ⊕ C A* C ⊕ 0 of a dense
//!   operator together with strong-* residual tails.
//! - [`fit`]: numerical search for a best-fitting conjugation, parametrized
//!   through symmetric unitaries S = W Wᵀ with W = exp(iH).
//! - [`linalg`]: the small dense complex kernel shared by the numeric parts
//!   (cyclic Jacobi eigensolver, operator norms, exp(iH)).
//! - [`scalar`]: exact scalars of the form 2^-d + Σ 3^-t used to keep
//!   certificate arithmetic exact far beyond what plain big rationals can
//!   materialize.
//!
//! Weight indices are 1-based throughout, matching the usual operator-theory
//! convention T e_n = α_n e_{n+1}.  Everything rational is exact; floating
//! point appears only in singular-value computations and the fit optimizer.

pub mod approx;
pub mod error;
pub mod fit;
pub mod io;
pub mod linalg;
pub mod scalar;
pub mod shift;
pub mod sst;
pub mod weights;

pub use error::CoreError;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CoreError>;

/// Exact arbitrary-precision rational, the scalar type for all weight data.
pub type Rational = num_rational::BigRational;

/// Convenience constructor for small rationals.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Convenience constructor for integer rationals.
pub fn ratio_int(num: i64) -> Rational {
    Rational::from_integer(num.into())
}
