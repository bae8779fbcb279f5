//! Weight-sequence generators and exact sequence-level analyses.
//!
//! A weighted shift is determined by its weight sequence (α_n)_{n≥1} via
//! `T e_n = α_n e_{n+1}`.  Two built-in generators matter here:
//!
//! * **Kakutani weights** — α_n = 2^{-v₂(n)} where v₂ is the 2-adic
//!   valuation.  Equivalently, with P_0 the empty tuple and
//!   P_{k+1} = (P_k, 2^{-k}, P_k), the sequence is the common extension of
//!   the palindromic prefixes P_k of length 2^k − 1.  Both definitions are
//!   implemented (closed form and block descent) and cross-checked.
//!
//! * **Example weights** — a perturbation of the Kakutani weights that makes
//!   all values distinct while keeping the palindromic structure to within
//!   explicitly-controlled powers of 3:
//!
//!   ```text
//!     α_1 = 1,   α_{2^m} = 2^{-m},
//!     α_{2^m + j} = α_{2^m − j} + 3^{-(2^m+j)}      (1 ≤ j < 2^m),
//!   ```
//!
//!   powers of two taking precedence over the inductive rule.  Unrolling the
//!   reflection n = 2^m + j ↦ 2^m − j until it lands on a power of two shows
//!   every value is `2^{-s} + Σ 3^{-t}` with O(log n) terms — exactly the
//!   [`ExactScalar`] power-sum form, which is what keeps indices around 2·10⁶
//!   tractable.
//!
//! All indices are 1-based, matching `T e_n = α_n e_{n+1}` for n ≥ 1.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{FromPrimitive, One, Signed, Zero};
use serde::Serialize;

use crate::scalar::ExactScalar;
use crate::{CoreError, Rational, Result};

/// Guard for accidental quadratic blowups in default (per-index) scans.
pub const DEFAULT_SCAN_LIMIT: u64 = 1 << 22;

// ---------------------------------------------------------------------------
// The sequence interface
// ---------------------------------------------------------------------------

/// A 1-based sequence of exact nonnegative rational weights.
///
/// `eval` is the ground truth; the scalar methods default to it but are
/// overridden by the generators with O(log n) power-sum evaluations so that
/// comparisons at very large indices never materialize huge integers.
pub trait WeightSequence: Send + Sync {
    /// Stable identifier ("kakutani", "example", "file:…").
    fn name(&self) -> &str;

    /// Exact value α_n as a plain rational.  May be expensive at very large
    /// indices for perturbed sequences; prefer [`eval_scalar`] in bulk work.
    ///
    /// [`eval_scalar`]: WeightSequence::eval_scalar
    fn eval(&self, n: u64) -> Result<Rational>;

    /// Exact value α_n in power-sum form when the generator has one.
    fn eval_scalar(&self, n: u64) -> Result<ExactScalar> {
        self.eval(n).map(ExactScalar::from_rational)
    }

    /// Exact test α_n < bound.
    fn weight_lt(&self, n: u64, bound: &Rational) -> Result<bool> {
        Ok(self.eval_scalar(n)?.cmp_rational(bound) == Ordering::Less)
    }

    /// Exact test α_n > 0.
    fn weight_positive(&self, n: u64) -> Result<bool> {
        Ok(self.eval_scalar(n)?.cmp_rational(&Rational::zero()) == Ordering::Greater)
    }

    /// Exact test |α_i − α_j| < bound.
    fn abs_diff_lt(&self, i: u64, j: u64, bound: &Rational) -> Result<bool> {
        let a = self.eval_scalar(i)?;
        let b = self.eval_scalar(j)?;
        Ok(a.abs_diff_cmp_rational(&b, bound) == Ordering::Less)
    }

    /// Exact |α_i − α_j|.
    fn abs_diff_scalar(&self, i: u64, j: u64) -> Result<ExactScalar> {
        let a = self.eval_scalar(i)?;
        let b = self.eval_scalar(j)?;
        a.abs_diff(&b)
    }

    /// Exact min{α_1, …, α_len}.  The default scans; generators override
    /// with a closed form.
    fn prefix_min(&self, len: u64) -> Result<Rational> {
        if len == 0 {
            return Err(CoreError::domain("prefix_min requires len ≥ 1"));
        }
        if len > DEFAULT_SCAN_LIMIT {
            return Err(CoreError::Resource {
                completed: 0,
                detail: format!(
                    "prefix_min scan over {len} indices exceeds the per-index \
                     evaluation budget; this sequence has no closed form"
                ),
            });
        }
        let mut best = self.eval_scalar(1)?;
        for n in 2..=len {
            let v = self.eval_scalar(n)?;
            if v.cmp_value(&best) == Ordering::Less {
                best = v;
            }
        }
        Ok(best.to_rational())
    }
}

// ---------------------------------------------------------------------------
// Kakutani weights
// ---------------------------------------------------------------------------

/// α_n = 2^{-v₂(n)}: the weight sequence whose modulus has spectrum
/// {0} ∪ {2^{-m}}.
#[derive(Debug, Clone, Copy, Default)]
pub struct KakutaniWeights;

/// Closed form α_n = 2^{-v₂(n)}.
pub fn kakutani_closed(n: u64) -> Result<Rational> {
    if n == 0 {
        return Err(CoreError::domain("weight index must be ≥ 1"));
    }
    Ok(pow2_inv(n.trailing_zeros() as u64))
}

/// Block-descent evaluation against the recursion
/// P_{k+1} = (P_k, 2^{-k}, P_k), P_0 = ().
///
/// A genuinely different code path from [`kakutani_closed`], kept as an
/// internal cross-check: position n inside P_k is either the midpoint 2^{k−1}
/// (value 2^{-(k−1)}) or recurses into the left/right copy of P_{k−1}.
pub fn kakutani_recursive(n: u64) -> Result<Rational> {
    if n == 0 {
        return Err(CoreError::domain("weight index must be ≥ 1"));
    }
    // Smallest k with 2^k − 1 ≥ n.
    let mut k = 1u32;
    while ((1u128 << k) - 1) < n as u128 {
        k += 1;
    }
    let mut pos = n;
    loop {
        debug_assert!(k >= 1);
        let mid = 1u64 << (k - 1);
        match pos.cmp(&mid) {
            Ordering::Equal => return Ok(pow2_inv((k - 1) as u64)),
            Ordering::Less => k -= 1,
            Ordering::Greater => {
                pos -= mid;
                k -= 1;
            }
        }
    }
}

impl WeightSequence for KakutaniWeights {
    fn name(&self) -> &str {
        "kakutani"
    }

    fn eval(&self, n: u64) -> Result<Rational> {
        kakutani_closed(n)
    }

    fn eval_scalar(&self, n: u64) -> Result<ExactScalar> {
        if n == 0 {
            return Err(CoreError::domain("weight index must be ≥ 1"));
        }
        Ok(ExactScalar::pow_sum(
            Some(n.trailing_zeros() as u64),
            vec![],
        ))
    }

    fn prefix_min(&self, len: u64) -> Result<Rational> {
        prefix_min_dyadic(len)
    }
}

/// min{α_1..α_len} = 2^{-⌊log₂ len⌋} for both generators: every value
/// exceeds 2^{-⌊log₂ n⌋} except at n = 2^s where it equals 2^{-s}, and the
/// largest power of two ≤ len realizes the bound.
fn prefix_min_dyadic(len: u64) -> Result<Rational> {
    if len == 0 {
        return Err(CoreError::domain("prefix_min requires len ≥ 1"));
    }
    Ok(pow2_inv(len.ilog2() as u64))
}

fn pow2_inv(e: u64) -> Rational {
    Rational::new(
        num_bigint::BigInt::one(),
        num_bigint::BigInt::one() << usize::try_from(e).expect("exponent exceeds address space"),
    )
}

// ---------------------------------------------------------------------------
// Example weights (perturbed Kakutani)
// ---------------------------------------------------------------------------

/// The distinct-weight perturbation of the Kakutani sequence.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExampleWeights;

/// Exponent data of α_n: value = 2^{-s} + Σ_t 3^{-t}, via the reflection
/// chain n = 2^m + j ↦ 2^m − j iterated until a power of two is reached.
pub fn example_chain(n: u64) -> Result<(u64, Vec<u64>)> {
    if n == 0 {
        return Err(CoreError::domain("weight index must be ≥ 1"));
    }
    let mut three_exps = Vec::new();
    let mut cur = n;
    while !cur.is_power_of_two() {
        three_exps.push(cur); // the rule adds 3^{-n} at index n = 2^m + j
        let m = cur.ilog2() as u64;
        cur = (1u64 << (m + 1)) - cur; // 2^m − j
    }
    three_exps.reverse(); // strictly increasing
    Ok((cur.trailing_zeros() as u64, three_exps))
}

impl WeightSequence for ExampleWeights {
    fn name(&self) -> &str {
        "example"
    }

    fn eval(&self, n: u64) -> Result<Rational> {
        Ok(self.eval_scalar(n)?.to_rational())
    }

    fn eval_scalar(&self, n: u64) -> Result<ExactScalar> {
        let (s, three_exps) = example_chain(n)?;
        Ok(ExactScalar::pow_sum(Some(s), three_exps))
    }

    fn prefix_min(&self, len: u64) -> Result<Rational> {
        // Every perturbed value strictly exceeds its chain terminal 2^{-s}
        // with 2^s ≤ n, so the dyadic closed form still gives the minimum.
        prefix_min_dyadic(len)
    }
}

// ---------------------------------------------------------------------------
// File-backed sequences
// ---------------------------------------------------------------------------

/// A finite sequence loaded from explicit values (e.g. a weight file).
/// Indices beyond the stored prefix are domain errors.
#[derive(Debug, Clone)]
pub struct FileSequence {
    name: String,
    values: Vec<Rational>,
}

impl FileSequence {
    pub fn new(name: impl Into<String>, values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(CoreError::domain("weight file holds no values"));
        }
        if let Some(bad) = values.iter().position(|v| v.is_negative()) {
            return Err(CoreError::domain(format!(
                "weight at index {} is negative; weights must be ≥ 0",
                bad + 1
            )));
        }
        Ok(FileSequence {
            name: name.into(),
            values,
        })
    }

    pub fn len(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

impl WeightSequence for FileSequence {
    fn name(&self) -> &str {
        &self.name
    }

    fn eval(&self, n: u64) -> Result<Rational> {
        if n == 0 {
            return Err(CoreError::domain("weight index must be ≥ 1"));
        }
        self.values.get(n as usize - 1).cloned().ok_or_else(|| {
            CoreError::domain(format!(
                "index {n} beyond stored prefix of length {}",
                self.values.len()
            ))
        })
    }
}

/// Resolve a sequence by its external name:
/// `"kakutani"`, `"example"`, or `"file:<path>"`.
pub fn sequence_by_spec(spec: &str) -> Result<Box<dyn WeightSequence>> {
    match spec {
        "kakutani" => Ok(Box::new(KakutaniWeights)),
        "example" => Ok(Box::new(ExampleWeights)),
        s => match s.strip_prefix("file:") {
            Some(path) => {
                let values = crate::io::read_weight_file(std::path::Path::new(path))?;
                Ok(Box::new(FileSequence::new(s, values)?))
            }
            None => Err(CoreError::Parse(format!(
                "unknown sequence `{s}`; expected `kakutani`, `example`, or `file:<path>`"
            ))),
        },
    }
}

// ---------------------------------------------------------------------------
// Distinctness
// ---------------------------------------------------------------------------

/// Outcome of an exact pairwise-distinctness scan over a prefix.
#[derive(Debug, Clone, Serialize)]
pub struct DistinctReport {
    pub prefix_len: u64,
    pub distinct: bool,
    /// Lexicographically first colliding pair (i, j), i < j, when not distinct.
    pub collision: Option<(u64, u64)>,
}

/// Exact pairwise distinctness of α_1..α_prefix_len.
pub fn check_distinct(seq: &dyn WeightSequence, prefix_len: u64) -> Result<DistinctReport> {
    if prefix_len == 0 {
        return Err(CoreError::domain("prefix_len must be ≥ 1"));
    }
    // Group indices by exact value; ExactScalar ordering is value-exact.
    let mut groups: BTreeMap<ExactScalar, Vec<u64>> = BTreeMap::new();
    for n in 1..=prefix_len {
        groups.entry(seq.eval_scalar(n)?).or_default().push(n);
    }
    // Lexicographic first collision: smallest i with a duplicate, then the
    // smallest j > i sharing its value.  Indices were inserted in order.
    let mut best: Option<(u64, u64)> = None;
    for indices in groups.values() {
        if indices.len() >= 2 {
            let pair = (indices[0], indices[1]);
            if best.is_none_or(|b| pair < b) {
                best = Some(pair);
            }
        }
    }
    Ok(DistinctReport {
        prefix_len,
        distinct: best.is_none(),
        collision: best,
    })
}

// ---------------------------------------------------------------------------
// Corollary quantities
// ---------------------------------------------------------------------------

/// One row of the decay report: the dyadic landmark α_{2^n} and the
/// palindromy defect A_n = sup{|α_k − α_{2^n−k}| : 1 ≤ k < 2^n}.
#[derive(Debug, Clone, Serialize)]
pub struct CorollaryRow {
    pub n: u32,
    pub alpha_pow2: ExactScalar,
    pub defect_sup: ExactScalar,
}

/// Compute (n, α_{2^n}, A_n) for n = 1..max_n.
///
/// The k = 2^n endpoint is excluded (it would pair α_{2^n} with the
/// nonexistent α_0), so A_n = sup over 1 ≤ k ≤ 2^n − 1.  Exact throughout;
/// a Kakutani prefix of length 2^n − 1 is an exact palindrome so its A_n is
/// 0, while the perturbed example yields a single maximal power of 3.
pub fn corollary_check(seq: &dyn WeightSequence, max_n: u32) -> Result<Vec<CorollaryRow>> {
    if max_n == 0 {
        return Err(CoreError::domain("max_n must be ≥ 1"));
    }
    let mut rows = Vec::with_capacity(max_n as usize);
    for n in 1..=max_n {
        if n >= 63 {
            return Err(CoreError::Resource {
                completed: (n - 1) as u64,
                detail: format!("index range 2^{n} overflows the 64-bit index space"),
            });
        }
        let len = 1u64 << n;
        let alpha_pow2 = seq.eval_scalar(len)?;
        let mut sup = ExactScalar::zero();
        for k in 1..len {
            let d = seq.abs_diff_scalar(k, len - k)?;
            if d.cmp_value(&sup) == Ordering::Greater {
                sup = d;
            }
        }
        rows.push(CorollaryRow {
            n,
            alpha_pow2,
            defect_sup: sup,
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Accumulation analysis
// ---------------------------------------------------------------------------

/// A tol-separated cluster of weight values.
#[derive(Debug, Clone, Serialize)]
pub struct Cluster {
    /// Exact mean of the member values within the extended prefix.
    #[serde(with = "crate::scalar::serde_rational")]
    pub center: Rational,
    #[serde(with = "crate::scalar::serde_rational")]
    pub min: Rational,
    #[serde(with = "crate::scalar::serde_rational")]
    pub max: Rational,
    /// Multiplicity among α_1..α_prefix_len.
    pub multiplicity_at_prefix: u64,
    /// Multiplicity among α_1..α_{2·prefix_len}.
    pub multiplicity_at_extended: u64,
    /// Finite surrogate for "accumulation point": the cluster grew when the
    /// prefix doubled.
    pub accumulating: bool,
}

/// Report of [`accumulation_analysis`].
#[derive(Debug, Clone, Serialize)]
pub struct AccumulationReport {
    pub prefix_len: u64,
    pub extended_len: u64,
    /// Exact rational image of the requested tolerance.
    #[serde(with = "crate::scalar::serde_rational")]
    pub tol: Rational,
    /// Clusters sorted by ascending center.
    pub clusters: Vec<Cluster>,
}

/// Cluster the weight multiset by tol-separation and flag candidate
/// accumulation points.
///
/// Single-linkage over the exactly-sorted value list of the *doubled* prefix
/// (a new cluster starts where a sorted gap exceeds tol); multiplicities are
/// then counted at both prefix_len and 2·prefix_len, and a cluster is flagged
/// accumulating when doubling the prefix strictly increased it.  For the
/// Kakutani sequence the multiplicity of 2^{-m} among the first 2^k terms is
/// 2^{k−m−1} for m < k (indices of 2-adic valuation exactly m).
pub fn accumulation_analysis(
    seq: &dyn WeightSequence,
    prefix_len: u64,
    tol: f64,
) -> Result<AccumulationReport> {
    if prefix_len < 2 {
        return Err(CoreError::domain("prefix_len must be ≥ 2"));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(CoreError::domain("tol must be a positive finite float"));
    }
    let tol_exact =
        Rational::from_f64(tol).ok_or_else(|| CoreError::domain("tol is not representable"))?;
    let extended_len = prefix_len
        .checked_mul(2)
        .ok_or_else(|| CoreError::domain("prefix_len too large to double"))?;

    // Exact values with their indices, sorted by value.
    let mut entries: Vec<(Rational, u64)> = Vec::with_capacity(extended_len as usize);
    for n in 1..=extended_len {
        entries.push((seq.eval(n)?, n));
    }
    entries.sort_by(|a, b| a.0.cmp(&b.0));

    let mut clusters = Vec::new();
    let mut start = 0usize;
    for i in 1..=entries.len() {
        let boundary = i == entries.len() || (&entries[i].0 - &entries[i - 1].0) > tol_exact;
        if boundary {
            let members = &entries[start..i];
            let sum: Rational = members
                .iter()
                .map(|(v, _)| v.clone())
                .fold(Rational::zero(), |a, b| a + b);
            let count = members.len() as u64;
            let at_prefix = members.iter().filter(|(_, n)| *n <= prefix_len).count() as u64;
            clusters.push(Cluster {
                center: sum / Rational::from_integer(count.into()),
                min: members.first().expect("nonempty cluster").0.clone(),
                max: members.last().expect("nonempty cluster").0.clone(),
                multiplicity_at_prefix: at_prefix,
                multiplicity_at_extended: count,
                accumulating: count > at_prefix,
            });
            start = i;
        }
    }

    Ok(AccumulationReport {
        prefix_len,
        extended_len,
        tol: tol_exact,
        clusters,
    })
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        ratio(n, d)
    }

    #[test]
    fn kakutani_known_values() {
        let seq = KakutaniWeights;
        assert_eq!(seq.eval(1).unwrap(), r(1, 1));
        assert_eq!(seq.eval(2).unwrap(), r(1, 2));
        assert_eq!(seq.eval(3).unwrap(), r(1, 1));
        assert_eq!(seq.eval(12).unwrap(), r(1, 4));
        assert_eq!(seq.eval(1024).unwrap(), r(1, 1024));
        assert!(seq.eval(0).is_err());
    }

    #[test]
    fn kakutani_recursive_matches_closed_form() {
        for n in 1..=(1u64 << 16) {
            assert_eq!(
                kakutani_recursive(n).unwrap(),
                kakutani_closed(n).unwrap(),
                "mismatch at n = {n}"
            );
        }
    }

    #[test]
    fn kakutani_prefixes_are_palindromes() {
        let seq = KakutaniWeights;
        for m in 1..=12u32 {
            let len = 1u64 << m;
            for k in 1..len {
                assert_eq!(
                    seq.eval(k).unwrap(),
                    seq.eval(len - k).unwrap(),
                    "palindrome violated at m = {m}, k = {k}"
                );
            }
        }
    }

    #[test]
    fn example_table_values() {
        let seq = ExampleWeights;
        // α_9 = 1 + 3^-7 + 3^-9
        assert_eq!(
            seq.eval_scalar(9).unwrap(),
            ExactScalar::pow_sum(Some(0), vec![7, 9])
        );
        // α_16 = 1/16 (power-of-two precedence)
        assert_eq!(seq.eval(16).unwrap(), r(1, 16));
        // α_11 = 1 + 3^-3 + 3^-5 + 3^-11
        assert_eq!(
            seq.eval_scalar(11).unwrap(),
            ExactScalar::pow_sum(Some(0), vec![3, 5, 11])
        );
        // α_17 = α_15 + 3^-17 = 1 + 3^-15 + 3^-17
        assert_eq!(
            seq.eval_scalar(17).unwrap(),
            ExactScalar::pow_sum(Some(0), vec![15, 17])
        );
        // Exact rational spot check: α_3 = 1 + 1/27 = 28/27.
        assert_eq!(seq.eval(3).unwrap(), r(28, 27));
    }

    #[test]
    fn example_reflection_identity() {
        // |α_{2^m+j} − α_{2^m−j}| = 3^{−(2^m+j)} exactly.
        let seq = ExampleWeights;
        for m in 1..=10u32 {
            let base = 1u64 << m;
            for j in [1u64, 2, 3, base / 2, base - 1] {
                if j == 0 || j >= base {
                    continue;
                }
                let d = seq.abs_diff_scalar(base + j, base - j).unwrap();
                assert_eq!(d, ExactScalar::pow_sum(None, vec![base + j]));
            }
        }
    }

    #[test]
    fn example_values_at_huge_indices_stay_compact() {
        let seq = ExampleWeights;
        // Index 2^21 + 1 reflects to 2^21 − 1 … chain of O(log n) terms.
        let v = seq.eval_scalar((1 << 21) + 1).unwrap();
        assert_eq!(v.cmp_rational(&r(1, 1)), std::cmp::Ordering::Greater);
        assert_eq!(v.cmp_rational(&r(2, 1)), std::cmp::Ordering::Less);
        assert!(seq
            .abs_diff_lt((1 << 21) + 1, (1 << 21) - 1, &r(1, 1_000_000))
            .unwrap());
    }

    #[test]
    fn prefix_min_closed_forms_match_scans() {
        for len in [1u64, 2, 3, 4, 5, 31, 32, 33, 100, 1023, 1024] {
            let kak = KakutaniWeights;
            let scan = (1..=len)
                .map(|n| kak.eval(n).unwrap())
                .min()
                .expect("nonempty prefix");
            assert_eq!(kak.prefix_min(len).unwrap(), scan, "kakutani len {len}");

            let ex = ExampleWeights;
            let scan = (1..=len)
                .map(|n| ex.eval(n).unwrap())
                .min()
                .expect("nonempty prefix");
            assert_eq!(ex.prefix_min(len).unwrap(), scan, "example len {len}");
        }
    }

    #[test]
    fn distinctness_reports() {
        let kak = check_distinct(&KakutaniWeights, 4).unwrap();
        assert!(!kak.distinct);
        assert_eq!(kak.collision, Some((1, 3)));

        let ex = check_distinct(&ExampleWeights, 16).unwrap();
        assert!(ex.distinct);
        assert_eq!(ex.collision, None);
    }

    #[test]
    fn corollary_rows_kakutani_and_example() {
        let rows = corollary_check(&KakutaniWeights, 5).unwrap();
        for row in &rows {
            assert!(row.defect_sup.is_zero(), "Kakutani A_{} ≠ 0", row.n);
            assert_eq!(
                row.alpha_pow2.to_rational(),
                pow2_inv(row.n as u64),
                "α_{{2^{}}}",
                row.n
            );
        }

        let rows = corollary_check(&ExampleWeights, 5).unwrap();
        assert!(rows[0].defect_sup.is_zero(), "A_1 = 0 (only the middle k)");
        for row in &rows[1..] {
            // A_n = 3^{−(2^{n−1}+1)}: the sup of 3^{−(2^n−k)} over k < 2^{n−1}.
            let expected = ExactScalar::pow_sum(None, vec![(1u64 << (row.n - 1)) + 1]);
            assert_eq!(row.defect_sup, expected, "A_{}", row.n);
        }
    }

    #[test]
    fn corollary_constant_sequence_violates_decay() {
        let ones = FileSequence::new("const", vec![r(1, 1); 8]).unwrap();
        let rows = corollary_check(&ones, 3).unwrap();
        assert_eq!(rows[2].alpha_pow2.to_rational(), r(1, 1));
        assert!(rows.iter().all(|row| row.defect_sup.is_zero()));
    }

    #[test]
    fn accumulation_kakutani_contract() {
        // Prefix 2^10: multiplicity of 2^-m is 2^{10-m-1} for m < 10.
        let report = accumulation_analysis(&KakutaniWeights, 1 << 10, 1e-6).unwrap();
        for m in 0..10u64 {
            let center = pow2_inv(m);
            let cluster = report
                .clusters
                .iter()
                .find(|c| c.center == center)
                .unwrap_or_else(|| panic!("no cluster at 2^-{m}"));
            assert_eq!(
                cluster.multiplicity_at_prefix,
                1 << (10 - m - 1),
                "multiplicity of 2^-{m}"
            );
            assert!(cluster.accumulating, "2^-{m} must accumulate");
        }
        let half = report
            .clusters
            .iter()
            .find(|c| c.center == r(1, 2))
            .expect("cluster at 1/2");
        assert_eq!(half.multiplicity_at_prefix, 256);
    }

    #[test]
    fn accumulation_growing_cluster_near_one() {
        // n/(n+1) with tol 1e-3: one growing cluster near 1 swallows the tail.
        let values: Vec<Rational> = (1..=2000i64).map(|n| r(n, n + 1)).collect();
        let seq = FileSequence::new("ratio", values).unwrap();
        let report = accumulation_analysis(&seq, 1000, 1e-3).unwrap();
        let growing: Vec<&Cluster> = report.clusters.iter().filter(|c| c.accumulating).collect();
        assert_eq!(growing.len(), 1, "exactly one growing cluster");
        assert!(growing[0].max < r(1, 1));
        assert!(growing[0].max > r(99, 100), "cluster sits near 1");
    }

    #[test]
    fn accumulation_rejects_bad_tol() {
        assert!(accumulation_analysis(&KakutaniWeights, 16, 0.0).is_err());
        assert!(accumulation_analysis(&KakutaniWeights, 16, -1.0).is_err());
        assert!(accumulation_analysis(&KakutaniWeights, 16, f64::NAN).is_err());
    }

    #[test]
    fn file_sequence_bounds() {
        let seq = FileSequence::new("f", vec![r(1, 1), r(1, 2)]).unwrap();
        assert_eq!(seq.eval(2).unwrap(), r(1, 2));
        assert!(seq.eval(3).is_err());
        assert!(seq.eval(0).is_err());
        assert!(FileSequence::new("f", vec![]).is_err());
        assert!(FileSequence::new("f", vec![r(-1, 2)]).is_err());
    }

    #[test]
    fn registry_resolves_generators() {
        assert_eq!(sequence_by_spec("kakutani").unwrap().name(), "kakutani");
        assert_eq!(sequence_by_spec("example").unwrap().name(), "example");
        assert!(sequence_by_spec("nonsense").is_err());
    }

    proptest! {
        /// Determinism: two evaluations agree exactly, and the scalar form
        /// matches the rational form.  (Index range kept modest: this is the
        /// one property that materializes full rationals.)
        #[test]
        fn generators_are_deterministic(n in 1u64..2_000) {
            let kak = KakutaniWeights;
            prop_assert_eq!(kak.eval(n).unwrap(), kak.eval(n).unwrap());
            prop_assert_eq!(kak.eval_scalar(n).unwrap().to_rational(), kak.eval(n).unwrap());

            let ex = ExampleWeights;
            prop_assert_eq!(ex.eval(n).unwrap(), ex.eval(n).unwrap());
            prop_assert_eq!(ex.eval_scalar(n).unwrap().to_rational(), ex.eval(n).unwrap());
        }

        /// The example weights dominate their chain terminal: α_n ≥ 2^{-⌊log₂ n⌋}.
        #[test]
        fn example_dominates_dyadic_floor(n in 1u64..50_000) {
            let ex = ExampleWeights;
            let floor = pow2_inv(n.ilog2() as u64);
            prop_assert!(ex.eval_scalar(n).unwrap().cmp_rational(&floor) != std::cmp::Ordering::Less);
        }
    }
}
