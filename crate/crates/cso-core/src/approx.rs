//! The truncate-and-reverse approximation pipeline with exact certification.
//!
//! An irreducible weighted shift is never complex symmetric, but when its
//! weights admit good *cut points* — indices c where α_c is tiny and the
//! prefix is nearly palindromic about c — the shift is a norm limit of
//! complex symmetric operators, and the approximants are explicit.  This
//! module computes them and proves it did so correctly:
//!
//! 1. [`find_n`] locates the first index N with 0 < α_N < ε/4.
//! 2. [`build_plan`] runs the index recursion: with m₋₁ = 0 and
//!    m₀ = m₁ = N, each round k asks a [`COracle`] for a cut point
//!    c_k = c(3·m_{2k}, δ_k) and extends
//!    `m_{2k+3} = c_k − m_{2k−1}`, `m_{2k+2} = c_k − m_{2k}`, where
//!    δ_k = ⅛·min{α_1, …, α_{3m_{2k}}, ε/2^k}.  Every oracle answer is
//!    re-verified exactly; the finished plan must be strictly increasing and
//!    satisfy the conservation identity `m_{2k+2} + m_{2k} = m_{2k+3} +
//!    m_{2k−1} = c_k` and the doubling bound `2·m_{2k} ≤ m_{2k+2}`.
//! 3. [`build_t_prime`] zeroes the weights at the plan indices, splitting the
//!    prefix into finite blocks A_1, A_2, … ([`build_blocks`]), at operator
//!    distance max_k α_{m_k} < ε/2 from the original.
//! 4. [`assemble_t_double_prime`] replaces each even-indexed block A_{2k}
//!    (including the leading A_1 slot, playing the role of A_0) by the weight
//!    reversal A′_{2k+3} of a later odd block.  The pair identity
//!    `(m_{2k+3} − ℓ) + (m_{2k−1} + ℓ) = c_k` makes each replacement a
//!    perturbation below δ_k, and the result pairs into palindromic summands
//!    A_{2k+3} ⊕ A′_{2k+3} — each a complex symmetric truncation.
//!
//! [`certify`] runs the whole pipeline and records every verified bound in an
//! [`ApproxCertificate`]; [`verify_certificate`] re-checks a deserialized
//! certificate against raw weights, trusting nothing but the sequence itself.
//!
//! All arithmetic on weight values goes through [`ExactScalar`], so
//! certification works at horizons where the underlying rationals could
//! never be materialized.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::NearMiss;
use crate::scalar::{format_rational, ExactScalar};
use crate::shift::FiniteShiftBlock;
use crate::weights::{WeightSequence, DEFAULT_SCAN_LIMIT};
use crate::{ratio_int, CoreError, Rational, Result};

/// Default cap for the linear search for N (the first index with
/// 0 < α_N < ε/4).
pub const DEFAULT_N_SEARCH_CAP: u64 = 10_000_000;

/// Maximum number of entries any pipeline type will materialize as plain
/// rationals.  Beyond this, use the scalar accessors; the structural types
/// stay O(K) regardless of horizon.
pub const MATERIALIZE_LIMIT: u64 = 1 << 17;

/// Hard ceiling on rounds; keeps every index comfortably inside u64 and the
/// verification workload finite.
pub const MAX_ROUNDS: u32 = 24;

/// Certificate document version.
pub const CERTIFICATE_SCHEMA_VERSION: u32 = 1;

/// Verification mode recorded when every inequality was checked with exact
/// rational arithmetic (the only mode the built-in generators ever produce).
pub const VERIFICATION_EXACT: &str = "exactly verified";

/// Work budget (in per-index scalar operations) for verifying one
/// certificate; guards the verifier against adversarially inflated plans.
const VERIFY_WORK_BUDGET: u64 = 1 << 25;

// ---------------------------------------------------------------------------
// Cut-point oracles
// ---------------------------------------------------------------------------

/// Where an oracle's answers come from; recorded in certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleProvenance {
    /// Closed-form powers of two, exact for the Kakutani sequence.
    ExactKakutani,
    /// Linear scan with exact re-verification, valid for any sequence.
    Scan,
    /// Caller-supplied answers (still re-verified before use).
    User,
}

impl OracleProvenance {
    /// Stable lower-case label, matching the serialized form.
    pub fn as_str(&self) -> &'static str {
        match self {
            OracleProvenance::ExactKakutani => "exact_kakutani",
            OracleProvenance::Scan => "scan",
            OracleProvenance::User => "user",
        }
    }
}

impl std::fmt::Display for OracleProvenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A cut-point oracle: given an index n and a tolerance ε, produce c ≥ n with
/// 0 < α_c < ε and |α_j − α_{c−j}| < ε for 1 ≤ j ≤ n.
///
/// The pipeline never trusts an oracle: every answer passes through
/// [`verify_oracle_answer`] before it is used.
pub trait COracle: Send + Sync {
    /// Provenance label recorded in certificates built with this oracle.
    fn provenance(&self) -> OracleProvenance;

    /// Produce a candidate cut point for (n, eps) over `seq`.
    fn query(&self, seq: &dyn WeightSequence, n: u64, eps: &Rational) -> Result<u64>;
}

/// Closed-form oracle for the Kakutani sequence: the smallest power of two
/// beyond n that is itself below ε.  Prefixes of length 2^m − 1 are exact
/// palindromes, so the pair condition holds with defect exactly zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct KakutaniOracle;

impl COracle for KakutaniOracle {
    fn provenance(&self) -> OracleProvenance {
        OracleProvenance::ExactKakutani
    }

    fn query(&self, _seq: &dyn WeightSequence, n: u64, eps: &Rational) -> Result<u64> {
        kakutani_oracle(n, eps)
    }
}

/// Generic oracle: linear scan for the first admissible cut point, with every
/// candidate checked exactly.
#[derive(Debug, Clone, Copy)]
pub struct ScanOracle {
    /// Largest index the scan will visit.
    pub search_limit: u64,
}

impl Default for ScanOracle {
    fn default() -> Self {
        ScanOracle {
            search_limit: DEFAULT_SCAN_LIMIT,
        }
    }
}

impl COracle for ScanOracle {
    fn provenance(&self) -> OracleProvenance {
        OracleProvenance::Scan
    }

    fn query(&self, seq: &dyn WeightSequence, n: u64, eps: &Rational) -> Result<u64> {
        scan_oracle(seq, n, eps, self.search_limit)
    }
}

/// Smallest power of two c = 2^m with c > n and 2^−m < eps.
///
/// This is the exact cut point for the Kakutani sequence α_n = 2^{−v₂(n)}:
/// α_c = 2^−m and the length-(c−1) prefix is a palindrome, so all pair
/// defects vanish identically.
pub fn kakutani_oracle(n: u64, eps: &Rational) -> Result<u64> {
    if n == 0 {
        return Err(CoreError::domain("oracle index n must be ≥ 1"));
    }
    if *eps <= Rational::from_integer(0.into()) {
        return Err(CoreError::domain("oracle tolerance eps must be positive"));
    }
    for m in 0..63u32 {
        let c = 1u64 << m;
        let value = Rational::new(1.into(), (1u64 << m).into());
        if c > n && value < *eps {
            return Ok(c);
        }
    }
    Err(CoreError::SearchExhausted {
        limit: 1 << 62,
        near_miss: None,
    })
}

/// `0 < α_c < eps`, exactly.
fn value_window(seq: &dyn WeightSequence, c: u64, eps: &Rational) -> Result<bool> {
    let v = seq.eval_scalar(c)?;
    Ok(!v.is_zero() && v.cmp_rational(eps) == Ordering::Less)
}

/// Exact check of the pair condition |α_j − α_{c−j}| < eps for 1 ≤ j ≤ n.
///
/// Returns `None` when every pair passes, otherwise the worst violating pair
/// (index j and exact defect).  A candidate with c = n fails outright: the
/// pair j = n would need the nonexistent index 0.
fn pair_condition(
    seq: &dyn WeightSequence,
    n: u64,
    eps: &Rational,
    c: u64,
) -> Result<Option<(u64, ExactScalar)>> {
    let mut worst: Option<(u64, ExactScalar)> = None;
    for j in 1..=n {
        let Some(mirror) = c.checked_sub(j).filter(|&m| m >= 1) else {
            return Ok(Some((j, seq.eval_scalar(j)?)));
        };
        if seq.abs_diff_lt(j, mirror, eps)? {
            continue;
        }
        let defect = seq.abs_diff_scalar(j, mirror)?;
        let beats = worst
            .as_ref()
            .map(|(_, w)| defect.cmp_value(w) == Ordering::Greater)
            .unwrap_or(true);
        if beats {
            worst = Some((j, defect));
        }
    }
    Ok(worst)
}

/// Linear scan for the first c in [max(n, 2), search_limit] satisfying the
/// full cut-point contract, with exact verification of every candidate.
///
/// On failure, the error carries the best near-miss: the first candidate
/// whose value landed in (0, eps) but whose worst pair defect was too large.
/// Running off the end of a finite sequence ends the scan early.
pub fn scan_oracle(
    seq: &dyn WeightSequence,
    n: u64,
    eps: &Rational,
    search_limit: u64,
) -> Result<u64> {
    if n == 0 {
        return Err(CoreError::domain("oracle index n must be ≥ 1"));
    }
    if *eps <= Rational::from_integer(0.into()) {
        return Err(CoreError::domain("oracle tolerance eps must be positive"));
    }
    if search_limit < n {
        return Err(CoreError::domain(format!(
            "search_limit {search_limit} is below the oracle index n = {n}"
        )));
    }
    let mut near_miss: Option<NearMiss> = None;
    let mut scanned_to = search_limit;
    for c in n.max(2)..=search_limit {
        let in_window = match value_window(seq, c, eps) {
            Ok(b) => b,
            // A finite sequence ends here; report how far we actually got.
            Err(CoreError::Domain(_)) => {
                scanned_to = c - 1;
                break;
            }
            Err(e) => return Err(e),
        };
        if !in_window {
            continue;
        }
        match pair_condition(seq, n, eps, c)? {
            None => return Ok(c),
            Some((j, defect)) => {
                if near_miss.is_none() {
                    near_miss = Some(NearMiss {
                        index: c,
                        value_in_range: true,
                        worst_pair_defect: Some(format!("{defect} (at j = {j})")),
                    });
                }
            }
        }
    }
    Err(CoreError::SearchExhausted {
        limit: scanned_to,
        near_miss,
    })
}

/// Re-verify an oracle answer against the full contract:
/// c ≥ n, 0 < α_c < eps, and |α_j − α_{c−j}| < eps for 1 ≤ j ≤ n.
///
/// The returned error names the specific inequality that failed.
pub fn verify_oracle_answer(
    seq: &dyn WeightSequence,
    n: u64,
    eps: &Rational,
    c: u64,
) -> Result<()> {
    let contract = |detail: String| CoreError::OracleContract {
        c,
        n,
        eps: format_rational(eps),
        detail,
    };
    if c < n {
        return Err(contract(format!("c = {c} violates c ≥ n = {n}")));
    }
    if !value_window(seq, c, eps)? {
        return Err(contract(format!(
            "α_c = {} is not inside (0, {})",
            seq.eval_scalar(c)?,
            format_rational(eps)
        )));
    }
    if let Some((j, defect)) = pair_condition(seq, n, eps, c)? {
        return Err(contract(format!(
            "pair defect |α_{j} − α_{}| = {defect} is not < {}",
            c - j,
            format_rational(eps)
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Index plan
// ---------------------------------------------------------------------------

/// Smallest index N with 0 < α_N < ε/4 (strict), scanning up to `cap`.
///
/// On exhaustion the error's near-miss records the index of the smallest
/// positive weight seen.  A finite sequence ends the scan at its last index.
pub fn find_n(seq: &dyn WeightSequence, eps: &Rational, cap: u64) -> Result<u64> {
    if *eps <= Rational::from_integer(0.into()) {
        return Err(CoreError::domain("eps must be positive"));
    }
    if cap == 0 {
        return Err(CoreError::domain("search cap must be ≥ 1"));
    }
    let bound = eps / ratio_int(4);
    let mut best: Option<(u64, ExactScalar)> = None;
    let mut limit = cap;
    for n in 1..=cap {
        let v = match seq.eval_scalar(n) {
            Ok(v) => v,
            Err(CoreError::Domain(_)) => {
                limit = n - 1;
                break;
            }
            Err(e) => return Err(e),
        };
        if v.is_zero() {
            continue;
        }
        if v.cmp_rational(&bound) == Ordering::Less {
            return Ok(n);
        }
        let better = best
            .as_ref()
            .map(|(_, b)| v.cmp_value(b) == Ordering::Less)
            .unwrap_or(true);
        if better {
            best = Some((n, v));
        }
    }
    Err(CoreError::SearchExhausted {
        limit,
        near_miss: best.map(|(index, _)| NearMiss {
            index,
            value_in_range: false,
            worst_pair_defect: None,
        }),
    })
}

/// The index recursion's output: N, the cut indices m₋₁..m_{2K+1}, the oracle
/// answers c_k, and the tolerances δ_k the oracle was held to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexPlan {
    /// N: first index with 0 < α_N < ε/4.
    pub n0: u64,
    /// m₋₁, m₀, m₁, …, m_{2K+1}; `m[k + 1]` holds m_k.
    pub m: Vec<u64>,
    /// Oracle answers c_k for k = 0..K−1.
    pub c: Vec<u64>,
    /// Tolerances δ_k = ⅛·min{α_1, …, α_{3m_{2k}}, ε/2^k}.
    #[serde(with = "crate::scalar::serde_rational_vec")]
    pub delta: Vec<Rational>,
}

impl IndexPlan {
    /// Number of completed rounds K.
    pub fn rounds(&self) -> u32 {
        self.c.len() as u32
    }

    /// m_k for −1 ≤ k ≤ 2K+1.
    ///
    /// # Panics
    /// If k is outside the plan's range; call [`IndexPlan::validate`] first
    /// on untrusted plans.
    pub fn m_at(&self, k: i64) -> u64 {
        self.m[usize::try_from(k + 1).expect("plan index k must be ≥ −1")]
    }

    /// Last planned index m_{2K+1}: the certified prefix length.
    pub fn horizon(&self) -> u64 {
        *self.m.last().expect("plan always holds m₋₁")
    }

    /// The indices zeroed by the truncation: m₀, m₁, …, m_{2K+1}, deduplicated
    /// (m₀ = m₁ coincide), in increasing order.
    pub fn zero_positions(&self) -> Vec<u64> {
        let mut v = self.m[1..].to_vec();
        v.dedup();
        v
    }

    /// Structural validation: shape, m₋₁ = 0, m₀ = m₁ = N ≥ 1, strict
    /// increase from m₁ on, the conservation identity
    /// m_{2k+2} + m_{2k} = m_{2k+3} + m_{2k−1} = c_k, the doubling bound
    /// 2·m_{2k} ≤ m_{2k+2}, and positive tolerances.
    ///
    /// Violations come back as certificate errors in the `plan` field; the
    /// builder maps them to internal-invariant errors.
    pub fn validate(&self) -> Result<()> {
        let fail = |detail: String| CoreError::certificate("plan", detail);
        let rounds = self.c.len();
        if rounds == 0 {
            return Err(fail("plan has no rounds".into()));
        }
        if rounds > MAX_ROUNDS as usize {
            return Err(fail(format!("plan has {rounds} rounds; max {MAX_ROUNDS}")));
        }
        if self.delta.len() != rounds {
            return Err(fail(format!(
                "delta holds {} entries; expected one per round ({rounds})",
                self.delta.len()
            )));
        }
        if self.m.len() != 2 * rounds + 3 {
            return Err(fail(format!(
                "m holds {} entries; expected 2K+3 = {}",
                self.m.len(),
                2 * rounds + 3
            )));
        }
        if self.m[0] != 0 {
            return Err(fail(format!("m₋₁ = {}; must be 0", self.m[0])));
        }
        if self.n0 == 0 {
            return Err(fail("N must be ≥ 1".into()));
        }
        if self.m[1] != self.n0 || self.m[2] != self.n0 {
            return Err(fail(format!(
                "m₀ = {}, m₁ = {}; both must equal N = {}",
                self.m[1], self.m[2], self.n0
            )));
        }
        for w in self.m[2..].windows(2) {
            if w[0] >= w[1] {
                return Err(fail(format!(
                    "m must increase strictly from m₁ on; found {} ≥ {}",
                    w[0], w[1]
                )));
            }
        }
        for (k, delta) in self.delta.iter().enumerate() {
            if *delta <= Rational::from_integer(0.into()) {
                return Err(fail(format!(
                    "δ_{k} = {} is not positive",
                    format_rational(delta)
                )));
            }
        }
        for k in 0..rounds as i64 {
            let c = self.c[k as usize];
            let even = self
                .m_at(2 * k + 2)
                .checked_add(self.m_at(2 * k))
                .ok_or_else(|| fail("index overflow in conservation check".into()))?;
            let odd = self
                .m_at(2 * k + 3)
                .checked_add(self.m_at(2 * k - 1))
                .ok_or_else(|| fail("index overflow in conservation check".into()))?;
            if even != c || odd != c {
                return Err(fail(format!(
                    "conservation identity broken at round {k}: \
                     m_{} + m_{} = {even}, m_{} + m_{} = {odd}, c_{k} = {c}",
                    2 * k + 2,
                    2 * k,
                    2 * k + 3,
                    2 * k - 1
                )));
            }
            let doubled = self
                .m_at(2 * k)
                .checked_mul(2)
                .ok_or_else(|| fail("index overflow in doubling check".into()))?;
            if doubled > self.m_at(2 * k + 2) {
                return Err(fail(format!(
                    "doubling bound broken at round {k}: 2·m_{} = {doubled} > m_{} = {}",
                    2 * k,
                    2 * k + 2,
                    self.m_at(2 * k + 2)
                )));
            }
        }
        Ok(())
    }
}

/// δ_k = ⅛·min{α_1, …, α_{3m_{2k}}, ε/2^k}.
fn round_tolerance(
    seq: &dyn WeightSequence,
    eps: &Rational,
    k: u32,
    three_m2k: u64,
) -> Result<Rational> {
    let prefix_min = seq.prefix_min(three_m2k)?;
    let eps_k = eps / ratio_int(1i64 << k);
    Ok(std::cmp::min(prefix_min, eps_k) / ratio_int(8))
}

/// Run the index recursion for `rounds` rounds with the default N-search cap.
pub fn build_plan(
    oracle: &dyn COracle,
    seq: &dyn WeightSequence,
    eps: &Rational,
    rounds: u32,
) -> Result<IndexPlan> {
    build_plan_with_cap(oracle, seq, eps, rounds, DEFAULT_N_SEARCH_CAP)
}

/// Run the index recursion with an explicit N-search cap.
///
/// Every oracle answer is re-verified against the full contract before use;
/// the finished plan is structurally validated and any failure is loud.
pub fn build_plan_with_cap(
    oracle: &dyn COracle,
    seq: &dyn WeightSequence,
    eps: &Rational,
    rounds: u32,
    n_search_cap: u64,
) -> Result<IndexPlan> {
    if rounds == 0 {
        return Err(CoreError::domain("at least one round is required"));
    }
    if rounds > MAX_ROUNDS {
        return Err(CoreError::domain(format!(
            "rounds = {rounds} exceeds the maximum {MAX_ROUNDS}"
        )));
    }
    let n0 = find_n(seq, eps, n_search_cap)?;
    let mut m = vec![0u64, n0, n0];
    let mut c_list = Vec::with_capacity(rounds as usize);
    let mut delta_list = Vec::with_capacity(rounds as usize);
    for k in 0..rounds {
        // m[...] indexing: m_j lives at m[j + 1].
        let m_2k = m[2 * k as usize + 1];
        let m_prev_odd = m[2 * k as usize]; // m_{2k−1}
        let query_n = m_2k
            .checked_mul(3)
            .ok_or_else(|| CoreError::invariant(format!("3·m_{} overflows u64", 2 * k)))?;
        let delta = round_tolerance(seq, eps, k, query_n)?;
        let c = oracle.query(seq, query_n, &delta)?;
        verify_oracle_answer(seq, query_n, &delta, c)?;
        // c ≥ 3·m_{2k} ≥ m_{2k} ≥ m_{2k−1} once the contract holds.
        let m_odd = c.checked_sub(m_prev_odd).ok_or_else(|| {
            CoreError::invariant(format!("c_{k} = {c} below m_{}", 2 * k as i64 - 1))
        })?;
        let m_even = c
            .checked_sub(m_2k)
            .ok_or_else(|| CoreError::invariant(format!("c_{k} = {c} below m_{}", 2 * k)))?;
        m.push(m_even);
        m.push(m_odd);
        c_list.push(c);
        delta_list.push(delta);
    }
    let plan = IndexPlan {
        n0,
        m,
        c: c_list,
        delta: delta_list,
    };
    plan.validate()
        .map_err(|e| CoreError::invariant(format!("freshly built plan failed validation: {e}")))?;
    Ok(plan)
}

// ---------------------------------------------------------------------------
// T′: the zeroed truncation
// ---------------------------------------------------------------------------

/// The weight list β over [1, m_{2K+1}] with zeros exactly at the plan
/// indices, represented structurally (the nonzero values are the original
/// weights, looked up on demand).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TPrime {
    /// Length of the covered prefix, m_{2K+1}.
    pub horizon: u64,
    /// Sorted zeroed indices: m₀ (= m₁), m₂, …, m_{2K+1}.
    pub zero_positions: Vec<u64>,
}

/// Zero the weights at the plan's cut indices.
///
/// Checks that the sequence is strictly positive at every index it is about
/// to zero (irreducibility precondition); the ε/2 bound on the zeroed values
/// is certified later, where ε is known.
pub fn build_t_prime(seq: &dyn WeightSequence, plan: &IndexPlan) -> Result<TPrime> {
    plan.validate()
        .map_err(|e| CoreError::invariant(format!("build_t_prime got an invalid plan: {e}")))?;
    let zero_positions = plan.zero_positions();
    for &idx in &zero_positions {
        if !seq.weight_positive(idx)? {
            return Err(CoreError::domain(format!(
                "sequence `{}` is not strictly positive at index {idx}",
                seq.name()
            )));
        }
    }
    Ok(TPrime {
        horizon: plan.horizon(),
        zero_positions,
    })
}

impl TPrime {
    /// Whether index i is zeroed.
    pub fn is_zeroed(&self, i: u64) -> bool {
        self.zero_positions.binary_search(&i).is_ok()
    }

    /// β_i as an exact scalar (0 at zeroed indices, α_i elsewhere).
    pub fn weight_scalar(&self, seq: &dyn WeightSequence, i: u64) -> Result<ExactScalar> {
        if i == 0 || i > self.horizon {
            return Err(CoreError::domain(format!(
                "index {i} outside the covered prefix [1, {}]",
                self.horizon
            )));
        }
        if self.is_zeroed(i) {
            Ok(ExactScalar::zero())
        } else {
            seq.eval_scalar(i)
        }
    }

    /// Exact operator distance to the original prefix: max_k α_{m_k}.
    pub fn distance_to_original(&self, seq: &dyn WeightSequence) -> Result<ExactScalar> {
        let mut worst = ExactScalar::zero();
        for &idx in &self.zero_positions {
            let v = seq.eval_scalar(idx)?;
            if v.cmp_value(&worst) == Ordering::Greater {
                worst = v;
            }
        }
        Ok(worst)
    }

    /// The β list as plain rationals.  Guarded by [`MATERIALIZE_LIMIT`]:
    /// beyond it, use [`TPrime::weight_scalar`].
    pub fn materialize(&self, seq: &dyn WeightSequence) -> Result<Vec<Rational>> {
        guard_materialize(self.horizon, "T′ weight list")?;
        let mut out = Vec::with_capacity(self.horizon as usize);
        for i in 1..=self.horizon {
            if self.is_zeroed(i) {
                out.push(ratio_int(0));
            } else {
                out.push(seq.eval(i)?);
            }
        }
        Ok(out)
    }
}

fn guard_materialize(len: u64, what: &str) -> Result<()> {
    if len > MATERIALIZE_LIMIT {
        return Err(CoreError::Resource {
            completed: 0,
            detail: format!(
                "{what} spans {len} weights, above the materialization limit \
                 {MATERIALIZE_LIMIT}; use the scalar accessors instead"
            ),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Blocks
// ---------------------------------------------------------------------------

/// One summand A_j of T′ = ⊕ A_j, stored as an index range: the block carries
/// weights α_{lo+1}, …, α_{hi−1} followed by the zero column at hi.
///
/// A_1 spans (0, m₁) — the leading block absorbs the coinciding zero at
/// m₀ = m₁ and doubles as A_0 in the pairing formulas.  A_j spans
/// (m_{j−1}, m_j) for j ≥ 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSpec {
    /// Block number j ≥ 1.
    pub index: u32,
    /// Exclusive lower index bound.
    pub lo: u64,
    /// The zeroed index terminating the block.
    pub hi: u64,
}

impl BlockSpec {
    /// Matrix dimension: weight count plus the zero column.
    pub fn size(&self) -> u64 {
        self.hi - self.lo
    }

    /// Number of (nonzero) weights.
    pub fn weight_count(&self) -> u64 {
        self.size() - 1
    }

    /// Sequence index of the ℓ-th weight, 1 ≤ ℓ ≤ weight_count.
    pub fn weight_index(&self, ell: u64) -> Result<u64> {
        if ell == 0 || ell > self.weight_count() {
            return Err(CoreError::domain(format!(
                "weight offset {ell} outside [1, {}] of block A_{}",
                self.weight_count(),
                self.index
            )));
        }
        Ok(self.lo + ell)
    }

    /// Sequence index of the ℓ-th weight of the reversal A′: hi − ℓ.
    pub fn reversed_weight_index(&self, ell: u64) -> Result<u64> {
        if ell == 0 || ell > self.weight_count() {
            return Err(CoreError::domain(format!(
                "weight offset {ell} outside [1, {}] of block A′_{}",
                self.weight_count(),
                self.index
            )));
        }
        Ok(self.hi - ell)
    }

    /// The block as a concrete shift matrix (desk scale only).
    pub fn materialize(&self, seq: &dyn WeightSequence) -> Result<FiniteShiftBlock> {
        guard_materialize(self.size(), "block weight list")?;
        let mut weights = Vec::with_capacity(self.weight_count() as usize);
        for i in (self.lo + 1)..self.hi {
            weights.push(seq.eval(i)?);
        }
        FiniteShiftBlock::new(weights)
    }
}

/// Split T′ into its blocks A_1, …, A_{2K+1} and check the size identities
/// size(A_3) = size(A_1) = N and size(A_{2k+3}) = size(A_{2k}).
pub fn build_blocks(t_prime: &TPrime, plan: &IndexPlan) -> Result<Vec<BlockSpec>> {
    if t_prime.zero_positions != plan.zero_positions() || t_prime.horizon != plan.horizon() {
        return Err(CoreError::invariant(
            "T′ does not match the plan it is being split against",
        ));
    }
    let top = 2 * plan.rounds() as i64 + 1;
    let mut blocks = Vec::with_capacity(top as usize);
    blocks.push(BlockSpec {
        index: 1,
        lo: 0,
        hi: plan.m_at(1),
    });
    for j in 2..=top {
        blocks.push(BlockSpec {
            index: j as u32,
            lo: plan.m_at(j - 1),
            hi: plan.m_at(j),
        });
    }
    // Pairing size identities; A_1 doubles as A_0.
    for k in 0..plan.rounds() as usize {
        let odd = &blocks[2 * k + 2]; // A_{2k+3}
        let partner = if k == 0 {
            &blocks[0]
        } else {
            &blocks[2 * k - 1]
        }; // A_0 := A_1, else A_{2k}
        if odd.size() != partner.size() {
            return Err(CoreError::invariant(format!(
                "size(A_{}) = {} does not match size(A_{}) = {}",
                odd.index,
                odd.size(),
                partner.index,
                partner.size()
            )));
        }
    }
    Ok(blocks)
}

// ---------------------------------------------------------------------------
// T″: the assembled approximant
// ---------------------------------------------------------------------------

/// What occupies a slot of T″.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotContent {
    /// The original block stays.
    Kept,
    /// The slot holds the weight reversal A′_source of a later block.
    ReversedFrom {
        /// Index of the block whose reversal fills this slot.
        source: u32,
    },
}

/// One slot of T″: the index range of an original block position together
/// with what now occupies it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    /// Original block number j of this position.
    pub position: u32,
    /// Exclusive lower index bound.
    pub lo: u64,
    /// Terminating zeroed index.
    pub hi: u64,
    /// Occupant.
    pub content: SlotContent,
}

/// A palindromic pair of T″: the kept odd block A_{2k+3} and the slot holding
/// its reversal A′_{2k+3}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairSpan {
    /// Round k.
    pub round: u32,
    /// Slot position of the kept block A_{2k+3}.
    pub kept: u32,
    /// Slot position holding A′_{2k+3} (the leading slot for k = 0, else 2k).
    pub reversed: u32,
}

/// T″ in structural form: every weight is either an original α_i, a mirrored
/// α_{hi_source − offset}, or one of the zeros inherited from T′.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assembly {
    /// Covered prefix length (same as the plan's horizon).
    pub horizon: u64,
    /// Zeroed indices (same as T′'s).
    pub zero_positions: Vec<u64>,
    /// Slots in increasing position order.
    pub slots: Vec<Slot>,
    blocks: Vec<BlockSpec>,
}

/// Build T″ from the blocks of T′: the leading A_1 slot (standing in for
/// A_0) receives A′_3, every later even slot A_{2k} receives A′_{2k+3} when
/// that block exists within the horizon, and odd blocks are kept.  The
/// trailing even slot A_{2K} has no partner inside a K-round plan and is
/// kept; the certificate's claims never depend on it.
pub fn assemble_t_double_prime(blocks: &[BlockSpec]) -> Result<Assembly> {
    let top = blocks.len() as u32;
    if top < 3 || top.is_multiple_of(2) {
        return Err(CoreError::invariant(format!(
            "expected an odd number ≥ 3 of blocks (2K+1), got {top}"
        )));
    }
    for (i, b) in blocks.iter().enumerate() {
        if b.index != i as u32 + 1 {
            return Err(CoreError::invariant(format!(
                "block list is not contiguous at position {i}: found A_{}",
                b.index
            )));
        }
        let expected_lo = if i == 0 { 0 } else { blocks[i - 1].hi };
        if b.lo != expected_lo || b.hi <= b.lo {
            return Err(CoreError::invariant(format!(
                "block A_{} spans ({}, {}); expected to start at {expected_lo}",
                b.index, b.lo, b.hi
            )));
        }
    }
    let source_for = |j: u32| -> Option<u32> {
        let src = j + 3;
        (src <= top).then_some(src)
    };
    let mut slots = Vec::with_capacity(blocks.len());
    for b in blocks {
        let content = match b.index {
            1 => SlotContent::ReversedFrom {
                source: 3, // A_0 := A_1, so the leading slot receives A′_3
            },
            j if j % 2 == 0 => match source_for(j) {
                Some(src) => SlotContent::ReversedFrom { source: src },
                None => SlotContent::Kept,
            },
            _ => SlotContent::Kept,
        };
        if let SlotContent::ReversedFrom { source } = content {
            let src = &blocks[source as usize - 1];
            if src.size() != b.size() {
                return Err(CoreError::invariant(format!(
                    "cannot place A′_{} (size {}) into the A_{} slot (size {})",
                    source,
                    src.size(),
                    b.index,
                    b.size()
                )));
            }
        }
        slots.push(Slot {
            position: b.index,
            lo: b.lo,
            hi: b.hi,
            content,
        });
    }
    Ok(Assembly {
        horizon: blocks.last().expect("top ≥ 3").hi,
        zero_positions: blocks.iter().map(|b| b.hi).collect(),
        slots,
        blocks: blocks.to_vec(),
    })
}

impl Assembly {
    /// Number of rounds K the assembly was built for.
    pub fn rounds(&self) -> u32 {
        (self.slots.len() as u32 - 1) / 2
    }

    fn block(&self, index: u32) -> &BlockSpec {
        &self.blocks[index as usize - 1]
    }

    /// The sequence index whose weight occupies position i of T″, or `None`
    /// if position i is zeroed.
    pub fn source_index(&self, i: u64) -> Result<Option<u64>> {
        if i == 0 || i > self.horizon {
            return Err(CoreError::domain(format!(
                "index {i} outside the covered prefix [1, {}]",
                self.horizon
            )));
        }
        if self.zero_positions.binary_search(&i).is_ok() {
            return Ok(None);
        }
        // First slot with hi > i; since i is not a boundary, lo < i < hi.
        let at = self.slots.partition_point(|s| s.hi < i);
        let slot = &self.slots[at];
        debug_assert!(slot.lo < i && i < slot.hi);
        Ok(Some(match slot.content {
            SlotContent::Kept => i,
            SlotContent::ReversedFrom { source } => self.block(source).hi - (i - slot.lo),
        }))
    }

    /// The weight of T″ at position i, as an exact scalar.
    pub fn weight_scalar(&self, seq: &dyn WeightSequence, i: u64) -> Result<ExactScalar> {
        match self.source_index(i)? {
            None => Ok(ExactScalar::zero()),
            Some(src) => seq.eval_scalar(src),
        }
    }

    /// The palindromic pairs (A_{2k+3}, A′_{2k+3}) of the assembly.
    pub fn pair_spans(&self) -> Vec<PairSpan> {
        (0..self.rounds())
            .map(|k| PairSpan {
                round: k,
                kept: 2 * k + 3,
                reversed: if k == 0 { 1 } else { 2 * k },
            })
            .collect()
    }

    /// Value-level audit of the pairing: for every pair and offset, the kept
    /// block's weight must equal the mirrored weight in the reversed slot.
    /// This exercises the slot lookup on both sides with exact comparison.
    pub fn verify_paired_palindromy(&self, seq: &dyn WeightSequence) -> Result<()> {
        for pair in self.pair_spans() {
            let kept = &self.slots[pair.kept as usize - 1];
            let reversed = &self.slots[pair.reversed as usize - 1];
            let size = kept.hi - kept.lo;
            for ell in 1..size {
                let a = self.weight_scalar(seq, kept.lo + ell)?;
                let b = self.weight_scalar(seq, reversed.lo + (size - ell))?;
                if a.cmp_value(&b) != Ordering::Equal {
                    return Err(CoreError::invariant(format!(
                        "paired palindromy broken in round {}: position {} holds {a} \
                         but its mirror {} holds {b}",
                        pair.round,
                        kept.lo + ell,
                        reversed.lo + (size - ell)
                    )));
                }
            }
        }
        Ok(())
    }

    /// The logical pair lists weights(A_{2k+3}) ++ [0] ++ weights(A′_{2k+3})
    /// as plain rationals (desk scale only).  Each list is a palindrome —
    /// the two halves are exact mutual reversals — so the shift it describes
    /// is complex symmetric, witnessed by the *full-span* reversal (its two
    /// zero-separated summands need not be individually palindromic).
    pub fn paired_weight_lists(&self, seq: &dyn WeightSequence) -> Result<Vec<Vec<Rational>>> {
        let mut out = Vec::new();
        for pair in self.pair_spans() {
            let kept = &self.slots[pair.kept as usize - 1];
            let reversed = &self.slots[pair.reversed as usize - 1];
            let size = kept.hi - kept.lo;
            guard_materialize(2 * size, "paired weight list")?;
            let mut list = Vec::with_capacity(2 * size as usize - 1);
            for ell in 1..size {
                let src = self
                    .source_index(kept.lo + ell)?
                    .ok_or_else(|| CoreError::invariant("zero inside a kept block"))?;
                list.push(seq.eval(src)?);
            }
            list.push(ratio_int(0));
            for ell in 1..size {
                let src = self
                    .source_index(reversed.lo + ell)?
                    .ok_or_else(|| CoreError::invariant("zero inside a reversed slot"))?;
                list.push(seq.eval(src)?);
            }
            out.push(list);
        }
        Ok(out)
    }

    /// The T″ weight list as plain rationals (desk scale only).
    pub fn materialize(&self, seq: &dyn WeightSequence) -> Result<Vec<Rational>> {
        guard_materialize(self.horizon, "T″ weight list")?;
        let mut out = Vec::with_capacity(self.horizon as usize);
        for i in 1..=self.horizon {
            match self.source_index(i)? {
                None => out.push(ratio_int(0)),
                Some(src) => out.push(seq.eval(src)?),
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

/// A zeroed weight and its exact value (each must lie in (0, ε/2)).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroedWeight {
    /// The zeroed index m_k.
    pub index: u64,
    /// α_{m_k}, exactly.
    pub value: ExactScalar,
}

/// The exact replacement penalty of one round:
/// ‖A′_{2k+3} − A_{2k}‖ = max_ℓ |α_{m_{2k+3}−ℓ} − α_{m_{2k−1}+ℓ}|.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairBound {
    /// Round k.
    pub round: u32,
    /// The exact sup of the pair defects; must be < δ_k.
    pub bound: ExactScalar,
}

/// A machine-checkable record of one successful pipeline run: the plan, every
/// zeroed weight, every block-replacement penalty, and the resulting exact
/// distance between the original shift and the complex symmetric approximant
/// over the verified prefix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxCertificate {
    /// Document version; see [`CERTIFICATE_SCHEMA_VERSION`].
    pub schema_version: u32,
    /// Name of the weight sequence the certificate speaks about.
    pub sequence: String,
    /// Which oracle produced the cut points (informational; answers are
    /// re-verified regardless).
    pub oracle: OracleProvenance,
    /// The approximation target ε.
    #[serde(with = "crate::scalar::serde_rational")]
    pub eps: Rational,
    /// Number of rounds K.
    pub rounds: u32,
    /// The index plan.
    pub plan: IndexPlan,
    /// The zeroed weights, in increasing index order.
    pub zeroed_weights: Vec<ZeroedWeight>,
    /// One exact replacement penalty per round.
    pub pair_bounds: Vec<PairBound>,
    /// The certified prefix [1, m_{2K+1}].
    pub verified_prefix: u64,
    /// Exact ‖T − T″‖ over the verified prefix:
    /// max(zeroed values, pair bounds); always < ε/2.
    pub prefix_distance: ExactScalar,
    /// Verification mode; always [`VERIFICATION_EXACT`] for rational
    /// sequences.
    pub verification: String,
}

impl ApproxCertificate {
    /// Serialize as pretty JSON (stable field order, exact values as
    /// strings).
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| CoreError::Parse(format!("certificate serialization failed: {e}")))
    }

    /// Parse a certificate document.
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s)
            .map_err(|e| CoreError::Parse(format!("certificate deserialization failed: {e}")))
    }
}

/// Exact ‖A′_{2k+3} − A_{2k}‖ for round k of the plan.
fn pair_sup(seq: &dyn WeightSequence, plan: &IndexPlan, k: u32) -> Result<ExactScalar> {
    let k = k as i64;
    let hi = plan.m_at(2 * k + 3);
    let base = plan.m_at(2 * k - 1);
    let size = hi - plan.m_at(2 * k + 2);
    let mut sup = ExactScalar::zero();
    for ell in 1..size {
        let d = seq.abs_diff_scalar(hi - ell, base + ell)?;
        if d.cmp_value(&sup) == Ordering::Greater {
            sup = d;
        }
    }
    Ok(sup)
}

/// Run the full pipeline with the default N-search cap.
pub fn certify(
    seq: &dyn WeightSequence,
    eps: &Rational,
    rounds: u32,
    oracle: &dyn COracle,
) -> Result<ApproxCertificate> {
    certify_with_cap(seq, eps, rounds, oracle, DEFAULT_N_SEARCH_CAP)
}

/// Run the full pipeline: plan, truncate, split, assemble, and certify every
/// claimed inequality with exact arithmetic.  Fails loudly (with the exact
/// violated bound) rather than returning an unsound certificate.
pub fn certify_with_cap(
    seq: &dyn WeightSequence,
    eps: &Rational,
    rounds: u32,
    oracle: &dyn COracle,
    n_search_cap: u64,
) -> Result<ApproxCertificate> {
    let plan = build_plan_with_cap(oracle, seq, eps, rounds, n_search_cap)?;
    let t_prime = build_t_prime(seq, &plan)?;
    let blocks = build_blocks(&t_prime, &plan)?;
    let assembly = assemble_t_double_prime(&blocks)?;
    assembly.verify_paired_palindromy(seq)?;

    let half_eps = eps / ratio_int(2);
    let mut zeroed = Vec::new();
    let mut worst = ExactScalar::zero();
    for idx in plan.zero_positions() {
        let value = seq.eval_scalar(idx)?;
        if value.is_zero() {
            return Err(CoreError::domain(format!(
                "sequence `{}` is not strictly positive at zeroed index {idx}",
                seq.name()
            )));
        }
        if value.cmp_rational(&half_eps) != Ordering::Less {
            return Err(CoreError::certificate(
                "zeroed_weights",
                format!(
                    "α_{idx} = {value} is not below ε/2 = {}",
                    format_rational(&half_eps)
                ),
            ));
        }
        if value.cmp_value(&worst) == Ordering::Greater {
            worst = value.clone();
        }
        zeroed.push(ZeroedWeight { index: idx, value });
    }

    let mut pair_bounds = Vec::with_capacity(rounds as usize);
    for k in 0..rounds {
        let bound = pair_sup(seq, &plan, k)?;
        let delta = &plan.delta[k as usize];
        if bound.cmp_rational(delta) != Ordering::Less {
            return Err(CoreError::certificate(
                "pair_bounds",
                format!(
                    "round {k}: ‖A′_{} − A_{}‖ = {bound} is not below δ_{k} = {}",
                    2 * k + 3,
                    2 * k,
                    format_rational(delta)
                ),
            ));
        }
        if bound.cmp_value(&worst) == Ordering::Greater {
            worst = bound.clone();
        }
        pair_bounds.push(PairBound { round: k, bound });
    }

    if worst.cmp_rational(&half_eps) != Ordering::Less {
        return Err(CoreError::certificate(
            "prefix_distance",
            format!(
                "‖T − T″‖ = {worst} over the prefix is not below ε/2 = {}",
                format_rational(&half_eps)
            ),
        ));
    }

    Ok(ApproxCertificate {
        schema_version: CERTIFICATE_SCHEMA_VERSION,
        sequence: seq.name().to_string(),
        oracle: oracle.provenance(),
        eps: eps.clone(),
        rounds,
        verified_prefix: plan.horizon(),
        plan,
        zeroed_weights: zeroed,
        pair_bounds,
        prefix_distance: worst,
        verification: VERIFICATION_EXACT.to_string(),
    })
}

/// Independently re-check a certificate against raw weights.
///
/// Everything is recomputed from the sequence: N and its minimality, every
/// δ_k, every oracle contract (at the certified c_k), the recursion
/// identities, every zeroed value, every pair bound, and the final distance.
/// Nothing in the certificate is trusted; any mismatch is reported as a
/// certificate error naming the offending field.
pub fn verify_certificate(seq: &dyn WeightSequence, cert: &ApproxCertificate) -> Result<()> {
    fn fail(field: &str, detail: String) -> Result<()> {
        Err(CoreError::certificate(field, detail))
    }

    if cert.schema_version != CERTIFICATE_SCHEMA_VERSION {
        return fail(
            "schema_version",
            format!(
                "version {} unsupported (expected {CERTIFICATE_SCHEMA_VERSION})",
                cert.schema_version
            ),
        );
    }
    if cert.verification != VERIFICATION_EXACT {
        return fail(
            "verification",
            format!(
                "mode `{}` unsupported; this verifier audits only `{VERIFICATION_EXACT}` \
                 certificates",
                cert.verification
            ),
        );
    }
    if cert.sequence != seq.name() {
        return fail(
            "sequence",
            format!(
                "certificate speaks about `{}` but was checked against `{}`",
                cert.sequence,
                seq.name()
            ),
        );
    }
    if cert.eps <= Rational::from_integer(0.into()) {
        return fail("eps", "ε must be positive".into());
    }
    cert.plan.validate()?;
    if cert.rounds != cert.plan.rounds() {
        return fail(
            "rounds",
            format!(
                "certificate claims {} rounds but the plan ran {}",
                cert.rounds,
                cert.plan.rounds()
            ),
        );
    }

    // N: window and minimality, rescanned from scratch.
    let n0 = cert.plan.n0;
    if n0 > DEFAULT_N_SEARCH_CAP {
        return fail(
            "plan.n0",
            format!("N = {n0} exceeds the verifier's search cap {DEFAULT_N_SEARCH_CAP}"),
        );
    }
    let quarter = &cert.eps / ratio_int(4);
    let in_window = |n: u64| -> Result<bool> {
        let v = seq.eval_scalar(n)?;
        Ok(!v.is_zero() && v.cmp_rational(&quarter) == Ordering::Less)
    };
    if !in_window(n0)? {
        return fail(
            "plan.n0",
            format!("α_{n0} = {} is not inside (0, ε/4)", seq.eval_scalar(n0)?),
        );
    }
    let mut budget = VERIFY_WORK_BUDGET;
    let mut spend = |amount: u64| -> Result<()> {
        budget = budget.checked_sub(amount).ok_or(CoreError::Resource {
            completed: 0,
            detail: format!(
                "certificate verification exceeds the work budget of \
                 {VERIFY_WORK_BUDGET} scalar operations"
            ),
        })?;
        Ok(())
    };
    spend(n0)?;
    for n in 1..n0 {
        if in_window(n)? {
            return fail(
                "plan.n0",
                format!("N = {n0} is not minimal: α_{n} already lies inside (0, ε/4)"),
            );
        }
    }

    // Rounds: tolerances, oracle contracts, recursion identities.
    for k in 0..cert.plan.rounds() {
        let ik = k as i64;
        let m_2k = cert.plan.m_at(2 * ik);
        let query_n = m_2k
            .checked_mul(3)
            .ok_or_else(|| CoreError::certificate("plan", "3·m_{2k} overflows".to_string()))?;
        let delta = round_tolerance(seq, &cert.eps, k, query_n)?;
        if cert.plan.delta[k as usize] != delta {
            return fail(
                "plan.delta",
                format!(
                    "δ_{k} = {} but the recomputed tolerance is {}",
                    format_rational(&cert.plan.delta[k as usize]),
                    format_rational(&delta)
                ),
            );
        }
        let c = cert.plan.c[k as usize];
        spend(query_n)?;
        verify_oracle_answer(seq, query_n, &delta, c)
            .map_err(|e| CoreError::certificate("plan.c", format!("round {k}: {e}")))?;
        // Conservation ties m_{2k+2}, m_{2k+3} to c (already validated), so
        // the recursion holds exactly when validate() passed.
    }

    // Zeroed weights: exact indices and values.
    let expected_zeroed = cert.plan.zero_positions();
    if cert.zeroed_weights.len() != expected_zeroed.len() {
        return fail(
            "zeroed_weights",
            format!(
                "{} entries recorded; the plan zeroes {} indices",
                cert.zeroed_weights.len(),
                expected_zeroed.len()
            ),
        );
    }
    let half_eps = &cert.eps / ratio_int(2);
    let mut worst = ExactScalar::zero();
    for (zw, &idx) in cert.zeroed_weights.iter().zip(&expected_zeroed) {
        if zw.index != idx {
            return fail(
                "zeroed_weights",
                format!("recorded index {} but the plan zeroes {idx}", zw.index),
            );
        }
        let v = seq.eval_scalar(idx)?;
        if v.cmp_value(&zw.value) != Ordering::Equal {
            return fail(
                "zeroed_weights",
                format!("α_{idx} = {v} but the certificate records {}", zw.value),
            );
        }
        if v.is_zero() || v.cmp_rational(&half_eps) != Ordering::Less {
            return fail(
                "zeroed_weights",
                format!("α_{idx} = {v} is not inside (0, ε/2)"),
            );
        }
        if v.cmp_value(&worst) == Ordering::Greater {
            worst = v;
        }
    }

    // Pair bounds: recomputed exactly.
    if cert.pair_bounds.len() != cert.plan.rounds() as usize {
        return fail(
            "pair_bounds",
            format!(
                "{} entries recorded; expected one per round ({})",
                cert.pair_bounds.len(),
                cert.plan.rounds()
            ),
        );
    }
    for (k, pb) in cert.pair_bounds.iter().enumerate() {
        let k = k as u32;
        if pb.round != k {
            return fail(
                "pair_bounds",
                format!("entry {k} is labeled round {}", pb.round),
            );
        }
        let ik = k as i64;
        spend(cert.plan.m_at(2 * ik + 3) - cert.plan.m_at(2 * ik + 2))?;
        let sup = pair_sup(seq, &cert.plan, k)?;
        if sup.cmp_value(&pb.bound) != Ordering::Equal {
            return fail(
                "pair_bounds",
                format!(
                    "round {k}: recomputed ‖A′_{} − A_{}‖ = {sup} but the certificate \
                     records {}",
                    2 * k + 3,
                    2 * k,
                    pb.bound
                ),
            );
        }
        if sup.cmp_rational(&cert.plan.delta[k as usize]) != Ordering::Less {
            return fail(
                "pair_bounds",
                format!(
                    "round {k}: bound {sup} is not below δ_{k} = {}",
                    format_rational(&cert.plan.delta[k as usize])
                ),
            );
        }
        if sup.cmp_rational(&half_eps) != Ordering::Less {
            return fail(
                "pair_bounds",
                format!("round {k}: bound {sup} is not below ε/2"),
            );
        }
        if sup.cmp_value(&worst) == Ordering::Greater {
            worst = sup;
        }
    }

    if cert.verified_prefix != cert.plan.horizon() {
        return fail(
            "verified_prefix",
            format!(
                "recorded {} but the plan's horizon is {}",
                cert.verified_prefix,
                cert.plan.horizon()
            ),
        );
    }
    if cert.prefix_distance.cmp_value(&worst) != Ordering::Equal {
        return fail(
            "prefix_distance",
            format!(
                "recorded {} but the recomputed distance is {worst}",
                cert.prefix_distance
            ),
        );
    }
    if cert.prefix_distance.cmp_rational(&cert.eps) != Ordering::Less {
        return fail(
            "prefix_distance",
            format!("{} is not below ε", cert.prefix_distance),
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
