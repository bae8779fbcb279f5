//! Exact scalars of the form 2^-d + Σᵢ 3^-tᵢ.
//!
//! Weight values of the built-in generators are sums of a single dyadic part
//! and finitely many powers of 1/3 (indices of the perturbation terms).  At
//! certificate scale the 3-exponents reach ~2·10⁶, so the plain rational
//! representation of a single weight would occupy megabits; materializing it
//! is pointless because every inequality the pipeline needs can be decided
//! exactly from the exponents alone.
//!
//! Comparisons use the safe integer bracketing
//!
//! ```text
//!   84/53  <  log₂ 3  <  485/306        (width 1/16218 per unit exponent)
//! ```
//!
//! so `3^-t ∈ [2^-U(t), 2^-L(t)]` with `L(t) = ⌊84 t / 53⌋` and
//! `U(t) = ⌈485 t / 306⌉`.  Whenever a bracket test cannot separate two
//! values the code falls back to full rational arithmetic, which is always
//! correct and only expensive for adversarial inputs that never arise from
//! the generators.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{CoreError, Rational, Result};

/// Pure-dyadic sums this small are canonicalized to `Rational`.
const DYADIC_RATIONALIZE_LIMIT: u64 = 4096;
/// Mixed-sign differences with exponents beyond this cannot be flattened.
const FLATTEN_LIMIT: u64 = 100_000;

// ---------------------------------------------------------------------------
// Exponent bracketing
// ---------------------------------------------------------------------------

/// Largest `L` with `2^L ≤ 3^t` that the bracket certifies.
fn log2_pow3_lower(t: u64) -> u128 {
    (t as u128) * 84 / 53
}

/// Smallest `U` with `3^t ≤ 2^U` that the bracket certifies.
fn log2_pow3_upper(t: u64) -> u128 {
    ((t as u128) * 485).div_ceil(306)
}

fn pow3(t: u64) -> BigInt {
    BigInt::from(3u8).pow(t)
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << usize::try_from(e).expect("dyadic exponent exceeds address space")
}

fn pow2_rational(e: u64) -> Rational {
    Rational::new(BigInt::one(), pow2(e))
}

fn pow3_rational(t: u64) -> Rational {
    Rational::new(BigInt::one(), pow3(t))
}

/// Exact comparison of a rational against `2^-e` without constructing the
/// shifted number unless the bit lengths tie.
fn cmp_rational_pow2(r: &Rational, e: u64) -> Ordering {
    if !r.is_positive() {
        return Ordering::Less;
    }
    let p = r.numer();
    let q = r.denom();
    // r vs 2^-e  ⟺  p·2^e vs q, and bits(p·2^e) = bits(p) + e exactly.
    let shifted_bits = p.bits() as u128 + e as u128;
    match shifted_bits.cmp(&(q.bits() as u128)) {
        Ordering::Less => Ordering::Less,
        Ordering::Greater => Ordering::Greater,
        Ordering::Equal => {
            let shifted = p.clone() << usize::try_from(e).expect("exponent exceeds address space");
            shifted.cmp(q)
        }
    }
}

/// Exact comparison of `3^-t` against `2^-d`.
fn cmp_pow3_pow2(t: u64, d: u64) -> Ordering {
    // 3^-t < 2^-d ⟺ 3^t > 2^d ⟺ t·log₂3 > d.
    let d = d as u128;
    if log2_pow3_lower(t) > d {
        return Ordering::Less;
    }
    if log2_pow3_upper(t) < d {
        return Ordering::Greater;
    }
    // Razor-thin window: decide exactly.
    pow2(d as u64).cmp(&pow3(t))
}

// ---------------------------------------------------------------------------
// PowSum
// ---------------------------------------------------------------------------

/// Strictly positive value `2^-dyadic_exp + Σ 3^-t` with strictly increasing
/// `three_exps`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowSum {
    pub dyadic_exp: Option<u64>,
    pub three_exps: Vec<u64>,
}

impl PowSum {
    fn assert_canonical(&self) {
        debug_assert!(
            self.dyadic_exp.is_some() || !self.three_exps.is_empty(),
            "empty PowSum"
        );
        debug_assert!(
            self.three_exps.windows(2).all(|w| w[0] < w[1]),
            "three_exps not strictly increasing"
        );
    }

    fn to_rational(&self) -> Rational {
        self.assert_canonical();
        let mut acc = match self.dyadic_exp {
            Some(d) => pow2_rational(d),
            None => Rational::zero(),
        };
        for &t in &self.three_exps {
            acc += pow3_rational(t);
        }
        acc
    }

    /// Exact comparison against a rational. Bracket tests first, exact
    /// fallback when the brackets cannot separate.
    fn cmp_rational(&self, r: &Rational) -> Ordering {
        self.assert_canonical();
        if !r.is_positive() {
            return Ordering::Greater;
        }
        match (self.dyadic_exp, self.three_exps.first().copied()) {
            (Some(d), None) => cmp_rational_pow2(r, d).reverse(),
            (None, Some(t0)) => {
                // value ∈ [3^-t0, 1.5·3^-t0) ⊆ [2^-U(t0), 2^-(L(t0)-1)).
                if cmp_rational_pow2(r, u64::try_from(log2_pow3_upper(t0)).unwrap_or(u64::MAX))
                    == Ordering::Less
                {
                    return Ordering::Greater;
                }
                let l = log2_pow3_lower(t0);
                if l >= 1 {
                    let ub_exp = u64::try_from(l - 1).unwrap_or(u64::MAX);
                    if cmp_rational_pow2(r, ub_exp) != Ordering::Less {
                        return Ordering::Less;
                    }
                }
                self.to_rational().cmp(r)
            }
            (Some(d), Some(_)) => {
                // value > 2^-d strictly.
                if cmp_rational_pow2(r, d) != Ordering::Greater {
                    return Ordering::Greater;
                }
                // Peel the dyadic part off the bound and compare the tail.
                let tail = PowSum {
                    dyadic_exp: None,
                    three_exps: self.three_exps.clone(),
                };
                let g = r - pow2_rational(d);
                tail.cmp_rational(&g)
            }
            (None, None) => unreachable!("canonical PowSum is nonempty"),
        }
    }
}

// ---------------------------------------------------------------------------
// Signed differences (internal)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Base {
    Two,
    Three,
}

#[derive(Debug, Clone, Copy)]
struct Term {
    base: Base,
    exp: u64,
    positive: bool,
}

impl Term {
    /// Certified exponent window: magnitude ∈ [2^-hi, 2^-lo].
    fn window(&self) -> (u128, u128) {
        match self.base {
            Base::Two => (self.exp as u128, self.exp as u128),
            Base::Three => (log2_pow3_upper(self.exp), log2_pow3_lower(self.exp)),
        }
    }

    fn to_rational(self) -> Rational {
        let mag = match self.base {
            Base::Two => pow2_rational(self.exp),
            Base::Three => pow3_rational(self.exp),
        };
        if self.positive {
            mag
        } else {
            -mag
        }
    }

    fn magnitude_cmp(&self, other: &Term) -> Ordering {
        match (self.base, other.base) {
            (Base::Two, Base::Two) | (Base::Three, Base::Three) => other.exp.cmp(&self.exp),
            (Base::Three, Base::Two) => cmp_pow3_pow2(self.exp, other.exp),
            (Base::Two, Base::Three) => cmp_pow3_pow2(other.exp, self.exp).reverse(),
        }
    }
}

/// Term decomposition of a PowSum: one optional dyadic plus the 3-powers.
fn powsum_terms(p: &PowSum, positive: bool) -> Vec<Term> {
    let mut terms = Vec::new();
    if let Some(d) = p.dyadic_exp {
        terms.push(Term {
            base: Base::Two,
            exp: d,
            positive,
        });
    }
    for &t in &p.three_exps {
        terms.push(Term {
            base: Base::Three,
            exp: t,
            positive,
        });
    }
    terms
}

/// Term decomposition of a rational, when it has one: zero, or a pure dyadic
/// `2^-d`.  General rationals return `None` and take the exact slow path.
fn rational_terms(r: &Rational, positive: bool) -> Option<Vec<Term>> {
    if r.is_zero() {
        return Some(Vec::new());
    }
    if !r.is_positive() || !r.numer().is_one() {
        return None;
    }
    let denom = r.denom();
    let d = denom.bits() - 1;
    if denom.trailing_zeros() == Some(d) {
        Some(vec![Term {
            base: Base::Two,
            exp: d,
            positive,
        }])
    } else {
        None
    }
}

/// Term decomposition of a scalar, when it has one.
fn term_view(s: &ExactScalar, positive: bool) -> Option<Vec<Term>> {
    match s {
        ExactScalar::PowSum(p) => Some(powsum_terms(p, positive)),
        ExactScalar::Rational(r) => rational_terms(r, positive),
    }
}

/// Exact signed sum of ±2^-d / ±3^-t terms after cancellation.
#[derive(Debug, Clone)]
struct SignedSum {
    /// Sorted by descending magnitude.
    terms: Vec<Term>,
}

impl SignedSum {
    /// Combine positive and negative term lists, cancelling equal
    /// (base, exponent) pairs of opposite sign.  Each input list holds at
    /// most one term per (base, exponent), which the cancellation relies on.
    fn from_terms(pos: Vec<Term>, neg: Vec<Term>) -> SignedSum {
        let mut all: Vec<Term> = pos.into_iter().chain(neg).collect();
        all.sort_by_key(|t| (t.base as u8, t.exp, t.positive));
        let mut terms: Vec<Term> = Vec::with_capacity(all.len());
        let mut i = 0;
        while i < all.len() {
            if i + 1 < all.len()
                && all[i].base == all[i + 1].base
                && all[i].exp == all[i + 1].exp
                && all[i].positive != all[i + 1].positive
            {
                i += 2; // exact cancellation
            } else {
                terms.push(all[i]);
                i += 1;
            }
        }
        terms.sort_by(|a, b| b.magnitude_cmp(a));
        SignedSum { terms }
    }

    fn difference(a: &PowSum, b: &PowSum) -> SignedSum {
        SignedSum::from_terms(powsum_terms(a, true), powsum_terms(b, false))
    }

    /// Sign of the sum: Less / Equal / Greater vs zero.
    fn sign(&self) -> Ordering {
        if self.terms.is_empty() {
            return Ordering::Equal;
        }
        let lead = &self.terms[0];
        if self.dominated_by_lead() {
            return if lead.positive {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        self.to_rational().cmp(&Rational::zero())
    }

    /// True when |lead| provably exceeds the sum of all other magnitudes.
    fn dominated_by_lead(&self) -> bool {
        if self.terms.len() == 1 {
            return true;
        }
        // Single-base sums: after cancellation every exponent is distinct, so
        // the tail is a partial geometric series strictly below the lead.
        let lead = &self.terms[0];
        if self.terms.iter().all(|t| t.base == lead.base) {
            return true;
        }
        let (lead_hi, _) = lead.window();
        let (_, rest_lo) = self.terms[1].window();
        let n = (self.terms.len() - 1) as u128;
        let log_n = 128 - n.leading_zeros() as u128; // ceil(log2(n)) + 1 slack
        rest_lo > lead_hi + log_n
    }

    /// Exact |sum| vs a positive rational bound.
    fn abs_cmp_rational(&self, r: &Rational) -> Ordering {
        if self.terms.is_empty() {
            return if r.is_positive() {
                Ordering::Less
            } else if r.is_zero() {
                Ordering::Equal
            } else {
                Ordering::Greater
            };
        }
        let (lead_hi, lead_lo) = self.terms[0].window();
        if self.dominated_by_lead() {
            // |sum| ∈ [2^-(lead_hi+1), 2^-(lead_lo-1)]
            let lo_exp = lead_hi + 1;
            let hi_exp = lead_lo.saturating_sub(1);
            if cmp_rational_pow2(r, u64::try_from(lo_exp).unwrap_or(u64::MAX)) == Ordering::Less {
                return Ordering::Greater; // |sum| ≥ 2^-lo_exp > r
            }
            if cmp_rational_pow2(r, u64::try_from(hi_exp).unwrap_or(u64::MAX)) == Ordering::Greater
            {
                return Ordering::Less; // |sum| ≤ 2^-hi_exp < r
            }
        }
        self.to_rational().abs().cmp(r)
    }

    fn max_exp(&self) -> u64 {
        self.terms.iter().map(|t| t.exp).max().unwrap_or(0)
    }

    fn to_rational(&self) -> Rational {
        self.terms
            .iter()
            .map(|t| t.to_rational())
            .fold(Rational::zero(), |a, b| a + b)
    }
}

// ---------------------------------------------------------------------------
// ExactScalar
// ---------------------------------------------------------------------------

/// An exact nonnegative scalar: either a plain rational or a power sum.
///
/// Canonical form: a pure dyadic `2^-d` with `d ≤ 4096` and anything without
/// 3-terms is stored as `Rational`; everything with at least one 3-term stays
/// a `PowSum`.  Equality and ordering are value-based across variants.
#[derive(Debug, Clone)]
pub enum ExactScalar {
    Rational(Rational),
    PowSum(PowSum),
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar::Rational(Rational::zero())
    }

    pub fn from_rational(r: Rational) -> Self {
        ExactScalar::Rational(r)
    }

    /// Canonicalizing constructor from exponent data.
    pub fn pow_sum(dyadic_exp: Option<u64>, three_exps: Vec<u64>) -> Self {
        debug_assert!(three_exps.windows(2).all(|w| w[0] < w[1]));
        if three_exps.is_empty() {
            match dyadic_exp {
                None => ExactScalar::zero(),
                Some(d) if d <= DYADIC_RATIONALIZE_LIMIT => ExactScalar::Rational(pow2_rational(d)),
                Some(d) => ExactScalar::PowSum(PowSum {
                    dyadic_exp: Some(d),
                    three_exps,
                }),
            }
        } else {
            ExactScalar::PowSum(PowSum {
                dyadic_exp,
                three_exps,
            })
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExactScalar::Rational(r) => r.is_zero(),
            ExactScalar::PowSum(_) => false,
        }
    }

    /// Exact value comparison against a rational.
    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        match self {
            ExactScalar::Rational(x) => x.cmp(r),
            ExactScalar::PowSum(p) => p.cmp_rational(r),
        }
    }

    /// Exact total order on values.
    pub fn cmp_value(&self, other: &ExactScalar) -> Ordering {
        match (self, other) {
            (ExactScalar::Rational(a), ExactScalar::Rational(b)) => a.cmp(b),
            (ExactScalar::PowSum(a), ExactScalar::Rational(b)) => a.cmp_rational(b),
            (ExactScalar::Rational(a), ExactScalar::PowSum(b)) => b.cmp_rational(a).reverse(),
            (ExactScalar::PowSum(a), ExactScalar::PowSum(b)) => SignedSum::difference(a, b).sign(),
        }
    }

    /// Term views of both operands, when both decompose into power terms.
    fn paired_terms(&self, other: &ExactScalar) -> Option<SignedSum> {
        let pos = term_view(self, true)?;
        let neg = term_view(other, false)?;
        Some(SignedSum::from_terms(pos, neg))
    }

    /// Exact |self − other| as a new scalar.
    ///
    /// Fails only for mixed-sign differences whose exponents are too large to
    /// flatten into a rational — a shape the built-in generators never
    /// produce.
    pub fn abs_diff(&self, other: &ExactScalar) -> Result<ExactScalar> {
        if let Some(diff) = self.paired_terms(other) {
            return Self::from_signed(diff);
        }
        // At least one side is a general (non-dyadic) rational; those only
        // arise at desk scale, where flattening is cheap.
        let guard = |s: &ExactScalar| -> Result<()> {
            if let ExactScalar::PowSum(p) = s {
                if p.three_exps.last().copied().unwrap_or(0) > FLATTEN_LIMIT
                    || p.dyadic_exp.unwrap_or(0) > FLATTEN_LIMIT
                {
                    return Err(CoreError::invariant(
                        "abs_diff between a large power sum and a plain rational \
                         is not compactly representable",
                    ));
                }
            }
            Ok(())
        };
        guard(self)?;
        guard(other)?;
        Ok(ExactScalar::Rational(
            (self.to_rational() - other.to_rational()).abs(),
        ))
    }

    /// Exact comparison |self − other| vs a rational bound, avoiding
    /// materialization whenever the exponent windows separate.
    pub fn abs_diff_cmp_rational(&self, other: &ExactScalar, bound: &Rational) -> Ordering {
        if let Some(diff) = self.paired_terms(other) {
            return diff.abs_cmp_rational(bound);
        }
        // Exact slow path; only reachable with general rationals (desk scale).
        (self.to_rational() - other.to_rational()).abs().cmp(bound)
    }

    fn from_signed(diff: SignedSum) -> Result<ExactScalar> {
        if diff.terms.is_empty() {
            return Ok(ExactScalar::zero());
        }
        let all_positive = diff.terms.iter().all(|t| t.positive);
        let dyadic_count = diff.terms.iter().filter(|t| t.base == Base::Two).count();
        if all_positive && dyadic_count <= 1 {
            let dyadic_exp = diff
                .terms
                .iter()
                .find(|t| t.base == Base::Two)
                .map(|t| t.exp);
            let mut three_exps: Vec<u64> = diff
                .terms
                .iter()
                .filter(|t| t.base == Base::Three)
                .map(|t| t.exp)
                .collect();
            three_exps.sort_unstable();
            return Ok(ExactScalar::pow_sum(dyadic_exp, three_exps));
        }
        if diff.max_exp() > FLATTEN_LIMIT {
            return Err(CoreError::invariant(
                "mixed-sign power difference too large to flatten exactly",
            ));
        }
        Ok(ExactScalar::Rational(diff.to_rational().abs()))
    }

    /// Exact rational value. Expensive for large exponents; intended for
    /// desk-scale data and tests.
    pub fn to_rational(&self) -> Rational {
        match self {
            ExactScalar::Rational(r) => r.clone(),
            ExactScalar::PowSum(p) => p.to_rational(),
        }
    }

    /// Float approximation for display. Terms below the f64 underflow
    /// threshold contribute zero.
    pub fn to_f64(&self) -> f64 {
        match self {
            ExactScalar::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            ExactScalar::PowSum(p) => {
                let mut acc = match p.dyadic_exp {
                    Some(d) if d < 1074 => (-(d as f64)).exp2(),
                    Some(_) => 0.0,
                    None => 0.0,
                };
                for &t in &p.three_exps {
                    if t < 640 {
                        acc += (-(t as f64) * 3f64.log2()).exp2();
                    }
                }
                acc
            }
        }
    }
}

impl PartialEq for ExactScalar {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }
}

impl Eq for ExactScalar {}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_value(other)
    }
}

// ---------------------------------------------------------------------------
// Text form: "p/q" | "2^-d" | "3^-t" | sums joined with " + "
// ---------------------------------------------------------------------------

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactScalar::Rational(r) => write!(f, "{}", format_rational(r)),
            ExactScalar::PowSum(p) => {
                let mut parts = Vec::new();
                if let Some(d) = p.dyadic_exp {
                    parts.push(format!("2^-{d}"));
                }
                for &t in &p.three_exps {
                    parts.push(format!("3^-{t}"));
                }
                write!(f, "{}", parts.join(" + "))
            }
        }
    }
}

/// Render a rational as `p/q`, or just `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `p`, `p/q`, with optional sign.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |x: &str| -> Result<BigInt> {
        x.trim()
            .parse::<BigInt>()
            .map_err(|e| CoreError::Parse(format!("invalid integer `{x}`: {e}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let num = parse_int(p)?;
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(CoreError::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Rational::new(num, den))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

impl FromStr for ExactScalar {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if !s.contains('^') {
            return Ok(ExactScalar::Rational(parse_rational(s)?));
        }
        let mut dyadic_exp = None;
        let mut three_exps = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            let (base, exp) = part.split_once("^-").ok_or_else(|| {
                CoreError::Parse(format!("expected `base^-exp` term, got `{part}`"))
            })?;
            let exp: u64 = exp
                .trim()
                .parse()
                .map_err(|e| CoreError::Parse(format!("invalid exponent in `{part}`: {e}")))?;
            match base.trim() {
                "2" => {
                    if dyadic_exp.replace(exp).is_some() {
                        return Err(CoreError::Parse(format!("multiple dyadic terms in `{s}`")));
                    }
                }
                "3" => three_exps.push(exp),
                other => {
                    return Err(CoreError::Parse(format!(
                        "unsupported base `{other}` in `{s}`"
                    )))
                }
            }
        }
        three_exps.sort_unstable();
        three_exps.dedup();
        Ok(ExactScalar::pow_sum(dyadic_exp, three_exps))
    }
}

/// Serde adapter serializing rationals as canonical `p/q` strings.
/// Use as `#[serde(with = "crate::scalar::serde_rational")]`.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(
        r: &Rational,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter serializing `Vec<Rational>` as a list of `p/q` strings.
/// Use as `#[serde(with = "crate::scalar::serde_rational_vec")]`.
pub mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(
        v: &[Rational],
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(deserializer)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
