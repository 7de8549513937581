//! Root-of-unity evaluation of Grassmannian Gromov–Witten invariants and
//! maximal subbundle counts.
//!
//! For a monomial `P = ∏_l X_{a_l}` and sub-rank `k`, the invariant is
//!
//! ```text
//!   β · n^α / k! · Σ_{(ρ_1..ρ_k)} Δ(ρ) / (∏_i ρ_i · ∏_{i≠j} (ρ_i − ρ_j))^{g−1}
//! ```
//!
//! over ordered tuples of distinct n-th roots of unity, with `α = k(g−1)`,
//! `β = (−1)^{e′(k−1)}` and `Δ = ∏_l σ_{w(a_l)}(ρ)`. Written literally, the
//! prefactor is `n^{αβ}`, the root product is `∏_{i=1}^{n} ρ_i` and `Δ` is
//! indexed by both `i` and `l`; here the prefactor is the sign `β` times
//! `n^α`, the root product runs over the `k` roots of the tuple and `Δ` has
//! one factor per monomial letter.
//!
//! The published sign also carries `(−1)^{(g−1)k(k−1)/2}`. That factor turns
//! `∏_{i<j}(ρ_i − ρ_j)^2` into the ordered-pair product `∏_{i≠j}`, which the
//! denominator already uses, so applying it again flips every value with
//! `(g−1)k(k−1)/2` odd (a genus-0 point class would count −1). It is kept
//! only in [`published_sign`].
//!
//! The summand is symmetric in the roots, so the engine sums once per
//! k-subset and drops the `1/k!`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{CyclotomicError, CyclotomicNumber, RationalScalar};
use crate::subsets::{binomial, split_ranges, SubsetRange};
use crate::symfunc::{elementary_symmetric, SymfuncError};

/// How a monomial letter `X_a` maps to an elementary symmetric polynomial.
///
/// `Paper` sends `X_a` to `σ_{k−a+1}` and weighs it `k−a+1`; `Dual` sends it
/// to `σ_a` with weight `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Paper,
    Dual,
}

impl Convention {
    /// Weighted degree of `X_a`, which is also the index of its symmetric polynomial.
    pub fn weight(self, a: u32, k: u32) -> u32 {
        match self {
            Convention::Paper => k - a + 1,
            Convention::Dual => a,
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Paper => "paper",
            Convention::Dual => "dual",
        })
    }
}

impl FromStr for Convention {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper" => Ok(Convention::Paper),
            "dual" => Ok(Convention::Dual),
            other => Err(format!(
                "unknown convention {other:?} (expected paper or dual)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("degree condition violated: monomial weight {monomial_weight} but the degree condition requires {required}")]
    DegreeConditionViolated { monomial_weight: i64, required: i64 },
    #[error("bundle degree {0} must be reduced to 0 before direct evaluation")]
    UnreducedDegree(i64),
    #[error("convention miscalibration: {0}")]
    ConventionMiscalibration(CyclotomicError),
    #[error("sign exponent {0} is not an integer")]
    NonIntegralSignExponent(BigRational),
    #[error("arithmetic failure: {0}")]
    Arithmetic(CyclotomicError),
    #[error("worker pool: {0}")]
    WorkerPool(String),
}

impl From<CyclotomicError> for EngineError {
    fn from(e: CyclotomicError) -> Self {
        EngineError::Arithmetic(e)
    }
}

impl From<SymfuncError> for EngineError {
    fn from(e: SymfuncError) -> Self {
        match e {
            SymfuncError::Cyclotomic(c) => EngineError::Arithmetic(c),
            other => EngineError::InvalidQuery(other.to_string()),
        }
    }
}

/// Input to one invariant computation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InvariantQuery {
    pub n: u32,
    pub k: u32,
    pub g: u32,
    pub e_prime: i64,
    #[serde(default)]
    pub d: i64,
    #[serde(default)]
    pub monomial: Vec<u32>,
    #[serde(default)]
    pub convention: Convention,
}

/// Both sides of the degree condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeTally {
    pub monomial_weight: i64,
    pub required: i64,
}

impl InvariantQuery {
    pub fn new(n: u32, k: u32, g: u32, e_prime: i64, monomial: Vec<u32>) -> Self {
        InvariantQuery {
            n,
            k,
            g,
            e_prime,
            d: 0,
            monomial,
            convention: Convention::Paper,
        }
    }

    pub fn with_degree(mut self, d: i64) -> Self {
        self.d = d;
        self
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    /// Invariant attached to a node: the marked-point formula with rank 2.
    pub fn node(k: u32, g: u32, f_prime: i64, monomial: Vec<u32>) -> Self {
        Self::new(2, k, g, f_prime, monomial)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.k == 0 || self.k >= self.n {
            return Err(EngineError::InvalidQuery(format!(
                "need 1 <= k < n, got k = {}, n = {}",
                self.k, self.n
            )));
        }
        if let Some(&a) = self.monomial.iter().find(|&&a| a == 0 || a > self.k) {
            return Err(EngineError::InvalidQuery(format!(
                "monomial exponent {a} outside 1..={}",
                self.k
            )));
        }
        Ok(())
    }

    /// `Σ w(a_l)` against `d·k − e′·n + k(n−k)(1−g)`.
    pub fn degree_tally(&self) -> DegreeTally {
        let (n, k, g) = (self.n as i64, self.k as i64, self.g as i64);
        let monomial_weight = self
            .monomial
            .iter()
            .map(|&a| self.convention.weight(a, self.k) as i64)
            .sum();
        DegreeTally {
            monomial_weight,
            required: self.d * k - self.e_prime * n + k * (n - k) * (1 - g),
        }
    }

    /// The quotient degree `e′` that makes `monomial` admissible, if any.
    pub fn admissible_e_prime(
        n: u32,
        k: u32,
        g: u32,
        d: i64,
        monomial: &[u32],
        convention: Convention,
    ) -> Option<i64> {
        let probe = InvariantQuery {
            n,
            k,
            g,
            e_prime: 0,
            d,
            monomial: monomial.to_vec(),
            convention,
        };
        let tally = probe.degree_tally();
        let gap = tally.required - tally.monomial_weight;
        (gap % n as i64 == 0).then(|| gap / n as i64)
    }
}

/// Whether the monomial has the weighted degree the query demands.
pub fn check_admissible(q: &InvariantQuery) -> bool {
    let t = q.degree_tally();
    t.monomial_weight == t.required
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantResult {
    #[serde(serialize_with = "crate::serialize_rational")]
    pub value: RationalScalar,
    pub terms_summed: u64,
    pub integrality: bool,
}

impl InvariantResult {
    fn new(value: RationalScalar, terms_summed: u64) -> Self {
        let integrality = value.is_integer();
        InvariantResult {
            value,
            terms_summed,
            integrality,
        }
    }
}

/// Worker settings for the subset sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalOptions {
    /// Number of workers; 0 reads `VI_WORKERS` and falls back to the core count.
    pub workers: usize,
}

impl EvalOptions {
    pub fn serial() -> Self {
        EvalOptions { workers: 1 }
    }

    pub fn with_workers(workers: usize) -> Self {
        EvalOptions { workers }
    }

    pub fn resolved_workers(&self) -> usize {
        if self.workers > 0 {
            return self.workers;
        }
        std::env::var("VI_WORKERS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&w| w > 0)
            .unwrap_or_else(|| {
                std::thread::available_parallelism()
                    .map(|n| n.get())
                    .unwrap_or(1)
            })
    }
}

/// Below this many subsets the sum runs on the calling thread.
const PARALLEL_THRESHOLD: u64 = 512;
/// Fixed partition of the subset ranks; independent of the worker count.
const CHUNKS: u64 = 64;

/// Description of one root-of-unity sum
/// `Σ_S ∏_j σ_j(ρ)^{m_j} · (R(ρ) ∏_{i≠j}(ρ_i − ρ_j))^{−(g−1)}`
/// where `R` is `∏ ρ_i` or 1.
struct RootSum {
    n: u32,
    k: usize,
    /// `(j, m_j)` pairs of symmetric-polynomial index and exponent.
    factors: Vec<(usize, i64)>,
    genus_shift: i64,
    with_root_product: bool,
}

impl RootSum {
    fn evaluate(&self, opts: &EvalOptions) -> Result<CyclotomicNumber, EngineError> {
        let total = binomial(self.n as u64, self.k as u64);
        // (ζ^t − 1)(ζ^{−t} − 1), or its inverse, for t = 1..n−1
        let pair_factors = self.pair_factors()?;
        let workers = opts.resolved_workers();
        let ranges = split_ranges(total, CHUNKS);
        let run = |&(a, b): &(u64, u64)| self.sum_range(a, b, &pair_factors);
        let partials: Vec<Result<CyclotomicNumber, EngineError>> =
            if workers <= 1 || total < PARALLEL_THRESHOLD {
                ranges.iter().map(run).collect()
            } else {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .map_err(|e| EngineError::WorkerPool(e.to_string()))?;
                pool.install(|| ranges.par_iter().map(run).collect())
            };
        let mut acc = CyclotomicNumber::zero(self.n)?;
        for p in partials {
            acc = acc.try_add(&p?)?;
        }
        Ok(acc)
    }

    fn pair_factors(&self) -> Result<Vec<CyclotomicNumber>, EngineError> {
        let n = self.n;
        let one = CyclotomicNumber::one(n)?;
        let mut out = Vec::with_capacity(n as usize);
        out.push(one.clone());
        for t in 1..n as i64 {
            let a = CyclotomicNumber::zeta_pow(n, t)?.try_sub(&one)?;
            let b = CyclotomicNumber::zeta_pow(n, -t)?.try_sub(&one)?;
            let both = a.try_mul(&b)?;
            out.push(if self.genus_shift > 0 {
                both.inv()?
            } else {
                both
            });
        }
        Ok(out)
    }

    fn sum_range(
        &self,
        start: u64,
        end: u64,
        pair_factors: &[CyclotomicNumber],
    ) -> Result<CyclotomicNumber, EngineError> {
        let mut acc = CyclotomicNumber::zero(self.n)?;
        for subset in SubsetRange::new(self.n as usize, self.k, start, end) {
            let term = self.term(&subset, pair_factors)?;
            acc = acc.try_add(&term)?;
        }
        Ok(acc)
    }

    fn term(
        &self,
        subset: &[usize],
        pair_factors: &[CyclotomicNumber],
    ) -> Result<CyclotomicNumber, EngineError> {
        let n = self.n as usize;
        let k = self.k;
        // σ_j of the roots, exact in the group ring Z[x]/(x^n − 1)
        let mut sig = vec![vec![0i64; n]; k + 1];
        sig[0][0] = 1;
        for (count, &r) in subset.iter().enumerate() {
            for j in (1..=count + 1).rev() {
                let (lo, hi) = sig.split_at_mut(j);
                let prev = &lo[j - 1];
                for (e, &c) in prev.iter().enumerate() {
                    if c != 0 {
                        hi[0][(e + r) % n] += c;
                    }
                }
            }
        }
        let mut value = CyclotomicNumber::one(self.n)?;
        for &(j, m) in &self.factors {
            let s = CyclotomicNumber::from_group_ring(self.n, &sig[j])?;
            value = value.try_mul(&s.pow(m)?)?;
        }
        if self.genus_shift == 0 {
            return Ok(value);
        }
        let root_sum: i64 = subset.iter().map(|&r| r as i64).sum();
        // ∏_{i≠j}(ρ_i − ρ_j) = ζ^{(k−1)s} ∏_{i<j} (ζ^{t} − 1)(ζ^{−t} − 1), t = a_j − a_i
        let mut zeta_exp = (k as i64 - 1) * root_sum;
        if self.with_root_product {
            zeta_exp += root_sum;
        }
        let mut pairs = CyclotomicNumber::one(self.n)?;
        for (i, &a) in subset.iter().enumerate() {
            for &b in &subset[i + 1..] {
                pairs = pairs.try_mul(&pair_factors[(b - a) % n])?;
            }
        }
        let shift = self.genus_shift;
        let denom_part = pairs.pow(shift.abs())?;
        let zeta = CyclotomicNumber::zeta_pow(self.n, -zeta_exp * shift)?;
        Ok(value.try_mul(&denom_part)?.try_mul(&zeta)?)
    }
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

/// `n^α` for a possibly negative `α`.
fn power_of(n: u32, alpha: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(n));
    if alpha >= 0 {
        num_traits::pow(base, alpha as usize)
    } else {
        num_traits::pow(base.recip(), alpha.unsigned_abs() as usize)
    }
}

fn sign_from_parity(exponent: i64) -> BigRational {
    if exponent.rem_euclid(2) == 0 {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

fn to_rational(value: &CyclotomicNumber) -> Result<RationalScalar, EngineError> {
    value
        .to_rational()
        .map_err(EngineError::ConventionMiscalibration)
}

/// `∏_l σ_{w(a_l)}` grouped as `(index, multiplicity)`.
fn monomial_factors(q: &InvariantQuery) -> Vec<(usize, i64)> {
    let mut counts = vec![0i64; q.k as usize + 1];
    for &a in &q.monomial {
        counts[q.convention.weight(a, q.k) as usize] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .filter(|&(_, m)| m != 0)
        .collect()
}

fn vi_sign(q: &InvariantQuery) -> BigRational {
    sign_from_parity(q.e_prime * (q.k as i64 - 1))
}

/// The prefactor sign exactly as published, `(−1)^{e′(k−1) + (g−1)k(k−1)/2}`.
/// It differs from the sign the engine uses whenever `(g−1)k(k−1)/2` is odd.
pub fn published_sign(q: &InvariantQuery) -> BigRational {
    let (k, g) = (q.k as i64, q.g as i64);
    sign_from_parity(q.e_prime * (k - 1) + (g - 1) * k * (k - 1) / 2)
}

fn require_admissible(q: &InvariantQuery) -> Result<(), EngineError> {
    q.validate()?;
    let t = q.degree_tally();
    if t.monomial_weight != t.required {
        return Err(EngineError::DegreeConditionViolated {
            monomial_weight: t.monomial_weight,
            required: t.required,
        });
    }
    Ok(())
}

/// Evaluates a degree-zero admissible query with default worker settings.
pub fn vi_invariant(q: &InvariantQuery) -> Result<InvariantResult, EngineError> {
    vi_invariant_with(q, &EvalOptions::default())
}

pub fn vi_invariant_with(
    q: &InvariantQuery,
    opts: &EvalOptions,
) -> Result<InvariantResult, EngineError> {
    require_admissible(q)?;
    if q.d != 0 {
        return Err(EngineError::UnreducedDegree(q.d));
    }
    let sum = RootSum {
        n: q.n,
        k: q.k as usize,
        factors: monomial_factors(q),
        genus_shift: q.g as i64 - 1,
        with_root_product: true,
    }
    .evaluate(opts)?;
    let alpha = q.k as i64 * (q.g as i64 - 1);
    let value = vi_sign(q) * power_of(q.n, alpha) * to_rational(&sum)?;
    Ok(InvariantResult::new(
        value,
        binomial(q.n as u64, q.k as u64),
    ))
}

/// One summand for an ordered tuple of root exponents, computed directly
/// from the field operations with no precomputation or symmetry shortcut.
pub fn vi_term(q: &InvariantQuery, exponents: &[usize]) -> Result<CyclotomicNumber, EngineError> {
    let n = q.n;
    let roots: Vec<CyclotomicNumber> = exponents
        .iter()
        .map(|&e| CyclotomicNumber::zeta_pow(n, e as i64))
        .collect::<Result<_, _>>()?;
    let mut delta = CyclotomicNumber::one(n)?;
    for &a in &q.monomial {
        let j = q.convention.weight(a, q.k) as usize;
        delta = delta.try_mul(&elementary_symmetric(n, j, &roots)?)?;
    }
    let mut denom = CyclotomicNumber::one(n)?;
    for r in &roots {
        denom = denom.try_mul(r)?;
    }
    for (i, a) in roots.iter().enumerate() {
        for (j, b) in roots.iter().enumerate() {
            if i != j {
                denom = denom.try_mul(&a.try_sub(b)?)?;
            }
        }
    }
    let denom = denom.pow(q.g as i64 - 1)?;
    Ok(delta.try_div(&denom)?)
}

/// The unreduced form: the sum over all ordered tuples of distinct roots,
/// divided by `k!`. Exponential in `k`; meant as a cross-check.
pub fn vi_invariant_tuples(q: &InvariantQuery) -> Result<InvariantResult, EngineError> {
    require_admissible(q)?;
    if q.d != 0 {
        return Err(EngineError::UnreducedDegree(q.d));
    }
    let n = q.n as usize;
    let k = q.k as usize;
    let mut acc = CyclotomicNumber::zero(q.n)?;
    let mut tuple = Vec::with_capacity(k);
    let mut tuples = 0u64;
    fn rec(
        q: &InvariantQuery,
        n: usize,
        k: usize,
        tuple: &mut Vec<usize>,
        acc: &mut CyclotomicNumber,
        count: &mut u64,
    ) -> Result<(), EngineError> {
        if tuple.len() == k {
            *acc = acc.try_add(&vi_term(q, tuple)?)?;
            *count += 1;
            return Ok(());
        }
        for r in 0..n {
            if !tuple.contains(&r) {
                tuple.push(r);
                rec(q, n, k, tuple, acc, count)?;
                tuple.pop();
            }
        }
        Ok(())
    }
    rec(q, n, k, &mut tuple, &mut acc, &mut tuples)?;
    let alpha = q.k as i64 * (q.g as i64 - 1);
    let value = vi_sign(q) * power_of(q.n, alpha) * to_rational(&acc)?
        / BigRational::from_integer(factorial(q.k));
    Ok(InvariantResult::new(value, tuples))
}

/// Shifts the bundle degree by `n·d_L` and the quotient degree by `k·d_L`,
/// the effect of tensoring with a line bundle of degree `d_L`.
pub fn twist_reduce(q: &InvariantQuery, d_line: i64) -> InvariantQuery {
    InvariantQuery {
        d: q.d + q.n as i64 * d_line,
        e_prime: q.e_prime + q.k as i64 * d_line,
        ..q.clone()
    }
}

/// `(a, b)` with `d = a·n − b` and `0 <= b < n`.
pub fn degree_split(d: i64, n: u32) -> (i64, i64) {
    let n = n as i64;
    let b = (-d).rem_euclid(n);
    ((d + b) / n, b)
}

/// Rewrites a query of bundle degree `d = a·n − b` as the degree-zero query
/// with `e′ − a·k` and `b` extra letters `X_k`.
pub fn degree_reduce(q: &InvariantQuery) -> Result<Vec<InvariantQuery>, EngineError> {
    q.validate()?;
    if q.d == 0 {
        return Ok(vec![q.clone()]);
    }
    let (a, b) = degree_split(q.d, q.n);
    let mut monomial = q.monomial.clone();
    monomial.extend(std::iter::repeat_n(q.k, b as usize));
    let reduced = InvariantQuery {
        d: 0,
        e_prime: q.e_prime - a * q.k as i64,
        monomial,
        ..q.clone()
    };
    require_admissible(&reduced)?;
    Ok(vec![reduced])
}

/// Degree reduction followed by evaluation of every factor.
pub fn evaluate(q: &InvariantQuery, opts: &EvalOptions) -> Result<InvariantResult, EngineError> {
    let factors = degree_reduce(q)?;
    let mut value = BigRational::one();
    let mut terms = 0;
    for f in &factors {
        let r = vi_invariant_with(f, opts)?;
        value *= r.value;
        terms += r.terms_summed;
    }
    Ok(InvariantResult::new(value, terms))
}

/// Number of maximal-degree rank-k subbundles of a general rank-n bundle of
/// degree `d` over a genus-g curve:
///
/// ```text
///   β · n^α / k! · Σ_S Δ^{b−g+1} / (∏_{i≠j} (ρ_i − ρ_j))^{g−1}
/// ```
///
/// with `d = a·n − b`, `α = k(g−1)`, `β = (−1)^{(k−1)(bk − (g−1)k²/n)}` and
/// `Δ` the image of `X_k` (`σ_k` under `Dual`, `σ_1` under `Paper`).
pub fn count_maximal(
    n: u32,
    d: i64,
    k: u32,
    g: u32,
    convention: Convention,
    opts: &EvalOptions,
) -> Result<InvariantResult, EngineError> {
    if k == 0 || k >= n {
        return Err(EngineError::InvalidQuery(format!(
            "need 1 <= k < n, got k = {k}, n = {n}"
        )));
    }
    let (_, b) = degree_split(d, n);
    let (ki, gi, ni) = (k as i64, g as i64, n as i64);
    let exponent = BigRational::from_integer(BigInt::from(ki - 1))
        * (BigRational::from_integer(BigInt::from(b * ki))
            - BigRational::new(BigInt::from((gi - 1) * ki * ki), BigInt::from(ni)));
    if !exponent.is_integer() {
        return Err(EngineError::NonIntegralSignExponent(exponent));
    }
    let parity = exponent.to_integer().is_odd();
    let sign = if parity {
        -BigRational::one()
    } else {
        BigRational::one()
    };
    let delta_index = convention.weight(k, k) as usize;
    let sum = RootSum {
        n,
        k: k as usize,
        factors: vec![(delta_index, b - gi + 1)],
        genus_shift: gi - 1,
        with_root_product: false,
    }
    .evaluate(opts)?;
    let value = sign * power_of(n, ki * (gi - 1)) * to_rational(&sum)?;
    Ok(InvariantResult::new(value, binomial(n as u64, k as u64)))
}
