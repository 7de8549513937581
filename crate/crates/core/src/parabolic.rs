//! Numerical invariants of parabolic bundles: parabolic degree and slope,
//! s-invariants, moduli dimension of parabolic connections, residue
//! consistency and the conversion of equivariant exponents to weights.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::cyclotomic::RationalScalar;
use crate::vi_engine::{evaluate, EngineError, EvalOptions, InvariantQuery, InvariantResult};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParabolicError {
    #[error("multiplicities at point {point} sum to {sum}, expected rank {rank}")]
    MultiplicityMismatch { point: usize, sum: u32, rank: u32 },
    #[error("weights at point {point} must be strictly increasing in [0, 1)")]
    BadWeights { point: usize },
    #[error("multiplicities must be positive (point {point})")]
    ZeroMultiplicity { point: usize },
    #[error("rank must be positive")]
    ZeroRank,
    #[error("subbundle rank {sub} must satisfy 0 < {sub} < {whole}")]
    RankViolation { sub: u32, whole: u32 },
    #[error("epsilon {eps} outside 1..={max}")]
    EpsilonOutOfRange { eps: i64, max: i64 },
    #[error("exponent {exponent} outside 0..{order}")]
    ExponentOutOfRange { exponent: i64, order: u32 },
    #[error("group order must be positive")]
    ZeroOrder,
    #[error("residue matrix row {row} has {len} entries, expected rank {rank}")]
    ShapeMismatch { row: usize, len: usize, rank: u32 },
    #[error("parabolic shift {0} is not a multiple of the rank")]
    ShiftNotIntegral(BigRational),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// One step of a weighted flag: weight `α_i` with multiplicity `k_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightStep {
    #[serde(serialize_with = "crate::serialize_rational")]
    pub weight: BigRational,
    pub multiplicity: u32,
}

impl WeightStep {
    pub fn new(weight: BigRational, multiplicity: u32) -> Self {
        WeightStep {
            weight,
            multiplicity,
        }
    }
}

/// Weighted flag at a marked point.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MarkedPoint {
    pub steps: Vec<WeightStep>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParabolicData {
    pub rank: u32,
    pub degree: i64,
    pub points: Vec<MarkedPoint>,
}

impl ParabolicData {
    pub fn new(rank: u32, degree: i64, points: Vec<MarkedPoint>) -> Self {
        ParabolicData {
            rank,
            degree,
            points,
        }
    }

    pub fn validate(&self) -> Result<(), ParabolicError> {
        if self.rank == 0 {
            return Err(ParabolicError::ZeroRank);
        }
        let one = BigRational::from_integer(1.into());
        for (point, p) in self.points.iter().enumerate() {
            if p.steps.iter().any(|s| s.multiplicity == 0) {
                return Err(ParabolicError::ZeroMultiplicity { point });
            }
            let sum: u32 = p.steps.iter().map(|s| s.multiplicity).sum();
            if sum != self.rank {
                return Err(ParabolicError::MultiplicityMismatch {
                    point,
                    sum,
                    rank: self.rank,
                });
            }
            let in_range = p
                .steps
                .iter()
                .all(|s| !s.weight.is_negative() && s.weight < one);
            let increasing = p.steps.windows(2).all(|w| w[0].weight < w[1].weight);
            if !in_range || !increasing {
                return Err(ParabolicError::BadWeights { point });
            }
        }
        Ok(())
    }
}

/// `deg W + Σ_P Σ_i k_i(P) α_i(P)`.
pub fn parabolic_degree(p: &ParabolicData) -> Result<RationalScalar, ParabolicError> {
    p.validate()?;
    let mut total = BigRational::from_integer(p.degree.into());
    for point in &p.points {
        for s in &point.steps {
            total += &s.weight * BigRational::from_integer(s.multiplicity.into());
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeComparison {
    StrictPass,
    Boundary,
    Fail,
}

/// Compares parabolic slopes of one candidate subbundle against the whole bundle.
pub fn slope_compare(
    sub: &ParabolicData,
    whole: &ParabolicData,
) -> Result<SlopeComparison, ParabolicError> {
    if sub.rank == 0 || sub.rank >= whole.rank {
        return Err(ParabolicError::RankViolation {
            sub: sub.rank,
            whole: whole.rank,
        });
    }
    let sub_slope = parabolic_degree(sub)? / BigRational::from_integer(sub.rank.into());
    let whole_slope = parabolic_degree(whole)? / BigRational::from_integer(whole.rank.into());
    Ok(match sub_slope.cmp(&whole_slope) {
        std::cmp::Ordering::Less => SlopeComparison::StrictPass,
        std::cmp::Ordering::Equal => SlopeComparison::Boundary,
        std::cmp::Ordering::Greater => SlopeComparison::Fail,
    })
}

/// `k(n−k)(g−1) + ε + N·Σ μ_i`, with `1 <= ε <= n−1`.
pub fn s_invariant(
    n: u32,
    k: u32,
    g: u32,
    eps: i64,
    order: u32,
    mu: &[BigRational],
) -> Result<RationalScalar, ParabolicError> {
    let max = n as i64 - 1;
    if eps < 1 || eps > max {
        return Err(ParabolicError::EpsilonOutOfRange { eps, max });
    }
    let (n, k, g) = (n as i64, k as i64, g as i64);
    let base = BigRational::from_integer((k * (n - k) * (g - 1) + eps).into());
    let shift: BigRational =
        mu.iter().cloned().sum::<BigRational>() * BigRational::from_integer(order.into());
    Ok(base + shift)
}

/// The node form: rank 2 and `ε = 1`.
pub fn s_invariant_node(
    k: u32,
    g: u32,
    order: u32,
    mu: &[BigRational],
) -> Result<RationalScalar, ParabolicError> {
    s_invariant(2, k, g, 1, order, mu)
}

/// `2r²(g−1) + n·r(r−1) + 2`.
pub fn moduli_dimension(rank: u32, n_points: u32, g: u32) -> i64 {
    let (r, n, g) = (rank as i64, n_points as i64, g as i64);
    2 * r * r * (g - 1) + n * r * (r - 1) + 2
}

/// Residues `λ^{(i)}_j` of a logarithmic connection at `n` points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionSpectrum {
    rank: u32,
    degree: i64,
    lambda: Vec<Vec<BigRational>>,
}

impl ConnectionSpectrum {
    pub fn new(
        rank: u32,
        degree: i64,
        lambda: Vec<Vec<BigRational>>,
    ) -> Result<Self, ParabolicError> {
        if rank == 0 {
            return Err(ParabolicError::ZeroRank);
        }
        if let Some((row, r)) = lambda
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != rank as usize)
        {
            return Err(ParabolicError::ShapeMismatch {
                row,
                len: r.len(),
                rank,
            });
        }
        Ok(ConnectionSpectrum {
            rank,
            degree,
            lambda,
        })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn n_points(&self) -> usize {
        self.lambda.len()
    }

    pub fn residues(&self) -> &[Vec<BigRational>] {
        &self.lambda
    }
}

/// `d + Σ_{i,j} λ^{(i)}_j = 0`.
pub fn residue_degree_check(c: &ConnectionSpectrum) -> bool {
    let sum: BigRational = c.lambda.iter().flatten().cloned().sum();
    (sum + BigRational::from_integer(c.degree.into())).is_zero()
}

/// Weights `μ_i = exponent_i / N`, sorted and grouped with multiplicities.
pub fn weights_from_equivariant(
    order: u32,
    exponents: &[i64],
) -> Result<Vec<WeightStep>, ParabolicError> {
    if order == 0 {
        return Err(ParabolicError::ZeroOrder);
    }
    if let Some(&exponent) = exponents.iter().find(|&&e| e < 0 || e >= order as i64) {
        return Err(ParabolicError::ExponentOutOfRange { exponent, order });
    }
    let mut sorted = exponents.to_vec();
    sorted.sort_unstable();
    let mut out: Vec<WeightStep> = Vec::new();
    for e in sorted {
        let w = BigRational::new(BigInt::from(e), BigInt::from(order));
        match out.last_mut() {
            Some(last) if last.weight == w => last.multiplicity += 1,
            _ => out.push(WeightStep::new(w, 1)),
        }
    }
    Ok(out)
}

/// A parabolic invariant: the plain and refined s-invariants and the value
/// of the query after its quotient degree absorbs the weight shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParabolicInvariant {
    pub s_plain: RationalScalar,
    pub s_refined: RationalScalar,
    pub shifted: InvariantQuery,
    pub result: InvariantResult,
}

/// Shifts the s-invariant of `q` by `N·Σ μ_i` and evaluates the query at the
/// quotient degree `e′ − N·Σμ_i / n`.
pub fn parabolic_invariant(
    q: &InvariantQuery,
    eps: i64,
    order: u32,
    mu: &[BigRational],
    opts: &EvalOptions,
) -> Result<ParabolicInvariant, ParabolicError> {
    let s_plain = s_invariant(q.n, q.k, q.g, eps, 0, &[])?;
    let s_refined = s_invariant(q.n, q.k, q.g, eps, order, mu)?;
    let shift = &s_refined - &s_plain;
    let per_rank = &shift / BigRational::from_integer(q.n.into());
    if !per_rank.is_integer() {
        return Err(ParabolicError::ShiftNotIntegral(shift));
    }
    let delta: i64 = per_rank
        .to_integer()
        .try_into()
        .map_err(|_| ParabolicError::ShiftNotIntegral(shift.clone()))?;
    let shifted = InvariantQuery {
        e_prime: q.e_prime - delta,
        ..q.clone()
    };
    let result = evaluate(&shifted, opts)?;
    Ok(ParabolicInvariant {
        s_plain,
        s_refined,
        shifted,
        result,
    })
}
