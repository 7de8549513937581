//! Exact arithmetic in the cyclotomic field Q(ζ_n).
//!
//! Elements are stored in the power basis `1, ζ, …, ζ^{φ(n)-1}` of
//! `Q[x]/(Φ_n(x))` as integer numerators over one positive common
//! denominator. The representation is canonical: the numerators and the
//! denominator share no common factor and zero is `0/1`, so two equal field
//! elements always compare equal coefficient by coefficient.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational value, always in lowest terms with a positive denominator.
pub type RationalScalar = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CyclotomicError {
    #[error("incompatible cyclotomic orders ({left} vs {right})")]
    IncompatibleOrders { left: u32, right: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-rational cyclotomic value: coefficients [{}]", join_rationals(.coeffs))]
    NonRational { coeffs: Vec<BigRational> },
    #[error("cyclotomic order must be positive")]
    ZeroOrder,
    #[error("exponent {exponent} is not a unit modulo {order}")]
    NotAUnit { exponent: i64, order: u32 },
}

fn join_rationals(coeffs: &[BigRational]) -> String {
    coeffs
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Per-order data shared by every element of Q(ζ_n).
#[derive(Debug)]
struct OrderData {
    order: u32,
    degree: usize,
    phi: Vec<i64>,
    /// `x^j mod Φ_n` for `0 <= j < n`, each of length `degree`.
    powers: Vec<Vec<i64>>,
}

type OrderCache = RwLock<HashMap<u32, Arc<OrderData>>>;

fn cache() -> &'static OrderCache {
    static CACHE: OnceLock<OrderCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn order_data(n: u32) -> Result<Arc<OrderData>, CyclotomicError> {
    if n == 0 {
        return Err(CyclotomicError::ZeroOrder);
    }
    if let Some(data) = cache().read().expect("cyclotomic cache poisoned").get(&n) {
        return Ok(Arc::clone(data));
    }
    let phi = compute_phi(n);
    let data = Arc::new(build_order_data(n, phi));
    // Two threads may race to fill the same order; both compute identical data.
    let mut guard = cache().write().expect("cyclotomic cache poisoned");
    Ok(Arc::clone(guard.entry(n).or_insert(data)))
}

fn compute_phi(n: u32) -> Vec<i64> {
    // x^n - 1
    let mut poly = vec![0i64; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phi_d = cyclotomic_polynomial(d);
            poly = exact_div_monic(&poly, &phi_d);
        }
    }
    poly
}

/// Divides `num` by the monic polynomial `den`, which must divide it exactly.
fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, &dc) in den.iter().enumerate() {
                rem[i + j] = rem[i + j]
                    .checked_sub(c.checked_mul(dc).expect("cyclotomic coefficient overflow"))
                    .expect("cyclotomic coefficient overflow");
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

fn build_order_data(n: u32, phi: Vec<i64>) -> OrderData {
    let degree = phi.len() - 1;
    let mut powers = Vec::with_capacity(n as usize);
    let mut current = vec![0i64; degree];
    current[0] = 1;
    for _ in 0..n {
        powers.push(current.clone());
        // multiply by x and reduce with the monic Φ_n
        let top = current[degree - 1];
        let mut next = vec![0i64; degree];
        next[1..degree].copy_from_slice(&current[..degree - 1]);
        if top != 0 {
            for i in 0..degree {
                next[i] -= top * phi[i];
            }
        }
        current = next;
    }
    OrderData {
        order: n,
        degree,
        phi,
        powers,
    }
}

/// Coefficients of the n-th cyclotomic polynomial Φ_n, lowest degree first.
///
/// Computed as `(x^n - 1) / ∏_{d | n, d < n} Φ_d(x)` and cached per order.
///
/// # Panics
///
/// Panics if `n == 0`.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    assert!(n > 0, "cyclotomic order must be positive");
    if let Some(data) = cache().read().expect("cyclotomic cache poisoned").get(&n) {
        return data.phi.clone();
    }
    order_data(n).expect("positive order").phi.clone()
}

/// Euler's totient, i.e. the degree of Φ_n.
pub fn totient(n: u32) -> usize {
    (1..=n).filter(|&j| j.gcd(&n) == 1).count()
}

/// `Σ_{ρ^n = 1} ρ^t`: `n` when `n | t`, zero otherwise.
pub fn root_power_sum(n: u32, t: i64) -> RationalScalar {
    assert!(n > 0, "root_power_sum requires n >= 1");
    if t.rem_euclid(n as i64) == 0 {
        BigRational::from_integer(BigInt::from(n))
    } else {
        BigRational::zero()
    }
}

/// An element of Q(ζ_n).
#[derive(Clone)]
pub struct CyclotomicNumber {
    ctx: Arc<OrderData>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.order == other.ctx.order && self.den == other.den && self.num == other.num
    }
}

impl Eq for CyclotomicNumber {}

impl Hash for CyclotomicNumber {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ctx.order.hash(state);
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl CyclotomicNumber {
    fn from_parts(ctx: Arc<OrderData>, num: Vec<BigInt>, den: BigInt) -> Self {
        let mut out = CyclotomicNumber { ctx, num, den };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -std::mem::take(&mut self.den);
            for c in &mut self.num {
                *c = -std::mem::take(c);
            }
        }
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                return;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if !g.is_one() {
            for c in &mut self.num {
                *c /= &g;
            }
            self.den /= &g;
        }
    }

    pub fn zero(order: u32) -> Result<Self, CyclotomicError> {
        let ctx = order_data(order)?;
        let num = vec![BigInt::zero(); ctx.degree];
        Ok(CyclotomicNumber {
            ctx,
            num,
            den: BigInt::one(),
        })
    }

    pub fn one(order: u32) -> Result<Self, CyclotomicError> {
        Self::from_integer(order, 1)
    }

    pub fn from_integer(order: u32, value: impl Into<BigInt>) -> Result<Self, CyclotomicError> {
        Self::from_rational(order, &BigRational::from_integer(value.into()))
    }

    pub fn from_rational(order: u32, value: &BigRational) -> Result<Self, CyclotomicError> {
        let ctx = order_data(order)?;
        let mut num = vec![BigInt::zero(); ctx.degree];
        num[0] = value.numer().clone();
        Ok(Self::from_parts(ctx, num, value.denom().clone()))
    }

    /// `ζ_n^e` for any integer exponent.
    pub fn zeta_pow(order: u32, exponent: i64) -> Result<Self, CyclotomicError> {
        let ctx = order_data(order)?;
        let idx = exponent.rem_euclid(order as i64) as usize;
        let num = ctx.powers[idx].iter().map(|&c| BigInt::from(c)).collect();
        Ok(CyclotomicNumber {
            ctx,
            num,
            den: BigInt::one(),
        })
    }

    /// The element `Σ_i coeffs[i] ζ^i`. Any number of coefficients is
    /// accepted; higher powers are reduced using `ζ^n = 1` and `Φ_n(ζ) = 0`.
    pub fn from_coeffs(order: u32, coeffs: &[BigRational]) -> Result<Self, CyclotomicError> {
        let ctx = order_data(order)?;
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scaled: Vec<BigInt> = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let num = reduce(&ctx, scaled);
        Ok(Self::from_parts(ctx, num, den))
    }

    /// The image of `Σ_j counts[j] x^j` from the group ring `Z[x]/(x^n - 1)`.
    pub(crate) fn from_group_ring(order: u32, counts: &[i64]) -> Result<Self, CyclotomicError> {
        let ctx = order_data(order)?;
        let mut num = vec![BigInt::zero(); ctx.degree];
        for (j, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let idx = j % ctx.order as usize;
            for (slot, &p) in num.iter_mut().zip(&ctx.powers[idx]) {
                if p != 0 {
                    *slot += c * p;
                }
            }
        }
        Ok(Self::from_parts(ctx, num, BigInt::one()))
    }

    pub fn order(&self) -> u32 {
        self.ctx.order
    }

    /// Dimension of Q(ζ_n) over Q.
    pub fn degree(&self) -> usize {
        self.ctx.degree
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.is_rational() && self.den.is_one() && self.num[0].is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.num.iter().skip(1).all(Zero::is_zero)
    }

    fn check_order(&self, other: &Self) -> Result<(), CyclotomicError> {
        if self.ctx.order != other.ctx.order {
            return Err(CyclotomicError::IncompatibleOrders {
                left: self.ctx.order,
                right: other.ctx.order,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, CyclotomicError> {
        self.check_order(other)?;
        if self.den == other.den {
            let num = self
                .num
                .iter()
                .zip(&other.num)
                .map(|(a, b)| a + b)
                .collect();
            return Ok(Self::from_parts(
                Arc::clone(&self.ctx),
                num,
                self.den.clone(),
            ));
        }
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| a * &other.den + b * &self.den)
            .collect();
        Ok(Self::from_parts(
            Arc::clone(&self.ctx),
            num,
            &self.den * &other.den,
        ))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, CyclotomicError> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, CyclotomicError> {
        self.check_order(other)?;
        let d = self.ctx.degree;
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let num = reduce(&self.ctx, prod);
        Ok(Self::from_parts(
            Arc::clone(&self.ctx),
            num,
            &self.den * &other.den,
        ))
    }

    fn neg_ref(&self) -> Self {
        CyclotomicNumber {
            ctx: Arc::clone(&self.ctx),
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        let num = self.num.iter().map(|c| c * factor.numer()).collect();
        Self::from_parts(Arc::clone(&self.ctx), num, &self.den * factor.denom())
    }

    /// Multiplicative inverse, via the extended Euclidean algorithm against Φ_n.
    pub fn inv(&self) -> Result<Self, CyclotomicError> {
        if self.is_zero() {
            return Err(CyclotomicError::DivisionByZero);
        }
        let phi: Vec<BigInt> = self.ctx.phi.iter().map(|&c| BigInt::from(c)).collect();
        let (s, scale) = ext_gcd_inverse(&self.num, &phi);
        // a = num/den and s·num ≡ scale, so a⁻¹ = den·s/scale
        let factor = BigRational::new(self.den.clone(), scale);
        let num = reduce(&self.ctx, s);
        Ok(Self::from_parts(Arc::clone(&self.ctx), num, BigInt::one()).scale(&factor))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, CyclotomicError> {
        self.check_order(other)?;
        self.try_mul(&other.inv()?)
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, exponent: i64) -> Result<Self, CyclotomicError> {
        let mut base = if exponent < 0 {
            self.inv()?
        } else {
            self.clone()
        };
        let mut e = exponent.unsigned_abs();
        let mut acc = Self::one(self.ctx.order)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Galois automorphism `ζ ↦ ζ^j` for `gcd(j, n) = 1`.
    pub fn galois(&self, j: i64) -> Result<Self, CyclotomicError> {
        let n = self.ctx.order as i64;
        if j.gcd(&n) != 1 {
            return Err(CyclotomicError::NotAUnit {
                exponent: j,
                order: self.ctx.order,
            });
        }
        let mut counts = vec![BigInt::zero(); self.ctx.order as usize];
        for (i, c) in self.num.iter().enumerate() {
            counts[((i as i64) * j).rem_euclid(n) as usize] += c;
        }
        let num = reduce(&self.ctx, counts);
        Ok(Self::from_parts(
            Arc::clone(&self.ctx),
            num,
            self.den.clone(),
        ))
    }

    /// The rational value of the element, or an error carrying the
    /// offending coefficients when some non-constant coefficient survives.
    pub fn to_rational(&self) -> Result<RationalScalar, CyclotomicError> {
        if self.is_rational() {
            Ok(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            Err(CyclotomicError::NonRational {
                coeffs: self.coeffs(),
            })
        }
    }
}

/// Reduces an integer polynomial in ζ of any length to the power basis.
fn reduce(ctx: &OrderData, poly: Vec<BigInt>) -> Vec<BigInt> {
    let d = ctx.degree;
    let n = ctx.order as usize;
    if poly.len() <= d {
        let mut poly = poly;
        poly.resize(d, BigInt::zero());
        return poly;
    }
    let mut iter = poly.into_iter();
    let mut out: Vec<BigInt> = iter.by_ref().take(d).collect();
    for (i, c) in iter.enumerate() {
        if c.is_zero() {
            continue;
        }
        let row = &ctx.powers[(i + d) % n];
        for (slot, &p) in out.iter_mut().zip(row) {
            match p {
                0 => {}
                1 => *slot += &c,
                -1 => *slot -= &c,
                _ => *slot += &c * p,
            }
        }
    }
    out
}

fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn is_zero_poly(p: &[BigInt]) -> bool {
    p.iter().all(Zero::is_zero)
}

/// Positive gcd of the coefficients (1 for the zero polynomial).
fn content(p: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in p {
        if !c.is_zero() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
    }
    if g.is_zero() {
        BigInt::one()
    } else {
        g
    }
}

fn divide_exact(p: &mut [BigInt], c: &BigInt) {
    if !c.is_one() {
        for x in p.iter_mut() {
            *x /= c;
        }
    }
}

/// Pseudo-division: returns `(L, q, r)` with `L·a = q·b + r`, `L = lc(b)^δ`.
fn pseudo_divmod(a: &[BigInt], b: &[BigInt]) -> (BigInt, Vec<BigInt>, Vec<BigInt>) {
    let db = b.len() - 1;
    if a.len() < b.len() {
        return (BigInt::one(), vec![BigInt::zero()], a.to_vec());
    }
    let lc = &b[db];
    let steps = a.len() - db;
    let mut rem = a.to_vec();
    let mut quot = vec![BigInt::zero(); steps];
    for i in (0..steps).rev() {
        for x in rem.iter_mut().chain(quot.iter_mut()) {
            *x *= lc;
        }
        let c = &rem[i + db] / lc;
        if !c.is_zero() {
            for (j, bc) in b.iter().enumerate() {
                rem[i + j] -= &c * bc;
            }
        }
        quot[i] = c;
    }
    rem.truncate(db.max(1));
    (num_traits::pow(lc.clone(), steps), trim(quot), trim(rem))
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Remainder modulo the monic polynomial `m`.
fn rem_monic(mut p: Vec<BigInt>, m: &[BigInt]) -> Vec<BigInt> {
    let dm = m.len() - 1;
    while p.len() > dm {
        let c = p.pop().expect("nonempty");
        if !c.is_zero() {
            let base = p.len() - dm;
            for (j, mc) in m[..dm].iter().enumerate() {
                p[base + j] -= &c * mc;
            }
        }
    }
    p
}

/// Extended Euclid over Z[x] by a primitive pseudo-remainder sequence.
///
/// For `a` coprime to the monic `m`, returns `(s, c)` with `s·a ≡ c (mod m)`
/// and `c` a nonzero integer. Each remainder `r_i` carries a cofactor `s_i`
/// and a rational scale `λ_i` with `s_i·a ≡ λ_i·r_i`; contents are stripped
/// every step so the integers stay small.
fn ext_gcd_inverse(a: &[BigInt], m: &[BigInt]) -> (Vec<BigInt>, BigInt) {
    let a = trim(a.to_vec());
    let c1 = content(&a);
    let mut r1 = a;
    divide_exact(&mut r1, &c1);
    let (mut r0, mut s0, mut l0) = (m.to_vec(), vec![BigInt::zero()], BigRational::one());
    let (mut s1, mut l1) = (vec![BigInt::one()], BigRational::from_integer(c1));
    while r1.len() > 1 {
        let (lead, q, rem) = pseudo_divmod(&r0, &r1);
        debug_assert!(!is_zero_poly(&rem), "inverse of a zero divisor");
        // lead·r0 − q·r1 = rem  and  r_i = s_i·a / λ_i
        let (p0, q0) = (l0.numer(), l0.denom());
        let (p1, q1) = (l1.numer(), l1.denom());
        let left: BigInt = &lead * q0 * p1;
        let right: BigInt = q1 * p0;
        let qs1 = poly_mul(&q, &s1);
        let len = s0.len().max(qs1.len());
        let zero = BigInt::zero();
        let combined: Vec<BigInt> = (0..len)
            .map(|i| &left * s0.get(i).unwrap_or(&zero) - &right * qs1.get(i).unwrap_or(&zero))
            .collect();
        let mut s_new = trim(rem_monic(combined, m));
        let mut r_new = rem;
        let (cs, cr) = (content(&s_new), content(&r_new));
        divide_exact(&mut s_new, &cs);
        divide_exact(&mut r_new, &cr);
        let l_new = BigRational::new(p0 * p1 * cr, cs);
        r0 = std::mem::replace(&mut r1, r_new);
        s0 = std::mem::replace(&mut s1, s_new);
        l0 = std::mem::replace(&mut l1, l_new);
    }
    // s1·a ≡ λ1·r1 with r1 a constant
    let scale = l1 * BigRational::from_integer(r1[0].clone());
    let s: Vec<BigInt> = s1.into_iter().map(|c| c * scale.denom()).collect();
    (s, scale.numer().clone())
}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CyclotomicNumber(n={}, {})", self.ctx.order, self)
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => c.to_string(),
                1 => format!("{c}*z"),
                _ => format!("{c}*z^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

macro_rules! forward_op {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&CyclotomicNumber> for &CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $method(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
                self.$inner(rhs).expect("incompatible cyclotomic orders")
            }
        }
        impl $tr for CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $method(self, rhs: CyclotomicNumber) -> CyclotomicNumber {
                (&self)
                    .$inner(&rhs)
                    .expect("incompatible cyclotomic orders")
            }
        }
    };
}

forward_op!(Add, add, try_add);
forward_op!(Sub, sub, try_sub);
forward_op!(Mul, mul, try_mul);

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        self.neg_ref()
    }
}

impl Neg for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        self.neg_ref()
    }
}
