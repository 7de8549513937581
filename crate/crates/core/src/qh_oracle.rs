//! Small quantum cohomology of Gr(k, n) at `q = 1`, used as an independent
//! check on the root-of-unity sums.
//!
//! Products are classical Littlewood–Richardson products followed by
//! rim-hook reduction. The genus-g correlator of classes `v_1 … v_m` is
//! `ε(v_1 ⋯ v_m · H^g)`, where `ε` reads off the coefficient of the top
//! class and `H = Σ η^{ij} e_i e_j` is the handle element of the trace
//! pairing `η(a, b) = ε(a·b)`.

#![allow(clippy::needless_range_loop)]

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cyclotomic::{CyclotomicError, CyclotomicNumber, RationalScalar};
use crate::subsets::SubsetRange;
use crate::symfunc::{
    lr_expand, partitions_in_box, rim_hook_reduce, schur_eval, Partition, QuantumClassSum,
    SymfuncError,
};
use crate::vi_engine::{vi_invariant_with, Convention, EngineError, EvalOptions, InvariantQuery};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Symfunc(#[from] SymfuncError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Cyclotomic(#[from] CyclotomicError),
    #[error("invariant violation: degenerate trace pairing for Gr({k},{n})")]
    DegeneratePairing { k: u32, n: u32 },
    #[error("invariant violation: {0}")]
    Inhomogeneous(String),
}

/// Laurent polynomial in `q`, exponent to coefficient.
pub type LaurentQ = BTreeMap<i64, BigRational>;

/// `σ_λ * σ_μ` in the quantum cohomology of Gr(k, n), with `q` tracked.
pub fn quantum_product(
    lambda: &Partition,
    mu: &Partition,
    k: u32,
    n: u32,
) -> Result<QuantumClassSum, OracleError> {
    if k == 0 || k >= n {
        return Err(SymfuncError::InvalidGrassmannian { k, n }.into());
    }
    for p in [lambda, mu] {
        if !p.fits_in_box(k, n - k) {
            return Err(SymfuncError::OutsideBox {
                partition: p.clone(),
                k,
                cols: n - k,
            }
            .into());
        }
    }
    let mut out = QuantumClassSum::new();
    for (nu, c) in lr_expand(lambda, mu, k as usize) {
        if let Some(r) = rim_hook_reduce(&nu, k, n)? {
            out.add_term(r.partition, r.q_power, r.sign as i64 * c as i64);
        }
    }
    Ok(out)
}

/// The Frobenius algebra `QH*(Gr(k, n))|_{q=1}` on the Schubert basis.
#[derive(Debug)]
pub struct FusionAlgebra {
    k: u32,
    n: u32,
    basis: Vec<Partition>,
    index: HashMap<Partition, usize>,
    /// `products[i][j]` lists `(l, q-power, coefficient)` of `e_i * e_j`.
    products: Vec<Vec<Vec<(usize, u32, i64)>>>,
    pairing: Vec<Vec<i64>>,
    pairing_inv: Vec<Vec<BigRational>>,
    handle: Vec<BigRational>,
}

type AlgebraCache = Mutex<HashMap<(u32, u32), Arc<FusionAlgebra>>>;

impl FusionAlgebra {
    pub fn build(k: u32, n: u32) -> Result<Self, OracleError> {
        if k == 0 || k >= n {
            return Err(SymfuncError::InvalidGrassmannian { k, n }.into());
        }
        let basis = partitions_in_box(k, n - k);
        let index: HashMap<Partition, usize> = basis
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let dim = basis.len();
        let mut products = vec![vec![Vec::new(); dim]; dim];
        for i in 0..dim {
            for j in i..dim {
                let prod = quantum_product(&basis[i], &basis[j], k, n)?;
                let terms: Vec<(usize, u32, i64)> =
                    prod.terms().map(|(p, q, c)| (index[p], q, c)).collect();
                products[j][i] = terms.clone();
                products[i][j] = terms;
            }
        }
        let top = dim - 1;
        let pairing: Vec<Vec<i64>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        products[i][j]
                            .iter()
                            .filter(|t| t.0 == top)
                            .map(|t| t.2)
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let pairing_inv = invert(&pairing).ok_or(OracleError::DegeneratePairing { k, n })?;
        let mut handle = vec![BigRational::zero(); dim];
        for i in 0..dim {
            for j in 0..dim {
                let w = &pairing_inv[i][j];
                if w.is_zero() {
                    continue;
                }
                for &(l, _, c) in &products[i][j] {
                    handle[l] += w * BigRational::from_integer(c.into());
                }
            }
        }
        Ok(FusionAlgebra {
            k,
            n,
            basis,
            index,
            products,
            pairing,
            pairing_inv,
            handle,
        })
    }

    /// Shared, lazily built algebra for `(k, n)`.
    pub fn shared(k: u32, n: u32) -> Result<Arc<FusionAlgebra>, OracleError> {
        static CACHE: OnceLock<AlgebraCache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(a) = cache.lock().expect("algebra cache poisoned").get(&(k, n)) {
            return Ok(Arc::clone(a));
        }
        let built = Arc::new(Self::build(k, n)?);
        let mut guard = cache.lock().expect("algebra cache poisoned");
        Ok(Arc::clone(guard.entry((k, n)).or_insert(built)))
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Partition] {
        &self.basis
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// `c_{ij}^l` at `q = 1`.
    pub fn structure_constant(&self, i: usize, j: usize, l: usize) -> i64 {
        self.products[i][j]
            .iter()
            .filter(|t| t.0 == l)
            .map(|t| t.2)
            .sum()
    }

    pub fn pairing(&self) -> &[Vec<i64>] {
        &self.pairing
    }

    pub fn pairing_inverse(&self) -> &[Vec<BigRational>] {
        &self.pairing_inv
    }

    pub fn handle(&self) -> &[BigRational] {
        &self.handle
    }

    pub fn pairing_determinant(&self) -> BigRational {
        determinant(&self.pairing)
    }

    fn class_index(&self, p: &Partition) -> Result<usize, OracleError> {
        self.index_of(p).ok_or_else(|| {
            SymfuncError::OutsideBox {
                partition: p.clone(),
                k: self.k,
                cols: self.n - self.k,
            }
            .into()
        })
    }

    /// Product of two vectors in the basis at `q = 1`.
    pub fn multiply(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.dimension()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for &(l, _, c) in &self.products[i][j] {
                    out[l] += &xy * BigRational::from_integer(c.into());
                }
            }
        }
        out
    }

    fn multiply_basis(&self, a: &[BigRational], j: usize) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.dimension()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for &(l, _, c) in &self.products[i][j] {
                out[l] += x * BigRational::from_integer(c.into());
            }
        }
        out
    }

    pub fn unit(&self) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); self.dimension()];
        v[0] = BigRational::one();
        v
    }

    /// `ε(σ_{λ_1} ⋯ σ_{λ_m} · H^g)` at `q = 1`.
    pub fn correlator(&self, classes: &[Partition], g: u32) -> Result<RationalScalar, OracleError> {
        let mut v = self.unit();
        for c in classes {
            v = self.multiply_basis(&v, self.class_index(c)?);
        }
        for _ in 0..g {
            v = self.multiply(&v, &self.handle);
        }
        Ok(v[self.dimension() - 1].clone())
    }

    /// The same correlator through the idempotent decomposition: a sum over
    /// k-subsets `p` of the roots of `x^n = (−1)^{k−1}` of
    /// `H(p)^{g−1} ∏ s_{λ_l}(p)`, evaluated in Q(ζ_{2n}).
    pub fn correlator_eigen(
        &self,
        classes: &[Partition],
        g: u32,
    ) -> Result<RationalScalar, OracleError> {
        for c in classes {
            self.class_index(c)?;
        }
        let order = 2 * self.n;
        let offset = usize::from(self.k.is_multiple_of(2));
        let mut total = CyclotomicNumber::zero(order)?;
        for subset in SubsetRange::all(self.n as usize, self.k as usize) {
            let point: Vec<CyclotomicNumber> = subset
                .iter()
                .map(|&t| CyclotomicNumber::zeta_pow(order, (2 * t + offset) as i64))
                .collect::<Result<_, _>>()?;
            let schur: Vec<CyclotomicNumber> = self
                .basis
                .iter()
                .map(|p| schur_eval(order, p, &point))
                .collect::<Result<_, _>>()?;
            let mut handle_value = CyclotomicNumber::zero(order)?;
            for (i, si) in schur.iter().enumerate() {
                for (j, sj) in schur.iter().enumerate() {
                    let w = &self.pairing_inv[i][j];
                    if !w.is_zero() {
                        handle_value = handle_value.try_add(&si.try_mul(sj)?.scale(w))?;
                    }
                }
            }
            let mut term = handle_value.pow(g as i64 - 1)?;
            for c in classes {
                term = term.try_mul(&schur[self.class_index(c)?])?;
            }
            total = total.try_add(&term)?;
        }
        Ok(total.to_rational()?)
    }

    /// The correlator with `q` kept formal. The pairing is homogeneous, so its
    /// inverse is read off the `q = 1` inverse with the grading restored and
    /// then checked formally. For an admissible insertion the result is a
    /// single power `q^{−e′}`.
    pub fn correlator_formal(
        &self,
        classes: &[Partition],
        g: u32,
    ) -> Result<LaurentQ, OracleError> {
        let dim = self.dimension();
        let n = self.n as i64;
        let top_size = (self.k * (self.n - self.k)) as i64;
        let size = |i: usize| self.basis[i].size() as i64;
        let mut formal_pairing = vec![vec![LaurentQ::new(); dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                for &(l, q, c) in &self.products[i][j] {
                    if l == dim - 1 {
                        add_term(&mut formal_pairing[i][j], q as i64, &rat(c));
                    }
                }
            }
        }
        let mut formal_inv = vec![vec![LaurentQ::new(); dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                let c = &self.pairing_inv[i][j];
                if c.is_zero() {
                    continue;
                }
                let shift = top_size - size(i) - size(j);
                if shift % n != 0 {
                    return Err(OracleError::Inhomogeneous(format!(
                        "inverse pairing entry ({i},{j}) has fractional q-degree"
                    )));
                }
                add_term(&mut formal_inv[i][j], shift / n, c);
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = LaurentQ::new();
                for l in 0..dim {
                    acc = laurent_add(&acc, &laurent_mul(&formal_pairing[i][l], &formal_inv[l][j]));
                }
                let expected: LaurentQ = if i == j {
                    [(0, BigRational::one())].into_iter().collect()
                } else {
                    LaurentQ::new()
                };
                if acc != expected {
                    return Err(OracleError::Inhomogeneous(format!(
                        "formal pairing inverse fails at ({i},{j})"
                    )));
                }
            }
        }
        let mut handle = vec![LaurentQ::new(); dim];
        for i in 0..dim {
            for j in 0..dim {
                if formal_inv[i][j].is_empty() {
                    continue;
                }
                for &(l, q, c) in &self.products[i][j] {
                    let term = laurent_mul(&formal_inv[i][j], &monomial(q as i64, rat(c)));
                    handle[l] = laurent_add(&handle[l], &term);
                }
            }
        }
        let mut v = vec![LaurentQ::new(); dim];
        v[0] = monomial(0, BigRational::one());
        for c in classes {
            let j = self.class_index(c)?;
            let e_j: Vec<LaurentQ> = (0..dim)
                .map(|i| {
                    if i == j {
                        monomial(0, BigRational::one())
                    } else {
                        LaurentQ::new()
                    }
                })
                .collect();
            v = self.multiply_formal(&v, &e_j);
        }
        for _ in 0..g {
            v = self.multiply_formal(&v, &handle);
        }
        Ok(v.swap_remove(dim - 1))
    }

    fn multiply_formal(&self, a: &[LaurentQ], b: &[LaurentQ]) -> Vec<LaurentQ> {
        let mut out = vec![LaurentQ::new(); self.dimension()];
        for (i, x) in a.iter().enumerate() {
            if x.is_empty() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_empty() {
                    continue;
                }
                let xy = laurent_mul(x, y);
                for &(l, q, c) in &self.products[i][j] {
                    out[l] = laurent_add(&out[l], &laurent_mul(&xy, &monomial(q as i64, rat(c))));
                }
            }
        }
        out
    }
}

fn rat(c: i64) -> BigRational {
    BigRational::from_integer(c.into())
}

fn monomial(q: i64, c: BigRational) -> LaurentQ {
    let mut m = LaurentQ::new();
    add_term(&mut m, q, &c);
    m
}

fn add_term(p: &mut LaurentQ, q: i64, c: &BigRational) {
    if c.is_zero() {
        return;
    }
    let e = p.entry(q).or_insert_with(BigRational::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&q);
    }
}

fn laurent_add(a: &LaurentQ, b: &LaurentQ) -> LaurentQ {
    let mut out = a.clone();
    for (q, c) in b {
        add_term(&mut out, *q, c);
    }
    out
}

fn laurent_mul(a: &LaurentQ, b: &LaurentQ) -> LaurentQ {
    let mut out = LaurentQ::new();
    for (qa, ca) in a {
        for (qb, cb) in b {
            add_term(&mut out, qa + qb, &(ca * cb));
        }
    }
    out
}

/// Gauss–Jordan inverse over Q; `None` when singular.
fn invert(m: &[Vec<i64>]) -> Option<Vec<Vec<BigRational>>> {
    let dim = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigRational> = row.iter().map(|&x| rat(x)).collect();
            r.extend((0..dim).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..dim {
        let pivot = (col..dim).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..dim {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(pivot_row) {
                    *x -= &f * p;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[dim..].to_vec()).collect())
}

fn determinant(m: &[Vec<i64>]) -> BigRational {
    let dim = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|row| row.iter().map(|&x| rat(x)).collect())
        .collect();
    let mut det = BigRational::one();
    for col in 0..dim {
        let Some(pivot) = (col..dim).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= &a[col][col];
        for r in col + 1..dim {
            if !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(pivot_row) {
                    *x -= &f * p;
                }
            }
        }
    }
    det
}

/// `ε(σ_{λ_1} ⋯ σ_{λ_m} · H^g)` in `QH*(Gr(k, n))` at `q = 1`.
pub fn correlator_genus_g(
    classes: &[Partition],
    g: u32,
    k: u32,
    n: u32,
) -> Result<RationalScalar, OracleError> {
    FusionAlgebra::shared(k, n)?.correlator(classes, g)
}

/// Schubert class of the monomial letter `X_a`: the column `(1^w)` of its weight.
pub fn letter_class(a: u32, k: u32, convention: Convention) -> Partition {
    Partition::column(convention.weight(a, k))
}

/// The oracle's value for an admissible degree-zero query.
pub fn oracle_value(q: &InvariantQuery) -> Result<RationalScalar, OracleError> {
    q.validate()?;
    let t = q.degree_tally();
    if t.monomial_weight != t.required {
        return Err(EngineError::DegreeConditionViolated {
            monomial_weight: t.monomial_weight,
            required: t.required,
        }
        .into());
    }
    if q.d != 0 {
        return Err(EngineError::UnreducedDegree(q.d).into());
    }
    let classes: Vec<Partition> = q
        .monomial
        .iter()
        .map(|&a| letter_class(a, q.k, q.convention))
        .collect();
    correlator_genus_g(&classes, q.g, q.k, q.n)
}

/// Whether the oracle and the root-of-unity sum agree on `q`.
pub fn oracle_compare(q: &InvariantQuery) -> Result<bool, OracleError> {
    let oracle = oracle_value(q)?;
    let engine = vi_invariant_with(q, &EvalOptions::serial())?;
    Ok(oracle == engine.value)
}
