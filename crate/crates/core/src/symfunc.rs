//! Partitions, elementary symmetric polynomials, Littlewood–Richardson
//! coefficients and rim-hook reduction.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::cyclotomic::{CyclotomicError, CyclotomicNumber};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymfuncError {
    #[error("parts {0:?} are not weakly decreasing")]
    NotAPartition(Vec<u32>),
    #[error("cannot parse partition {0:?}")]
    Parse(String),
    #[error("class outside algebra: {rows} rows exceed k = {k}")]
    ClassOutsideAlgebra { rows: usize, k: u32 },
    #[error("class {partition} does not fit in the {k}x{cols} box")]
    OutsideBox {
        partition: Partition,
        k: u32,
        cols: u32,
    },
    #[error("invalid Grassmannian parameters: need 1 <= k < n, got k = {k}, n = {n}")]
    InvalidGrassmannian { k: u32, n: u32 },
    #[error(transparent)]
    Cyclotomic(#[from] CyclotomicError),
}

/// A weakly decreasing sequence of positive parts.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Trailing zeros are dropped.
    pub fn new(mut parts: Vec<u32>) -> Result<Self, SymfuncError> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(SymfuncError::NotAPartition(parts));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// The single column `(1^len)`.
    pub fn column(len: u32) -> Self {
        Partition(vec![1; len as usize])
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of nonzero parts.
    pub fn rows(&self) -> usize {
        self.0.len()
    }

    /// The i-th part (zero-based), zero past the end.
    pub fn part(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, other: &Partition) -> bool {
        other.rows() <= self.rows() && other.0.iter().zip(&self.0).all(|(a, b)| a <= b)
    }

    pub fn fits_in_box(&self, rows: u32, cols: u32) -> bool {
        self.rows() <= rows as usize && self.part(0) <= cols
    }

    /// Complement inside the `rows x cols` rectangle, rotated by 180 degrees.
    pub fn complement(&self, rows: u32, cols: u32) -> Option<Partition> {
        if !self.fits_in_box(rows, cols) {
            return None;
        }
        let parts = (0..rows as usize)
            .rev()
            .map(|i| cols - self.part(i))
            .collect();
        Some(Partition::new(parts).expect("complement is weakly decreasing"))
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.part(0);
        let parts = (0..cols)
            .map(|c| self.0.iter().filter(|&&p| p > c).count() as u32)
            .collect();
        Partition(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", inner.join(","))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Partition {
    type Err = SymfuncError;

    /// Accepts `2,1`, `(2,1)`, `()` and the empty string.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .trim();
        if t.is_empty() || t == "0" {
            return Ok(Partition::empty());
        }
        let parts = t
            .split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| SymfuncError::Parse(s.to_string()))?;
        Partition::new(parts)
    }
}

/// All partitions inside the `rows x cols` rectangle, ordered by size and
/// then lexicographically. The empty partition comes first and the full
/// rectangle last.
pub fn partitions_in_box(rows: u32, cols: u32) -> Vec<Partition> {
    fn rec(rows: u32, cap: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if prefix.len() == rows as usize {
            out.push(Partition::new(prefix.clone()).expect("decreasing by construction"));
            return;
        }
        for p in 0..=cap {
            prefix.push(p);
            rec(rows, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(rows, cols, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
    out
}

/// `σ_j(values)`, via the running product `∏ (1 + v x)`.
pub fn elementary_symmetric(
    order: u32,
    j: usize,
    values: &[CyclotomicNumber],
) -> Result<CyclotomicNumber, SymfuncError> {
    if j > values.len() {
        for v in values {
            check_order(order, v)?;
        }
        return Ok(CyclotomicNumber::zero(order)?);
    }
    Ok(elementary_symmetric_all(order, values)?.swap_remove(j))
}

/// `[σ_0, σ_1, …, σ_len]` of `values`.
pub fn elementary_symmetric_all(
    order: u32,
    values: &[CyclotomicNumber],
) -> Result<Vec<CyclotomicNumber>, SymfuncError> {
    let mut e = vec![CyclotomicNumber::zero(order)?; values.len() + 1];
    e[0] = CyclotomicNumber::one(order)?;
    for (count, v) in values.iter().enumerate() {
        check_order(order, v)?;
        for i in (1..=count + 1).rev() {
            let term = v.try_mul(&e[i - 1])?;
            e[i] = e[i].try_add(&term)?;
        }
    }
    Ok(e)
}

fn check_order(order: u32, v: &CyclotomicNumber) -> Result<(), SymfuncError> {
    if v.order() != order {
        return Err(CyclotomicError::IncompatibleOrders {
            left: order,
            right: v.order(),
        }
        .into());
    }
    Ok(())
}

/// Complete homogeneous symmetric polynomials `[h_0, …, h_max]`.
pub fn complete_symmetric_all(
    order: u32,
    max: usize,
    values: &[CyclotomicNumber],
) -> Result<Vec<CyclotomicNumber>, SymfuncError> {
    let e = elementary_symmetric_all(order, values)?;
    let mut h = vec![CyclotomicNumber::one(order)?];
    for m in 1..=max {
        let mut acc = CyclotomicNumber::zero(order)?;
        for i in 1..=m.min(values.len()) {
            let term = e[i].try_mul(&h[m - i])?;
            acc = if i % 2 == 1 {
                acc.try_add(&term)?
            } else {
                acc.try_sub(&term)?
            };
        }
        h.push(acc);
    }
    Ok(h)
}

/// Schur polynomial `s_λ(values)` by the Jacobi–Trudi determinant `det(h_{λ_i - i + j})`.
pub fn schur_eval(
    order: u32,
    lambda: &Partition,
    values: &[CyclotomicNumber],
) -> Result<CyclotomicNumber, SymfuncError> {
    let l = lambda.rows();
    if l == 0 {
        return Ok(CyclotomicNumber::one(order)?);
    }
    let max = (lambda.part(0) as usize) + l;
    let h = complete_symmetric_all(order, max, values)?;
    let zero = CyclotomicNumber::zero(order)?;
    let matrix: Vec<Vec<CyclotomicNumber>> = (0..l)
        .map(|i| {
            (0..l)
                .map(|j| {
                    let idx = lambda.part(i) as i64 - i as i64 + j as i64;
                    if idx < 0 {
                        zero.clone()
                    } else {
                        h[idx as usize].clone()
                    }
                })
                .collect()
        })
        .collect();
    Ok(determinant(&matrix, order)?)
}

/// Determinant by cofactor expansion along the first row.
fn determinant(
    m: &[Vec<CyclotomicNumber>],
    order: u32,
) -> Result<CyclotomicNumber, CyclotomicError> {
    let cols: Vec<usize> = (0..m.len()).collect();
    fn rec(
        m: &[Vec<CyclotomicNumber>],
        row: usize,
        cols: &[usize],
        order: u32,
    ) -> Result<CyclotomicNumber, CyclotomicError> {
        if cols.is_empty() {
            return CyclotomicNumber::one(order);
        }
        let mut acc = CyclotomicNumber::zero(order)?;
        for (pos, &c) in cols.iter().enumerate() {
            if m[row][c].is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = m[row][c].try_mul(&rec(m, row + 1, &rest, order)?)?;
            acc = if pos % 2 == 0 {
                acc.try_add(&term)?
            } else {
                acc.try_sub(&term)?
            };
        }
        Ok(acc)
    }
    rec(m, 0, &cols, order)
}

/// Littlewood–Richardson coefficient `c^ν_{λμ}`, counted by enumerating the
/// LR tableaux of shape `ν/λ` and content `μ`.
pub fn lr_coefficient(lambda: &Partition, mu: &Partition, nu: &Partition) -> u64 {
    if nu.size() != lambda.size() + mu.size() || !nu.contains(lambda) || !nu.contains(mu) {
        return 0;
    }
    // skew cells in reverse reading order: rows top to bottom, right to left
    let mut cells = Vec::with_capacity((nu.size() - lambda.size()) as usize);
    for r in 0..nu.rows() {
        for c in (lambda.part(r)..nu.part(r)).rev() {
            cells.push((r, c as usize));
        }
    }
    let width = nu.part(0) as usize;
    let mut grid = vec![vec![0u32; width]; nu.rows()];
    let content: Vec<u32> = mu.parts().to_vec();
    let mut used = vec![0u32; content.len() + 1];
    let mut count = 0u64;
    lr_fill(
        lambda, nu, &cells, 0, &mut grid, &content, &mut used, &mut count,
    );
    count
}

#[allow(clippy::too_many_arguments)]
fn lr_fill(
    lambda: &Partition,
    nu: &Partition,
    cells: &[(usize, usize)],
    pos: usize,
    grid: &mut [Vec<u32>],
    content: &[u32],
    used: &mut [u32],
    count: &mut u64,
) {
    let Some(&(r, c)) = cells.get(pos) else {
        *count += 1;
        return;
    };
    // rows weakly increase left to right
    let upper = if c + 1 < nu.part(r) as usize {
        grid[r][c + 1]
    } else {
        content.len() as u32
    };
    // columns strictly increase downwards
    let lower = if r > 0 && c >= lambda.part(r - 1) as usize {
        grid[r - 1][c] + 1
    } else {
        1
    };
    for v in lower..=upper {
        let vi = v as usize;
        if used[vi] >= content[vi - 1] {
            continue;
        }
        if vi > 1 && used[vi - 1] <= used[vi] {
            continue;
        }
        used[vi] += 1;
        grid[r][c] = v;
        lr_fill(lambda, nu, cells, pos + 1, grid, content, used, count);
        used[vi] -= 1;
    }
    grid[r][c] = 0;
}

/// Classical product `s_λ s_μ = Σ_ν c^ν_{λμ} s_ν`, restricted to `ν` with at
/// most `max_rows` rows.
pub fn lr_expand(lambda: &Partition, mu: &Partition, max_rows: usize) -> BTreeMap<Partition, u64> {
    let total = lambda.size() + mu.size();
    let cap = lambda.part(0) + mu.part(0);
    let rows = max_rows.min(lambda.rows() + mu.rows());
    let mut out = BTreeMap::new();
    let mut prefix = Vec::with_capacity(rows);
    enumerate_containing(lambda, mu, rows, cap, total, &mut prefix, &mut |nu| {
        let c = lr_coefficient(lambda, mu, &nu);
        if c > 0 {
            out.insert(nu, c);
        }
    });
    out
}

fn enumerate_containing(
    lambda: &Partition,
    mu: &Partition,
    rows: usize,
    cap: u32,
    remaining: u32,
    prefix: &mut Vec<u32>,
    emit: &mut impl FnMut(Partition),
) {
    let i = prefix.len();
    if remaining == 0 {
        if lambda.rows() <= i && mu.rows() <= i {
            emit(Partition::new(prefix.clone()).expect("decreasing by construction"));
        }
        return;
    }
    if i == rows {
        return;
    }
    let lo = lambda.part(i).max(mu.part(i));
    let hi = cap.min(remaining);
    if lo > hi || (hi as u64) * ((rows - i) as u64) < remaining as u64 {
        return;
    }
    for p in (lo.max(1)..=hi).rev() {
        prefix.push(p);
        enumerate_containing(lambda, mu, rows, p, remaining - p, prefix, emit);
        prefix.pop();
    }
}

/// Outcome of reducing a class modulo n-rim hooks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RimHookReduction {
    pub partition: Partition,
    pub q_power: u32,
    pub sign: i8,
}

/// Strips n-rim hooks from `λ` until it fits in the `k x (n-k)` box.
///
/// Each removal contributes one power of `q` and the sign
/// `(-1)^{k - height}`, where height counts the rows the hook meets.
/// Returns `None` when the class vanishes in the quantum ring.
pub fn rim_hook_reduce(
    lambda: &Partition,
    k: u32,
    n: u32,
) -> Result<Option<RimHookReduction>, SymfuncError> {
    if k == 0 || k >= n {
        return Err(SymfuncError::InvalidGrassmannian { k, n });
    }
    if lambda.rows() > k as usize {
        return Err(SymfuncError::ClassOutsideAlgebra {
            rows: lambda.rows(),
            k,
        });
    }
    let k_us = k as usize;
    // beads at λ_i + k - 1 - i (zero-based i)
    let mut beads: Vec<i64> = (0..k_us)
        .map(|i| (lambda.part(i) + k - 1 - i as u32) as i64)
        .collect();
    let n = n as i64;
    let mut q_power = 0u32;
    let mut sign = 1i8;
    loop {
        let mut moved = false;
        for idx in 0..k_us {
            let target = beads[idx] - n;
            if target < 0 || beads.contains(&target) {
                continue;
            }
            let between = beads
                .iter()
                .filter(|&&b| b > target && b < beads[idx])
                .count() as u32;
            let height = between + 1;
            if (k - height) % 2 == 1 {
                sign = -sign;
            }
            beads[idx] = target;
            q_power += 1;
            moved = true;
            break;
        }
        if !moved {
            break;
        }
    }
    beads.sort_unstable_by(|a, b| b.cmp(a));
    let parts: Vec<u32> = beads
        .iter()
        .enumerate()
        .map(|(i, &b)| (b - (k_us - 1 - i) as i64) as u32)
        .collect();
    let partition = Partition::new(parts).expect("distinct beads give a partition");
    if partition.part(0) > (n as u32) - k {
        return Ok(None);
    }
    Ok(Some(RimHookReduction {
        partition,
        q_power,
        sign,
    }))
}

/// Integer combination of Schubert classes `q^d σ_λ` in the quantum
/// cohomology of Gr(k, n).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QuantumClassSum {
    terms: BTreeMap<(Partition, u32), i64>,
}

impl QuantumClassSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, class: Partition, q_power: u32, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let key = (class, q_power);
        let entry = self.terms.entry(key.clone()).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn coefficient(&self, class: &Partition, q_power: u32) -> i64 {
        self.terms
            .get(&(class.clone(), q_power))
            .copied()
            .unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, u32, i64)> {
        self.terms.iter().map(|((p, q), c)| (p, *q, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Specialization at `q = 1`.
    pub fn at_q_one(&self) -> BTreeMap<Partition, i64> {
        let mut out = BTreeMap::new();
        for ((p, _), c) in &self.terms {
            *out.entry(p.clone()).or_insert(0) += c;
        }
        out.retain(|_, c| *c != 0);
        out
    }
}

impl fmt::Display for QuantumClassSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((p, q), c) in &self.terms {
            let (sign, mag) = if *c < 0 { ("-", -c) } else { ("+", *c) };
            if first {
                if *c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if mag != 1 {
                write!(f, "{mag}*")?;
            }
            match q {
                0 => {}
                1 => write!(f, "q*")?,
                _ => write!(f, "q^{q}*")?,
            }
            write!(f, "s{p}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn z(n: u32, e: i64) -> CyclotomicNumber {
        CyclotomicNumber::zeta_pow(n, e).unwrap()
    }

    #[test]
    fn partition_basics() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert_eq!(p(&[3, 1, 0, 0]).parts(), &[3, 1]);
        assert_eq!(p(&[3, 1]).conjugate(), p(&[2, 1, 1]));
        assert_eq!(p(&[2, 1]).complement(2, 2), Some(p(&[1])));
        assert_eq!(p(&[3]).complement(2, 2), None);
        assert_eq!("(2,1)".parse::<Partition>().unwrap(), p(&[2, 1]));
        assert_eq!("".parse::<Partition>().unwrap(), Partition::empty());
        assert_eq!(p(&[2, 1]).to_string(), "(2,1)");
        assert_eq!(partitions_in_box(2, 2).len(), 6);
        assert_eq!(partitions_in_box(3, 3).len(), 20);
        let b = partitions_in_box(2, 3);
        assert_eq!(b.first(), Some(&Partition::empty()));
        assert_eq!(b.last(), Some(&p(&[3, 3])));
    }

    #[test]
    fn elementary_symmetric_examples() {
        let n = 6;
        let one = CyclotomicNumber::one(n).unwrap();
        assert_eq!(
            elementary_symmetric(n, 0, &[z(n, 1), z(n, 4)]).unwrap(),
            one
        );
        assert_eq!(elementary_symmetric(n, 0, &[]).unwrap(), one);
        let minus = -&one;
        assert!(elementary_symmetric(n, 1, &[one.clone(), minus])
            .unwrap()
            .is_zero());
        assert_eq!(
            elementary_symmetric(3, 2, &[z(3, 1), z(3, 2)]).unwrap(),
            CyclotomicNumber::one(3).unwrap()
        );
        assert!(elementary_symmetric(3, 5, &[z(3, 1)]).unwrap().is_zero());
        assert!(matches!(
            elementary_symmetric(3, 1, &[z(3, 1), z(4, 1)]),
            Err(SymfuncError::Cyclotomic(
                CyclotomicError::IncompatibleOrders { .. }
            ))
        ));
    }

    #[test]
    fn schur_of_columns_and_rows() {
        let n = 7;
        let vals = [z(n, 1), z(n, 3), z(n, 4)];
        let e = elementary_symmetric_all(n, &vals).unwrap();
        let h = complete_symmetric_all(n, 3, &vals).unwrap();
        for j in 0..=3u32 {
            assert_eq!(
                schur_eval(n, &Partition::column(j), &vals).unwrap(),
                e[j as usize]
            );
            let row = Partition::new(vec![j]).unwrap();
            assert_eq!(schur_eval(n, &row, &vals).unwrap(), h[j as usize]);
        }
        // s_(2,1)(x,y,z) = h1 h2 - h3
        let s21 = schur_eval(n, &p(&[2, 1]), &vals).unwrap();
        assert_eq!(s21, &(&h[1] * &h[2]) - &h[3]);
    }

    #[test]
    fn lr_examples() {
        assert_eq!(lr_coefficient(&p(&[1]), &p(&[2]), &p(&[2, 1])), 1);
        assert_eq!(lr_coefficient(&p(&[1]), &p(&[1]), &p(&[1, 1])), 1);
        assert_eq!(lr_coefficient(&p(&[1]), &p(&[1]), &p(&[3])), 0);
        assert_eq!(lr_coefficient(&p(&[2, 1]), &p(&[2, 1]), &p(&[3, 2, 1])), 2);
        let prod = lr_expand(&p(&[1]), &p(&[1]), 2);
        assert_eq!(prod.len(), 2);
        assert_eq!(prod[&p(&[2])], 1);
        assert_eq!(prod[&p(&[1, 1])], 1);
        // row limit truncates
        assert_eq!(lr_expand(&p(&[1]), &p(&[1]), 1).len(), 1);
    }

    #[test]
    fn rim_hook_examples() {
        let inside = rim_hook_reduce(&p(&[2, 1]), 2, 4).unwrap().unwrap();
        assert_eq!(
            (inside.partition, inside.q_power, inside.sign),
            (p(&[2, 1]), 0, 1)
        );
        let r = rim_hook_reduce(&p(&[3, 3]), 2, 4).unwrap().unwrap();
        assert_eq!((r.partition, r.q_power, r.sign), (p(&[2]), 1, 1));
        let r = rim_hook_reduce(&p(&[3, 2]), 2, 4).unwrap().unwrap();
        assert_eq!((r.partition, r.q_power, r.sign), (p(&[1]), 1, 1));
        // (3) in Gr(2,4): hook lengths 4,2,1 on row... only length 4 absent, vanishes
        assert_eq!(rim_hook_reduce(&p(&[3]), 2, 4).unwrap(), None);
        assert_eq!(
            rim_hook_reduce(&p(&[1, 1, 1]), 2, 4).unwrap_err(),
            SymfuncError::ClassOutsideAlgebra { rows: 3, k: 2 }
        );
        // a horizontal hook in Gr(2,4) has height 1 and sign -1
        let r = rim_hook_reduce(&p(&[4]), 2, 4).unwrap().unwrap();
        assert_eq!(
            (r.partition, r.q_power, r.sign),
            (Partition::empty(), 1, -1)
        );
    }

    #[test]
    fn quantum_class_sum_bookkeeping() {
        let mut s = QuantumClassSum::new();
        s.add_term(p(&[1]), 1, 2);
        s.add_term(p(&[1]), 0, 1);
        s.add_term(p(&[1]), 1, -2);
        assert_eq!(s.coefficient(&p(&[1]), 1), 0);
        assert_eq!(s.terms().count(), 1);
        s.add_term(p(&[2]), 2, -3);
        assert_eq!(s.to_string(), "s(1) - 3*q^2*s(2)");
        assert_eq!(s.at_q_one().len(), 2);
    }
}
