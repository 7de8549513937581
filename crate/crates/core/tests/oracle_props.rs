use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use vi_core::qh_oracle::{oracle_compare, quantum_product, FusionAlgebra};
use vi_core::symfunc::lr_expand;
use vi_core::{InvariantQuery, Partition};

type Graded = BTreeMap<(Partition, u32), i64>;

fn product(a: &Partition, b: &Partition, k: u32, n: u32) -> Graded {
    quantum_product(a, b, k, n)
        .unwrap()
        .terms()
        .map(|(p, q, c)| ((p.clone(), q), c))
        .collect()
}

fn times(x: &Graded, c: &Partition, k: u32, n: u32) -> Graded {
    let mut out = Graded::new();
    for ((p, q), coeff) in x {
        for ((r, q2), c2) in product(p, c, k, n) {
            *out.entry((r, q + q2)).or_insert(0) += coeff * c2;
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

#[test]
fn quantum_product_is_associative_and_commutative() {
    for n in 2..=6u32 {
        for k in 1..n {
            let alg = FusionAlgebra::shared(k, n).unwrap();
            let basis = alg.basis();
            for a in basis {
                for b in basis {
                    let ab = product(a, b, k, n);
                    assert_eq!(ab, product(b, a, k, n));
                    for c in basis {
                        let left = times(&ab, c, k, n);
                        let right = times(&product(b, c, k, n), a, k, n);
                        assert_eq!(left, right, "Gr({k},{n}) {a} {b} {c}");
                    }
                }
            }
        }
    }
}

#[test]
fn classical_part_is_littlewood_richardson() {
    for n in 2..=7u32 {
        for k in 1..n {
            let alg = FusionAlgebra::shared(k, n).unwrap();
            for a in alg.basis() {
                for b in alg.basis() {
                    let expected: BTreeMap<Partition, i64> = lr_expand(a, b, k as usize)
                        .into_iter()
                        .filter(|(p, _)| p.fits_in_box(k, n - k))
                        .map(|(p, c)| (p, c as i64))
                        .collect();
                    let got: BTreeMap<Partition, i64> = product(a, b, k, n)
                        .into_iter()
                        .filter(|((_, q), _)| *q == 0)
                        .map(|((p, _), c)| (p, c))
                        .collect();
                    assert_eq!(got, expected);
                }
            }
        }
    }
}

#[test]
fn pairing_is_unimodular() {
    for n in 2..=8u32 {
        for k in 1..n {
            let alg = FusionAlgebra::shared(k, n).unwrap();
            let binom = (1..=k).fold(1usize, |acc, i| acc * (n - k + i) as usize / i as usize);
            assert_eq!(alg.dimension(), binom);
            assert!(alg.pairing_determinant().abs().is_one(), "Gr({k},{n})");
        }
    }
}

fn class_lists(basis: &[Partition], max_len: usize) -> Vec<Vec<Partition>> {
    let mut out = vec![vec![]];
    let mut frontier: Vec<(usize, Vec<Partition>)> = vec![(0, vec![])];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (start, list) in &frontier {
            for (i, p) in basis.iter().enumerate().skip(*start) {
                let mut l = list.clone();
                l.push(p.clone());
                out.push(l.clone());
                next.push((i, l));
            }
        }
        frontier = next;
    }
    out
}

#[test]
fn handle_trace_matches_eigenbasis() {
    for n in 2..=5u32 {
        for k in 1..n {
            let alg = FusionAlgebra::shared(k, n).unwrap();
            for classes in class_lists(alg.basis(), 2) {
                for g in 0..=2 {
                    assert_eq!(
                        alg.correlator(&classes, g).unwrap(),
                        alg.correlator_eigen(&classes, g).unwrap(),
                        "Gr({k},{n}) g={g} {classes:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn formal_q_collapses_to_one_power() {
    for n in 2..=4u32 {
        for k in 1..n {
            let alg = FusionAlgebra::shared(k, n).unwrap();
            for classes in class_lists(alg.basis(), 3) {
                for g in 0..=2 {
                    let formal = alg.correlator_formal(&classes, g).unwrap();
                    assert!(
                        formal.len() <= 1,
                        "Gr({k},{n}) g={g} {classes:?}: {formal:?}"
                    );
                    let total: BigRational = formal.values().cloned().sum();
                    assert_eq!(total, alg.correlator(&classes, g).unwrap());
                    if let Some((&power, _)) = formal.iter().next() {
                        // degree of the insertion fixes the power of q
                        let size: i64 = classes.iter().map(|c| c.size() as i64).sum();
                        let dim = (k * (n - k)) as i64;
                        let expected = size - dim * (1 - g as i64);
                        assert_eq!(power * n as i64, expected);
                    }
                }
            }
        }
    }
}

#[test]
fn duality_and_unit() {
    for n in 2..=6u32 {
        for k in 1..n {
            let alg = FusionAlgebra::shared(k, n).unwrap();
            for p in alg.basis() {
                let dual = p.complement(k, n - k).unwrap();
                assert!(alg.correlator(&[p.clone(), dual], 0).unwrap().is_one());
                let unit = alg.unit();
                assert_eq!(alg.multiply(&unit, &unit), unit);
            }
            let trace = alg.correlator(&[], 1).unwrap();
            assert_eq!(trace, BigRational::from_integer(alg.dimension().into()));
            assert!(alg.correlator(&[], 0).unwrap().is_zero() || k * (n - k) == 0);
        }
    }
}

#[test]
fn inadmissible_query_is_an_error() {
    let q = InvariantQuery::new(2, 1, 1, 0, vec![1]);
    let err = oracle_compare(&q).unwrap_err();
    assert!(err.to_string().contains("degree condition violated"));
}
