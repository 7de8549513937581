use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use vi_core::parabolic::{
    moduli_dimension, parabolic_degree, parabolic_invariant, residue_degree_check, s_invariant,
    slope_compare, weights_from_equivariant, ConnectionSpectrum, MarkedPoint, ParabolicData,
    SlopeComparison,
};
use vi_core::vi_engine::evaluate;
use vi_core::{EvalOptions, InvariantQuery};

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn point(rank: usize) -> impl Strategy<Value = MarkedPoint> {
    proptest::collection::vec(0i64..12, rank).prop_map(|exps| MarkedPoint {
        steps: weights_from_equivariant(12, &exps).unwrap(),
    })
}

fn bundle(rank: u32) -> impl Strategy<Value = ParabolicData> {
    (
        -10i64..=10,
        proptest::collection::vec(point(rank as usize), 0..4),
    )
        .prop_map(move |(d, points)| ParabolicData::new(rank, d, points))
}

proptest! {
    #[test]
    fn degree_is_additive_over_points(a in bundle(4), b in bundle(4)) {
        let mut all = a.points.clone();
        all.extend(b.points.clone());
        let joint = ParabolicData::new(4, a.degree, all);
        let only_b = ParabolicData::new(4, a.degree, b.points.clone());
        let base = BigRational::from_integer(a.degree.into());
        prop_assert_eq!(
            parabolic_degree(&joint).unwrap() - &base,
            (parabolic_degree(&a).unwrap() - &base) + (parabolic_degree(&only_b).unwrap() - &base)
        );
    }

    #[test]
    fn zero_weights_give_plain_degree(r in 1u32..=5, d in -20i64..=20, count in 0usize..4) {
        let points = (0..count)
            .map(|_| MarkedPoint { steps: weights_from_equivariant(7, &vec![0; r as usize]).unwrap() })
            .collect();
        let p = ParabolicData::new(r, d, points);
        prop_assert_eq!(parabolic_degree(&p).unwrap(), BigRational::from_integer(d.into()));
    }

    #[test]
    fn weights_are_sorted_and_complete(order in 1u32..=16, raw in proptest::collection::vec(0u32..1000, 0..10)) {
        let exps: Vec<i64> = raw.iter().map(|&e| (e % order) as i64).collect();
        let steps = weights_from_equivariant(order, &exps).unwrap();
        prop_assert_eq!(steps.iter().map(|s| s.multiplicity as usize).sum::<usize>(), exps.len());
        for w in steps.windows(2) {
            prop_assert!(w[0].weight < w[1].weight);
        }
        for s in &steps {
            prop_assert!(s.weight >= rat(0, 1) && s.weight < rat(1, 1));
        }
    }

    #[test]
    fn s_invariant_plain_and_monotone(
        n in 2u32..=8, g in 0u32..=4, order in 0u32..=6,
        mu in proptest::collection::vec((0i64..12, 1i64..=12), 0..4),
        bump in (1i64..=5, 1i64..=6), at in 0usize..4,
    ) {
        for k in 1..n {
            for eps in 1..n as i64 {
                let plain = s_invariant(n, k, g, eps, 0, &[]).unwrap();
                let expected = (k * (n - k)) as i64 * (g as i64 - 1) + eps;
                prop_assert_eq!(plain.clone(), rat(expected, 1));
                prop_assert_eq!(s_invariant(n, k, g, eps, 0, &[rat(3, 4)]).unwrap(), plain);
            }
        }
        let mu: Vec<BigRational> = mu.into_iter().map(|(a, b)| rat(a, b)).collect();
        let base = s_invariant(n, 1, g, 1, order, &mu).unwrap();
        if !mu.is_empty() {
            let mut raised = mu.clone();
            let i = at % mu.len();
            raised[i] += rat(bump.0, bump.1);
            prop_assert!(s_invariant(n, 1, g, 1, order, &raised).unwrap() >= base);
        }
    }

    #[test]
    fn slope_trichotomy(sub in bundle(2), whole in bundle(4)) {
        let got = slope_compare(&sub, &whole).unwrap();
        let left = parabolic_degree(&sub).unwrap() * rat(4, 1);
        let right = parabolic_degree(&whole).unwrap() * rat(2, 1);
        let expected = match left.cmp(&right) {
            std::cmp::Ordering::Less => SlopeComparison::StrictPass,
            std::cmp::Ordering::Equal => SlopeComparison::Boundary,
            std::cmp::Ordering::Greater => SlopeComparison::Fail,
        };
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn moduli_dimension_parity(r in 1u32..=10, n in 0u32..=10, g in 0u32..=10) {
        let dim = moduli_dimension(r, n, g);
        if (n * r * (r - 1)) % 2 == 0 {
            prop_assert_eq!(dim % 2, 0);
        }
    }

    #[test]
    fn residues_balance_degree(d in -6i64..=6, r in 1u32..=3, pts in 1usize..=3, free in proptest::collection::vec(-5i64..=5, 9)) {
        let mut lambda: Vec<Vec<BigRational>> = (0..pts)
            .map(|i| (0..r as usize).map(|j| rat(free[(i * 3 + j) % 9], 2)).collect())
            .collect();
        let sum: BigRational = lambda.iter().flatten().cloned().sum();
        lambda[0][0] -= sum + BigRational::from_integer(d.into());
        let c = ConnectionSpectrum::new(r, d, lambda.clone()).unwrap();
        prop_assert!(residue_degree_check(&c));
        lambda[0][0] += rat(1, 3);
        prop_assert!(!residue_degree_check(&ConnectionSpectrum::new(r, d, lambda).unwrap()));
    }
}

#[test]
fn rank_violation_is_an_error() {
    let a = ParabolicData::new(3, 0, vec![]);
    let b = ParabolicData::new(3, 1, vec![]);
    assert!(slope_compare(&a, &b).is_err());
}

#[test]
fn parabolic_invariant_shifts_quotient_degree() {
    let opts = EvalOptions::serial();
    // n = 2, k = 1, g = 1, N = 4, μ = [1/2]: shift N·Σμ = 2 lowers e′ by 1
    let q = InvariantQuery::new(2, 1, 1, 0, vec![1, 1]);
    let out = parabolic_invariant(&q, 1, 4, &[rat(1, 2)], &opts).unwrap();
    assert_eq!(&out.s_refined - &out.s_plain, rat(2, 1));
    assert_eq!(out.shifted.e_prime, -1);
    assert_eq!(
        out.result,
        evaluate(&InvariantQuery::new(2, 1, 1, -1, vec![1, 1]), &opts).unwrap()
    );
    // the shifted query must itself be admissible
    let bare = InvariantQuery::new(2, 1, 1, 0, vec![]);
    assert!(parabolic_invariant(&bare, 1, 4, &[rat(1, 2)], &opts).is_err());
    assert!(parabolic_invariant(&bare, 1, 0, &[], &opts).is_ok());
    // a non-integral per-rank shift is refused
    assert!(parabolic_invariant(&q, 1, 1, &[rat(1, 3)], &opts).is_err());
}
