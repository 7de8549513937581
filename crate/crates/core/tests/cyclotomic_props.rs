use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use vi_core::cyclotomic::totient;
use vi_core::{root_power_sum, CyclotomicError, CyclotomicNumber};

fn rational() -> impl Strategy<Value = BigRational> {
    (-40i64..=40, 1i64..=6).prop_map(|(a, b)| BigRational::new(BigInt::from(a), BigInt::from(b)))
}

fn element(order: u32) -> impl Strategy<Value = CyclotomicNumber> {
    proptest::collection::vec(rational(), totient(order))
        .prop_map(move |c| CyclotomicNumber::from_coeffs(order, &c).unwrap())
}

fn units(order: u32) -> Vec<i64> {
    (1..=order as i64)
        .filter(|j| j.gcd(&(order as i64)) == 1)
        .collect()
}

#[test]
fn field_axioms_every_order() {
    for order in 1..=24u32 {
        let mut runner = TestRunner::new(Config::with_cases(200));
        let strat = (element(order), element(order), element(order));
        runner
            .run(&strat, |(a, b, c)| {
                prop_assert_eq!(&a * &b, &b * &a);
                prop_assert_eq!(&a + &b, &b + &a);
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
                prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                prop_assert!((&a - &a).is_zero());
                if !a.is_zero() {
                    let inv = a.inv().unwrap();
                    prop_assert!((&a * &inv).is_one());
                    prop_assert_eq!(
                        a.try_div(&a).unwrap(),
                        CyclotomicNumber::one(order).unwrap()
                    );
                } else {
                    prop_assert_eq!(a.inv(), Err(CyclotomicError::DivisionByZero));
                }
                Ok(())
            })
            .unwrap_or_else(|e| panic!("order {order}: {e}"));
    }
}

#[test]
fn galois_fixes_rational_values() {
    for order in 1..=16u32 {
        let mut runner = TestRunner::new(Config::with_cases(40));
        runner
            .run(&element(order), |a| {
                let js = units(order);
                // norm and trace are rational
                let mut norm = CyclotomicNumber::one(order).unwrap();
                let mut trace = CyclotomicNumber::zero(order).unwrap();
                for &j in &js {
                    let conj = a.galois(j).unwrap();
                    norm = &norm * &conj;
                    trace = &trace + &conj;
                }
                for x in [&norm, &trace] {
                    prop_assert!(x.to_rational().is_ok());
                    for &j in &js {
                        prop_assert_eq!(&x.galois(j).unwrap(), x);
                    }
                }
                if a.to_rational().is_ok() {
                    for &j in &js {
                        prop_assert_eq!(&a.galois(j).unwrap(), &a);
                    }
                }
                Ok(())
            })
            .unwrap_or_else(|e| panic!("order {order}: {e}"));
    }
}

#[test]
fn root_power_sum_matches_explicit_sum() {
    for n in 1..=12u32 {
        for t in -30i64..=30 {
            let mut sum = CyclotomicNumber::zero(n).unwrap();
            for j in 0..n as i64 {
                sum = &sum + &CyclotomicNumber::zeta_pow(n, j * t).unwrap();
            }
            assert_eq!(
                sum.to_rational().unwrap(),
                root_power_sum(n, t),
                "n={n} t={t}"
            );
        }
    }
}

proptest! {
    #[test]
    fn canonical_form_is_unique(order in 1u32..=24, e in -100i64..100) {
        let z = CyclotomicNumber::zeta_pow(order, e).unwrap();
        let via_powers = CyclotomicNumber::zeta_pow(order, 1).unwrap().pow(e).unwrap();
        prop_assert_eq!(&z, &via_powers);
        prop_assert_eq!(z.coeffs().len(), totient(order));
        prop_assert!(z.pow(order as i64).unwrap().is_one());
    }

    #[test]
    fn orders_must_match(a in 1u32..=12, b in 1u32..=12) {
        prop_assume!(a != b);
        let x = CyclotomicNumber::one(a).unwrap();
        let y = CyclotomicNumber::one(b).unwrap();
        let err = x.try_mul(&y).unwrap_err();
        prop_assert!(err.to_string().contains("incompatible cyclotomic orders"));
    }
}
