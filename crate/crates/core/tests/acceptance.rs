//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test -p vi-core --test acceptance` (add `--release` for timings
//! representative of an optimized build).

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use serde_json::Value;
use vi_core::cli::parse_and_dispatch;
use vi_core::qh_oracle::{correlator_genus_g, oracle_value};
use vi_core::subsets::binomial;
use vi_core::symfunc::lr_expand;
use vi_core::vi_engine::{
    degree_split, evaluate, published_sign, vi_invariant_tuples, vi_invariant_with, vi_term,
};
use vi_core::{
    check_admissible, count_maximal, degree_reduce, root_power_sum, twist_reduce, Convention,
    EvalOptions, InvariantQuery, Partition,
};

struct Report {
    failures: usize,
    /// every value produced by criteria 1-7, for the integrality sweep
    values: Vec<(String, BigRational)>,
}

impl Report {
    fn line(&mut self, id: u32, title: &str, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!(
            "criterion {id:>2} [{}] {title}: {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
    }

    fn record(&mut self, q: &InvariantQuery, v: &BigRational) {
        self.values.push((format!("{q:?}"), v.clone()));
    }
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn serial() -> EvalOptions {
    EvalOptions::serial()
}

fn monomials(k: u32, max_len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    let mut frontier: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for m in &frontier {
            let start = m.last().copied().unwrap_or(1);
            for a in start..=k {
                let mut x = m.clone();
                x.push(a);
                next.push(x);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn admissible(
    n: u32,
    k: u32,
    g: u32,
    d: i64,
    mono: &[u32],
    conv: Convention,
) -> Option<InvariantQuery> {
    let e = InvariantQuery::admissible_e_prime(n, k, g, d, mono, conv)?;
    Some(
        InvariantQuery::new(n, k, g, e, mono.to_vec())
            .with_degree(d)
            .with_convention(conv),
    )
}

fn criterion_1(r: &mut Report) {
    let start = Instant::now();
    let (mut checked, mut bad) = (0, Vec::new());
    for n in 2..=8u32 {
        for g in 0..=3u32 {
            for m in 0..=12usize {
                let Some(q) = admissible(n, 1, g, 0, &vec![1; m], Convention::Paper) else {
                    continue;
                };
                let got = vi_invariant_with(&q, &serial()).unwrap().value;
                let expected =
                    int(n as i64).pow(g as i32 - 1) * root_power_sum(n, m as i64 - g as i64 + 1);
                checked += 1;
                if got != expected {
                    bad.push(format!("n={n} g={g} m={m}: {got} != {expected}"));
                }
                r.record(&q, &got);
            }
        }
    }
    let elapsed = start.elapsed();
    r.line(
        1,
        "k'=1 closed form n^(g-1)*root_power_sum(n, m-g+1)",
        bad.is_empty() && elapsed < Duration::from_secs(1),
        format!(
            "{checked} queries, {} mismatches, {elapsed:.2?} (limit 1s) {}",
            bad.len(),
            bad.join("; ")
        ),
    );
}

fn criterion_2(r: &mut Report) {
    let start = Instant::now();
    let mut per_convention = BTreeMap::new();
    let (mut published_flips, mut nonzero) = (0, 0);
    for conv in [Convention::Paper, Convention::Dual] {
        let (mut agree, mut checked) = (0, 0);
        for n in 2..=6u32 {
            for k in 1..n {
                for g in 0..=2u32 {
                    for mono in monomials(k, 8) {
                        let Some(q) = admissible(n, k, g, 0, &mono, conv) else {
                            continue;
                        };
                        let engine = vi_invariant_with(&q, &serial()).unwrap().value;
                        let oracle = oracle_value(&q).unwrap();
                        checked += 1;
                        if engine == oracle {
                            agree += 1;
                        }
                        if !engine.is_zero() {
                            nonzero += 1;
                            if published_sign(&q) != engine_sign_of(&q) {
                                published_flips += 1;
                            }
                        }
                        r.record(&q, &engine);
                    }
                }
            }
        }
        per_convention.insert(conv.to_string(), (agree, checked));
    }
    let elapsed = start.elapsed();
    let pass = per_convention.values().all(|(a, c)| a == c) && elapsed < Duration::from_secs(300);
    let detail: Vec<String> = per_convention
        .iter()
        .map(|(c, (a, n))| format!("{c}: {a}/{n} agree"))
        .collect();
    r.line(
        2,
        "oracle equivalence, n<=6, g<=2, m<=8",
        pass,
        format!(
            "{}; default convention paper; the published prefactor sign would negate {published_flips} of {nonzero} nonzero values; {elapsed:.2?} (limit 300s)",
            detail.join(", ")
        ),
    );
}

/// The sign the engine applies, `(−1)^{e′(k−1)}`.
fn engine_sign_of(q: &InvariantQuery) -> BigRational {
    if (q.e_prime * (q.k as i64 - 1)).rem_euclid(2) == 0 {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

fn criterion_3(r: &mut Report) {
    let one = Partition::new(vec![1]).unwrap();
    let top = Partition::new(vec![2, 2]).unwrap();
    // classical σ₁⁴ in Gr(2,4) by iterated LR expansion
    let mut classes: BTreeMap<Partition, u64> = BTreeMap::from([(Partition::empty(), 1)]);
    for _ in 0..4 {
        let mut next = BTreeMap::new();
        for (p, c) in &classes {
            for (nu, m) in lr_expand(p, &one, 2) {
                if nu.fits_in_box(2, 2) {
                    *next.entry(nu).or_insert(0) += c * m;
                }
            }
        }
        classes = next;
    }
    let lr = classes.get(&top).copied().unwrap_or(0);
    let oracle = correlator_genus_g(&vec![one; 4], 0, 2, 4).unwrap();
    let paper = InvariantQuery::new(4, 2, 0, 0, vec![2; 4]);
    let dual = InvariantQuery::new(4, 2, 0, 0, vec![1; 4]).with_convention(Convention::Dual);
    let ok = check_admissible(&paper) && check_admissible(&dual);
    let vp = vi_invariant_with(&paper, &serial()).unwrap().value;
    let vd = vi_invariant_with(&dual, &serial()).unwrap().value;
    r.record(&paper, &vp);
    r.record(&dual, &vd);
    r.line(
        3,
        "Gr(2,4) genus 0, four sigma_1 insertions",
        ok && lr == 2 && oracle == int(2) && vp == int(2) && vd == int(2),
        format!("LR brute force {lr}, handle trace {oracle}, root sum (paper X_2^4) {vp}, root sum (dual X_1^4) {vd}"),
    );
}

fn criterion_4(r: &mut Report) {
    let mut bad = Vec::new();
    let mut checked = 0;
    for n in 2..=8u32 {
        for k in 1..n {
            let q = InvariantQuery::new(n, k, 1, 0, vec![]);
            let v = vi_invariant_with(&q, &serial()).unwrap().value;
            checked += 1;
            if v != int(binomial(n as u64, k as u64) as i64) {
                bad.push(format!("Gr({k},{n}) gave {v}"));
            }
            r.record(&q, &v);
        }
    }
    r.line(
        4,
        "genus-1 trace vi(n,k,1,0,[]) = C(n,k), n<=8",
        bad.is_empty(),
        format!(
            "{checked} Grassmannians, {} mismatches {}",
            bad.len(),
            bad.join("; ")
        ),
    );
}

fn criterion_5(r: &mut Report) {
    let strategy = (2u32..=6)
        .prop_flat_map(|n| {
            (
                proptest::strategy::Just(n),
                1..n,
                0u32..=2,
                -(2 * n as i64)..=3 * n as i64,
            )
        })
        .prop_flat_map(|(n, k, g, d)| {
            (
                proptest::strategy::Just((n, k, g, d)),
                proptest::collection::vec(1..=k, 0..=6),
                -3i64..=3,
                proptest::bool::ANY,
            )
        });
    let mut runner = TestRunner::deterministic();
    let (mut checked, mut attempts, mut bad) = (0, 0, Vec::new());
    while checked < 100 && attempts < 100_000 {
        attempts += 1;
        let ((n, k, g, d), mono, d_line, dual) = strategy.new_tree(&mut runner).unwrap().current();
        let conv = if dual || (k > 1 && d != 0) {
            Convention::Dual
        } else {
            Convention::Paper
        };
        let Some(q) = admissible(n, k, g, d, &mono, conv) else {
            continue;
        };
        checked += 1;
        let direct = evaluate(&q, &serial()).unwrap().value;
        let twisted = evaluate(&twist_reduce(&q, d_line), &serial())
            .unwrap()
            .value;
        if direct != twisted {
            bad.push(format!("{q:?} d_L={d_line}: {direct} vs {twisted}"));
        }
        r.record(&q, &direct);
    }
    r.line(
        5,
        "twist invariance, 100 random admissible queries, d_L in [-3,3]",
        checked == 100 && bad.is_empty(),
        format!(
            "{checked} queries, {} mismatches {}",
            bad.len(),
            bad.join("; ")
        ),
    );
}

fn criterion_6(r: &mut Report) {
    let (mut checked, mut bad) = (0, Vec::new());
    for n in 2..=5u32 {
        for k in 1..n {
            let conv = if k == 1 {
                Convention::Paper
            } else {
                Convention::Dual
            };
            for g in 0..=2u32 {
                for d in 1..=3 * n as i64 {
                    for mono in monomials(k, 2) {
                        let Some(q) = admissible(n, k, g, d, &mono, conv) else {
                            continue;
                        };
                        let via_reduce = evaluate(&q, &serial()).unwrap().value;
                        let (a, b) = degree_split(d, n);
                        let mut absorbed = mono.clone();
                        absorbed.extend(std::iter::repeat_n(k, b as usize));
                        let manual =
                            InvariantQuery::new(n, k, g, q.e_prime - a * k as i64, absorbed)
                                .with_convention(conv);
                        let rederived = vi_invariant_with(&manual, &serial()).unwrap().value;
                        let oracle = oracle_value(&manual).unwrap();
                        checked += 1;
                        if via_reduce != rederived
                            || via_reduce != oracle
                            || degree_reduce(&q).unwrap() != vec![manual.clone()]
                        {
                            bad.push(format!(
                                "{q:?}: {via_reduce} vs {rederived} vs oracle {oracle}"
                            ));
                        }
                        r.record(&q, &via_reduce);
                    }
                }
            }
        }
    }
    r.line(
        6,
        "degree-reduction factorization, d in [1,3n], n<=5",
        checked > 0 && bad.is_empty(),
        format!(
            "{checked} queries (dual for k>1, paper for k=1), {} mismatches {}",
            bad.len(),
            bad.join("; ")
        ),
    );
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

fn criterion_7(r: &mut Report) {
    let (mut queries, mut terms, mut bad) = (0, 0, Vec::new());
    for n in 2..=5u32 {
        for k in 1..n {
            for g in 0..=2u32 {
                for conv in [Convention::Paper, Convention::Dual] {
                    for mono in monomials(k, 4) {
                        let Some(q) = admissible(n, k, g, 0, &mono, conv) else {
                            continue;
                        };
                        let subsets = vi_invariant_with(&q, &serial()).unwrap();
                        let tuples = vi_invariant_tuples(&q).unwrap();
                        queries += 1;
                        if subsets.value != tuples.value {
                            bad.push(format!("{q:?}: {} vs {}", subsets.value, tuples.value));
                        }
                        // every ordering of a subset contributes the same summand
                        for subset in vi_core::subsets::SubsetRange::all(n as usize, k as usize) {
                            let reference = vi_term(&q, &subset).unwrap();
                            for p in permutations(&subset) {
                                terms += 1;
                                if vi_term(&q, &p).unwrap() != reference {
                                    bad.push(format!("{q:?}: ordering {p:?}"));
                                }
                            }
                        }
                        r.record(&q, &subsets.value);
                    }
                }
            }
        }
    }
    r.line(
        7,
        "subset sum = tuple sum / k!, term-exact, n<=5",
        bad.is_empty(),
        format!(
            "{queries} queries, {terms} ordered terms compared, {} mismatches {}",
            bad.len(),
            bad.join("; ")
        ),
    );
}

fn criterion_8(r: &mut Report) {
    // count case as well, where its sign exponent is integral
    for n in 2..=6u32 {
        for k in 1..n {
            for g in 0..=2u32 {
                for d in -(n as i64)..=0 {
                    if let Ok(c) = count_maximal(n, d, k, g, Convention::Dual, &serial()) {
                        let q = InvariantQuery::new(n, k, g, 0, vec![]).with_degree(d);
                        r.record(&q, &c.value);
                    }
                }
            }
        }
    }
    let non_integral: Vec<&(String, BigRational)> =
        r.values.iter().filter(|(_, v)| !v.is_integer()).collect();
    let detail = format!(
        "{} values from criteria 1-7 and the count formula, {} non-integral {}",
        r.values.len(),
        non_integral.len(),
        non_integral
            .iter()
            .take(5)
            .map(|(q, v)| format!("{q} = {v}"))
            .collect::<Vec<_>>()
            .join("; ")
    );
    let pass = non_integral.is_empty();
    r.line(8, "integrality of every admissible value", pass, detail);
}

fn criterion_9(r: &mut Report) {
    let (mut rows, mut bad) = (0, Vec::new());
    for n in 2..=6u32 {
        for g in 1..=3u32 {
            let args = [
                "vicalc",
                "corollary-report",
                "--n",
                &n.to_string(),
                "--g",
                &g.to_string(),
            ];
            let out = parse_and_dispatch(args);
            let v: Value = serde_json::from_str(out.stdout.trim()).unwrap();
            let labeled = v["claim"]
                .as_str()
                .is_some_and(|c| c.contains("m(n,d,1,g)=n^{ng}"))
                && v["source"]
                    .as_str()
                    .is_some_and(|s| s.contains("corollary"))
                && v["derivation"]
                    .as_str()
                    .is_some_and(|s| s.contains("n^g if n | (b-g+1)"))
                && v["status"]
                    .as_str()
                    .is_some_and(|s| s.contains("documented discrepancy"));
            let text = parse_and_dispatch([&args[..], &["--format", "text"]].concat());
            if !labeled || out.code != 0 || !text.stdout.contains("m(n,d,1,g)=n^{ng}") {
                bad.push(format!("n={n} g={g}: report incomplete"));
            }
            for row in v["rows"].as_array().unwrap() {
                rows += 1;
                let claimed = BigInt::from(n).pow(n * g).to_string();
                let b = row["b"].as_i64().unwrap();
                let formula = if (b - g as i64 + 1).rem_euclid(n as i64) == 0 {
                    BigInt::from(n).pow(g).to_string()
                } else {
                    "0".to_string()
                };
                if row["claimed"] != claimed.as_str()
                    || row["formula"] != formula.as_str()
                    || row["differs"] != true
                {
                    bad.push(format!("n={n} g={g} b={b}: {row}"));
                }
            }
        }
    }
    r.line(
        9,
        "corollary discrepancy report",
        bad.is_empty(),
        format!(
            "{rows} (n,g,b) rows for n 2..6, g 1..3, all differ from n^(ng); {}",
            bad.join("; ")
        ),
    );
}

fn criterion_10(r: &mut Report) {
    let base = [
        "vicalc",
        "vi",
        "--n",
        "20",
        "--k",
        "5",
        "--g",
        "2",
        "--e",
        "-4",
        "--monomial",
        "5",
        "--convention",
        "dual",
    ];
    let t0 = Instant::now();
    let serial_out = parse_and_dispatch([&base[..], &["--workers", "1"]].concat());
    let t_serial = t0.elapsed();
    let t1 = Instant::now();
    let parallel_out = parse_and_dispatch([&base[..], &["--workers", "4"]].concat());
    let t_parallel = t1.elapsed();
    let v: Value = serde_json::from_str(serial_out.stdout.trim()).unwrap_or(Value::Null);
    let limit = Duration::from_secs(10);
    let pass = serial_out.code == 0
        && serial_out == parallel_out
        && v["terms"] == 15504
        && v["integral"] == true
        && t_serial < limit
        && t_parallel < limit;
    r.line(
        10,
        "n=20, k=5, g=2 in Q(zeta_20), serial vs 4 workers",
        pass,
        format!(
            "value {} over {} subsets; serial {t_serial:.2?}, 4 workers {t_parallel:.2?} (limit 10s); byte-identical: {}",
            v["value"], v["terms"], serial_out == parallel_out
        ),
    );
}

fn main() {
    let mut r = Report {
        failures: 0,
        values: Vec::new(),
    };
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r);
    criterion_6(&mut r);
    criterion_7(&mut r);
    criterion_8(&mut r);
    criterion_9(&mut r);
    criterion_10(&mut r);
    println!("acceptance: {} of 10 criteria passed", 10 - r.failures);
    if r.failures > 0 {
        std::process::exit(1);
    }
}
