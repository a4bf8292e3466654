use std::collections::HashMap;

use num::{BigInt, BigRational};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dforge::arith::{builtin, LogScalar};
use dforge::independence::RowLabel;
use dforge::{
    certify_algebraic_independence, certify_linear_independence, coefficient_matrix, convolve,
    monomial_family, rank_exact, rank_numeric, scale, ArithFunc, CoeffMatrix, Complex64,
    GaussRational, PolyCoeff, Verdict,
};

fn f(name: &str) -> ArithFunc {
    builtin(name).unwrap()
}

/// Replaces each `log p` by an independent random rational, then eliminates
/// with plain fractions. Substitution can only lower the rank, and for
/// random values it almost surely does not.
fn oracle_rank(m: &CoeffMatrix, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut logs: HashMap<u64, BigRational> = HashMap::new();
    let mut rows: Vec<Vec<GaussRational>> = m
        .entries()
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    let mut acc = GaussRational::zero();
                    for (mono, c) in e.terms() {
                        let mut v = GaussRational::one();
                        for &(p, k) in mono.pairs() {
                            let lp = logs
                                .entry(p)
                                .or_insert_with(|| {
                                    BigRational::new(BigInt::from(rng.gen_range(1..10_000i64)), BigInt::from(rng.gen_range(1..1000i64)))
                                })
                                .clone();
                            v = &v * &GaussRational::real(lp).pow(k);
                        }
                        acc = &acc + &(&v * c);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else { continue };
        rows.swap(rank, p);
        let inv = rows[rank][col].inv().unwrap();
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] * &inv;
            for c in col..cols {
                let t = &factor * &rows[rank][c];
                rows[r][c] = &rows[r][c] - &t;
            }
        }
        rank += 1;
    }
    rank
}

fn corpus() -> Vec<CoeffMatrix> {
    let mut out = Vec::new();
    let names = ["e", "one", "mu", "lambda_liouville", "d", "N", "vonmangoldt", "chi_5_1"];
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            for m in 0..=2 {
                out.push(coefficient_matrix(&[f(a), f(b)], m, 48).unwrap());
            }
        }
    }
    out.push(coefficient_matrix(&[f("one"), scale(PolyCoeff::from_int(2), &f("one"))], 1, 16).unwrap());
    out.push(coefficient_matrix(&monomial_family(&[f("one"), f("mu")], 2), 0, 32).unwrap());
    out
}

#[test]
fn matrix_examples() {
    let e = coefficient_matrix(&[f("e")], 0, 4).unwrap();
    let want: Vec<LogScalar> = [1, 0, 0, 0].iter().map(|&v| LogScalar::from_int(v)).collect();
    assert_eq!(e.entries(), &[want]);

    let one = coefficient_matrix(&[f("one")], 1, 3).unwrap();
    assert!((1..=3).all(|n| one.entry(0, n).is_one()));
    assert!(one.entry(1, 1).is_zero());
    assert_eq!(one.entry(1, 2), &-&LogScalar::log_of_factorization(&[(2, 1)]));
    assert_eq!(one.entry(1, 3), &-&LogScalar::log_of_factorization(&[(3, 1)]));
    assert_eq!(one.row_labels()[1], RowLabel { function: "one".into(), order: 1 });
    assert_eq!(one.row_labels()[1].to_string(), "one^(1)");

    let om = coefficient_matrix(&[f("one"), f("mu")], 0, 4).unwrap();
    let mu_row: Vec<LogScalar> = [1, -1, -1, 0].iter().map(|&v| LogScalar::from_int(v)).collect();
    assert_eq!(om.entries()[1], mu_row);

    let err = coefficient_matrix(&[f("one"), f("mu")], 2, 5).unwrap_err();
    assert!(matches!(err, dforge::IndependenceError::HorizonTooSmall { horizon: 5, rows: 6 }));
    let z_func = scale(PolyCoeff::z(), &f("one"));
    assert!(matches!(
        coefficient_matrix(&[z_func], 0, 4),
        Err(dforge::IndependenceError::UnsupportedCoefficients { n: 1, .. })
    ));
}

#[test]
fn rank_examples() {
    assert_eq!(rank_exact(&coefficient_matrix(&[f("e")], 0, 4).unwrap()).rank, 1);
    let prop = rank_exact(&coefficient_matrix(&[f("one"), scale(PolyCoeff::from_int(2), &f("one"))], 0, 8).unwrap());
    assert_eq!((prop.rank, prop.expected, prop.verdict), (1, 2, Verdict::NotCertified));

    let m = coefficient_matrix(&[f("one"), f("mu"), derivative_of_one()], 0, 16).unwrap();
    let r = rank_exact(&m);
    assert_eq!(r.rank, 3);
    assert_eq!(r.rank, oracle_rank(&m, 1));
    assert_eq!(r.pivot_columns.len(), 3);

    let r = certify_linear_independence(&[f("one"), f("mu")], 1, 64).unwrap();
    assert_eq!((r.rank, r.expected), (4, 4));
    assert!(r.is_certified());
    assert_eq!(oracle_rank(&coefficient_matrix(&[f("one"), f("mu")], 1, 64).unwrap(), 2), 4);

    let r = certify_linear_independence(&[f("e"), f("one")], 0, 4).unwrap();
    assert_eq!(r.rank, 2);
    assert!(r.is_certified());
}

fn derivative_of_one() -> ArithFunc {
    dforge::derivative(&f("one"), 1).with_name("one^(1)")
}

#[test]
fn numeric_rank_examples() {
    let id = nalgebra::DMatrix::<Complex64>::identity(3, 3);
    assert_eq!(rank_numeric(&id), 3);
    let u = nalgebra::DVector::from_fn(4, |i, _| Complex64::new(i as f64 + 1.0, 0.5));
    let v = nalgebra::DVector::from_fn(4, |i, _| Complex64::new(1.0, -(i as f64)));
    assert_eq!(rank_numeric(&(&u * v.transpose())), 1);
}

#[test]
fn monomial_examples() {
    let fam = monomial_family(&[f("one")], 3);
    assert_eq!(fam.len(), 3);
    let d3_4 = (1..=4u64).flat_map(|a| (1..=4u64).map(move |b| (a, b))).filter(|(a, b)| 4 % (a * b) == 0).count();
    assert_eq!(fam[2].scalar(4), Some(GaussRational::from_int(d3_4 as i64)));
    assert_eq!(d3_4, 6);
    assert_eq!(fam[1].scalar(12), Some(GaussRational::from_int(6)));

    let e5 = monomial_family(&[f("e")], 5);
    assert_eq!(e5.len(), 5);
    assert!(e5.iter().all(|m| (1..=16).all(|n| m.coeff(n) == f("e").coeff(n))));

    let ab = monomial_family(&[f("one"), f("mu")], 2);
    let names: Vec<_> = ab.iter().map(ArithFunc::label).collect();
    assert_eq!(names, ["one", "mu", "one^2", "one*mu", "mu^2"]);
    let one_mu = convolve(&f("one"), &f("mu"));
    assert!((1..=32).all(|n| ab[3].coeff(n) == one_mu.coeff(n)));
}

#[test]
fn algebraic_examples() {
    let r = certify_algebraic_independence(&[f("one")], 3, 64).unwrap();
    assert_eq!(r.rank, 3);
    assert!(r.is_certified());
    let r = certify_algebraic_independence(&[f("e")], 2, 8).unwrap();
    assert_eq!((r.rank, r.expected), (1, 2));
    assert!(!r.is_certified());
    let r = certify_algebraic_independence(&[f("mu"), f("one")], 1, 16).unwrap();
    assert_eq!(r.rank, 2);
    assert!(certify_algebraic_independence(&[f("one")], 0, 8).is_err());
}

#[test]
fn report_json_shape() {
    let r = certify_linear_independence(&[f("one"), f("mu")], 0, 8).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["rank", "expected", "horizon", "verdict", "pivot_columns", "row_labels"] {
        assert!(keys.contains(&k), "{k}");
    }
    assert_eq!(v["verdict"], "certified_independent");
}

#[test]
fn exact_and_numeric_ranks_agree() {
    for (i, m) in corpus().into_iter().enumerate() {
        let exact = rank_exact(&m).rank;
        assert_eq!(exact, rank_numeric(&m.to_numeric()), "matrix {i}: {:?}", m.row_labels());
        assert_eq!(exact, oracle_rank(&m, i as u64), "matrix {i}");
    }
}

#[test]
fn lemma_pairs_have_full_rank() {
    let names = ["one", "mu", "lambda_liouville"];
    for i in 0..3 {
        for j in i + 1..3 {
            for m in 0..=2 {
                let mat = coefficient_matrix(&[f(names[i]), f(names[j])], m, 64).unwrap();
                let r = rank_exact(&mat);
                assert_eq!(r.rank, 2 * (m as usize + 1), "{} {} m={m}", names[i], names[j]);
                assert_eq!(r.rank, rank_numeric(&mat.to_numeric()));
                assert_eq!(r.rank, oracle_rank(&mat, 99));
            }
        }
    }
}

#[test]
fn rank_grows_with_horizon() {
    let full = coefficient_matrix(&[f("one"), f("mu"), f("d")], 2, 64).unwrap();
    let mut prev = 0;
    let mut certified = false;
    for n in 1..=64 {
        let r = rank_exact(&full.truncated(n));
        assert!(r.rank >= prev, "rank drops at N = {n}");
        assert!(!certified || r.is_certified());
        prev = r.rank;
        certified = r.is_certified();
    }
    assert!(certified);
}

#[test]
fn block_structure() {
    for pair in [["one", "mu"], ["mu", "lambda_liouville"], ["one", "d"]] {
        let funcs = [f(pair[0]), f(pair[1])];
        let base = rank_exact(&coefficient_matrix(&funcs, 0, 48).unwrap()).rank;
        for m in 1..=2 {
            let r = rank_exact(&coefficient_matrix(&funcs, m, 48).unwrap()).rank;
            assert_eq!(r, base * (m as usize + 1), "{pair:?} m={m}");
        }
    }
    // proportional rows stay deficient at every order
    let prop = [f("one"), scale(PolyCoeff::from_int(3), &f("one"))];
    assert_eq!(rank_exact(&coefficient_matrix(&prop, 2, 32).unwrap()).rank, 3);
}

fn scaled_rows(m: &CoeffMatrix, scales: &[GaussRational], order: &[usize]) -> CoeffMatrix {
    let entries = order
        .iter()
        .map(|&i| m.entries()[i].iter().map(|e| e.scale(&scales[i])).collect())
        .collect();
    let labels = order.iter().map(|&i| m.row_labels()[i].clone()).collect();
    CoeffMatrix::from_rows(labels, entries)
}

fn nonzero_gauss() -> impl Strategy<Value = GaussRational> {
    (-20i64..=20, -20i64..=20, 1i64..=9).prop_filter_map("nonzero", |(a, b, q)| {
        let g = &GaussRational::ratio(a, q) + &(&GaussRational::from_int(b) * &GaussRational::i());
        (!g.is_zero()).then_some(g)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rank_is_invariant_under_scaling_and_permutation(
        pick in 0usize..3,
        scales in prop::collection::vec(nonzero_gauss(), 6),
        order in Just((0..6).collect::<Vec<usize>>()).prop_shuffle(),
    ) {
        let sets = [["one", "mu"], ["mu", "lambda_liouville"], ["one", "one"]];
        let m = coefficient_matrix(&[f(sets[pick][0]), f(sets[pick][1])], 2, 24).unwrap();
        let base = rank_exact(&m).rank;
        prop_assert_eq!(rank_exact(&scaled_rows(&m, &scales, &order)).rank, base);
    }
}
