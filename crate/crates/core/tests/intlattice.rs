mod common;

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tamegroup::intlattice::{hnf, hnf_i64, lattice_member, mixed_subgroup_lift, multiplicative_rank_exact, to_big};

/// All combinations `sum c_k g_k` with `c_k` in `[-8, 8]`.
fn combinations(gens: &[Vec<i64>]) -> HashSet<Vec<i64>> {
    let n = gens[0].len();
    let mut out: HashSet<Vec<i64>> = HashSet::from([vec![0; n]]);
    for g in gens {
        let mut next = HashSet::new();
        for v in &out {
            for c in -8..=8i64 {
                next.insert(v.iter().zip(g).map(|(a, b)| a + c * b).collect::<Vec<_>>());
            }
        }
        out = next;
    }
    out
}

/// Rational coefficients of `v` in the span of independent `gens`, via the
/// normal equations; `None` if `v` is outside the span.
fn rational_coefficients(gens: &[Vec<i64>], v: &[i64]) -> Option<Vec<BigRational>> {
    let k = gens.len();
    let r = |x: i64| BigRational::from_integer(x.into());
    let dot = |a: &[i64], b: &[i64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<i64>();
    let mut a: Vec<Vec<BigRational>> = (0..k)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..k).map(|j| r(dot(&gens[i], &gens[j]))).collect();
            row.push(r(dot(&gens[i], v)));
            row
        })
        .collect();
    for c in 0..k {
        let p = (c..k).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let pivot = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x /= pivot.clone();
        }
        for i in 0..k {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let row_c = a[c].clone();
                for (x, y) in a[i].iter_mut().zip(row_c) {
                    *x -= f.clone() * y;
                }
            }
        }
    }
    let coeffs: Vec<BigRational> = a.iter().map(|row| row[k].clone()).collect();
    let back: Vec<BigRational> = (0..v.len())
        .map(|t| coeffs.iter().zip(gens).fold(BigRational::zero(), |acc, (c, g)| acc + c.clone() * r(g[t])))
        .collect();
    (back == v.iter().map(|&x| r(x)).collect::<Vec<_>>()).then_some(coeffs)
}

fn independent(gens: &[Vec<i64>]) -> bool {
    let rows: Vec<Vec<tamegroup::GaussianRational>> =
        gens.iter().map(|g| g.iter().map(|&x| tamegroup::GaussianRational::from_real(BigRational::from_integer(x.into()))).collect()).collect();
    tamegroup::Matrix::from_rows(rows).unwrap().rank(0.0) == gens.len()
}

/// Checks membership against the exact solve everywhere, and against the
/// bounded search wherever the exact coefficients lie in `[-8, 8]`.
fn check_against_oracles(member: impl Fn(&[i64]) -> bool, gens: &[Vec<i64>], n: usize) -> usize {
    let reach = combinations(gens);
    let mut decided = 0;
    for v in cube(n, 10) {
        let got = member(&v);
        let coeffs = rational_coefficients(gens, &v);
        let integral = coeffs.as_ref().is_some_and(|c| c.iter().all(|x| x.is_integer()));
        assert_eq!(got, integral, "gens {gens:?} v {v:?}");
        let bounded = coeffs.as_ref().is_none_or(|c| c.iter().all(|x| x.abs() <= BigRational::from_integer(8.into())));
        if bounded {
            decided += 1;
            assert_eq!(got, reach.contains(&v), "gens {gens:?} v {v:?}");
        } else {
            assert!(!reach.contains(&v));
        }
    }
    decided
}

fn cube(n: usize, r: i64) -> Vec<Vec<i64>> {
    (0..n).fold(vec![vec![]], |acc, _| {
        acc.into_iter().flat_map(|v| (-r..=r).map(move |x| [v.clone(), vec![x]].concat())).collect()
    })
}

#[test]
fn membership_matches_brute_force_on_random_lattices() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for trial in 0..50 {
        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=n);
        let gens: Vec<Vec<i64>> = loop {
            let g: Vec<Vec<i64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(-10..=10)).collect()).collect();
            if independent(&g) {
                break g;
            }
        };
        let lattice = hnf_i64(&gens).unwrap();
        let decided = check_against_oracles(|v| lattice_member(&lattice, &to_big(v)).unwrap(), &gens, n);
        assert!(decided > 0, "trial {trial}");
    }
}

#[test]
fn documented_membership_examples() {
    let l = hnf_i64(&[vec![2, 0], vec![1, 3]]).unwrap();
    assert!(lattice_member(&l, &to_big(&[2, 0])).unwrap());
    assert!(!lattice_member(&l, &to_big(&[1, 0])).unwrap());
    assert!(!combinations(&[vec![2, 0], vec![1, 3]]).contains(&vec![1, 0]));
    assert!(lattice_member(&l, &to_big(&[0, 0])).unwrap());
    assert!(lattice_member(&l, &to_big(&[1, 0, 0])).is_err());
}

#[test]
fn mixed_lift_example_matches_oracle() {
    let ms = mixed_subgroup_lift(&[to_big(&[2, 1])], 4, 1, 1).unwrap();
    check_against_oracles(|v| ms.contains(&to_big(v)).unwrap(), &[vec![2, 1], vec![4, 0]], 2);
    assert!(ms.contains(&to_big(&[0, 2])).unwrap());
    assert!(ms.contains(&to_big(&[4, 0])).unwrap());
    assert!(!ms.contains(&to_big(&[1, 0])).unwrap());
}

fn gens_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=3).prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec(-10i64..=10, n), 1..=4))
}

proptest! {
    #[test]
    fn hnf_is_idempotent_and_order_independent(gens in gens_strategy(), seed in any::<u64>()) {
        let l = hnf_i64(&gens).unwrap();
        if l.rank() > 0 {
            prop_assert_eq!(hnf(&l.basis).unwrap(), l.clone());
        }
        let mut shuffled = gens.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.gen_range(0..=i));
        }
        prop_assert_eq!(hnf_i64(&shuffled).unwrap(), l.clone());
        for g in &gens {
            prop_assert!(lattice_member(&l, &to_big(g)).unwrap());
        }
    }

    #[test]
    fn mixed_membership_ignores_torsion_shifts(gens in proptest::collection::vec((0i64..6, -5i64..=5, -5i64..=5), 0..3),
                                               v in (-12i64..=12, -12i64..=12, -12i64..=12), k in -3i64..=3, coord in 0usize..2) {
        let m = 6;
        let gens: Vec<Vec<BigInt>> = gens.iter().map(|&(a, b, c)| to_big(&[a, (b + 6) % 6, c])).collect();
        let ms = mixed_subgroup_lift(&gens, m as u64, 2, 1).unwrap();
        let base = vec![v.0, v.1, v.2];
        let mut shifted = base.clone();
        shifted[coord] += k * m;
        prop_assert_eq!(ms.contains(&to_big(&base)).unwrap(), ms.contains(&to_big(&shifted)).unwrap());
    }

    #[test]
    fn exact_rank_one_generator_powers(base_num in 2i64..6, base_den in 1i64..4, exps in proptest::collection::vec(-4i32..=4, 1..4)) {
        prop_assume!(exps.iter().any(|&e| e != 0));
        prop_assume!(num_integer::Integer::gcd(&base_num, &base_den) == 1);
        let base = BigRational::new(base_num.into(), base_den.into());
        let moduli: Vec<BigRational> = exps.iter().map(|&e| num_traits::Pow::pow(&base, e)).collect();
        let lat = multiplicative_rank_exact(&moduli).unwrap();
        prop_assert_eq!(lat.rank, 1);
        let gamma: BigRational = lat.primitive.as_ref().unwrap().value.parse::<tamegroup::GaussianRational>().unwrap().re().clone();
        for (mu, &k) in moduli.iter().zip(&lat.primitive.as_ref().unwrap().powers) {
            prop_assert_eq!(&num_traits::Pow::pow(&gamma, k as i32), mu);
        }
    }
}
