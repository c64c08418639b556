use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rmpc::algebra::*;
use rmpc::endo::{build_dickson_curve, extend_dickson, DicksonCurve};
use rmpc::oracle::{chi_from_counts, naive_counts};
use rmpc::par::Parallelism;
use rmpc::rmorder::RMOrder;
use rmpc::schoof::*;

/// `(pi + pi^v)^j` in `Z[pi, pi^v] / (pi pi^v - q)`, as a map from `e` to the
/// coefficient of `pi^e` (`e > 0`) or `pi^v^{-e}` (`e < 0`).
fn psi_power(j: usize, q: &BigInt) -> BTreeMap<i64, BigInt> {
    let mut cur: BTreeMap<i64, BigInt> = BTreeMap::from([(0, BigInt::one())]);
    for _ in 0..j {
        let mut next: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (&e, c) in &cur {
            // times pi: pi^v^m pi = q pi^v^{m-1}
            let (e1, c1) = if e < 0 { (e + 1, c * q) } else { (e + 1, c.clone()) };
            let (e2, c2) = if e > 0 { (e - 1, c * q) } else { (e - 1, c.clone()) };
            *next.entry(e1).or_default() += c1;
            *next.entry(e2).or_default() += c2;
        }
        cur = next;
    }
    cur
}

/// Coefficients of `pi^i + pi^v^i` in powers of `psi`, by peeling off the
/// top monomial.
fn brute_alpha_row(i: usize, q: &BigInt) -> Vec<BigInt> {
    let mut target: BTreeMap<i64, BigInt> = BTreeMap::new();
    *target.entry(i as i64).or_default() += 1;
    *target.entry(-(i as i64)).or_default() += 1;
    let mut row = vec![BigInt::zero(); i + 1];
    for j in (0..=i).rev() {
        let coef = target.get(&(j as i64)).cloned().unwrap_or_default();
        if coef.is_zero() {
            continue;
        }
        for (e, c) in psi_power(j, q) {
            *target.entry(e).or_default() -= &coef * c;
        }
        row[j] = coef;
    }
    assert!(target.values().all(|c| c.is_zero()));
    row
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn alpha_table_matches_expansion(q in 2u64..100_000, g in 1usize..=6) {
        let q = BigInt::from(q);
        let table = alpha_table(g, &q);
        let qf = q.to_f64().unwrap();
        for i in 0..=g {
            let row = brute_alpha_row(i, &q);
            prop_assert_eq!(&table[i], &row);
            // row 0 is the convention pi^0 + pi^v^0 = 2, outside the bound
            for (j, a) in row.iter().enumerate().filter(|_| i >= 1) {
                let bound = (1.0 + (i * i) as f64) * qf.powf((i - j) as f64 / 2.0);
                prop_assert!(a.abs().to_f64().unwrap() <= bound * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn weil_polynomials_round_trip(seed in any::<u64>(), g in 1usize..=4) {
        // chi = prod (X^2 - t_i X + q) for real t_i with |t_i| <= 2 sqrt q;
        // chi_psi must then be prod (X - t_i)
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = BigInt::from(rng.gen_range(3u64..5000));
        let bound = (2.0 * q.to_f64().unwrap().sqrt()).floor() as i64;
        let ts: Vec<i64> = (0..g).map(|_| rng.gen_range(-bound..=bound)).collect();
        let mut chi = vec![BigInt::one()];
        let mut chi_psi = vec![BigInt::one()];
        for &t in &ts {
            chi = mul(&chi, &[q.clone(), BigInt::from(-t), BigInt::one()]);
            chi_psi = mul(&chi_psi, &[BigInt::from(-t), BigInt::one()]);
        }
        let z = zeta_from_chi(g, &q, &chi, 2.0).unwrap();
        prop_assert_eq!(&z.s, &chi_psi);
        prop_assert_eq!(from_chi_psi(g, &q, &chi_psi, 2.0).unwrap().c, chi.clone());
        check_functional_equation(&z).unwrap();
        prop_assert!(root_modulus_deviation(&chi, &q) < 1e-6);
    }

    #[test]
    fn planted_traces_survive_crt(seed in any::<u64>(), n in prop::sample::select(vec![5u64, 7])) {
        let order = RMOrder::new(n).unwrap();
        let c_eta = compute_c_eta(&order);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = rng.gen_range(1000u64..1_000_000) as f64;
        let lim = (c_eta * q.sqrt()).floor() as i64;
        let a: Vec<BigInt> = (0..order.g).map(|_| BigInt::from(rng.gen_range(-lim..=lim))).collect();
        let primes = order.select_primes(0, q, c_eta);
        let traces: Vec<ModularTrace> = primes
            .iter()
            .map(|(split, _)| {
                let k: Vec<u64> = split.lambdas.iter().map(|&lam| eval_mod(&a, lam, split.ell)).collect();
                let t = solve_traces_mod_ell(split, &k);
                assert_eq!(t.a_mod_ell, a.iter().map(|x| x.mod_floor(&BigInt::from(split.ell)).to_u64().unwrap()).collect::<Vec<_>>());
                t
            })
            .collect();
        prop_assert_eq!(crt_accumulate(&traces, c_eta, q).unwrap(), a.clone());
        // a wrong residue lands outside the bound or on a different element
        let mut bad = traces.clone();
        bad[0].a_mod_ell[0] = (bad[0].a_mod_ell[0] + 1) % bad[0].ell;
        if let Ok(b) = crt_accumulate(&bad, c_eta, q) { prop_assert_ne!(b, a) }
    }
}

fn mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn eval_mod(a: &[BigInt], x: u64, ell: u64) -> u64 {
    let v = a.iter().rev().fold(BigInt::zero(), |acc, c| acc * BigInt::from(x) + c);
    v.mod_floor(&BigInt::from(ell)).to_u64().unwrap()
}

#[test]
fn lemma_seed_values() {
    for q in [11i64, 109, 1_000_003] {
        let t = alpha_table(2, &BigInt::from(q));
        assert_eq!(t[2][0], BigInt::from(-2 * q));
        assert_eq!(t[2][1], BigInt::zero());
    }
}

fn dc(n: u64, t: i64, p: u64) -> DicksonCurve<PrimeField> {
    let f = PrimeField::new(p).unwrap();
    build_dickson_curve(n, f.from_i64(t), f).unwrap()
}

fn oracle_chi(c: &DicksonCurve<PrimeField>) -> Vec<BigInt> {
    let g = c.genus();
    let counts = naive_counts(&c.curve, g, 1 << 30, Parallelism::Sequential).unwrap();
    chi_from_counts(&counts, &c.field().order(), g).unwrap()
}

fn seq_config(seed: u64) -> CountConfig {
    CountConfig { seed, par: Parallelism::Sequential, ..CountConfig::default() }
}

#[test]
fn oracle_kernels_reproduce_the_oracle() {
    for (n, t, p) in [(5, 1, 29), (5, 3, 41), (7, 10, 29)] {
        let c = dc(n, t, p);
        let res = count(&c, Mode::RmWithOracleKernels, &seq_config(1)).unwrap();
        assert_eq!(res.zeta.c, oracle_chi(&c), "n = {n}, p = {p}");
        for rep in res.per_ell.iter().filter(|r| r.status == EllStatus::Ok) {
            for ((lam, k), sols) in rep.lambdas.iter().zip(&rep.k).zip(&rep.k_solutions) {
                assert_eq!(sols, &vec![*k]);
                assert_eq!(eval_mod(res.zeta.a.as_ref().unwrap(), *lam, rep.ell), *k);
            }
        }
    }
}

#[test]
fn psi_relation_holds_on_divisors() {
    let c = dc(5, 3, 41);
    let res = count(&c, Mode::RmWithOracleKernels, &seq_config(2)).unwrap();
    let a = res.zeta.a.clone().unwrap();
    let mut wrong = a.clone();
    wrong[0] += 1;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for e in [2, 3] {
        let l = build_extension(c.field(), e, 1);
        let ce = extend_dickson(&c, &l);
        for _ in 0..10 {
            let d = ce.curve.random_divisor(&mut rng).unwrap();
            assert!(check_psi_relation(&ce, &a, &d, &mut rng));
        }
        let hits = (0..10)
            .filter(|_| {
                let d = ce.curve.random_divisor(&mut rng).unwrap();
                check_psi_relation(&ce, &wrong, &d, &mut rng)
            })
            .count();
        assert!(hits < 10);
    }
}

#[test]
fn verification_rejects_perturbed_chi() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (n, t, p) in [(5, 1, 109), (5, 1, 29), (7, 10, 29)] {
        let c = dc(n, t, p);
        let g = c.genus();
        let q = BigInt::from(p);
        let chi = oracle_chi(&c);
        let z = zeta_from_chi(g, &q, &chi, 2.0).unwrap();
        verify_chi(&c, &z, 20, &mut rng).unwrap();
        // keep the functional equation but move c_{2g-1}
        for delta in [1i64, -1, 2] {
            let mut bad = z.clone();
            bad.c[2 * g - 1] += delta;
            bad.c[1] += BigInt::from(delta) * q.pow((g - 1) as u32);
            assert!(verify_chi(&c, &bad, 20, &mut rng).is_err());
        }
        let mut asym = z.clone();
        asym.c[0] += 1;
        assert!(check_functional_equation(&asym).is_err());
    }
}

#[test]
fn oracle_is_consistent_with_enumeration_over_extensions() {
    // #C(F_{q^k}) from chi against direct counting over F_{q^k}
    let c = dc(5, 1, 11);
    let chi = oracle_chi(&c);
    let z = zeta_from_chi(2, &BigInt::from(11), &chi, 2.0).unwrap();
    for k in 1..=3usize {
        let l = build_extension(c.field(), k, 7);
        let ce = extend_dickson(&c, &l);
        let r = ce.curve.ring();
        let mut n = BigInt::one();
        let order = l.order();
        let mut idx = BigUint::zero();
        while idx < order {
            let x = l.element_at(&idx);
            let fx = r.eval(ce.curve.f(), &x);
            n += if l.is_zero(&fx) { 1 } else if l.is_square(&fx) { 2 } else { 0 };
            idx += 1u32;
        }
        // N_k = q^k + 1 - sum of k-th powers of the Frobenius roots
        let qk = BigInt::from(11).pow(k as u32);
        assert_eq!(n, &qk + 1 - power_sum(&z.c, k), "k = {k}");
    }
}

/// Sum of the k-th powers of the roots of a monic chi, by Newton.
fn power_sum(c: &[BigInt], k: usize) -> BigInt {
    let d = c.len() - 1;
    let e = |i: usize| if i > d { BigInt::zero() } else if i.is_multiple_of(2) { c[d - i].clone() } else { -c[d - i].clone() };
    let mut p: Vec<BigInt> = vec![BigInt::from(d)];
    for m in 1..=k {
        let mut s = BigInt::zero();
        for i in 1..m {
            let term = e(i) * &p[m - i];
            s += if i % 2 == 1 { term } else { -term };
        }
        let last = e(m) * BigInt::from(m);
        s += if m % 2 == 1 { last } else { -last };
        p.push(s);
    }
    p[k].clone()
}
