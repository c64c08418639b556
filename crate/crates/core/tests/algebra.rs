use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rmpc::algebra::*;

fn field_axioms<F: FiniteField>(f: &F, seed: u64) -> std::result::Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let [a, b, c] = [(); 3].map(|_| f.random(&mut rng));
    prop_assert_eq!(f.add(&f.add(&a, &b), &c), f.add(&a, &f.add(&b, &c)));
    prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
    prop_assert_eq!(f.add(&a, &b), f.add(&b, &a));
    prop_assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
    prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
    prop_assert_eq!(f.add(&a, &f.zero()), a.clone());
    prop_assert_eq!(f.mul(&a, &f.one()), a.clone());
    prop_assert!(f.is_zero(&f.add(&a, &f.neg(&a))));
    prop_assert_eq!(f.sub(&a, &b), f.add(&a, &f.neg(&b)));
    match f.inv(&a) {
        None => prop_assert!(f.is_zero(&a)),
        Some(ai) => prop_assert!(f.is_one(&f.mul(&a, &ai))),
    }
    // Fermat and Frobenius
    let q = f.order();
    prop_assert_eq!(f.pow(&a, &q), a.clone());
    let p = BigUint::from(f.characteristic());
    prop_assert_eq!(f.pow(&f.add(&a, &b), &p), f.add(&f.pow(&a, &p), &f.pow(&b, &p)));
    let sq = f.square(&a);
    prop_assert!(f.is_square(&sq));
    let r = f.sqrt(&sq).unwrap();
    prop_assert_eq!(f.square(&r), sq);
    prop_assert_eq!(f.element_at(&f.index_of(&a)), a.clone());
    Ok(())
}

fn f109() -> PrimeField {
    PrimeField::new(109).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn prime_fields_are_fields(seed in any::<u64>(), i in 0usize..4) {
        let p = [3u64, 109, 65_537, 4_294_967_291][i];
        field_axioms(&PrimeField::new(p).unwrap(), seed)?;
    }

    #[test]
    fn extension_fields_are_fields(seed in any::<u64>(), k in 2usize..7) {
        field_axioms(&build_extension(&PrimeField::new(11).unwrap(), k, seed % 5), seed)?;
    }

    #[test]
    fn towers_are_fields(seed in any::<u64>()) {
        let l = build_extension(&PrimeField::new(7).unwrap(), 2, 1);
        field_axioms(&build_extension(&l, 3, 2), seed)?;
    }

    #[test]
    fn ring_laws(a in prop::collection::vec(0u64..109, 0..30), b in prop::collection::vec(0u64..109, 1..20), c in prop::collection::vec(0u64..109, 0..10)) {
        let r = PolyRing::new(f109());
        let (a, b, c) = (r.from_coeffs(a), r.from_coeffs(b), r.from_coeffs(c));
        prop_assert_eq!(r.mul(&a, &r.add(&b, &c)), r.add(&r.mul(&a, &b), &r.mul(&a, &c)));
        prop_assert_eq!(r.mul(&r.mul(&a, &b), &c), r.mul(&a, &r.mul(&b, &c)));
        prop_assert_eq!(r.square(&a), r.mul(&a, &a));
        prop_assert_eq!(r.compose(&a, &r.add(&r.x(), &c)).degree().is_some(), !a.is_zero());
        if !b.is_zero() {
            let (qt, rm) = r.divrem(&a, &b).unwrap();
            prop_assert_eq!(r.add(&r.mul(&qt, &b), &rm), a.clone());
            prop_assert!(rm.deg_i() < b.deg_i());
            let x0 = r.field().from_i64(5);
            prop_assert_eq!(r.eval(&r.mul(&a, &b), &x0), r.field().mul(&r.eval(&a, &x0), &r.eval(&b, &x0)));
        }
        let (g, s, t) = r.xgcd(&a, &b);
        prop_assert_eq!(r.add(&r.mul(&s, &a), &r.mul(&t, &b)), g.clone());
        if !g.is_zero() {
            prop_assert!(r.rem(&a, &g).unwrap().is_zero());
            prop_assert!(r.rem(&b, &g).unwrap().is_zero());
            prop_assert_eq!(r.gcd(&a, &b), g);
        }
    }

    #[test]
    fn squarefree_part_of_f_g_squared(seed in any::<u64>(), df in 1usize..12, dg in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fld = f109();
        let r = PolyRing::new(fld.clone());
        let rand_monic = |d: usize, rng: &mut ChaCha8Rng| {
            let mut c: Vec<u64> = (0..d).map(|_| fld.random(rng)).collect();
            c.push(1);
            r.from_coeffs(c)
        };
        let f = rand_monic(df, &mut rng);
        let g = rand_monic(dg, &mut rng);
        let h = r.mul(&f, &r.square(&g));
        let s = squarefree_part(&r, &h);
        // squarefree, divides f g, and every root of h is a root of s
        prop_assert!(r.is_one(&r.gcd(&s, &r.derivative(&s))));
        prop_assert!(r.rem(&r.mul(&f, &g), &s).unwrap().is_zero());
        prop_assert!(r.rem(&r.pow(&s, 3 * (df + dg) as u64), &h).unwrap().is_zero());
        let dec = squarefree_decomposition(&r, &h);
        let back = dec.iter().fold(r.one(), |acc, (p, e)| r.mul(&acc, &r.pow(p, *e as u64)));
        prop_assert_eq!(back, h);
    }

    #[test]
    fn resultant_properties(seed in any::<u64>(), da in 1usize..8, db in 1usize..8, dc in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fld = f109();
        let r = PolyRing::new(fld.clone());
        let mut rand_poly = |d: usize| {
            let mut c: Vec<u64> = (0..d).map(|_| fld.random(&mut rng)).collect();
            c.push(fld.random_nonzero(&mut rng));
            r.from_coeffs(c)
        };
        let (a, b, c) = (rand_poly(da), rand_poly(db), rand_poly(dc));
        let ab = r.mul(&a, &b);
        prop_assert_eq!(r.resultant(&ab, &c), fld.mul(&r.resultant(&a, &c), &r.resultant(&b, &c)));
        // Res(a, b) = (-1)^{deg a deg b} Res(b, a)
        let sign = if da * db % 2 == 1 { fld.from_i64(-1) } else { fld.one() };
        prop_assert_eq!(r.resultant(&a, &b), fld.mul(&sign, &r.resultant(&b, &a)));
        // a common factor forces zero
        prop_assert!(fld.is_zero(&r.resultant(&r.mul(&a, &c), &r.mul(&b, &c))));
        // a linear factor evaluates: Res(X - x0, b) = b(x0)
        let x0 = fld.random(&mut rng);
        prop_assert_eq!(r.resultant(&r.linear(&x0), &b), r.eval(&b, &x0));
    }

    #[test]
    fn factorization_round_trip(seed in any::<u64>(), d in 1usize..25) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fld = f109();
        let r = PolyRing::new(fld.clone());
        let mut c: Vec<u64> = (0..d).map(|_| fld.random(&mut rng)).collect();
        c.push(1);
        let f = r.from_coeffs(c);
        let mut product = r.one();
        for (sq, e) in squarefree_decomposition(&r, &f) {
            for (deg, h) in distinct_degree_factors(&r, &sq, d) {
                for irr in equal_degree_split(&r, &h, deg, &mut rng) {
                    prop_assert_eq!(irr.degree(), Some(deg));
                    prop_assert!(is_irreducible(&r, &irr));
                    product = r.mul(&product, &r.pow(&irr, e as u64));
                }
            }
        }
        prop_assert_eq!(product, f.clone());
        let rts = roots(&r, &f, &mut rng).unwrap();
        for x in &rts {
            prop_assert!(fld.is_zero(&r.eval(&f, x)));
        }
        let scanned = (0..109u64).filter(|x| fld.is_zero(&r.eval(&f, x))).count();
        prop_assert_eq!(rts.len(), scanned);
        prop_assert_eq!(roots_in_prime_field(&r, &f).unwrap().len(), scanned);
    }
}

#[test]
fn irreducibility_matches_root_count_for_cubics() {
    // a cubic is irreducible iff it has no root
    let fld = PrimeField::new(13).unwrap();
    let r = PolyRing::new(fld.clone());
    for a in 0..13u64 {
        for b in 0..13u64 {
            let f = r.from_coeffs(vec![b, a, 0, 1]);
            let has_root = (0..13u64).any(|x| fld.is_zero(&r.eval(&f, &x)));
            assert_eq!(is_irreducible(&r, &f), !has_root, "{f:?}");
        }
    }
}

#[test]
fn extension_norm_trace_and_embedding() {
    let base = PrimeField::new(11).unwrap();
    let l6 = build_extension(&base, 6, 3);
    let l2 = build_extension(&base, 2, 9);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let img = l2.embedding_into(&l6, &mut rng).unwrap();
    for _ in 0..50 {
        let a = l2.random(&mut rng);
        let b = l2.random(&mut rng);
        let (ea, eb) = (l2.map_into(&a, &l6, &img), l2.map_into(&b, &l6, &img));
        assert_eq!(l2.map_into(&l2.mul(&a, &b), &l6, &img), l6.mul(&ea, &eb));
        assert_eq!(l2.map_into(&l2.add(&a, &b), &l6, &img), l6.add(&ea, &eb));
        // the image is fixed by x -> x^{121}
        assert_eq!(l6.pow_u64(&ea, 121), ea);
        let n = l6.norm(&l6.random_nonzero(&mut rng));
        assert!(!base.is_zero(&n));
        assert_eq!(l6.to_base(&l6.embed(&n)), Some(n));
    }
    // F_{11^4} has no F_{11^3} inside
    let l3 = build_extension(&base, 3, 4);
    let l4 = build_extension(&base, 4, 4);
    assert!(l3.embedding_into(&l4, &mut rng).is_none());
}
