use num_bigint::{BigInt, BigUint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rmpc::algebra::*;
use rmpc::division::{generic_image, Endo, GenericImage};
use rmpc::endo::{build_dickson_curve, dickson_poly, DicksonCurve};
use rmpc::jacobian::{Curve, Divisor};
use rmpc::kernel::*;
use rmpc::oracle::{chi_from_counts, naive_counts};
use rmpc::par::Parallelism;
use rmpc::rmorder::{OrderElement, RMOrder, SplitData};

type Ext = ExtField<PrimeField>;
type Tower = ExtField<Ext>;

struct Setup {
    dc: DicksonCurve<PrimeField>,
    order: RMOrder,
    chi: Vec<BigInt>,
    split: SplitData,
}

fn setup(n: u64, p: u64, t: u64, ell: u64) -> Setup {
    let f = PrimeField::new(p).unwrap();
    let dc = build_dickson_curve(n, t, f).unwrap();
    let g = dc.genus();
    let counts = naive_counts(&dc.curve, g, 1 << 26, Parallelism::Sequential).unwrap();
    let chi = chi_from_counts(&counts, &BigUint::from(p), g).unwrap();
    let order = RMOrder::new(n).unwrap();
    let split = order.split_prime(ell).unwrap().expect("l splits");
    Setup { dc, order, chi, split }
}

fn image(s: &Setup, alpha: &OrderElement) -> GenericImage<u64> {
    generic_image(&s.dc, &Endo::Order(alpha.clone()), 100_000).unwrap()
}

/// Points of `D` over an extension of its field in which `u` splits, or
/// `None` if `u` has a repeated root.
fn support(k: &KernelElement<PrimeField>, rng: &mut ChaCha8Rng) -> Option<(Tower, Vec<Vec<Vec<u64>>>, Vec<Vec<Vec<u64>>>)> {
    let l = k.dc.field().clone();
    let w = k.d.weight();
    for deg in 1..=w {
        let m = build_extension(&l, deg, 0x5eed);
        let ring = PolyRing::new(m.clone());
        let lift = |p: &Poly<Vec<u64>>| ring.from_coeffs(p.coeffs().iter().map(|c| m.embed(c)).collect());
        let u = lift(&k.d.u);
        let v = lift(&k.d.v);
        let xs = roots(&ring, &u, rng).unwrap();
        if xs.len() == w {
            let ys = xs.iter().map(|x| ring.eval(&v, x)).collect();
            return Some((m, xs, ys));
        }
        if ring.gcd(&u, &ring.derivative(&u)).degree() != Some(0) {
            return None;
        }
    }
    None
}

fn kernel_elements(s: &Setup, i: usize, alpha: &OrderElement, rng: &mut ChaCha8Rng) -> KernelElement<PrimeField> {
    kernel_via_group_order_oracle(&s.dc, &s.order, &s.chi, &s.split, i, alpha, 600, rng).unwrap()
}

fn emb(m: &Tower) -> impl Fn(&u64) -> Vec<Vec<u64>> + '_ {
    move |c| m.embed(&m.base().embed(c))
}

/// `Y^2 = D_n(X) + t` for odd `n`, prime or not. No prime `n` gives genus 4;
/// the constants of `eta` are left unset since only `[m]` is used.
fn dickson_any_n(n: u64, t: u64, p: u64) -> DicksonCurve<PrimeField> {
    let f = PrimeField::new(p).unwrap();
    let ring = PolyRing::new(f.clone());
    let d = dickson_poly(n as usize, &ring);
    let curve = Curve::new(f.clone(), ring.add(&d, &ring.constant(t))).unwrap();
    DicksonCurve::with_constants(curve, n, t, 0, 0)
}

#[test]
fn general_system_counts() {
    for (n, p, g) in [(7u64, 29u64, 3usize), (9, 19, 4), (11, 23, 5)] {
        let dc = dickson_any_n(n, 3, p);
        assert_eq!(dc.genus(), g);
        // [m] and eta reach weight min(m, g) and 2; [g] is generic
        let img = generic_image(&dc, &Endo::Integer(g as i64), 100_000).unwrap();
        let sys = build_system_general(&dc, &img).unwrap();
        assert_eq!(sys.num_variables(), g * g + g, "g={g}");
        assert_eq!(sys.num_equations(), g * g + g, "g={g}");
        assert!(sys.has_t());
        assert_eq!(sys.ring.nvars(), g * g + g + 1);
        let shape = sys.phi.unwrap();
        assert!(2 * shape.deg_p <= g * g && 2 * shape.deg_q + 2 * g < g * g);
        assert_eq!(shape.p_monic, g % 2 == 0);
        let text = sys.export(|c| c.to_string());
        assert_eq!(text.lines().count(), g * g + g + 1);
        assert!(text.lines().last().unwrap().starts_with("T*("));
    }
}

#[test]
fn genus_three_shape() {
    let s = PhiShape::for_genus(3);
    assert_eq!((s.deg_p, s.deg_q, s.p_monic), (4, 1, false));
    assert_eq!(s.num_p() + s.num_q(), 6);
    let s = PhiShape::for_genus(4);
    assert_eq!((s.deg_p, s.deg_q, s.p_monic), (8, 3, true));
}

#[test]
fn general_system_vanishes_on_oracle_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = setup(7, 29, 10, 13);
    let alpha = s.order.small_element(&s.split, 0).unwrap();
    let img = image(&s, &alpha);
    let sys = build_system_general(&s.dc, &img).unwrap();
    let k = kernel_elements(&s, 0, &alpha, &mut rng);
    let mut checked = 0;
    for mult in 1..s.split.ell as i64 {
        let d = k.dc.curve.mul(mult, &k.d);
        let kk = KernelElement { d, ..k.clone() };
        if kk.d.weight() != 3 {
            continue;
        }
        let Some((m, xs, ys)) = support(&kk, &mut rng) else { continue };
        let Some(pt) = sys.complete_point(&m, emb(&m), &xs, &ys) else { continue };
        assert!(sys.residuals(&m, emb(&m), &pt).iter().all(|r| m.is_zero(r)));
        // relabeling the points gives another solution
        let perm = [2, 0, 1];
        let xs2: Vec<_> = perm.iter().map(|&j| xs[j].clone()).collect();
        let ys2: Vec<_> = perm.iter().map(|&j| ys[j].clone()).collect();
        let pt2 = sys.complete_point(&m, emb(&m), &xs2, &ys2).unwrap();
        assert!(sys.residuals(&m, emb(&m), &pt2).iter().all(|r| m.is_zero(r)));
        // flipping one ordinate leaves the kernel
        let mut ys3 = ys.clone();
        ys3[0] = m.neg(&ys3[0]);
        if !m.is_zero(&ys3[0]) {
            assert!(sys.complete_point(&m, emb(&m), &xs, &ys3).is_none());
        }
        checked += 1;
        if checked == 3 {
            break;
        }
    }
    assert!(checked > 0, "no generic kernel divisor found");
}

#[test]
fn general_system_rejects_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = setup(7, 29, 10, 13);
    let alpha = s.order.small_element(&s.split, 0).unwrap();
    let sys = build_system_general(&s.dc, &image(&s, &alpha)).unwrap();
    let f = s.dc.field();
    let mut tried = 0;
    while tried < 5 {
        let xs: Vec<u64> = (0..3).map(|_| f.random(&mut rng)).collect();
        let fx: Vec<u64> = xs.iter().map(|x| s.dc.curve.ring().eval(s.dc.curve.f(), x)).collect();
        if !fx.iter().all(|v| f.is_square(v)) {
            continue;
        }
        let ys: Vec<u64> = fx.iter().map(|v| f.sqrt(v).unwrap()).collect();
        let id = |c: &u64| *c;
        assert!(sys.complete_point(f, id, &xs, &ys).is_none());
        tried += 1;
    }
}

/// Points `(P1, P2)` of weight-2 kernel divisors, over a tower above their
/// field of definition.
fn g2_kernel_points(s: &Setup, i: usize, rng: &mut ChaCha8Rng) -> Vec<(Tower, Vec<Vec<Vec<u64>>>, Vec<Vec<Vec<u64>>>)> {
    let alpha = s.order.small_element(&s.split, i).unwrap();
    let k = kernel_elements(s, i, &alpha, rng);
    let mut out = Vec::new();
    for mult in 1..s.split.ell as i64 {
        let d = k.dc.curve.mul(mult, &k.d);
        if d.weight() != 2 {
            continue;
        }
        let kk = KernelElement { d, ..k.clone() };
        if let Some(pts) = support(&kk, rng) {
            out.push(pts);
        }
    }
    out
}

#[test]
fn g2_system_vanishes_on_oracle_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = setup(5, 109, 1, 11);
    for i in 0..2 {
        let alpha = s.order.small_element(&s.split, i).unwrap();
        let sys = build_system_g2(&s.dc, &image(&s, &alpha)).unwrap();
        assert_eq!(sys.num_equations(), 6);
        assert!(!sys.has_t());
        let pts = g2_kernel_points(&s, i, &mut rng);
        assert!(!pts.is_empty());
        for (m, xs, ys) in &pts {
            let point = [xs[0].clone(), ys[0].clone(), xs[1].clone(), ys[1].clone()];
            assert!(sys.residuals(m, emb(m), &point).iter().all(|r| m.is_zero(r)));
            let swapped = [xs[1].clone(), ys[1].clone(), xs[0].clone(), ys[0].clone()];
            assert!(sys.residuals(m, emb(m), &swapped).iter().all(|r| m.is_zero(r)));
            if !m.is_zero(&ys[0]) {
                let flipped = [xs[0].clone(), m.neg(&ys[0]), xs[1].clone(), ys[1].clone()];
                assert!(sys.residuals(m, emb(m), &flipped).iter().any(|r| !m.is_zero(r)));
            }
        }
    }
}

#[test]
fn g2_system_rejects_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let s = setup(5, 109, 1, 11);
    let alpha = s.order.small_element(&s.split, 0).unwrap();
    let sys = build_system_g2(&s.dc, &image(&s, &alpha)).unwrap();
    let f = s.dc.field();
    let ring = s.dc.curve.ring();
    let mut tried = 0;
    while tried < 20 {
        let xs: Vec<u64> = (0..2).map(|_| f.random(&mut rng)).collect();
        let fx: Vec<u64> = xs.iter().map(|x| ring.eval(s.dc.curve.f(), x)).collect();
        if xs[0] == xs[1] || !fx.iter().all(|v| f.is_square(v)) {
            continue;
        }
        let ys: Vec<u64> = fx.iter().map(|v| f.sqrt(v).unwrap()).collect();
        let d = s.dc.curve.add(&s.dc.curve.point(&xs[0], &ys[0]).unwrap(), &s.dc.curve.point(&xs[1], &ys[1]).unwrap());
        if Endo::Order(alpha.clone()).apply(&s.dc, &d, &mut rng).is_zero() {
            continue;
        }
        let res = sys.residuals(f, |c| *c, &[xs[0], ys[0], xs[1], ys[1]]);
        assert!(res.iter().any(|r| *r != 0));
        tried += 1;
    }
}

/// Up to two generators of the subgroup spanned by `elems`.
fn span_basis<G: Field>(c: &Curve<G>, ell: u64, elems: &[Divisor<G::Elem>]) -> Vec<Divisor<G::Elem>> {
    let mut basis: Vec<Divisor<G::Elem>> = Vec::new();
    for d in elems {
        if !in_span(c, ell, &basis, d) {
            basis.push(d.clone());
        }
    }
    basis
}

/// Scalar scan over `a b1 + b b2`.
fn in_span<G: Field>(c: &Curve<G>, ell: u64, basis: &[Divisor<G::Elem>], d: &Divisor<G::Elem>) -> bool {
    match basis {
        [] => d.is_zero(),
        [b1] => (0..ell as i64).any(|a| c.mul(a, b1) == *d),
        [b1, b2] => (0..ell as i64).any(|a| {
            let t = c.sub(d, &c.mul(a, b1));
            (0..ell as i64).any(|b| c.mul(b, b2) == t)
        }),
        _ => panic!("J[p_i] has rank 2"),
    }
}

fn map_divisor(from: &Ext, to: &Ext, image: &[u64], d: &Divisor<Vec<u64>>, c: &Curve<Ext>) -> Divisor<Vec<u64>> {
    let ring = c.ring();
    let map = |p: &Poly<Vec<u64>>| ring.from_coeffs(p.coeffs().iter().map(|a| from.map_into(a, to, image)).collect());
    Divisor { u: map(&d.u), v: map(&d.v) }
}

#[test]
fn solver_and_oracle_generate_the_same_subgroup() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let s = setup(5, 109, 1, 11);
    let ell = s.split.ell;
    let ring = s.dc.curve.ring();
    for i in 0..2 {
        let alpha = s.order.small_element(&s.split, i).unwrap();
        let oracle: Vec<KernelElement<PrimeField>> = (0..6).map(|_| kernel_elements(&s, i, &alpha, &mut rng)).collect();
        let e = oracle[0].e;
        let img = image(&s, &alpha);
        let el = eliminant(&img, ring).unwrap();
        let norm = s.order.norm(&alpha);
        let norm = &norm * &norm;
        let mut solver: Vec<(Ext, Divisor<Vec<u64>>)> = Vec::new();
        for (deg, prod) in eliminant_factors(ring, &el) {
            if deg > 2 * e {
                break;
            }
            for h in equal_degree_split(ring, &prod, deg, &mut rng) {
                let cands = candidates_over(&s.dc, &el, &alpha, &h, &mut rng).unwrap();
                for d in &cands.divisors {
                    assert!(cands.dc.apply_order_element(&alpha, d, &mut rng).is_zero());
                    let Some(d1) = extract_order_ell(&cands.dc.curve, d, ell, &norm) else { continue };
                    if e.is_multiple_of(field_of_definition(&cands.dc, &d1)) {
                        solver.push((cands.dc.field().clone(), d1));
                    }
                }
            }
        }
        assert!(!solver.is_empty(), "solver found nothing over F_q^{e} for i={i}");
        // compare inside one field containing every working field
        let mut big = e;
        for (k, _) in &solver {
            big = num_integer::lcm(big, k.ext_degree());
        }
        let m = build_extension(s.dc.field(), big, 0xb16);
        let cm = s.dc.curve.base_change(m.clone(), |c| m.embed(c));
        let into_m = |k: &Ext, d: &Divisor<Vec<u64>>, rng: &mut ChaCha8Rng| {
            let image = k.embedding_into(&m, rng).unwrap();
            map_divisor(k, &m, &image, d, &cm)
        };
        let from_solver: Vec<_> = solver.iter().map(|(k, d)| into_m(k, d, &mut rng)).collect();
        let from_oracle: Vec<_> = oracle.iter().map(|k| into_m(k.dc.field(), &k.d, &mut rng)).collect();
        let bs = span_basis(&cm, ell, &from_solver);
        let bo = span_basis(&cm, ell, &from_oracle);
        assert_eq!(bs.len(), bo.len(), "i={i}");
        assert!(from_oracle.iter().all(|d| in_span(&cm, ell, &bs, d)));
        assert!(from_solver.iter().all(|d| in_span(&cm, ell, &bo, d)));
    }
}

#[test]
fn solver_output_is_certified() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let s = setup(5, 109, 1, 11);
    for i in 0..2 {
        let alpha = s.order.small_element(&s.split, i).unwrap();
        let k = kernel_via_solver(&s.dc, &s.order, &s.split, i, &alpha, 120, 100_000, &mut rng).unwrap();
        assert!(k.certified && !k.d.is_zero());
        assert!(k.dc.curve.mul(s.split.ell as i64, &k.d).is_zero());
        let lambda = s.split.lambdas[i] as i64;
        assert_eq!(k.dc.apply_eta(&k.d, &mut rng), k.dc.curve.mul(lambda, &k.d));
    }
}
