//! Nonzero divisors of order `l` in the kernels `J[p_i]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rand::Rng;

use crate::algebra::{build_extension, equal_degree_split, roots, ExtField, Field, FiniteField, PolyRing, PrimeField};
use crate::division::{generic_image, Endo};
use crate::endo::{extend_dickson, DicksonCurve};
use crate::error::{Error, Result};
use crate::jacobian::Divisor;
use crate::oracle::jacobian_order_over;
use crate::rmorder::{OrderElement, RMOrder, SplitData};

mod solver;
mod system;

pub use solver::{candidates_over, eliminant, eliminant_factors, Candidates, Eliminant};
pub use system::{build_system_g2, build_system_general, KernelSystem, PhiShape};

/// Seed for the extension fields that hold kernel elements.
pub const KERNEL_FIELD_SEED: u64 = 0x6b65_726e;

/// A divisor of order `l` in `J[p_i]`, defined over `F_{q^e}`.
#[derive(Clone, Debug)]
pub struct KernelElement<F: FiniteField> {
    /// The curve over the field of definition `F_{q^e}`.
    pub dc: DicksonCurve<ExtField<F>>,
    pub d: Divisor<Vec<F::Elem>>,
    pub e: usize,
    pub ideal: usize,
    pub certified: bool,
}

/// The default cap on extension degrees: `min(l^2 - 1, 600)`.
pub fn default_extension_cap(ell: u64) -> usize {
    (ell * ell - 1).min(600) as usize
}

/// Checks `D != 0`, `l D = 0`, `eta(D) = lambda_i D` and `alpha_i(D) = 0`.
pub fn certify<F: FiniteField, R: Rng + ?Sized>(
    k: &mut KernelElement<F>,
    split: &SplitData,
    alpha: &OrderElement,
    rng: &mut R,
) -> Result<()> {
    let c = &k.dc.curve;
    let ell = split.ell;
    let fail = |what: &str| Err(Error::Verification(format!("kernel element for l = {ell}: {what}")));
    if k.d.is_zero() {
        return fail("zero divisor");
    }
    if !c.mul(ell as i64, &k.d).is_zero() {
        return fail("order is not l");
    }
    let lambda = split.lambdas[k.ideal];
    if k.dc.apply_eta(&k.d, rng) != c.mul(lambda as i64, &k.d) {
        return fail("not an eigenvector of eta");
    }
    if !k.dc.apply_order_element(alpha, &k.d, rng).is_zero() {
        return fail("not annihilated by alpha_i");
    }
    k.certified = true;
    Ok(())
}

/// From `D` in `J[alpha]` with `N = #J[alpha]` bound: `D_1 = (N / l^2) D`,
/// then the last nonzero element of `D_1, l D_1`. `None` if `D_1 = 0`.
pub fn extract_order_ell<F: Field>(
    curve: &crate::jacobian::Curve<F>,
    d: &Divisor<F::Elem>,
    ell: u64,
    norm: &BigInt,
) -> Option<Divisor<F::Elem>> {
    let l2 = BigInt::from(ell * ell);
    let cof = norm.abs() / l2;
    let d1 = curve.mul_big(&cof, d);
    if d1.is_zero() {
        return None;
    }
    let d2 = curve.mul(ell as i64, &d1);
    Some(if d2.is_zero() { d1 } else { d2 })
}

/// Candidate extension degrees over which some `J[p_i]` acquires rational
/// points: the multiplicative orders of the roots of `chi_pi mod l` in
/// `F_{l^2}`, and `l` times the order of each repeated root (Frobenius may
/// then act by a nontrivial Jordan block), ascending.
pub fn activation_degrees(chi: &[BigInt], ell: u64) -> Result<Vec<usize>> {
    let fl = PrimeField::new(ell)?;
    let f2 = build_extension(&fl, 2, KERNEL_FIELD_SEED);
    let ring = PolyRing::new(f2.clone());
    let coeffs = chi
        .iter()
        .map(|c| f2.embed(&c.mod_floor(&BigInt::from(ell)).to_u64().unwrap()))
        .collect();
    let poly = ring.from_coeffs(coeffs);
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(ell);
    let group = ell * ell - 1;
    let divisors: Vec<u64> = (1..=group).filter(|d| group.is_multiple_of(*d)).collect();
    let dpoly = ring.derivative(&poly);
    let mut out = Vec::new();
    for r in roots(&ring, &poly, &mut rng)? {
        if f2.is_zero(&r) {
            continue;
        }
        let ord = *divisors.iter().find(|&&d| f2.is_one(&f2.pow_u64(&r, d))).unwrap();
        out.push(ord as usize);
        if f2.is_zero(&ring.eval(&dpoly, &r)) {
            out.push((ord * ell) as usize);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Test-mode kernel search driven by the known `chi_pi`: for each candidate
/// degree `e` (see [`activation_degrees`]) up to `cap`, samples random `D`
/// over `F_{q^e}`, kills the prime-to-`l` part with the cofactor of
/// `#J(F_{q^e})`, projects onto `J[p_i]` with `prod_{j != i} (eta - lambda_j)^r`
/// and multiplies by `l` down to order exactly `l`.
#[allow(clippy::too_many_arguments)]
pub fn kernel_via_group_order_oracle<F: FiniteField, R: Rng + ?Sized>(
    dc: &DicksonCurve<F>,
    order: &RMOrder,
    chi: &[BigInt],
    split: &SplitData,
    i: usize,
    alpha: &OrderElement,
    cap: usize,
    rng: &mut R,
) -> Result<KernelElement<F>> {
    const TRIES: usize = 3;
    let ell = split.ell;
    let big_ell = BigInt::from(ell);
    let degrees = activation_degrees(chi, ell)?;
    for &e in degrees.iter().filter(|&&e| e <= cap) {
        let n_e = jacobian_order_over(chi, e);
        let mut r = 0u32;
        let mut cof = n_e;
        while cof.is_multiple_of(&big_ell) {
            cof /= &big_ell;
            r += 1;
        }
        if r == 0 {
            continue;
        }
        let proj = projector(order, split, i, r);
        let l = build_extension(dc.field(), e, KERNEL_FIELD_SEED);
        let dce = extend_dickson(dc, &l);
        let c = &dce.curve;
        let cof = cof.to_biguint().unwrap();
        for _ in 0..TRIES {
            let d = c.random_divisor(rng)?;
            let d = c.mul_unsigned(&cof, &d);
            if d.is_zero() {
                continue;
            }
            let mut d = dce.apply_order_element(&proj, &d, rng);
            if d.is_zero() {
                continue;
            }
            loop {
                let next = c.mul(ell as i64, &d);
                if next.is_zero() {
                    break;
                }
                d = next;
            }
            let mut k = KernelElement { dc: dce.clone(), d, e, ideal: i, certified: false };
            certify(&mut k, split, alpha, rng)?;
            return Ok(k);
        }
    }
    Err(Error::Budget(format!("no J[p_{i}] point for l = {ell} over extensions of degree <= {cap}")))
}

/// Kernel element from the polynomial system for `alpha_i` (genus 2):
/// generic image, eliminant, back-substitution over the fields defined by
/// its irreducible factors in ascending degree, then reduction to order `l`
/// and certification. Kernel points whose image drops weight are not
/// modelled; a degenerate eliminant is reported so the caller can skip `l`.
#[allow(clippy::too_many_arguments)]
pub fn kernel_via_solver<F: FiniteField, R: Rng + ?Sized>(
    dc: &DicksonCurve<F>,
    order: &RMOrder,
    split: &SplitData,
    i: usize,
    alpha: &OrderElement,
    cap: usize,
    degree_budget: usize,
    rng: &mut R,
) -> Result<KernelElement<F>> {
    if dc.genus() != 2 {
        return Err(Error::NotFound("the internal solver handles genus 2 only".into()));
    }
    let ell = split.ell;
    let ring = dc.curve.ring();
    let img = generic_image(dc, &Endo::Order(alpha.clone()), degree_budget)?;
    if img.weight() != 2 {
        return Err(Error::Degenerate("non-generic".into()));
    }
    let el = eliminant(&img, ring)?;
    let norm = order.norm(alpha);
    let norm = &norm * &norm;
    // x_1 lives in an extension of degree at most twice the field of definition
    for (deg, prod) in eliminant_factors(ring, &el) {
        if deg > 2 * cap {
            break;
        }
        let hs = equal_degree_split(ring, &prod, deg, rng);
        for h in hs {
            let cands = candidates_over(dc, &el, alpha, &h, rng)?;
            for d in &cands.divisors {
                let Some(d1) = extract_order_ell(&cands.dc.curve, d, ell, &norm) else { continue };
                let e = field_of_definition(&cands.dc, &d1);
                if e > cap {
                    continue;
                }
                let mut k = KernelElement { dc: cands.dc.clone(), d: d1, e, ideal: i, certified: false };
                if certify(&mut k, split, alpha, rng).is_ok() {
                    return Ok(k);
                }
            }
        }
    }
    Err(Error::Budget(format!("no J[p_{i}] point for l = {ell} from eliminant factors of degree <= {}", 2 * cap)))
}

/// Least `e` dividing the working degree such that `D` is fixed by the
/// `q^e`-power Frobenius.
pub fn field_of_definition<F: FiniteField>(dc: &DicksonCurve<ExtField<F>>, d: &Divisor<Vec<F::Elem>>) -> usize {
    let l = dc.field();
    let n = l.ext_degree();
    let coeffs: Vec<&Vec<F::Elem>> = d.u.coeffs().iter().chain(d.v.coeffs()).collect();
    // images under x -> x^(q^j) for j = 1..n
    let mut cur: Vec<Vec<F::Elem>> = coeffs.iter().map(|c| (*c).clone()).collect();
    for e in 1..n {
        cur = cur.iter().map(|c| l.frobenius_base(c)).collect();
        if n.is_multiple_of(e) && cur.iter().zip(&coeffs).all(|(a, b)| a == *b) {
            return e;
        }
    }
    n
}

/// `prod_{j != i} (eta - lambda_j)^r` with coordinates reduced into
/// `(-l^r / 2, l^r / 2]`; it is applied only to `l^r`-torsion.
fn projector(order: &RMOrder, split: &SplitData, i: usize, r: u32) -> OrderElement {
    let modulus = BigInt::from(split.ell).pow(r);
    let half = &modulus >> 1;
    let mut acc = order.from_i64s(&[1]);
    for (j, &lam) in split.lambdas.iter().enumerate() {
        if j == i {
            continue;
        }
        let mut factor = order.from_i64s(&[0, 1]);
        factor[0] = -BigInt::from(lam);
        for _ in 0..r {
            acc = order.mul(&acc, &factor);
        }
    }
    acc.into_iter()
        .map(|c| {
            let m = c.mod_floor(&modulus);
            if m > half {
                m - &modulus
            } else {
                m
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endo::build_dickson_curve;
    use crate::oracle::{chi_from_counts, naive_counts};
    use crate::par::Parallelism;
    use crate::schoof::eigenvalue_candidates;
    use num_bigint::BigUint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn oracle_sampler_finds_eigenvectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = 19u64;
        let dc = build_dickson_curve(5, 3, PrimeField::new(p).unwrap()).unwrap();
        let order = RMOrder::new(5).unwrap();
        let counts = naive_counts(&dc.curve, 2, 1 << 20, Parallelism::Sequential).unwrap();
        let chi = chi_from_counts(&counts, &BigUint::from(p), 2).unwrap();
        let split = order.split_prime(11).unwrap().unwrap();
        for i in 0..2 {
            let alpha = order.small_element(&split, i).unwrap();
            let k = kernel_via_group_order_oracle(&dc, &order, &chi, &split, i, &alpha, 120, &mut rng).unwrap();
            assert!(k.certified);
            assert_eq!(eigenvalue_candidates(&k.dc.curve, &k.d, 11).len(), 1);
        }
    }
}
