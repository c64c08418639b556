//! Ground-truth zeta data by exhaustive enumeration. Depends only on field
//! and divisor arithmetic, never on the RM machinery it is used to check.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{build_extension, ExtField, Field, FiniteField, Poly, PolyRing};
use crate::error::{Error, Result};
use crate::jacobian::Curve;
use crate::par::Parallelism;

/// Default enumeration budget on `q^g`.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 100_000_000;

/// Seed for the extension fields used by the oracle.
const ORACLE_FIELD_SEED: u64 = 0x6f72_6163_6c65;

/// `N_1..N_g`, `N_k = #C(F_{q^k})` including the point at infinity.
pub fn naive_counts<F: FiniteField>(
    curve: &Curve<F>,
    up_to: usize,
    budget: u64,
    par: Parallelism,
) -> Result<Vec<BigUint>> {
    let q = curve.field().order();
    let top = q.pow(up_to as u32);
    if top > BigUint::from(budget) {
        return Err(Error::Budget(format!("q^{up_to} = {top} exceeds the enumeration budget {budget}")));
    }
    let base = curve.field();
    let base_elems: Vec<F::Elem> =
        (0..q.to_u64().unwrap()).map(|i| base.element_at(&BigUint::from(i))).collect();
    let mut out = Vec::with_capacity(up_to);
    for k in 1..=up_to {
        let l = build_extension(base, k, ORACLE_FIELD_SEED);
        out.push(BigUint::from(count_points(curve, &l, &base_elems, par)));
    }
    Ok(out)
}

fn count_points<F: FiniteField>(
    curve: &Curve<F>,
    l: &ExtField<F>,
    base_elems: &[F::Elem],
    par: Parallelism,
) -> u64 {
    let ring = PolyRing::new(l.clone());
    let f: Poly<Vec<F::Elem>> = curve.ring().map(curve.f(), &ring, |c| l.embed(c));
    let k = l.ext_degree();
    let q = base_elems.len();
    let euler = (l.order() - 1u32) >> 1;
    // split on the top coordinate
    let partial = par.map_range(q, |top| {
        let mut digits = vec![0usize; k];
        digits[k - 1] = top;
        let mut count = 0u64;
        loop {
            let x: Vec<F::Elem> = digits.iter().map(|&d| base_elems[d].clone()).collect();
            let fx = ring.eval(&f, &x);
            if l.is_zero(&fx) {
                count += 1;
            } else if l.is_one(&l.pow(&fx, &euler)) {
                count += 2;
            }
            // odometer over the lower k - 1 digits
            let mut i = 0;
            while i + 1 < k {
                digits[i] += 1;
                if digits[i] < q {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i + 1 >= k {
                break;
            }
        }
        count
    });
    1 + partial.into_iter().sum::<u64>()
}

/// Coefficients `c_0..c_{2g}` of the characteristic polynomial of Frobenius
/// from the point counts, by Newton's identities on the power sums
/// `p_k = q^k + 1 - N_k` and the functional equation.
pub fn chi_from_counts(counts: &[BigUint], q: &BigUint, g: usize) -> Result<Vec<BigInt>> {
    if counts.len() < g {
        return Err(Error::InvalidInput("need N_1..N_g".into()));
    }
    let q = BigInt::from(q.clone());
    let p: Vec<BigInt> = (1..=g)
        .map(|k| q.pow(k as u32) + 1 - BigInt::from(counts[k - 1].clone()))
        .collect();
    // e_0 = 1, k e_k = sum_{i=1}^k (-1)^{i-1} e_{k-i} p_i
    let mut e = vec![BigInt::one()];
    for k in 1..=g {
        let mut s = BigInt::zero();
        for i in 1..=k {
            let term = &e[k - i] * &p[i - 1];
            if i % 2 == 1 {
                s += term;
            } else {
                s -= term;
            }
        }
        let (quo, rem) = s.div_rem(&BigInt::from(k));
        if !rem.is_zero() {
            return Err(Error::Verification("Newton identities gave a non-integer".into()));
        }
        e.push(quo);
    }
    let mut c = vec![BigInt::zero(); 2 * g + 1];
    for k in 0..=g {
        c[2 * g - k] = if k % 2 == 0 { e[k].clone() } else { -e[k].clone() };
    }
    for i in 0..g {
        c[i] = q.pow((g - i) as u32) * &c[2 * g - i];
    }
    Ok(c)
}

/// Evaluates `sum c_i X^i` at an integer.
pub fn chi_eval(chi: &[BigInt], x: &BigInt) -> BigInt {
    chi.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// `#J(F_{q^e}) = |Res(chi, X^e - 1)|` for monic `chi`; computed as the
/// product `prod (1 - alpha^e)` through the companion matrix power.
pub fn jacobian_order_over(chi: &[BigInt], e: usize) -> BigInt {
    // Res(chi, X^e - 1) = prod over roots a of chi of (a^e - 1)
    //                   = det(C^e - I), C the companion matrix of chi
    let n = chi.len() - 1;
    let mut comp = vec![vec![BigInt::zero(); n]; n];
    for i in 1..n {
        comp[i][i - 1] = BigInt::one();
    }
    for (i, row) in comp.iter_mut().enumerate() {
        row[n - 1] = -chi[i].clone();
    }
    let mut pw = identity(n);
    let mut base = comp;
    let mut k = e;
    while k > 0 {
        if k & 1 == 1 {
            pw = crate::algebra::mat_mul(&pw, &base);
        }
        base = crate::algebra::mat_mul(&base, &base);
        k >>= 1;
    }
    for (i, row) in pw.iter_mut().enumerate() {
        row[i] -= 1;
    }
    crate::algebra::det_bareiss(pw).abs()
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// `#J(F_q)` by listing every reduced divisor `<u, v>` defined over `F_q`.
/// Only sensible for very small fields.
pub fn jacobian_order_by_enumeration<F: FiniteField>(curve: &Curve<F>) -> Result<u64> {
    let q = curve.field().order().to_u64().filter(|&q| q <= 64).ok_or_else(|| {
        Error::Budget("Jacobian enumeration is limited to fields of at most 64 elements".into())
    })?;
    let fld = curve.field();
    let ring = curve.ring();
    let elems: Vec<F::Elem> = (0..q).map(|i| fld.element_at(&BigUint::from(i))).collect();
    let g = curve.genus();
    let mut total = 1u64; // <1, 0>
    for w in 1..=g {
        for ui in 0..q.pow(w as u32) {
            let mut c = digits(ui, q, w).into_iter().map(|d| elems[d].clone()).collect::<Vec<_>>();
            c.push(fld.one());
            let u = ring.from_coeffs(c);
            for vi in 0..q.pow(w as u32) {
                let v = ring.from_coeffs(digits(vi, q, w).into_iter().map(|d| elems[d].clone()).collect());
                let r = ring.sub(&ring.square(&v), curve.f());
                if ring.rem(&r, &u)?.is_zero() {
                    total += 1;
                }
            }
        }
    }
    Ok(total)
}

fn digits(mut n: u64, base: u64, len: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((n % base) as usize);
        n /= base;
    }
    out
}
