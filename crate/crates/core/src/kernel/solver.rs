//! Genus-2 kernel points by resultant elimination.
//!
//! With `alpha(P_j - P_inf) = <X^2 + (d_1/d_2)(x_j) X + (d_0/d_2)(x_j), ..>`,
//! the kernel condition `alpha(P_1 - P_inf) = -alpha(P_2 - P_inf)` forces
//! `A = d_1(x_1) d_2(x_2) - d_1(x_2) d_2(x_1)` and the same `B` with `d_0`
//! to vanish. Both are antisymmetric, so the diagonal is removed by
//! dividing by `x_2 - x_1`; `x_2` is then eliminated by a resultant, which
//! leaves a univariate `E(x_1)`. The `v` equations are enforced afterwards
//! by trying both signs of `y_2` and filtering with `alpha(D) = 0`.

use rand::Rng;

use crate::algebra::{is_irreducible, roots, solve_linear, squarefree_part, DistinctDegree, ExtField, Field, FiniteField, Poly, PolyRing};
use crate::division::GenericImage;
use crate::endo::{extend_dickson, DicksonCurve};
use crate::error::{Error, Result};
use crate::jacobian::Divisor;
use crate::rmorder::OrderElement;

/// A polynomial in `(x_1, x_2)` stored as coefficients of `x_2^k` in `F[x_1]`.
type Bivariate<E> = Vec<Poly<E>>;

/// The eliminant together with the symmetric quotients it came from.
#[derive(Clone, Debug)]
pub struct Eliminant<E> {
    pub e: Poly<E>,
    pub a: Bivariate<E>,
    pub b: Bivariate<E>,
}

/// Candidate divisors `P_1 + P_2 - 2 P_inf` with `alpha(D) = 0`, all over the
/// same extension.
#[derive(Clone, Debug)]
pub struct Candidates<F: FiniteField> {
    pub dc: DicksonCurve<ExtField<F>>,
    pub divisors: Vec<Divisor<Vec<F::Elem>>>,
}

/// `(d_j(x_1) d_2(x_2) - d_j(x_2) d_2(x_1)) / (x_2 - x_1)`.
fn symmetric_quotient<F: Field>(r: &PolyRing<F>, dj: &Poly<F::Elem>, d2: &Poly<F::Elem>) -> Result<Bivariate<F::Elem>> {
    let n = dj.len().max(d2.len());
    let zero = r.field().zero();
    let a: Vec<Poly<F::Elem>> = (0..n)
        .map(|k| {
            let c2 = d2.coeff(k).cloned().unwrap_or_else(|| zero.clone());
            let cj = dj.coeff(k).cloned().unwrap_or_else(|| zero.clone());
            r.sub(&r.scale(dj, &c2), &r.scale(d2, &cj))
        })
        .collect();
    if n < 2 {
        return Ok(vec![r.zero()]);
    }
    // synthetic division by x_2 - x_1 over F[x_1]
    let x1 = r.x();
    let mut q = vec![r.zero(); n - 1];
    q[n - 2] = a[n - 1].clone();
    for k in (1..n - 1).rev() {
        q[k - 1] = r.add(&a[k], &r.mul(&x1, &q[k]));
    }
    if !r.add(&a[0], &r.mul(&x1, &q[0])).is_zero() {
        return Err(Error::Verification("antisymmetric form not divisible by the diagonal".into()));
    }
    while q.len() > 1 && q.last().unwrap().is_zero() {
        q.pop();
    }
    Ok(q)
}

/// `Res_{x_2}(A~, B~)` by multimodular evaluation: residues modulo small
/// irreducible polynomials in `x_1`, recombined by the Chinese remainder
/// theorem. Factors of `d_2` (where both `u` parts degenerate at once) are
/// removed.
pub fn eliminant<F: FiniteField>(img: &GenericImage<F::Elem>, ring: &PolyRing<F>) -> Result<Eliminant<F::Elem>> {
    let a = symmetric_quotient(ring, &img.d[1], &img.d[2])?;
    let b = symmetric_quotient(ring, &img.d[0], &img.d[2])?;
    let deg1 = |p: &Bivariate<F::Elem>| p.iter().map(|c| c.degree().unwrap_or(0)).max().unwrap_or(0);
    let deg2 = |p: &Bivariate<F::Elem>| p.len() - 1;
    let bound = deg1(&a) * deg2(&b) + deg2(&a) * deg1(&b);
    let fld = ring.field();
    let degenerate = || Error::Degenerate("eliminant-degenerate".into());
    if a.iter().all(|c| c.is_zero()) || b.iter().all(|c| c.is_zero()) {
        return Err(degenerate());
    }
    // residues of E modulo small irreducibles m, i.e. Res over F[x_1]/(m),
    // skipping the m that divide a leading coefficient; then CRT
    let lcs = ring.mul(a.last().unwrap(), b.last().unwrap());
    let mut e = ring.zero();
    let mut modulus = ring.one();
    let mut covered = 0;
    let q = fld.order();
    'outer: for d in 1.. {
        let mut idx = num_bigint::BigUint::from(0u32);
        let count = q.pow(d as u32);
        while idx < count {
            if covered > bound {
                break 'outer;
            }
            let mut coeffs = Vec::with_capacity(d + 1);
            let mut rest = idx.clone();
            for _ in 0..d {
                coeffs.push(fld.element_at(&(&rest % &q)));
                rest /= &q;
            }
            coeffs.push(fld.one());
            idx += 1u32;
            let m = ring.from_coeffs(coeffs);
            if (d > 1 && !is_irreducible(ring, &m)) || ring.gcd(&m, &lcs).degree().unwrap_or(0) > 0 {
                continue;
            }
            let r = residue(ring, &a, &b, &m)?;
            // e += modulus * ((r - e) / modulus mod m)
            let inv = ring.inv_mod(&ring.rem(&modulus, &m)?, &m).expect("coprime moduli");
            let t = ring.rem(&ring.mul(&ring.sub(&r, &ring.rem(&e, &m)?), &inv), &m)?;
            e = ring.add(&e, &ring.mul(&modulus, &t));
            modulus = ring.mul(&modulus, &m);
            covered += d;
        }
    }
    if e.is_zero() {
        return Err(degenerate());
    }
    loop {
        let g = ring.gcd(&e, &img.d[2]);
        if g.degree().unwrap_or(0) == 0 {
            break;
        }
        e = ring.div_exact(&e, &g)?;
    }
    Ok(Eliminant { e: ring.monic(&e), a, b })
}

/// `Res_{x_2}(a, b) mod m` for irreducible `m`, computed over `F[x_1]/(m)`.
fn residue<F: FiniteField>(
    ring: &PolyRing<F>,
    a: &Bivariate<F::Elem>,
    b: &Bivariate<F::Elem>,
    m: &Poly<F::Elem>,
) -> Result<Poly<F::Elem>> {
    if m.degree() == Some(1) {
        let x = ring.field().neg(&m.coeffs()[0]);
        let at = |bi: &Bivariate<F::Elem>| ring.from_coeffs(bi.iter().map(|c| ring.eval(c, &x)).collect());
        return Ok(ring.constant(ring.resultant(&at(a), &at(b))));
    }
    let kf = ExtField::new(ring.field().clone(), m.clone())?;
    let kr = PolyRing::new(kf.clone());
    let at = |bi: &Bivariate<F::Elem>| -> Result<Poly<Vec<F::Elem>>> {
        Ok(kr.from_coeffs(bi.iter().map(|c| Ok(kf.from_poly(&ring.rem(c, m)?))).collect::<Result<_>>()?))
    };
    Ok(kf.to_poly(&kr.resultant(&at(a)?, &at(b)?)))
}

/// Distinct-degree factorization of the square-free part of the eliminant,
/// ascending in degree.
pub fn eliminant_factors<F: FiniteField>(ring: &PolyRing<F>, el: &Eliminant<F::Elem>) -> DistinctDegree<F> {
    DistinctDegree::new(ring, &squarefree_part(ring, &el.e))
}

/// Back-substitution over the root field of `h`: recovers `x_2` from
/// `gcd(A~(x_1, X), B~(x_1, X))`, the ordinates over a quadratic extension
/// when needed, and keeps the `P_1 + P_2` killed by `alpha`.
pub fn candidates_over<F: FiniteField, R: Rng + ?Sized>(
    dc: &DicksonCurve<F>,
    el: &Eliminant<F::Elem>,
    alpha: &OrderElement,
    h: &Poly<F::Elem>,
    rng: &mut R,
) -> Result<Candidates<F>> {
    let kf = ExtField::new(dc.field().clone(), h.clone())?;
    if let Some(c) = solve_in(dc, el, alpha, &kf, kf.gen(), rng)? {
        return Ok(c);
    }
    // any non-square c of K gives the quadratic extension K(sqrt c)
    let c = {
        let kr = PolyRing::new(kf.clone());
        let fx1 = kr.eval(&dc.curve.ring().map(dc.curve.f(), &kr, |v| kf.embed(v)), &kf.gen());
        if kf.is_square(&fx1) {
            loop {
                let c = kf.random_nonzero(rng);
                if !kf.is_square(&c) {
                    break c;
                }
            }
        } else {
            fx1
        }
    };
    let (lf, x1) = flatten_quadratic(&kf, &c, rng);
    solve_in(dc, el, alpha, &lf, x1, rng)?
        .ok_or_else(|| Error::Verification("ordinates not found over the quadratic extension".into()))
}

/// `K(sqrt c)` for a non-square `c`, as a single extension of the base
/// field: the minimal polynomial of a primitive element `beta = a + sqrt c`
/// found by linear algebra, and the image of the generator of `K`.
pub fn flatten_quadratic<F: FiniteField, R: Rng + ?Sized>(
    kf: &ExtField<F>,
    c: &[F::Elem],
    rng: &mut R,
) -> (ExtField<F>, Vec<F::Elem>) {
    let base = kf.base();
    let c = c.to_vec();
    let k = kf.ext_degree();
    let n = 2 * k;
    let coords = |a: &[F::Elem], b: &[F::Elem]| {
        let pad = |v: &[F::Elem]| {
            let mut v = v.to_vec();
            v.resize(k, base.zero());
            v
        };
        let mut out = pad(a);
        out.extend(pad(b));
        out
    };
    loop {
        // powers of beta = a + z with z^2 = c, as pairs (u, w) meaning u + w z
        let a = kf.random(rng);
        let mut pw = (kf.one(), kf.zero());
        let mut cols = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            cols.push(coords(&pw.0, &pw.1));
            let (u, w) = pw;
            pw = (kf.add(&kf.mul(&u, &a), &kf.mul(&w, &c)), kf.add(&kf.mul(&w, &a), &u));
        }
        // sum_{j<n} m_j beta^j = -beta^n
        let rows = |rhs: &[F::Elem]| -> Vec<Vec<F::Elem>> {
            (0..n).map(|r| (0..n).map(|j| cols[j][r].clone()).chain(std::iter::once(rhs[r].clone())).collect()).collect()
        };
        let neg_top: Vec<F::Elem> = cols[n].iter().map(|v| base.neg(v)).collect();
        if !spans(base, &cols[..n]) {
            continue;
        }
        let m = solve_linear(base, rows(&neg_top), n).expect("full rank");
        let mut mc = m;
        mc.push(base.one());
        let lf = ExtField::new(base.clone(), kf.base_ring().from_coeffs(mc)).expect("monic modulus");
        let x = solve_linear(base, rows(&coords(&kf.gen(), &kf.zero())), n).expect("full rank");
        return (lf.clone(), lf.from_poly(&kf.base_ring().from_coeffs(x)));
    }
}

/// Whether the vectors are linearly independent.
fn spans<F: Field>(f: &F, vecs: &[Vec<F::Elem>]) -> bool {
    let n = vecs.len();
    let mut rows: Vec<Vec<F::Elem>> = vecs.to_vec();
    let width = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..width {
        let Some(p) = (rank..n).find(|&i| !f.is_zero(&rows[i][c])) else { continue };
        rows.swap(rank, p);
        let inv = f.inv(&rows[rank][c]).unwrap();
        let pivot: Vec<F::Elem> = rows[rank].iter().map(|v| f.mul(v, &inv)).collect();
        for row in rows.iter_mut().skip(rank + 1) {
            let m = row[c].clone();
            if !f.is_zero(&m) {
                for (v, pv) in row.iter_mut().zip(&pivot) {
                    *v = f.sub(v, &f.mul(&m, pv));
                }
            }
        }
        rank += 1;
    }
    rank == n
}

/// `None` when some ordinate needs a quadratic extension of `l`.
fn solve_in<F: FiniteField, R: Rng + ?Sized>(
    dc: &DicksonCurve<F>,
    el: &Eliminant<F::Elem>,
    alpha: &OrderElement,
    l: &ExtField<F>,
    x1: Vec<F::Elem>,
    rng: &mut R,
) -> Result<Option<Candidates<F>>> {
    let dl = extend_dickson(dc, l);
    let lr = dl.curve.ring().clone();
    let base = dc.curve.ring();
    let spec = |bi: &Bivariate<F::Elem>| {
        lr.from_coeffs(bi.iter().map(|c| lr.eval(&base.map(c, &lr, |v| l.embed(v)), &x1)).collect())
    };
    let g = lr.gcd(&spec(&el.a), &spec(&el.b));
    let f = dl.curve.f();
    let Some(y1) = l.sqrt(&lr.eval(f, &x1)) else { return Ok(None) };
    let p1 = Divisor { u: lr.linear(&x1), v: lr.constant(y1) };
    let mut divisors = Vec::new();
    if g.degree().unwrap_or(0) == 0 {
        return Ok(Some(Candidates { dc: dl, divisors }));
    }
    for x2 in roots(&lr, &g, rng)? {
        let Some(y2) = l.sqrt(&lr.eval(f, &x2)) else { return Ok(None) };
        for s in [y2.clone(), l.neg(&y2)] {
            let p2 = Divisor { u: lr.linear(&x2), v: lr.constant(s) };
            let d = dl.curve.add(&p1, &p2);
            if !d.is_zero() && dl.apply_order_element(alpha, &d, rng).is_zero() {
                divisors.push(d);
            }
        }
    }
    Ok(Some(Candidates { dc: dl, divisors }))
}
