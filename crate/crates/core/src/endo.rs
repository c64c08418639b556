//! The real-multiplication endomorphism on Dickson curves `y^2 = D_n(x) + t`.
//!
//! Writing `x = z + 1/z`, the correspondence `z -> zeta^m z` and
//! `z -> zeta^{-m} z` sends `(x, y)` to the two points with abscissae
//! `zeta^m z + zeta^{-m}/z` and `zeta^{-m} z + zeta^m / z`, both with the same
//! ordinate because `D_n(x) = z^n + z^{-n}` is unchanged. On the Jacobian this
//! is the endomorphism `theta_m = zeta^m + zeta^{-m}`; `theta_1` is `eta`.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use crate::algebra::{roots, ExtField, Field, FiniteField, Poly, PolyRing};
use crate::jacobian::{Curve, Divisor};
use crate::error::{Error, Result};
use crate::rmorder::real_cyclotomic_minpoly;

/// `D_n` with parameter 1: `D_0 = 2`, `D_1 = X`, `D_n = X D_{n-1} - D_{n-2}`.
pub fn dickson_poly<F: Field>(n: usize, ring: &PolyRing<F>) -> Poly<F::Elem> {
    let mut prev = ring.from_i64s(&[2]);
    if n == 0 {
        return prev;
    }
    let mut cur = ring.x();
    for _ in 1..n {
        let next = ring.sub(&ring.mul(&ring.x(), &cur), &prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// A Dickson curve with the constants of its RM correspondence.
#[derive(Clone, Debug)]
pub struct DicksonCurve<F: FiniteField> {
    pub curve: Curve<F>,
    pub n: u64,
    pub t: F::Elem,
    /// Image of `zeta + zeta^{-1}`: the least root of the minimal polynomial.
    pub c1: F::Elem,
    /// Image of `(zeta - zeta^{-1})^2 = c1^2 - 4`.
    pub c2: F::Elem,
    /// `D_m(c1)` for `m = 0..=g`, the images of `theta_m`.
    theta: Vec<F::Elem>,
}

/// Builds `y^2 = D_n(x) + t` over `field`; requires `|field| = +-1 mod n`.
pub fn build_dickson_curve<F: FiniteField>(n: u64, t: F::Elem, field: F) -> Result<DicksonCurve<F>> {
    let psi = real_cyclotomic_minpoly(n)?;
    let p = field.characteristic();
    if p == n {
        return Err(Error::InvalidInput("characteristic must not divide 2n".into()));
    }
    let qn = (field.order() % BigUint::from(n)).to_u64().unwrap();
    if qn != 1 && qn != n - 1 {
        return Err(Error::InvalidInput(format!("field size must be +-1 mod {n}")));
    }
    let ring = PolyRing::new(field.clone());
    let f = ring.add(&dickson_poly(n as usize, &ring), &ring.constant(t.clone()));
    let curve = Curve::new(field.clone(), f)
        .map_err(|_| Error::InvalidInput("D_n(x) + t is not square-free (singular curve)".into()))?;
    let psi_f = ring.from_coeffs(
        psi.coeffs().iter().map(|c| field.from_i64(c.to_i64().expect("small coefficient"))).collect(),
    );
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
    let mut rts = roots(&ring, &psi_f, &mut rng)?;
    rts.sort_by_key(|r| field.index_of(r));
    let c1 = rts
        .into_iter()
        .next()
        .ok_or_else(|| Error::InvalidInput("minimal polynomial has no root in the field".into()))?;
    let c2 = field.sub(&field.square(&c1), &field.from_i64(4));
    Ok(DicksonCurve::with_constants(curve, n, t, c1, c2))
}

impl<F: FiniteField> DicksonCurve<F> {
    /// Assembles a curve with explicitly given constants (also used to build
    /// deliberately broken instances in tests).
    pub fn with_constants(curve: Curve<F>, n: u64, t: F::Elem, c1: F::Elem, c2: F::Elem) -> Self {
        let fld = curve.field().clone();
        let g = curve.genus();
        let mut theta = vec![fld.from_i64(2), c1.clone()];
        for m in 2..=g.max(1) {
            let v = fld.sub(&fld.mul(&c1, &theta[m - 1]), &theta[m - 2]);
            theta.push(v);
        }
        theta.truncate(g + 1);
        DicksonCurve { curve, n, t, c1, c2, theta }
    }

    pub fn genus(&self) -> usize {
        self.curve.genus()
    }

    pub fn field(&self) -> &F {
        self.curve.field()
    }

    /// `D_m(c1)`, the image of `theta_m`, for `0 <= m <= g`.
    pub fn theta_const(&self, m: usize) -> &F::Elem {
        &self.theta[m]
    }

    /// `theta_m((x0, y0) - P_inf)` for `1 <= m <= g`, on the curve over any
    /// field `G` given with the images of the constants.
    pub fn theta_point_in<G: Field>(
        curve: &Curve<G>,
        dm: &G::Elem,
        c2m: &G::Elem,
        x0: &G::Elem,
        y0: &G::Elem,
    ) -> Divisor<G::Elem> {
        let fld = curve.field();
        let r = curve.ring();
        let s = fld.mul(dm, x0);
        let pr = fld.add(&fld.square(x0), c2m);
        let u = r.from_coeffs(vec![pr, fld.neg(&s), fld.one()]);
        let two = fld.from_i64(2);
        let disc = fld.sub(&fld.square(&s), &fld.mul(&fld.from_i64(4), &fld.add(&fld.square(x0), c2m)));
        if !fld.is_zero(&disc) {
            return Divisor { u, v: r.constant(y0.clone()) };
        }
        // both images coincide at a = s / 2
        if fld.is_zero(y0) {
            return curve.zero();
        }
        let a = fld.div(&s, &two).unwrap();
        let fp = r.eval(&r.derivative(curve.f()), &a);
        let slope = fld.div(&fp, &fld.mul(&two, y0)).unwrap();
        let v0 = fld.sub(y0, &fld.mul(&slope, &a));
        Divisor { u, v: r.from_coeffs(vec![v0, slope]) }
    }

    /// `eta((x0, y0) - P_inf)` over `F`.
    pub fn eta_point(&self, x0: &F::Elem, y0: &F::Elem) -> Divisor<F::Elem> {
        Self::theta_point_in(&self.curve, &self.c1, &self.c2, x0, y0)
    }

    /// The constant term shift for `theta_m`: `D_m(c1)^2 - 4`, except that
    /// `m = 1` uses the stored `c2` so broken constants can be injected.
    pub fn c2m(&self, m: usize) -> F::Elem {
        let fld = self.field();
        if m == 1 {
            return self.c2.clone();
        }
        fld.sub(&fld.square(&self.theta[m]), &fld.from_i64(4))
    }

    /// Coordinates of `alpha` in the basis `1, theta_1, ..., theta_g`
    /// (index 0 is the integer part), using
    /// `eta^j = sum_k binom(j, k) zeta^{j - 2k}` and `theta_{-m} = theta_m`.
    pub fn theta_coords(&self, alpha: &[BigInt]) -> Vec<BigInt> {
        let n = self.n as usize;
        let mut w = vec![BigInt::zero(); n];
        for (j, aj) in alpha.iter().enumerate() {
            if aj.is_zero() {
                continue;
            }
            let mut binom = BigInt::from(1);
            for k in 0..=j {
                let e = ((j as i64 - 2 * k as i64).rem_euclid(n as i64)) as usize;
                w[e] += aj * &binom;
                binom = binom * BigInt::from(j - k) / BigInt::from(k + 1);
            }
        }
        let half = (n - 1) / 2;
        let mut out = vec![w[0].clone()];
        out.extend(w[1..=half].iter().cloned());
        out
    }

    /// `alpha(D)` for `alpha = sum_j alpha_j eta^j` (any number of
    /// coefficients, so polynomials in `eta` of any degree are accepted).
    ///
    /// The support of `D` is split into Galois orbits; on a representative
    /// point `P` of each orbit, `alpha(P - P_inf)` is evaluated with the point
    /// formulas for `theta_m` over the residue field, summed over the orbit
    /// by Frobenius, and brought back down to `F`.
    pub fn apply_order_element<R: Rng + ?Sized>(
        &self,
        alpha: &[BigInt],
        d: &Divisor<F::Elem>,
        rng: &mut R,
    ) -> Divisor<F::Elem> {
        let coords = self.theta_coords(alpha);
        self.apply_theta_combination(&coords, d, rng)
    }

    pub fn apply_theta_combination<R: Rng + ?Sized>(
        &self,
        coords: &[BigInt],
        d: &Divisor<F::Elem>,
        rng: &mut R,
    ) -> Divisor<F::Elem> {
        let c = &self.curve;
        if d.is_zero() {
            return c.zero();
        }
        let mut acc = c.zero();
        for place in c.decompose_support(d, rng) {
            let l = place.field.clone();
            let cl = c.base_change(l.clone(), |a| l.embed(a));
            let point = Divisor { u: cl.ring().linear(&place.x), v: cl.ring().constant(place.y.clone()) };
            let mut img = cl.mul_big(&coords[0], &point);
            for (m, cm) in coords.iter().enumerate().skip(1) {
                if cm.is_zero() {
                    continue;
                }
                let dm = l.embed(self.theta_const(m));
                let c2m = l.embed(&self.c2m(m));
                let tm = Self::theta_point_in(&cl, &dm, &c2m, &place.x, &place.y);
                img = cl.add(&img, &cl.mul_big(cm, &tm));
            }
            // orbit sum
            let mut tr = img.clone();
            let mut conj = img;
            for _ in 1..place.degree() {
                conj = cl.frobenius(&conj);
                tr = cl.add(&tr, &conj);
            }
            let down = cl.descend(&tr).expect("orbit sum is rational");
            acc = c.add(&acc, &c.mul(place.multiplicity as i64, &down));
        }
        acc
    }

    /// `eta(D)`.
    pub fn apply_eta<R: Rng + ?Sized>(&self, d: &Divisor<F::Elem>, rng: &mut R) -> Divisor<F::Elem> {
        let mut coords = vec![BigInt::zero(); self.genus() + 1];
        coords[1] = BigInt::from(1);
        self.apply_theta_combination(&coords, d, rng)
    }

    /// Samples `trials` random divisors over `F` and checks that the minimal
    /// polynomial of `eta` annihilates each of them.
    pub fn verify_annihilation<R: Rng + ?Sized>(&self, trials: usize, rng: &mut R) -> Result<()> {
        let psi = real_cyclotomic_minpoly(self.n)?;
        for i in 0..trials {
            let (x, y) = self
                .curve
                .random_point(rng, 1000)
                .ok_or_else(|| Error::NotFound("no point found while sampling".into()))?;
            if !self.curve.is_valid(&self.eta_point(&x, &y)) {
                return Err(Error::Verification(format!("eta image of sample {i} is not a divisor")));
            }
            let d = self.curve.random_divisor(rng)?;
            let img = self.apply_order_element(psi.coeffs(), &d, rng);
            if !img.is_zero() {
                return Err(Error::Verification(format!(
                    "minimal polynomial of eta does not annihilate sample {i}"
                )));
            }
        }
        Ok(())
    }
}

/// Extension of a Dickson curve to `F_{q^e}` with the constants embedded.
pub fn extend_dickson<F: FiniteField>(dc: &DicksonCurve<F>, l: &ExtField<F>) -> DicksonCurve<ExtField<F>> {
    let curve = dc.curve.base_change(l.clone(), |a| l.embed(a));
    DicksonCurve::with_constants(curve, dc.n, l.embed(&dc.t), l.embed(&dc.c1), l.embed(&dc.c2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_extension, PrimeField};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dickson_small() {
        let r = PolyRing::new(PrimeField::new(101).unwrap());
        assert_eq!(dickson_poly(0, &r), r.from_i64s(&[2]));
        assert_eq!(dickson_poly(2, &r), r.from_i64s(&[-2, 0, 1]));
        assert_eq!(dickson_poly(5, &r), r.from_i64s(&[0, 5, 0, -5, 0, 1]));
    }

    #[test]
    fn constants_for_f11() {
        let dc = build_dickson_curve(5, 1, PrimeField::new(11).unwrap()).unwrap();
        assert_eq!(dc.c1, 3);
        assert_eq!(dc.c2, 5);
        assert_eq!(dc.genus(), 2);
    }

    #[test]
    fn minimal_polynomial_annihilates() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (n, p, t) in [(5u64, 11u64, 1u64), (5, 19, 3), (7, 29, 3), (7, 13, 5)] {
            let dc = build_dickson_curve(n, t, PrimeField::new(p).unwrap()).unwrap();
            dc.verify_annihilation(30, &mut rng).unwrap();
        }
    }

    #[test]
    fn annihilation_over_extension() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = PrimeField::new(11).unwrap();
        let dc = build_dickson_curve(5, 1, f.clone()).unwrap();
        let l = build_extension(&f, 3, 1);
        let dl = extend_dickson(&dc, &l);
        dl.verify_annihilation(20, &mut rng).unwrap();
    }

    #[test]
    fn wrong_constant_is_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let dc = build_dickson_curve(5, 1, PrimeField::new(11).unwrap()).unwrap();
        let bad = DicksonCurve::with_constants(dc.curve.clone(), 5, 1, dc.c1, 6);
        assert!(bad.verify_annihilation(20, &mut rng).is_err());
    }
}
