//! Hyperelliptic curves `y^2 = f(x)` with `deg f = 2g + 1` and divisor class
//! arithmetic on their Jacobians in Mumford form (Cantor's algorithm).

use num_bigint::{BigInt, BigUint, Sign};
use rand::Rng;

use crate::algebra::{
    distinct_degree_factors, equal_degree_split, squarefree_decomposition, ExtField, Field,
    FiniteField, Poly, PolyRing,
};
use crate::error::{Error, Result};

/// A reduced divisor class `<u, v>`: `u` monic, `deg v < deg u <= g`,
/// `u | v^2 - f`. The neutral element is `<1, 0>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Divisor<E> {
    pub u: Poly<E>,
    pub v: Poly<E>,
}

impl<E> Divisor<E> {
    pub fn weight(&self) -> usize {
        self.u.degree().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.u.len() == 1
    }
}

/// A curve `y^2 = f(x)` in odd-degree Weierstrass form over the field `F`.
#[derive(Clone, Debug)]
pub struct Curve<F: Field> {
    ring: PolyRing<F>,
    f: Poly<F::Elem>,
    g: usize,
}

impl<F: Field> Curve<F> {
    /// Validates that `f` is monic, of odd degree at least 3 and square-free,
    /// and that the characteristic is odd.
    pub fn new(field: F, f: Poly<F::Elem>) -> Result<Self> {
        let c = Self::new_unchecked(field, f)?;
        let df = c.ring.derivative(&c.f);
        if !c.ring.is_one(&c.ring.gcd(&c.f, &df)) {
            return Err(Error::InvalidInput("curve polynomial is not square-free".into()));
        }
        Ok(c)
    }

    /// Like [`Curve::new`] but skips the square-freeness test.
    pub fn new_unchecked(field: F, f: Poly<F::Elem>) -> Result<Self> {
        let ring = PolyRing::new(field);
        let d = f.degree().unwrap_or(0);
        if d < 3 || d % 2 == 0 || !ring.is_monic(&f) {
            return Err(Error::InvalidInput("f must be monic of odd degree >= 3".into()));
        }
        if ring.field().characteristic() == 2 {
            return Err(Error::InvalidInput("characteristic 2 is not supported".into()));
        }
        Ok(Curve { ring, f, g: (d - 1) / 2 })
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn f(&self) -> &Poly<F::Elem> {
        &self.f
    }

    pub fn ring(&self) -> &PolyRing<F> {
        &self.ring
    }

    pub fn field(&self) -> &F {
        self.ring.field()
    }

    pub fn zero(&self) -> Divisor<F::Elem> {
        Divisor { u: self.ring.one(), v: self.ring.zero() }
    }

    /// `u` monic, `deg v < deg u <= g` and `u | v^2 - f`.
    pub fn is_valid(&self, d: &Divisor<F::Elem>) -> bool {
        if !self.ring.is_monic(&d.u) || d.v.len() >= d.u.len() || d.weight() > self.g {
            return false;
        }
        let r = self.ring.sub(&self.ring.square(&d.v), &self.f);
        self.ring.rem(&r, &d.u).map(|x| x.is_zero()).unwrap_or(false)
    }

    /// The divisor `P - P_inf` for an affine point `P = (x, y)`.
    pub fn point(&self, x: &F::Elem, y: &F::Elem) -> Result<Divisor<F::Elem>> {
        let fld = self.field();
        if fld.square(y) != self.ring.eval(&self.f, x) {
            return Err(Error::InvalidInput("point is not on the curve".into()));
        }
        Ok(Divisor { u: self.ring.linear(x), v: self.ring.constant(y.clone()) })
    }

    pub fn negate(&self, d: &Divisor<F::Elem>) -> Divisor<F::Elem> {
        Divisor { u: d.u.clone(), v: self.ring.neg(&d.v) }
    }

    /// Cantor composition followed by reduction.
    pub fn add(&self, a: &Divisor<F::Elem>, b: &Divisor<F::Elem>) -> Divisor<F::Elem> {
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        let r = &self.ring;
        let (d0, e1, e2) = r.xgcd(&a.u, &b.u);
        let (u, v) = if r.is_one(&d0) {
            // coprime supports: v = e1 u1 v2 + e2 u2 v1 mod u1 u2
            let u = r.mul(&a.u, &b.u);
            let v = r.add(&r.mul(&r.mul(&e1, &a.u), &b.v), &r.mul(&r.mul(&e2, &b.u), &a.v));
            (u.clone(), r.rem(&v, &u).unwrap())
        } else {
            let (d, c1, c2) = r.xgcd(&d0, &r.add(&a.v, &b.v));
            let s1 = r.mul(&c1, &e1);
            let s2 = r.mul(&c1, &e2);
            let s3 = c2;
            let dd = r.square(&d);
            let u = r.div_exact(&r.mul(&a.u, &b.u), &dd).expect("d^2 | u1 u2");
            let t = r.add(
                &r.add(&r.mul(&r.mul(&s1, &a.u), &b.v), &r.mul(&r.mul(&s2, &b.u), &a.v)),
                &r.mul(&s3, &r.add(&r.mul(&a.v, &b.v), &self.f)),
            );
            let v = r.div_exact(&t, &d).expect("d divides the composed v");
            (u.clone(), r.rem(&v, &u).unwrap())
        };
        let out = self.reduce(u, v);
        debug_assert!(self.is_valid(&out), "Cantor output violates u | v^2 - f");
        out
    }

    fn reduce(&self, mut u: Poly<F::Elem>, mut v: Poly<F::Elem>) -> Divisor<F::Elem> {
        let r = &self.ring;
        while u.degree().unwrap_or(0) > self.g {
            let num = r.sub(&self.f, &r.square(&v));
            let u2 = r.monic(&r.div_exact(&num, &u).expect("u | f - v^2"));
            let v2 = r.rem(&r.neg(&v), &u2).unwrap();
            u = u2;
            v = v2;
        }
        let u = r.monic(&u);
        let v = r.rem(&v, &u).unwrap();
        Divisor { u, v }
    }

    pub fn double(&self, a: &Divisor<F::Elem>) -> Divisor<F::Elem> {
        self.add(a, a)
    }

    pub fn sub(&self, a: &Divisor<F::Elem>, b: &Divisor<F::Elem>) -> Divisor<F::Elem> {
        self.add(a, &self.negate(b))
    }

    pub fn mul_big(&self, m: &BigInt, d: &Divisor<F::Elem>) -> Divisor<F::Elem> {
        let base = if m.sign() == Sign::Minus { self.negate(d) } else { d.clone() };
        self.mul_unsigned(m.magnitude(), &base)
    }

    pub fn mul_unsigned(&self, m: &BigUint, d: &Divisor<F::Elem>) -> Divisor<F::Elem> {
        let mut acc = self.zero();
        for i in (0..m.bits()).rev() {
            acc = self.double(&acc);
            if m.bit(i) {
                acc = self.add(&acc, d);
            }
        }
        acc
    }

    pub fn mul(&self, m: i64, d: &Divisor<F::Elem>) -> Divisor<F::Elem> {
        self.mul_big(&BigInt::from(m), d)
    }

    /// Applies a ring homomorphism of the coefficient field to `u` and `v`.
    pub fn map_coeffs(
        &self,
        d: &Divisor<F::Elem>,
        h: impl Fn(&F::Elem) -> F::Elem,
    ) -> Divisor<F::Elem> {
        Divisor { u: self.ring.map(&d.u, &self.ring, &h), v: self.ring.map(&d.v, &self.ring, &h) }
    }

    /// The same curve over another field, through an embedding of coefficients.
    pub fn base_change<G: Field>(&self, target: G, emb: impl Fn(&F::Elem) -> G::Elem) -> Curve<G> {
        let ring = PolyRing::new(target);
        let f = self.ring.map(&self.f, &ring, emb);
        Curve { ring, f, g: self.g }
    }
}

impl<F: FiniteField> Curve<F> {
    /// A random affine point, or `None` when `tries` abscissae all fail.
    pub fn random_point<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        tries: usize,
    ) -> Option<(F::Elem, F::Elem)> {
        let fld = self.field();
        for _ in 0..tries {
            let x = fld.random(rng);
            let fx = self.ring.eval(&self.f, &x);
            if let Some(mut y) = fld.sqrt(&fx) {
                if rng.gen_bool(0.5) {
                    y = fld.neg(&y);
                }
                return Some((x, y));
            }
        }
        None
    }

    /// Sum of `g` random points: a valid divisor of weight at most `g`.
    pub fn random_divisor<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Divisor<F::Elem>> {
        let mut d = self.zero();
        for _ in 0..self.g {
            let (x, y) = self
                .random_point(rng, 1000)
                .ok_or_else(|| Error::NotFound("no point found while sampling".into()))?;
            d = self.add(&d, &Divisor { u: self.ring.linear(&x), v: self.ring.constant(y) });
        }
        Ok(d)
    }

    /// Splits the support of `d` into Galois orbits: one [`Place`] per
    /// irreducible factor of `u`, with its multiplicity.
    pub fn decompose_support<R: Rng + ?Sized>(
        &self,
        d: &Divisor<F::Elem>,
        rng: &mut R,
    ) -> Vec<Place<F>> {
        let r = &self.ring;
        let mut out = Vec::new();
        for (sq, mult) in squarefree_decomposition(r, &d.u) {
            for h in irreducible_factors(r, &sq, rng) {
                let field = ExtField::new(self.field().clone(), h.clone()).expect("monic factor");
                let x = field.gen();
                let v = r.rem(&d.v, &h).unwrap();
                let y = eval_in_ext(&field, &v, &x);
                out.push(Place { h, multiplicity: mult, field, x, y });
            }
        }
        out
    }

    /// The divisor `sum m_P (P - P_inf)` for a list of places.
    pub fn recompose(&self, places: &[Place<F>]) -> Divisor<F::Elem> {
        let r = &self.ring;
        let mut acc = self.zero();
        for pl in places {
            // <h, v> for the orbit, then the multiple
            let vcoeffs = pl.y.clone();
            let v = r.from_coeffs(vcoeffs);
            let one = Divisor { u: pl.h.clone(), v: r.rem(&v, &pl.h).unwrap() };
            acc = self.add(&acc, &self.mul(pl.multiplicity as i64, &one));
        }
        acc
    }
}

/// Irreducible monic factors of a square-free polynomial.
pub fn irreducible_factors<F: FiniteField, R: Rng + ?Sized>(
    r: &PolyRing<F>,
    f: &Poly<F::Elem>,
    rng: &mut R,
) -> Vec<Poly<F::Elem>> {
    let fld = r.field();
    let mut out = Vec::new();
    match f.degree() {
        None | Some(0) => return out,
        Some(1) => return vec![r.monic(f)],
        Some(2) => {
            let f = r.monic(f);
            let b = &f.coeffs()[1];
            let c = &f.coeffs()[0];
            let disc = fld.sub(&fld.square(b), &fld.mul(&fld.from_i64(4), c));
            if let Some(s) = fld.sqrt(&disc) {
                let half = fld.inv(&fld.from_i64(2)).unwrap();
                let r1 = fld.mul(&fld.sub(&s, b), &half);
                let r2 = fld.mul(&fld.sub(&fld.neg(&s), b), &half);
                return vec![r.linear(&r1), r.linear(&r2)];
            }
            return vec![f];
        }
        _ => {}
    }
    let n = f.degree().unwrap();
    for (d, h) in distinct_degree_factors(r, f, n) {
        out.extend(equal_degree_split(r, &h, d, rng));
    }
    out
}

/// Evaluates a polynomial over `F` at an element of an extension of `F`.
pub fn eval_in_ext<F: FiniteField>(
    l: &ExtField<F>,
    p: &Poly<F::Elem>,
    x: &<ExtField<F> as Field>::Elem,
) -> <ExtField<F> as Field>::Elem {
    let mut acc = l.zero();
    for c in p.coeffs().iter().rev() {
        acc = l.mul(&acc, x);
        acc = l.add(&acc, &l.embed(c));
    }
    acc
}

/// One Galois orbit of points in the support of a divisor: the roots of the
/// irreducible `h`, represented by the point `(x, y)` over `F[T]/(h)`.
#[derive(Clone, Debug)]
pub struct Place<F: FiniteField> {
    pub h: Poly<F::Elem>,
    pub multiplicity: usize,
    pub field: ExtField<F>,
    pub x: <ExtField<F> as Field>::Elem,
    pub y: <ExtField<F> as Field>::Elem,
}

impl<F: FiniteField> Place<F> {
    pub fn degree(&self) -> usize {
        self.h.degree().unwrap()
    }

    /// The conjugate points `(x^{|F|^j}, y^{|F|^j})`.
    pub fn conjugates(&self) -> Vec<(Vec<F::Elem>, Vec<F::Elem>)> {
        let mut out = vec![(self.x.clone(), self.y.clone())];
        for _ in 1..self.degree() {
            let (x, y) = out.last().unwrap();
            out.push((self.field.frobenius_base(x), self.field.frobenius_base(y)));
        }
        out
    }
}

impl<B: FiniteField> Curve<ExtField<B>> {
    /// The `|B|`-power Frobenius on coefficients, for a curve defined over `B`.
    pub fn frobenius(&self, d: &Divisor<Vec<B::Elem>>) -> Divisor<Vec<B::Elem>> {
        let l = self.field().clone();
        self.map_coeffs(d, |c| l.frobenius_base(c))
    }

    pub fn frobenius_pow(&self, d: &Divisor<Vec<B::Elem>>, k: usize) -> Divisor<Vec<B::Elem>> {
        let mut out = d.clone();
        for _ in 0..k {
            out = self.frobenius(&out);
        }
        out
    }

    /// Divisors whose coefficients all lie in `B`, mapped down.
    pub fn descend(&self, d: &Divisor<Vec<B::Elem>>) -> Option<Divisor<B::Elem>> {
        let l = self.field();
        let br = l.base_ring();
        let down = |p: &Poly<Vec<B::Elem>>| -> Option<Poly<B::Elem>> {
            let c: Option<Vec<B::Elem>> = p.coeffs().iter().map(|c| l.to_base(c)).collect();
            c.map(|c| br.from_coeffs(c))
        };
        Some(Divisor { u: down(&d.u)?, v: down(&d.v)? })
    }
}
