use num_bigint::BigUint;

use super::Field;
use crate::error::{Error, Result};

/// Dense univariate polynomial, coefficients lowest degree first, with no
/// trailing zeros. The zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<E> {
    c: Vec<E>,
}

impl<E> Poly<E> {
    pub fn coeffs(&self) -> &[E] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<E> {
        self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to `-1`.
    pub fn deg_i(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn lc(&self) -> Option<&E> {
        self.c.last()
    }

    pub fn coeff(&self, i: usize) -> Option<&E> {
        self.c.get(i)
    }
}

/// Polynomial arithmetic over a field.
#[derive(Clone, Debug)]
pub struct PolyRing<F: Field> {
    f: F,
}

impl<F: Field> PolyRing<F> {
    pub fn new(f: F) -> Self {
        PolyRing { f }
    }

    pub fn field(&self) -> &F {
        &self.f
    }

    pub fn from_coeffs(&self, mut c: Vec<F::Elem>) -> Poly<F::Elem> {
        while let Some(last) = c.last() {
            if self.f.is_zero(last) {
                c.pop();
            } else {
                break;
            }
        }
        Poly { c }
    }

    pub fn from_i64s(&self, c: &[i64]) -> Poly<F::Elem> {
        self.from_coeffs(c.iter().map(|&v| self.f.from_i64(v)).collect())
    }

    pub fn zero(&self) -> Poly<F::Elem> {
        Poly { c: Vec::new() }
    }

    pub fn one(&self) -> Poly<F::Elem> {
        self.constant(self.f.one())
    }

    pub fn constant(&self, a: F::Elem) -> Poly<F::Elem> {
        self.from_coeffs(vec![a])
    }

    pub fn x(&self) -> Poly<F::Elem> {
        self.monomial(self.f.one(), 1)
    }

    pub fn monomial(&self, a: F::Elem, d: usize) -> Poly<F::Elem> {
        let mut c = vec![self.f.zero(); d + 1];
        c[d] = a;
        self.from_coeffs(c)
    }

    /// `X - a`.
    pub fn linear(&self, a: &F::Elem) -> Poly<F::Elem> {
        Poly { c: vec![self.f.neg(a), self.f.one()] }
    }

    pub fn is_one(&self, a: &Poly<F::Elem>) -> bool {
        a.c.len() == 1 && self.f.is_one(&a.c[0])
    }

    pub fn is_monic(&self, a: &Poly<F::Elem>) -> bool {
        a.lc().is_some_and(|l| self.f.is_one(l))
    }

    pub fn add(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
        let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
        let mut c = long.c.clone();
        for (x, y) in c.iter_mut().zip(&short.c) {
            *x = self.f.add(x, y);
        }
        self.from_coeffs(c)
    }

    pub fn sub(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
        let n = a.len().max(b.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            let v = match (a.c.get(i), b.c.get(i)) {
                (Some(x), Some(y)) => self.f.sub(x, y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => self.f.neg(y),
                (None, None) => unreachable!(),
            };
            c.push(v);
        }
        self.from_coeffs(c)
    }

    pub fn neg(&self, a: &Poly<F::Elem>) -> Poly<F::Elem> {
        Poly { c: a.c.iter().map(|x| self.f.neg(x)).collect() }
    }

    pub fn scale(&self, a: &Poly<F::Elem>, s: &F::Elem) -> Poly<F::Elem> {
        if self.f.is_zero(s) {
            return self.zero();
        }
        self.from_coeffs(a.c.iter().map(|x| self.f.mul(x, s)).collect())
    }

    pub fn mul(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
        self.from_coeffs(self.f.mul_slices(&a.c, &b.c))
    }

    pub fn square(&self, a: &Poly<F::Elem>) -> Poly<F::Elem> {
        self.mul(a, a)
    }

    pub fn mul_xn(&self, a: &Poly<F::Elem>, n: usize) -> Poly<F::Elem> {
        if a.is_zero() {
            return self.zero();
        }
        let mut c = vec![self.f.zero(); n];
        c.extend(a.c.iter().cloned());
        Poly { c }
    }

    pub fn pow(&self, a: &Poly<F::Elem>, e: u64) -> Poly<F::Elem> {
        let mut acc = self.one();
        for i in (0..64 - e.leading_zeros()).rev() {
            acc = self.square(&acc);
            if (e >> i) & 1 == 1 {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    pub fn monic(&self, a: &Poly<F::Elem>) -> Poly<F::Elem> {
        match a.lc() {
            None => self.zero(),
            Some(l) if self.f.is_one(l) => a.clone(),
            Some(l) => {
                let li = self.f.inv(l).expect("nonzero leading coefficient");
                self.scale(a, &li)
            }
        }
    }

    pub fn divrem(
        &self,
        a: &Poly<F::Elem>,
        b: &Poly<F::Elem>,
    ) -> Result<(Poly<F::Elem>, Poly<F::Elem>)> {
        let lb = b.lc().ok_or(Error::DivisionByZero)?;
        if a.len() < b.len() {
            return Ok((self.zero(), a.clone()));
        }
        let lbi = if self.f.is_one(lb) { self.f.one() } else { self.f.inv(lb).ok_or(Error::DivisionByZero)? };
        let monic = self.f.is_one(lb);
        let db = b.len() - 1;
        let mut r = a.c.clone();
        let mut q = vec![self.f.zero(); a.len() - db];
        for i in (db..a.len()).rev() {
            if self.f.is_zero(&r[i]) {
                continue;
            }
            let c = if monic { r[i].clone() } else { self.f.mul(&r[i], &lbi) };
            for (j, bj) in b.c[..db].iter().enumerate() {
                let t = self.f.mul(&c, bj);
                r[i - db + j] = self.f.sub(&r[i - db + j], &t);
            }
            r[i] = self.f.zero();
            q[i - db] = c;
        }
        r.truncate(db);
        Ok((self.from_coeffs(q), self.from_coeffs(r)))
    }

    pub fn rem(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Result<Poly<F::Elem>> {
        Ok(self.divrem(a, b)?.1)
    }

    /// Quotient of an exact division; errors if the remainder is nonzero.
    pub fn div_exact(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Result<Poly<F::Elem>> {
        let (q, r) = self.divrem(a, b)?;
        if !r.is_zero() {
            return Err(Error::Verification("inexact polynomial division".into()));
        }
        Ok(q)
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
        let mut a = self.monic(a);
        let mut b = self.monic(b);
        while !b.is_zero() {
            let r = self.rem(&a, &b).expect("nonzero divisor");
            a = b;
            b = self.monic(&r);
        }
        a
    }

    /// Returns `(g, s, t)` with `g = s a + t b` and `g` monic.
    pub fn xgcd(
        &self,
        a: &Poly<F::Elem>,
        b: &Poly<F::Elem>,
    ) -> (Poly<F::Elem>, Poly<F::Elem>, Poly<F::Elem>) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (self.one(), self.zero());
        let (mut t0, mut t1) = (self.zero(), self.one());
        while !r1.is_zero() {
            let (q, r) = self.divrem(&r0, &r1).expect("nonzero divisor");
            let s2 = self.sub(&s0, &self.mul(&q, &s1));
            let t2 = self.sub(&t0, &self.mul(&q, &t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        match r0.lc() {
            None => (r0, s0, t0),
            Some(l) => {
                let li = self.f.inv(l).expect("nonzero");
                (self.scale(&r0, &li), self.scale(&s0, &li), self.scale(&t0, &li))
            }
        }
    }

    /// Inverse of `a` modulo `m`, if it exists.
    pub fn inv_mod(&self, a: &Poly<F::Elem>, m: &Poly<F::Elem>) -> Option<Poly<F::Elem>> {
        let (g, s, _) = self.xgcd(a, m);
        if self.is_one(&g) {
            Some(self.rem(&s, m).expect("nonzero modulus"))
        } else {
            None
        }
    }

    pub fn eval(&self, a: &Poly<F::Elem>, x: &F::Elem) -> F::Elem {
        let mut acc = self.f.zero();
        for c in a.c.iter().rev() {
            acc = self.f.mul(&acc, x);
            acc = self.f.add(&acc, c);
        }
        acc
    }

    pub fn derivative(&self, a: &Poly<F::Elem>) -> Poly<F::Elem> {
        if a.len() <= 1 {
            return self.zero();
        }
        let c = a.c[1..]
            .iter()
            .enumerate()
            .map(|(i, x)| self.f.mul(x, &self.f.from_i64(i as i64 + 1)))
            .collect();
        self.from_coeffs(c)
    }

    /// `a(b)`.
    pub fn compose(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
        let mut acc = self.zero();
        for c in a.c.iter().rev() {
            acc = self.mul(&acc, b);
            acc = self.add(&acc, &self.constant(c.clone()));
        }
        acc
    }

    /// `a(b) mod m`.
    pub fn compose_mod(
        &self,
        a: &Poly<F::Elem>,
        b: &Poly<F::Elem>,
        m: &ModReducer<F>,
    ) -> Poly<F::Elem> {
        let mut acc = self.zero();
        for c in a.c.iter().rev() {
            acc = m.mul(&acc, b);
            acc = self.add(&acc, &self.constant(c.clone()));
        }
        acc
    }

    /// Resultant `Res(a, b)`, computed along the Euclidean remainder sequence.
    pub fn resultant(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> F::Elem {
        if a.is_zero() || b.is_zero() {
            return self.f.zero();
        }
        let mut a = a.clone();
        let mut b = b.clone();
        let mut acc = self.f.one();
        if a.len() < b.len() {
            if (a.len() - 1) * (b.len() - 1) % 2 == 1 {
                acc = self.f.neg(&acc);
            }
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            let da = a.len() - 1;
            let db = b.len() - 1;
            if db == 0 {
                let t = self.f.pow_u64(&b.c[0], da as u64);
                return self.f.mul(&acc, &t);
            }
            let r = self.rem(&a, &b).expect("nonzero");
            if r.is_zero() {
                return self.f.zero();
            }
            let dr = r.len() - 1;
            if da * db % 2 == 1 {
                acc = self.f.neg(&acc);
            }
            let t = self.f.pow_u64(b.lc().unwrap(), (da - dr) as u64);
            acc = self.f.mul(&acc, &t);
            a = b;
            b = r;
        }
    }

    /// Maps each coefficient through `g` into another ring.
    pub fn map<G: Field>(
        &self,
        a: &Poly<F::Elem>,
        target: &PolyRing<G>,
        g: impl Fn(&F::Elem) -> G::Elem,
    ) -> Poly<G::Elem> {
        target.from_coeffs(a.c.iter().map(g).collect())
    }

    /// `a^e mod m`.
    pub fn pow_mod(&self, a: &Poly<F::Elem>, e: &BigUint, m: &ModReducer<F>) -> Poly<F::Elem> {
        let base = m.reduce(a);
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = m.mul(&acc, &acc);
            if e.bit(i) {
                acc = m.mul(&acc, &base);
            }
        }
        m.reduce(&acc)
    }
}

/// Fast repeated reduction modulo a fixed monic polynomial.
#[derive(Clone, Debug)]
pub struct ModReducer<F: Field> {
    ring: PolyRing<F>,
    modulus: Poly<F::Elem>,
    kind: ReduceKind<F::Elem>,
}

#[derive(Clone, Debug)]
enum ReduceKind<E> {
    /// Nonzero lower coefficients `(index, m_i)` of a sparse modulus.
    Sparse(Vec<(usize, E)>),
    /// Power series inverse of the reversed modulus, to precision `deg - 1`.
    Barrett(Vec<E>),
}

const SPARSE_TERMS: usize = 8;

impl<F: Field> ModReducer<F> {
    /// `m` must be monic of positive degree.
    pub fn new(ring: &PolyRing<F>, m: &Poly<F::Elem>) -> Self {
        let f = ring.field();
        assert!(ring.is_monic(m) && m.len() >= 2, "modulus must be monic, positive degree");
        let k = m.len() - 1;
        let terms: Vec<(usize, F::Elem)> = m.c[..k]
            .iter()
            .enumerate()
            .filter(|(_, c)| !f.is_zero(c))
            .map(|(i, c)| (i, c.clone()))
            .collect();
        let kind = if terms.len() <= SPARSE_TERMS || k < 32 {
            ReduceKind::Sparse(terms)
        } else {
            let rev: Vec<F::Elem> = m.c.iter().rev().cloned().collect();
            ReduceKind::Barrett(series_inverse(f, &rev, k - 1))
        };
        ModReducer { ring: ring.clone(), modulus: m.clone(), kind }
    }

    pub fn modulus(&self) -> &Poly<F::Elem> {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn ring(&self) -> &PolyRing<F> {
        &self.ring
    }

    /// Reduces a coefficient vector of length at most `2 deg - 1`, or any
    /// length in the sparse case.
    pub fn reduce_vec(&self, mut r: Vec<F::Elem>) -> Vec<F::Elem> {
        let f = self.ring.field();
        let k = self.degree();
        if r.len() <= k {
            return r;
        }
        match &self.kind {
            ReduceKind::Sparse(terms) => {
                for i in (k..r.len()).rev() {
                    if f.is_zero(&r[i]) {
                        continue;
                    }
                    let c = r[i].clone();
                    for (j, mj) in terms {
                        let t = f.mul(&c, mj);
                        r[i - k + j] = f.sub(&r[i - k + j], &t);
                    }
                }
                r.truncate(k);
                r
            }
            ReduceKind::Barrett(inv) => {
                if r.len() > 2 * k - 1 {
                    let p = self.ring.from_coeffs(r);
                    return self.ring.rem(&p, &self.modulus).unwrap().into_coeffs();
                }
                let n = r.len() - 1;
                let qlen = n - k + 1;
                let rev_a: Vec<F::Elem> = r[n + 1 - qlen..].iter().rev().cloned().collect();
                let mut qrev = f.mul_slices(&rev_a, &inv[..qlen.min(inv.len())]);
                qrev.truncate(qlen);
                qrev.resize(qlen, f.zero());
                let q: Vec<F::Elem> = qrev.into_iter().rev().collect();
                let qm = f.mul_slices(&q, &self.modulus.c[..k]);
                let mut out = r;
                out.truncate(k);
                for (o, v) in out.iter_mut().zip(qm) {
                    *o = f.sub(o, &v);
                }
                out
            }
        }
    }

    pub fn reduce(&self, a: &Poly<F::Elem>) -> Poly<F::Elem> {
        if a.len() <= self.degree() {
            return a.clone();
        }
        if a.len() > 2 * self.degree() - 1 && matches!(self.kind, ReduceKind::Barrett(_)) {
            return self.ring.rem(a, &self.modulus).unwrap();
        }
        self.ring.from_coeffs(self.reduce_vec(a.c.clone()))
    }

    /// Product of two reduced polynomials, reduced.
    pub fn mul(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
        let f = self.ring.field();
        let prod = f.mul_slices(&a.c, &b.c);
        self.ring.from_coeffs(self.reduce_vec(prod))
    }
}

/// Power series inverse of `a` (with `a[0]` invertible) modulo `X^n`.
fn series_inverse<F: Field>(f: &F, a: &[F::Elem], n: usize) -> Vec<F::Elem> {
    if n == 0 {
        return Vec::new();
    }
    let mut inv = vec![f.inv(&a[0]).expect("unit constant term")];
    let mut prec = 1;
    while prec < n {
        let next = (2 * prec).min(n);
        // inv <- inv * (2 - a * inv) mod X^next
        let at: Vec<F::Elem> = a.iter().take(next).cloned().collect();
        let mut e = f.mul_slices(&at, &inv);
        e.truncate(next);
        e.resize(next, f.zero());
        for v in e.iter_mut() {
            *v = f.neg(v);
        }
        e[0] = f.add(&e[0], &f.from_i64(2));
        let mut ni = f.mul_slices(&inv, &e);
        ni.truncate(next);
        ni.resize(next, f.zero());
        inv = ni;
        prec = next;
    }
    inv
}
