use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{is_irreducible, Field, FiniteField, ModReducer, Poly, PolyRing};
use crate::error::{Error, Result};

/// A simple extension `B[z]/(m(z))` of a finite field `B` by a monic
/// irreducible `m`. Elements are coordinate vectors of length `deg m`.
#[derive(Clone)]
pub struct ExtField<B: FiniteField> {
    inner: Arc<Inner<B>>,
}

struct Inner<B: FiniteField> {
    base: B,
    k: usize,
    ring: PolyRing<B>,
    red: ModReducer<B>,
    order: BigUint,
    /// `z^(|B| i)` for `i < k`, built on first use.
    frob: OnceLock<Vec<Vec<B::Elem>>>,
}

impl<B: FiniteField> fmt::Debug for ExtField<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtField({:?}, {:?})", self.inner.base, self.inner.red.modulus().coeffs())
    }
}

impl<B: FiniteField> PartialEq for ExtField<B> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.red.modulus() == other.inner.red.modulus()
                && format!("{:?}", self.inner.base) == format!("{:?}", other.inner.base))
    }
}

impl<B: FiniteField> ExtField<B> {
    /// The caller guarantees that `modulus` is monic and irreducible over `base`.
    pub fn new(base: B, modulus: Poly<B::Elem>) -> Result<Self> {
        let ring = PolyRing::new(base.clone());
        if !ring.is_monic(&modulus) || modulus.degree().unwrap_or(0) == 0 {
            return Err(Error::InvalidInput("extension modulus must be monic of positive degree".into()));
        }
        let k = modulus.degree().unwrap();
        let red = ModReducer::new(&ring, &modulus);
        let order = base.order().pow(k as u32);
        Ok(ExtField { inner: Arc::new(Inner { base, k, ring, red, order, frob: OnceLock::new() }) })
    }

    pub fn base(&self) -> &B {
        &self.inner.base
    }

    /// Degree over the base field.
    pub fn ext_degree(&self) -> usize {
        self.inner.k
    }

    pub fn modulus(&self) -> &Poly<B::Elem> {
        self.inner.red.modulus()
    }

    pub fn base_ring(&self) -> &PolyRing<B> {
        &self.inner.ring
    }

    /// The class of `z`.
    pub fn gen(&self) -> Vec<B::Elem> {
        let mut v = vec![self.inner.base.zero(); self.inner.k];
        if self.inner.k == 1 {
            // z = -m_0
            v[0] = self.inner.base.neg(&self.modulus().coeffs()[0]);
        } else {
            v[1] = self.inner.base.one();
        }
        v
    }

    pub fn embed(&self, b: &B::Elem) -> Vec<B::Elem> {
        let mut v = vec![self.inner.base.zero(); self.inner.k];
        v[0] = b.clone();
        v
    }

    /// The base-field element represented by `a`, if it lies in the base.
    pub fn to_base(&self, a: &[B::Elem]) -> Option<B::Elem> {
        if a[1..].iter().all(|c| self.inner.base.is_zero(c)) {
            Some(a[0].clone())
        } else {
            None
        }
    }

    pub fn from_poly(&self, p: &Poly<B::Elem>) -> Vec<B::Elem> {
        let r = self.inner.red.reduce(p);
        self.pad(r.into_coeffs())
    }

    pub fn to_poly(&self, a: &[B::Elem]) -> Poly<B::Elem> {
        self.inner.ring.from_coeffs(a.to_vec())
    }

    /// An embedding into `other` (an extension of the same base whose degree
    /// is a multiple of this one), given by the image of the generator.
    pub fn embedding_into<R: Rng + ?Sized>(&self, other: &ExtField<B>, rng: &mut R) -> Option<Vec<B::Elem>> {
        let ring = PolyRing::new(other.clone());
        let m = self.inner.ring.map(self.modulus(), &ring, |c| other.embed(c));
        super::roots(&ring, &m, rng).ok()?.into_iter().next()
    }

    /// Image of `a` under the embedding sending the generator to `image`.
    pub fn map_into(&self, a: &[B::Elem], other: &ExtField<B>, image: &[B::Elem]) -> Vec<B::Elem> {
        let ring = PolyRing::new(other.clone());
        let p = self.inner.ring.map(&self.to_poly(a), &ring, |c| other.embed(c));
        ring.eval(&p, &image.to_vec())
    }

    /// Extended Euclid against the modulus, keeping the divisor monic so
    /// that each elimination step costs one multiplication per coefficient.
    /// Invariant: `s0 a = r0` and `s1 a = r1` mod the modulus.
    fn inv_euclid(&self, a: &[B::Elem]) -> Option<Vec<B::Elem>> {
        let f = &self.inner.base;
        let trim = |v: &mut Vec<B::Elem>| {
            while v.last().is_some_and(|c| f.is_zero(c)) {
                v.pop();
            }
        };
        let make_monic = |r: &mut Vec<B::Elem>, s: &mut Vec<B::Elem>| -> Option<()> {
            let li = f.inv(r.last()?)?;
            r.iter_mut().for_each(|c| *c = f.mul(c, &li));
            s.iter_mut().for_each(|c| *c = f.mul(c, &li));
            Some(())
        };
        let mut r0 = self.modulus().coeffs().to_vec();
        let mut s0: Vec<B::Elem> = Vec::new();
        let mut r1 = a.to_vec();
        trim(&mut r1);
        let mut s1 = vec![f.one()];
        make_monic(&mut r1, &mut s1)?;
        while r1.len() > 1 {
            while r0.len() >= r1.len() {
                let j = r0.len() - r1.len();
                let c = r0.last().unwrap().clone();
                let top = r1.len() - 1;
                f.sub_scaled(&mut r0[j..j + top], &c, &r1[..top]);
                r0.pop();
                if s0.len() < s1.len() + j {
                    s0.resize(s1.len() + j, f.zero());
                }
                f.sub_scaled(&mut s0[j..], &c, &s1);
                trim(&mut r0);
            }
            make_monic(&mut r0, &mut s0)?;
            std::mem::swap(&mut r0, &mut r1);
            std::mem::swap(&mut s0, &mut s1);
        }
        trim(&mut s1);
        if s1.len() > self.inner.k {
            s1 = self.inner.red.reduce_vec(s1);
        }
        Some(self.pad(s1))
    }

    fn pad(&self, mut v: Vec<B::Elem>) -> Vec<B::Elem> {
        v.resize(self.inner.k, self.inner.base.zero());
        v
    }

    fn frob_table(&self) -> &Vec<Vec<B::Elem>> {
        self.inner.frob.get_or_init(|| {
            let z = self.to_poly(&self.gen());
            let zq = self.inner.ring.pow_mod(&z, &self.inner.base.order(), &self.inner.red);
            let zq = self.pad(zq.into_coeffs());
            let mut rows = Vec::with_capacity(self.inner.k);
            let mut cur = self.one();
            for _ in 0..self.inner.k {
                rows.push(cur.clone());
                cur = self.mul(&cur, &zq);
            }
            rows
        })
    }

    /// `a^|B|`, the generator of `Gal(self / B)`.
    pub fn frobenius_base(&self, a: &[B::Elem]) -> Vec<B::Elem> {
        let rows = self.frob_table();
        let mut acc = vec![self.inner.base.zero(); self.inner.k];
        self.inner.base.fold_rows(&mut acc, a, rows);
        acc
    }

    /// Norm down to the base field.
    pub fn norm(&self, a: &[B::Elem]) -> B::Elem {
        let p = self.to_poly(a);
        self.inner.ring.resultant(self.modulus(), &p)
    }

    /// Trace down to the base field.
    pub fn trace(&self, a: &[B::Elem]) -> B::Elem {
        let mut acc = a.to_vec();
        let mut cur = a.to_vec();
        for _ in 1..self.inner.k {
            cur = self.frobenius_base(&cur);
            acc = self.add(&acc, &cur);
        }
        acc[0].clone()
    }
}

impl<B: FiniteField> Field for ExtField<B> {
    type Elem = Vec<B::Elem>;

    fn zero(&self) -> Self::Elem {
        vec![self.inner.base.zero(); self.inner.k]
    }
    fn one(&self) -> Self::Elem {
        self.embed(&self.inner.base.one())
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.iter().all(|c| self.inner.base.is_zero(c))
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.inner.base.add(x, y)).collect()
    }
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.inner.base.sub(x, y)).collect()
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.inner.base.neg(x)).collect()
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let prod = self.inner.base.mul_slices(a, b);
        self.pad(self.inner.red.reduce_vec(prod))
    }
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if self.is_zero(a) {
            return None;
        }
        let base = &self.inner.base;
        if let Some(b) = self.to_base(a) {
            return Some(self.embed(&base.inv(&b)?));
        }
        self.inv_euclid(a)
    }
    fn from_i64(&self, n: i64) -> Self::Elem {
        self.embed(&self.inner.base.from_i64(n))
    }
    fn characteristic(&self) -> u64 {
        self.inner.base.characteristic()
    }

    /// Kronecker substitution: pack each coefficient into a block of
    /// `2k - 1` base coefficients, multiply once over the base, then unpack.
    fn mul_slices(&self, a: &[Self::Elem], b: &[Self::Elem]) -> Vec<Self::Elem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let k = self.inner.k;
        if a.len().min(b.len()) < 4 || k == 1 {
            return default_mul_slices(self, a, b);
        }
        let zero = self.inner.base.zero();
        let stride = 2 * k - 1;
        let pack = |v: &[Self::Elem]| {
            let mut flat = vec![zero.clone(); v.len() * stride];
            for (i, c) in v.iter().enumerate() {
                flat[i * stride..i * stride + k].clone_from_slice(c);
            }
            flat
        };
        let flat = self.inner.base.mul_slices(&pack(a), &pack(b));
        let n = a.len() + b.len() - 1;
        (0..n)
            .map(|s| {
                let lo = s * stride;
                let hi = (lo + stride).min(flat.len());
                let block = if lo < hi { flat[lo..hi].to_vec() } else { Vec::new() };
                self.pad(self.inner.red.reduce_vec(block))
            })
            .collect()
    }
}

fn default_mul_slices<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let t = f.mul(x, y);
            out[i + j] = f.add(&out[i + j], &t);
        }
    }
    out
}

impl<B: FiniteField> FiniteField for ExtField<B> {
    fn order(&self) -> BigUint {
        self.inner.order.clone()
    }
    fn degree(&self) -> usize {
        self.inner.k * self.inner.base.degree()
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        (0..self.inner.k).map(|_| self.inner.base.random(rng)).collect()
    }
    fn element_at(&self, index: &BigUint) -> Self::Elem {
        let bq = self.inner.base.order();
        let mut rest = index.clone();
        let mut v = Vec::with_capacity(self.inner.k);
        for _ in 0..self.inner.k {
            let (q, r) = rest.div_rem(&bq);
            v.push(self.inner.base.element_at(&r));
            rest = q;
        }
        debug_assert!(rest.is_zero());
        v
    }
    fn index_of(&self, a: &Self::Elem) -> BigUint {
        let bq = self.inner.base.order();
        a.iter().rev().fold(BigUint::zero(), |acc, c| acc * &bq + self.inner.base.index_of(c))
    }
    /// `a` is a square iff its norm to the base is.
    fn is_square(&self, a: &Self::Elem) -> bool {
        if self.is_zero(a) {
            return true;
        }
        self.inner.base.is_square(&self.norm(a))
    }
}

/// An extension of `base` of degree `k` with a modulus chosen
/// deterministically from `seed`: sparse trinomials are tried first because
/// they make reduction cheap, then dense random monic polynomials.
pub fn build_extension<B: FiniteField>(base: &B, k: usize, seed: u64) -> ExtField<B> {
    assert!(k >= 1);
    let ring = PolyRing::new(base.clone());
    if k == 1 {
        return ExtField::new(base.clone(), ring.x()).expect("monic");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let zero = base.zero();
    let one = base.one();
    let sparse_tries = 20 * k + 40;
    for attempt in 0.. {
        let mut c = vec![zero.clone(); k + 1];
        c[k] = one.clone();
        c[0] = base.random_nonzero(&mut rng);
        if attempt < sparse_tries {
            let j = rng.gen_range(1..k);
            c[j] = base.random(&mut rng);
        } else {
            for v in c[1..k].iter_mut() {
                *v = base.random(&mut rng);
            }
        }
        let m = ring.from_coeffs(c);
        if is_irreducible(&ring, &m) {
            return ExtField::new(base.clone(), m).expect("monic");
        }
    }
    unreachable!()
}
