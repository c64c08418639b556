//! Exact arithmetic over finite fields and univariate polynomial rings.
//!
//! Fields are handles: an element is a plain value (`Field::Elem`) and every
//! operation goes through the field object that owns it. Handles are cheap to
//! clone and immutable, so they can be shared freely between threads.

mod ext;
mod factor;
mod intpoly;
mod linalg;
mod mpoly;
mod poly;
mod prime;

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigUint;
use rand::Rng;

pub use ext::{build_extension, ExtField};
pub use factor::{
    distinct_degree_factors, equal_degree_split, DistinctDegree, is_irreducible, roots, roots_in_prime_field,
    squarefree_decomposition, squarefree_part, x_pow_mod,
};
pub use intpoly::{charpoly, det_bareiss, int_poly_eval, int_resultant, mat_mul, IntPoly};
pub use linalg::solve_linear;
pub use mpoly::{mpoly_det, mpoly_resultant, MPoly, MPolyRing};
pub use poly::{ModReducer, Poly, PolyRing};
pub use prime::{is_prime_u64, jacobi, PrimeField};

/// A commutative field (or, for the function field, something that behaves
/// like one on the elements it is fed).
pub trait Field: Clone + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Eq + Hash + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn characteristic(&self) -> u64;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn square(&self, a: &Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }

    fn pow_u64(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.square(&base);
            }
        }
        acc
    }

    fn pow(&self, a: &Self::Elem, e: &BigUint) -> Self::Elem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.square(&acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// Coefficient vector of the product of two polynomials given by their
    /// coefficient slices (lowest degree first). Implementations may override
    /// this with delayed reduction or Karatsuba.
    fn mul_slices(&self, a: &[Self::Elem], b: &[Self::Elem]) -> Vec<Self::Elem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                let t = self.mul(x, y);
                out[i + j] = self.add(&out[i + j], &t);
            }
        }
        out
    }

    /// `dst[i] -= c * src[i]` over the common length.
    fn sub_scaled(&self, dst: &mut [Self::Elem], c: &Self::Elem, src: &[Self::Elem]) {
        for (d, s) in dst.iter_mut().zip(src) {
            let t = self.mul(c, s);
            *d = self.sub(d, &t);
        }
    }

    /// `acc += sum_i coeffs[i] * rows[i]`, all rows at least `acc.len()` long.
    fn fold_rows(&self, acc: &mut [Self::Elem], coeffs: &[Self::Elem], rows: &[Vec<Self::Elem>]) {
        for (c, row) in coeffs.iter().zip(rows) {
            if self.is_zero(c) {
                continue;
            }
            for (a, r) in acc.iter_mut().zip(row) {
                let t = self.mul(c, r);
                *a = self.add(a, &t);
            }
        }
    }
}

/// A finite field of odd characteristic.
pub trait FiniteField: Field {
    /// Number of elements.
    fn order(&self) -> BigUint;
    /// Degree over the prime field.
    fn degree(&self) -> usize;
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;
    /// The `index`-th element in a fixed enumeration of the field; `index`
    /// must be below `order()`.
    fn element_at(&self, index: &BigUint) -> Self::Elem;
    fn is_square(&self, a: &Self::Elem) -> bool;
    /// Inverse of [`FiniteField::element_at`]; also a canonical total order.
    fn index_of(&self, a: &Self::Elem) -> BigUint;

    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        loop {
            let a = self.random(rng);
            if !self.is_zero(&a) {
                return a;
            }
        }
    }

    /// Square root by Tonelli-Shanks; `None` for non-squares.
    fn sqrt(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        if !self.is_square(a) {
            return None;
        }
        let q = self.order();
        let qm1 = &q - 1u32;
        let s = qm1.trailing_zeros().unwrap_or(0);
        let t = &qm1 >> s;
        if s == 1 {
            let e = (&q + 1u32) >> 2;
            return Some(self.pow(a, &e));
        }
        // deterministic search for a non-residue
        let mut idx = BigUint::from(2u32);
        let z = loop {
            let c = self.element_at(&idx);
            if !self.is_zero(&c) && !self.is_square(&c) {
                break c;
            }
            idx += 1u32;
        };
        let mut m = s;
        let mut c = self.pow(&z, &t);
        let mut x = self.pow(a, &((&t + 1u32) >> 1));
        let mut b = self.pow(a, &t);
        while !self.is_one(&b) {
            let mut i = 0;
            let mut b2 = b.clone();
            while !self.is_one(&b2) {
                b2 = self.square(&b2);
                i += 1;
            }
            let mut w = c.clone();
            for _ in 0..(m - i - 1) {
                w = self.square(&w);
            }
            x = self.mul(&x, &w);
            c = self.square(&w);
            b = self.mul(&b, &c);
            m = i;
        }
        Some(x)
    }
}
