use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;

use super::{Field, FiniteField};
use crate::error::{Error, Result};

const KARATSUBA_CUTOFF: usize = 40;
const KARATSUBA_CUTOFF_NARROW: usize = 64;

/// The prime field `F_p` for an odd prime `p < 2^61`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
    /// How many products of two reduced residues fit in a `u128` accumulator.
    lazy: usize,
    /// Barrett constants: bit length of `p` and `floor(4^bits / p)`.
    bits: u32,
    mu: u64,
    /// `floor(2^64 / p)`, for reducing arbitrary `u64` values.
    mu64: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !(3..1 << 61).contains(&p) || !is_prime_u64(p) {
            return Err(Error::InvalidInput(format!("{p} is not an odd prime below 2^61")));
        }
        let sq = ((p - 1) as u128) * ((p - 1) as u128);
        let lazy = (u128::MAX / sq - 1).min(1 << 20) as usize;
        let bits = 64 - p.leading_zeros();
        let mu = ((1u128 << (2 * bits)) / p as u128) as u64;
        let mu64 = ((1u128 << 64) / p as u128) as u64;
        Ok(PrimeField { p, lazy, bits, mu, mu64 })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Barrett reduction of a product of two reduced residues.
    #[inline]
    fn reduce_product(&self, t: u128) -> u64 {
        let hi = (t >> (self.bits - 1)) as u64;
        let qhat = ((hi as u128 * self.mu as u128) >> (self.bits + 1)) as u64;
        let mut r = (t as u64).wrapping_sub(qhat.wrapping_mul(self.p));
        if r >= self.p {
            r -= self.p;
        }
        if r >= self.p {
            r -= self.p;
        }
        r
    }

    /// `t mod p` for any `u64`.
    #[inline]
    fn reduce_u64(&self, t: u64) -> u64 {
        let q = ((t as u128 * self.mu64 as u128) >> 64) as u64;
        let mut r = t - q * self.p;
        if r >= self.p {
            r -= self.p;
        }
        r
    }

    #[inline]
    pub fn reduce_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn reduce_i128(&self, n: i128) -> u64 {
        n.rem_euclid(self.p as i128) as u64
    }

    /// Symmetric lift into `(-p/2, p/2]`.
    pub fn lift_signed(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    fn schoolbook(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        if self.p < 1 << 32 {
            return self.schoolbook_narrow(a, b);
        }
        let p = self.p as u128;
        let mut acc = vec![0u128; a.len() + b.len() - 1];
        for chunk_start in (0..a.len()).step_by(self.lazy) {
            let chunk_end = (chunk_start + self.lazy).min(a.len());
            for i in chunk_start..chunk_end {
                let x = a[i] as u128;
                if x == 0 {
                    continue;
                }
                for (j, &y) in b.iter().enumerate() {
                    acc[i + j] += x * y as u128;
                }
            }
            if chunk_end < a.len() {
                for v in acc.iter_mut() {
                    *v %= p;
                }
            }
        }
        acc.into_iter().map(|v| (v % p) as u64).collect()
    }

    /// Schoolbook product for `p < 2^32`, accumulating in `u64`.
    fn schoolbook_narrow(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.p;
        let sq = (p - 1) * (p - 1);
        let lazy = if sq == 0 { usize::MAX } else { ((u64::MAX - p) / sq).max(1) as usize };
        let mut acc = vec![0u64; a.len() + b.len() - 1];
        // 32-bit operands let the inner loop vectorize
        let b32: Vec<u32> = b.iter().map(|&y| y as u32).collect();
        for chunk_start in (0..a.len()).step_by(lazy.min(a.len())) {
            let chunk_end = chunk_start.saturating_add(lazy).min(a.len());
            for i in chunk_start..chunk_end {
                let x = a[i] as u32;
                if x == 0 {
                    continue;
                }
                for (dst, &y) in acc[i..i + b.len()].iter_mut().zip(&b32) {
                    *dst += x as u64 * y as u64;
                }
            }
            if chunk_end < a.len() {
                for v in acc.iter_mut() {
                    *v = self.reduce_u64(*v);
                }
            }
        }
        acc.into_iter().map(|v| self.reduce_u64(v)).collect()
    }

    fn add_into(&self, dst: &mut [u64], src: &[u64]) {
        for (d, s) in dst.iter_mut().zip(src) {
            *d = self.add(d, s);
        }
    }

    fn karatsuba(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let cutoff = if self.p < 1 << 32 { KARATSUBA_CUTOFF_NARROW } else { KARATSUBA_CUTOFF };
        if a.len().min(b.len()) < cutoff {
            return self.schoolbook(a, b);
        }
        if a.len() < b.len() {
            return self.karatsuba(b, a);
        }
        let h = a.len().div_ceil(2);
        if b.len() <= h {
            // unbalanced: split only the longer operand
            let (a0, a1) = a.split_at(h);
            let mut out = vec![0u64; a.len() + b.len() - 1];
            let lo = self.karatsuba(a0, b);
            let hi = self.karatsuba(a1, b);
            self.add_into(&mut out[..lo.len()], &lo);
            self.add_into(&mut out[h..h + hi.len()], &hi);
            return out;
        }
        let (a0, a1) = a.split_at(h);
        let (b0, b1) = b.split_at(h);
        let z0 = self.karatsuba(a0, b0);
        let z2 = self.karatsuba(a1, b1);
        let mut sa = a0.to_vec();
        self.add_into(&mut sa, a1);
        let mut sb = b0.to_vec();
        self.add_into(&mut sb, b1);
        let mut z1 = self.karatsuba(&sa, &sb);
        for (i, v) in z0.iter().enumerate() {
            z1[i] = self.sub(&z1[i], v);
        }
        for (i, v) in z2.iter().enumerate() {
            z1[i] = self.sub(&z1[i], v);
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        self.add_into(&mut out[..z0.len()], &z0);
        let n1 = z1.len().min(out.len() - h);
        self.add_into(&mut out[h..h + n1], &z1[..n1]);
        self.add_into(&mut out[2 * h..2 * h + z2.len()], &z2);
        out
    }
}

impl Field for PrimeField {
    type Elem = u64;

    #[inline]
    fn zero(&self) -> u64 {
        0
    }
    #[inline]
    fn one(&self) -> u64 {
        1
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.reduce_product(*a as u128 * *b as u128)
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        let (mut r0, mut r1) = (self.p as i128, *a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Some(self.reduce_i128(t0))
    }
    fn from_i64(&self, n: i64) -> u64 {
        self.reduce_i64(n)
    }
    fn characteristic(&self) -> u64 {
        self.p
    }

    fn mul_slices(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        self.karatsuba(a, b)
    }

    fn sub_scaled(&self, dst: &mut [u64], c: &u64, src: &[u64]) {
        let nc = self.neg(c);
        if self.p < 1 << 32 {
            for (d, s) in dst.iter_mut().zip(src) {
                *d = self.reduce_u64(*d + nc * s);
            }
        } else {
            for (d, s) in dst.iter_mut().zip(src) {
                *d = self.reduce_product(*d as u128 + nc as u128 * *s as u128);
            }
        }
    }

    fn fold_rows(&self, acc: &mut [u64], coeffs: &[u64], rows: &[Vec<u64>]) {
        let p = self.p as u128;
        let mut wide: Vec<u128> = acc.iter().map(|&v| v as u128).collect();
        let mut pending = 1usize;
        for (c, row) in coeffs.iter().zip(rows) {
            if *c == 0 {
                continue;
            }
            if pending == self.lazy {
                for v in wide.iter_mut() {
                    *v %= p;
                }
                pending = 1;
            }
            let c = *c as u128;
            for (w, &r) in wide.iter_mut().zip(row) {
                *w += c * r as u128;
            }
            pending += 1;
        }
        for (a, w) in acc.iter_mut().zip(wide) {
            *a = (w % p) as u64;
        }
    }
}

impl FiniteField for PrimeField {
    fn order(&self) -> BigUint {
        BigUint::from(self.p)
    }
    fn degree(&self) -> usize {
        1
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
    fn element_at(&self, index: &BigUint) -> u64 {
        index.to_u64().expect("index below field order") % self.p
    }
    fn index_of(&self, a: &u64) -> BigUint {
        BigUint::from(*a)
    }
    fn is_square(&self, a: &u64) -> bool {
        *a == 0 || jacobi(*a, self.p) == 1
    }
}

/// Jacobi symbol `(a/n)` for odd `n`.
pub fn jacobi(a: u64, n: u64) -> i32 {
    let mut a = a % n;
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
