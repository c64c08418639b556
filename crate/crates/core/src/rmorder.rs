//! The order `Z[eta]`, `eta = zeta_n + zeta_n^{-1}`, of the real cyclotomic
//! field: arithmetic, norms, prime splitting, short elements of split prime
//! ideals and the choice of the primes used by the point-counting loop.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{int_resultant, is_prime_u64, roots_in_prime_field, IntPoly, PolyRing, PrimeField};
use crate::error::{Error, Result};

/// Coordinates in the basis `1, eta, ..., eta^{g-1}`.
pub type OrderElement = Vec<BigInt>;

/// Dickson polynomial `D_k` with parameter 1 over the integers.
pub fn int_dickson(k: usize) -> IntPoly {
    let mut prev = IntPoly::from_i64s(&[2]);
    if k == 0 {
        return prev;
    }
    let mut cur = IntPoly::x();
    for _ in 1..k {
        let next = cur.mul_x().sub(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// Minimal polynomial of `2 cos(2 pi / n)`: since
/// `Phi_n(z) / z^g = 1 + sum_{k=1}^{g} (z^k + z^{-k})` and
/// `z^k + z^{-k} = D_k(z + 1/z)`, it equals `1 + sum_{k=1}^{g} D_k(x)`.
pub fn real_cyclotomic_minpoly(n: u64) -> Result<IntPoly> {
    if n < 5 || !is_prime_u64(n) {
        return Err(Error::InvalidInput(format!("n = {n} must be an odd prime >= 5")));
    }
    let g = ((n - 1) / 2) as usize;
    let mut acc = IntPoly::one();
    for k in 1..=g {
        acc = acc.add(&int_dickson(k));
    }
    Ok(acc)
}

/// `Z[eta]` for `eta = zeta_n + zeta_n^{-1}`, `n = 2g + 1` prime.
#[derive(Clone, Debug)]
pub struct RMOrder {
    pub n: u64,
    pub g: usize,
    pub psi: IntPoly,
    pub disc: BigInt,
    /// Index of `Z[eta]` in the maximal order.
    pub i_eta: u32,
    /// `2 cos(2 pi j / n)` for `j = 1..=g`.
    pub conjugates: Vec<f64>,
}

/// The eigenvalues of `eta` on `J[l]`: the roots of the minimal polynomial mod `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitData {
    pub ell: u64,
    /// Ascending in `[0, l)`.
    pub lambdas: Vec<u64>,
}

impl RMOrder {
    pub fn new(n: u64) -> Result<Self> {
        let psi = real_cyclotomic_minpoly(n)?;
        let g = psi.degree().unwrap();
        let dpsi = psi.derivative();
        // disc = (-1)^{g(g-1)/2} Res(psi, psi')
        let mut disc = int_resultant(&psi, &dpsi);
        if (g * (g - 1) / 2) % 2 == 1 {
            disc = -disc;
        }
        let conjugates = (1..=g)
            .map(|j| 2.0 * (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos())
            .collect();
        Ok(RMOrder { n, g, psi, disc, i_eta: 1, conjugates })
    }

    pub fn to_poly(&self, a: &[BigInt]) -> IntPoly {
        IntPoly::new(a.to_vec())
    }

    fn from_poly(&self, p: &IntPoly) -> OrderElement {
        let r = p.rem_monic(&self.psi);
        (0..self.g).map(|i| r.coeff(i)).collect()
    }

    pub fn from_i64s(&self, a: &[i64]) -> OrderElement {
        let mut v: OrderElement = a.iter().map(|&x| BigInt::from(x)).collect();
        v.resize(self.g, BigInt::zero());
        v
    }

    pub fn mul(&self, a: &[BigInt], b: &[BigInt]) -> OrderElement {
        self.from_poly(&self.to_poly(a).mul(&self.to_poly(b)))
    }

    pub fn add(&self, a: &[BigInt], b: &[BigInt]) -> OrderElement {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    /// `N(a) = Res(psi, a(x))`.
    pub fn norm(&self, a: &[BigInt]) -> BigInt {
        let p = self.to_poly(a);
        if p.is_zero() {
            return BigInt::zero();
        }
        int_resultant(&self.psi, &p)
    }

    /// Integer matrix of multiplication by `a` (column `j` is `a * eta^j`).
    pub fn mul_matrix(&self, a: &[BigInt]) -> Vec<Vec<BigInt>> {
        let mut cols = Vec::with_capacity(self.g);
        let mut basis = vec![BigInt::zero(); self.g];
        for j in 0..self.g {
            basis.iter_mut().for_each(|v| *v = BigInt::zero());
            basis[j] = BigInt::one();
            cols.push(self.mul(a, &basis));
        }
        (0..self.g).map(|i| (0..self.g).map(|j| cols[j][i].clone()).collect()).collect()
    }

    /// The `g` distinct roots of the minimal polynomial mod `l`, or `None`
    /// when `l` does not split completely.
    pub fn split_prime(&self, ell: u64) -> Result<Option<SplitData>> {
        let fl = PrimeField::new(ell)?;
        let ring = PolyRing::new(fl.clone());
        let coeffs = self
            .psi
            .coeffs()
            .iter()
            .map(|c| {
                let m = c.mod_floor(&BigInt::from(ell));
                m.to_u64().unwrap()
            })
            .collect();
        let f = ring.from_coeffs(coeffs);
        let lambdas = roots_in_prime_field(&ring, &f)?;
        if lambdas.len() == self.g {
            Ok(Some(SplitData { ell, lambdas }))
        } else {
            Ok(None)
        }
    }

    /// A short nonzero element of the prime `(l, eta - lambda_i)`, found by
    /// exhaustive search in the box `|a_j| <= ceil(l^{1/g})` (one extra unit on
    /// retry). Among members whose squared norm is not divisible by `l^3`,
    /// returns one of least `|N|`, ties broken by max coordinate, coordinate
    /// sum and then lexicographically.
    pub fn small_element(&self, split: &SplitData, i: usize) -> Result<OrderElement> {
        let ell = split.ell;
        let lambda = *split
            .lambdas
            .get(i)
            .ok_or_else(|| Error::InvalidInput(format!("ideal index {i} out of range")))?;
        let base = box_radius(ell, self.g);
        let mut saw_member = false;
        for radius in [base, base + 1] {
            let mut best: Option<(BigInt, i64, i64, Vec<i64>)> = None;
            let side = 2 * radius + 1;
            let total = (side as u64).pow(self.g as u32);
            for idx in 0..total {
                let mut rest = idx;
                let mut c = vec![0i64; self.g];
                for cj in c.iter_mut() {
                    *cj = (rest % side as u64) as i64 - radius;
                    rest /= side as u64;
                }
                // one representative per sign class
                match c.iter().find(|&&x| x != 0) {
                    Some(&x) if x > 0 => {}
                    _ => continue,
                }
                // membership: sum c_j lambda^j = 0 mod l
                let mut acc: i128 = 0;
                let mut pw: i128 = 1;
                for &cj in &c {
                    acc = (acc + cj as i128 * pw).rem_euclid(ell as i128);
                    pw = pw * lambda as i128 % ell as i128;
                }
                if acc != 0 {
                    continue;
                }
                saw_member = true;
                let coords = self.from_i64s(&c);
                let nrm = self.norm(&coords).abs();
                let l2 = BigInt::from(ell) * BigInt::from(ell);
                if (&nrm % &l2).is_zero() {
                    continue;
                }
                let key = (
                    nrm,
                    c.iter().map(|x| x.abs()).max().unwrap(),
                    c.iter().map(|x| x.abs()).sum::<i64>(),
                    c.clone(),
                );
                if best.as_ref().is_none_or(|b| key < *b) {
                    best = Some(key);
                }
            }
            if let Some((_, _, _, c)) = best {
                return Ok(self.from_i64s(&c));
            }
        }
        if saw_member {
            Err(Error::NotFound(format!("l = {ell}: every short element violates the l^3 norm condition")))
        } else {
            Err(Error::NotFound(format!("l = {ell}: no short element in the search box")))
        }
    }

    /// Primes `l` with `l != p`, `l` not dividing the discriminant, `l`
    /// totally split, and short elements with admissible norms for all `g`
    /// ideals, in increasing order starting above `after`.
    pub fn admissible_primes(&self, p: u64, after: u64) -> AdmissiblePrimes<'_> {
        AdmissiblePrimes { order: self, p, next: after + 1 }
    }

    /// Smallest admissible primes whose product exceeds `2 i_eta C_eta sqrt(q) + 1`.
    pub fn select_primes(&self, p: u64, q: f64, c_eta: f64) -> Vec<(SplitData, Vec<OrderElement>)> {
        let bound = 2.0 * self.i_eta as f64 * c_eta * q.sqrt() + 1.0;
        let mut prod = 1.0f64;
        let mut out = Vec::new();
        for item in self.admissible_primes(p, 2) {
            if prod > bound {
                break;
            }
            prod *= item.0.ell as f64;
            out.push(item);
        }
        out
    }
}

/// `ceil(l^{1/g})`, computed exactly.
pub fn box_radius(ell: u64, g: usize) -> i64 {
    let mut r = (ell as f64).powf(1.0 / g as f64).floor() as i64;
    r = r.max(1);
    while (r as u128).pow(g as u32) < ell as u128 {
        r += 1;
    }
    while r > 1 && ((r - 1) as u128).pow(g as u32) >= ell as u128 {
        r -= 1;
    }
    r
}

pub struct AdmissiblePrimes<'a> {
    order: &'a RMOrder,
    p: u64,
    next: u64,
}

impl Iterator for AdmissiblePrimes<'_> {
    type Item = (SplitData, Vec<OrderElement>);

    fn next(&mut self) -> Option<Self::Item> {
        let o = self.order;
        loop {
            let ell = self.next;
            self.next += 1;
            if ell < 3 || !is_prime_u64(ell) || ell == self.p {
                continue;
            }
            if (&o.disc % BigInt::from(ell)).is_zero() {
                continue;
            }
            let split = match o.split_prime(ell) {
                Ok(Some(s)) => s,
                _ => continue,
            };
            let alphas: Result<Vec<_>> = (0..o.g).map(|i| o.small_element(&split, i)).collect();
            if let Ok(alphas) = alphas {
                return Some((split, alphas));
            }
        }
    }
}
