//! Root finding and factorization over finite fields.

use num_bigint::BigUint;
use rand::Rng;

use super::{FiniteField, ModReducer, Poly, PolyRing, PrimeField};
use crate::error::{Error, Result};

/// `X^e mod m`.
pub fn x_pow_mod<F: FiniteField>(red: &ModReducer<F>, e: &BigUint) -> Poly<F::Elem> {
    let ring = red.ring();
    ring.pow_mod(&ring.x(), e, red)
}

/// The map `W -> W^Q mod m` for `Q = |F|`, using modular composition with
/// `X^Q` when that is cheaper than square-and-multiply.
struct FrobeniusMap<F: FiniteField> {
    red: ModReducer<F>,
    xq: Poly<F::Elem>,
    compose: bool,
}

impl<F: FiniteField> FrobeniusMap<F> {
    fn new(red: ModReducer<F>) -> Self {
        let q = red.ring().field().order();
        let xq = x_pow_mod(&red, &q);
        let compose = q.bits() as usize > red.degree();
        FrobeniusMap { red, xq, compose }
    }

    fn apply(&self, w: &Poly<F::Elem>) -> Poly<F::Elem> {
        let ring = self.red.ring();
        if self.compose {
            ring.compose_mod(w, &self.xq, &self.red)
        } else {
            ring.pow_mod(w, &ring.field().order(), &self.red)
        }
    }
}

/// Ben-Or irreducibility test.
pub fn is_irreducible<F: FiniteField>(ring: &PolyRing<F>, f: &Poly<F::Elem>) -> bool {
    let d = match f.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(d) => d,
    };
    let f = ring.monic(f);
    let frob = FrobeniusMap::new(ModReducer::new(ring, &f));
    let x = ring.x();
    let mut w = frob.xq.clone();
    for i in 1..=d / 2 {
        if i > 1 {
            w = frob.apply(&w);
        }
        let g = ring.gcd(&ring.sub(&w, &x), &f);
        if !ring.is_one(&g) {
            return false;
        }
    }
    true
}

/// `f / gcd(f, f')`, made monic. Only meaningful when the characteristic
/// exceeds `deg f`; see [`squarefree_decomposition`] otherwise.
pub fn squarefree_part<F: FiniteField>(ring: &PolyRing<F>, f: &Poly<F::Elem>) -> Poly<F::Elem> {
    if f.is_zero() {
        return ring.zero();
    }
    let g = ring.gcd(f, &ring.derivative(f));
    ring.monic(&ring.div_exact(f, &g).expect("gcd divides"))
}

/// `p`-th root of a polynomial whose derivative vanishes.
fn pth_root<F: FiniteField>(ring: &PolyRing<F>, f: &Poly<F::Elem>) -> Poly<F::Elem> {
    let fld = ring.field();
    let p = fld.characteristic() as usize;
    // c^(1/p) = c^(Q/p)
    let e = fld.order() / BigUint::from(p);
    let c = f
        .coeffs()
        .iter()
        .step_by(p)
        .map(|c| fld.pow(c, &e))
        .collect();
    ring.from_coeffs(c)
}

/// Square-free decomposition `f = lc * prod g_i^i`, returned as `(g_i, i)`
/// with each `g_i` monic, square-free and nonconstant.
pub fn squarefree_decomposition<F: FiniteField>(
    ring: &PolyRing<F>,
    f: &Poly<F::Elem>,
) -> Vec<(Poly<F::Elem>, usize)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let p = ring.field().characteristic() as usize;
    sqf_rec(ring, &ring.monic(f), 1, p, &mut out);
    out.sort_by_key(|(_, m)| *m);
    // merge equal multiplicities coming from different recursion levels
    let mut merged: Vec<(Poly<F::Elem>, usize)> = Vec::new();
    for (g, m) in out {
        match merged.last_mut() {
            Some((h, mm)) if *mm == m => *h = ring.mul(h, &g),
            _ => merged.push((g, m)),
        }
    }
    merged
}

fn sqf_rec<F: FiniteField>(
    ring: &PolyRing<F>,
    f: &Poly<F::Elem>,
    scale: usize,
    p: usize,
    out: &mut Vec<(Poly<F::Elem>, usize)>,
) {
    let df = ring.derivative(f);
    if df.is_zero() {
        if f.degree().unwrap_or(0) > 0 {
            sqf_rec(ring, &pth_root(ring, f), scale * p, p, out);
        }
        return;
    }
    let mut c = ring.gcd(f, &df);
    let mut w = ring.div_exact(f, &c).unwrap();
    let mut i = 1;
    while w.degree().unwrap_or(0) > 0 {
        let y = ring.gcd(&w, &c);
        let z = ring.div_exact(&w, &y).unwrap();
        if z.degree().unwrap_or(0) > 0 {
            out.push((ring.monic(&z), i * scale));
        }
        i += 1;
        w = y;
        c = ring.div_exact(&c, &w).unwrap();
    }
    if c.degree().unwrap_or(0) > 0 {
        sqf_rec(ring, &pth_root(ring, &c), scale * p, p, out);
    }
}

/// Distinct-degree factorization of a monic square-free `f`: pairs `(d, h_d)`
/// where `h_d` is the product of the irreducible factors of degree `d`.
/// Degrees above `max_degree` are not reported.
pub fn distinct_degree_factors<F: FiniteField>(
    ring: &PolyRing<F>,
    f: &Poly<F::Elem>,
    max_degree: usize,
) -> Vec<(usize, Poly<F::Elem>)> {
    DistinctDegree::new(ring, f).take_while(|(d, _)| *d <= max_degree).collect()
}

/// Lazy distinct-degree factorization, ascending in degree, so a caller can
/// stop at the first useful factor.
pub struct DistinctDegree<F: FiniteField> {
    ring: PolyRing<F>,
    rest: Poly<F::Elem>,
    frob: Option<FrobeniusMap<F>>,
    w: Poly<F::Elem>,
    d: usize,
}

impl<F: FiniteField> DistinctDegree<F> {
    pub fn new(ring: &PolyRing<F>, f: &Poly<F::Elem>) -> Self {
        let rest = ring.monic(f);
        let ring = ring.clone();
        if rest.degree().unwrap_or(0) == 0 {
            return DistinctDegree { w: ring.zero(), ring, rest, frob: None, d: 1 };
        }
        let frob = FrobeniusMap::new(ModReducer::new(&ring, &rest));
        DistinctDegree { w: frob.xq.clone(), ring, rest, frob: Some(frob), d: 1 }
    }
}

impl<F: FiniteField> Iterator for DistinctDegree<F> {
    type Item = (usize, Poly<F::Elem>);

    fn next(&mut self) -> Option<Self::Item> {
        let ring = &self.ring;
        let x = ring.x();
        loop {
            let frob = self.frob.as_ref()?;
            let n = self.rest.degree().unwrap_or(0);
            let d = self.d;
            if n == 0 {
                self.frob = None;
                return None;
            }
            if 2 * d > n {
                self.frob = None;
                return Some((n, self.rest.clone()));
            }
            if d > 1 {
                self.w = frob.apply(&self.w);
            }
            self.d += 1;
            let g = ring.gcd(&ring.sub(&self.w, &x), &self.rest);
            if g.degree().unwrap_or(0) > 0 {
                self.rest = ring.div_exact(&self.rest, &g).unwrap();
                if self.rest.degree().unwrap_or(0) > 0 {
                    let red = ModReducer::new(ring, &self.rest);
                    self.w = red.reduce(&self.w);
                    let xq = red.reduce(&frob.xq);
                    let compose = frob.compose;
                    self.frob = Some(FrobeniusMap { compose, red, xq });
                } else {
                    self.frob = None;
                }
                return Some((d, g));
            }
        }
    }
}

/// Splits a monic square-free product of irreducibles of degree `d` into its
/// factors (Cantor-Zassenhaus, odd characteristic).
pub fn equal_degree_split<F: FiniteField, R: Rng + ?Sized>(
    ring: &PolyRing<F>,
    f: &Poly<F::Elem>,
    d: usize,
    rng: &mut R,
) -> Vec<Poly<F::Elem>> {
    let f = ring.monic(f);
    let n = f.degree().unwrap_or(0);
    if n == 0 {
        return Vec::new();
    }
    if n == d {
        return vec![f];
    }
    let q = ring.field().order();
    let e = (q.pow(d as u32) - 1u32) >> 1;
    let red = ModReducer::new(ring, &f);
    let one = ring.one();
    loop {
        let a = ring.from_coeffs((0..n).map(|_| ring.field().random(rng)).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let b = ring.pow_mod(&a, &e, &red);
        let g = ring.gcd(&ring.sub(&b, &one), &f);
        let dg = g.degree().unwrap_or(0);
        if dg > 0 && dg < n {
            let h = ring.div_exact(&f, &g).unwrap();
            let mut out = equal_degree_split(ring, &g, d, rng);
            out.extend(equal_degree_split(ring, &h, d, rng));
            return out;
        }
    }
}

/// All distinct roots of `f` in `F`.
pub fn roots<F: FiniteField, R: Rng + ?Sized>(
    ring: &PolyRing<F>,
    f: &Poly<F::Elem>,
    rng: &mut R,
) -> Result<Vec<F::Elem>> {
    if f.is_zero() {
        return Err(Error::InvalidInput("roots of the zero polynomial".into()));
    }
    if f.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let fm = ring.monic(f);
    let red = ModReducer::new(ring, &fm);
    let xq = x_pow_mod(&red, &ring.field().order());
    let g = ring.gcd(&ring.sub(&xq, &ring.x()), &fm);
    Ok(equal_degree_split(ring, &g, 1, rng)
        .into_iter()
        .map(|h| ring.field().neg(&h.coeffs()[0]))
        .collect())
}

/// Roots of `f` in `F_p`, sorted: first `gcd(f, X^p - X)`, then an exhaustive
/// scan of `F_p` against that gcd.
pub fn roots_in_prime_field(ring: &PolyRing<PrimeField>, f: &Poly<u64>) -> Result<Vec<u64>> {
    if f.is_zero() {
        return Err(Error::InvalidInput("roots of the zero polynomial".into()));
    }
    if f.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let fm = ring.monic(f);
    let red = ModReducer::new(ring, &fm);
    let p = ring.field().p();
    let xp = x_pow_mod(&red, &BigUint::from(p));
    let g = ring.gcd(&ring.sub(&xp, &ring.x()), &fm);
    if g.degree() == Some(0) {
        return Ok(Vec::new());
    }
    Ok((0..p).filter(|x| ring.eval(&g, x) == 0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring(p: u64) -> PolyRing<PrimeField> {
        PolyRing::new(PrimeField::new(p).unwrap())
    }

    #[test]
    fn prime_field_roots() {
        let r = ring(11);
        let f = r.from_i64s(&[-1, 1, 1]);
        assert_eq!(roots_in_prime_field(&r, &f).unwrap(), vec![3, 7]);
        let r19 = ring(19);
        let f19 = r19.from_i64s(&[-1, 1, 1]);
        assert_eq!(roots_in_prime_field(&r19, &f19).unwrap(), vec![4, 14]);
        let g = r.from_i64s(&[1, 0, 1]);
        assert!(roots_in_prime_field(&r, &g).unwrap().is_empty());
        assert!(roots_in_prime_field(&r, &r.zero()).is_err());
    }

    #[test]
    fn generic_roots_agree_with_scan() {
        let r = ring(101);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = r.from_i64s(&[7, -3, 0, 5, 1, 0, 2]);
        let mut a = roots(&r, &f, &mut rng).unwrap();
        a.sort();
        assert_eq!(a, roots_in_prime_field(&r, &f).unwrap());
    }

    #[test]
    fn irreducibility_counts() {
        // number of monic irreducible polynomials of degree 3 over F_5 is 40
        let r = ring(5);
        let mut count = 0;
        for a in 0..5i64 {
            for b in 0..5i64 {
                for c in 0..5i64 {
                    if is_irreducible(&r, &r.from_i64s(&[a, b, c, 1])) {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(count, 40);
    }

    #[test]
    fn ddf_and_edf_factor_a_product() {
        let r = ring(13);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let factors = [
            r.from_i64s(&[2, 1]),
            r.from_i64s(&[5, 1]),
            r.from_i64s(&[2, 0, 1]),
            r.from_i64s(&[6, 0, 1]),
            r.from_i64s(&[2, 0, 0, 1]),
        ];
        for h in &factors[2..] {
            assert!(is_irreducible(&r, h));
        }
        let f = factors.iter().fold(r.one(), |acc, h| r.mul(&acc, h));
        let ddf = distinct_degree_factors(&r, &f, 10);
        let degs: Vec<usize> = ddf.iter().map(|(d, _)| *d).collect();
        assert_eq!(degs, vec![1, 2, 3]);
        let mut all = Vec::new();
        for (d, h) in ddf {
            all.extend(equal_degree_split(&r, &h, d, &mut rng));
        }
        let mut expect: Vec<_> = factors.to_vec();
        expect.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
        all.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
        assert_eq!(all, expect);
    }

    #[test]
    fn ddf_respects_cap() {
        let r = ring(13);
        let f = r.mul(&r.from_i64s(&[2, 1]), &r.from_i64s(&[2, 0, 0, 1]));
        let ddf = distinct_degree_factors(&r, &f, 2);
        assert_eq!(ddf.len(), 1);
        assert_eq!(ddf[0].0, 1);
    }

    #[test]
    fn squarefree_in_small_characteristic() {
        // (X+1)^2 (X+2)^5 (X^2+2)^3 over F_5, where (X+2)^5 has zero derivative
        let r = ring(5);
        let a = r.from_i64s(&[1, 1]);
        let b = r.from_i64s(&[2, 1]);
        let c = r.from_i64s(&[2, 0, 1]);
        let f = r.mul(&r.mul(&r.pow(&a, 2), &r.pow(&b, 5)), &r.pow(&c, 3));
        let dec = squarefree_decomposition(&r, &f);
        assert_eq!(dec, vec![(a.clone(), 2), (c.clone(), 3), (b.clone(), 5)]);
        let prod = dec.iter().fold(r.one(), |acc, (g, m)| r.mul(&acc, &r.pow(g, *m as u64)));
        assert_eq!(prod, f);
        let sf = r.from_i64s(&[1, 0, 0, 1]);
        assert_eq!(squarefree_part(&r, &r.mul(&sf, &a)), r.monic(&r.from_i64s(&[1, 0, 0, 1])));
    }
}
