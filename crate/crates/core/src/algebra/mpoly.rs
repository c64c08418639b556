//! Sparse multivariate polynomials with named variables, used to state and
//! check polynomial systems.

use std::collections::BTreeMap;

use super::{Field, Poly};

/// Terms keyed by exponent vectors of length `nvars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly<E> {
    terms: BTreeMap<Vec<u32>, E>,
}

impl<E> MPoly<E> {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &E)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree in the variables selected by `mask`.
    pub fn degree_in(&self, mask: &[bool]) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().zip(mask).filter(|(_, &m)| m).map(|(d, _)| *d).sum())
            .max()
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct MPolyRing<F: Field> {
    field: F,
    names: Vec<String>,
}

impl<F: Field> MPolyRing<F> {
    pub fn new(field: F, names: Vec<String>) -> Self {
        MPolyRing { field, names }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn zero(&self) -> MPoly<F::Elem> {
        MPoly { terms: BTreeMap::new() }
    }

    pub fn constant(&self, c: F::Elem) -> MPoly<F::Elem> {
        let mut terms = BTreeMap::new();
        if !self.field.is_zero(&c) {
            terms.insert(vec![0; self.nvars()], c);
        }
        MPoly { terms }
    }

    pub fn one(&self) -> MPoly<F::Elem> {
        self.constant(self.field.one())
    }

    pub fn var(&self, i: usize) -> MPoly<F::Elem> {
        let mut e = vec![0; self.nvars()];
        e[i] = 1;
        MPoly { terms: BTreeMap::from([(e, self.field.one())]) }
    }

    /// A univariate polynomial in variable `i`.
    pub fn lift(&self, p: &Poly<F::Elem>, i: usize) -> MPoly<F::Elem> {
        let mut terms = BTreeMap::new();
        for (d, c) in p.coeffs().iter().enumerate() {
            if !self.field.is_zero(c) {
                let mut e = vec![0; self.nvars()];
                e[i] = d as u32;
                terms.insert(e, c.clone());
            }
        }
        MPoly { terms }
    }

    pub fn add(&self, a: &MPoly<F::Elem>, b: &MPoly<F::Elem>) -> MPoly<F::Elem> {
        let mut terms = a.terms.clone();
        for (e, c) in &b.terms {
            self.accumulate(&mut terms, e.clone(), c.clone());
        }
        MPoly { terms }
    }

    pub fn neg(&self, a: &MPoly<F::Elem>) -> MPoly<F::Elem> {
        MPoly { terms: a.terms.iter().map(|(e, c)| (e.clone(), self.field.neg(c))).collect() }
    }

    pub fn sub(&self, a: &MPoly<F::Elem>, b: &MPoly<F::Elem>) -> MPoly<F::Elem> {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &MPoly<F::Elem>, s: &F::Elem) -> MPoly<F::Elem> {
        if self.field.is_zero(s) {
            return self.zero();
        }
        MPoly { terms: a.terms.iter().map(|(e, c)| (e.clone(), self.field.mul(c, s))).collect() }
    }

    pub fn mul(&self, a: &MPoly<F::Elem>, b: &MPoly<F::Elem>) -> MPoly<F::Elem> {
        let mut terms = BTreeMap::new();
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                self.accumulate(&mut terms, e, self.field.mul(ca, cb));
            }
        }
        MPoly { terms }
    }

    pub fn pow(&self, a: &MPoly<F::Elem>, k: u32) -> MPoly<F::Elem> {
        (0..k).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    fn accumulate(&self, terms: &mut BTreeMap<Vec<u32>, F::Elem>, e: Vec<u32>, c: F::Elem) {
        match terms.get_mut(&e) {
            Some(old) => {
                let s = self.field.add(old, &c);
                if self.field.is_zero(&s) {
                    terms.remove(&e);
                } else {
                    *old = s;
                }
            }
            None => {
                if !self.field.is_zero(&c) {
                    terms.insert(e, c);
                }
            }
        }
    }

    /// Evaluates at a point of `target^nvars`.
    pub fn eval<G: Field>(
        &self,
        a: &MPoly<F::Elem>,
        target: &G,
        emb: impl Fn(&F::Elem) -> G::Elem,
        point: &[G::Elem],
    ) -> G::Elem {
        let part = self.partial_eval(a, target, emb, &point.iter().cloned().map(Some).collect::<Vec<_>>());
        part.get(&vec![0; self.nvars()]).cloned().unwrap_or_else(|| target.zero())
    }

    /// Substitutes the assigned variables; the result maps each exponent
    /// vector in the remaining variables to its coefficient in `target`.
    pub fn partial_eval<G: Field>(
        &self,
        a: &MPoly<F::Elem>,
        target: &G,
        emb: impl Fn(&F::Elem) -> G::Elem,
        assign: &[Option<G::Elem>],
    ) -> BTreeMap<Vec<u32>, G::Elem> {
        let mut out: BTreeMap<Vec<u32>, G::Elem> = BTreeMap::new();
        for (e, c) in &a.terms {
            let mut val = emb(c);
            let mut rest = e.clone();
            for (i, v) in assign.iter().enumerate() {
                if let Some(v) = v {
                    val = target.mul(&val, &target.pow_u64(v, e[i] as u64));
                    rest[i] = 0;
                }
            }
            let slot = out.entry(rest).or_insert_with(|| target.zero());
            *slot = target.add(slot, &val);
        }
        out.retain(|_, v| !target.is_zero(v));
        out
    }

    /// Plain text such as `3*x1^2*y1 + 5*p0 + 1`, terms in descending order.
    pub fn render(&self, a: &MPoly<F::Elem>, coef: impl Fn(&F::Elem) -> String) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let one = self.field.one();
        let terms: Vec<String> = a
            .terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let mut factors = Vec::new();
                let constant = e.iter().all(|&d| d == 0);
                if *c != one || constant {
                    factors.push(coef(c));
                }
                for (i, &d) in e.iter().enumerate() {
                    match d {
                        0 => {}
                        1 => factors.push(self.names[i].clone()),
                        _ => factors.push(format!("{}^{d}", self.names[i])),
                    }
                }
                factors.join("*")
            })
            .collect();
        terms.join(" + ")
    }
}

/// Determinant by expansion over column subsets, without divisions; meant
/// for small matrices whose entries are polynomials.
pub fn mpoly_det<F: Field>(ring: &MPolyRing<F>, m: &[Vec<MPoly<F::Elem>>]) -> MPoly<F::Elem> {
    let n = m.len();
    // dp[mask] = minor on the first popcount(mask) rows and the columns in mask
    let mut dp = vec![ring.zero(); 1 << n];
    dp[0] = ring.one();
    for mask in 1usize..(1 << n) {
        let k = mask.count_ones() as usize;
        let row = &m[k - 1];
        let mut acc = ring.zero();
        let mut pos = 0;
        for (c, entry) in row.iter().enumerate() {
            if mask & (1 << c) == 0 {
                continue;
            }
            let sub = &dp[mask ^ (1 << c)];
            if !entry.is_zero() && !sub.is_zero() {
                let t = ring.mul(entry, sub);
                acc = if (k - 1 + pos).is_multiple_of(2) { ring.add(&acc, &t) } else { ring.sub(&acc, &t) };
            }
            pos += 1;
        }
        dp[mask] = acc;
    }
    dp[(1 << n) - 1].clone()
}

/// Sylvester resultant in an auxiliary variable of two polynomials given by
/// their coefficient lists (constant term first).
pub fn mpoly_resultant<F: Field>(
    ring: &MPolyRing<F>,
    a: &[MPoly<F::Elem>],
    b: &[MPoly<F::Elem>],
) -> MPoly<F::Elem> {
    let (da, db) = (a.len() - 1, b.len() - 1);
    let n = da + db;
    let mut m = vec![vec![ring.zero(); n]; n];
    for r in 0..db {
        for (j, c) in a.iter().rev().enumerate() {
            m[r][r + j] = c.clone();
        }
    }
    for r in 0..da {
        for (j, c) in b.iter().rev().enumerate() {
            m[db + r][r + j] = c.clone();
        }
    }
    mpoly_det(ring, &m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{PolyRing, PrimeField};

    fn ring() -> MPolyRing<PrimeField> {
        MPolyRing::new(PrimeField::new(101).unwrap(), vec!["a".into(), "b".into()])
    }

    #[test]
    fn arithmetic_and_evaluation() {
        let r = ring();
        let f = r.field().clone();
        let (a, b) = (r.var(0), r.var(1));
        let s = r.add(&a, &b);
        let sq = r.mul(&s, &s);
        let expect = r.add(&r.add(&r.mul(&a, &a), &r.scale(&r.mul(&a, &b), &2)), &r.mul(&b, &b));
        assert_eq!(sq, expect);
        assert!(r.sub(&sq, &expect).is_zero());
        assert_eq!(r.eval(&sq, &f, |c| *c, &[3, 4]), 49);
        assert_eq!(r.render(&sq, |c| c.to_string()), "a^2 + 2*a*b + b^2");
        assert_eq!(sq.degree_in(&[true, false]), 2);
    }

    #[test]
    fn resultant_matches_univariate() {
        // Res_X(X^2 - a, X - b) = b^2 - a
        let r = ring();
        let f = r.field().clone();
        let a = [r.neg(&r.var(0)), r.zero(), r.one()];
        let b = [r.neg(&r.var(1)), r.one()];
        let res = mpoly_resultant(&r, &a, &b);
        let expect = r.sub(&r.mul(&r.var(1), &r.var(1)), &r.var(0));
        assert_eq!(res, expect);
        let pr = PolyRing::new(f.clone());
        let u = pr.from_i64s(&[-7, 0, 1]);
        let v = pr.from_i64s(&[-5, 1]);
        assert_eq!(r.eval(&res, &f, |c| *c, &[7, 5]), pr.resultant(&u, &v));
    }
}
