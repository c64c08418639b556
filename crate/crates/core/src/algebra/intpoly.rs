//! Integer polynomials and exact integer linear algebra.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Integer polynomial, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly(pub Vec<BigInt>);

impl IntPoly {
    pub fn new(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|v| v.is_zero()) {
            c.pop();
        }
        IntPoly(c)
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn zero() -> Self {
        IntPoly(Vec::new())
    }

    pub fn one() -> Self {
        IntPoly(vec![BigInt::one()])
    }

    pub fn x() -> Self {
        Self::from_i64s(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.0.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        Self::new(self.0.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![BigInt::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn mul_x(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![BigInt::zero()];
        c.extend(self.0.iter().cloned());
        IntPoly(c)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        int_poly_eval(self, x)
    }

    /// Content-free remainder-style reduction by a monic divisor.
    pub fn rem_monic(&self, m: &Self) -> Self {
        let dm = m.degree().expect("nonzero modulus");
        assert!(m.0[dm].is_one(), "divisor must be monic");
        let mut r = self.0.clone();
        while r.len() > dm {
            let top = r.len() - 1;
            let c = r[top].clone();
            if !c.is_zero() {
                for j in 0..=dm {
                    r[top - dm + j] -= &c * &m.0[j];
                }
            }
            r.pop();
        }
        Self::new(r)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    /// Largest absolute coefficient.
    pub fn height(&self) -> BigInt {
        self.0.iter().map(|c| c.abs()).max().unwrap_or_default()
    }
}

pub fn int_poly_eval(p: &IntPoly, x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in p.0.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Determinant by fraction-free Gaussian elimination (Bareiss).
pub fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Resultant of two integer polynomials via the Sylvester determinant.
pub fn int_resultant(a: &IntPoly, b: &IntPoly) -> BigInt {
    let (da, db) = match (a.degree(), b.degree()) {
        (Some(x), Some(y)) => (x, y),
        _ => return BigInt::zero(),
    };
    if da == 0 && db == 0 {
        return BigInt::one();
    }
    if da == 0 {
        return a.0[0].pow(db as u32);
    }
    if db == 0 {
        return b.0[0].pow(da as u32);
    }
    let n = da + db;
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for i in 0..db {
        for (j, c) in a.0.iter().rev().enumerate() {
            m[i][i + j] = c.clone();
        }
    }
    for i in 0..da {
        for (j, c) in b.0.iter().rev().enumerate() {
            m[db + i][i + j] = c.clone();
        }
    }
    det_bareiss(m)
}

/// Characteristic polynomial `det(X I - M)` (Faddeev-LeVerrier, exact).
pub fn charpoly(m: &[Vec<BigInt>]) -> IntPoly {
    let n = m.len();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        // A_k = M (A_{k-1} + c_{n-k+1} I)
        let mut t = a.clone();
        for (i, row) in t.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        a = mat_mul(m, &t);
        let tr: BigInt = (0..n).map(|i| a[i][i].clone()).sum();
        coeffs[n - k] = -tr / BigInt::from(k);
    }
    IntPoly::new(coeffs)
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][k] * &bk[j];
            }
        }
    }
    out
}
