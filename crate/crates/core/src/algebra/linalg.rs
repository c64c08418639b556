//! Dense linear algebra over a field.

use super::Field;

/// Any solution of the augmented system `rows` (last column the right-hand
/// side), free unknowns set to zero; `None` if inconsistent.
pub fn solve_linear<G: Field>(f: &G, mut rows: Vec<Vec<G::Elem>>, n: usize) -> Option<Vec<G::Elem>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !f.is_zero(&rows[i][c])) else { continue };
        rows.swap(r, p);
        let inv = f.inv(&rows[r][c]).unwrap();
        for v in rows[r].iter_mut() {
            *v = f.mul(v, &inv);
        }
        for i in 0..rows.len() {
            if i != r && !f.is_zero(&rows[i][c]) {
                let m = rows[i][c].clone();
                let pivot = rows[r].clone();
                for (v, pv) in rows[i].iter_mut().zip(&pivot) {
                    *v = f.sub(v, &f.mul(&m, pv));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !f.is_zero(&row[n])) {
        return None;
    }
    let mut z = vec![f.zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        z[c] = rows[i][n].clone();
    }
    Some(z)
}
