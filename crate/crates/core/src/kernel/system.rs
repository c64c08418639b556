//! Polynomial systems whose solutions are divisors killed by `alpha`.

use crate::algebra::{mpoly_resultant, solve_linear, Field, FiniteField, MPoly, MPolyRing, Poly};
use crate::division::GenericImage;
use crate::endo::DicksonCurve;
use crate::error::{Error, Result};

/// Shape of `phi = P(X) + Y Q(X)`: exactly one of `P`, `Q` is monic, the one
/// whose pole order at infinity reaches `g^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhiShape {
    pub deg_p: usize,
    pub deg_q: usize,
    pub p_monic: bool,
}

impl PhiShape {
    /// `2 deg P <= g^2`, `2 deg Q <= g^2 - 2g - 1`; parity decides which bound
    /// is reached.
    pub fn for_genus(g: usize) -> Self {
        let gg = g * g;
        if g.is_multiple_of(2) {
            PhiShape { deg_p: gg / 2, deg_q: gg / 2 - g - 1, p_monic: true }
        } else {
            PhiShape { deg_p: (gg - 1) / 2, deg_q: (gg - 2 * g - 1) / 2, p_monic: false }
        }
    }

    /// Free coefficients of `P`, then of `Q`.
    pub fn num_p(&self) -> usize {
        if self.p_monic {
            self.deg_p
        } else {
            self.deg_p + 1
        }
    }

    pub fn num_q(&self) -> usize {
        if self.p_monic {
            self.deg_q + 1
        } else {
            self.deg_q
        }
    }
}

/// Equations over `F` in the variables of `ring`. For `g >= 3` these are
/// `x1..xg, y1..yg, p.., q.., T`; the genus-2 specialization uses
/// `x1, y1, x2, y2` only.
#[derive(Clone, Debug)]
pub struct KernelSystem<F: Field> {
    pub g: usize,
    pub ring: MPolyRing<F>,
    pub equations: Vec<MPoly<F::Elem>>,
    /// `T * prod(t_factors) - 1`, kept unexpanded.
    pub t_factors: Vec<MPoly<F::Elem>>,
    pub phi: Option<PhiShape>,
    /// Largest degree in the point variables and in the coefficient variables.
    pub degree_bounds: (u32, u32),
}

impl<F: Field> KernelSystem<F> {
    /// Unknowns other than `T`.
    pub fn num_variables(&self) -> usize {
        self.ring.nvars() - usize::from(self.has_t())
    }

    /// Equations other than the `T` equation.
    pub fn num_equations(&self) -> usize {
        self.equations.len()
    }

    pub fn has_t(&self) -> bool {
        !self.t_factors.is_empty()
    }

    /// One equation per line; the `T` equation comes last, left factored.
    pub fn export(&self, coef: impl Fn(&F::Elem) -> String) -> String {
        let mut lines: Vec<String> = self.equations.iter().map(|e| self.ring.render(e, &coef)).collect();
        if self.has_t() {
            let factors: Vec<String> =
                self.t_factors.iter().map(|f| format!("({})", self.ring.render(f, &coef))).collect();
            lines.push(format!("T*{} - 1", factors.join("*")));
        }
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }

    /// Values of all equations at a point, the `T` equation last.
    pub fn residuals<G: Field>(&self, target: &G, emb: impl Fn(&F::Elem) -> G::Elem, point: &[G::Elem]) -> Vec<G::Elem> {
        let mut out: Vec<G::Elem> =
            self.equations.iter().map(|e| self.ring.eval(e, target, &emb, point)).collect();
        if self.has_t() {
            let prod = self.t_product(target, &emb, point);
            let t = point.last().unwrap();
            out.push(target.sub(&target.mul(t, &prod), &target.one()));
        }
        out
    }

    fn t_product<G: Field>(&self, target: &G, emb: impl Fn(&F::Elem) -> G::Elem, point: &[G::Elem]) -> G::Elem {
        self.t_factors
            .iter()
            .fold(target.one(), |acc, f| target.mul(&acc, &self.ring.eval(f, target, &emb, point)))
    }

    /// Completes `(x, y)` to a solution: solves the congruences, which are
    /// linear in the coefficients of `phi`, and sets `T`. `None` when the
    /// congruences are inconsistent or the `T` product vanishes.
    pub fn complete_point<G: Field>(
        &self,
        target: &G,
        emb: impl Fn(&F::Elem) -> G::Elem,
        xs: &[G::Elem],
        ys: &[G::Elem],
    ) -> Option<Vec<G::Elem>> {
        let g = self.g;
        let n = self.ring.nvars();
        let unknowns = n - 2 * g - 1;
        let mut assign: Vec<Option<G::Elem>> = vec![None; n];
        for i in 0..g {
            assign[i] = Some(xs[i].clone());
            assign[g + i] = Some(ys[i].clone());
        }
        // each equation becomes sum_k c_k z_k + c = 0
        let mut rows = Vec::new();
        for e in &self.equations {
            let part = self.ring.partial_eval(e, target, &emb, &assign);
            let mut row = vec![target.zero(); unknowns + 1];
            for (exp, c) in part {
                match exp[2 * g..n - 1].iter().position(|&d| d > 0) {
                    None => row[unknowns] = target.neg(&c),
                    Some(k) => {
                        if exp[2 * g..n - 1].iter().sum::<u32>() != 1 {
                            return None;
                        }
                        row[k] = c;
                    }
                }
            }
            rows.push(row);
        }
        let z = solve_linear(target, rows, unknowns)?;
        let mut point: Vec<G::Elem> = xs.iter().chain(ys).cloned().collect();
        point.extend(z);
        point.push(target.zero());
        let prod = self.t_product(target, &emb, &point);
        *point.last_mut().unwrap() = target.inv(&prod)?;
        Some(point)
    }
}

fn names(g: usize, shape: &PhiShape) -> Vec<String> {
    let mut v: Vec<String> = (1..=g).map(|i| format!("x{i}")).collect();
    v.extend((1..=g).map(|i| format!("y{i}")));
    v.extend((0..shape.num_p()).map(|k| format!("p{k}")));
    v.extend((0..shape.num_q()).map(|k| format!("q{k}")));
    v.push("T".into());
    v
}

/// The system for `alpha(P_1 + .. + P_g - g P_inf) = 0` in genus `g >= 3`:
/// a function `phi = P + Y Q` vanishing on every `alpha(P_i - P_inf)`, i.e.
/// `P + Q v_i = 0 mod u_i` with `u_i, v_i` read off the generic image at
/// `(x_i, y_i)`, together with the curve equations and the `T` equation
/// that keeps the `u_i` generic and pairwise coprime.
pub fn build_system_general<F: FiniteField>(
    dc: &DicksonCurve<F>,
    img: &GenericImage<F::Elem>,
) -> Result<KernelSystem<F>> {
    let g = dc.genus();
    if g < 3 {
        return Err(Error::InvalidInput("the general system needs genus at least 3".into()));
    }
    if img.weight() != g {
        return Err(Error::Degenerate("generic image does not have full weight".into()));
    }
    let shape = PhiShape::for_genus(g);
    let ring = MPolyRing::new(dc.field().clone(), names(g, &shape));
    let np = shape.num_p();
    let nq = shape.num_q();
    let pvar = |k: usize| ring.var(2 * g + k);
    let qvar = |k: usize| ring.var(2 * g + np + k);
    let mut p_poly: Vec<MPoly<F::Elem>> = (0..np).map(pvar).collect();
    let mut q_poly: Vec<MPoly<F::Elem>> = (0..nq).map(qvar).collect();
    if shape.p_monic {
        p_poly.push(ring.one());
    } else {
        q_poly.push(ring.one());
    }
    let mut equations = Vec::new();
    let mut u_cleared = Vec::new();
    let mut t_factors = Vec::new();
    for i in 0..g {
        let d: Vec<MPoly<F::Elem>> = img.d.iter().map(|p| ring.lift(p, i)).collect();
        let e: Vec<MPoly<F::Elem>> = img.e.iter().map(|p| ring.lift(p, i)).collect();
        let y = ring.var(g + i);
        // e_g(x_i) phi = e_g P + Q * y sum_{j<g} e_j X^j
        let v_num: Vec<MPoly<F::Elem>> = e[..g].iter().map(|c| ring.mul(&y, c)).collect();
        let mut lhs: Vec<MPoly<F::Elem>> = p_poly.iter().map(|c| ring.mul(&e[g], c)).collect();
        for (a, qa) in q_poly.iter().enumerate() {
            for (b, vb) in v_num.iter().enumerate() {
                if lhs.len() <= a + b {
                    lhs.resize(a + b + 1, ring.zero());
                }
                lhs[a + b] = ring.add(&lhs[a + b], &ring.mul(qa, vb));
            }
        }
        // reduce mod d_g X^g + .. + d_0, scaling by d_g at each step
        while lhs.len() > g {
            let top = lhs.pop().unwrap();
            let shift = lhs.len() - g;
            for c in lhs.iter_mut() {
                *c = ring.mul(c, &d[g]);
            }
            for j in 0..g {
                lhs[shift + j] = ring.sub(&lhs[shift + j], &ring.mul(&top, &d[j]));
            }
        }
        lhs.resize(g, ring.zero());
        equations.extend(lhs);
        t_factors.push(d[g].clone());
        t_factors.push(e[g].clone());
        u_cleared.push(d);
    }
    let (mask_pt, mask_coef) = masks(&ring, 2 * g);
    let dx = equations.iter().map(|e| e.degree_in(&mask_pt)).max().unwrap_or(0);
    let dy = equations.iter().map(|e| e.degree_in(&mask_coef)).max().unwrap_or(0);
    for i in 0..g {
        let y = ring.var(g + i);
        equations.push(ring.sub(&ring.mul(&y, &y), &ring.lift(dc.curve.f(), i)));
    }
    for i in 0..g {
        for j in i + 1..g {
            t_factors.push(mpoly_resultant(&ring, &u_cleared[i], &u_cleared[j]));
        }
    }
    Ok(KernelSystem { g, ring, equations, t_factors, phi: Some(shape), degree_bounds: (dx, dy) })
}

fn masks<F: Field>(ring: &MPolyRing<F>, split: usize) -> (Vec<bool>, Vec<bool>) {
    let n = ring.nvars();
    let t = usize::from(ring.index_of("T").is_some());
    let pt = (0..n).map(|i| i < split).collect();
    let coef = (0..n).map(|i| i >= split && i < n - t).collect();
    (pt, coef)
}

/// The genus-2 system `alpha(P_1 - P_inf) = -alpha(P_2 - P_inf)`: equal
/// `u` parts after clearing `d_2`, opposite `v` parts after clearing `e_2`,
/// and the curve equations.
pub fn build_system_g2<F: FiniteField>(
    dc: &DicksonCurve<F>,
    img: &GenericImage<F::Elem>,
) -> Result<KernelSystem<F>> {
    if dc.genus() != 2 || img.weight() != 2 {
        return Err(Error::InvalidInput("the specialized system needs genus 2 and a weight-2 image".into()));
    }
    let names = ["x1", "y1", "x2", "y2"].iter().map(|s| s.to_string()).collect();
    let ring = MPolyRing::new(dc.field().clone(), names);
    let at = |p: &Poly<F::Elem>, i: usize| ring.lift(p, 2 * i);
    let (d, e) = (&img.d, &img.e);
    let (y1, y2) = (ring.var(1), ring.var(3));
    let mut equations = Vec::new();
    for j in [1, 0] {
        equations.push(ring.sub(&ring.mul(&at(&d[j], 0), &at(&d[2], 1)), &ring.mul(&at(&d[j], 1), &at(&d[2], 0))));
    }
    for j in [1, 0] {
        let a = ring.mul(&y1, &ring.mul(&at(&e[j], 0), &at(&e[2], 1)));
        let b = ring.mul(&y2, &ring.mul(&at(&e[j], 1), &at(&e[2], 0)));
        equations.push(ring.add(&a, &b));
    }
    for (i, y) in [y1, y2].iter().enumerate() {
        equations.push(ring.sub(&ring.mul(y, y), &at(dc.curve.f(), i)));
    }
    let pt = vec![true; 4];
    let dx = equations.iter().map(|e| e.degree_in(&pt)).max().unwrap_or(0);
    Ok(KernelSystem { g: 2, ring, equations, t_factors: Vec::new(), phi: None, degree_bounds: (dx, 0) })
}
