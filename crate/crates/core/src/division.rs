//! Images of the generic point under endomorphisms, computed by Cantor
//! arithmetic over the function field `F(x)[y] / (y^2 - f(x))`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;

use crate::algebra::{build_extension, squarefree_part, ExtField, Field, FiniteField, Poly, PolyRing};
use crate::endo::{extend_dickson, DicksonCurve};
use crate::error::{Error, Result};
use crate::jacobian::{irreducible_factors, Curve, Divisor};

/// `(a + b y) / den` with `den` monic and `gcd(a, b, den) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FuncElem<E> {
    pub a: Poly<E>,
    pub b: Poly<E>,
    pub den: Poly<E>,
}

/// The function field of `y^2 = f(x)` over `F`.
#[derive(Clone, Debug)]
pub struct FuncField<F: FiniteField> {
    ring: PolyRing<F>,
    f: Poly<F::Elem>,
}

impl<F: FiniteField> FuncField<F> {
    pub fn new(ring: PolyRing<F>, f: Poly<F::Elem>) -> Self {
        FuncField { ring, f }
    }

    pub fn ring(&self) -> &PolyRing<F> {
        &self.ring
    }

    /// The coordinate function `x`.
    pub fn x(&self) -> FuncElem<F::Elem> {
        self.from_parts(self.ring.x(), self.ring.zero())
    }

    /// The coordinate function `y`.
    pub fn y(&self) -> FuncElem<F::Elem> {
        self.from_parts(self.ring.zero(), self.ring.one())
    }

    pub fn from_parts(&self, a: Poly<F::Elem>, b: Poly<F::Elem>) -> FuncElem<F::Elem> {
        FuncElem { a, b, den: self.ring.one() }
    }

    pub fn embed(&self, c: &F::Elem) -> FuncElem<F::Elem> {
        self.from_parts(self.ring.constant(c.clone()), self.ring.zero())
    }

    fn normalize(&self, a: Poly<F::Elem>, b: Poly<F::Elem>, den: Poly<F::Elem>) -> FuncElem<F::Elem> {
        let r = &self.ring;
        if a.is_zero() && b.is_zero() {
            return FuncElem { a, b, den: r.one() };
        }
        let g = r.gcd(&r.gcd(&a, &b), &den);
        let (a, b, den) = if r.is_one(&g) {
            (a, b, den)
        } else {
            (r.div_exact(&a, &g).unwrap(), r.div_exact(&b, &g).unwrap(), r.div_exact(&den, &g).unwrap())
        };
        let lc = den.lc().unwrap().clone();
        if self.ring.field().is_one(&lc) {
            return FuncElem { a, b, den };
        }
        let li = self.ring.field().inv(&lc).unwrap();
        FuncElem { a: r.scale(&a, &li), b: r.scale(&b, &li), den: r.scale(&den, &li) }
    }

    /// The rational function of `x` alone, if `b = 0`.
    pub fn as_rational(&self, e: &FuncElem<F::Elem>) -> Option<(Poly<F::Elem>, Poly<F::Elem>)> {
        e.b.is_zero().then(|| (e.a.clone(), e.den.clone()))
    }

    /// `e / y` as a rational function of `x`, if `a = 0`.
    pub fn as_y_multiple(&self, e: &FuncElem<F::Elem>) -> Option<(Poly<F::Elem>, Poly<F::Elem>)> {
        e.a.is_zero().then(|| (e.b.clone(), e.den.clone()))
    }

    pub fn max_degree(&self, e: &FuncElem<F::Elem>) -> usize {
        [&e.a, &e.b, &e.den].iter().map(|p| p.degree().unwrap_or(0)).max().unwrap()
    }
}

impl<F: FiniteField> Field for FuncField<F> {
    type Elem = FuncElem<F::Elem>;

    fn zero(&self) -> Self::Elem {
        self.from_parts(self.ring.zero(), self.ring.zero())
    }
    fn one(&self) -> Self::Elem {
        self.from_parts(self.ring.one(), self.ring.zero())
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.a.is_zero() && a.b.is_zero()
    }
    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        let r = &self.ring;
        if x.den == y.den {
            return self.normalize(r.add(&x.a, &y.a), r.add(&x.b, &y.b), x.den.clone());
        }
        self.normalize(
            r.add(&r.mul(&x.a, &y.den), &r.mul(&y.a, &x.den)),
            r.add(&r.mul(&x.b, &y.den), &r.mul(&y.b, &x.den)),
            r.mul(&x.den, &y.den),
        )
    }
    fn sub(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.add(x, &self.neg(y))
    }
    fn neg(&self, x: &Self::Elem) -> Self::Elem {
        FuncElem { a: self.ring.neg(&x.a), b: self.ring.neg(&x.b), den: x.den.clone() }
    }
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        let r = &self.ring;
        let a = r.add(&r.mul(&x.a, &y.a), &r.mul(&r.mul(&x.b, &y.b), &self.f));
        let b = r.add(&r.mul(&x.a, &y.b), &r.mul(&x.b, &y.a));
        self.normalize(a, b, r.mul(&x.den, &y.den))
    }
    fn inv(&self, x: &Self::Elem) -> Option<Self::Elem> {
        if self.is_zero(x) {
            return None;
        }
        // (a + b y)^{-1} = (a - b y) / (a^2 - b^2 f)
        let r = &self.ring;
        let norm = r.sub(&r.square(&x.a), &r.mul(&r.square(&x.b), &self.f));
        Some(self.normalize(r.mul(&x.a, &x.den), r.neg(&r.mul(&x.b, &x.den)), norm))
    }
    fn from_i64(&self, n: i64) -> Self::Elem {
        self.embed(&self.ring.field().from_i64(n))
    }
    fn characteristic(&self) -> u64 {
        self.ring.field().characteristic()
    }
}

/// `alpha((x, y) - P_inf) = <sum d_i(x) X^i / d_w(x), y sum_{i<w} e_i(x) X^i / e_w(x)>`
/// for the generic point, `w` the generic weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericImage<E> {
    /// `d_0..d_w`.
    pub d: Vec<Poly<E>>,
    /// `e_0..e_w`; `e_w` is the common denominator of the `v` part.
    pub e: Vec<Poly<E>>,
    pub endo: Endo,
}

impl<E> GenericImage<E> {
    pub fn weight(&self) -> usize {
        self.d.len() - 1
    }
}

/// What to take the image of.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Endo {
    Integer(i64),
    /// Coordinates in `1, eta, ..`.
    Order(Vec<BigInt>),
}

impl Endo {
    /// `alpha(D)` on a Dickson curve over any finite field.
    pub fn apply<G: FiniteField, R: Rng + ?Sized>(
        &self,
        dc: &DicksonCurve<G>,
        d: &Divisor<G::Elem>,
        rng: &mut R,
    ) -> Divisor<G::Elem> {
        match self {
            Endo::Integer(l) => dc.curve.mul(*l, d),
            Endo::Order(a) => dc.apply_order_element(a, d, rng),
        }
    }

    /// `l`, or the coordinates joined by `;`.
    pub fn label(&self) -> String {
        match self {
            Endo::Integer(l) => l.to_string(),
            Endo::Order(a) => a.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";"),
        }
    }
}

/// Computes the generic image of `alpha` (or of multiplication by `l`),
/// failing once a coefficient degree exceeds `budget`.
pub fn generic_image<F: FiniteField>(
    dc: &DicksonCurve<F>,
    endo: &Endo,
    budget: usize,
) -> Result<GenericImage<F::Elem>> {
    let ring = dc.curve.ring().clone();
    let kf = FuncField::new(ring.clone(), dc.curve.f().clone());
    let ck = dc.curve.base_change(kf.clone(), |c| kf.embed(c));
    let x = kf.x();
    let y = kf.y();
    let point = Divisor { u: ck.ring().linear(&x), v: ck.ring().constant(y.clone()) };
    let coords: Vec<BigInt> = match endo {
        Endo::Integer(l) => {
            let mut c = vec![BigInt::zero(); dc.genus() + 1];
            c[0] = BigInt::from(*l);
            c
        }
        Endo::Order(a) => dc.theta_coords(a),
    };
    let mut acc = ck.zero();
    for (m, cm) in coords.iter().enumerate() {
        if cm.is_zero() {
            continue;
        }
        let base = if m == 0 {
            point.clone()
        } else {
            let dm = kf.embed(dc.theta_const(m));
            let c2m = kf.embed(&dc.c2m(m));
            DicksonCurve::<F>::theta_point_in(&ck, &dm, &c2m, &x, &y)
        };
        let term = checked_mul(&ck, &kf, cm, &base, budget)?;
        acc = ck.add(&acc, &term);
        check_budget(&kf, &acc, budget)?;
    }
    to_image(&kf, &acc, endo.clone())
}

fn check_budget<F: FiniteField>(kf: &FuncField<F>, d: &Divisor<FuncElem<F::Elem>>, budget: usize) -> Result<()> {
    let deg = d.u.coeffs().iter().chain(d.v.coeffs()).map(|c| kf.max_degree(c)).max().unwrap_or(0);
    if deg > budget {
        return Err(Error::Budget(format!("coefficient degree {deg} exceeds the budget {budget}")));
    }
    Ok(())
}

fn checked_mul<F: FiniteField>(
    ck: &Curve<FuncField<F>>,
    kf: &FuncField<F>,
    m: &BigInt,
    d: &Divisor<FuncElem<F::Elem>>,
    budget: usize,
) -> Result<Divisor<FuncElem<F::Elem>>> {
    let base = if m.is_negative() { ck.negate(d) } else { d.clone() };
    let m = m.magnitude();
    let mut acc = ck.zero();
    for i in (0..m.bits()).rev() {
        acc = ck.double(&acc);
        if m.bit(i) {
            acc = ck.add(&acc, &base);
        }
        check_budget(kf, &acc, budget)?;
    }
    Ok(acc)
}

fn to_image<F: FiniteField>(
    kf: &FuncField<F>,
    d: &Divisor<FuncElem<F::Elem>>,
    endo: Endo,
) -> Result<GenericImage<F::Elem>> {
    let r = kf.ring();
    let w = d.u.degree().unwrap_or(0);
    let bad = || Error::Verification("generic image has unexpected shape".into());
    let u: Vec<(Poly<F::Elem>, Poly<F::Elem>)> =
        d.u.coeffs().iter().map(|c| kf.as_rational(c).ok_or_else(bad)).collect::<Result<_>>()?;
    let v: Vec<(Poly<F::Elem>, Poly<F::Elem>)> = (0..w)
        .map(|i| match d.v.coeffs().get(i) {
            Some(c) => kf.as_y_multiple(c).ok_or_else(bad),
            None => Ok((r.zero(), r.one())),
        })
        .collect::<Result<_>>()?;
    let common = |parts: &[(Poly<F::Elem>, Poly<F::Elem>)]| {
        let mut l = r.one();
        for (_, den) in parts {
            let g = r.gcd(&l, den);
            l = r.div_exact(&r.mul(&l, den), &g).unwrap();
        }
        let mut out: Vec<Poly<F::Elem>> =
            parts.iter().map(|(num, den)| r.mul(num, &r.div_exact(&l, den).unwrap())).collect();
        out.push(l);
        out
    };
    // u is monic, so d_w is the common denominator of the lower coefficients
    Ok(GenericImage { d: common(&u[..w]), e: common(&v), endo })
}

/// Substitutes a point `(x0, y0)` over an extension of the base field; `None`
/// where `d_w(x0) e_w(x0) = 0`.
pub fn evaluate_image<F: FiniteField, G: Field>(
    img: &GenericImage<F::Elem>,
    target: &Curve<G>,
    emb: impl Fn(&F::Elem) -> G::Elem,
    x0: &G::Elem,
    y0: &G::Elem,
) -> Option<Divisor<G::Elem>> {
    let fld = target.field();
    let r = target.ring();
    let ev = |p: &Poly<F::Elem>| {
        p.coeffs().iter().rev().fold(fld.zero(), |acc, c| fld.add(&fld.mul(&acc, x0), &emb(c)))
    };
    let w = img.weight();
    let dw = ev(&img.d[w]);
    let ew = ev(&img.e[w]);
    let dwi = fld.inv(&dw)?;
    let ewi = fld.inv(&ew)?;
    let u = r.from_coeffs(img.d.iter().map(|p| fld.mul(&ev(p), &dwi)).collect());
    let v = r.from_coeffs(img.e[..w].iter().map(|p| fld.mul(&fld.mul(&ev(p), &ewi), y0)).collect());
    Some(Divisor { u, v })
}

/// Maximum degrees `(max deg d_i, max deg e_i)`.
pub fn degree_profile<E>(img: &GenericImage<E>) -> (usize, usize) {
    let md = |v: &[Poly<E>]| v.iter().map(|p| p.degree().unwrap_or(0)).max().unwrap_or(0);
    (md(&img.d), md(&img.e))
}

/// One CSV row: `g,label,max_deg_d,max_deg_e`, the label being `l` or the
/// coordinates of `alpha` joined by `;`.
pub fn degree_csv_row<E>(g: usize, img: &GenericImage<E>) -> String {
    let (dd, de) = degree_profile(img);
    format!("{g},{},{dd},{de}", img.endo.label())
}

/// Square-free `Delta_t` and `Gamma_{t-1}` for `t = w-1 .. 1`: the
/// abscissae whose image drops to weight at most `t`, and those among them
/// that drop below `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonGenericChain<E> {
    /// `delta[j]` is `Delta_{w-1-j}`.
    pub delta: Vec<Poly<E>>,
    /// `gamma[j]` is `Gamma_{w-2-j}`.
    pub gamma: Vec<Poly<E>>,
}

/// Builds the chain from `gcd(d_w, e_w)` by evaluating the endomorphism at
/// the generic point of each irreducible factor; factors at which the image
/// keeps full weight (poles of `v` only) are left out of `Delta_{w-1}`.
pub fn nongeneric_chain<F: FiniteField, R: Rng + ?Sized>(
    dc: &DicksonCurve<F>,
    img: &GenericImage<F::Elem>,
    rng: &mut R,
) -> Result<NonGenericChain<F::Elem>> {
    let r = dc.curve.ring();
    let w = img.weight();
    let g = dc.genus();
    if w < g {
        // degenerate image such as alpha = 1: the chain is trivial
        let ones = vec![r.one(); g - 1];
        return Ok(NonGenericChain { delta: ones.clone(), gamma: ones });
    }
    let candidates = squarefree_part(r, &r.gcd(&img.d[w], &img.e[w]));
    // weight of the image above each irreducible factor
    let mut weights: Vec<(Poly<F::Elem>, usize)> = Vec::new();
    if candidates.degree().unwrap_or(0) > 0 {
        for h in irreducible_factors(r, &candidates, rng) {
            let wt = weight_over_factor(dc, &img.endo, &h, rng)?;
            weights.push((h, wt));
        }
    }
    let product = |pred: &dyn Fn(usize) -> bool| {
        weights.iter().filter(|(_, wt)| pred(*wt)).fold(r.one(), |acc, (h, _)| r.mul(&acc, h))
    };
    let mut delta = vec![product(&|wt| wt < w)];
    let mut gamma = Vec::new();
    for t in (1..w).rev() {
        // Gamma_{t-1}: factors of Delta_t whose image has weight < t
        let g = product(&|wt| wt < t);
        let d = r.gcd(&delta.last().unwrap().clone(), &g);
        gamma.push(g);
        if t > 1 {
            delta.push(d);
        }
    }
    Ok(NonGenericChain { delta, gamma })
}

/// Weight of `alpha(P - P_inf)` for `P` with abscissa a root of `h`.
fn weight_over_factor<F: FiniteField, R: Rng + ?Sized>(
    dc: &DicksonCurve<F>,
    endo: &Endo,
    h: &Poly<F::Elem>,
    rng: &mut R,
) -> Result<usize> {
    let k = ExtField::new(dc.field().clone(), h.clone())?;
    let dk = extend_dickson(dc, &k);
    let x0 = k.gen();
    let fx = dk.curve.ring().eval(dk.curve.f(), &x0);
    if let Some(y0) = k.sqrt(&fx) {
        let p = Divisor { u: dk.curve.ring().linear(&x0), v: dk.curve.ring().constant(y0) };
        return Ok(endo.apply(&dk, &p, rng).weight());
    }
    // the point lives over the quadratic extension
    let k2 = build_extension(&k, 2, 0x71);
    let d2 = extend_dickson(&dk, &k2);
    let x2 = k2.embed(&x0);
    let y2 = k2.sqrt(&k2.embed(&fx)).expect("square in the quadratic extension");
    let p = Divisor { u: d2.curve.ring().linear(&x2), v: d2.curve.ring().constant(y2) };
    Ok(endo.apply(&d2, &p, rng).weight())
}
