//! Recovering `chi_pi` from the action of `psi = pi + q/pi` on the kernels
//! `J[p_i]`: eigenvalues mod `l`, a Vandermonde solve, CRT, and the
//! reconstruction of `chi_pi` from the coordinates of `psi` in `Z[eta]`.

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{charpoly, ExtField, FiniteField};
use crate::endo::DicksonCurve;
use crate::error::{Error, Result};
use crate::jacobian::{Curve, Divisor};
use crate::kernel::{default_extension_cap, kernel_via_group_order_oracle, kernel_via_solver};
use crate::oracle::{chi_eval, chi_from_counts, naive_counts, DEFAULT_ENUMERATION_BUDGET};
use crate::par::Parallelism;
use crate::rmorder::{OrderElement, RMOrder, SplitData};

/// Eigenvalues of `psi` on the `g` ideals above `l` and the coordinates of
/// `psi` they determine mod `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularTrace {
    pub ell: u64,
    pub k: Vec<u64>,
    pub a_mod_ell: Vec<u64>,
}

/// `chi_pi` together with the intermediate data of its reconstruction.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaData {
    pub g: usize,
    pub q: BigInt,
    /// Coordinates of `psi` in `1, eta, .., eta^{g-1}`; absent when `chi`
    /// came from point counting.
    pub a: Option<Vec<BigInt>>,
    pub alpha_table: Vec<Vec<BigInt>>,
    /// `s_0..s_g` of `chi_psi`.
    pub s: Vec<BigInt>,
    /// `sigma_0..sigma_g`, with `sigma_g = c_g / 2` possibly a half-integer.
    pub sigma: Vec<BigRational>,
    /// `c_0..c_{2g}` of `chi_pi`.
    pub c: Vec<BigInt>,
    pub c_eta: f64,
}

impl ZetaData {
    /// `#J(F_q) = chi_pi(1)`.
    pub fn jacobian_order(&self) -> BigInt {
        chi_eval(&self.c, &BigInt::one())
    }
}

/// `alpha[i][j]` for `0 <= j <= i <= g` with
/// `pi^i + (q/pi)^i = sum_j alpha[i][j] psi^j`; row 0 is the constant 2.
pub fn alpha_table(g: usize, q: &BigInt) -> Vec<Vec<BigInt>> {
    let mut t: Vec<Vec<BigInt>> = vec![vec![BigInt::from(2)]];
    if g >= 1 {
        t.push(vec![BigInt::zero(), BigInt::one()]);
    }
    for i in 1..g {
        // T_{i+1} = psi T_i - q T_{i-1}
        let mut row = vec![BigInt::zero(); i + 2];
        for j in 0..=i + 1 {
            let shifted = if j >= 1 { t[i][j - 1].clone() } else { BigInt::zero() };
            let lower = t[i - 1].get(j).cloned().unwrap_or_default();
            row[j] = shifted - q * lower;
        }
        t.push(row);
    }
    t
}

/// Rebuilds `chi_pi` from the coordinates `a` of `psi`: `chi_psi` is the
/// characteristic polynomial of multiplication by `psi`, and the `sigma_i`
/// follow from the unitriangular system `s_j = sum_i alpha[i][j] sigma_{g-i}`.
pub fn reconstruct_chi(order: &RMOrder, a: &[BigInt], q: &BigInt, c_eta: f64) -> Result<ZetaData> {
    let g = order.g;
    let s = charpoly(&order.mul_matrix(a)).0;
    let z = from_chi_psi(g, q, &s, c_eta)?;
    Ok(ZetaData { a: Some(a.to_vec()), ..z })
}

/// Fills in `sigma` and `c` from `chi_psi` (`s_0..s_g`, monic).
pub fn from_chi_psi(g: usize, q: &BigInt, s: &[BigInt], c_eta: f64) -> Result<ZetaData> {
    let alpha = alpha_table(g, q);
    // doubled[i] = sigma_i for i < g and 2 sigma_g = c_g at i = g, which is
    // what the i = 0 row (constant 2) multiplies
    let mut doubled = vec![BigInt::zero(); g + 1];
    doubled[0] = BigInt::one();
    for j in (0..g).rev() {
        let mut rest = s[j].clone();
        for i in j + 1..=g {
            rest -= &alpha[i][j] * &doubled[g - i];
        }
        doubled[g - j] = rest;
    }
    let mut c = vec![BigInt::zero(); 2 * g + 1];
    for i in 0..=g {
        c[2 * g - i] = doubled[i].clone();
    }
    for i in 0..g {
        c[i] = q.pow((g - i) as u32) * &c[2 * g - i];
    }
    let z = ZetaData { g, q: q.clone(), a: None, alpha_table: alpha, s: s.to_vec(), sigma: halve_last(doubled), c, c_eta };
    check_weil_bounds(&z)?;
    Ok(z)
}

fn halve_last(doubled: Vec<BigInt>) -> Vec<BigRational> {
    let g = doubled.len() - 1;
    doubled
        .into_iter()
        .enumerate()
        .map(|(i, v)| if i == g { BigRational::new(v, BigInt::from(2)) } else { BigRational::from_integer(v) })
        .collect()
}

/// `chi_psi` from `chi_pi`: inverse of `from_chi_psi`.
pub fn zeta_from_chi(g: usize, q: &BigInt, c: &[BigInt], c_eta: f64) -> Result<ZetaData> {
    if c.len() != 2 * g + 1 {
        return Err(Error::InvalidInput(format!("chi must have {} coefficients", 2 * g + 1)));
    }
    let alpha = alpha_table(g, q);
    let doubled: Vec<BigInt> = (0..=g).map(|i| c[2 * g - i].clone()).collect();
    // alpha[0][0] sigma_g = c_g
    let s: Vec<BigInt> = (0..=g)
        .map(|j| (j.max(1)..=g).map(|i| &alpha[i][j] * &doubled[g - i]).sum::<BigInt>() + if j == 0 { c[g].clone() } else { BigInt::zero() })
        .collect();
    let z = ZetaData { g, q: q.clone(), a: None, alpha_table: alpha, s, sigma: halve_last(doubled), c: c.to_vec(), c_eta };
    check_functional_equation(&z)?;
    check_weil_bounds(&z)?;
    Ok(z)
}

/// `2 ||V^{-1}||_inf (1 + 2^-20)` for the Vandermonde matrix `V` of the
/// conjugates of `eta`: `|a_j| <= C_eta sqrt(q)` since every conjugate of
/// `psi` has absolute value at most `2 sqrt(q)`.
pub fn compute_c_eta(order: &RMOrder) -> f64 {
    let g = order.g;
    let v: Vec<Vec<f64>> = order.conjugates.iter().map(|x| (0..g).map(|j| x.powi(j as i32)).collect()).collect();
    let inv = invert_f64(v);
    let norm = inv.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    2.0 * norm * (1.0 + 2f64.powi(-20))
}

fn invert_f64(mut m: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        m.swap(col, piv);
        inv.swap(col, piv);
        let d = m[col][col];
        for j in 0..n {
            m[col][j] /= d;
            inv[col][j] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                for j in 0..n {
                    m[r][j] -= f * m[col][j];
                    inv[r][j] -= f * inv[col][j];
                }
            }
        }
    }
    inv
}

/// Solves `sum_j a_j lambda_i^j = k_i (mod l)` for `a`.
pub fn solve_traces_mod_ell(split: &SplitData, k: &[u64]) -> ModularTrace {
    let ell = split.ell;
    let g = split.lambdas.len();
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % ell as u128) as u64;
    let mut m: Vec<Vec<u64>> = split
        .lambdas
        .iter()
        .zip(k)
        .map(|(&l, &ki)| {
            let mut row: Vec<u64> = Vec::with_capacity(g + 1);
            let mut pw = 1 % ell;
            for _ in 0..g {
                row.push(pw);
                pw = mul(pw, l);
            }
            row.push(ki % ell);
            row
        })
        .collect();
    for col in 0..g {
        let piv = (col..g).find(|&r| m[r][col] != 0).expect("eigenvalues of eta are distinct");
        m.swap(col, piv);
        let inv = inv_mod(m[col][col], ell);
        for x in m[col].iter_mut() {
            *x = mul(*x, inv);
        }
        for r in 0..g {
            if r != col && m[r][col] != 0 {
                let f = m[r][col];
                for j in 0..=g {
                    let t = mul(f, m[col][j]);
                    m[r][j] = (m[r][j] + ell - t) % ell;
                }
            }
        }
    }
    ModularTrace { ell, k: k.to_vec(), a_mod_ell: m.iter().map(|r| r[g]).collect() }
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let e = (a as i128).extended_gcd(&(m as i128));
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m as i128) as u64
}

/// Combines the residues by CRT, lifts symmetrically and checks
/// `|a_j| <= C_eta sqrt(q)`.
pub fn crt_accumulate(traces: &[ModularTrace], c_eta: f64, q: f64) -> Result<Vec<BigInt>> {
    let g = traces.first().map_or(0, |t| t.a_mod_ell.len());
    let mut modulus = BigInt::one();
    let mut acc = vec![BigInt::zero(); g];
    for t in traces {
        let ell = BigInt::from(t.ell);
        let minv = modulus.modinv(&ell).ok_or_else(|| Error::InvalidInput("moduli are not coprime".into()))?;
        for (a, &r) in acc.iter_mut().zip(&t.a_mod_ell) {
            // a + modulus * ((r - a) / modulus mod l)
            let step = ((BigInt::from(r) - &*a) * &minv).mod_floor(&ell);
            *a += &modulus * step;
        }
        modulus *= ell;
    }
    let half = &modulus >> 1;
    let bound = c_eta * q.sqrt();
    for a in acc.iter_mut() {
        if *a > half {
            *a -= &modulus;
        }
        if a.abs().to_f64().unwrap_or(f64::INFINITY) > bound {
            return Err(Error::Verification(format!("CRT lift {a} exceeds the bound {bound:.3}")));
        }
    }
    Ok(acc)
}

/// Every `k` in `[0, l)` with `k pi(D) = pi^2(D) + q D`.
pub fn eigenvalue_candidates<B: FiniteField>(
    curve: &Curve<ExtField<B>>,
    d: &Divisor<Vec<B::Elem>>,
    ell: u64,
) -> Vec<u64> {
    let (b, r) = frobenius_relation(curve, d);
    let mut acc = curve.zero();
    let mut out = Vec::new();
    for k in 0..ell {
        if acc == r {
            out.push(k);
        }
        acc = curve.add(&acc, &b);
    }
    out
}

fn frobenius_relation<B: FiniteField>(
    curve: &Curve<ExtField<B>>,
    d: &Divisor<Vec<B::Elem>>,
) -> (Divisor<Vec<B::Elem>>, Divisor<Vec<B::Elem>>) {
    let q = curve.field().base().order();
    let b = curve.frobenius(d);
    let r = curve.add(&curve.frobenius(&b), &curve.mul_unsigned(&q, d));
    (b, r)
}

/// The eigenvalue `k` of `psi` on a divisor `D` of order `l` in some
/// `J[p_i]`: linear scan for `l <= 2048`, baby-step giant-step above.
pub fn eigenvalue_k<B: FiniteField>(curve: &Curve<ExtField<B>>, d: &Divisor<Vec<B::Elem>>, ell: u64) -> Result<u64> {
    let (b, r) = frobenius_relation(curve, d);
    let none = || Error::NotFound(format!("no eigenvalue mod {ell}: divisor is not in a kernel J[p_i]"));
    if ell <= 2048 {
        let mut acc = curve.zero();
        for k in 0..ell {
            if acc == r {
                return Ok(k);
            }
            acc = curve.add(&acc, &b);
        }
        return Err(none());
    }
    let m = (ell as f64).sqrt().ceil() as u64;
    let mut baby = HashMap::with_capacity(m as usize);
    let mut acc = curve.zero();
    for j in 0..m {
        baby.entry(acc.clone()).or_insert(j);
        acc = curve.add(&acc, &b);
    }
    // acc = m B; look for r - i m B in the table
    let giant = curve.negate(&acc);
    let mut cur = r;
    for i in 0..=m {
        if let Some(&j) = baby.get(&cur) {
            return Ok((i * m + j) % ell);
        }
        cur = curve.add(&cur, &giant);
    }
    Err(none())
}

/// Functional equation `c_i = q^{g-i} c_{2g-i}` and `c_{2g} = 1`.
pub fn check_functional_equation(z: &ZetaData) -> Result<()> {
    let g = z.g;
    if !z.c[2 * g].is_one() {
        return Err(Error::Verification("chi is not monic".into()));
    }
    for i in 0..g {
        if z.c[i] != z.q.pow((g - i) as u32) * &z.c[2 * g - i] {
            return Err(Error::Verification(format!("functional equation fails at c_{i}")));
        }
    }
    Ok(())
}

/// `|c_i| <= binom(2g, i) q^{(2g-i)/2}`, compared after squaring.
pub fn check_weil_bounds(z: &ZetaData) -> Result<()> {
    let g = z.g;
    let mut binom = BigInt::one();
    for i in 0..=2 * g {
        let lhs = &z.c[i] * &z.c[i];
        let rhs = &binom * &binom * z.q.pow((2 * g - i) as u32);
        if lhs > rhs {
            return Err(Error::Verification(format!("c_{i} = {} violates the Weil bound", z.c[i])));
        }
        binom = binom * BigInt::from(2 * g - i) / BigInt::from(i + 1);
    }
    Ok(())
}

/// Largest relative deviation of `|root|` from `sqrt(q)` over the complex
/// roots of `chi` (computed on its squarefree part).
pub fn root_modulus_deviation(c: &[BigInt], q: &BigInt) -> f64 {
    let sq = squarefree_rational(c);
    let sqrt_q = q.to_f64().unwrap().sqrt();
    // substitute X = sqrt(q) Z so that the roots should lie on the unit circle
    let deg = sq.len() - 1;
    let lc = sq[deg].to_f64().unwrap() * sqrt_q.powi(deg as i32);
    let scaled: Vec<Complex64> = sq
        .iter()
        .enumerate()
        .map(|(i, v)| Complex64::new(v.to_f64().unwrap() * sqrt_q.powi(i as i32) / lc, 0.0))
        .collect();
    aberth(&scaled).iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max)
}

/// `chi / gcd(chi, chi')` over `Q`, monic.
fn squarefree_rational(c: &[BigInt]) -> Vec<BigRational> {
    let p: Vec<BigRational> = c.iter().map(|v| BigRational::from_integer(v.clone())).collect();
    let dp: Vec<BigRational> =
        p.iter().enumerate().skip(1).map(|(i, v)| v * BigRational::from_integer(BigInt::from(i))).collect();
    let g = rat_gcd(p.clone(), dp);
    rat_div(&p, &g)
}

fn rat_trim(mut a: Vec<BigRational>) -> Vec<BigRational> {
    while a.last().is_some_and(|v| v.is_zero()) {
        a.pop();
    }
    a
}

fn rat_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let f = r.last().unwrap() / b.last().unwrap();
        let shift = r.len() - 1 - db;
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] = &r[shift + j] - &f * bj;
        }
        r.pop();
        r = rat_trim(r);
    }
    r
}

fn rat_div(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let mut quo = vec![BigRational::zero(); a.len() - db];
    while r.len() > db && !r.is_empty() {
        let f = r.last().unwrap() / b.last().unwrap();
        let shift = r.len() - 1 - db;
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] = &r[shift + j] - &f * bj;
        }
        quo[shift] = f;
        r.pop();
    }
    quo
}

fn rat_gcd(mut a: Vec<BigRational>, mut b: Vec<BigRational>) -> Vec<BigRational> {
    a = rat_trim(a);
    b = rat_trim(b);
    while !b.is_empty() {
        let r = rat_rem(&a, &b);
        a = b;
        b = r;
    }
    let lc = a.last().unwrap().clone();
    a.into_iter().map(|v| v / &lc).collect()
}

/// Simultaneous root finding for a monic complex polynomial.
fn aberth(p: &[Complex64]) -> Vec<Complex64> {
    let n = p.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let dp: Vec<Complex64> = p.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect();
    let eval = |c: &[Complex64], z: Complex64| c.iter().rev().fold(Complex64::zero(), |acc, v| acc * z + v);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0 + 0.1 / (k + 1) as f64, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let ratio = eval(p, z[i]) / eval(&dp, z[i]);
            let repulse: Complex64 = (0..n).filter(|&j| j != i).map(|j| Complex64::one() / (z[i] - z[j])).sum();
            let w = ratio / (Complex64::one() - ratio * repulse);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm());
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Certifies a candidate `chi_pi`: functional equation, Weil bounds, root
/// moduli within `1e-6` relative of `sqrt(q)`, and `chi_pi(1) D = 0` for
/// `trials` random divisors over `F_q`.
pub fn verify_chi<F: FiniteField, R: Rng + ?Sized>(
    dc: &DicksonCurve<F>,
    z: &ZetaData,
    trials: usize,
    rng: &mut R,
) -> Result<()> {
    check_functional_equation(z)?;
    check_weil_bounds(z)?;
    let dev = root_modulus_deviation(&z.c, &z.q);
    if dev > 1e-6 {
        return Err(Error::Verification(format!("a root of chi has modulus off sqrt(q) by {dev:e}")));
    }
    let order = z.jacobian_order();
    for i in 0..trials {
        let d = dc.curve.random_divisor(rng)?;
        if !dc.curve.mul_big(&order, &d).is_zero() {
            return Err(Error::Verification(format!("chi(1) does not annihilate random divisor {i}")));
        }
    }
    Ok(())
}

/// `psi` applied to `pi(D)` against `pi^2(D) + q D`, for a final `a`.
pub fn check_psi_relation<B: FiniteField, R: Rng + ?Sized>(
    dc: &DicksonCurve<ExtField<B>>,
    a: &OrderElement,
    d: &Divisor<Vec<B::Elem>>,
    rng: &mut R,
) -> bool {
    let (b, r) = frobenius_relation(&dc.curve, d);
    dc.apply_order_element(a, &b, rng) == r
}

/// Where `count` takes `chi_pi` or the kernel elements from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Kernel elements from the polynomial system solver.
    Rm,
    /// Naive point counting only.
    Oracle,
    /// Kernel elements sampled with the help of the naive `chi_pi`.
    RmWithOracleKernels,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Rm => "rm",
            Mode::Oracle => "oracle",
            Mode::RmWithOracleKernels => "rm-with-oracle-kernels",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rm" => Ok(Mode::Rm),
            "oracle" => Ok(Mode::Oracle),
            "rm-with-oracle-kernels" => Ok(Mode::RmWithOracleKernels),
            _ => Err(Error::InvalidInput(format!("unknown mode {s}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CountConfig {
    pub seed: u64,
    /// Cap on the degree of kernel fields of definition; `None` means
    /// `min(l^2 - 1, 600)`.
    pub extension_cap: Option<usize>,
    /// Cap on coefficient degrees in symbolic images.
    pub degree_budget: usize,
    /// Cap on `q^g` for naive counting.
    pub enumeration_budget: u64,
    /// Random divisors used by the final annihilation check.
    pub verify_trials: usize,
    /// Give up when the next admissible prime exceeds this.
    pub max_ell: u64,
    pub par: Parallelism,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig {
            seed: 0,
            extension_cap: None,
            degree_budget: 200_000,
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
            verify_trials: 20,
            max_ell: 1000,
            par: Parallelism::default(),
        }
    }
}

impl CountConfig {
    pub fn cap_for(&self, ell: u64) -> usize {
        self.extension_cap.unwrap_or_else(|| default_extension_cap(ell))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EllStatus {
    Ok,
    Skipped(String),
}

impl std::fmt::Display for EllStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EllStatus::Ok => write!(f, "ok"),
            EllStatus::Skipped(r) => write!(f, "skipped:{r}"),
        }
    }
}

/// What happened at one prime `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllReport {
    pub ell: u64,
    pub lambdas: Vec<u64>,
    pub alphas: Vec<OrderElement>,
    pub k: Vec<u64>,
    pub a_mod_ell: Vec<u64>,
    /// Extension degree of each kernel element.
    pub degrees: Vec<usize>,
    /// For each ideal, every `k` satisfying the eigenvalue relation (a
    /// full scan, recorded for `l <= 101`).
    pub k_solutions: Vec<Vec<u64>>,
    pub status: EllStatus,
}

#[derive(Clone, Debug)]
pub struct CountResult {
    pub mode: Mode,
    pub zeta: ZetaData,
    pub per_ell: Vec<EllReport>,
    pub timings_ms: Vec<(String, u128)>,
}

/// Runs the point-counting pipeline on a Dickson curve.
pub fn count<F: FiniteField>(dc: &DicksonCurve<F>, mode: Mode, cfg: &CountConfig) -> Result<CountResult> {
    let start = Instant::now();
    let mut timings = Vec::new();
    let g = dc.genus();
    let order = RMOrder::new(dc.n)?;
    let c_eta = compute_c_eta(&order);
    let q_big = dc.field().order();
    let q = BigInt::from(q_big.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let oracle_chi = match mode {
        Mode::Oracle | Mode::RmWithOracleKernels => {
            let counts = naive_counts(&dc.curve, g, cfg.enumeration_budget, cfg.par)?;
            let chi = chi_from_counts(&counts, &q_big, g)?;
            timings.push(("oracle".to_string(), start.elapsed().as_millis()));
            Some(chi)
        }
        Mode::Rm => None,
    };
    if mode == Mode::Oracle {
        let zeta = zeta_from_chi(g, &q, oracle_chi.as_ref().unwrap(), c_eta)?;
        verify_chi(dc, &zeta, cfg.verify_trials, &mut rng)?;
        timings.push(("total".to_string(), start.elapsed().as_millis()));
        return Ok(CountResult { mode, zeta, per_ell: Vec::new(), timings_ms: timings });
    }
    let qf = q.to_f64().unwrap();
    let bound = 2.0 * order.i_eta as f64 * c_eta * qf.sqrt() + 1.0;
    let p = dc.field().characteristic();
    let mut primes = order.admissible_primes(p, 2);
    let mut reports: Vec<EllReport> = Vec::new();
    let mut traces: Vec<ModularTrace> = Vec::new();
    let mut product = 1.0f64;
    while product <= bound {
        // optimistic batch: enough primes if none of them is skipped
        let mut batch = Vec::new();
        let mut optimistic = product;
        while optimistic <= bound {
            let (split, alphas) = primes.next().ok_or_else(|| Error::Budget("ran out of primes".into()))?;
            if split.ell > cfg.max_ell {
                return Err(Error::Budget(format!("ran out of primes below {}", cfg.max_ell)));
            }
            optimistic *= split.ell as f64;
            batch.push((split, alphas));
        }
        let chi = oracle_chi.as_deref();
        let results = cfg.par.map(batch, |(split, alphas)| process_ell(dc, &order, mode, chi, split, alphas, cfg));
        for rep in results {
            if rep.status == EllStatus::Ok {
                product *= rep.ell as f64;
                traces.push(ModularTrace { ell: rep.ell, k: rep.k.clone(), a_mod_ell: rep.a_mod_ell.clone() });
            }
            reports.push(rep);
        }
    }
    timings.push(("kernels".to_string(), start.elapsed().as_millis()));
    let a = crt_accumulate(&traces, c_eta, qf)?;
    for t in &traces {
        let split = reports.iter().find(|r| r.ell == t.ell).unwrap();
        for (lam, k) in split.lambdas.iter().zip(&t.k) {
            let val = a.iter().rev().fold(BigInt::zero(), |acc, c| acc * BigInt::from(*lam) + c);
            if val.mod_floor(&BigInt::from(t.ell)) != BigInt::from(*k) {
                return Err(Error::Verification(format!("CRT result inconsistent mod {}", t.ell)));
            }
        }
    }
    let zeta = reconstruct_chi(&order, &a, &q, c_eta)?;
    verify_chi(dc, &zeta, cfg.verify_trials, &mut rng)?;
    timings.push(("total".to_string(), start.elapsed().as_millis()));
    Ok(CountResult { mode, zeta, per_ell: reports, timings_ms: timings })
}

fn process_ell<F: FiniteField>(
    dc: &DicksonCurve<F>,
    order: &RMOrder,
    mode: Mode,
    chi: Option<&[BigInt]>,
    split: SplitData,
    alphas: Vec<OrderElement>,
    cfg: &CountConfig,
) -> EllReport {
    let ell = split.ell;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ ell.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut rep = EllReport {
        ell,
        lambdas: split.lambdas.clone(),
        alphas: alphas.clone(),
        k: Vec::new(),
        a_mod_ell: Vec::new(),
        degrees: Vec::new(),
        k_solutions: Vec::new(),
        status: EllStatus::Ok,
    };
    let cap = cfg.cap_for(ell);
    for (i, alpha) in alphas.iter().enumerate() {
        let kernel = match mode {
            Mode::RmWithOracleKernels => {
                kernel_via_group_order_oracle(dc, order, chi.unwrap(), &split, i, alpha, cap, &mut rng)
            }
            _ => kernel_via_solver(dc, order, &split, i, alpha, cap, cfg.degree_budget, &mut rng),
        };
        let kernel = match kernel {
            Ok(k) => k,
            Err(e) => {
                rep.status = EllStatus::Skipped(skip_reason(&e));
                return rep;
            }
        };
        let k = match eigenvalue_k(&kernel.dc.curve, &kernel.d, ell) {
            Ok(k) => k,
            Err(e) => {
                rep.status = EllStatus::Skipped(skip_reason(&e));
                return rep;
            }
        };
        if ell <= 101 {
            rep.k_solutions.push(eigenvalue_candidates(&kernel.dc.curve, &kernel.d, ell));
        }
        rep.degrees.push(kernel.e);
        rep.k.push(k);
    }
    rep.a_mod_ell = solve_traces_mod_ell(&split, &rep.k).a_mod_ell;
    rep
}

fn skip_reason(e: &Error) -> String {
    match e {
        Error::Budget(_) => "extension-cap-exceeded".into(),
        Error::NotFound(m) | Error::Verification(m) | Error::Degenerate(m) => m.clone(),
        other => other.to_string(),
    }
}
