//! Reference solutions for small systems with rational coefficients and a
//! checker that diffs a result document against them.
//!
//! Multiplicities are exact: `f_1` is decomposed with Yun's algorithm over
//! the rationals, and `f_2` with Yun's algorithm over `Q[z1]/(p)` for each
//! squarefree factor `p`, splitting `p` whenever a leading coefficient is a
//! zero divisor. The roots of the resulting squarefree pieces start from
//! companion-matrix eigenvalues and are refined by Aberth iteration in
//! 512-bit fixed point.

use nalgebra::{Complex, DMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::dyadic::{Box, Disc, Dyadic};
use crate::opoly::TriangularSystem;
use crate::report::Report;

pub const MAX_VARIABLES: usize = 2;
pub const MAX_DEGREE: u32 = 8;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("reference oracle too expensive: {0}")]
    OracleTooExpensive(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("system has a positive-dimensional fiber over z1 = {0}")]
    NotZeroDimensional(String),
    #[error("root refinement did not converge")]
    NoConvergence,
}

type Q = BigRational;
type UPoly = Vec<Q>;
type BPoly = Vec<UPoly>;

fn trim<T: Zero>(p: &mut Vec<T>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn u_sub(a: &UPoly, b: &UPoly) -> UPoly {
    let mut r: UPoly = (0..a.len().max(b.len()))
        .map(|i| {
            a.get(i).cloned().unwrap_or_else(Q::zero) - b.get(i).cloned().unwrap_or_else(Q::zero)
        })
        .collect();
    trim(&mut r);
    r
}

fn u_mul(a: &UPoly, b: &UPoly) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    trim(&mut r);
    r
}

fn u_scale(a: &UPoly, c: &Q) -> UPoly {
    let mut r: UPoly = a.iter().map(|x| x * c).collect();
    trim(&mut r);
    r
}

fn u_divrem(a: &UPoly, b: &UPoly) -> (UPoly, UPoly) {
    assert!(!b.is_empty());
    let mut r = a.clone();
    trim(&mut r);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lb = b.last().unwrap();
    let mut q = vec![Q::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let k = r.len() - b.len();
        let c = r.last().unwrap() / lb;
        for (i, y) in b.iter().enumerate() {
            r[i + k] -= &c * y;
        }
        q[k] = c;
        r.pop();
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

fn u_monic(a: &UPoly) -> UPoly {
    let l = a.last().unwrap().clone();
    u_scale(a, &l.recip())
}

/// Returns `(g, s)` with `g = gcd(a, p)` monic and `s a = g mod p`.
fn u_ext_gcd(a: &UPoly, p: &UPoly) -> (UPoly, UPoly) {
    let (mut r0, mut r1) = (p.clone(), a.clone());
    let (mut s0, mut s1): (UPoly, UPoly) = (Vec::new(), vec![Q::one()]);
    while !r1.is_empty() {
        let (q, r) = u_divrem(&r0, &r1);
        let s = u_sub(&s0, &u_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    let l = r0.last().unwrap().recip();
    (u_scale(&r0, &l), u_scale(&s0, &l))
}

/// `Q[z1]/(p)` for a monic squarefree `p`. Operations that meet a zero
/// divisor return `Err(g)` with `g` a proper monic factor of `p`.
struct Ring {
    p: UPoly,
}

impl Ring {
    fn reduce(&self, a: &UPoly) -> UPoly {
        u_divrem(a, &self.p).1
    }

    fn mul(&self, a: &UPoly, b: &UPoly) -> UPoly {
        self.reduce(&u_mul(a, b))
    }

    fn inv(&self, a: &UPoly) -> Result<UPoly, UPoly> {
        let (g, s) = u_ext_gcd(a, &self.p);
        if g.len() == 1 {
            Ok(self.reduce(&s))
        } else {
            Err(g)
        }
    }

    fn trim(&self, f: &BPoly) -> BPoly {
        let mut r: BPoly = f.iter().map(|c| self.reduce(c)).collect();
        while r.last().is_some_and(|c| c.is_empty()) {
            r.pop();
        }
        r
    }

    fn monic(&self, f: &BPoly) -> Result<BPoly, UPoly> {
        let inv = self.inv(f.last().unwrap())?;
        Ok(f.iter().map(|c| self.mul(c, &inv)).collect())
    }

    fn sub(&self, a: &BPoly, b: &BPoly) -> BPoly {
        let e = Vec::new();
        let r: BPoly = (0..a.len().max(b.len()))
            .map(|i| u_sub(a.get(i).unwrap_or(&e), b.get(i).unwrap_or(&e)))
            .collect();
        self.trim(&r)
    }

    fn deriv(&self, f: &BPoly) -> BPoly {
        let r: BPoly = f
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| u_scale(c, &Q::from_integer(BigInt::from(k))))
            .collect();
        self.trim(&r)
    }

    /// Division by a monic divisor.
    fn divrem(&self, a: &BPoly, b: &BPoly) -> (BPoly, BPoly) {
        let mut r = self.trim(a);
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q: BPoly = vec![Vec::new(); r.len() - b.len() + 1];
        while r.len() >= b.len() {
            let k = r.len() - b.len();
            let c = r.last().unwrap().clone();
            for (i, y) in b.iter().enumerate() {
                r[i + k] = self.reduce(&u_sub(&r[i + k], &u_mul(&c, y)));
            }
            q[k] = c;
            r.pop();
            r = self.trim(&r);
        }
        (self.trim(&q), r)
    }

    fn gcd(&self, a: &BPoly, b: &BPoly) -> Result<BPoly, UPoly> {
        let mut a = self.monic(a)?;
        let mut b = self.trim(b);
        while !b.is_empty() {
            b = self.monic(&b)?;
            let r = self.divrem(&a, &b).1;
            a = std::mem::replace(&mut b, r);
        }
        Ok(a)
    }

    /// Squarefree factors `(s, j)` with `f = lc(f) prod s^j`.
    fn yun(&self, f: &BPoly) -> Result<Vec<(BPoly, usize)>, UPoly> {
        let f = self.monic(f)?;
        if f.len() <= 1 {
            return Ok(Vec::new());
        }
        let df = self.deriv(&f);
        let a0 = self.gcd(&f, &df)?;
        let mut b = self.divrem(&f, &a0).0;
        let mut c = self.divrem(&df, &a0).0;
        let mut d = self.sub(&c, &self.deriv(&b));
        let mut out = Vec::new();
        let mut i = 1;
        loop {
            let a = self.gcd(&b, &d)?;
            b = self.divrem(&b, &a).0;
            c = self.divrem(&d, &a).0;
            if a.len() > 1 {
                out.push((a, i));
            }
            if b.len() <= 1 {
                return Ok(out);
            }
            i += 1;
            d = self.sub(&c, &self.deriv(&b));
        }
    }
}

type Branch = (UPoly, Vec<(BPoly, usize)>);

fn decompose(p: UPoly, f: &BPoly) -> Result<Vec<Branch>, VerifyError> {
    let ring = Ring { p };
    let fr = ring.trim(f);
    if fr.is_empty() {
        let s: Vec<String> = ring.p.iter().map(|c| c.to_string()).collect();
        return Err(VerifyError::NotZeroDimensional(format!(
            "a root of [{}]",
            s.join(", ")
        )));
    }
    match ring.yun(&fr) {
        Ok(fs) => Ok(vec![(ring.p, fs)]),
        Err(g) => {
            let h = u_monic(&u_divrem(&ring.p, &g).0);
            let mut out = decompose(g, f)?;
            out.extend(decompose(h, f)?);
            Ok(out)
        }
    }
}

const P: usize = 512;

/// A complex number in fixed point with `P` fractional bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fx {
    re: BigInt,
    im: BigInt,
}

impl Fx {
    fn zero() -> Self {
        Fx {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }

    fn from_q(q: &Q) -> Self {
        Fx {
            re: (q.numer() << P).div_euclid_floor(q.denom()),
            im: BigInt::zero(),
        }
    }

    fn from_c64(z: Complex<f64>) -> Self {
        let f = |x: f64| {
            Q::from_float(x)
                .map(|q| Fx::from_q(&q).re)
                .unwrap_or_default()
        };
        Fx {
            re: f(z.re),
            im: f(z.im),
        }
    }

    fn from_dyadic(re: &Dyadic, im: &Dyadic) -> Self {
        let f = |d: &Dyadic| {
            let s = d.exponent() + P as i64;
            if s >= 0 {
                d.mantissa() << s as usize
            } else {
                d.mantissa() >> (-s) as usize
            }
        };
        Fx {
            re: f(re),
            im: f(im),
        }
    }

    pub fn to_c64(&self) -> Complex<f64> {
        let s = 2f64.powi(-(P as i32));
        Complex::new(
            self.re.to_f64().unwrap_or(f64::NAN) * s,
            self.im.to_f64().unwrap_or(f64::NAN) * s,
        )
    }

    fn add(&self, o: &Fx) -> Fx {
        Fx {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    fn sub(&self, o: &Fx) -> Fx {
        Fx {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    fn mul(&self, o: &Fx) -> Fx {
        Fx {
            re: (&self.re * &o.re - &self.im * &o.im) >> P,
            im: (&self.re * &o.im + &self.im * &o.re) >> P,
        }
    }

    /// Squared modulus scaled by `2^(2P)`.
    fn norm2(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    fn div(&self, o: &Fx) -> Option<Fx> {
        let den = o.norm2();
        if den.is_zero() {
            return None;
        }
        let nr = &self.re * &o.re + &self.im * &o.im;
        let ni = &self.im * &o.re - &self.re * &o.im;
        Some(Fx {
            re: (nr << P).div_euclid_floor(&den),
            im: (ni << P).div_euclid_floor(&den),
        })
    }

    fn one() -> Fx {
        Fx {
            re: BigInt::one() << P,
            im: BigInt::zero(),
        }
    }
}

trait DivFloor {
    fn div_euclid_floor(&self, d: &BigInt) -> BigInt;
}

impl DivFloor for BigInt {
    fn div_euclid_floor(&self, d: &BigInt) -> BigInt {
        num_integer::Integer::div_floor(self, d)
    }
}

fn eval(p: &[Fx], z: &Fx) -> (Fx, Fx) {
    let mut v = Fx::zero();
    let mut dv = Fx::zero();
    for c in p.iter().rev() {
        dv = dv.mul(z).add(&v);
        v = v.mul(z).add(c);
    }
    (v, dv)
}

fn initial_roots(p: &[Fx]) -> Vec<Complex<f64>> {
    let d = p.len() - 1;
    let lead = p[d].to_c64();
    let m = DMatrix::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -p[i].to_c64() / lead
        } else if i == j + 1 {
            Complex::new(1.0, 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    let eig = nalgebra::linalg::Schur::try_new(m, 1e-14, 10_000).and_then(|s| s.eigenvalues());
    let mut z: Vec<Complex<f64>> = match eig {
        Some(v) if v.iter().all(|x| x.re.is_finite() && x.im.is_finite()) => {
            v.iter().copied().collect()
        }
        _ => {
            let r = 1.0
                + p[..d]
                    .iter()
                    .map(|c| (c.to_c64() / lead).norm())
                    .fold(0.0, f64::max);
            (0..d)
                .map(|k| Complex::from_polar(r, 0.4 + std::f64::consts::TAU * k as f64 / d as f64))
                .collect()
        }
    };
    // distinct starting points
    for k in 0..d {
        for j in 0..k {
            if (z[k] - z[j]).norm() <= 1e-12 * (1.0 + z[k].norm()) {
                let r = 1e-6 * (1.0 + z[k].norm());
                z[k] += Complex::from_polar(r, k as f64);
            }
        }
    }
    z
}

/// Roots of a squarefree polynomial given by fixed-point coefficients.
fn roots(p: &[Fx]) -> Result<Vec<Fx>, VerifyError> {
    let mut p = p.to_vec();
    while p.last().is_some_and(|c| c.re.is_zero() && c.im.is_zero()) {
        p.pop();
    }
    if p.len() <= 1 {
        return Ok(Vec::new());
    }
    if p.len() == 2 {
        let r = p[0].div(&p[1]).ok_or(VerifyError::NoConvergence)?;
        return Ok(vec![Fx::zero().sub(&r)]);
    }
    let mut z: Vec<Fx> = initial_roots(&p).into_iter().map(Fx::from_c64).collect();
    // stop once every correction is below 2^(40-P)
    let tol = BigInt::one() << 80;
    for _ in 0..4000 {
        let mut worst = BigInt::zero();
        for k in 0..z.len() {
            let (v, dv) = eval(&p, &z[k]);
            if v.re.is_zero() && v.im.is_zero() {
                continue;
            }
            let n = match v.div(&dv) {
                Some(n) => n,
                None => {
                    z[k] = z[k].add(&Fx::from_c64(Complex::new(1e-9, 1e-9)));
                    worst = worst.max(BigInt::one() << (2 * P));
                    continue;
                }
            };
            let mut s = Fx::zero();
            for (j, zj) in z.iter().enumerate() {
                if j != k {
                    if let Some(t) = Fx::one().div(&z[k].sub(zj)) {
                        s = s.add(&t);
                    }
                }
            }
            let den = Fx::one().sub(&n.mul(&s));
            let w = n.div(&den).unwrap_or(n);
            worst = worst.max(w.norm2());
            z[k] = z[k].sub(&w);
        }
        if worst <= tol {
            return Ok(z);
        }
    }
    Err(VerifyError::NoConvergence)
}

/// A solution of the system with its fiber multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    point: Vec<Fx>,
    pub multiplicities: Vec<usize>,
}

impl Solution {
    pub fn total(&self) -> u64 {
        self.multiplicities.iter().map(|&m| m as u64).product()
    }

    pub fn approx(&self) -> Vec<Complex<f64>> {
        self.point.iter().map(Fx::to_c64).collect()
    }
}

fn rational_coeff(c: &crate::dyadic::OracleNumber) -> Result<Q, VerifyError> {
    if !c.is_real() {
        return Err(VerifyError::Unsupported("complex coefficients".into()));
    }
    c.re.as_rational()
        .ok_or_else(|| VerifyError::Unsupported(format!("coefficient {c} is not rational")))
}

/// All solutions of `sys` with exact multiplicities.
pub fn reference_solutions(sys: &TriangularSystem) -> Result<Vec<Solution>, VerifyError> {
    let n = sys.n();
    if n > MAX_VARIABLES {
        return Err(VerifyError::OracleTooExpensive(format!("{n} variables")));
    }
    if let Some(d) = sys
        .polys()
        .iter()
        .map(|p| p.max_degree())
        .max()
        .filter(|&d| d > MAX_DEGREE)
    {
        return Err(VerifyError::OracleTooExpensive(format!("degree {d}")));
    }
    let mut f1: BPoly = vec![Vec::new(); sys.poly(0).degree(0) as usize + 1];
    for t in sys.poly(0).terms() {
        f1[t.exps[0] as usize] = vec![rational_coeff(&t.coeff)?];
    }
    let rationals = Ring {
        p: vec![Q::zero(), Q::one()],
    };
    let level1: Vec<(UPoly, usize)> = rationals
        .yun(&rationals.trim(&f1))
        .expect("the rationals form a field")
        .into_iter()
        .map(|(s, m)| {
            let mut u: UPoly = s
                .into_iter()
                .map(|c| c.first().cloned().unwrap_or_else(Q::zero))
                .collect();
            trim(&mut u);
            (u, m)
        })
        .collect();
    let mut out = Vec::new();
    if n == 1 {
        for (q, m) in level1 {
            let c: Vec<Fx> = q.iter().map(Fx::from_q).collect();
            for a in roots(&c)? {
                out.push(Solution {
                    point: vec![a],
                    multiplicities: vec![m],
                });
            }
        }
        return Ok(out);
    }
    let g = sys.poly(1);
    let mut f2: BPoly = vec![Vec::new(); g.degree(1) as usize + 1];
    for t in g.terms() {
        let c = &mut f2[t.exps[1] as usize];
        let e = t.exps[0] as usize;
        if c.len() <= e {
            c.resize(e + 1, Q::zero());
        }
        c[e] = rational_coeff(&t.coeff)?;
    }
    for (q, m1) in level1 {
        for (p, factors) in decompose(u_monic(&q), &f2)? {
            let c: Vec<Fx> = p.iter().map(Fx::from_q).collect();
            for a in roots(&c)? {
                let mut fiber = Vec::new();
                for (s, m2) in &factors {
                    let coeffs: Vec<Fx> = s
                        .iter()
                        .map(|u| {
                            let uf: Vec<Fx> = u.iter().map(Fx::from_q).collect();
                            eval(&uf, &a).0
                        })
                        .collect();
                    for b in roots(&coeffs)? {
                        fiber.push((b, *m2));
                    }
                }
                for (b, m2) in fiber {
                    out.push(Solution {
                        point: vec![a.clone(), b],
                        multiplicities: vec![m1, m2],
                    });
                }
            }
        }
    }
    Ok(out)
}

fn in_disc(z: &Fx, d: &Disc, factor: i64) -> bool {
    let c = Fx::from_dyadic(&d.center.re, &d.center.im);
    let r = Fx::from_dyadic(&(&d.radius * &Dyadic::from_i64(factor)), &Dyadic::zero()).re;
    z.sub(&c).norm2() <= &r * &r
}

fn in_box(z: &Fx, b: &Box) -> bool {
    let c = Fx::from_dyadic(&b.center.re, &b.center.im);
    let h = Fx::from_dyadic(&b.width.shl(-1), &Dyadic::zero()).re;
    let d = z.sub(&c);
    d.re.abs() <= h && d.im.abs() <= h
}

fn discs_meet(a: &Disc, b: &Disc) -> bool {
    let s = &a.radius + &b.radius;
    a.center.dist2(&b.center) <= &s * &s
}

fn show(z: &Fx) -> String {
    let c = z.to_c64();
    format!("{:.6e}{:+.6e}i", c.re, c.im)
}

/// Outcome of comparing a result against the reference solutions.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub solutions: Vec<Solution>,
    pub problems: Vec<String>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Recomputes the cluster structure of `report` from the reference
/// solutions: per-level counts in each disc and its triple, totals, radii,
/// disjointness, and coverage of every solution in the region of interest.
pub fn verify(sys: &TriangularSystem, report: &Report) -> Result<Verdict, VerifyError> {
    let sols = reference_solutions(sys)?;
    let n = sys.n();
    let mut problems = Vec::new();
    if report.roi.dims() != n {
        problems.push(format!(
            "roi has {} components for {n} variables",
            report.roi.dims()
        ));
        return Ok(Verdict {
            solutions: sols,
            problems,
        });
    }
    let eps = Dyadic::pow2(report.epsilon_log2);
    // distinct z1 values and their multiplicities
    let mut firsts: Vec<(Fx, usize)> = Vec::new();
    for s in &sols {
        if !firsts.iter().any(|(a, _)| *a == s.point[0]) {
            firsts.push((s.point[0].clone(), s.multiplicities[0]));
        }
    }
    for (k, c) in report.clusters.iter().enumerate() {
        let pd = &c.polydisc.0;
        if pd.len() != n || c.multiplicities.len() != n {
            problems.push(format!("cluster {k}: dimension mismatch"));
            continue;
        }
        for (i, d) in pd.iter().enumerate() {
            if d.radius > eps {
                problems.push(format!(
                    "cluster {k}: radius {} at level {} exceeds epsilon",
                    d.radius.to_f64(),
                    i + 1
                ));
            }
        }
        let product: u64 = c.multiplicities.iter().map(|&m| m as u64).product();
        if product != c.total {
            problems.push(format!(
                "cluster {k}: total {} is not the product of {:?}",
                c.total, c.multiplicities
            ));
        }
        let count1 = |f: i64| -> usize {
            firsts
                .iter()
                .filter(|(a, _)| in_disc(a, &pd[0], f))
                .map(|(_, m)| m)
                .sum()
        };
        let (inner, outer) = (count1(1), count1(3));
        if inner != c.multiplicities[0] {
            problems.push(format!(
                "cluster {k}: level 1 multiplicity {} but the oracle counts {inner}",
                c.multiplicities[0]
            ));
        }
        if inner != outer {
            problems.push(format!(
                "cluster {k}: level 1 disc is not natural ({inner} inside, {outer} in its triple)"
            ));
        }
        if n == 2 {
            for (a, _) in firsts.iter().filter(|(a, _)| in_disc(a, &pd[0], 1)) {
                let count2 = |f: i64| -> usize {
                    sols.iter()
                        .filter(|s| s.point[0] == *a && in_disc(&s.point[1], &pd[1], f))
                        .map(|s| s.multiplicities[1])
                        .sum()
                };
                let (inner, outer) = (count2(1), count2(3));
                if inner != c.multiplicities[1] {
                    problems.push(format!(
                        "cluster {k}: level 2 multiplicity {} but the oracle counts {inner} over z1 = {}",
                        c.multiplicities[1],
                        show(a)
                    ));
                }
                if inner != outer {
                    problems.push(format!(
                        "cluster {k}: level 2 disc over z1 = {} is not natural ({inner} inside, {outer} in its triple)",
                        show(a)
                    ));
                }
            }
        }
        let total: u64 = sols
            .iter()
            .filter(|s| s.point.iter().zip(pd).all(|(z, d)| in_disc(z, d, 1)))
            .map(Solution::total)
            .sum();
        if total != c.total {
            problems.push(format!(
                "cluster {k}: total {} but the oracle counts {total}",
                c.total
            ));
        }
    }
    for (k, a) in report.clusters.iter().enumerate() {
        for (j, b) in report.clusters.iter().enumerate().skip(k + 1) {
            if a.polydisc
                .0
                .iter()
                .zip(&b.polydisc.0)
                .all(|(x, y)| discs_meet(x, y))
            {
                problems.push(format!("clusters {k} and {j} overlap"));
            }
        }
    }
    for s in &sols {
        if !s.point.iter().zip(&report.roi.0).all(|(z, b)| in_box(z, b)) {
            continue;
        }
        let covered = report.clusters.iter().any(|c| {
            s.point
                .iter()
                .zip(&c.polydisc.0)
                .all(|(z, d)| in_disc(z, d, 1))
        });
        if !covered {
            let p: Vec<String> = s.point.iter().map(show).collect();
            problems.push(format!(
                "solution ({}) in the roi is not in any cluster",
                p.join(", ")
            ));
        }
    }
    Ok(Verdict {
        solutions: sols,
        problems,
    })
}
