//! Exact coefficient field `ℚ(i)(α, b)`.
//!
//! Elements are reduced fractions of bivariate polynomials over the Gaussian
//! rationals. The background charge enters as `Q = b + 1/b`, so denominators in
//! `b` are routine and get a fast path; general denominators go through a
//! recursive primitive-PRS gcd over `ℚ(i)[b][α]`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::HemError;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Gaussian rational `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::new(rat(n, d), BigRational::zero())
    }

    pub fn int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn inv(&self) -> Result<Self, HemError> {
        let n = &self.re * &self.re + &self.im * &self.im;
        if n.is_zero() {
            return Err(HemError::DivisionByZero);
        }
        Ok(Self::new(&self.re / &n, -&self.im / &n))
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl Add for &GaussRational {
    type Output = GaussRational;
    fn add(self, o: &GaussRational) -> GaussRational {
        GaussRational::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &GaussRational {
    type Output = GaussRational;
    fn sub(self, o: &GaussRational) -> GaussRational {
        GaussRational::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &GaussRational {
    type Output = GaussRational;
    fn mul(self, o: &GaussRational) -> GaussRational {
        GaussRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for &GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational::new(-&self.re, -&self.im)
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rat(&self.re)),
            (true, false) => {
                if self.im.is_one() {
                    write!(f, "i")
                } else if (-&self.im).is_one() {
                    write!(f, "-i")
                } else {
                    write!(f, "{}*i", fmt_rat(&self.im))
                }
            }
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "({}{}{}*i)", fmt_rat(&self.re), sign, fmt_rat(&self.im.abs()))
            }
        }
    }
}

/// Exponents `(deg_α, deg_b)`.
pub type Exp2 = (u32, u32);

fn grlex(x: &Exp2, y: &Exp2) -> Ordering {
    (x.0 + x.1).cmp(&(y.0 + y.1)).then(x.0.cmp(&y.0))
}

/// Sparse polynomial in `(α, b)` over the Gaussian rationals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly2 {
    terms: BTreeMap<Exp2, GaussRational>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: GaussRational) -> Self {
        Self::monomial(c, (0, 0))
    }

    pub fn monomial(c: GaussRational, e: Exp2) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp2, &GaussRational)> {
        self.terms.iter()
    }

    fn add_term(&mut self, e: Exp2, c: GaussRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = &*v + &c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect() }
    }

    pub fn shift(&self, by: Exp2) -> Self {
        Self { terms: self.terms.iter().map(|(e, v)| ((e.0 + by.0, e.1 + by.1), v.clone())).collect() }
    }

    /// Divides by the monomial `α^e.0 b^e.1`; caller guarantees divisibility.
    fn unshift(&self, by: Exp2) -> Self {
        Self { terms: self.terms.iter().map(|(e, v)| ((e.0 - by.0, e.1 - by.1), v.clone())).collect() }
    }

    pub fn leading(&self) -> Option<(&Exp2, &GaussRational)> {
        self.terms.iter().max_by(|x, y| grlex(x.0, y.0))
    }

    pub fn as_monomial(&self) -> Option<(Exp2, &GaussRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (*e, c))
        } else {
            None
        }
    }

    fn min_exps(&self) -> Exp2 {
        let a = self.terms.keys().map(|e| e.0).min().unwrap_or(0);
        let b = self.terms.keys().map(|e| e.1).min().unwrap_or(0);
        (a, b)
    }

    pub fn deg_alpha(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.0).max()
    }

    pub fn eval(&self, alpha: Complex64, b: Complex64) -> (Complex64, f64) {
        let mut s = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for (e, c) in &self.terms {
            let t = c.to_c64() * alpha.powu(e.0) * b.powu(e.1);
            scale += t.norm();
            s += t;
        }
        (s, scale)
    }

    fn to_rec(&self) -> Vec<Poly1> {
        let n = self.deg_alpha().map_or(0, |d| d as usize + 1);
        let mut out = vec![Poly1::zero(); n];
        for (e, c) in &self.terms {
            out[e.0 as usize].set(e.1 as usize, c.clone());
        }
        out
    }

    fn from_rec(r: &[Poly1]) -> Self {
        let mut p = Self::zero();
        for (i, q) in r.iter().enumerate() {
            for (j, c) in q.0.iter().enumerate() {
                p.add_term((i as u32, j as u32), c.clone());
            }
        }
        p
    }
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, o: &Poly2) -> Poly2 {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, c.clone());
        }
        r
    }
}

impl Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, o: &Poly2) -> Poly2 {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, -c);
        }
        r
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, o: &Poly2) -> Poly2 {
        let mut r = Poly2::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                r.add_term((e1.0 + e2.0, e1.1 + e2.1), c1 * c2);
            }
        }
        r
    }
}

impl Neg for &Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        Poly2 { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

/// Dense univariate polynomial in `b`, low degree first, no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Poly1(Vec<GaussRational>);

impl Poly1 {
    fn zero() -> Self {
        Self(Vec::new())
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(GaussRational::is_zero) {
            self.0.pop();
        }
        self
    }

    fn set(&mut self, i: usize, c: GaussRational) {
        if self.0.len() <= i {
            self.0.resize(i + 1, GaussRational::zero());
        }
        self.0[i] = c;
    }

    fn deg(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn lc(&self) -> &GaussRational {
        self.0.last().expect("lc of zero polynomial")
    }

    fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let z = GaussRational::zero();
        Self((0..n).map(|i| self.0.get(i).unwrap_or(&z) - o.0.get(i).unwrap_or(&z)).collect()).trim()
    }

    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut r = vec![GaussRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                r[i + j] = &r[i + j] + &(a * b);
            }
        }
        Self(r).trim()
    }

    fn scale(&self, c: &GaussRational) -> Self {
        Self(self.0.iter().map(|x| x * c).collect()).trim()
    }

    fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.deg().expect("division by zero polynomial");
        let inv = d.lc().inv().expect("nonzero leading coefficient");
        let mut r = self.clone();
        let mut q = Self::zero();
        while let Some(rd) = r.deg() {
            if rd < dd {
                break;
            }
            let c = r.lc() * &inv;
            let shift = rd - dd;
            q.set(shift, c.clone());
            let mut t = vec![GaussRational::zero(); shift];
            t.extend(d.0.iter().map(|x| x * &c));
            r = r.sub(&Self(t));
        }
        (q.trim(), r)
    }

    fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lc().inv().expect("nonzero");
        self.scale(&inv)
    }

    fn gcd(a: &Self, b: &Self) -> Self {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = x.divrem(&y);
            x = y;
            y = r;
        }
        x.monic()
    }
}

type Rec = Vec<Poly1>;

fn rec_trim(mut r: Rec) -> Rec {
    while r.last().is_some_and(Poly1::is_zero) {
        r.pop();
    }
    r
}

fn rec_content(r: &Rec) -> Poly1 {
    r.iter().fold(Poly1::zero(), |g, c| if c.is_zero() { g } else { Poly1::gcd(&g, c) })
}

fn rec_div_scalar(r: &Rec, d: &Poly1) -> Rec {
    r.iter()
        .map(|c| {
            let (q, rem) = c.divrem(d);
            debug_assert!(rem.is_zero());
            q
        })
        .collect()
}

fn rec_primitive(r: &Rec) -> Rec {
    let c = rec_content(r);
    if c.is_zero() {
        return r.clone();
    }
    rec_div_scalar(r, &c)
}

/// Pseudo-remainder of `a` by `b` in `R[α]`, `R = ℚ(i)[b]`.
fn rec_prem(a: &Rec, b: &Rec) -> Rec {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.clone();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut next: Rec = r.iter().map(|c| c.mul(lb)).collect();
        for (i, c) in b.iter().enumerate() {
            next[i + shift] = next[i + shift].sub(&c.mul(&lr));
        }
        r = rec_trim(next);
    }
    r
}

fn rec_gcd(a: &Rec, b: &Rec) -> Rec {
    if a.is_empty() {
        return b.clone();
    }
    if b.is_empty() {
        return a.clone();
    }
    let g = Poly1::gcd(&rec_content(a), &rec_content(b));
    let (mut x, mut y) = (rec_primitive(a), rec_primitive(b));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = rec_prem(&x, &y);
        x = y;
        y = if r.is_empty() { r } else { rec_primitive(&r) };
    }
    x.iter().map(|c| c.mul(&g)).collect()
}

/// Exact quotient `a / b` in `R[α]`; `None` when `b` does not divide `a`.
fn rec_div_exact(a: &Rec, b: &Rec) -> Option<Rec> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.clone();
    let mut q: Rec = vec![Poly1::zero(); a.len().saturating_sub(db)];
    while !r.is_empty() {
        if r.len() <= db {
            return None;
        }
        let dr = r.len() - 1;
        let (c, rem) = r[dr].divrem(lb);
        if !rem.is_zero() {
            return None;
        }
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] = r[i + shift].sub(&bc.mul(&c));
        }
        q[shift] = c;
        r = rec_trim(r);
    }
    Some(rec_trim(q))
}

/// Element of `ℚ(i)(α, b)` in canonical reduced form.
///
/// The denominator is monic with respect to graded-lex order on `(α, b)`
/// and coprime to the numerator.
#[derive(Clone, Debug)]
pub struct Coef {
    num: Poly2,
    den: Poly2,
}

impl Coef {
    pub fn zero() -> Self {
        Self { num: Poly2::zero(), den: Poly2::constant(GaussRational::one()) }
    }

    pub fn one() -> Self {
        Self::from_gauss(GaussRational::one())
    }

    pub fn from_gauss(c: GaussRational) -> Self {
        Self { num: Poly2::constant(c), den: Poly2::constant(GaussRational::one()) }
    }

    pub fn int(n: i64) -> Self {
        Self::from_gauss(GaussRational::int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::from_gauss(GaussRational::from_ratio(n, d))
    }

    /// `i/2`, the Heisenberg normalization.
    pub fn half_i() -> Self {
        Self::from_gauss(GaussRational::new(BigRational::zero(), rat(1, 2)))
    }

    pub fn i() -> Self {
        Self::from_gauss(GaussRational::i())
    }

    pub fn alpha() -> Self {
        Self::from_poly(Poly2::monomial(GaussRational::one(), (1, 0)))
    }

    pub fn b() -> Self {
        Self::from_poly(Poly2::monomial(GaussRational::one(), (0, 1)))
    }

    /// `Q = b + 1/b`.
    pub fn q() -> Self {
        let num = &Poly2::monomial(GaussRational::one(), (0, 2)) + &Poly2::constant(GaussRational::one());
        Self::new(num, Poly2::monomial(GaussRational::one(), (0, 1))).expect("nonzero")
    }

    /// `c_L = 1 + 6Q²`.
    pub fn central_charge() -> Self {
        let q = Self::q();
        &Self::one() + &(&Self::int(6) * &(&q * &q))
    }

    /// `Δ_α = (α/2)(Q − α/2)`.
    pub fn delta_alpha() -> Self {
        let half_a = &Self::alpha() * &Self::ratio(1, 2);
        &half_a * &(&Self::q() - &half_a)
    }

    /// `α_{1,2} = −1/b`.
    pub fn alpha_12() -> Self {
        -&Self::b().inv().expect("b is nonzero")
    }

    /// `α_{2,1} = −b`.
    pub fn alpha_21() -> Self {
        -&Self::b()
    }

    /// `α_{r,s} = (1−r)b + (1−s)/b`, or `2Q − α_{r,s}` for the plus sign.
    pub fn kac(label: crate::params::KacLabel) -> Self {
        let b = Self::b();
        let minus = &(&Self::int(1 - label.r as i64) * &b)
            + &(&Self::int(1 - label.s as i64) * &b.inv().expect("b is nonzero"));
        match label.sign {
            crate::params::KacSign::Minus => minus,
            crate::params::KacSign::Plus => &(&Self::int(2) * &Self::q()) - &minus,
        }
    }

    pub fn from_poly(p: Poly2) -> Self {
        Self { num: p, den: Poly2::constant(GaussRational::one()) }
    }

    pub fn new(num: Poly2, den: Poly2) -> Result<Self, HemError> {
        if den.is_zero() {
            return Err(HemError::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    pub fn numer(&self) -> &Poly2 {
        &self.num
    }

    pub fn denom(&self) -> &Poly2 {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn normalized(num: Poly2, den: Poly2) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (num, den) = if let Some((e, _)) = den.as_monomial() {
            let m = num.min_exps();
            let common = (m.0.min(e.0), m.1.min(e.1));
            (num.unshift(common), den.unshift(common))
        } else {
            let (nr, dr) = (num.to_rec(), den.to_rec());
            let g = rec_gcd(&nr, &dr);
            if g.len() <= 1 && g.first().is_none_or(|c| c.deg() == Some(0)) {
                (num, den)
            } else {
                let n = rec_div_exact(&nr, &g).expect("gcd divides numerator");
                let d = rec_div_exact(&dr, &g).expect("gcd divides denominator");
                (Poly2::from_rec(&n), Poly2::from_rec(&d))
            }
        };
        let lc = den.leading().expect("nonzero denominator").1.inv().expect("nonzero");
        Self { num: num.scale(&lc), den: den.scale(&lc) }
    }

    pub fn inv(&self) -> Result<Self, HemError> {
        if self.is_zero() {
            return Err(HemError::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, o: &Self) -> Result<Self, HemError> {
        Ok(self * &o.inv()?)
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// True when no coefficient carries an imaginary part.
    pub fn is_real(&self) -> bool {
        self.num.terms().all(|(_, c)| c.is_real()) && self.den.terms().all(|(_, c)| c.is_real())
    }

    /// Numerical value at `(α, b)`.
    pub fn eval(&self, alpha: Complex64, b: Complex64) -> Result<Complex64, HemError> {
        let (d, scale) = self.den.eval(alpha, b);
        if d.norm() <= 1e-13 * scale.max(1e-300) {
            return Err(HemError::PoleAtSubstitution(self.to_string()));
        }
        Ok(self.num.eval(alpha, b).0 / d)
    }

    /// Substitutes `α := value` symbolically.
    pub fn subs_alpha(&self, value: &Coef) -> Result<Self, HemError> {
        let horner = |p: &Poly2| -> Coef {
            let rec = p.to_rec();
            let mut acc = Coef::zero();
            for c in rec.iter().rev() {
                let cb = Coef::from_poly(Poly2::from_rec(std::slice::from_ref(c)));
                acc = &(&acc * value) + &cb;
            }
            acc
        };
        horner(&self.num).div(&horner(&self.den)).map_err(|_| HemError::PoleAtSubstitution(self.to_string()))
    }
}

impl PartialEq for Coef {
    fn eq(&self, o: &Self) -> bool {
        (&self.num * &o.den) == (&o.num * &self.den)
    }
}

impl Eq for Coef {}

fn add_coef(x: &Coef, y: &Coef, negate: bool) -> Coef {
    let yn = if negate { -&y.num } else { y.num.clone() };
    if x.den == y.den {
        return Coef::normalized(&x.num + &yn, x.den.clone());
    }
    if let (Some((ex, cx)), Some((ey, cy))) = (x.den.as_monomial(), y.den.as_monomial()) {
        let l = (ex.0.max(ey.0), ex.1.max(ey.1));
        let nx = x.num.shift((l.0 - ex.0, l.1 - ex.1)).scale(&cx.inv().expect("nonzero"));
        let ny = yn.shift((l.0 - ey.0, l.1 - ey.1)).scale(&cy.inv().expect("nonzero"));
        return Coef::normalized(&nx + &ny, Poly2::monomial(GaussRational::one(), l));
    }
    Coef::normalized(&(&x.num * &y.den) + &(&yn * &x.den), &x.den * &y.den)
}

impl Add for &Coef {
    type Output = Coef;
    fn add(self, o: &Coef) -> Coef {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        add_coef(self, o, false)
    }
}

impl Sub for &Coef {
    type Output = Coef;
    fn sub(self, o: &Coef) -> Coef {
        if o.is_zero() {
            return self.clone();
        }
        add_coef(self, o, true)
    }
}

impl Mul for &Coef {
    type Output = Coef;
    fn mul(self, o: &Coef) -> Coef {
        if self.is_zero() || o.is_zero() {
            return Coef::zero();
        }
        Coef::normalized(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Neg for &Coef {
    type Output = Coef;
    fn neg(self) -> Coef {
        Coef { num: -&self.num, den: self.den.clone() }
    }
}

fn fmt_poly(p: &Poly2) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut terms: Vec<(&Exp2, &GaussRational)> = p.terms().collect();
    terms.sort_by(|x, y| grlex(y.0, x.0));
    let mut out = String::new();
    for (k, (e, c)) in terms.into_iter().enumerate() {
        let mut vars = Vec::new();
        for (name, d) in [("a", e.0), ("b", e.1)] {
            match d {
                0 => {}
                1 => vars.push(name.to_string()),
                _ => vars.push(format!("{name}^{d}")),
            }
        }
        let neg = c.is_real() && c.re.is_negative();
        let mag = if neg { -c } else { c.clone() };
        let body = if vars.is_empty() {
            mag.to_string()
        } else if mag.is_one() {
            vars.join("*")
        } else {
            format!("{}*{}", mag, vars.join("*"))
        };
        if k == 0 {
            out.push_str(if neg { "-" } else { "" });
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

/// Plain-text form, e.g. `(2*a^2*b + 2*a)/b`.
impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = fmt_poly(&self.num);
        if self.den.as_monomial().is_some_and(|(e, c)| e == (0, 0) && c.is_one()) {
            return write!(f, "{n}");
        }
        let n = if self.num.terms().count() > 1 { format!("({n})") } else { n };
        let d = fmt_poly(&self.den);
        if self.den.terms().count() > 1 {
            write!(f, "{n}/({d})")
        } else {
            write!(f, "{n}/{d}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kac_coef_matches_numeric_momentum() {
        use crate::params::{kac_alpha, KacLabel, Params};
        let p = Params::with_gamma(0.9).unwrap();
        for s in ["1,2", "2,1", "3,2,+", "2,3"] {
            let l: KacLabel = s.parse().unwrap();
            let exact = Coef::kac(l).eval(Complex64::new(0.0, 0.0), Complex64::new(0.45, 0.0)).unwrap().re;
            assert!((exact - kac_alpha(l, &p)).abs() < 1e-13, "{s}");
        }
        assert_eq!(Coef::kac("1,2".parse().unwrap()), Coef::alpha_12());
        assert_eq!(Coef::kac("2,1".parse().unwrap()), Coef::alpha_21());
    }

    fn poly(terms: &[((u32, u32), i64)]) -> Poly2 {
        let mut p = Poly2::zero();
        for (e, c) in terms {
            p.add_term(*e, GaussRational::int(*c));
        }
        p
    }

    #[test]
    fn q_and_kac_values() {
        let q = Coef::q();
        assert_eq!(q.to_string(), "(b^2 + 1)/b");
        let s = &Coef::alpha_12() + &Coef::alpha_21();
        assert_eq!(s, -&q);
        assert_eq!(&Coef::alpha_12() * &Coef::alpha_21(), Coef::one());
    }

    #[test]
    fn general_gcd_cancels() {
        // (a+b)(a-b) / (a+b)^2 = (a-b)/(a+b)
        let apb = poly(&[((1, 0), 1), ((0, 1), 1)]);
        let amb = poly(&[((1, 0), 1), ((0, 1), -1)]);
        let c = Coef::new(&apb * &amb, &apb * &apb).unwrap();
        assert_eq!(c.numer(), &amb);
        assert_eq!(c.denom(), &apb);
    }

    #[test]
    fn gcd_with_b_content() {
        // b(a+1)(a+b) / (b^2 (a+b)) = (a+1)/b
        let a1 = poly(&[((1, 0), 1), ((0, 0), 1)]);
        let apb = poly(&[((1, 0), 1), ((0, 1), 1)]);
        let num = &(&a1 * &apb) * &poly(&[((0, 1), 1)]);
        let den = &apb * &poly(&[((0, 2), 1)]);
        let c = Coef::new(num, den).unwrap();
        assert_eq!(c.denom(), &poly(&[((0, 1), 1)]));
        assert_eq!(c.numer(), &a1);
    }

    #[test]
    fn subs_alpha_at_kac_point() {
        // α² + αQ + 1 vanishes at α = −b and at α = −1/b.
        let a = Coef::alpha();
        let f = &(&(&a * &a) + &(&a * &Coef::q())) + &Coef::one();
        assert!(f.subs_alpha(&Coef::alpha_21()).unwrap().is_zero());
        assert!(f.subs_alpha(&Coef::alpha_12()).unwrap().is_zero());
        assert!(!f.subs_alpha(&Coef::one()).unwrap().is_zero());
    }

    #[test]
    fn eval_and_pole_detection() {
        let q = Coef::q();
        let v = q.eval(Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)).unwrap();
        assert!((v.re - 2.5).abs() < 1e-15);
        let r = q.eval(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        assert!(matches!(r, Err(HemError::PoleAtSubstitution(_))));
    }

    #[test]
    fn inverse_of_zero_errors() {
        assert_eq!(Coef::zero().inv(), Err(HemError::DivisionByZero));
    }

    fn small_coef() -> impl Strategy<Value = Coef> {
        (prop::collection::vec((0u32..3, 0u32..3, -4i64..5, -3i64..4), 1..4), 0u32..3, -3i64..4).prop_map(
            |(ts, bpow, shift)| {
                let mut n = Poly2::zero();
                for (ea, eb, re, im) in ts {
                    n.add_term((ea, eb), GaussRational::new(rat(re, 1), rat(im, 1)));
                }
                let mut d = poly(&[((0, bpow), 1)]);
                if shift != 0 {
                    d = &d + &poly(&[((1, 0), shift)]);
                }
                Coef::new(n, d).unwrap()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn field_axioms(x in small_coef(), y in small_coef(), z in small_coef()) {
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert!((&x - &x).is_zero());
            if !x.is_zero() {
                prop_assert_eq!(&x * &x.inv().unwrap(), Coef::one());
            }
        }

        #[test]
        fn canonical_form_is_unique(x in small_coef(), y in small_coef()) {
            let s = &x + &y;
            let t = &(&x * &Coef::int(2)) + &(&y - &x);
            prop_assert_eq!(s.numer(), t.numer());
            prop_assert_eq!(s.denom(), t.denom());
        }

        #[test]
        fn eval_is_homomorphic(x in small_coef(), y in small_coef(), a in 0.3f64..1.7, bb in 0.3f64..1.7) {
            let (al, b) = (Complex64::new(a, 0.1), Complex64::new(bb, -0.2));
            if let (Ok(vx), Ok(vy), Ok(vp)) = (x.eval(al, b), y.eval(al, b), (&x * &y).eval(al, b)) {
                prop_assert!((vx * vy - vp).norm() <= 1e-9 * (1.0 + vp.norm()));
            }
        }
    }
}
