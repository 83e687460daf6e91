//! Exact Fock-space polynomials with Heisenberg and Sugawara–Virasoro actions.
//!
//! Bulk sector: `ℂ[φ_n, φ̄_n]` with two commuting representations (holomorphic
//! `A_n, L_n` and antiholomorphic `Ã_n, L̃_n`). Boundary sector: `ℝ[φ_n]` with a
//! single representation. Coefficients live in [`Coef`] with formal `α` and `b`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coef::Coef;
use crate::error::HemError;
use crate::params::Partition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Bulk,
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Holo,
    Antiholo,
}

impl Side {
    fn flip(self) -> Self {
        match self {
            Side::Holo => Side::Antiholo,
            Side::Antiholo => Side::Holo,
        }
    }
}

/// Fock coordinate `φ_n` or `φ̄_n` (`n ≥ 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FockVar {
    Phi(u32),
    PhiBar(u32),
}

impl FockVar {
    fn of_side(side: Side, n: u32) -> Self {
        match side {
            Side::Holo => FockVar::Phi(n),
            Side::Antiholo => FockVar::PhiBar(n),
        }
    }

    fn mode(self) -> u32 {
        match self {
            FockVar::Phi(n) | FockVar::PhiBar(n) => n,
        }
    }

    /// Slot in the exponent vector; interleaves `φ_1, φ̄_1, φ_2, φ̄_2, …` in the bulk.
    fn slot(self, sector: Sector) -> usize {
        match (sector, self) {
            (Sector::Bulk, FockVar::Phi(n)) => 2 * (n as usize - 1),
            (Sector::Bulk, FockVar::PhiBar(n)) => 2 * (n as usize - 1) + 1,
            (Sector::Boundary, FockVar::Phi(n)) => n as usize - 1,
            (Sector::Boundary, FockVar::PhiBar(_)) => unreachable!("boundary has no antiholomorphic modes"),
        }
    }

    fn from_slot(sector: Sector, k: usize) -> Self {
        match sector {
            Sector::Bulk if k.is_multiple_of(2) => FockVar::Phi(k as u32 / 2 + 1),
            Sector::Bulk => FockVar::PhiBar(k as u32 / 2 + 1),
            Sector::Boundary => FockVar::Phi(k as u32 + 1),
        }
    }
}

impl fmt::Display for FockVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FockVar::Phi(n) => write!(f, "phi{n}"),
            FockVar::PhiBar(n) => write!(f, "phibar{n}"),
        }
    }
}

/// Exponent vector over the sector's slot ordering, without trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    fn trimmed(mut v: Vec<u32>) -> Self {
        while v.last() == Some(&0) {
            v.pop();
        }
        Self(v)
    }

    pub fn from_vars(sector: Sector, vars: &[(FockVar, u32)]) -> Self {
        let mut v = Vec::new();
        for (x, e) in vars {
            let k = x.slot(sector);
            if v.len() <= k {
                v.resize(k + 1, 0);
            }
            v[k] += e;
        }
        Self::trimmed(v)
    }

    pub fn degree_in(&self, sector: Sector, x: FockVar) -> u32 {
        self.0.get(x.slot(sector)).copied().unwrap_or(0)
    }

    /// `Σ n·(deg φ_n + deg φ̄_n)`.
    pub fn level(&self, sector: Sector) -> u32 {
        self.0
            .iter()
            .enumerate()
            .map(|(k, e)| FockVar::from_slot(sector, k).mode() * e)
            .sum()
    }

    fn with_delta(&self, sector: Sector, x: FockVar, d: i32) -> Self {
        let k = x.slot(sector);
        let mut v = self.0.clone();
        if v.len() <= k {
            v.resize(k + 1, 0);
        }
        v[k] = (v[k] as i32 + d) as u32;
        Self::trimmed(v)
    }

    pub fn render(&self, sector: Sector) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(k, e)| {
                let x = FockVar::from_slot(sector, k);
                if *e == 1 {
                    x.to_string()
                } else {
                    format!("{x}^{e}")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// Polynomial in Fock variables with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockPoly {
    sector: Sector,
    terms: BTreeMap<Monomial, Coef>,
}

impl FockPoly {
    pub fn zero(sector: Sector) -> Self {
        Self { sector, terms: BTreeMap::new() }
    }

    /// The vacuum `𝟙`.
    pub fn one(sector: Sector) -> Self {
        Self::term(sector, Monomial::one(), Coef::one())
    }

    pub fn term(sector: Sector, m: Monomial, c: Coef) -> Self {
        let mut p = Self::zero(sector);
        p.add_term(m, c);
        p
    }

    pub fn var(sector: Sector, x: FockVar) -> Self {
        Self::term(sector, Monomial::from_vars(sector, &[(x, 1)]), Coef::one())
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coef)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Coef {
        self.terms.get(m).cloned().unwrap_or_else(Coef::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: Coef) {
        if c.is_zero() {
            return;
        }
        if let Some(v) = self.terms.get_mut(&m) {
            let s = &*v + &c;
            if s.is_zero() {
                self.terms.remove(&m);
            } else {
                *v = s;
            }
        } else {
            self.terms.insert(m, c);
        }
    }

    fn accumulate(&mut self, o: &FockPoly) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add(&self, o: &FockPoly) -> FockPoly {
        let mut r = self.clone();
        r.accumulate(o);
        r
    }

    pub fn sub(&self, o: &FockPoly) -> FockPoly {
        self.add(&o.scale(&Coef::int(-1)))
    }

    pub fn scale(&self, c: &Coef) -> FockPoly {
        if c.is_zero() {
            return Self::zero(self.sector);
        }
        Self { sector: self.sector, terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn mul(&self, o: &FockPoly) -> FockPoly {
        let mut r = Self::zero(self.sector);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let n = m1.0.len().max(m2.0.len());
                let v = (0..n).map(|k| m1.0.get(k).unwrap_or(&0) + m2.0.get(k).unwrap_or(&0)).collect();
                r.add_term(Monomial::trimmed(v), c1 * c2);
            }
        }
        r
    }

    /// Highest monomial level; 0 for constants and the zero polynomial.
    pub fn level(&self) -> u32 {
        self.terms.keys().map(|m| m.level(self.sector)).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|m| m.level(self.sector));
        match it.next() {
            None => true,
            Some(l) => it.all(|x| x == l),
        }
    }

    fn derivative(&self, x: FockVar) -> FockPoly {
        let mut r = Self::zero(self.sector);
        for (m, c) in &self.terms {
            let e = m.degree_in(self.sector, x);
            if e > 0 {
                r.add_term(m.with_delta(self.sector, x, -1), c * &Coef::int(e as i64));
            }
        }
        r
    }

    fn times_var(&self, x: FockVar, c: &Coef) -> FockPoly {
        let mut r = Self::zero(self.sector);
        for (m, v) in &self.terms {
            r.add_term(m.with_delta(self.sector, x, 1), v * c);
        }
        r
    }

    /// Symbolic substitution `α := value`.
    pub fn subs_alpha(&self, value: &Coef) -> Result<FockPoly, HemError> {
        let mut r = Self::zero(self.sector);
        for (m, c) in &self.terms {
            r.add_term(m.clone(), c.subs_alpha(value)?);
        }
        Ok(r)
    }

    /// True when every coefficient is free of `i`.
    pub fn is_i_free(&self) -> bool {
        self.terms.values().all(Coef::is_real)
    }

    /// Canonical JSON form `{monomial: coefficient}`.
    pub fn to_json(&self) -> serde_json::Value {
        let map: BTreeMap<String, String> =
            self.terms.iter().map(|(m, c)| (m.render(self.sector), c.to_string())).collect();
        serde_json::to_value(map).expect("string map serializes")
    }

    fn sorted_terms(&self) -> Vec<(&Monomial, &Coef)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|x, y| {
            let (lx, ly) = (x.0.level(self.sector), y.0.level(self.sector));
            ly.cmp(&lx).then_with(|| y.0.cmp(x.0))
        });
        v
    }
}

/// Infix form such as `(2*a*b^2 + 2*a + 2*b)/b*phi2 - phi1^2`.
impl fmt::Display for FockPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.sorted_terms() {
            let cs = c.to_string();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) if !rest.contains(' ') => (true, rest.to_string()),
                _ => (false, cs.clone()),
            };
            let mag = if mag.contains(' ') && !mag.starts_with('(') { format!("({mag})") } else { mag };
            let mono = m.render(self.sector);
            let body = match (mag.as_str(), mono.as_str()) {
                (_, "1") => mag.clone(),
                ("1", _) => mono.clone(),
                _ => format!("{mag}*{mono}"),
            };
            if first {
                write!(f, "{}{}", if neg { "-" } else { "" }, body)?;
            } else {
                write!(f, " {} {}", if neg { '-' } else { '+' }, body)?;
            }
            first = false;
        }
        Ok(())
    }
}

fn check_side(sector: Sector, side: Side) -> Result<(), HemError> {
    if sector == Sector::Boundary && side == Side::Antiholo {
        return Err(HemError::SectorMismatch("antiholomorphic operator requested in the boundary sector".into()));
    }
    Ok(())
}

/// Heisenberg mode `A_n` (holo) or `Ã_n` (antiholo) with `A_0 = (i/2)α`.
pub fn apply_heisenberg(n: i32, side: Side, p: &FockPoly) -> Result<FockPoly, HemError> {
    check_side(p.sector, side)?;
    let half_i = Coef::half_i();
    Ok(match n.cmp(&0) {
        std::cmp::Ordering::Equal => p.scale(&(&half_i * &Coef::alpha())),
        std::cmp::Ordering::Greater => p.derivative(FockVar::of_side(side, n as u32)).scale(&half_i),
        std::cmp::Ordering::Less => {
            let m = n.unsigned_abs();
            let d = match p.sector {
                Sector::Bulk => p.derivative(FockVar::of_side(side.flip(), m)),
                Sector::Boundary => p.derivative(FockVar::Phi(m)),
            };
            let mult = p.times_var(FockVar::of_side(side, m), &Coef::int(-2 * m as i64));
            d.add(&mult).scale(&half_i)
        }
    })
}

/// Sugawara mode `L_n` (holo) or `L̃_n` (antiholo).
///
/// The quadratic sum runs over `|m| ≤ level(p) + |n| + 1`; beyond `level + |n|`
/// every term annihilates `p` because the creation part produces a variable that
/// the paired annihilation derivative cannot reach.
pub fn apply_virasoro(n: i32, side: Side, p: &FockPoly) -> Result<FockPoly, HemError> {
    check_side(p.sector, side)?;
    let bound = (p.level() + n.unsigned_abs() + 1) as i32;
    apply_virasoro_bounded(n, side, p, bound)
}

pub(crate) fn apply_virasoro_bounded(n: i32, side: Side, p: &FockPoly, bound: i32) -> Result<FockPoly, HemError> {
    let a = |k: i32, q: &FockPoly| apply_heisenberg(k, side, q);
    let mut out = FockPoly::zero(p.sector);
    if n == 0 {
        out.accumulate(&p.scale(&Coef::delta_alpha()));
        for m in 1..=bound {
            let t = a(-m, &a(m, p)?)?;
            out.accumulate(&t.scale(&Coef::int(2)));
        }
        return Ok(out);
    }
    let lin = &Coef::i() * &(&Coef::alpha() - &(&Coef::int(n as i64 + 1) * &Coef::q()));
    out.accumulate(&a(n, p)?.scale(&lin));
    for m in -bound..=bound {
        if m == 0 || m == n {
            continue;
        }
        let inner = a(m, p)?;
        if inner.is_zero() {
            continue;
        }
        out.accumulate(&a(n - m, &inner)?);
    }
    Ok(out)
}

/// Generator of an operator word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    A(i32, Side),
    L(i32, Side),
}

/// Linear combination of operator words, each applied right to left.
#[derive(Clone, Debug)]
pub struct OperatorExpr {
    words: Vec<(Coef, Vec<Generator>)>,
}

impl OperatorExpr {
    pub fn word(c: Coef, gens: Vec<Generator>) -> Self {
        Self { words: vec![(c, gens)] }
    }

    pub fn plus(mut self, o: OperatorExpr) -> Self {
        self.words.extend(o.words);
        self
    }

    /// `S⁰ = α² L_{−2} + L_{−1}²` on the given side.
    pub fn singular_level2(side: Side) -> Self {
        let a2 = Coef::alpha().pow(2);
        Self::word(a2, vec![Generator::L(-2, side)])
            .plus(Self::word(Coef::one(), vec![Generator::L(-1, side), Generator::L(-1, side)]))
    }

    /// `L_{−ν} = L_{−ν_ℓ} ⋯ L_{−ν_1}`.
    pub fn descendant(nu: &Partition, side: Side) -> Self {
        let gens = nu.parts().iter().rev().map(|&k| Generator::L(-(k as i32), side)).collect();
        Self::word(Coef::one(), gens)
    }

    pub fn apply(&self, p: &FockPoly) -> Result<FockPoly, HemError> {
        let mut out = FockPoly::zero(p.sector);
        for (c, gens) in &self.words {
            let mut q = p.clone();
            for g in gens.iter().rev() {
                q = match *g {
                    Generator::A(n, s) => apply_heisenberg(n, s, &q)?,
                    Generator::L(n, s) => apply_virasoro(n, s, &q)?,
                };
            }
            out.accumulate(&q.scale(c));
        }
        Ok(out)
    }
}

/// `Q_{α,ν,ν̃} = L_{−ν} L̃_{−ν̃} 𝟙`.
pub fn descendant(nu: &Partition, nu_tilde: &Partition, sector: Sector) -> Result<FockPoly, HemError> {
    if sector == Sector::Boundary && !nu_tilde.is_empty() {
        return Err(HemError::SectorMismatch("boundary descendants take no antiholomorphic partition".into()));
    }
    let mut p = FockPoly::one(sector);
    if sector == Sector::Bulk {
        p = OperatorExpr::descendant(nu_tilde, Side::Antiholo).apply(&p)?;
    }
    let p = OperatorExpr::descendant(nu, Side::Holo).apply(&p)?;
    debug_assert!(p.is_zero() || p.level() == nu.level() + nu_tilde.level());
    Ok(p)
}

/// `S̃⁰S⁰𝟙` in the bulk, `S⁰𝟙` on the boundary.
pub fn singular_vector_level2(sector: Sector) -> Result<FockPoly, HemError> {
    let s = OperatorExpr::singular_level2(Side::Holo);
    match sector {
        Sector::Boundary => s.apply(&FockPoly::one(sector)),
        Sector::Bulk => {
            let st = OperatorExpr::singular_level2(Side::Antiholo);
            st.apply(&s.apply(&FockPoly::one(sector))?)
        }
    }
}

/// `(α − α_{1,2})(α − α_{2,1}) = α² + αQ + 1` as an element of the field.
pub fn kac_factor() -> Coef {
    let a = Coef::alpha();
    &(&a - &Coef::alpha_12()) * &(&a - &Coef::alpha_21())
}

/// The factored form asserted for the level-2 singular vector.
pub fn singular_vector_factored(sector: Sector) -> FockPoly {
    let a = Coef::alpha();
    match sector {
        Sector::Boundary => {
            let c = &(&Coef::int(2) * &a) * &kac_factor();
            FockPoly::var(sector, FockVar::Phi(2)).scale(&c)
        }
        Sector::Bulk => {
            let k = kac_factor();
            let c = &(&a * &a) * &(&k * &k);
            let p22 = FockPoly::var(sector, FockVar::Phi(2)).mul(&FockPoly::var(sector, FockVar::PhiBar(2)));
            p22.scale(&Coef::int(4)).sub(&FockPoly::one(sector)).scale(&c)
        }
    }
}

/// Exact certificate for the level-2 factorization.
#[derive(Clone, Debug, Serialize)]
pub struct SingularCertificate {
    pub sector: Sector,
    pub expanded: String,
    pub factored: String,
    pub orders_agree: bool,
    pub matches_factored: bool,
    pub i_free: bool,
    pub json: serde_json::Value,
}

pub fn singular_certificate(sector: Sector) -> Result<SingularCertificate, HemError> {
    let v = singular_vector_level2(sector)?;
    let orders_agree = match sector {
        Sector::Boundary => true,
        Sector::Bulk => {
            let s = OperatorExpr::singular_level2(Side::Holo);
            let st = OperatorExpr::singular_level2(Side::Antiholo);
            s.apply(&st.apply(&FockPoly::one(sector))?)? == v
        }
    };
    let factored = match sector {
        Sector::Boundary => "2*a*(a^2+a*Q+1)*phi2".to_string(),
        Sector::Bulk => "a^2*(a-a12)^2*(a-a21)^2*(4*phi2*phibar2-1), a12=-1/b, a21=-b".to_string(),
    };
    Ok(SingularCertificate {
        sector,
        expanded: v.to_string(),
        factored,
        orders_agree,
        matches_factored: v == singular_vector_factored(sector),
        i_free: v.is_i_free(),
        json: v.to_json(),
    })
}

/// All monomials of level at most `max_level`.
pub fn basis_monomials(sector: Sector, max_level: u32) -> Vec<Monomial> {
    let mono_of = |p: &Partition, side: Side| -> Vec<(FockVar, u32)> {
        p.parts().iter().map(|&k| (FockVar::of_side(side, k), 1)).collect()
    };
    let mut out = Vec::new();
    for total in 0..=max_level {
        match sector {
            Sector::Boundary => {
                for p in Partition::all_of(total) {
                    out.push(Monomial::from_vars(sector, &mono_of(&p, Side::Holo)));
                }
            }
            Sector::Bulk => {
                for k in 0..=total {
                    for p in Partition::all_of(k) {
                        for q in Partition::all_of(total - k) {
                            let mut v = mono_of(&p, Side::Holo);
                            v.extend(mono_of(&q, Side::Antiholo));
                            out.push(Monomial::from_vars(sector, &v));
                        }
                    }
                }
            }
        }
    }
    out
}

/// `[L_m, L_n] − (m−n)L_{m+n} − (c_L/12)(m³−m)δ_{m+n,0}` applied to `p`.
pub fn virasoro_defect(m: i32, n: i32, side: Side, p: &FockPoly) -> Result<FockPoly, HemError> {
    let l = |k: i32, q: &FockPoly| apply_virasoro(k, side, q);
    let lhs = l(m, &l(n, p)?)?.sub(&l(n, &l(m, p)?)?);
    let mut rhs = l(m + n, p)?.scale(&Coef::int((m - n) as i64));
    if m + n == 0 {
        let c = &Coef::central_charge() * &Coef::ratio((m * m * m - m) as i64, 12);
        rhs = rhs.add(&p.scale(&c));
    }
    Ok(lhs.sub(&rhs))
}

/// Exact Virasoro relation on every monomial of level `≤ basis_level` (both sides in the bulk).
pub fn commutator_check(m: i32, n: i32, basis_level: u32, sector: Sector) -> Result<bool, HemError> {
    let sides: &[Side] = match sector {
        Sector::Bulk => &[Side::Holo, Side::Antiholo],
        Sector::Boundary => &[Side::Holo],
    };
    for mono in basis_monomials(sector, basis_level) {
        let p = FockPoly::term(sector, mono, Coef::one());
        for &s in sides {
            if !virasoro_defect(m, n, s, &p)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `[L_m, L̃_n] = 0` on bulk monomials of level `≤ basis_level`.
pub fn sectors_commute(m: i32, n: i32, basis_level: u32) -> Result<bool, HemError> {
    for mono in basis_monomials(Sector::Bulk, basis_level) {
        let p = FockPoly::term(Sector::Bulk, mono, Coef::one());
        let x = apply_virasoro(m, Side::Holo, &apply_virasoro(n, Side::Antiholo, &p)?)?;
        let y = apply_virasoro(n, Side::Antiholo, &apply_virasoro(m, Side::Holo, &p)?)?;
        if x != y {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `[A_m, A_n] = (m/2)δ_{m+n,0}` on monomials of level `≤ basis_level`.
pub fn heisenberg_check(m: i32, n: i32, side: Side, sector: Sector, basis_level: u32) -> Result<bool, HemError> {
    for mono in basis_monomials(sector, basis_level) {
        let p = FockPoly::term(sector, mono, Coef::one());
        let lhs = apply_heisenberg(m, side, &apply_heisenberg(n, side, &p)?)?
            .sub(&apply_heisenberg(n, side, &apply_heisenberg(m, side, &p)?)?);
        let rhs = if m + n == 0 { p.scale(&Coef::ratio(m as i64, 2)) } else { FockPoly::zero(sector) };
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Polynomial with numerical coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericPoly {
    pub sector: Sector,
    pub terms: Vec<(Monomial, Complex64)>,
}

impl NumericPoly {
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }

    pub fn coefficient(&self, m: &Monomial) -> Complex64 {
        self.terms.iter().find(|(x, _)| x == m).map_or(Complex64::new(0.0, 0.0), |(_, c)| *c)
    }
}

/// Evaluates every coefficient at `(α, b)`.
pub fn substitute(p: &FockPoly, alpha: Complex64, b: Complex64) -> Result<NumericPoly, HemError> {
    if b.norm() == 0.0 {
        return Err(HemError::PoleAtSubstitution("b = 0".into()));
    }
    let mut terms = Vec::with_capacity(p.len());
    for (m, c) in p.terms() {
        let v = c.eval(alpha, b).map_err(|_| HemError::PoleAtSubstitution(format!("{} of {}", c, m.render(p.sector))))?;
        terms.push((m.clone(), v));
    }
    Ok(NumericPoly { sector: p.sector, terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(s: Sector) -> FockPoly {
        FockPoly::one(s)
    }

    fn phi(s: Sector, n: u32) -> FockPoly {
        FockPoly::var(s, FockVar::Phi(n))
    }

    fn part(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn heisenberg_examples() {
        let s = Sector::Bulk;
        assert!(apply_heisenberg(1, Side::Holo, &one(s)).unwrap().is_zero());
        let a0 = apply_heisenberg(0, Side::Holo, &one(s)).unwrap();
        assert_eq!(a0, one(s).scale(&(&Coef::half_i() * &Coef::alpha())));
        let am1 = apply_heisenberg(-1, Side::Holo, &one(s)).unwrap();
        assert_eq!(am1, phi(s, 1).scale(&(-&Coef::i())));
        assert!(matches!(
            apply_heisenberg(1, Side::Antiholo, &one(Sector::Boundary)),
            Err(HemError::SectorMismatch(_))
        ));
    }

    #[test]
    fn virasoro_examples() {
        for s in [Sector::Bulk, Sector::Boundary] {
            let l1 = apply_virasoro(-1, Side::Holo, &one(s)).unwrap();
            assert_eq!(l1, phi(s, 1).scale(&Coef::alpha()));
            let l2 = apply_virasoro(-2, Side::Holo, &one(s)).unwrap();
            let mut want = phi(s, 2)
                .scale(&(&Coef::int(2) * &(&Coef::alpha() + &Coef::q())))
                .sub(&phi(s, 1).mul(&phi(s, 1)));
            // [A_1, A_{−1}] leaves a constant when both act on φ_1.
            if s == Sector::Boundary {
                want = want.add(&one(s).scale(&Coef::ratio(1, 2)));
            }
            assert_eq!(l2, want);
            let l0 = apply_virasoro(0, Side::Holo, &one(s)).unwrap();
            assert_eq!(l0, one(s).scale(&Coef::delta_alpha()));
        }
    }

    #[test]
    fn truncation_bound_is_sharp_enough() {
        for mono in basis_monomials(Sector::Bulk, 3) {
            let p = FockPoly::term(Sector::Bulk, mono, Coef::one());
            for n in [-3i32, -1, 1, 2] {
                let b = (p.level() + n.unsigned_abs() + 1) as i32;
                let x = apply_virasoro_bounded(n, Side::Holo, &p, b).unwrap();
                let y = apply_virasoro_bounded(n, Side::Holo, &p, b + 1).unwrap();
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn descendant_examples() {
        let s = Sector::Bulk;
        assert_eq!(descendant(&Partition::empty(), &Partition::empty(), s).unwrap(), one(s));
        let d = descendant(&part(&[1, 1]), &Partition::empty(), s).unwrap();
        let a = Coef::alpha();
        let want = phi(s, 1).mul(&phi(s, 1)).scale(&(&a * &a)).add(&phi(s, 2).scale(&(&Coef::int(2) * &a)));
        assert_eq!(d, want);
        let d22 = descendant(&part(&[2]), &part(&[2]), s).unwrap();
        assert_eq!(d22.level(), 4);
        assert!(d22.is_i_free());
        assert!(matches!(
            descendant(&Partition::empty(), &part(&[1]), Sector::Boundary),
            Err(HemError::SectorMismatch(_))
        ));
    }

    /// Hand expansion of `L_{−2}L̃_{−2}𝟙`: the two sectors act on disjoint
    /// variables up to the cross terms produced by `∂_{φ̄}` inside `A_{−n}`.
    #[test]
    fn descendant_22_matches_hand_expansion() {
        let s = Sector::Bulk;
        let a = Coef::alpha();
        let q = Coef::q();
        let pb = |n| FockPoly::var(s, FockVar::PhiBar(n));
        // L̃_{−2}𝟙 = 2(α+Q)φ̄_2 − φ̄_1²
        let lt = pb(2).scale(&(&Coef::int(2) * &(&a + &q))).sub(&pb(1).mul(&pb(1)));
        assert_eq!(apply_virasoro(-2, Side::Antiholo, &one(s)).unwrap(), lt);
        // L_{−2} acting on lt: holomorphic part multiplies, cross terms come from
        // A_{−n} = (i/2)(∂_{φ̄_n} − 2nφ_n) differentiating φ̄_1², φ̄_2.
        let hol = phi(s, 2).scale(&(&Coef::int(2) * &(&a + &q))).sub(&phi(s, 1).mul(&phi(s, 1)));
        let mut want = hol.mul(&lt);
        // i(α−(−1)Q)A_{−2} on φ̄_2 gives i(α+Q)(i/2)·1 = −(α+Q)/2 times 2(α+Q).
        let c1 = &(&Coef::int(-1) * &(&a + &q)) * &(&a + &q);
        want = want.add(&one(s).scale(&c1));
        // Σ A_{−2−m}A_m reduces to A_{−1}A_{−1} = −¼(∂_{φ̄_1} − 2φ_1)².
        let got = apply_virasoro(-2, Side::Holo, &lt).unwrap();
        let diff = got.sub(&want);
        // Remaining cross terms: 1/2 − 2φ_1φ̄_1 (from A_{−1}A_{−1} on −φ̄_1²).
        let p11 = phi(s, 1).mul(&pb(1));
        let rest = one(s).scale(&Coef::ratio(1, 2)).sub(&p11.scale(&Coef::int(2)));
        assert_eq!(diff, rest);
    }

    #[test]
    fn boundary_singular_vector() {
        let v = singular_vector_level2(Sector::Boundary).unwrap();
        assert_eq!(v, singular_vector_factored(Sector::Boundary));
        let a = Coef::alpha();
        let k = &(&(&a * &a) + &(&a * &Coef::q())) + &Coef::one();
        assert_eq!(v, phi(Sector::Boundary, 2).scale(&(&(&Coef::int(2) * &a) * &k)));
    }

    #[test]
    fn bulk_singular_vector_and_kac_zero() {
        let cert = singular_certificate(Sector::Bulk).unwrap();
        assert!(cert.orders_agree && cert.matches_factored && cert.i_free);
        let v = singular_vector_level2(Sector::Bulk).unwrap();
        assert!(v.subs_alpha(&Coef::alpha_12()).unwrap().is_zero());
        assert!(v.subs_alpha(&Coef::alpha_21()).unwrap().is_zero());
    }

    #[test]
    fn substitute_examples() {
        let s = Sector::Bulk;
        let b = Complex64::new(0.5, 0.0);
        let p = phi(s, 1).scale(&Coef::alpha());
        let n = substitute(&p, Complex64::new(2.0, 0.0), b).unwrap();
        assert_eq!(n.terms.len(), 1);
        assert!((n.terms[0].1 - Complex64::new(2.0, 0.0)).norm() < 1e-15);

        let v = singular_vector_level2(s).unwrap();
        let z = substitute(&v, Complex64::new(-0.5, 0.0), b).unwrap();
        assert!(z.max_abs_coefficient() < 1e-12);

        let l2 = apply_virasoro(-2, Side::Holo, &one(s)).unwrap();
        let n = substitute(&l2, Complex64::new(1.0, 0.0), b).unwrap();
        let m2 = Monomial::from_vars(s, &[(FockVar::Phi(2), 1)]);
        let m11 = Monomial::from_vars(s, &[(FockVar::Phi(1), 2)]);
        assert!((n.coefficient(&m2) - Complex64::new(7.0, 0.0)).norm() < 1e-14);
        assert!((n.coefficient(&m11) + Complex64::new(1.0, 0.0)).norm() < 1e-14);

        let q = one(s).scale(&Coef::q());
        assert!(matches!(
            substitute(&q, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
            Err(HemError::PoleAtSubstitution(_))
        ));
    }

    #[test]
    fn small_commutators() {
        assert!(commutator_check(1, -1, 2, Sector::Bulk).unwrap());
        assert!(commutator_check(1, 2, 2, Sector::Boundary).unwrap());
        let d = virasoro_defect(2, -2, Side::Holo, &one(Sector::Bulk)).unwrap();
        assert!(d.is_zero());
        let l = apply_virasoro(2, Side::Holo, &apply_virasoro(-2, Side::Holo, &one(Sector::Bulk)).unwrap()).unwrap();
        let want = &(&Coef::int(4) * &Coef::delta_alpha()) + &(&Coef::central_charge() * &Coef::ratio(1, 2));
        assert_eq!(l, one(Sector::Bulk).scale(&want));
    }

    #[test]
    fn heisenberg_relations() {
        for m in -3..=3 {
            for n in -3..=3 {
                assert!(heisenberg_check(m, n, Side::Holo, Sector::Bulk, 2).unwrap());
                assert!(heisenberg_check(m, n, Side::Holo, Sector::Boundary, 2).unwrap());
            }
        }
    }

    #[test]
    fn pretty_and_json() {
        let s = Sector::Boundary;
        let l2 = apply_virasoro(-2, Side::Holo, &one(s)).unwrap();
        let txt = l2.to_string();
        assert!(txt.contains("phi2") && txt.contains("phi1^2"), "{txt}");
        let j = l2.to_json();
        assert_eq!(j["phi1^2"], "-1");
    }
}
