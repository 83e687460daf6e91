//! Closed forms: Selberg and Dotsenko–Fateev integrals with meromorphic
//! continuation, Kac-point residues, the four HEM constants and the FZZ conic.
//!
//! Every closed form here is a product of `Γ`, `sin π·` and `cos π·` of affine
//! functions of a single parameter `t`. [`MeroProduct`] classifies each factor
//! as regular, a zero or a pole at `t = 0` exactly from its affine argument,
//! and returns the leading Laurent term. Poles are therefore isolated before
//! any floating-point evaluation of the singular factor takes place.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coef::Coef;
use crate::error::{HemError, Result};
use crate::params::{Params, Phase};
use crate::special::{digamma, ln_gamma};

/// Distance to an integer (or half-integer for `cos`) below which an argument
/// is classified as sitting on a zero or pole.
pub const SINGULAR_TOL: f64 = 1e-10;

fn cx(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Exponent parameters `(a, b, c)` of the Selberg family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelbergArgs {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl SelbergArgs {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a: cx(a), b: cx(b), c: cx(c) }
    }

    pub fn complex(a: Complex64, b: Complex64, c: Complex64) -> Self {
        Self { a, b, c }
    }

    pub fn swapped(&self) -> Self {
        Self { a: self.b, b: self.a, c: self.c }
    }

    /// Absolute convergence of the `(0,1)²` integral.
    pub fn in_s22_region(&self) -> bool {
        let (a, b, c) = (self.a.re, self.b.re, self.c.re);
        a > 0.0 && b > 0.0 && c > -(0.5f64.min(a).min(b))
    }

    /// Absolute convergence of the `(0,1)×(1,∞)` integral: `Re a > 0`,
    /// `Re(a+b+2c) < 1`, `Re c > −1/2`, plus `Re b > 0` for `t₂ → 1⁺` and
    /// `Re(b + c) > 0` for the corner `t₁, t₂ → 1`.
    pub fn in_s21_region(&self) -> bool {
        let (a, b, c) = (self.a.re, self.b.re, self.c.re);
        a > 0.0 && a + b + 2.0 * c < 1.0 && c > -0.5 && b > 0.0 && b + c > 0.0
    }

    #[cfg(test)]
    fn add_scaled(&self, d: &SelbergArgs, t: f64) -> Self {
        Self { a: self.a + d.a * t, b: self.b + d.b * t, c: self.c + d.c * t }
    }
}

/// Value of a meromorphic function at a point; at a simple pole the value is
/// the finite part and the residue is attached.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeroSample {
    pub point: Complex64,
    pub value: Complex64,
    pub residue: Option<Complex64>,
    pub pole_flag: bool,
}

impl MeroSample {
    pub fn regular(point: Complex64, value: Complex64) -> Self {
        Self { point, value, residue: None, pole_flag: false }
    }
}

/// Affine function `at + slope·t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Affine {
    pub at: Complex64,
    pub slope: Complex64,
}

impl Affine {
    pub fn new(at: Complex64, slope: Complex64) -> Self {
        Self { at, slope }
    }

    pub fn constant(at: Complex64) -> Self {
        Self::new(at, cx(0.0))
    }

    fn plus(self, o: Affine) -> Self {
        Self::new(self.at + o.at, self.slope + o.slope)
    }

    fn scaled(self, k: f64) -> Self {
        Self::new(self.at * k, self.slope * k)
    }

    fn shifted(self, k: f64) -> Self {
        Self::new(self.at + k, self.slope)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorKind {
    Gamma,
    SinPi,
    CosPi,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Factor {
    kind: FactorKind,
    arg: Affine,
    power: i32,
}

/// Leading Laurent data `f(t) = lead·t^order·(1 + next·t + O(t²))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Laurent {
    pub order: i32,
    pub lead: Complex64,
    pub next: Complex64,
}

/// Product of `Γ`, `sin π·`, `cos π·` factors (each to power ±1) of affine
/// arguments, times a constant.
#[derive(Clone, Debug, Default)]
pub struct MeroProduct {
    scale: Option<Complex64>,
    factors: Vec<Factor>,
}

/// Per-factor classification: `ln lead`, order, and the `next` coefficient.
struct FactorTerm {
    ln_lead: Complex64,
    order: i32,
    next: Complex64,
    static_singular: bool,
}

fn near_integer(x: Complex64) -> Option<i64> {
    let k = x.re.round();
    let tol = SINGULAR_TOL * (1.0 + x.re.abs());
    ((x.re - k).abs() <= tol && x.im.abs() <= tol).then_some(k as i64)
}

fn sign_ln(k: i64) -> Complex64 {
    if k.rem_euclid(2) == 0 {
        cx(0.0)
    } else {
        Complex64::new(0.0, PI)
    }
}

fn ln_factorial(k: i64) -> f64 {
    (2..=k).map(|j| (j as f64).ln()).sum()
}

impl Factor {
    fn classify(&self) -> Result<FactorTerm> {
        let Affine { at, slope } = self.arg;
        let direction_free = slope == cx(0.0);
        let mut term = match self.kind {
            FactorKind::Gamma => match near_integer(at).filter(|k| *k <= 0) {
                Some(k) => {
                    let k = -k;
                    if direction_free {
                        FactorTerm { ln_lead: cx(0.0), order: -1, next: cx(0.0), static_singular: true }
                    } else {
                        // Γ(−k + ε) = (−1)^k/k! · (1/ε + ψ(k+1) + O(ε))
                        let ln_lead = sign_ln(k) - ln_factorial(k) - slope.ln();
                        let next = digamma(cx(k as f64 + 1.0))? * slope;
                        FactorTerm { ln_lead, order: -1, next, static_singular: false }
                    }
                }
                None => FactorTerm {
                    ln_lead: ln_gamma(at)?,
                    order: 0,
                    next: digamma(at)? * slope,
                    static_singular: false,
                },
            },
            FactorKind::SinPi => match near_integer(at) {
                Some(k) => {
                    if direction_free {
                        FactorTerm { ln_lead: cx(0.0), order: 1, next: cx(0.0), static_singular: true }
                    } else {
                        let ln_lead = sign_ln(k) + (slope * PI).ln();
                        FactorTerm { ln_lead, order: 1, next: cx(0.0), static_singular: false }
                    }
                }
                None => {
                    let s = (at * PI).sin();
                    let cot = (at * PI).cos() / s;
                    FactorTerm { ln_lead: s.ln(), order: 0, next: cot * slope * PI, static_singular: false }
                }
            },
            FactorKind::CosPi => match near_integer(at - 0.5) {
                Some(k) => {
                    if direction_free {
                        FactorTerm { ln_lead: cx(0.0), order: 1, next: cx(0.0), static_singular: true }
                    } else {
                        // cos(π(k+½) + πε) = −(−1)^k·πε + O(ε³)
                        let ln_lead = sign_ln(k + 1) + (slope * PI).ln();
                        FactorTerm { ln_lead, order: 1, next: cx(0.0), static_singular: false }
                    }
                }
                None => {
                    let c = (at * PI).cos();
                    let tan = (at * PI).sin() / c;
                    FactorTerm { ln_lead: c.ln(), order: 0, next: -tan * slope * PI, static_singular: false }
                }
            },
        };
        if self.power < 0 {
            term.ln_lead = -term.ln_lead;
            term.order = -term.order;
            term.next = -term.next;
        }
        Ok(term)
    }
}

impl MeroProduct {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn times_const(mut self, k: Complex64) -> Self {
        self.scale = Some(self.scale.unwrap_or(cx(1.0)) * k);
        self
    }

    fn push(mut self, kind: FactorKind, arg: Affine, power: i32) -> Self {
        self.factors.push(Factor { kind, arg, power });
        self
    }

    pub fn gamma(self, arg: Affine) -> Self {
        self.push(FactorKind::Gamma, arg, 1)
    }

    pub fn over_gamma(self, arg: Affine) -> Self {
        self.push(FactorKind::Gamma, arg, -1)
    }

    pub fn sin_pi(self, arg: Affine) -> Self {
        self.push(FactorKind::SinPi, arg, 1)
    }

    pub fn over_sin_pi(self, arg: Affine) -> Self {
        self.push(FactorKind::SinPi, arg, -1)
    }

    pub fn cos_pi(self, arg: Affine) -> Self {
        self.push(FactorKind::CosPi, arg, 1)
    }

    pub fn times(mut self, o: MeroProduct) -> Self {
        if let Some(k) = o.scale {
            self = self.times_const(k);
        }
        self.factors.extend(o.factors);
        self
    }

    /// Leading Laurent term at `t = 0`.
    ///
    /// A factor sitting on a zero or pole with zero slope has no direction
    /// of approach: a static zero alone gives an exact zero, while any static
    /// pole makes the value direction dependent and is an error.
    pub fn laurent(&self) -> Result<Laurent> {
        let mut ln_lead = cx(0.0);
        let mut order = 0;
        let mut next = cx(0.0);
        let mut static_zero = false;
        for f in &self.factors {
            let t = f.classify()?;
            if t.static_singular {
                if t.order < 0 {
                    return Err(HemError::PoleNeedsDirection);
                }
                static_zero = true;
                continue;
            }
            ln_lead += t.ln_lead;
            order += t.order;
            next += t.next;
        }
        if static_zero {
            return Ok(Laurent { order: i32::MAX, lead: cx(0.0), next: cx(0.0) });
        }
        let lead = ln_lead.exp() * self.scale.unwrap_or(cx(1.0));
        Ok(Laurent { order, lead, next })
    }

    /// Value at `t = 0` (finite part plus residue at a simple pole).
    pub fn sample(&self, point: Complex64) -> Result<MeroSample> {
        let l = self.laurent()?;
        match l.order {
            o if o < -1 => Err(HemError::UnsupportedPoleOrder(-o)),
            -1 => Ok(MeroSample { point, value: l.lead * l.next, residue: Some(l.lead), pole_flag: true }),
            0 => Ok(MeroSample::regular(point, l.lead)),
            _ => Ok(MeroSample::regular(point, cx(0.0))),
        }
    }
}

/// The arguments `base + t·dir` as affine functions of `t`.
#[derive(Clone, Copy, Debug)]
struct ArgLines {
    a: Affine,
    b: Affine,
    c: Affine,
}

impl ArgLines {
    fn new(base: &SelbergArgs, dir: &SelbergArgs) -> Self {
        Self {
            a: Affine::new(base.a, dir.a),
            b: Affine::new(base.b, dir.b),
            c: Affine::new(base.c, dir.c),
        }
    }
}

fn s22_product(l: ArgLines) -> MeroProduct {
    let ArgLines { a, b, c } = l;
    MeroProduct::new()
        .gamma(a)
        .gamma(b)
        .gamma(a.plus(c))
        .gamma(b.plus(c))
        .gamma(c.scaled(2.0).shifted(1.0))
        .over_gamma(a.plus(b).plus(c))
        .over_gamma(a.plus(b).plus(c.scaled(2.0)))
        .over_gamma(c.shifted(1.0))
}

fn s21_trig(l: ArgLines) -> MeroProduct {
    let ArgLines { a, b, c } = l;
    MeroProduct::new().cos_pi(c).sin_pi(a.plus(c)).over_sin_pi(a.plus(b).plus(c.scaled(2.0)))
}

fn neretin_trig(l: ArgLines) -> MeroProduct {
    let ArgLines { a, b, c } = l;
    MeroProduct::new()
        .sin_pi(a)
        .sin_pi(b)
        .sin_pi(a.plus(c))
        .sin_pi(b.plus(c))
        .sin_pi(c.scaled(2.0).shifted(1.0))
        .over_sin_pi(a.plus(b).plus(c))
        .over_sin_pi(a.plus(b).plus(c.scaled(2.0)))
        .over_sin_pi(c.shifted(1.0))
}

const NO_DIRECTION: SelbergArgs = SelbergArgs {
    a: Complex64 { re: 0.0, im: 0.0 },
    b: Complex64 { re: 0.0, im: 0.0 },
    c: Complex64 { re: 0.0, im: 0.0 },
};

/// `S_{2,2}(a,b,c)` by the Gamma-ratio closed form. Fails with
/// [`HemError::PoleNeedsDirection`] on a pole; use [`selberg22_along`].
pub fn selberg22(args: &SelbergArgs) -> Result<MeroSample> {
    selberg22_along(args, &NO_DIRECTION, cx(0.0))
}

/// `S_{2,2}` on the line `args + t·dir` at `t = 0`; the residue (if any) is
/// with respect to `t`. `point` is recorded in the sample.
pub fn selberg22_along(args: &SelbergArgs, dir: &SelbergArgs, point: Complex64) -> Result<MeroSample> {
    s22_product(ArgLines::new(args, dir)).sample(point)
}

/// `S_{2,1}(a,b,c) = cos(πc)·sin π(a+c)/sin π(a+b+2c)·S_{2,2}(a,b,c)`.
pub fn selberg21(args: &SelbergArgs) -> Result<MeroSample> {
    selberg21_along(args, &NO_DIRECTION, cx(0.0))
}

pub fn selberg21_along(args: &SelbergArgs, dir: &SelbergArgs, point: Complex64) -> Result<MeroSample> {
    let l = ArgLines::new(args, dir);
    s22_product(l).times(s21_trig(l)).sample(point)
}

fn integer_gap(x: Complex64, y: Complex64, what: &str) -> Result<i64> {
    near_integer(x - y).ok_or_else(|| HemError::InvalidParams(format!("{what} − {what}~ must be an integer")))
}

fn neretin_product(holo: ArgLines, anti: ArgLines) -> Result<MeroProduct> {
    integer_gap(holo.a.at, anti.a.at, "a")?;
    integer_gap(holo.b.at, anti.b.at, "b")?;
    let dc = integer_gap(holo.c.at, anti.c.at, "c")?;
    let sign = if dc.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(s22_product(holo).times(s22_product(anti)).times(neretin_trig(holo)).times_const(cx(sign)))
}

/// Complex Dotsenko–Fateev integral `N(𝐚,𝐛,𝐜)` by the product formula. The
/// antiholomorphic exponents must differ from the holomorphic ones by
/// integers.
pub fn neretin_df(holo: &SelbergArgs, anti: &SelbergArgs) -> Result<MeroSample> {
    let h = ArgLines::new(holo, &NO_DIRECTION);
    let a = ArgLines::new(anti, &NO_DIRECTION);
    neretin_product(h, a)?.sample(cx(0.0))
}

/// `N` on the line `args + t·dir` with equal holomorphic and antiholomorphic
/// exponents.
pub fn neretin_df_along(args: &SelbergArgs, dir: &SelbergArgs, point: Complex64) -> Result<MeroSample> {
    let l = ArgLines::new(args, dir);
    neretin_product(l, l)?.sample(point)
}

/// Exponents of `J_ℂ^β(α)`: `(−γα/2, 1 − γβ/2, −γ²/4)`.
pub fn j_complex_args(alpha: f64, beta: f64, gamma: f64) -> SelbergArgs {
    SelbergArgs::new(-gamma * alpha / 2.0, 1.0 - gamma * beta / 2.0, -gamma * gamma / 4.0)
}

/// Derivative of [`j_complex_args`] in `α`.
pub fn j_complex_dalpha(gamma: f64) -> SelbergArgs {
    SelbergArgs::new(-gamma / 2.0, 0.0, 0.0)
}

/// Derivative of [`j_complex_args`] in `β`.
pub fn j_complex_dbeta(gamma: f64) -> SelbergArgs {
    SelbergArgs::new(0.0, -gamma / 2.0, 0.0)
}

/// `J_ℂ^β(α)`, with any residue taken in `α`.
pub fn j_complex(alpha: f64, beta: f64, params: &Params) -> Result<MeroSample> {
    let g = params.gamma;
    neretin_df_along(&j_complex_args(alpha, beta, g), &j_complex_dalpha(g), cx(alpha))
}

/// `∂_β J_ℂ^β(α)` at `β = 0`, where `J_ℂ^0` vanishes through `sin(πb)`.
pub fn j_complex_beta_slope(alpha: f64, params: &Params) -> Result<Complex64> {
    let g = params.gamma;
    let l = ArgLines::new(&j_complex_args(alpha, 0.0, g), &j_complex_dbeta(g));
    let lt = neretin_product(l, l)?.laurent()?;
    match lt.order {
        1 => Ok(lt.lead),
        o if o > 1 => Ok(cx(0.0)),
        o => Err(HemError::UnsupportedPoleOrder(-o)),
    }
}

/// Near `(α_{2,1}, 0)`: `J_ℂ^β(α) ≈ β·[this]` with
/// `[this] = −(2π/γ)·G²·sin(πγ²/2) / ((α+γ/2)(α+β+γ/2))` at `β → 0`.
pub fn j_complex_beta_slope_leading(alpha: f64, params: &Params) -> Result<f64> {
    let g = params.gamma;
    let gg = common_gamma_factor(g)?;
    let s = alpha + g / 2.0;
    Ok(-(2.0 / g) * PI * gg * gg * (PI * g * g / 2.0).sin() / (s * s))
}

/// `G = Γ(γ²/4)Γ(1−γ²/2)/Γ(1−γ²/4)`, the Gamma factor shared by all
/// `α_{2,1}` residues.
pub fn common_gamma_factor(gamma: f64) -> Result<f64> {
    let x = gamma * gamma / 4.0;
    Ok((ln_gamma(cx(x))? + ln_gamma(cx(1.0 - 2.0 * x))? - ln_gamma(cx(1.0 - x))?).exp().re)
}

fn require_subcritical(params: &Params) -> Result<()> {
    match params.phase() {
        Phase::Subcritical => Ok(()),
        phase => Err(HemError::Phase { phase, gamma: params.gamma }),
    }
}

fn reject_critical(params: &Params) -> Result<()> {
    match params.phase() {
        Phase::Critical => Err(HemError::Phase { phase: Phase::Critical, gamma: params.gamma }),
        _ => Ok(()),
    }
}

/// The two closed forms of `Res_{α=α_{2,1}} J₁`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueJ1 {
    /// `−(2/γ)(πΓ(x)/Γ(1−x))²·Γ(1−2x)/Γ(2x)` with `x = γ²/4`.
    pub stated: f64,
    /// `−(2π/γ)(Γ(x)Γ(1−2x)/Γ(1−x))²·sin(2πx)`.
    pub via_sine: f64,
}

impl ResidueJ1 {
    pub fn relative_gap(&self) -> f64 {
        ((self.stated - self.via_sine) / self.stated).abs()
    }
}

pub fn residue_j1(params: &Params) -> Result<ResidueJ1> {
    require_subcritical(params)?;
    let g = params.gamma;
    let x = g * g / 4.0;
    let ratio = (ln_gamma(cx(x))? - ln_gamma(cx(1.0 - x))?).exp().re;
    let refl = (ln_gamma(cx(1.0 - 2.0 * x))? - ln_gamma(cx(2.0 * x))?).exp().re;
    let stated = -(2.0 / g) * (PI * ratio).powi(2) * refl;
    let gg = common_gamma_factor(g)?;
    let via_sine = -(2.0 * PI / g) * gg * gg * (2.0 * PI * x).sin();
    Ok(ResidueJ1 { stated, via_sine })
}

/// Residue coefficients of the three boundary integrals at `α_{2,1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryResidues {
    pub res_i2: f64,
    pub res_i11: f64,
    pub res_ix11: f64,
    pub common_factor: f64,
}

pub fn boundary_residues(params: &Params) -> Result<BoundaryResidues> {
    reject_critical(params)?;
    if params.phase() == Phase::Supercritical {
        return Ok(BoundaryResidues { res_i2: 0.0, res_i11: 0.0, res_ix11: 0.0, common_factor: 0.0 });
    }
    let g = params.gamma;
    let x = g * g / 4.0;
    let gg = common_gamma_factor(g)?;
    Ok(BoundaryResidues {
        res_i2: -(1.0 / g) * x / (1.0 - x) * (PI * x).sin() * gg,
        res_i11: -(2.0 / g) * gg,
        res_ix11: -(2.0 / g) * (PI * x).cos() * gg,
        common_factor: gg,
    })
}

/// Residue in `α` of `S_{2,2}(1, −γα/2, −γ²/4)` at `α_{2,1}`, from the
/// product engine (no closed-form shortcut).
pub fn def_r_residue_engine(gamma: f64) -> Result<Complex64> {
    let alpha = -gamma / 2.0;
    let base = SelbergArgs::new(1.0, -gamma * alpha / 2.0, -gamma * gamma / 4.0);
    let dir = SelbergArgs::new(0.0, -gamma / 2.0, 0.0);
    selberg22_along(&base, &dir, cx(alpha))?.residue.ok_or(HemError::Conditioning("no pole found".into()))
}

/// Which HEM prefactor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HemLabel {
    Bulk12,
    Bulk21,
    Boundary12,
    Boundary21,
}

impl HemLabel {
    pub const ALL: [HemLabel; 4] = [HemLabel::Bulk12, HemLabel::Bulk21, HemLabel::Boundary12, HemLabel::Boundary21];

    pub fn is_21(self) -> bool {
        matches!(self, HemLabel::Bulk21 | HemLabel::Boundary21)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            HemLabel::Bulk12 => "bulk12",
            HemLabel::Bulk21 => "bulk21",
            HemLabel::Boundary12 => "boundary12",
            HemLabel::Boundary21 => "boundary21",
        }
    }
}

impl std::fmt::Display for HemLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HemConstant {
    pub label: HemLabel,
    pub stated: f64,
    pub chained: f64,
    pub phase: Phase,
}

impl HemConstant {
    /// `chained/stated`, or `None` when the stated value is zero.
    pub fn ratio(&self) -> Option<f64> {
        (self.stated != 0.0).then(|| self.chained / self.stated)
    }
}

/// FZZ bracket `μ_L² − 2μ_Lμ_R cos(πγ²/4) + μ_R² − μ sin(πγ²/4)`.
pub fn fzz_bracket(gamma: f64, mu: f64, mu_l: f64, mu_r: f64) -> f64 {
    let x = PI * gamma * gamma / 4.0;
    mu_l * mu_l - 2.0 * mu_l * mu_r * x.cos() + mu_r * mu_r - mu * x.sin()
}

fn stated(label: HemLabel, p: &Params) -> Result<f64> {
    let g = p.gamma;
    let x = g * g / 4.0;
    Ok(match label {
        HemLabel::Bulk12 => PI * p.mu * 8.0 / g.powi(3) * (1.0 - x).powi(2),
        HemLabel::Bulk21 => {
            let ratio = (ln_gamma(cx(x))? - ln_gamma(cx(1.0 - x))?).exp().re;
            let refl = (ln_gamma(cx(1.0 - 2.0 * x))? - ln_gamma(cx(2.0 * x))?).exp().re;
            -g.powi(5) / 32.0 * (PI * p.mu * ratio).powi(2) * refl
        }
        HemLabel::Boundary12 => 4.0 / (g * g) * (1.0 - x) * (p.mu_l + p.mu_r),
        HemLabel::Boundary21 => {
            g.powi(3) / 8.0 * fzz_bracket(g, p.mu, p.mu_l, p.mu_r) * common_gamma_factor(g)?
        }
    })
}

/// Exact Kac prefactor evaluated at `b = γ/2`.
fn kac_prefactor(c: &Coef, gamma: f64) -> Result<f64> {
    Ok(c.eval(cx(0.0), cx(gamma / 2.0))?.re)
}

/// Recomposes the constant from the residue chain of its derivation.
pub fn hem_chain(label: HemLabel, p: &Params) -> Result<f64> {
    if label.is_21() {
        reject_critical(p)?;
        if p.phase() == Phase::Supercritical {
            return Ok(0.0);
        }
    }
    let g = p.gamma;
    let a12 = Coef::alpha_12();
    let a21 = Coef::alpha_21();
    let gap = &a12 - &a21;
    Ok(match label {
        HemLabel::Bulk12 => {
            // α_{1,2}²(α_{1,2}−α_{2,1})² · (−μγ²/4) · Res(−2π/(γ(α−α_{1,2})))
            let pre = kac_prefactor(&(&a12.pow(2) * &gap.pow(2)), g)?;
            pre * (-p.mu * g * g / 4.0) * (-2.0 * PI / g)
        }
        HemLabel::Bulk21 => {
            let pre = kac_prefactor(&a21.pow(2), g)?;
            pre * (p.mu * p.mu * g.powi(4) / 16.0) * residue_j1(p)?.stated
        }
        HemLabel::Boundary12 => {
            let pre = kac_prefactor(&(&(&Coef::int(2) * &a12) * &gap), g)?;
            pre * (-g / 4.0) * (p.mu_l + p.mu_r) * (-2.0 / g)
        }
        HemLabel::Boundary21 => {
            let r = boundary_residues(p)?;
            let two_a21 = kac_prefactor(&(&Coef::int(2) * &a21), g)?;
            let minus_gap = kac_prefactor(&(-&gap), g)?;
            let bulk_term = -p.mu * (g / 2.0) * minus_gap * r.res_i2;
            let left = p.mu_l * p.mu_l * (g * g / 8.0) * r.res_i11;
            let cross = -p.mu_l * p.mu_r * (g * g / 4.0) * r.res_ix11;
            let right = p.mu_r * p.mu_r * (g * g / 8.0) * r.res_i11;
            two_a21 * (bulk_term + left + cross + right)
        }
    })
}

pub fn hem_constant(label: HemLabel, p: &Params) -> Result<HemConstant> {
    p.validate()?;
    let phase = p.phase();
    if label.is_21() {
        reject_critical(p)?;
        if phase == Phase::Supercritical {
            return Ok(HemConstant { label, stated: 0.0, chained: 0.0, phase });
        }
    }
    Ok(HemConstant { label, stated: stated(label, p)?, chained: hem_chain(label, p)?, phase })
}

pub const TOL_CONIC: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FzzConic {
    pub value: f64,
    pub on_conic: bool,
}

pub fn fzz_conic(p: &Params) -> FzzConic {
    let value = fzz_bracket(p.gamma, p.mu, p.mu_l, p.mu_r);
    let scale = 1f64.max(p.mu_l * p.mu_l).max(p.mu_r * p.mu_r).max(p.mu);
    FzzConic { value, on_conic: value.abs() <= TOL_CONIC * scale }
}

/// Real roots `μ_R` of the bracket at fixed `(γ, μ_L, μ)`, ascending.
pub fn fzz_solve_mu_r(gamma: f64, mu_l: f64, mu: f64) -> Vec<f64> {
    let x = PI * gamma * gamma / 4.0;
    let (c, s) = (x.cos(), x.sin());
    let disc = mu_l * mu_l * c * c - mu_l * mu_l + mu * s;
    if disc < 0.0 {
        return Vec::new();
    }
    let r = disc.sqrt();
    if r == 0.0 {
        vec![mu_l * c]
    } else {
        vec![mu_l * c - r, mu_l * c + r]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(g: f64) -> Params {
        Params::new(g, 1.0, 1.0, 1.0).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn oracle_gamma(x: f64) -> f64 {
        statrs::function::gamma::gamma(x)
    }

    #[test]
    fn selberg22_examples() {
        let (a, b) = (0.7, 1.3);
        let beta = oracle_gamma(a) * oracle_gamma(b) / oracle_gamma(a + b);
        let v = selberg22(&SelbergArgs::new(a, b, 0.0)).unwrap();
        assert!(rel(v.value.re, beta * beta) < 1e-13);
        let v = selberg22(&SelbergArgs::new(1.0, 1.0, 0.5)).unwrap();
        assert!(rel(v.value.re, 1.0 / 3.0) < 1e-14);
        assert!(!v.pole_flag);
    }

    #[test]
    fn def_r_residue() {
        for g in [0.6, 1.0, 1.3] {
            let r = def_r_residue_engine(g).unwrap();
            let x = g * g / 4.0;
            let want = -(2.0 / g) * oracle_gamma(x) * oracle_gamma(1.0 - 2.0 * x) / oracle_gamma(1.0 - x);
            assert!(rel(r.re, want) < 1e-12, "{r} vs {want}");
            assert!(r.im.abs() < 1e-14);
        }
    }

    #[test]
    fn pole_without_direction_is_an_error() {
        let e = selberg22(&SelbergArgs::new(1.0, 0.25, -0.25)).unwrap_err();
        assert_eq!(e, HemError::PoleNeedsDirection);
    }

    #[test]
    fn double_pole_is_unsupported() {
        let base = SelbergArgs::new(0.0, 0.0, 0.3);
        let dir = SelbergArgs::new(1.0, 1.0, 0.0);
        assert_eq!(selberg22_along(&base, &dir, cx(0.0)).unwrap_err(), HemError::UnsupportedPoleOrder(2));
    }

    #[test]
    fn finite_part_matches_symmetric_limit() {
        // f(t) = R/t + C + O(t): C = (f(h) + f(−h))/2 + O(h²).
        let base = SelbergArgs::new(1.0, 0.25, -0.25);
        let dir = SelbergArgs::new(0.0, 1.0, 0.0);
        let s = selberg22_along(&base, &dir, cx(0.0)).unwrap();
        let f = |t: f64| selberg22(&base.add_scaled(&dir, t)).unwrap().value.re;
        let h = 1e-4;
        let sym = 0.5 * (f(h) + f(-h));
        assert!((sym - s.value.re).abs() < 1e-6 * s.value.re.abs().max(1.0));
        let r = s.residue.unwrap().re;
        assert!(rel(0.5 * (f(h) - f(-h)) * h, r) < 1e-6);
    }

    #[test]
    fn selberg21_examples() {
        let (a, b) = (0.3, 0.4);
        let beta = oracle_gamma(a) * oracle_gamma(b) / oracle_gamma(a + b);
        let want = (PI * a).sin() / (PI * (a + b)).sin() * beta * beta;
        let v = selberg21(&SelbergArgs::new(a, b, 0.0)).unwrap();
        assert!(rel(v.value.re, want) < 1e-13);
        // sin π(a+c) = 0 exactly
        let v = selberg21(&SelbergArgs::new(1.2, 0.3, -0.2)).unwrap();
        assert_eq!(v.value, cx(0.0));
    }

    #[test]
    fn neretin_examples() {
        let args = SelbergArgs::new(0.6, 2.0, -0.2);
        assert_eq!(neretin_df(&args, &args).unwrap().value, cx(0.0));
        let bad = SelbergArgs::new(0.65, 2.0, -0.2);
        assert!(matches!(neretin_df(&args, &bad), Err(HemError::InvalidParams(_))));
        // Equal-argument J_ℂ reproduces the first displayed line directly.
        let p = params(1.0);
        let (alpha, beta) = (-1.0, 1.0);
        let v = j_complex(alpha, beta, &p).unwrap().value.re;
        let a = j_complex_args(alpha, beta, 1.0);
        let s22 = selberg22(&a).unwrap().value.re;
        let sp = |x: f64| (PI * x).sin();
        let g = 1.0;
        let want = s22 * s22 * sp(g * alpha / 2.0) * sp(g * beta / 2.0) * sp(g / 2.0 * (alpha + g / 2.0))
            * sp(g / 2.0 * (beta + g / 2.0))
            * sp(g * g / 2.0)
            / (sp(g / 2.0 * (alpha + beta + g / 2.0)) * sp(g / 2.0 * (alpha + beta + g)) * sp(g * g / 4.0));
        assert!(rel(v, want) < 1e-12);
    }

    #[test]
    fn beta_slope_tends_to_leading_form() {
        let p = params(1.0);
        let a21 = p.alpha_21();
        let mut last = f64::INFINITY;
        for d in [1e-2, 1e-3, 1e-4] {
            let s = j_complex_beta_slope(a21 - d, &p).unwrap().re;
            let lead = j_complex_beta_slope_leading(a21 - d, &p).unwrap();
            let gap = (s / lead - 1.0).abs();
            assert!(gap < last);
            last = gap;
        }
        assert!(last < 1e-3);
        // The slope is the β-derivative of the full closed form.
        let alpha = a21 - 0.05;
        let h = 1e-6;
        let fd = (j_complex(alpha, h, &p).unwrap().value.re - j_complex(alpha, -h, &p).unwrap().value.re) / (2.0 * h);
        assert!(rel(fd, j_complex_beta_slope(alpha, &p).unwrap().re) < 1e-6);
    }

    #[test]
    fn residue_j1_forms() {
        let r = residue_j1(&params(1.0)).unwrap();
        let want = -2.0 * PI * PI * (oracle_gamma(0.25) / oracle_gamma(0.75)).powi(2);
        assert!(rel(r.stated, want) < 1e-13);
        assert!((r.stated + 172.79).abs() < 0.01);
        for g in [0.5, 0.8, 1.0, 1.2, 1.3, 1.4] {
            assert!(residue_j1(&params(g)).unwrap().relative_gap() < 1e-12);
        }
        assert!(matches!(residue_j1(&params(1.6)), Err(HemError::Phase { .. })));
    }

    #[test]
    fn boundary_residue_values() {
        let z = boundary_residues(&params(1.6)).unwrap();
        assert_eq!((z.res_i2, z.res_i11, z.res_ix11), (0.0, 0.0, 0.0));
        let r = boundary_residues(&params(1.0)).unwrap();
        let gg = oracle_gamma(0.25) * oracle_gamma(0.5) / oracle_gamma(0.75);
        assert!(rel(r.res_i11, -2.0 * gg) < 1e-13);
        assert!(rel(r.res_ix11 / r.res_i11, 0.5f64.sqrt()) < 1e-14);
        let crit = Params::new(2f64.sqrt(), 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(boundary_residues(&crit), Err(HemError::Phase { .. })));
    }

    #[test]
    fn constants_examples() {
        let c = hem_constant(HemLabel::Bulk12, &params(1.0)).unwrap();
        assert!(rel(c.stated, 4.5 * PI) < 1e-14);
        assert!(rel(c.chained, c.stated) < 1e-12);
        let c = hem_constant(HemLabel::Bulk21, &params(1.6)).unwrap();
        assert_eq!((c.stated, c.chained), (0.0, 0.0));
        let c = hem_constant(HemLabel::Boundary21, &params(1.0)).unwrap();
        assert!(rel(c.ratio().unwrap(), 2.0) < 1e-12);
        let zero = Params::new(1.0, 0.0, 0.0, 0.0).unwrap();
        for l in HemLabel::ALL {
            let c = hem_constant(l, &zero).unwrap();
            assert_eq!(c.stated.abs() + c.chained.abs(), 0.0, "{l}");
        }
    }

    #[test]
    fn fzz_examples() {
        let p = Params::new(1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(fzz_conic(&p).on_conic);
        let roots = fzz_solve_mu_r(1.0, 1.0, 1.0);
        assert_eq!(roots.len(), 2);
        for r in roots {
            assert!(fzz_bracket(1.0, 1.0, 1.0, r).abs() < 1e-12);
        }
        let m: f64 = 0.7;
        let x = PI / 4.0 * 1.21;
        let mu = m * m * (2.0 - 2.0 * x.cos()) / x.sin();
        assert!(fzz_bracket(1.1, mu, m, m).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn selberg_symmetry(a in 0.05f64..4.0, b in 0.05f64..4.0, c in -0.45f64..2.0) {
            let x = selberg22(&SelbergArgs::new(a, b, c));
            let y = selberg22(&SelbergArgs::new(b, a, c));
            if let (Ok(x), Ok(y)) = (x, y) {
                prop_assert!((x.value - y.value).norm() <= 1e-12 * x.value.norm());
            }
        }

        #[test]
        fn bulk_chains_match(g in 0.3f64..1.9, mu in 0.1f64..3.0) {
            prop_assume!((g - 2f64.sqrt()).abs() > 1e-3);
            let p = Params::new(g, mu, 0.3, 0.8).unwrap();
            for l in [HemLabel::Bulk12, HemLabel::Bulk21, HemLabel::Boundary12] {
                let c = hem_constant(l, &p).unwrap();
                if c.stated == 0.0 {
                    prop_assert_eq!(c.chained, 0.0);
                } else {
                    prop_assert!(rel(c.chained, c.stated) < 1e-10);
                }
            }
        }
    }
}
