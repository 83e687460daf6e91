//! Model parameters, Kac-table labels, conformal weights and integer partitions.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::HemError;

/// Relative half-width of the window around `γ = √2` treated as critical.
pub const EPS_PHASE: f64 = 1e-9;

/// Coupling and cosmological constants of the bulk/boundary theory.
///
/// `mu = 0` is allowed (free-field degeneration): every HEM constant then vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub gamma: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default, rename = "mu_l")]
    pub mu_l: f64,
    #[serde(default, rename = "mu_r")]
    pub mu_r: f64,
}

impl Params {
    pub fn new(gamma: f64, mu: f64, mu_l: f64, mu_r: f64) -> Result<Self, HemError> {
        let p = Self { gamma, mu, mu_l, mu_r };
        p.validate()?;
        Ok(p)
    }

    /// Params with only the coupling set.
    pub fn with_gamma(gamma: f64) -> Result<Self, HemError> {
        Self::new(gamma, 0.0, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<(), HemError> {
        if !(self.gamma > 0.0 && self.gamma < 2.0) {
            return Err(HemError::InvalidParams(format!(
                "gamma must lie in (0,2), got {}",
                self.gamma
            )));
        }
        for (name, v) in [("mu", self.mu), ("mu_l", self.mu_l), ("mu_r", self.mu_r)] {
            if v.is_nan() || v < 0.0 || !v.is_finite() {
                return Err(HemError::InvalidParams(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Background charge `Q = γ/2 + 2/γ`.
    pub fn q(&self) -> f64 {
        self.gamma / 2.0 + 2.0 / self.gamma
    }

    /// Central charge `c_L = 1 + 6Q²`.
    pub fn central_charge(&self) -> f64 {
        1.0 + 6.0 * self.q() * self.q()
    }

    /// `b = γ/2`, the formal symbol used by the exact engine.
    pub fn b(&self) -> f64 {
        self.gamma / 2.0
    }

    pub fn phase(&self) -> Phase {
        phase(self)
    }

    pub fn alpha_12(&self) -> f64 {
        kac_alpha(KacLabel::minus(1, 2), self)
    }

    pub fn alpha_21(&self) -> f64 {
        kac_alpha(KacLabel::minus(2, 1), self)
    }
}

/// Position of `γ` relative to `√2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Subcritical,
    Critical,
    Supercritical,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Phase::Subcritical => "subcritical",
            Phase::Critical => "critical",
            Phase::Supercritical => "supercritical",
        };
        f.write_str(s)
    }
}

pub fn phase(params: &Params) -> Phase {
    let crit = std::f64::consts::SQRT_2;
    if (params.gamma - crit).abs() <= EPS_PHASE * crit {
        Phase::Critical
    } else if params.gamma < crit {
        Phase::Subcritical
    } else {
        Phase::Supercritical
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KacSign {
    Plus,
    Minus,
}

/// Label `(r, s, ±)` of a degenerate momentum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KacLabel {
    pub r: u32,
    pub s: u32,
    pub sign: KacSign,
}

impl KacLabel {
    pub fn new(r: u32, s: u32, sign: KacSign) -> Result<Self, HemError> {
        if r == 0 || s == 0 {
            return Err(HemError::InvalidParams(format!("Kac indices must be positive, got ({r},{s})")));
        }
        Ok(Self { r, s, sign })
    }

    pub fn minus(r: u32, s: u32) -> Self {
        Self { r: r.max(1), s: s.max(1), sign: KacSign::Minus }
    }
}

impl fmt::Display for KacLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.sign {
            KacSign::Plus => '+',
            KacSign::Minus => '-',
        };
        write!(f, "{},{},{}", self.r, self.s, sign)
    }
}

/// Parses `"r,s"` (minus sign implied) or `"r,s,±"`.
impl FromStr for KacLabel {
    type Err = HemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || HemError::Usage(format!("expected Kac label 'r,s' or 'r,s,+/-', got '{s}'"));
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad());
        }
        let r: u32 = parts[0].parse().map_err(|_| bad())?;
        let k: u32 = parts[1].parse().map_err(|_| bad())?;
        let sign = match parts.get(2).copied() {
            None | Some("-") | Some("minus") => KacSign::Minus,
            Some("+") | Some("plus") => KacSign::Plus,
            Some(_) => return Err(bad()),
        };
        KacLabel::new(r, k, sign)
    }
}

/// `α_{r,s}` for the minus sign, `2Q − α_{r,s}` for the plus sign.
pub fn kac_alpha(label: KacLabel, params: &Params) -> f64 {
    let g = params.gamma;
    let minus = (1.0 - label.r as f64) * g / 2.0 + (1.0 - label.s as f64) * 2.0 / g;
    match label.sign {
        KacSign::Minus => minus,
        KacSign::Plus => 2.0 * params.q() - minus,
    }
}

/// Conformal weight `Δ_α = (α/2)(Q − α/2)`.
pub fn delta(alpha: Complex64, params: &Params) -> Complex64 {
    alpha / 2.0 * (params.q() - alpha / 2.0)
}

/// Non-increasing sequence of positive integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Sorts the parts; rejects zeros.
    pub fn new(mut parts: Vec<u32>) -> Result<Self, HemError> {
        if parts.contains(&0) {
            return Err(HemError::InvalidParams("partition parts must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn level(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn length(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All partitions of `n`, largest parts first.
    pub fn all_of(n: u32) -> Vec<Partition> {
        fn rec(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if n == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=max.min(n)).rev() {
                cur.push(p);
                rec(n - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", s.join(","))
    }
}

impl FromStr for Partition {
    type Err = HemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')').trim();
        if t.is_empty() {
            return Ok(Partition::empty());
        }
        let parts = t
            .split(',')
            .map(|x| x.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| HemError::Usage(format!("invalid partition '{s}'")))?;
        Partition::new(parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn at(g: f64) -> Params {
        Params::with_gamma(g).unwrap()
    }

    #[test]
    fn kac_examples() {
        for g in [0.3, 1.0, 1.7] {
            assert_eq!(kac_alpha(KacLabel::minus(1, 1), &at(g)), 0.0);
        }
        assert_eq!(kac_alpha(KacLabel::minus(2, 1), &at(1.0)), -0.5);
        assert_eq!(kac_alpha(KacLabel::minus(1, 2), &at(1.0)), -2.0);
        let p = at(1.0);
        let plus = kac_alpha(KacLabel::new(2, 1, KacSign::Plus).unwrap(), &p);
        assert!((plus - (2.0 * p.q() + 0.5)).abs() < 1e-15);
    }

    #[test]
    fn delta_examples() {
        let p = at(1.0);
        assert_eq!(delta(Complex64::new(0.0, 0.0), &p), Complex64::new(0.0, 0.0));
        assert!(delta(Complex64::new(2.0 * p.q(), 0.0), &p).norm() < 1e-15);
        assert!((delta(Complex64::new(p.q(), 0.0), &p).re - 1.5625).abs() < 1e-15);
    }

    #[test]
    fn phase_examples() {
        assert_eq!(at(1.0).phase(), Phase::Subcritical);
        assert_eq!(at(1.6).phase(), Phase::Supercritical);
        assert_eq!(at(std::f64::consts::SQRT_2).phase(), Phase::Critical);
    }

    #[test]
    fn kac_grid_identities() {
        for i in 1..=19 {
            let p = at(0.1 * i as f64);
            let (a12, a21) = (p.alpha_12(), p.alpha_21());
            assert!((a12 * a21 - 1.0).abs() <= 1e-14, "gamma={}", p.gamma);
            assert!((a12 + a21 + p.q()).abs() <= 1e-14);
            assert!(p.q() > 2.0 - 1e-15 && p.central_charge() > 25.0 - 1e-12);
            if p.gamma < std::f64::consts::SQRT_2 {
                assert!(a12 < a21);
            }
        }
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(Params::with_gamma(0.0).is_err());
        assert!(Params::with_gamma(2.0).is_err());
        assert!(Params::new(1.0, -1.0, 0.0, 0.0).is_err());
        assert!(Params::new(1.0, 0.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn label_and_partition_parsing() {
        let l: KacLabel = "1,2".parse().unwrap();
        assert_eq!(l, KacLabel::minus(1, 2));
        let l: KacLabel = "2,1,+".parse().unwrap();
        assert_eq!(l.sign, KacSign::Plus);
        assert!("0,1".parse::<KacLabel>().is_err());
        let p: Partition = "(1,2,1)".parse().unwrap();
        assert_eq!(p.parts(), &[2, 1, 1]);
        assert_eq!(p.level(), 4);
        assert_eq!(p.length(), 3);
        assert!("()".parse::<Partition>().unwrap().is_empty());
        assert_eq!(Partition::all_of(4).len(), 5);
    }

    proptest! {
        #[test]
        fn delta_reflection(re in -7.0f64..7.0, im in -7.0f64..7.0, g in 0.05f64..1.95) {
            let p = at(g);
            let a = Complex64::new(re, im);
            let r = Complex64::new(2.0 * p.q(), 0.0) - a;
            prop_assert!((delta(a, &p) - delta(r, &p)).norm() <= 1e-12);
        }

        #[test]
        fn minus_kac_nonpositive(r in 1u32..20, s in 1u32..20, g in 0.05f64..1.95) {
            prop_assert!(kac_alpha(KacLabel::minus(r, s), &at(g)) <= 0.0);
        }
    }
}
