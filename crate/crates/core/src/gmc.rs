//! Desk-scale Gaussian multiplicative chaos on the unit disc and half-disc.
//!
//! The log-correlated field is split as `X = X_𝔻 + Pφ`: the Dirichlet part
//! is drawn from a dense Cholesky factor of its covariance, the harmonic
//! part from truncated circle modes. Grid values are Gaussian
//! mollifications of the field at a cell-sized scale, which keeps every
//! covariance matrix positive definite.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{HemError, Result};
use crate::params::Params;
use crate::special::exp_integral_e1;

pub const MAX_GRID_POINTS: usize = 4096;
pub const DEFAULT_GRID_POINTS: usize = 2048;
pub const DEFAULT_TMAX: f64 = 6.0;
pub const DEFAULT_MODES: usize = 64;
/// Regularization scale relative to the local cell size: the radius of the
/// disc with the cell's area, `1/√π`.
pub const EPS_PER_CELL: f64 = 0.564_189_583_547_756_3;
pub const SCALING_TOL: f64 = 0.15;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const JITTER_START: f64 = 1e-8;
const JITTER_MAX: f64 = 1e-2;
const BATCH: usize = 250;
/// Angle of the probe insertion `w = r·e^{iθ}`; off the grid rays.
const PROBE_ANGLE: f64 = 0.3;

/// `log 1/|x|` averaged against a centred 2-D Gaussian of per-coordinate
/// variance `s`, at `|x| = r`.
pub fn mollified_log(r: f64, s: f64) -> f64 {
    if r == 0.0 {
        -0.5 * (2.0 * s).ln() + 0.5 * EULER_GAMMA
    } else {
        -r.ln() - 0.5 * exp_integral_e1(r * r / (2.0 * s))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldDomain {
    Disc,
    HalfDisc,
}

/// Log-polar layout: ring `k` sits at `t = (k + ½)·dt`, radius `e^{−t}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingLayout {
    pub rings: usize,
    pub per_ring: usize,
    pub dt: f64,
    pub tmax: f64,
}

impl RingLayout {
    /// Smallest insertion radius resolved by at least three rings.
    pub fn min_resolved_radius(&self) -> f64 {
        (-self.tmax + 3.0 * self.dt).exp()
    }
}

/// Grid points with cell measure (area in the bulk, length on `(−1,1)`) and
/// regularization scale.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    pub domain: FieldDomain,
    pub points: Vec<Complex64>,
    pub cell: Vec<f64>,
    pub eps: Vec<f64>,
    pub on_boundary: Vec<bool>,
    pub layout: Option<RingLayout>,
}

impl PointSet {
    /// Staggered log-polar grid with at most `grid_n` points, `tmax = 6`.
    pub fn log_polar(domain: FieldDomain, grid_n: usize) -> Result<Self> {
        if !(32..=MAX_GRID_POINTS).contains(&grid_n) {
            return Err(HemError::Usage(format!("grid_n must lie in 32..={MAX_GRID_POINTS}, got {grid_n}")));
        }
        let rings = ((grid_n / 2) as f64).sqrt().floor() as usize;
        let per_ring = match domain {
            FieldDomain::Disc => grid_n / rings,
            FieldDomain::HalfDisc => grid_n / rings - 2,
        };
        let tmax = DEFAULT_TMAX;
        let dt = tmax / rings as f64;
        let span = match domain {
            FieldDomain::Disc => 2.0 * PI,
            FieldDomain::HalfDisc => PI,
        };
        let dth = span / per_ring as f64;
        let mut set = PointSet {
            domain,
            points: Vec::new(),
            cell: Vec::new(),
            eps: Vec::new(),
            on_boundary: Vec::new(),
            layout: Some(RingLayout { rings, per_ring, dt, tmax }),
        };
        for k in 0..rings {
            let r = (-(k as f64 + 0.5) * dt).exp();
            let shift = 0.5 * (k % 2) as f64;
            for j in 0..per_ring {
                let th = (j as f64 + shift) * dth;
                let th = if domain == FieldDomain::HalfDisc { th + 0.25 * dth } else { th };
                set.push(Complex64::from_polar(r, th), r * r * dt * dth, EPS_PER_CELL * r * (dt * dth).sqrt(), false);
            }
            if domain == FieldDomain::HalfDisc {
                for x in [r, -r] {
                    set.push(Complex64::new(x, 0.0), r * dt, 0.5 * r * dt, true);
                }
            }
        }
        Ok(set)
    }

    /// `per_circle` equispaced points on each circle `|z| = e^{−t}`.
    pub fn circles(t_values: &[f64], per_circle: usize) -> Result<Self> {
        if t_values.iter().any(|t| *t < 0.0) || per_circle < 8 || t_values.len() * per_circle > MAX_GRID_POINTS {
            return Err(HemError::Usage("circles need t ≥ 0, ≥ 8 points each, within the grid budget".into()));
        }
        let mut set = PointSet {
            domain: FieldDomain::Disc,
            points: Vec::new(),
            cell: Vec::new(),
            eps: Vec::new(),
            on_boundary: Vec::new(),
            layout: None,
        };
        for t in t_values {
            let r = (-t).exp();
            let arc = 2.0 * PI * r / per_circle as f64;
            for j in 0..per_circle {
                set.push(Complex64::from_polar(r, 2.0 * PI * j as f64 / per_circle as f64), arc, 0.5 * arc, false);
            }
        }
        Ok(set)
    }

    fn push(&mut self, z: Complex64, cell: f64, eps: f64, boundary: bool) {
        self.points.push(z);
        self.cell.push(cell);
        self.eps.push(eps);
        self.on_boundary.push(boundary);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Variance of the Gaussian mollifier at point `i`, chosen so that the
    /// regularized variance is exactly `−log ε_i`.
    pub fn mollifier_var(&self, i: usize) -> f64 {
        self.eps[i] * self.eps[i] * EULER_GAMMA.exp() / 4.0
    }

    fn pair_var(&self, i: usize, j: usize) -> f64 {
        self.mollifier_var(i) + self.mollifier_var(j)
    }

    /// `G(z, w)` for fields mollified with total Gaussian variance `s`:
    /// `log 1/|z−w|` (disc) plus the image term `log 1/|z−w̄|` (half-disc).
    pub fn green(&self, z: Complex64, w: Complex64, s: f64) -> f64 {
        match self.domain {
            FieldDomain::Disc => mollified_log((z - w).norm(), s),
            FieldDomain::HalfDisc => mollified_log((z - w).norm(), s) + mollified_log((z - w.conj()).norm(), s),
        }
    }

    /// Covariance of the harmonic part, `log 1/|1−zw̄|` (+ `log 1/|1−zw|`),
    /// mollified like [`Self::green`] so that `X_𝔻` vanishes on the circle.
    fn harmonic_green(&self, z: Complex64, w: Complex64, s: f64) -> f64 {
        match self.domain {
            FieldDomain::Disc => mollified_log((1.0 - z * w.conj()).norm(), s),
            FieldDomain::HalfDisc => {
                mollified_log((1.0 - z * w.conj()).norm(), s) + mollified_log((1.0 - z * w).norm(), s)
            }
        }
    }

    /// Regularized full covariance `G(z_i, z_j)`.
    pub fn covariance(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| self.green(self.points[i], self.points[j], self.pair_var(i, j)))
    }
}

/// One joint field sample with its decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSample {
    pub domain: FieldDomain,
    pub points: Vec<Complex64>,
    pub values: Vec<f64>,
    pub dirichlet: Vec<f64>,
    pub harmonic: Vec<f64>,
}

/// Pre-factorized sampler, shared read-only across batches.
pub struct FieldSampler {
    pub points: PointSet,
    chol: DMatrix<f64>,
    pub jitter: f64,
    /// Columns `2Re z^n`, `−2Im z^n` (disc) or `2Re z^n` (half-disc), scaled
    /// by the mode standard deviations.
    modes: DMatrix<f64>,
}

impl FieldSampler {
    pub fn new(points: PointSet, n_modes: usize) -> Result<Self> {
        let n = points.len();
        let dirichlet = DMatrix::from_fn(n, n, |i, j| {
            let (z, w) = (points.points[i], points.points[j]);
            let v = points.pair_var(i, j);
            points.green(z, w, v) - points.harmonic_green(z, w, v)
        });
        let mut jitter = 0.0;
        let chol = loop {
            let mut m = dirichlet.clone();
            for i in 0..n {
                m[(i, i)] += jitter;
            }
            if let Some(c) = m.cholesky() {
                break c.l();
            }
            jitter = if jitter == 0.0 { JITTER_START } else { 2.0 * jitter };
            if jitter > JITTER_MAX {
                return Err(HemError::Conditioning(format!(
                    "Dirichlet covariance not positive definite with jitter up to {JITTER_MAX}"
                )));
            }
        };
        let cols_per_mode = match points.domain {
            FieldDomain::Disc => 2,
            FieldDomain::HalfDisc => 1,
        };
        let modes = DMatrix::from_fn(n, cols_per_mode * n_modes, |i, c| {
            let order = c / cols_per_mode + 1;
            let zn = points.points[i].powu(order as u32);
            match (points.domain, c % cols_per_mode) {
                (FieldDomain::Disc, 0) => 2.0 * zn.re * (0.25 / order as f64).sqrt(),
                (FieldDomain::Disc, _) => -2.0 * zn.im * (0.25 / order as f64).sqrt(),
                (FieldDomain::HalfDisc, _) => 2.0 * zn.re * (0.5 / order as f64).sqrt(),
            }
        });
        Ok(Self { points, chol, jitter, modes })
    }

    pub fn log_polar(domain: FieldDomain, grid_n: usize) -> Result<Self> {
        Self::new(PointSet::log_polar(domain, grid_n)?, DEFAULT_MODES)
    }

    fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        rng
    }

    /// `(X_𝔻, Pφ)` for `count` samples as `n × count` matrices.
    fn draw(&self, rng: &mut ChaCha8Rng, count: usize) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = self.points.len();
        let xi = DMatrix::from_fn(n, count, |_, _| StandardNormal.sample(&mut *rng));
        let eta = DMatrix::from_fn(self.modes.ncols(), count, |_, _| StandardNormal.sample(&mut *rng));
        (&self.chol * xi, &self.modes * eta)
    }

    pub fn sample(&self, seed: u64) -> FieldSample {
        let (d, h) = self.draw(&mut Self::rng(seed, 0), 1);
        FieldSample {
            domain: self.points.domain,
            points: self.points.points.clone(),
            values: (&d + &h).column(0).iter().copied().collect(),
            dirichlet: d.column(0).iter().copied().collect(),
            harmonic: h.column(0).iter().copied().collect(),
        }
    }

    /// Runs `reduce` over `samples` fields in fixed batches (each batch on its
    /// own ChaCha stream) and returns the per-batch outputs in batch order.
    pub fn map_batches<T, F>(&self, samples: usize, seed: u64, reduce: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&DMatrix<f64>) -> T + Sync,
    {
        let batches = samples.div_ceil(BATCH);
        (0..batches)
            .into_par_iter()
            .map(|b| {
                let count = BATCH.min(samples - b * BATCH);
                let (d, h) = self.draw(&mut Self::rng(seed, b as u64), count);
                reduce(&(d + h))
            })
            .collect()
    }

    /// Covariance of the sampled vector, `LLᵀ + (mode part)`, column `k`.
    pub fn covariance_column(&self, k: usize) -> DVector<f64> {
        &self.chol * self.chol.row(k).transpose() + &self.modes * self.modes.row(k).transpose()
    }

    pub fn variance(&self, k: usize) -> f64 {
        self.chol.row(k).norm_squared() + self.modes.row(k).norm_squared()
    }
}

/// `sample_field`: one joint sample of `X = X_𝔻 + Pφ` on a log-polar grid.
pub fn sample_field(domain: FieldDomain, grid_n: usize, seed: u64) -> Result<FieldSample> {
    Ok(FieldSampler::log_polar(domain, grid_n)?.sample(seed))
}

/// Regularized chaos measure weights `ε^{γ²/2}e^{γX}·cell` (bulk) and
/// `ε^{γ²/4}e^{γX/2}·cell` (boundary).
pub fn chaos_weights(points: &PointSet, gamma: f64, field: &[f64]) -> Vec<f64> {
    (0..points.len())
        .map(|i| {
            let g = if points.on_boundary[i] { gamma / 2.0 } else { gamma };
            points.cell[i] * points.eps[i].powf(g * g / 2.0) * (g * field[i]).exp()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Insertion {
    pub point: Complex64,
    pub charge: f64,
}

/// `E[exp(−μ∫ e^{γ(αG(·,0) + Σ q_j G(·,w_j))} dM_γ − μ_∂∫(…) dL_γ)]` at zero
/// mode `c = 0`, insertions applied as Girsanov shifts of the field mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChaosQuery {
    pub gamma: f64,
    pub alpha: f64,
    pub mu: f64,
    pub mu_boundary: f64,
    pub insertions: Vec<Insertion>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChaosEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl ChaosQuery {
    fn check(&self, points: &PointSet) -> Result<()> {
        let params = Params::with_gamma(self.gamma)?;
        let q = params.q();
        if self.mu < 0.0 || self.mu_boundary < 0.0 {
            return Err(HemError::InvalidParams("cosmological constants must be non-negative".into()));
        }
        for (what, charge) in std::iter::once(("alpha", self.alpha)).chain(self.insertions.iter().map(|w| ("insertion", w.charge))) {
            if charge >= q {
                return Err(HemError::Domain(format!(
                    "{what} charge {charge} ≥ Q = {q}: non-integrable GMC singularity"
                )));
            }
        }
        for w in &self.insertions {
            let inside = w.point.norm() < 1.0 && (points.domain == FieldDomain::Disc || w.point.im >= 0.0);
            if !inside {
                return Err(HemError::Domain(format!("insertion {} outside the domain", w.point)));
            }
        }
        Ok(())
    }

    /// Deterministic part of the integrand at each grid point.
    fn shift_factors(&self, points: &PointSet) -> Vec<f64> {
        (0..points.len())
            .map(|i| {
                let z = points.points[i];
                let e = points.mollifier_var(i);
                let g = if points.on_boundary[i] { self.gamma / 2.0 } else { self.gamma };
                let mut s = self.alpha * points.green(z, Complex64::new(0.0, 0.0), e);
                for w in &self.insertions {
                    s += w.charge * points.green(z, w.point, e);
                }
                let mu = if points.on_boundary[i] { self.mu_boundary } else { self.mu };
                mu * (g * s).exp()
            })
            .collect()
    }
}

fn mean_and_error(sums: &[(f64, f64, usize)]) -> (f64, f64, usize) {
    let (s1, s2, n) = sums.iter().fold((0.0, 0.0, 0usize), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let nf = n as f64;
    let mean = s1 / nf;
    let var = (s2 / nf - mean * mean).max(0.0) * nf / (nf - 1.0).max(1.0);
    (mean, (var / nf).sqrt(), n)
}

/// Per-sample chaos integrals `∫ f dM` for several weight vectors at once.
fn chaos_functionals(
    sampler: &FieldSampler,
    gamma: f64,
    weights: &[Vec<f64>],
    samples: usize,
    seed: u64,
) -> Vec<Vec<(f64, f64, usize)>> {
    let pts = &sampler.points;
    let exps: Vec<f64> = (0..pts.len())
        .map(|i| if pts.on_boundary[i] { gamma / 2.0 } else { gamma })
        .collect();
    let base: Vec<f64> = (0..pts.len()).map(|i| pts.cell[i] * pts.eps[i].powf(exps[i] * exps[i] / 2.0)).collect();
    sampler.map_batches(samples, seed, |x| {
        let mut acc = vec![(0.0, 0.0, 0usize); weights.len()];
        for col in x.column_iter() {
            let m: Vec<f64> = col.iter().zip(&exps).zip(&base).map(|((v, g), b)| b * (g * v).exp()).collect();
            for (a, w) in acc.iter_mut().zip(weights) {
                let integral: f64 = w.iter().zip(&m).map(|(p, q)| p * q).sum();
                let v = (-integral).exp();
                a.0 += v;
                a.1 += v * v;
                a.2 += 1;
            }
        }
        acc
    })
}

fn collect_estimates(batches: Vec<Vec<(f64, f64, usize)>>, k: usize, seed: u64) -> Vec<ChaosEstimate> {
    (0..k)
        .map(|i| {
            let per: Vec<_> = batches.iter().map(|b| b[i]).collect();
            let (mean, std_error, samples) = mean_and_error(&per);
            ChaosEstimate { mean, std_error, samples, seed }
        })
        .collect()
}

pub fn chaos_integral(sampler: &FieldSampler, query: &ChaosQuery, samples: usize, seed: u64) -> Result<ChaosEstimate> {
    query.check(&sampler.points)?;
    if samples < 2 {
        return Err(HemError::Usage("at least two samples are needed".into()));
    }
    let w = query.shift_factors(&sampler.points);
    Ok(collect_estimates(chaos_functionals(sampler, query.gamma, &[w], samples, seed), 1, seed)[0])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub radius: f64,
    /// `log(|w|^{−γα}·E[…])`
    pub log_mean: f64,
    /// standard error of `log_mean`
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub gamma: f64,
    pub alpha: f64,
    pub mu: f64,
    pub frozen: bool,
    pub points: Vec<ScalingPoint>,
    pub slope: f64,
    pub slope_std_error: f64,
    pub target: f64,
    pub pass: bool,
    pub samples: usize,
    pub grid_points: usize,
    pub seed: u64,
}

/// Target slope of `log Ψ_α(w)` against `log|w|` for one `γ` insertion.
pub fn scaling_target(alpha: f64, params: &Params) -> f64 {
    let excess = alpha + params.gamma - params.q();
    -params.gamma * alpha + if excess > 0.0 { 0.5 * excess * excess } else { 0.0 }
}

/// Weighted least-squares line; returns `(slope, intercept, slope s.e.)`.
pub fn weighted_line(xs: &[f64], ys: &[f64], sigmas: &[f64]) -> (f64, f64, f64) {
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((x, y), s) in xs.iter().zip(ys).zip(sigmas) {
        let w = 1.0 / s.max(1e-6).powi(2);
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    let det = sw * sxx - sx * sx;
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    (slope, intercept, (sw / det).sqrt())
}

/// Fits the small-`|w|` exponent of `Ψ_α(w)` with one `γ` insertion at
/// `w = r·e^{0.3i}` for each radius, using common field samples.
pub fn scaling_fit(
    sampler: &FieldSampler,
    params: &Params,
    alpha: f64,
    radii: &[f64],
    samples: usize,
    seed: u64,
) -> Result<ScalingFit> {
    let gamma = params.gamma;
    let excess = alpha + gamma - params.q();
    if excess.abs() < 0.05 {
        return Err(HemError::Domain(format!("α + γ − Q = {excess} too close to 0 for a definite regime")));
    }
    if radii.len() < 4 {
        return Err(HemError::Usage("scaling fit needs at least 4 radii".into()));
    }
    let (lo, hi) = radii.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(*r), b.max(*r)));
    if (hi / lo).log10() < 1.5 {
        return Err(HemError::Usage("radii must span at least 1.5 decades".into()));
    }
    if let Some(layout) = sampler.points.layout {
        if lo < layout.min_resolved_radius() {
            return Err(HemError::Resolution(format!(
                "radius {lo} below three ring spacings of the grid (min {})",
                layout.min_resolved_radius()
            )));
        }
    }
    if hi >= 1.0 {
        return Err(HemError::Usage("radii must lie inside the unit disc".into()));
    }
    let frozen = excess > 0.0;
    // small μ keeps the frozen-regime expectation away from 0
    let mu = if frozen { 5e-3 } else { 1.0 };
    let queries: Vec<ChaosQuery> = radii
        .iter()
        .map(|r| ChaosQuery {
            gamma,
            alpha,
            mu,
            mu_boundary: 0.0,
            insertions: vec![Insertion { point: Complex64::from_polar(*r, PROBE_ANGLE), charge: gamma }],
        })
        .collect();
    for q in &queries {
        q.check(&sampler.points)?;
    }
    let weights: Vec<Vec<f64>> = queries.iter().map(|q| q.shift_factors(&sampler.points)).collect();
    let est = collect_estimates(chaos_functionals(sampler, gamma, &weights, samples, seed), radii.len(), seed);
    let points: Vec<ScalingPoint> = radii
        .iter()
        .zip(&est)
        .map(|(r, e)| ScalingPoint {
            radius: *r,
            log_mean: -gamma * alpha * r.ln() + e.mean.ln(),
            std_error: e.std_error / e.mean,
        })
        .collect();
    let xs: Vec<f64> = points.iter().map(|p| p.radius.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.log_mean).collect();
    let ss: Vec<f64> = points.iter().map(|p| p.std_error).collect();
    let (slope, _, slope_std_error) = weighted_line(&xs, &ys, &ss);
    let target = scaling_target(alpha, params);
    Ok(ScalingFit {
        gamma,
        alpha,
        mu,
        frozen,
        points,
        slope,
        slope_std_error,
        target,
        pass: (slope - target).abs() <= SCALING_TOL,
        samples,
        grid_points: sampler.points.len(),
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialReport {
    pub t_values: Vec<f64>,
    /// empirical variance of the circle average at radius `e^{−t}`
    pub variances: Vec<f64>,
    pub slope: f64,
    pub slope_ok: bool,
    /// sample correlation of `B_{t_last} − B_{t_first}` with the lateral
    /// field at one point of the first circle
    pub correlation: f64,
    pub p_value: f64,
    pub independent: bool,
    pub samples: usize,
    pub seed: u64,
}

fn two_sided_p(z: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).expect("unit normal");
    2.0 * (1.0 - n.cdf(z.abs()))
}

/// Checks the radial decomposition `X(e^{−t+iθ}) = B_t + φ_t(e^{iθ})`:
/// `Var B_t` grows with unit slope and `B` increments are uncorrelated with
/// the lateral field.
pub fn radial_decomposition_check(t_values: &[f64], samples: usize, seed: u64) -> Result<RadialReport> {
    if t_values.len() < 2 || samples < 10 {
        return Err(HemError::Usage("need ≥ 2 circles and ≥ 10 samples".into()));
    }
    let per = 128;
    let sampler = FieldSampler::new(PointSet::circles(t_values, per)?, DEFAULT_MODES)?;
    let k = t_values.len();
    let rows: Vec<Vec<(Vec<f64>, f64)>> = sampler.map_batches(samples, seed, |x| {
        x.column_iter()
            .map(|col| {
                let avgs: Vec<f64> = (0..k).map(|c| col.rows(c * per, per).mean()).collect();
                let lateral = col[0] - avgs[0];
                (avgs, lateral)
            })
            .collect()
    });
    let rows: Vec<(Vec<f64>, f64)> = rows.into_iter().flatten().collect();
    let n = rows.len() as f64;
    let variances: Vec<f64> = (0..k)
        .map(|c| {
            let m = rows.iter().map(|r| r.0[c]).sum::<f64>() / n;
            rows.iter().map(|r| (r.0[c] - m).powi(2)).sum::<f64>() / (n - 1.0)
        })
        .collect();
    let slope = crate::quadrature::ols_slope(t_values, &variances);
    let inc: Vec<f64> = rows.iter().map(|r| r.0[k - 1] - r.0[0]).collect();
    let lat: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let correlation = pearson(&inc, &lat);
    let z = correlation.clamp(-0.999_999, 0.999_999).atanh() * (n - 3.0).sqrt();
    let p_value = two_sided_p(z);
    Ok(RadialReport {
        t_values: t_values.to_vec(),
        variances,
        slope,
        slope_ok: (slope - 1.0).abs() <= 0.1,
        correlation,
        p_value,
        independent: p_value > 0.01,
        samples,
        seed,
    })
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GirsanovCheck {
    pub reweighted: ChaosEstimate,
    pub shifted: ChaosEstimate,
    /// `|difference| / combined standard error`
    pub z_score: f64,
    pub consistent: bool,
}

/// Compares two estimators of a charge-`γ` insertion at grid point `k`:
/// reweighting by `e^{γX(z_k) − γ²Var/2}` against shifting the field mean by
/// `γ·Cov(X, X(z_k))`.
pub fn girsanov_check(sampler: &FieldSampler, gamma: f64, mu: f64, k: usize, samples: usize, seed: u64) -> Result<GirsanovCheck> {
    Params::with_gamma(gamma)?;
    if k >= sampler.points.len() {
        return Err(HemError::Usage(format!("grid index {k} out of range")));
    }
    let pts = &sampler.points;
    let shift = sampler.covariance_column(k);
    let var_k = sampler.variance(k);
    let base: Vec<f64> = (0..pts.len()).map(|i| pts.cell[i] * pts.eps[i].powf(gamma * gamma / 2.0)).collect();
    let out = sampler.map_batches(samples, seed, |x| {
        let mut acc = [(0.0, 0.0, 0usize); 2];
        for col in x.column_iter() {
            let plain: f64 = col.iter().zip(&base).map(|(v, b)| b * (gamma * v).exp()).sum();
            let moved: f64 =
                col.iter().zip(shift.iter()).zip(&base).map(|((v, s), b)| b * (gamma * (v + gamma * s)).exp()).sum();
            let rw = (gamma * col[k] - 0.5 * gamma * gamma * var_k).exp() * (-mu * plain).exp();
            let sh = (-mu * moved).exp();
            for (a, v) in acc.iter_mut().zip([rw, sh]) {
                a.0 += v;
                a.1 += v * v;
                a.2 += 1;
            }
        }
        acc.to_vec()
    });
    let est = collect_estimates(out, 2, seed);
    let z = (est[0].mean - est[1].mean).abs() / est[0].std_error.hypot(est[1].std_error);
    Ok(GirsanovCheck { reweighted: est[0], shifted: est[1], z_score: z, consistent: z <= 3.0 })
}

/// Mean total chaos mass of the grid region over `samples` fields.
pub fn mean_total_mass(sampler: &FieldSampler, gamma: f64, samples: usize, seed: u64) -> (f64, f64) {
    let pts = &sampler.points;
    let sums = sampler.map_batches(samples, seed, |x| {
        let mut acc = (0.0, 0.0, 0usize);
        for col in x.column_iter() {
            let field: Vec<f64> = col.iter().copied().collect();
            let m: f64 = chaos_weights(pts, gamma, &field).iter().sum();
            acc.0 += m;
            acc.1 += m * m;
            acc.2 += 1;
        }
        acc
    });
    let (mean, se, _) = mean_and_error(&sums);
    (mean, se)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(n: usize) -> FieldSampler {
        FieldSampler::log_polar(FieldDomain::Disc, n).unwrap()
    }

    #[test]
    fn grid_shapes() {
        let p = PointSet::log_polar(FieldDomain::Disc, 2048).unwrap();
        assert_eq!(p.len(), 2048);
        let l = p.layout.unwrap();
        assert_eq!((l.rings, l.per_ring), (32, 64));
        let h = PointSet::log_polar(FieldDomain::HalfDisc, 2048).unwrap();
        assert!(h.len() <= 2048);
        assert!(h.points.iter().all(|z| z.im >= 0.0 && z.norm() < 1.0));
        assert_eq!(h.on_boundary.iter().filter(|b| **b).count(), 2 * 32);
        assert!(PointSet::log_polar(FieldDomain::Disc, 5000).is_err());
    }

    #[test]
    fn harmonic_part_vanishes_at_origin() {
        // every mode z^n vanishes at 0
        let mut set = PointSet::log_polar(FieldDomain::Disc, 128).unwrap();
        set.push(Complex64::new(0.0, 0.0), 1e-3, 1e-2, false);
        let s = FieldSampler::new(set, DEFAULT_MODES).unwrap().sample(3);
        assert_eq!(*s.harmonic.last().unwrap(), 0.0);
        for ((v, d), h) in s.values.iter().zip(&s.dirichlet).zip(&s.harmonic) {
            assert!((v - d - h).abs() < 1e-12);
        }
    }

    #[test]
    fn pointwise_variance_matches_regularized_green() {
        let s = disc(512);
        let k = 200;
        let var_pred = -s.points.eps[k].ln();
        let n = 2000;
        let vals: Vec<f64> = s.map_batches(n, 11, |x| x.row(k).iter().copied().collect::<Vec<_>>()).concat();
        let m = vals.iter().sum::<f64>() / n as f64;
        let var = vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        let se = var_pred * (2.0 / (n as f64 - 1.0)).sqrt();
        assert!((var - var_pred).abs() < 3.0 * se, "{var} vs {var_pred} ± {se}");
    }

    #[test]
    fn two_point_covariance_is_log_correlated() {
        let s = disc(512);
        let pts = &s.points.points;
        let (i, j) = (100, 101);
        let want = -(pts[i] - pts[j]).norm().ln();
        let n = 5000;
        let pairs: Vec<(f64, f64)> = s.map_batches(n, 5, |x| x.column_iter().map(|c| (c[i], c[j])).collect::<Vec<_>>()).concat();
        let mi = pairs.iter().map(|p| p.0).sum::<f64>() / n as f64;
        let mj = pairs.iter().map(|p| p.1).sum::<f64>() / n as f64;
        let cov = pairs.iter().map(|p| (p.0 - mi) * (p.1 - mj)).sum::<f64>() / (n as f64 - 1.0);
        assert!(((cov - want) / want).abs() <= 0.05, "{cov} vs {want}");
    }

    #[test]
    fn chaos_integral_trivial_limits_and_monotonicity() {
        let s = disc(512);
        let mut q = ChaosQuery { gamma: 1.0, alpha: 0.0, mu: 0.0, mu_boundary: 0.0, insertions: vec![] };
        let e = chaos_integral(&s, &q, 100, 1).unwrap();
        assert_eq!(e.mean, 1.0);
        let mut last = 1.0;
        for mu in [0.1, 0.5, 1.0, 2.0] {
            q.mu = mu;
            let e = chaos_integral(&s, &q, 300, 1).unwrap();
            assert!(e.mean < last);
            last = e.mean;
        }
        q.alpha = 3.0;
        assert!(matches!(chaos_integral(&s, &q, 10, 1), Err(HemError::Domain(_))));
    }

    #[test]
    fn total_mass_is_stable_under_refinement() {
        let (a, _) = mean_total_mass(&disc(512), 1.0, 500, 2);
        let (b, _) = mean_total_mass(&disc(2048), 1.0, 500, 2);
        assert!(((a - b) / b).abs() < 0.1, "{a} vs {b}");
        assert!(((b - PI) / PI).abs() < 0.1);
    }

    #[test]
    fn girsanov_estimators_agree() {
        let s = disc(512);
        let r = girsanov_check(&s, 1.0, 1.0, 260, 4000, 9).unwrap();
        assert!(r.consistent, "{r:?}");
    }

    #[test]
    fn radial_decomposition() {
        let r = radial_decomposition_check(&[0.0, 0.5, 1.0, 1.5, 2.0], 2000, 4).unwrap();
        assert!(r.variances[0] < 1e-3);
        assert!(r.slope_ok && r.independent, "{r:?}");
    }

    #[test]
    fn scaling_fit_rejects_bad_inputs() {
        let s = disc(512);
        let p = Params::with_gamma(1.0).unwrap();
        assert!(matches!(scaling_fit(&s, &p, -1.0, &[0.1, 0.2, 0.3, 0.4], 10, 1), Err(HemError::Usage(_))));
        assert!(matches!(
            scaling_fit(&s, &p, -1.0, &[1e-3, 0.01, 0.1, 0.4], 10, 1),
            Err(HemError::Resolution(_))
        ));
        assert!((scaling_target(2.0, &Params::with_gamma(1.5).unwrap()) + 1.996).abs() < 1e-3);
        assert_eq!(scaling_target(-1.0, &p), 1.0);
    }

    #[test]
    fn batches_are_deterministic() {
        let s = disc(128);
        let a = s.map_batches(600, 3, |x| x.sum());
        let b = s.map_batches(600, 3, |x| x.sum());
        assert_eq!(a, b);
    }
}
