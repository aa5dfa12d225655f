//! Sampling of characteristic functions and Fourier inversion to densities.
//!
//! `density(u) = (1/√(2π)) ∫ F(x) e^{−iux} dx`, computed with composite
//! Simpson weights on a uniform odd grid over `[−x_max, x_max]`. Masses use
//! `Σ density·Δu/√(2π)`.

use crate::coefficients::LambdaMode;
use crate::error::{domain, Error, Result};
use crate::local_factors::{tail_error_estimate, QTildeEvaluator, TorusFactor};
use crate::par;
use crate::primes;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::BTreeMap;
use std::f64::consts::PI;

pub type Metadata = BTreeMap<String, serde_json::Value>;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Below this σ the densities decay slowly and grids are flagged.
pub const SLOW_DECAY_SIGMA: f64 = 0.55;

/// A characteristic function `F(x)` of a real random variable.
pub trait CharacteristicFunction: Sync {
    fn eval(&self, x: f64) -> Result<Complex64>;

    /// Provenance recorded in grids sampled from this function.
    fn metadata(&self) -> Metadata {
        Metadata::new()
    }
}

/// Wraps a closure as a characteristic function.
pub struct FnHandle<F> {
    f: F,
    meta: Metadata,
}

pub fn handle<F>(f: F) -> FnHandle<F>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    FnHandle { f, meta: Metadata::new() }
}

impl<F> FnHandle<F> {
    pub fn with_metadata(mut self, key: &str, value: serde_json::Value) -> Self {
        self.meta.insert(key.to_string(), value);
        self
    }
}

impl<F: Fn(f64) -> Complex64 + Sync> CharacteristicFunction for FnHandle<F> {
    fn eval(&self, x: f64) -> Result<Complex64> {
        Ok((self.f)(x))
    }

    fn metadata(&self) -> Metadata {
        self.meta.clone()
    }
}

/// `M̃_{σ,P(y)}(x)`: product over `p ≤ y` of torus factors.
pub struct MTildeFunction {
    sigma: f64,
    y: f64,
    factors: Vec<TorusFactor>,
}

impl MTildeFunction {
    pub fn new(sigma: f64, y: f64) -> Result<Self> {
        if !(sigma > 0.5) {
            return domain(format!("sigma must exceed 0.5, got {sigma}"));
        }
        if !(y > 2.0) {
            return domain(format!("y must exceed 2, got {y}"));
        }
        let factors = primes::primes_up_to(y.floor() as u64)
            .iter()
            .map(|&p| TorusFactor::new(p, sigma))
            .collect();
        Ok(Self { sigma, y, factors })
    }

    pub fn primes(&self) -> Vec<u64> {
        self.factors.iter().map(|f| f.prime).collect()
    }
}

impl CharacteristicFunction for MTildeFunction {
    fn eval(&self, x: f64) -> Result<Complex64> {
        let mut prod = Complex64::new(1.0, 0.0);
        for f in &self.factors {
            prod *= f.eval(x)?;
        }
        Ok(prod)
    }

    fn metadata(&self) -> Metadata {
        let mut m = Metadata::new();
        m.insert("function".into(), json!("m_tilde"));
        m.insert("sigma".into(), json!(self.sigma));
        m.insert("y".into(), json!(self.y));
        m.insert("primes".into(), json!(self.primes()));
        m
    }
}

const GRID_CUTOFFS: [u64; 5] = [10_000, 30_000, 100_000, 300_000, 1_000_000];

/// `Q̃_σ(x)` in either mode.
pub struct QTildeFunction {
    evaluator: QTildeEvaluator,
}

impl QTildeFunction {
    /// Handle accurate for `|x| ≤ x_range`.
    pub fn new(sigma: f64, mode: LambdaMode, x_range: f64) -> Result<Self> {
        Ok(Self { evaluator: QTildeEvaluator::for_range(sigma, mode, x_range)? })
    }

    pub fn with_cutoff(sigma: f64, mode: LambdaMode, cutoff: u64) -> Result<Self> {
        Ok(Self { evaluator: QTildeEvaluator::new(sigma, mode, cutoff)? })
    }

    /// Handle for sampling on `[−x_max, x_max]` with the smallest cutoff in
    /// `[10⁴, 10⁶]` whose estimated absolute error `|Q̃(x)|·tail_error(x)`
    /// stays below `tail_tol` at 257 probe points. Returns the handle and
    /// that estimate; the estimate may exceed `tail_tol` at the largest cutoff.
    pub fn for_grid(sigma: f64, mode: LambdaMode, x_max: f64, tail_tol: f64) -> Result<(Self, f64)> {
        if !(tail_tol > 0.0) {
            return domain(format!("tail_tol must be positive, got {tail_tol}"));
        }
        let pilot = QTildeEvaluator::for_range(sigma, mode, x_max)?;
        let probes: Vec<(f64, f64)> = (0..=256)
            .map(|k| {
                let x = x_max * k as f64 / 256.0;
                (x, pilot.eval(x).norm())
            })
            .collect();
        let worst = |cutoff: u64| {
            probes.iter().map(|&(x, m)| m * tail_error_estimate(sigma, mode, cutoff, x)).fold(0.0, f64::max)
        };
        let mut cutoff = pilot.cutoff();
        for c in GRID_CUTOFFS.into_iter().filter(|&c| c >= pilot.cutoff()) {
            cutoff = c;
            if worst(c) < tail_tol {
                break;
            }
        }
        let err = worst(cutoff);
        let handle = if cutoff == pilot.cutoff() {
            Self { evaluator: pilot }
        } else {
            Self::with_cutoff(sigma, mode, cutoff)?
        };
        Ok((handle, err))
    }

    pub fn evaluator(&self) -> &QTildeEvaluator {
        &self.evaluator
    }
}

impl CharacteristicFunction for QTildeFunction {
    fn eval(&self, x: f64) -> Result<Complex64> {
        Ok(self.evaluator.eval(x))
    }

    fn metadata(&self) -> Metadata {
        let e = &self.evaluator;
        let mut m = Metadata::new();
        m.insert("function".into(), json!("q_tilde"));
        m.insert("sigma".into(), json!(e.sigma()));
        m.insert("mode".into(), json!(e.mode().to_string()));
        m.insert("prime_cutoff".into(), json!(e.cutoff()));
        m.insert("tail".into(), json!("prime-density integral beyond the cutoff"));
        m
    }
}

/// `F(x_j)` on `x_j = −x_max + j·Δx`, `j = 0 … n_points−1`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FourierGrid {
    pub x_max: f64,
    pub n_points: usize,
    pub values: Vec<Complex64>,
    pub metadata: Metadata,
}

impl FourierGrid {
    pub fn dx(&self) -> f64 {
        2.0 * self.x_max / (self.n_points - 1) as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        let h = self.n_points / 2;
        (j as f64 - h as f64) * self.dx()
    }

    /// `F(0)`, the centre sample.
    pub fn at_zero(&self) -> Complex64 {
        self.values[self.n_points / 2]
    }

    /// `max_j |F(−x_j) − conj F(x_j)|`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n_points;
        (0..n)
            .map(|j| (self.values[n - 1 - j] - self.values[j].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Pointwise `a·self + b·other` on the same grid.
    pub fn combine(&self, a: f64, other: &FourierGrid, b: f64) -> Result<FourierGrid> {
        if self.n_points != other.n_points || self.x_max != other.x_max {
            return domain("grids differ in shape");
        }
        let values = self.values.iter().zip(&other.values).map(|(u, v)| u * a + v * b).collect();
        Ok(FourierGrid { x_max: self.x_max, n_points: self.n_points, values, metadata: Metadata::new() })
    }
}

/// Grid points needed for inversion on `|u| ≤ u_extent`.
///
/// Simpson's rule mixes trapezoid sums of steps `Δx` and `2Δx`, which alias
/// frequencies `π/Δx` apart, so `Δx ≤ π/(4·u_extent)` keeps the aliased copies
/// of the density far outside the inversion window.
pub fn default_n_points(x_max: f64, u_extent: f64) -> usize {
    let dx = PI / (4.0 * u_extent.max(1.0));
    let n = (2.0 * x_max / dx).ceil() as usize + 1;
    let n = n.max(4097);
    n + 1 - n % 2
}

pub fn sample_characteristic(f: &dyn CharacteristicFunction, x_max: f64, n_points: usize) -> Result<FourierGrid> {
    if n_points < 129 || n_points.is_multiple_of(2) {
        return domain(format!("n_points must be odd and at least 129, got {n_points}"));
    }
    if !(x_max > 0.0 && x_max.is_finite()) {
        return domain(format!("x_max must be positive, got {x_max}"));
    }
    let dx = 2.0 * x_max / (n_points - 1) as f64;
    let h = (n_points / 2) as f64;
    let raw = par::map_collect(n_points, |j| {
        let x = (j as f64 - h) * dx;
        f.eval(x).map_err(|e| Error::Evaluation { x, source: Box::new(e) })
    });
    let values = raw.into_iter().collect::<Result<Vec<_>>>()?;
    let mut metadata = f.metadata();
    metadata.insert("x_max".into(), json!(x_max));
    metadata.insert("n_points".into(), json!(n_points));
    Ok(FourierGrid { x_max, n_points, values, metadata })
}

/// Density samples `density(u_k)` on a uniform grid over `[u_min, u_max]`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DensityGrid {
    pub u_min: f64,
    pub u_max: f64,
    pub n_points: usize,
    pub values: Vec<f64>,
    /// `Σ values·Δu/√(2π)`
    pub mass: f64,
    pub max_imag_residue: f64,
    pub min_value: f64,
    pub warnings: Vec<String>,
    pub metadata: Metadata,
}

impl DensityGrid {
    pub fn du(&self) -> f64 {
        (self.u_max - self.u_min) / (self.n_points - 1) as f64
    }

    pub fn u(&self, k: usize) -> f64 {
        self.u_min + k as f64 * self.du()
    }

    /// Values with ringing undershoot clamped to zero, for export only.
    pub fn presentation(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.max(0.0)).collect()
    }

    /// `Σ density·e^{iux}·Δu/√(2π)`.
    pub fn forward(&self, x: f64) -> Complex64 {
        let du = self.du();
        let mut acc = crate::summation::ComplexSum::new();
        for (k, v) in self.values.iter().enumerate() {
            acc.add(Complex64::from_polar(*v, self.u(k) * x));
        }
        acc.total() * (du * INV_SQRT_2PI)
    }

    pub fn sup_distance(&self, other: &DensityGrid) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Probability mass `∫_a^b density du/√(2π)` by the trapezoid rule on the
    /// grid, with linear interpolation at the ends.
    pub fn interval_mass(&self, a: f64, b: f64) -> f64 {
        let du = self.du();
        let at = |u: f64| {
            let t = ((u - self.u_min) / du).clamp(0.0, (self.n_points - 1) as f64);
            let k = (t.floor() as usize).min(self.n_points - 2);
            let f = t - k as f64;
            self.values[k] * (1.0 - f) + self.values[k + 1] * f
        };
        let a = a.max(self.u_min);
        let b = b.min(self.u_max);
        if b <= a {
            return 0.0;
        }
        let mut pts = vec![a];
        let first = ((a - self.u_min) / du).floor() as usize + 1;
        let mut k = first;
        while k < self.n_points && self.u(k) < b {
            pts.push(self.u(k));
            k += 1;
        }
        pts.push(b);
        let mut acc = 0.0;
        for w in pts.windows(2) {
            acc += 0.5 * (at(w[0]) + at(w[1])) * (w[1] - w[0]);
        }
        acc * INV_SQRT_2PI
    }
}

const REANCHOR: usize = 512;

pub fn invert(grid: &FourierGrid, u_min: f64, u_max: f64, n_u: usize) -> Result<DensityGrid> {
    if grid.n_points < 3 || grid.n_points.is_multiple_of(2) {
        return domain("Fourier grid must have an odd number of points");
    }
    if !(u_max > u_min) || n_u < 2 {
        return domain(format!("empty u-range [{u_min}, {u_max}] with {n_u} points"));
    }
    let n = grid.n_points;
    let dx = grid.dx();
    let x0 = grid.x(0);
    let weights: Vec<f64> = (0..n)
        .map(|j| {
            if j == 0 || j == n - 1 {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            }
        })
        .collect();
    let du = (u_max - u_min) / (n_u - 1) as f64;
    let scale = dx / 3.0 * INV_SQRT_2PI;
    let pairs = par::map_collect(n_u, |k| {
        let u = u_min + k as f64 * du;
        let step = Complex64::from_polar(1.0, -u * dx);
        let mut re = 0.0;
        let mut im = 0.0;
        let mut rot = Complex64::new(0.0, 0.0);
        for (j, (w, v)) in weights.iter().zip(&grid.values).enumerate() {
            if j % REANCHOR == 0 {
                rot = Complex64::from_polar(1.0, -u * (x0 + j as f64 * dx));
            }
            let t = rot * v;
            re += w * t.re;
            im += w * t.im;
            rot *= step;
        }
        (re * scale, im * scale)
    });
    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let max_imag_residue = pairs.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    let mass = crate::summation::sum(values.iter().copied()) * du * INV_SQRT_2PI;
    let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut warnings = Vec::new();
    let edge = grid.values[0].norm().max(grid.values[n - 1].norm());
    if edge > 1e-6 {
        warnings.push(format!("visible truncation: |F(±x_max)| = {edge:.3e} exceeds 1e-6"));
    }
    if let Some(s) = grid.metadata.get("sigma").and_then(|v| v.as_f64()) {
        if s < SLOW_DECAY_SIGMA {
            warnings.push(format!("slow-decay regime: sigma = {s} < {SLOW_DECAY_SIGMA}"));
        }
    }
    let mut metadata = grid.metadata.clone();
    metadata.insert("u_min".into(), json!(u_min));
    metadata.insert("u_max".into(), json!(u_max));
    metadata.insert("n_u".into(), json!(n_u));
    metadata.insert("quadrature".into(), json!("composite Simpson"));
    metadata.insert("mass_convention".into(), json!("sum(values) * du / sqrt(2 pi)"));
    Ok(DensityGrid {
        u_min,
        u_max,
        n_points: n_u,
        values,
        mass,
        max_imag_residue,
        min_value,
        warnings,
        metadata,
    })
}

pub const DEFAULT_TRUNCATION_CAP: f64 = 1e4;

/// Smallest `x_max ∈ {1, 2, 4, …}` such that `|F(x_max + k·x_max/8)| < tol` for `k = 1…8`.
pub fn auto_truncate(f: &dyn CharacteristicFunction, tol: f64) -> Result<f64> {
    auto_truncate_capped(f, tol, DEFAULT_TRUNCATION_CAP)
}

pub fn auto_truncate_capped(f: &dyn CharacteristicFunction, tol: f64, cap: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    let mut x_max = 1.0;
    while x_max <= cap {
        let step = x_max / 8.0;
        let mut ok = true;
        for k in 1..=8 {
            if f.eval(x_max + k as f64 * step)?.norm() >= tol {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(x_max);
        }
        x_max *= 2.0;
    }
    Err(Error::Numeric(format!(
        "characteristic function does not fall below {tol:e} before x = {cap:e}; use a larger tolerance"
    )))
}

/// Uniform `u`-grid.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct UGrid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Default for UGrid {
    fn default() -> Self {
        Self { min: -8.0, max: 8.0, n: 2001 }
    }
}

impl UGrid {
    pub fn extent(&self) -> f64 {
        self.min.abs().max(self.max.abs())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConvergenceRow {
    pub y_from: f64,
    pub y_to: f64,
    pub sup_distance: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConvergenceReport {
    pub sigma: f64,
    pub rows: Vec<ConvergenceRow>,
    /// `(y, mass)` per inverted density
    pub masses: Vec<(f64, f64)>,
}

/// Sup-distances between inverted `M_{σ,P(y)}` densities for consecutive `y`.
pub fn uniform_convergence_report(
    sigma: f64,
    y_list: &[f64],
    x_max: f64,
    n_points: usize,
    u_grid: UGrid,
) -> Result<ConvergenceReport> {
    if y_list.windows(2).any(|w| w[1] <= w[0]) {
        return domain("y_list must be strictly ascending");
    }
    let mut densities = Vec::new();
    for &y in y_list {
        let f = MTildeFunction::new(sigma, y)?;
        let grid = sample_characteristic(&f, x_max, n_points)?;
        densities.push((y, invert(&grid, u_grid.min, u_grid.max, u_grid.n)?));
    }
    let rows = densities
        .windows(2)
        .map(|w| ConvergenceRow { y_from: w[0].0, y_to: w[1].0, sup_distance: w[0].1.sup_distance(&w[1].1) })
        .collect();
    let masses = densities.iter().map(|(y, d)| (*y, d.mass)).collect();
    Ok(ConvergenceReport { sigma, rows, masses })
}
