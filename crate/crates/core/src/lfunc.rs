//! L-values at real `σ`: truncated Euler logs, smoothed Dirichlet series, a
//! Hurwitz-zeta oracle and a theta-series route for real characters.

use crate::characters::{
    self, CharacterTable, DirichletCharacter, DiscriminantSet, QuadraticCharacter,
};
use crate::coefficients::{lambda_prime_power, LambdaMode};
use crate::error::{domain, Error, Result};
use crate::par;
use crate::primes::{self, SpfTable};
use crate::special::{clog1p, gamma, hurwitz_zeta_reg, upper_gamma};
use crate::summation::{ComplexSum, NeumaierSum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `Σ_{p ≤ y, p ≠ q} −log(1 − χ(p)p^{−σ})`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct EulerLogValue {
    pub value: Complex64,
    pub y: f64,
    pub excluded: Option<u64>,
}

pub fn euler_log(
    sigma: f64,
    chi: &dyn DirichletCharacter,
    y: f64,
    exclude_q: Option<u64>,
) -> Result<EulerLogValue> {
    if !(sigma > 0.5) {
        return domain(format!("sigma must exceed 0.5, got {sigma}"));
    }
    if !(y > 2.0) {
        return domain(format!("y must exceed 2, got {y}"));
    }
    let real = chi.is_real();
    let mut re = NeumaierSum::new();
    let mut cx = ComplexSum::new();
    for &p in primes::primes_up_to(y.floor() as u64).iter() {
        if Some(p) == exclude_q {
            continue;
        }
        let z = (p as f64).powf(-sigma);
        if real {
            let v = chi.real_value(p).unwrap_or(0.0);
            if v != 0.0 {
                re.add(-(-v * z).ln_1p());
            }
        } else {
            let v = chi.value(p);
            if v.norm_sqr() != 0.0 {
                cx.add(-clog1p(-v * z));
            }
        }
    }
    let value = if real {
        Complex64::new(re.total(), 0.0)
    } else {
        cx.total()
    };
    Ok(EulerLogValue { value, y, excluded: exclude_q })
}

/// `L(s, χ) = k^{−s} Σ_{a=1}^{k} χ(a) ζ(s, a/k)` for a character of modulus `k`.
pub fn l_value_hurwitz(s: f64, chi: &dyn DirichletCharacter) -> Complex64 {
    let k = chi.modulus();
    let kf = k as f64;
    let mut acc = ComplexSum::new();
    let mut mass = ComplexSum::new();
    for a in 1..=k {
        let v = chi.value(a);
        if v.norm_sqr() == 0.0 {
            continue;
        }
        acc.add(v * hurwitz_zeta_reg(s, a as f64 / kf));
        mass.add(v);
    }
    // the 1/(s−1) parts of ζ(s, a/k) carry the weight Σχ(a), zero unless χ is principal
    let m = mass.total();
    let pole = if m.norm() > 1e-9 * kf {
        m / (s - 1.0)
    } else {
        Complex64::new(0.0, 0.0)
    };
    (acc.total() + pole) * kf.powf(-s)
}

/// `log L(σ, χ)` through the Hurwitz oracle; real when `χ` is real and `L > 0`.
pub fn hurwitz_log(sigma: f64, chi: &dyn DirichletCharacter) -> Result<Complex64> {
    if !(sigma > 0.5) {
        return domain(format!("sigma must exceed 0.5, got {sigma}"));
    }
    let l = l_value_hurwitz(sigma, chi);
    if l.norm() < 1e-12 {
        return Err(Error::Numeric(format!("L({sigma}, χ) vanishes numerically")));
    }
    if chi.is_real() && l.re > 0.0 {
        return Ok(Complex64::new(l.re.ln(), 0.0));
    }
    Ok(l.ln())
}

const DIFF_STEP: f64 = 1e-3;

/// Central difference with one Richardson step, `O(h⁴)`.
fn richardson(f: impl Fn(f64) -> Complex64, s: f64) -> Complex64 {
    let d = |h: f64| (f(s + h) - f(s - h)) / (2.0 * h);
    (d(DIFF_STEP / 2.0) * 4.0 - d(DIFF_STEP)) / 3.0
}

/// `L′/L(σ, χ)` by differentiating the Hurwitz oracle.
pub fn hurwitz_log_derivative(sigma: f64, chi: &dyn DirichletCharacter) -> Result<Complex64> {
    if !(sigma > 0.5 + DIFF_STEP) {
        return domain(format!("sigma must exceed 0.5, got {sigma}"));
    }
    let l = l_value_hurwitz(sigma, chi);
    if l.norm() < 1e-12 {
        return Err(Error::Numeric(format!("L({sigma}, χ) vanishes numerically")));
    }
    let d = richardson(|s| l_value_hurwitz(s, chi), sigma);
    let r = d / l;
    Ok(if chi.is_real() { Complex64::new(r.re, 0.0) } else { r })
}

/// `𝓛(σ, χ)` for the mode, through the Hurwitz oracle.
pub fn hurwitz_log_object(sigma: f64, chi: &dyn DirichletCharacter, mode: LambdaMode) -> Result<Complex64> {
    match mode {
        LambdaMode::LogL => hurwitz_log(sigma, chi),
        LambdaMode::LogDerivative => hurwitz_log_derivative(sigma, chi),
    }
}

const THETA_CUT: f64 = 46.0;

/// `L(s, χ_D)` for a fundamental discriminant `D` and real `s`, from the
/// functional equation of the completed L-function with incomplete-gamma
/// weights. Costs `O(√|D|)` instead of the `O(|D|)` of the Hurwitz route.
pub fn real_l_value(s: f64, d: i64) -> f64 {
    let k = d.unsigned_abs() as f64;
    let a = if d < 0 { 1.0 } else { 0.0 };
    let w1 = (s + a) / 2.0;
    let w2 = (1.0 - s + a) / 2.0;
    let nmax = (THETA_CUT * k / PI).sqrt().ceil() as u64;
    let mut acc = NeumaierSum::new();
    for n in 1..=nmax {
        let chi = characters::kronecker(d, n);
        if chi == 0 {
            continue;
        }
        let nf = n as f64;
        let c = PI * nf * nf / k;
        let lc = c.ln();
        let t = (-w1 * lc).exp() * upper_gamma(w1, c) + (-w2 * lc).exp() * upper_gamma(w2, c);
        acc.add(chi as f64 * nf.powf(a) * t);
    }
    acc.total() / ((k / PI).powf(w1) * gamma(w1))
}

/// `𝓛(σ, χ_D)` through [`real_l_value`]; `None` when `L(σ, χ_D) ≤ 0`.
pub fn real_log_object(sigma: f64, d: i64, mode: LambdaMode) -> Option<f64> {
    let l = real_l_value(sigma, d);
    if !(l > 0.0) {
        return None;
    }
    Some(match mode {
        LambdaMode::LogL => l.ln(),
        LambdaMode::LogDerivative => {
            richardson(|s| Complex64::new(real_l_value(s, d), 0.0), sigma).re / l
        }
    })
}

/// Which character an [`LValueRequest`] refers to.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub enum CharacterSpec {
    /// `χ_index` in the table mod the prime `modulus`
    Table { modulus: u64, index: u64 },
    Discriminant(i64),
}

/// Parameters of a smoothed series `Σ λ(n)χ(n)n^{−σ}e^{−n/X}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct LValueRequest {
    pub sigma: f64,
    pub character: CharacterSpec,
    pub mode: LambdaMode,
    pub smoothing: f64,
    pub cap: usize,
}

impl LValueRequest {
    /// Request with the series cap set to `30·X`.
    pub fn new(sigma: f64, character: CharacterSpec, mode: LambdaMode, smoothing: f64) -> Self {
        let cap = (30.0 * smoothing).ceil() as usize;
        Self { sigma, character, mode, smoothing, cap }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.5) {
            return domain(format!("sigma must exceed 0.5, got {}", self.sigma));
        }
        if !(self.smoothing > 1.0) {
            return domain(format!("smoothing X must exceed 1, got {}", self.smoothing));
        }
        if (self.cap as f64) < 10.0 * self.smoothing {
            return domain(format!(
                "series cap {} is below 10·X = {}",
                self.cap,
                10.0 * self.smoothing
            ));
        }
        Ok(())
    }
}

/// Precomputed weights `λ(n)·n^{−σ}·e^{−n/X}` for `1 ≤ n ≤ cap`, reusable across characters.
#[derive(Clone, Debug)]
pub struct SmoothedSeries {
    weights: Vec<Complex64>,
}

impl SmoothedSeries {
    pub fn new(sigma: f64, x: f64, mode: LambdaMode, smoothing: f64, cap: usize) -> Self {
        Self::with_spf(sigma, x, mode, smoothing, &SpfTable::new(cap))
    }

    pub fn with_spf(sigma: f64, x: f64, mode: LambdaMode, smoothing: f64, spf: &SpfTable) -> Self {
        let cap = spf.limit();
        let weights = par::map_collect(cap, |i| {
            let n = i + 1;
            let mut lam = Complex64::new(1.0, 0.0);
            spf.for_each_factor(n, |p, k| lam *= lambda_prime_power(p, k, x, mode));
            let nf = n as f64;
            lam * ((-sigma * nf.ln()).exp() * (-nf / smoothing).exp())
        });
        Self { weights }
    }

    pub fn cap(&self) -> usize {
        self.weights.len()
    }

    pub fn eval(&self, chi: &dyn DirichletCharacter) -> Complex64 {
        let mut acc = ComplexSum::new();
        if chi.is_real() {
            for (i, w) in self.weights.iter().enumerate() {
                let v = chi.real_value(i as u64 + 1).unwrap_or(0.0);
                if v != 0.0 {
                    acc.add(w * v);
                }
            }
        } else {
            for (i, w) in self.weights.iter().enumerate() {
                acc.add(w * chi.value(i as u64 + 1));
            }
        }
        acc.total()
    }

    pub fn eval_quadratic(&self, chi: &QuadraticCharacter) -> Complex64 {
        let mut acc = ComplexSum::new();
        for (i, w) in self.weights.iter().enumerate() {
            match chi.at(i as u64 + 1) {
                1 => acc.add(*w),
                -1 => acc.add(-*w),
                _ => {}
            }
        }
        acc.total()
    }
}

/// `Σ_{n ≤ cap} λ(n)χ(n)n^{−σ}e^{−n/X}`, approximating `exp(ix·𝓛(σ, χ))`.
pub fn smoothed_psi(request: &LValueRequest, x: f64) -> Result<Complex64> {
    request.validate()?;
    let series = SmoothedSeries::new(request.sigma, x, request.mode, request.smoothing, request.cap);
    Ok(match request.character {
        CharacterSpec::Discriminant(d) => series.eval_quadratic(&QuadraticCharacter::new(d)),
        CharacterSpec::Table { modulus, index } => {
            let table = CharacterTable::new(modulus)?;
            series.eval(&table.character(index))
        }
    })
}

/// Outcome of the positivity check behind the `†`-filter.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DaggerOutcome {
    pub passed: bool,
    /// `(σ′, L(σ′, χ_D))` at the grid points that were evaluated
    pub evaluated: Vec<(f64, f64)>,
    /// grid points with `σ′ > 1`, where the Euler product makes `L > 0`
    pub skipped: usize,
}

/// The grid `σ, σ + step, …` up to and including 2.
pub fn dagger_grid(sigma: f64, step: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut k = 0;
    loop {
        let s = sigma + k as f64 * step;
        if s > 2.0 + 1e-9 {
            break;
        }
        grid.push(s);
        k += 1;
    }
    if grid.last().is_none_or(|&s| s < 2.0 - 1e-9) {
        grid.push(2.0);
    }
    grid
}

pub fn dagger_check(sigma: f64, d: i64, step: f64) -> Result<DaggerOutcome> {
    if !(sigma > 0.5) {
        return domain(format!("sigma must exceed 0.5, got {sigma}"));
    }
    if !(step > 0.0) {
        return domain(format!("grid step must be positive, got {step}"));
    }
    let mut evaluated = Vec::new();
    let mut skipped = 0;
    let mut passed = true;
    for s in dagger_grid(sigma, step) {
        if s > 1.0 {
            skipped += 1;
            continue;
        }
        let l = real_l_value(s, d);
        evaluated.push((s, l));
        if !(l > 0.0) {
            passed = false;
        }
    }
    Ok(DaggerOutcome { passed, evaluated, skipped })
}

/// True iff `L(σ′, χ_D) > 0` on the grid `σ, σ + step, …, 2`.
pub fn dagger_filter(sigma: f64, d: i64, step: f64) -> Result<bool> {
    Ok(dagger_check(sigma, d, step)?.passed)
}

/// Fills the `†` flags of a discriminant set in parallel.
pub fn apply_dagger(set: &mut DiscriminantSet, sigma: f64, step: f64) -> Result<()> {
    dagger_check(sigma, -3, step)?;
    let flags = par::map_slice(&set.discriminants, |&d| {
        dagger_check(sigma, d, step).map(|o| o.passed).unwrap_or(false)
    });
    set.dagger_flags = flags.into_iter().map(Some).collect();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const CATALAN: f64 = 0.915_965_594_177_219;

    #[test]
    fn euler_log_examples() {
        let chi = QuadraticCharacter::new(-3);
        let v = euler_log(2.0, &chi, 10.0, None).unwrap();
        let want = -(1.25f64).ln() - (1.04f64).ln() - (48.0f64 / 49.0).ln();
        assert_relative_eq!(v.value.re, want, max_relative = 1e-14);
        assert_eq!(v.value.im, 0.0);
        assert!((v.value.re + 0.2418).abs() < 1e-4);
        let full = hurwitz_log(2.0, &chi).unwrap();
        assert!((full.re + 0.2468).abs() < 1e-4);
        let far = euler_log(2.0, &chi, 1000.0, None).unwrap();
        assert!((far.value - full).norm() < 1e-5);
        // all small primes excluded or killed
        let t = CharacterTable::new(3).unwrap();
        let v = euler_log(1.0, &t.character(1), 2.5, Some(2)).unwrap();
        assert_eq!(v.value, Complex64::new(0.0, 0.0));
        assert!(euler_log(0.5, &chi, 10.0, None).is_err());
    }

    #[test]
    fn hurwitz_known_values() {
        let l = hurwitz_log(2.0, &QuadraticCharacter::new(-4)).unwrap();
        assert_relative_eq!(l.re, CATALAN.ln(), max_relative = 1e-13);
        let l1 = l_value_hurwitz(1.0, &QuadraticCharacter::new(-4));
        assert_relative_eq!(l1.re, PI / 4.0, max_relative = 1e-13);
        let l5 = l_value_hurwitz(1.0, &QuadraticCharacter::new(5));
        let want = 2.0 * ((1.0 + 5f64.sqrt()) / 2.0).ln() / 5f64.sqrt();
        assert_relative_eq!(l5.re, want, max_relative = 1e-13);
        let l3 = l_value_hurwitz(2.0, &QuadraticCharacter::new(-3));
        assert_relative_eq!(l3.re, 0.781_302_412_896_486_3, max_relative = 1e-13);
        for d in [-3i64, 5, 8, -20, 13] {
            assert!(hurwitz_log(2.0, &QuadraticCharacter::new(d)).unwrap().norm() < 1.0);
        }
    }

    #[test]
    fn hurwitz_agrees_with_long_euler_product() {
        let chi = QuadraticCharacter::new(5);
        let a = euler_log(1.2, &chi, 1e5, None).unwrap().value.re;
        let b = hurwitz_log(1.2, &chi).unwrap().re;
        assert!((a - b).abs() < 1e-4, "{a} vs {b}");
    }

    #[test]
    fn principal_character_gives_zeta() {
        let t = CharacterTable::new(7).unwrap();
        let l = l_value_hurwitz(2.0, &t.character(0));
        let want = PI * PI / 6.0 * (1.0 - 1.0 / 49.0);
        assert_relative_eq!(l.re, want, max_relative = 1e-13);
    }

    #[test]
    fn theta_route_matches_hurwitz() {
        for d in [-3i64, -4, 5, 8, -7, -8, 12, -15, 13, -163, 1001, -1003, 4 * 257, -4 * 265] {
            if !characters::is_fundamental_discriminant(d) {
                continue;
            }
            let chi = QuadraticCharacter::new(d);
            for s in [0.55, 0.7, 0.999, 1.0, 1.001, 1.3, 2.0] {
                let h = l_value_hurwitz(s, &chi).re;
                let t = real_l_value(s, d);
                assert!((h - t).abs() < 1e-11 * h.abs().max(1.0), "D={d} s={s}: {h} vs {t}");
            }
        }
    }

    #[test]
    fn log_derivative_oracles_agree() {
        for d in [-3i64, 5, -56, 109] {
            let chi = QuadraticCharacter::new(d);
            let a = hurwitz_log_derivative(1.5, &chi).unwrap().re;
            let b = real_log_object(1.5, d, LambdaMode::LogDerivative).unwrap();
            assert!((a - b).abs() < 1e-8, "D={d}");
            // compare with the Dirichlet series −Σ Λ(n)χ(n)n^{−s} at σ = 3
            let a3 = hurwitz_log_derivative(3.0, &chi).unwrap().re;
            let mut s = 0.0;
            for &p in primes::primes_up_to(100_000).iter() {
                let mut pk = p;
                while pk < 10_000_000_000 {
                    s -= (p as f64).ln() * chi.at(pk) as f64 * (pk as f64).powf(-3.0);
                    pk *= p;
                }
            }
            assert!((a3 - s).abs() < 1e-8, "D={d}: {a3} vs {s}");
        }
    }

    #[test]
    fn smoothed_series_at_zero_frequency() {
        let req = LValueRequest::new(1.0, CharacterSpec::Discriminant(-3), LambdaMode::LogL, 100.0);
        let v = smoothed_psi(&req, 0.0).unwrap();
        assert!((v - Complex64::new((-0.01f64).exp(), 0.0)).norm() < 1e-15);
        let mut bad = req;
        bad.cap = 500;
        assert!(smoothed_psi(&bad, 1.0).is_err());
    }

    #[test]
    fn smoothed_series_tracks_oracle() {
        let x = 1.0;
        let req = LValueRequest::new(1.0, CharacterSpec::Discriminant(-3), LambdaMode::LogL, 1e4);
        let got = smoothed_psi(&req, x).unwrap();
        let want = (Complex64::new(0.0, x) * hurwitz_log(1.0, &QuadraticCharacter::new(-3)).unwrap()).exp();
        assert!((got - want).norm() < 1e-3, "{got} vs {want}");

        let req = LValueRequest::new(1.5, CharacterSpec::Discriminant(5), LambdaMode::LogDerivative, 1e4);
        let got = smoothed_psi(&req, x).unwrap();
        let ld = hurwitz_log_derivative(1.5, &QuadraticCharacter::new(5)).unwrap();
        let want = (Complex64::new(0.0, x) * ld).exp();
        assert!((got - want).norm() < 1e-3, "{got} vs {want}");
        let bound = (x * ld.norm()).exp();
        assert!(got.norm() <= bound);
    }

    #[test]
    fn smoothed_series_for_complex_character() {
        let x = 0.7;
        let req = LValueRequest::new(1.5, CharacterSpec::Table { modulus: 11, index: 3 }, LambdaMode::LogL, 2e4);
        let got = smoothed_psi(&req, x).unwrap();
        let table = CharacterTable::new(11).unwrap();
        let lg = hurwitz_log(1.5, &table.character(3)).unwrap();
        let want = (Complex64::new(0.0, x) * lg).exp();
        assert!((got - want).norm() < 1e-3, "{got} vs {want}");
    }

    #[test]
    fn dagger_grid_shape() {
        let g = dagger_grid(1.5, 0.05);
        assert_eq!(g[0], 1.5);
        assert!((g.last().unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(g.len(), 11);
        assert_eq!(dagger_grid(1.93, 0.05).last(), Some(&2.0));
        let o = dagger_check(0.6, -3, 0.05).unwrap();
        assert!(o.passed);
        assert_eq!(o.evaluated[0].0, 0.6);
        assert!(dagger_filter(1.5, 5, 0.05).unwrap());
    }
}
