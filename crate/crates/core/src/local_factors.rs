//! Euler factors of the characteristic functions `M̃_{σ,P}(x)` and `Q̃_σ(x)`.
//!
//! The `M` factor at `p` is the characteristic function of
//! `−2 log|1 − e^{iθ} p^{−σ}|` for uniform `θ`, with series
//! `Σ_r H_r(ix)² p^{−2σr}`. The `Q` factor at `p` averages over
//! `χ(p) ∈ {0, ±1}` with weights `1/(p+1)`, `p/(2(p+1))`, `p/(2(p+1))`.

use crate::coefficients::{self, LambdaMode};
use crate::error::{domain, Error, Result};
use crate::primes;
use crate::special::{clog1p, expm1_i, gauss_laguerre};
use crate::summation::{ComplexSum, NeumaierSum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const SQRT_1_4: f64 = 1.183_215_956_619_923_2;

/// `ln c(R)` with `c(R) = exp(R/(√1.4 − 1))`.
pub fn ln_c_r(big_r: f64) -> f64 {
    big_r / (SQRT_1_4 - 1.0)
}

/// Per-prime cutoffs `N_p` of the truncated `M` series and the constants behind them.
///
/// The constants overflow `f64` for moderate `R` and `y`, so they are kept as logarithms.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TruncationPlan {
    pub epsilon: f64,
    pub big_r: f64,
    pub y: f64,
    /// `(p, N_p)` in ascending `p`
    pub cutoffs: Vec<(u64, usize)>,
    pub ln_c_r: f64,
    pub ln_c1: f64,
    pub ln_eps_prime: f64,
    pub ln_t: f64,
}

impl TruncationPlan {
    pub fn c_r(&self) -> f64 {
        self.ln_c_r.exp()
    }

    pub fn c1(&self) -> f64 {
        self.ln_c1.exp()
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.cutoffs.iter().map(|&(p, _)| p)
    }

    pub fn cutoff(&self, p: u64) -> Option<usize> {
        self.cutoffs.iter().find(|&&(q, _)| q == p).map(|&(_, n)| n)
    }

    /// `ln N` for `N = Π p^{N_p}`.
    pub fn ln_modulus(&self) -> f64 {
        self.cutoffs.iter().map(|&(p, n)| n as f64 * (p as f64).ln()).sum()
    }

    /// `(ln Σ_{r>N_p} G_r(R) p^{−r/2}, ln(ε′/(4c(R))))` for the prime `p`.
    pub fn dropped_tail(&self, p: u64) -> Option<(f64, f64)> {
        let n = self.cutoff(p)?;
        let half_ln_p = 0.5 * (p as f64).ln();
        let extra = 4000;
        let lg = coefficients::ln_g_values_real(self.big_r, n + extra);
        let terms: Vec<f64> = (n + 1..=n + extra).map(|r| lg[r] - r as f64 * half_ln_p).collect();
        let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = terms.iter().map(|t| (t - m).exp()).sum();
        let rhs = self.ln_eps_prime - (4f64).ln() - self.ln_c_r;
        Some((m + s.ln(), rhs))
    }
}

/// Builds the plan: `N_p` is the integer with `√(1.4/p)^{N_p+1} ≤ T < √(1.4/p)^{N_p}`,
/// where `T = (1−√0.7)·ε′/(4c(R)²)` and `ε′ = ε/(3(2c(R)²)^y)`.
pub fn make_truncation_plan(epsilon: f64, big_r: f64, y: f64) -> Result<TruncationPlan> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Config(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(big_r > 0.0 && big_r.is_finite()) {
        return Err(Error::Config(format!("R must be positive, got {big_r}")));
    }
    if !(y > 2.0 && y.is_finite()) {
        return Err(Error::Config(format!("y must exceed 2, got {y}")));
    }
    let lcr = ln_c_r(big_r);
    let one_minus = 1.0 - 0.7f64.sqrt();
    let ln_eps_prime = epsilon.ln() - 3f64.ln() - y * (2f64.ln() + 2.0 * lcr);
    let ln_t = one_minus.ln() + ln_eps_prime - 4f64.ln() - 2.0 * lcr;
    if ln_t >= 0.0 {
        return Err(Error::Config(format!(
            "degenerate truncation plan (T ≥ 1) for epsilon = {epsilon}, R = {big_r}, y = {y}"
        )));
    }
    let ln_c1 = 2.0 * (576f64.ln() + 8.0 * lcr - 2.0 * one_minus.ln() - 2.0 * epsilon.ln());
    let mut cutoffs = Vec::new();
    for &p in primes::primes_up_to(y.floor() as u64).iter() {
        let a = 0.5 * (1.4 / p as f64).ln();
        let mut n = ((ln_t / a).ceil() as i64 - 1).max(0) as usize;
        while (n as f64 + 1.0) * a > ln_t {
            n += 1;
        }
        while n > 0 && n as f64 * a <= ln_t {
            n -= 1;
        }
        cutoffs.push((p, n));
    }
    let plan = TruncationPlan {
        epsilon,
        big_r,
        y,
        cutoffs,
        ln_c_r: lcr,
        ln_c1,
        ln_eps_prime,
        ln_t,
    };
    if plan.ln_modulus() >= y * y * ln_c1 {
        return Err(Error::Config(format!(
            "truncation plan modulus exceeds c1^(y^2) for epsilon = {epsilon}, R = {big_r}, y = {y}"
        )));
    }
    Ok(plan)
}

/// A truncated Euler factor together with a bound on the dropped tail.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct LocalFactorValue {
    pub prime: u64,
    pub value: Complex64,
    pub tail_bound: f64,
}

fn check_prime(p: u64) -> Result<()> {
    if primes::is_prime(p) {
        Ok(())
    } else {
        domain(format!("{p} is not prime"))
    }
}

/// `Σ_{r=0}^{n_cut} H_r(ix)² p^{−2σr}` with the bound `c(|x|)²·(1.4/p^{2σ})^{n_cut+1}/(1 − 1.4/p^{2σ})`.
pub fn m_local_factor(p: u64, sigma: f64, x: f64, n_cut: usize) -> Result<LocalFactorValue> {
    check_prime(p)?;
    if sigma <= 0.0 {
        return domain(format!("sigma must be positive, got {sigma}"));
    }
    let ln_rho = -2.0 * sigma * (p as f64).ln();
    let q = 1.4 * ln_rho.exp();
    if q >= 1.0 {
        return domain(format!(
            "tail of the p = {p} factor at sigma = {sigma} is not boundable (1.4 ≥ p^(2 sigma)); increase n_cut and use the torus quadrature"
        ));
    }
    let rho = ln_rho.exp();
    let hs = coefficients::h_values(Complex64::new(0.0, x), n_cut);
    let mut acc = ComplexSum::new();
    let mut pw = 1.0;
    for h in &hs {
        acc.add(h * h * pw);
        pw *= rho;
        if pw == 0.0 {
            break;
        }
    }
    let ln_tail = 2.0 * ln_c_r(x.abs()) + (n_cut as f64 + 1.0) * q.ln() - (1.0 - q).ln();
    Ok(LocalFactorValue { prime: p, value: acc.total(), tail_bound: ln_tail.exp() })
}

#[inline]
fn m_phase(z: f64, theta: f64) -> f64 {
    -(1.0 - 2.0 * z * theta.cos() + z * z).ln()
}

/// Composite Simpson quadrature of `(1/2π)∫₀^{2π} exp(ix·(−2 log|1 − e^{iθ}p^{−σ}|)) dθ`.
pub fn torus_integral_oracle(p: u64, sigma: f64, x: f64, quad_points: usize) -> Result<Complex64> {
    if quad_points < 64 {
        return domain(format!("quad_points must be at least 64, got {quad_points}"));
    }
    let n = quad_points + quad_points % 2;
    let z = (p as f64).powf(-sigma);
    let h = 2.0 * PI / n as f64;
    let mut acc = ComplexSum::new();
    for j in 0..=n {
        let w = if j == 0 || j == n {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc.add(Complex64::from_polar(w, x * m_phase(z, j as f64 * h)));
    }
    Ok(acc.total() * (h / 3.0 / (2.0 * PI)))
}

const TORUS_LEVELS: u32 = 17;

/// Characteristic function of `−2 log|1 − e^{iθ}p^{−σ}|` by the periodic trapezoid rule.
///
/// The integrand is analytic and periodic, so the rule converges geometrically;
/// the point count doubles until two successive levels agree to `1e−14`.
#[derive(Clone, Debug)]
pub struct TorusFactor {
    pub prime: u64,
    z: f64,
    fprime_max: f64,
    // phase at θ = 2πk/2^LEVELS for 0 ≤ k ≤ 2^(LEVELS−1)
    table: Vec<f64>,
}

impl TorusFactor {
    pub fn new(p: u64, sigma: f64) -> Self {
        let z = (p as f64).powf(-sigma);
        let full = 1usize << TORUS_LEVELS;
        let table = (0..=full / 2).map(|k| m_phase(z, 2.0 * PI * k as f64 / full as f64)).collect();
        Self { prime: p, z, fprime_max: 2.0 * z / (1.0 - z * z), table }
    }

    fn level_sum(&self, x: f64, n: usize, odd_only: bool) -> Complex64 {
        let stride = (1usize << TORUS_LEVELS) / n;
        let mut acc = ComplexSum::new();
        let (start, step) = if odd_only { (1, 2) } else { (0, 1) };
        let mut j = start;
        while j <= n / 2 {
            let w = if j == 0 || j == n / 2 { 1.0 } else { 2.0 };
            acc.add(Complex64::from_polar(w, x * self.table[j * stride]));
            j += step;
        }
        acc.total()
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        if x == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let ax = x.abs();
        let est = 32.0 + 3.0 * ax * self.fprime_max + 40.0 / (1.0 / self.z).ln();
        let max_n = 1usize << TORUS_LEVELS;
        let mut n = (est as usize).next_power_of_two().clamp(64, max_n / 2);
        let mut sum = self.level_sum(ax, n, false);
        let mut value = sum / n as f64;
        while n < max_n {
            sum += self.level_sum(ax, 2 * n, true);
            n *= 2;
            let next = sum / n as f64;
            let diff = (next - value).norm();
            value = next;
            if diff < 1e-14 {
                return Ok(if x < 0.0 { value.conj() } else { value });
            }
        }
        Err(Error::Numeric(format!(
            "torus quadrature for p = {} did not converge at x = {x}",
            self.prime
        )))
    }
}

/// Phase coefficients `(A, B)` with `Q̃_p(x) = 1/(p+1) + p/(2(p+1))·(e^{ixA} + e^{ixB})`,
/// written in terms of `L = log p`, `z = p^{−σ}` so that huge `p` never materialize.
#[inline]
fn q_phases(ln_p: f64, z: f64, mode: LambdaMode) -> (f64, f64) {
    match mode {
        LambdaMode::LogL => (-(-z).ln_1p(), -z.ln_1p()),
        LambdaMode::LogDerivative => (-ln_p * z / (1.0 - z), ln_p * z / (1.0 + z)),
    }
}

/// `log Q̃_p(x)` from `(A, B)` and the weight `p/(p+1)`, accurate when the factor is near 1.
#[inline]
fn q_log_factor(a: f64, b: f64, weight: f64, x: f64) -> Complex64 {
    clog1p((expm1_i(x * a) + expm1_i(x * b)) * (0.5 * weight))
}

/// Closed form `1/(p+1) + p/(2(p+1))·((1−p^{−σ})^{−ix} + (1+p^{−σ})^{−ix})`.
pub fn q_local_factor(p: u64, sigma: f64, x: f64) -> Complex64 {
    q_local_factor_mode(p, sigma, x, LambdaMode::LogL)
}

/// Closed-form factor for either mode.
pub fn q_local_factor_mode(p: u64, sigma: f64, x: f64, mode: LambdaMode) -> Complex64 {
    let pf = p as f64;
    let z = pf.powf(-sigma);
    let (a, b) = q_phases(pf.ln(), z, mode);
    let w = pf / (pf + 1.0);
    Complex64::new(1.0 / (pf + 1.0), 0.0)
        + (Complex64::from_polar(1.0, x * a) + Complex64::from_polar(1.0, x * b)) * (0.5 * w)
}

/// Cosine form `1/(p+1) + p/(p+1)·exp(−ix·log(1−p^{−2σ})/2)·cos((x/2)·log((1−p^{−σ})/(1+p^{−σ})))`.
pub fn q_local_factor_cosine(p: u64, sigma: f64, x: f64) -> Complex64 {
    let pf = p as f64;
    let z = pf.powf(-sigma);
    let mid = Complex64::from_polar(1.0, -x * (1.0 - z * z).ln() / 2.0);
    let c = (x / 2.0 * ((1.0 - z) / (1.0 + z)).ln()).cos();
    Complex64::new(1.0 / (pf + 1.0), 0.0) + mid * (pf / (pf + 1.0) * c)
}

/// Series form `1 + p/(p+1)·Σ_{r=1}^{r_max} λ(p^{2r}) p^{−2rσ}` and a bound on the dropped tail.
pub fn q_local_factor_series(p: u64, sigma: f64, x: f64, mode: LambdaMode, r_max: usize) -> (Complex64, f64) {
    let pf = p as f64;
    let z2 = pf.powf(-2.0 * sigma);
    let w = pf / (pf + 1.0);
    let mut acc = ComplexSum::new();
    let mut pw = 1.0;
    for r in 1..=r_max {
        pw *= z2;
        acc.add(coefficients::lambda_prime_power(p, 2 * r as u32, x, mode) * pw);
    }
    let reach = match mode {
        LambdaMode::LogL => x.abs(),
        LambdaMode::LogDerivative => x.abs() * pf.ln(),
    };
    let q = 1.4 * z2;
    let tail = if q < 1.0 {
        w * (ln_c_r(reach) + (r_max as f64 + 1.0) * q.ln() - (1.0 - q).ln()).exp()
    } else {
        f64::INFINITY
    };
    (Complex64::new(1.0, 0.0) + acc.total() * w, tail)
}

/// Euler product of `M̃` factors over the primes of a plan, in ascending order.
///
/// For `σ ≤ 0.6` each factor keeps at least 200 terms.
pub fn m_tilde(sigma: f64, x: f64, plan: &TruncationPlan) -> Result<Complex64> {
    let mut prod = Complex64::new(1.0, 0.0);
    for &(p, n) in &plan.cutoffs {
        let n = if sigma <= 0.6 { n.max(200) } else { n };
        prod *= m_local_factor(p, sigma, x, n)?.value;
    }
    Ok(prod)
}

const LAGUERRE_NODES: usize = 48;

/// Evaluates `Q̃_σ(x) = Π_p Q̃_{σ,p}(x)` for either mode.
///
/// Primes up to `cutoff` are multiplied explicitly. The remaining primes are
/// replaced by their density: `Σ_{p>P} log Q̃_p(x) ≈ ∫_P^∞ log Q̃_t(x) dt/log t`,
/// integrated by Gauss–Laguerre quadrature in `log t`. The error of that
/// replacement is estimated from `|π(t) − li(t)| ≤ √t·log t/(8π)`.
#[derive(Clone, Debug)]
pub struct QTildeEvaluator {
    sigma: f64,
    mode: LambdaMode,
    cutoff: u64,
    // (A, B, p/(p+1)) per prime ≤ cutoff
    factors: Vec<(f64, f64, f64)>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// `Q̃_σ(x)` with the explicit-product cutoff and tail diagnostics.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct QTildeValue {
    pub value: Complex64,
    pub cutoff: u64,
    /// `∫_P^∞ log Q̃_t(x) dt/log t`, already included in `value`
    pub tail_log: Complex64,
    /// estimated error of the tail replacement, in `log Q̃`
    pub tail_error: f64,
    pub within_tolerance: bool,
}

impl QTildeEvaluator {
    pub fn new(sigma: f64, mode: LambdaMode, cutoff: u64) -> Result<Self> {
        if !(sigma > 0.5) {
            return domain(format!("sigma must exceed 0.5, got {sigma}"));
        }
        if cutoff < 100 {
            return domain(format!("prime cutoff must be at least 100, got {cutoff}"));
        }
        let factors = primes::primes_up_to(cutoff)
            .iter()
            .map(|&p| {
                let pf = p as f64;
                let (a, b) = q_phases(pf.ln(), pf.powf(-sigma), mode);
                (a, b, pf / (pf + 1.0))
            })
            .collect();
        let (nodes, weights) = gauss_laguerre(LAGUERRE_NODES);
        Ok(Self { sigma, mode, cutoff, factors, nodes, weights })
    }

    /// Chooses the cutoff so that `|x|·|A_P| ≤ 0.05` up to `x_max`, within `[10⁴, 10⁵]`.
    pub fn for_range(sigma: f64, mode: LambdaMode, x_max: f64) -> Result<Self> {
        let mut p: u64 = 10_000;
        while p < 100_000 {
            let (a, _) = q_phases((p as f64).ln(), (p as f64).powf(-sigma), mode);
            if x_max * a.abs() <= 0.05 {
                break;
            }
            p = (p * 2).min(100_000);
        }
        Self::new(sigma, mode, p)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn mode(&self) -> LambdaMode {
        self.mode
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    fn explicit_log(&self, x: f64) -> (Complex64, bool) {
        let mut acc = ComplexSum::new();
        if self.factors.len() <= 10_000 {
            let mut prod = Complex64::new(1.0, 0.0);
            for &(a, b, w) in &self.factors {
                let f = Complex64::new(1.0, 0.0) + (expm1_i(x * a) + expm1_i(x * b)) * (0.5 * w);
                if f == Complex64::new(0.0, 0.0) {
                    return (f, true);
                }
                prod *= f;
            }
            return (prod, false);
        }
        for &(a, b, w) in &self.factors {
            let l = q_log_factor(a, b, w, x);
            if !l.re.is_finite() {
                return (Complex64::new(0.0, 0.0), true);
            }
            acc.add(l);
        }
        (acc.total(), false)
    }

    /// `log Q̃_t(x)` divided by `t^{−2σ}`, as a function of `u = log t`.
    fn scaled_log_at(&self, u: f64, x: f64) -> Complex64 {
        let sig = self.sigma;
        let big_z = (-2.0 * sig * u).exp();
        let w = 1.0 / (1.0 + (-u).exp());
        if big_z < 1e-150 {
            let leading = match self.mode {
                LambdaMode::LogL => Complex64::new(-x * x / 2.0, x / 2.0),
                LambdaMode::LogDerivative => Complex64::new(-x * x * u * u / 2.0, -x * u),
            };
            return leading * w;
        }
        let (a, b) = q_phases(u, (-sig * u).exp(), self.mode);
        q_log_factor(a, b, w, x) / big_z
    }

    /// `∫_P^∞ log Q̃_t(x) dt/log t`.
    pub fn tail_log(&self, x: f64) -> Complex64 {
        if x == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let lam = (self.cutoff as f64).ln();
        let k = 2.0 * self.sigma - 1.0;
        let mut acc = ComplexSum::new();
        for (s, wt) in self.nodes.iter().zip(&self.weights) {
            let u = lam + s / k;
            acc.add(self.scaled_log_at(u, x) * (wt / u));
        }
        acc.total() * ((-k * lam).exp() / k)
    }

    /// Estimated error of the tail replacement, in `log Q̃`.
    pub fn tail_error(&self, x: f64) -> f64 {
        tail_error_estimate(self.sigma, self.mode, self.cutoff, x)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.eval_detailed(x).value
    }

    pub fn eval_detailed(&self, x: f64) -> QTildeValue {
        if x == 0.0 {
            return QTildeValue {
                value: Complex64::new(1.0, 0.0),
                cutoff: self.cutoff,
                tail_log: Complex64::new(0.0, 0.0),
                tail_error: 0.0,
                within_tolerance: true,
            };
        }
        let (head, zero) = self.explicit_log(x);
        let tail = self.tail_log(x);
        let value = if zero {
            Complex64::new(0.0, 0.0)
        } else if self.factors.len() <= 10_000 {
            head * tail.exp()
        } else {
            (head + tail).exp()
        };
        QTildeValue {
            value,
            cutoff: self.cutoff,
            tail_log: tail,
            tail_error: self.tail_error(x),
            within_tolerance: true,
        }
    }
}

/// Error in `log Q̃_σ(x)` of replacing the primes beyond `cutoff` by their
/// density, from the size of `log Q̃_P(x)` and `|π(t) − li(t)| ≤ √t·log t/(8π)`.
pub fn tail_error_estimate(sigma: f64, mode: LambdaMode, cutoff: u64, x: f64) -> f64 {
    let pf = cutoff as f64;
    let (a, b) = q_phases(pf.ln(), pf.powf(-sigma), mode);
    let f = q_log_factor(a, b, pf / (pf + 1.0), x).norm();
    f * pf.sqrt() * pf.ln() / (8.0 * PI) * (1.0 + 2.0 * sigma / (2.0 * sigma - 0.5))
}

const Q_CUTOFF_LADDER: [u64; 12] = [
    1_000, 3_000, 10_000, 30_000, 100_000, 300_000, 1_000_000, 3_000_000, 10_000_000, 30_000_000,
    100_000_000, 300_000_000,
];

/// `Q̃_σ(x)` with the smallest ladder cutoff whose estimated tail error is below `tail_tol`.
///
/// When no cutoff up to `3·10⁸` reaches the tolerance the largest is used and
/// `within_tolerance` is false.
pub fn q_tilde(sigma: f64, x: f64, tail_tol: f64, mode: LambdaMode) -> Result<QTildeValue> {
    if !(sigma > 0.5) {
        return domain(format!("sigma must exceed 0.5, got {sigma}"));
    }
    if !(tail_tol > 0.0) {
        return domain(format!("tail_tol must be positive, got {tail_tol}"));
    }
    let mut chosen = None;
    for &p in &Q_CUTOFF_LADDER {
        if tail_error_estimate(sigma, mode, p, x) < tail_tol {
            chosen = Some(p);
            break;
        }
    }
    let within = chosen.is_some();
    let cutoff = chosen.unwrap_or(*Q_CUTOFF_LADDER.last().unwrap());
    let ev = QTildeEvaluator::new(sigma, mode, cutoff)?;
    let mut v = ev.eval_detailed(x);
    v.within_tolerance = within;
    Ok(v)
}

/// `c(σ) = cos(π/(2^σ·6))`.
pub fn c_sigma(sigma: f64) -> f64 {
    (PI / (2f64.powf(sigma) * 6.0)).cos()
}

/// Window `{p : 3|x|/π < p^σ ≤ 2^σ·3|x|/π}` and its count of primes above 16.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct SigmaWindow {
    pub p_low: f64,
    pub p_high: f64,
    pub count: usize,
}

pub fn s_sigma_window(sigma: f64, x: f64) -> Result<SigmaWindow> {
    if !(sigma > 0.5) {
        return domain(format!("sigma must exceed 0.5, got {sigma}"));
    }
    if x == 0.0 || !x.is_finite() {
        return domain("window needs a finite nonzero x");
    }
    let base = 3.0 * x.abs() / PI;
    let p_low = base.powf(1.0 / sigma);
    let p_high = (2f64.powf(sigma) * base).powf(1.0 / sigma);
    let count = primes::primes_up_to(p_high.floor() as u64)
        .iter()
        .filter(|&&p| p > 16 && (p as f64).powf(sigma) > base)
        .count();
    Ok(SigmaWindow { p_low, p_high, count })
}

/// Smallest `n_cut` with `m_local_factor` tail bound below `tol` (for `1.4 < p^{2σ}`).
pub fn m_cutoff_for(p: u64, sigma: f64, x: f64, tol: f64) -> Option<usize> {
    let q = 1.4 * (p as f64).powf(-2.0 * sigma);
    if q >= 1.0 {
        return None;
    }
    let need = (tol.ln() + (1.0 - q).ln() - 2.0 * ln_c_r(x.abs())) / q.ln() - 1.0;
    Some(need.ceil().max(1.0) as usize)
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn is<T: Send + Sync>() {}
    is::<QTildeEvaluator>();
    is::<TorusFactor>();
    let _ = NeumaierSum::new();
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn plan_satisfies_two_sided_inequality() {
        for &(eps, r, y) in &[(0.5, 1.0, 3.0), (1e-3, 1.0, 13.0), (0.1, 3.0, 30.0), (0.9, 0.1, 2.5)] {
            let plan = make_truncation_plan(eps, r, y).unwrap();
            for &(p, n) in &plan.cutoffs {
                let a = 0.5 * (1.4 / p as f64).ln();
                assert!(n >= 1);
                assert!((n as f64 + 1.0) * a <= plan.ln_t, "p={p}");
                assert!(plan.ln_t < n as f64 * a, "p={p}");
            }
            assert!(plan.ln_modulus() < y * y * plan.ln_c1);
        }
    }

    #[test]
    fn plan_constants() {
        let plan = make_truncation_plan(0.5, 1.0, 3.0).unwrap();
        assert_relative_eq!(plan.c_r(), 234.5, max_relative = 1e-3);
        assert_eq!(plan.primes().collect::<Vec<_>>(), vec![2, 3]);
        assert!(make_truncation_plan(1.5, 1.0, 3.0).is_err());
        assert!(make_truncation_plan(0.5, -1.0, 3.0).is_err());
        assert!(make_truncation_plan(0.5, 1.0, 2.0).is_err());
    }

    #[test]
    fn plan_dropped_tail_within_budget() {
        let plan = make_truncation_plan(1e-2, 1.0, 13.0).unwrap();
        for p in plan.primes() {
            let (lhs, rhs) = plan.dropped_tail(p).unwrap();
            assert!(lhs <= rhs, "p={p}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn m_factor_examples() {
        let v = m_local_factor(2, 1.0, 1.0, 1).unwrap();
        assert!((v.value - Complex64::new(0.75, 0.0)).norm() < 1e-15);
        assert_eq!(m_local_factor(7, 0.8, 0.0, 30).unwrap().value, Complex64::new(1.0, 0.0));
        assert!(m_local_factor(4, 1.0, 1.0, 5).is_err());
        assert!(m_local_factor(2, 0.2, 1.0, 5).is_err());
        let s = m_local_factor(3, 1.0, 1.0, 8).unwrap();
        let o = torus_integral_oracle(3, 1.0, 1.0, 4096).unwrap();
        assert!((s.value - o).norm() < 1e-8f64.max(s.tail_bound));
    }

    #[test]
    fn oracle_examples() {
        assert!((torus_integral_oracle(5, 0.9, 0.0, 64).unwrap() - 1.0).norm() < 1e-14);
        let a = torus_integral_oracle(2, 1.5, 1.0, 4096).unwrap();
        let b = m_local_factor(2, 1.5, 1.0, 30).unwrap().value;
        assert!((a - b).norm() < 1e-8);
        let a = torus_integral_oracle(2, 0.6, 2.0, 8192).unwrap();
        let b = m_local_factor(2, 0.6, 2.0, 200).unwrap().value;
        assert!((a - b).norm() < 1e-6);
        assert!(torus_integral_oracle(2, 1.0, 1.0, 32).is_err());
    }

    #[test]
    fn trapezoid_factor_matches_series_and_oracle() {
        for &p in &[2u64, 3, 7, 101] {
            for &s in &[0.55, 0.8, 1.5] {
                let tf = TorusFactor::new(p, s);
                for &x in &[0.3, 1.0, -2.5] {
                    let t = tf.eval(x).unwrap();
                    let o = torus_integral_oracle(p, s, x, 1 << 14).unwrap();
                    assert!((t - o).norm() < 1e-11, "p={p} s={s} x={x}");
                }
                // large x: the converged value is stable under one more doubling
                let x = 300.0;
                let o = torus_integral_oracle(p, s, x, 1 << 18).unwrap();
                assert!((tf.eval(x).unwrap() - o).norm() < 1e-10, "p={p} s={s}");
            }
        }
    }

    #[test]
    fn q_factor_forms_agree() {
        for &p in &[2u64, 3, 5, 7] {
            for &s in &[0.6, 1.0, 1.5] {
                for &x in &[0.0, 0.5, 1.0, 3.0, -1.7] {
                    let a = q_local_factor(p, s, x);
                    let b = q_local_factor_cosine(p, s, x);
                    assert!((a - b).norm() < 1e-12);
                    assert!(a.norm() <= 1.0 + 1e-12);
                }
            }
        }
        let (ser, tail) = q_local_factor_series(5, 1.0, 1.0, LambdaMode::LogL, 30);
        assert!((ser - q_local_factor(5, 1.0, 1.0)).norm() <= tail.max(1e-15));
        let (ser, tail) = q_local_factor_series(7, 1.5, 2.0, LambdaMode::LogDerivative, 30);
        assert!((ser - q_local_factor_mode(7, 1.5, 2.0, LambdaMode::LogDerivative)).norm() <= tail.max(1e-15));
    }

    #[test]
    fn q_tilde_basic_properties() {
        let v = q_tilde(1.0, 0.0, 1e-8, LambdaMode::LogL).unwrap();
        assert_eq!(v.value, Complex64::new(1.0, 0.0));
        let ev = QTildeEvaluator::new(0.8, LambdaMode::LogL, 20_000).unwrap();
        for &x in &[0.3, 2.0, 17.0] {
            let a = ev.eval(x);
            let b = ev.eval(-x);
            assert!((a - b.conj()).norm() < 1e-12);
        }
        assert!(q_tilde(0.5, 1.0, 1e-8, LambdaMode::LogL).is_err());
        assert!(q_tilde(1.0, 1.0, 0.0, LambdaMode::LogL).is_err());
    }

    #[test]
    fn tail_replacement_matches_explicit_primes() {
        for mode in [LambdaMode::LogL, LambdaMode::LogDerivative] {
            for &(s, x) in &[(0.8, 1.0), (1.0, 3.0), (1.5, 10.0)] {
                let small = QTildeEvaluator::new(s, mode, 20_000).unwrap();
                let big = QTildeEvaluator::new(s, mode, 400_000).unwrap();
                let a = small.eval_detailed(x);
                let b = big.eval_detailed(x);
                let tol = 3.0 * (a.tail_error + b.tail_error);
                assert!((a.value - b.value).norm() < tol.max(1e-12), "{mode} s={s} x={x}");
            }
        }
    }

    #[test]
    fn window_counts_primes() {
        let w = s_sigma_window(1.0, 100.0).unwrap();
        assert_relative_eq!(w.p_high, 2.0 * w.p_low, max_relative = 1e-14);
        let brute = (17u64..=200)
            .filter(|&n| primes::is_prime(n) && (n as f64) > 300.0 / PI && (n as f64) <= 600.0 / PI)
            .count();
        assert_eq!(w.count, brute);
        for s in [0.7, 1.0, 1.5] {
            let x = 40.0;
            let w = s_sigma_window(s, x).unwrap();
            for &p in primes::primes_up_to(w.p_high as u64).iter() {
                let pf = p as f64;
                if p > 16 && pf > w.p_low && pf <= w.p_high {
                    let bound = (1.0 + c_sigma(s) * pf) / (pf + 1.0);
                    assert!(q_local_factor(p, s, x).norm() <= bound + 1e-12);
                }
            }
        }
    }
}
