//! Coefficient polynomials `H_r`, `G_r`, composition sums `δ_k(r)` and the
//! multiplicative coefficients `λ(n)`.
//!
//! `H_r(x)` is the `r`-th Taylor coefficient of `(1−t)^{−x}` and `G_r(x)` that
//! of `exp(xt/(1−t))`. Polynomials are built in exact rational arithmetic and
//! evaluated in floating complex arithmetic.

use crate::error::{domain, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::sync::{Arc, RwLock};

/// Polynomial with exact rational coefficients and a cached float copy.
#[derive(Clone, Debug)]
pub struct CoefficientPolynomial {
    constant: BigRational,
    coeffs: Vec<BigRational>,
    float: Vec<f64>,
}

impl PartialEq for CoefficientPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.constant == other.constant && self.coeffs == other.coeffs
    }
}

impl CoefficientPolynomial {
    /// Builds from coefficients of `x^0, x^1, …`, trimming trailing zeros.
    pub fn from_coefficients(mut all: Vec<BigRational>) -> Self {
        while all.len() > 1 && all.last().is_some_and(Zero::is_zero) {
            all.pop();
        }
        if all.is_empty() {
            all.push(BigRational::zero());
        }
        let float = all.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
        let constant = all.remove(0);
        Self { constant, coeffs: all, float }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn constant(&self) -> &BigRational {
        &self.constant
    }

    /// Coefficients of `x^1 … x^degree`.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coefficient(&self, k: usize) -> BigRational {
        match k {
            0 => self.constant.clone(),
            _ => self.coeffs.get(k - 1).cloned().unwrap_or_else(BigRational::zero),
        }
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = (acc + c) * x;
        }
        acc + &self.constant
    }

    /// Horner evaluation in floating complex arithmetic.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.float.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }
}

/// Which logarithmic object the coefficients `λ(n)` describe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaMode {
    /// `log L(σ, χ)`
    LogL,
    /// `L′/L(σ, χ)`
    #[serde(rename = "logderiv")]
    LogDerivative,
}

impl std::fmt::Display for LambdaMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LambdaMode::LogL => "logl",
            LambdaMode::LogDerivative => "logderiv",
        })
    }
}

impl std::str::FromStr for LambdaMode {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "logl" | "log" => Ok(LambdaMode::LogL),
            "logderiv" | "logderivative" | "derivative" => Ok(LambdaMode::LogDerivative),
            other => domain(format!("unknown mode '{other}' (expected logl or logderiv)")),
        }
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn factorial(k: usize) -> BigInt {
    (1..=k as u64).fold(BigInt::one(), |acc, j| acc * j)
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

// rows[r][k] = δ_k(r) for 1 ≤ k ≤ r; rows[0] is empty
static DELTA: RwLock<Vec<Vec<BigRational>>> = RwLock::new(Vec::new());
static H_CACHE: RwLock<Vec<Arc<CoefficientPolynomial>>> = RwLock::new(Vec::new());
static G_CACHE: RwLock<Vec<Arc<CoefficientPolynomial>>> = RwLock::new(Vec::new());

fn delta_rows(r: usize) -> std::sync::RwLockReadGuard<'static, Vec<Vec<BigRational>>> {
    {
        let rows = DELTA.read().unwrap_or_else(|e| e.into_inner());
        if rows.len() > r {
            return rows;
        }
    }
    {
        let mut rows = DELTA.write().unwrap_or_else(|e| e.into_inner());
        if rows.is_empty() {
            rows.push(Vec::new());
        }
        while rows.len() <= r {
            let n = rows.len();
            let mut row = vec![BigRational::zero(); n + 1];
            row[1] = rat(1, n as i64);
            for k in 2..=n {
                let mut acc = BigRational::zero();
                for j in 1..=(n - k + 1) {
                    acc += &rows[n - j][k - 1] * rat(1, j as i64);
                }
                row[k] = acc;
            }
            rows.push(row);
        }
    }
    DELTA.read().unwrap_or_else(|e| e.into_inner())
}

/// `δ_k(r) = Σ 1/(r₁⋯r_k)` over ordered compositions `r = r₁+…+r_k` into positive parts.
pub fn delta(k: usize, r: usize) -> Result<BigRational> {
    if k == 0 || k > r {
        return domain(format!("delta needs 1 ≤ k ≤ r, got k = {k}, r = {r}"));
    }
    Ok(delta_rows(r)[r][k].clone())
}

fn cached(
    cache: &RwLock<Vec<Arc<CoefficientPolynomial>>>,
    r: usize,
    build: impl Fn(usize) -> CoefficientPolynomial,
) -> Arc<CoefficientPolynomial> {
    if let Some(p) = cache.read().unwrap_or_else(|e| e.into_inner()).get(r) {
        return p.clone();
    }
    let mut c = cache.write().unwrap_or_else(|e| e.into_inner());
    while c.len() <= r {
        let n = c.len();
        c.push(Arc::new(build(n)));
    }
    c[r].clone()
}

/// `H_r(x) = Σ_{k=1}^r δ_k(r)/k! · x^k`, with `H_0 = 1`.
pub fn h_poly(r: usize) -> Arc<CoefficientPolynomial> {
    cached(&H_CACHE, r, |n| {
        if n == 0 {
            return CoefficientPolynomial::from_coefficients(vec![BigRational::one()]);
        }
        let rows = delta_rows(n);
        let mut all = vec![BigRational::zero()];
        for k in 1..=n {
            all.push(&rows[n][k] / BigRational::from_integer(factorial(k)));
        }
        CoefficientPolynomial::from_coefficients(all)
    })
}

/// `G_r(x) = Σ_{k=1}^r C(r−1, k−1)/k! · x^k`, with `G_0 = 1`.
pub fn g_poly(r: usize) -> Arc<CoefficientPolynomial> {
    cached(&G_CACHE, r, |n| {
        if n == 0 {
            return CoefficientPolynomial::from_coefficients(vec![BigRational::one()]);
        }
        let mut all = vec![BigRational::zero()];
        for k in 1..=n {
            all.push(BigRational::new(binomial(n - 1, k - 1), factorial(k)));
        }
        CoefficientPolynomial::from_coefficients(all)
    })
}

pub fn h_eval(r: usize, z: Complex64) -> Complex64 {
    h_poly(r).eval(z)
}

pub fn g_eval(r: usize, z: Complex64) -> Complex64 {
    g_poly(r).eval(z)
}

/// `H_0(z), …, H_n(z)` by the rising-factorial recurrence `H_r = H_{r−1}·(z+r−1)/r`.
pub fn h_values(z: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut h = Complex64::new(1.0, 0.0);
    out.push(h);
    for r in 1..=n {
        h = h * (z + (r - 1) as f64) / r as f64;
        out.push(h);
    }
    out
}

/// `H_r(z)` as the rising factorial `(z)_r / r!`.
pub fn h_value(r: usize, z: Complex64) -> Complex64 {
    let mut h = Complex64::new(1.0, 0.0);
    for j in 1..=r {
        h = h * (z + (j - 1) as f64) / j as f64;
    }
    h
}

/// `G_r(w)` from its explicit sum.
pub fn g_value(r: usize, w: Complex64) -> Complex64 {
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut term = w;
    let mut acc = w;
    for k in 1..r {
        term = term * w * ((r - k) as f64 / (k * (k + 1)) as f64);
        acc += term;
    }
    acc
}

/// `G_0(x), …, G_n(x)` for real `x ≥ 0` by the three-term recurrence
/// `r·G_r = (2(r−1) + x)·G_{r−1} − (r−2)·G_{r−2}`.
pub fn g_values_real(x: f64, n: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    if n >= 1 {
        out.push(x);
    }
    for r in 2..=n {
        let v = ((2.0 * (r - 1) as f64 + x) * out[r - 1] - (r - 2) as f64 * out[r - 2]) / r as f64;
        out.push(v);
    }
    out
}

/// `ln G_r(x)` for `0 ≤ r ≤ n` and real `x > 0`, rescaling to avoid overflow.
pub fn ln_g_values_real(x: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0];
    if n == 0 {
        return out;
    }
    out.push(x.ln());
    // carry (G_{r−1}, G_{r−2}) scaled by e^{−shift}
    let mut shift = 0.0;
    let (mut a, mut b) = (x, 1.0);
    for r in 2..=n {
        let v = ((2.0 * (r - 1) as f64 + x) * a - (r - 2) as f64 * b) / r as f64;
        out.push(v.ln() + shift);
        b = a;
        a = v;
        if a > 1e100 {
            a /= 1e100;
            b /= 1e100;
            shift += 100.0 * std::f64::consts::LN_10;
        }
    }
    out
}

/// `λ(p^k)` for the given mode: `H_k(ix)` for `log L`, `G_k(−ix·log p)` for `L′/L`.
pub fn lambda_prime_power(p: u64, k: u32, x: f64, mode: LambdaMode) -> Complex64 {
    match mode {
        LambdaMode::LogL => h_value(k as usize, Complex64::new(0.0, x)),
        LambdaMode::LogDerivative => g_value(k as usize, Complex64::new(0.0, -x * (p as f64).ln())),
    }
}

/// Multiplicative coefficient `λ(n)` over the prime factorization of `n`.
pub fn lambda(n: u64, x: f64, mode: LambdaMode) -> Result<Complex64> {
    if n == 0 {
        return domain("lambda needs n ≥ 1");
    }
    Ok(crate::primes::factorize(n)
        .into_iter()
        .map(|(p, k)| lambda_prime_power(p, k, x, mode))
        .fold(Complex64::new(1.0, 0.0), |a, b| a * b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn compositions(r: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 1 {
            return vec![vec![r]];
        }
        let mut out = Vec::new();
        for first in 1..=(r + 1 - k) {
            for mut rest in compositions(r - first, k - 1) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }

    #[test]
    fn delta_matches_enumeration() {
        for r in 1..=10 {
            for k in 1..=r {
                let brute = compositions(r, k)
                    .iter()
                    .map(|c| BigRational::new(BigInt::one(), c.iter().product::<usize>().into()))
                    .fold(BigRational::zero(), |a, b| a + b);
                assert_eq!(delta(k, r).unwrap(), brute, "k={k} r={r}");
            }
        }
    }

    #[test]
    fn delta_examples_and_errors() {
        assert_eq!(delta(1, 7).unwrap(), rat(1, 7));
        assert_eq!(delta(6, 6).unwrap(), rat(1, 1));
        assert_eq!(delta(2, 3).unwrap(), rat(1, 1));
        assert!(delta(0, 3).is_err());
        assert!(delta(4, 3).is_err());
    }

    #[test]
    fn small_polynomials() {
        assert_eq!(*h_poly(0), CoefficientPolynomial::from_coefficients(vec![rat(1, 1)]));
        let h2 = h_poly(2);
        assert_eq!(h2.coeffs(), &[rat(1, 2), rat(1, 2)]);
        let h3 = h_poly(3);
        assert_eq!(h3.coeffs(), &[rat(1, 3), rat(1, 2), rat(1, 6)]);
        assert_eq!(g_poly(1).coeffs(), &[rat(1, 1)]);
        assert_eq!(g_poly(2).coeffs(), &[rat(1, 1), rat(1, 2)]);
        assert_eq!(g_poly(0).degree(), 0);
    }

    #[test]
    fn degrees_and_positivity() {
        for r in 1..=25 {
            for p in [h_poly(r), g_poly(r)] {
                assert_eq!(p.degree(), r);
                assert!(p.constant().is_zero());
                assert!(p.coeffs().iter().all(|c| *c > BigRational::zero()));
            }
        }
    }

    #[test]
    fn evaluation_examples() {
        let i = Complex64::new(0.0, 1.0);
        assert_eq!(h_eval(1, i), i);
        assert!((h_eval(2, i) - Complex64::new(-0.5, 0.5)).norm() < 1e-15);
        assert_eq!(g_eval(2, Complex64::new(2.0, 0.0)), Complex64::new(4.0, 0.0));
    }

    #[test]
    fn float_recurrences_agree_with_exact_polynomials() {
        for &x in &[0.3, 1.0, 2.5, 5.0] {
            let z = Complex64::new(0.0, x);
            let hv = h_values(z, 40);
            let gv = g_values_real(x, 40);
            let lg = ln_g_values_real(x, 40);
            for r in 0..=40 {
                let exact_h = h_eval(r, z);
                assert!((hv[r] - exact_h).norm() <= 1e-13 * exact_h.norm().max(1.0));
                let exact_g = g_eval(r, Complex64::new(x, 0.0)).re;
                assert_relative_eq!(gv[r], exact_g, max_relative = 1e-12);
                assert_relative_eq!(lg[r].exp(), exact_g, max_relative = 1e-12);
                let w = Complex64::new(0.4, -x);
                let exact = g_eval(r, w);
                assert!((g_value(r, w) - exact).norm() <= 1e-12 * exact.norm().max(1.0));
            }
        }
    }

    #[test]
    fn lambda_examples() {
        for mode in [LambdaMode::LogL, LambdaMode::LogDerivative] {
            assert_eq!(lambda(1, 0.7, mode).unwrap(), Complex64::new(1.0, 0.0));
        }
        let x = 0.7;
        assert!((lambda(7, x, LambdaMode::LogL).unwrap() - Complex64::new(0.0, x)).norm() < 1e-15);
        let d = lambda(7, x, LambdaMode::LogDerivative).unwrap();
        assert!((d - Complex64::new(0.0, -x * 7f64.ln())).norm() < 1e-15);
        // multiplicativity over coprime parts
        let a = lambda(12, x, LambdaMode::LogL).unwrap();
        let b = lambda(4, x, LambdaMode::LogL).unwrap() * lambda(3, x, LambdaMode::LogL).unwrap();
        assert!((a - b).norm() < 1e-15);
        assert!(lambda(0, x, LambdaMode::LogL).is_err());
    }

    #[test]
    fn lambda_growth_constant_is_moderate() {
        // |λ(n)| ≪ n^ε: the constant in |λ(n)| ≤ C·n^{1/2} stays small for n ≤ 10⁴
        let mut worst: f64 = 0.0;
        for n in 1..=10_000u64 {
            for x in [-3.0, -1.0, 0.5, 3.0] {
                let l = lambda(n, x, LambdaMode::LogL).unwrap().norm();
                worst = worst.max(l / (n as f64).sqrt());
            }
        }
        assert!(worst < 10.0, "growth constant {worst}");
    }

    #[test]
    fn mode_parsing_round_trips() {
        for m in [LambdaMode::LogL, LambdaMode::LogDerivative] {
            assert_eq!(m.to_string().parse::<LambdaMode>().unwrap(), m);
        }
        assert!("zeta".parse::<LambdaMode>().is_err());
    }

    proptest! {
        #[test]
        fn bound_g_holds(r in 0usize..=40, x in -5.0f64..5.0) {
            let h = h_eval(r, Complex64::new(0.0, x)).norm();
            let g = g_eval(r, Complex64::new(x.abs(), 0.0)).re;
            let env = 1.4f64.powf(r as f64 / 2.0) * (x.abs() / (1.4f64.sqrt() - 1.0)).exp();
            prop_assert!(h <= g + 1e-9);
            prop_assert!(g <= env + 1e-9);
        }
    }
}
