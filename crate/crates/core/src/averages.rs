//! Family averages of `ψ_x`, histograms, torus Monte Carlo and comparison reports.
//!
//! Every reduction goes through [`crate::par`], so results are bitwise
//! independent of the thread count.

use crate::characters::{enumerate_fundamental_discriminants, CharacterTable, DiscriminantSet, QuadraticCharacter};
use crate::coefficients::{lambda_prime_power, LambdaMode};
use crate::error::{domain, Error, Result};
use crate::fourier::{CharacteristicFunction, DensityGrid, MTildeFunction, Metadata};
use crate::lfunc::{apply_dagger, real_log_object, SmoothedSeries};
use crate::local_factors::q_tilde;
use crate::par;
use crate::primes::{self, SpfTable};
use crate::special::hurwitz_zeta_reg;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::PI;

/// Grid step of the positivity check behind the `†`-sum.
pub const DAGGER_STEP: f64 = 0.05;

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub enum Family {
    DirichletPrimeQ,
    QuadraticD,
    TorusMC,
}

/// Empirical side versus reference side, entry by entry.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ComparisonReport {
    pub family: Family,
    pub parameters: Metadata,
    /// x-values for `ψ_x` statistics, bin left edges for histograms
    pub points: Vec<f64>,
    pub empirical: Vec<Complex64>,
    pub reference: Vec<Complex64>,
    pub discrepancies: Vec<f64>,
    /// Monte Carlo standard errors, when the empirical side is sampled
    pub standard_errors: Option<Vec<f64>>,
    pub excluded_count: usize,
    pub excluded: Vec<i64>,
}

impl ComparisonReport {
    fn build(
        family: Family,
        parameters: Metadata,
        points: Vec<f64>,
        empirical: Vec<Complex64>,
        reference: Vec<Complex64>,
    ) -> Self {
        let discrepancies = empirical.iter().zip(&reference).map(|(a, b)| (a - b).norm()).collect();
        Self {
            family,
            parameters,
            points,
            empirical,
            reference,
            discrepancies,
            standard_errors: None,
            excluded_count: 0,
            excluded: Vec::new(),
        }
    }

    pub fn max_discrepancy(&self) -> f64 {
        self.discrepancies.iter().copied().fold(0.0, f64::max)
    }
}

fn psi_vec(v: f64, xs: &[f64], out: &mut [Complex64]) {
    for (o, &x) in out.iter_mut().zip(xs) {
        *o = Complex64::from_polar(1.0, x * v);
    }
}

/// `2·Re 𝓖_{σ,P_q(y)}(χ)` for every non-principal `χ` mod `q`, in index order.
///
/// Character values enter through exact exponent indices `j·dlog(p) mod (q−1)`.
pub fn dirichlet_values(q: u64, sigma: f64, y: f64) -> Result<Vec<f64>> {
    if q < 5 {
        return domain(format!("q must be a prime ≥ 5, got {q}"));
    }
    if !(sigma > 0.5) {
        return domain(format!("sigma must exceed 0.5, got {sigma}"));
    }
    if !(y > 2.0) {
        return domain(format!("y must exceed 2, got {y}"));
    }
    if y >= q as f64 {
        return domain(format!("y = {y} must be below q = {q}"));
    }
    let table = CharacterTable::new(q)?;
    let m = table.order();
    let cos_table: Vec<f64> = (0..m).map(|e| (2.0 * PI * e as f64 / m as f64).cos()).collect();
    let local: Vec<(u64, f64)> = primes::primes_up_to(y.floor() as u64)
        .iter()
        .map(|&p| (table.dlog(p).expect("p < q is a unit"), (p as f64).powf(-sigma)))
        .collect();
    Ok(par::map_collect((m - 1) as usize, |i| {
        let j = i as u64 + 1;
        let mut acc = 0.0;
        for &(l, z) in &local {
            let e = ((j as u128 * l as u128) % m as u128) as usize;
            acc -= (1.0 - 2.0 * z * cos_table[e] + z * z).ln();
        }
        acc
    }))
}

/// `(1/(q−2))·Σ_{χ ≠ χ_0} ψ_x(2·Re 𝓖_{σ,P_q(y)}(χ))`.
pub fn dirichlet_average(q: u64, sigma: f64, x: f64, y: f64) -> Result<Complex64> {
    Ok(dirichlet_average_many(q, sigma, &[x], y)?[0])
}

pub fn dirichlet_average_many(q: u64, sigma: f64, xs: &[f64], y: f64) -> Result<Vec<Complex64>> {
    let values = dirichlet_values(q, sigma, y)?;
    Ok(average_psi(&values, xs, values.len()))
}

fn average_psi(values: &[f64], xs: &[f64], denominator: usize) -> Vec<Complex64> {
    let sums = par::sum_indexed_vec(values.len(), xs.len(), |i, out| psi_vec(values[i], xs, out));
    sums.into_iter().map(|s| s / denominator as f64).collect()
}

/// `y = ⌈√(log log q)⌉`, the prime range tied to `q` in the limit theorem for full L-values.
pub fn theorem_y(q: u64) -> f64 {
    ((q as f64).ln().ln().sqrt()).ceil().max(2.0)
}

pub const FULL_L_MAX_Q: u64 = 20_011;

/// `2·log|L(σ, χ)|` for every non-principal `χ` mod `q`.
///
/// Uses `L(σ, χ_j) = q^{−σ} Σ_e e^{2πi·je/(q−1)} ζ(σ, g^e/q)`, a direct
/// transform over discrete logs, so the cost is `O(q²)`.
pub fn dirichlet_full_values(q: u64, sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.5) {
        return domain(format!("sigma must exceed 0.5, got {sigma}"));
    }
    if !(5..=FULL_L_MAX_Q).contains(&q) {
        return domain(format!("full L-values need a prime 5 ≤ q ≤ {FULL_L_MAX_Q}, got {q}"));
    }
    let table = CharacterTable::new(q)?;
    let m = table.order();
    let g = table.generator();
    let qf = q as f64;
    let mut zetas = Vec::with_capacity(m as usize);
    let mut a = 1u64;
    for _ in 0..m {
        zetas.push(hurwitz_zeta_reg(sigma, a as f64 / qf));
        a = a * g % q;
    }
    let units: Vec<Complex64> = (0..m).map(|e| Complex64::from_polar(1.0, 2.0 * PI * e as f64 / m as f64)).collect();
    let scale = qf.powf(-sigma);
    let out = par::map_collect((m - 1) as usize, |i| {
        let j = i as u64 + 1;
        let mut acc = crate::summation::ComplexSum::new();
        for (e, z) in zetas.iter().enumerate() {
            acc.add(units[((j * e as u64) % m) as usize] * *z);
        }
        let l = acc.total() * scale;
        if l.norm() < 1e-300 {
            Err(Error::Numeric(format!("L({sigma}, χ_{j}) vanishes numerically")))
        } else {
            Ok(2.0 * l.norm().ln())
        }
    });
    out.into_iter().collect()
}

/// How `𝓛(σ, χ_D)` is obtained for a discriminant.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub enum Via {
    /// `Σ λ(n)χ_D(n)n^{−σ}e^{−n/X}` with `X = Y^{1/8}` unless given
    SmoothedSeries { smoothing: Option<f64> },
    /// theta-series L-values, differentiated numerically for `L′/L`
    Oracle,
}

impl Via {
    pub fn smoothing_for(&self, y: u64) -> Option<f64> {
        match self {
            Via::SmoothedSeries { smoothing } => Some(smoothing.unwrap_or_else(|| (y as f64).powf(0.125)).max(1.5)),
            Via::Oracle => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Via::SmoothedSeries { .. } => "smoothed-series",
            Via::Oracle => "oracle",
        }
    }
}

/// Fundamental discriminants up to `Y` with the `†`-filter applied at `σ`.
pub fn filtered_discriminants(y: u64, sigma: f64) -> Result<DiscriminantSet> {
    if y < 3 {
        return domain(format!("Y must be at least 3, got {y}"));
    }
    let mut set = enumerate_fundamental_discriminants(y);
    apply_dagger(&mut set, sigma, DAGGER_STEP)?;
    Ok(set)
}

/// Family average over the `†`-passing members, normalized by `N(Y)`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct QuadraticAverage {
    pub values: Vec<Complex64>,
    pub total: usize,
    pub excluded: Vec<i64>,
}

/// `(1/N(Y))·Σ†_{|D| ≤ Y} ψ_x(𝓛(σ, χ_D))` for several `x`.
pub fn quadratic_average_set(
    set: &DiscriminantSet,
    sigma: f64,
    xs: &[f64],
    mode: LambdaMode,
    via: Via,
) -> Result<QuadraticAverage> {
    let mut excluded = set.excluded();
    let keep: Vec<i64> = set
        .discriminants
        .iter()
        .zip(&set.dagger_flags)
        .filter(|(_, f)| **f != Some(false))
        .map(|(d, _)| *d)
        .collect();
    let total = set.len();
    let values = match via {
        Via::Oracle => {
            let logs = quadratic_log_values(&keep, sigma, mode);
            let mut vals = Vec::with_capacity(keep.len());
            for (d, v) in keep.iter().zip(logs) {
                match v {
                    Some(v) => vals.push(v),
                    None => excluded.push(*d),
                }
            }
            average_psi(&vals, xs, total)
        }
        Via::SmoothedSeries { .. } => {
            let smoothing = via.smoothing_for(set.bound).expect("series route");
            let cap = (30.0 * smoothing).ceil() as usize;
            let spf = SpfTable::new(cap);
            let series: Vec<SmoothedSeries> =
                xs.iter().map(|&x| SmoothedSeries::with_spf(sigma, x, mode, smoothing, &spf)).collect();
            let sums = par::sum_indexed_vec(keep.len(), xs.len(), |i, out| {
                let chi = QuadraticCharacter::new(keep[i]);
                for (o, s) in out.iter_mut().zip(&series) {
                    *o = s.eval_quadratic(&chi);
                }
            });
            sums.into_iter().map(|s| s / total as f64).collect()
        }
    };
    excluded.sort_by_key(|&d| (d.unsigned_abs(), d));
    Ok(QuadraticAverage { values, total, excluded })
}

/// `𝓛(σ, χ_D)` by the oracle route; `None` where `L(σ, χ_D) ≤ 0`.
pub fn quadratic_log_values(discriminants: &[i64], sigma: f64, mode: LambdaMode) -> Vec<Option<f64>> {
    par::map_slice(discriminants, |&d| real_log_object(sigma, d, mode))
}

pub fn quadratic_average(y: u64, sigma: f64, x: f64, mode: LambdaMode, via: Via) -> Result<QuadraticAverage> {
    if y < 1000 {
        return domain(format!("Y must be at least 1000, got {y}"));
    }
    let set = filtered_discriminants(y, sigma)?;
    quadratic_average_set(&set, sigma, &[x], mode, via)
}

/// `Σ_{n ≤ n_max} λ(n²)·Π_{p|n} p/(p+1)·n^{−2σ}`.
pub fn rhs_series(sigma: f64, x: f64, mode: LambdaMode, n_max: usize) -> Result<Complex64> {
    Ok(rhs_series_many(sigma, &[x], mode, n_max)?[0])
}

/// [`rhs_series`] for several `x` in one pass over `n`.
pub fn rhs_series_many(sigma: f64, xs: &[f64], mode: LambdaMode, n_max: usize) -> Result<Vec<Complex64>> {
    if !(sigma > 0.5) {
        return domain(format!("sigma must exceed 0.5, got {sigma}"));
    }
    if n_max < 1000 {
        return domain(format!("n_max must be at least 1000, got {n_max}"));
    }
    let spf = SpfTable::new(n_max);
    Ok(par::sum_indexed_vec(n_max, xs.len(), |i, out| {
        let n = i + 1;
        let scale = (-2.0 * sigma * (n as f64).ln()).exp();
        out.fill(Complex64::new(scale, 0.0));
        spf.for_each_factor(n, |p, k| {
            let pf = p as f64;
            let w = pf / (pf + 1.0);
            for (o, &x) in out.iter_mut().zip(xs) {
                *o *= lambda_prime_power(p, 2 * k, x, mode) * w;
            }
        });
    }))
}

/// Statistic estimated by [`torus_mc`].
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub enum Statistic {
    Psi(Vec<f64>),
    /// ascending bin edges
    Histogram(Vec<f64>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct McEstimate {
    pub samples: usize,
    pub seed: u64,
    pub mean: Vec<Complex64>,
    pub standard_error: Vec<f64>,
}

/// One draw of `2·Re 𝓖_{σ,P(y)}` with uniform angles, from stream `index` of `seed`.
pub fn torus_sample(z: &[f64], seed: u64, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut acc = 0.0;
    for &zp in z {
        let theta = 2.0 * PI * rng.random::<f64>();
        acc -= (1.0 - 2.0 * zp * theta.cos() + zp * zp).ln();
    }
    acc
}

pub const MIN_SAMPLES: usize = 10_000;

pub fn torus_values(sigma: f64, y: f64, samples: usize, seed: u64) -> Result<Vec<f64>> {
    if !(sigma > 0.5) {
        return domain(format!("sigma must exceed 0.5, got {sigma}"));
    }
    if !(y > 2.0) {
        return domain(format!("y must exceed 2, got {y}"));
    }
    if samples < MIN_SAMPLES {
        return domain(format!("samples must be at least {MIN_SAMPLES}, got {samples}"));
    }
    let z: Vec<f64> = primes::primes_up_to(y.floor() as u64).iter().map(|&p| (p as f64).powf(-sigma)).collect();
    Ok(par::map_collect(samples, |i| torus_sample(&z, seed, i as u64)))
}

/// Monte Carlo estimate over the torus `Π_{p ≤ y} S¹` with Haar measure.
pub fn torus_mc(sigma: f64, y: f64, statistic: &Statistic, samples: usize, seed: u64) -> Result<McEstimate> {
    let values = torus_values(sigma, y, samples, seed)?;
    let n = samples as f64;
    let (mean, standard_error) = match statistic {
        Statistic::Psi(xs) => {
            let mean = average_psi(&values, xs, samples);
            // |ψ| = 1, so the sample variance is (1 − |mean|²)·n/(n−1)
            let se = mean.iter().map(|m| ((1.0 - m.norm_sqr()).max(0.0) / (n - 1.0)).sqrt()).collect();
            (mean, se)
        }
        Statistic::Histogram(edges) => {
            let h = Histogram::from_values(edges, &values, samples)?;
            (h.frequencies.iter().map(|&f| Complex64::new(f, 0.0)).collect(), h.standard_errors)
        }
    };
    Ok(McEstimate { samples, seed, mean, standard_error })
}

/// Binned empirical frequencies with binomial standard errors.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    /// `count_b / denominator`
    pub frequencies: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub counted: usize,
    /// values outside `[edges[0], edges[last]]`
    pub outside: usize,
}

impl Histogram {
    pub fn from_values(edges: &[f64], values: &[f64], denominator: usize) -> Result<Self> {
        if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("histogram edges must be ascending with at least one bin");
        }
        let nb = edges.len() - 1;
        let partial = par::map_blocks(values.len(), par::BLOCK, |a, b| {
            let mut counts = vec![0usize; nb + 1];
            for &v in &values[a..b] {
                let k = edges.partition_point(|&e| e <= v);
                if k == 0 || (k > nb && v > edges[nb]) {
                    counts[nb] += 1;
                } else {
                    counts[(k - 1).min(nb - 1)] += 1;
                }
            }
            counts
        });
        let mut counts = vec![0usize; nb + 1];
        for c in partial {
            for (t, v) in counts.iter_mut().zip(c) {
                *t += v;
            }
        }
        let n = denominator as f64;
        let frequencies: Vec<f64> = counts[..nb].iter().map(|&c| c as f64 / n).collect();
        let standard_errors = frequencies.iter().map(|&f| (f * (1.0 - f) / n).sqrt()).collect();
        Ok(Self { edges: edges.to_vec(), frequencies, standard_errors, counted: values.len(), outside: counts[nb] })
    }

    /// `Σ_b frequencies`
    pub fn total_frequency(&self) -> f64 {
        self.frequencies.iter().sum()
    }

    /// Bin masses `∫_bin density du/√(2π)` of a density grid.
    pub fn reference_from(&self, density: &DensityGrid) -> Vec<f64> {
        self.edges.windows(2).map(|w| density.interval_mass(w[0], w[1])).collect()
    }
}

/// `n` equal bins over `[lo, hi]`.
pub fn uniform_edges(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
}

/// Which family a histogram is drawn from.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub enum HistogramFamily {
    /// truncated Euler logs over the characters mod `q`
    Dirichlet { q: u64, y: f64 },
    /// `2 log|L(σ, χ)|` over the characters mod `q`
    DirichletFullL { q: u64 },
    Quadratic { y: u64, mode: LambdaMode },
    Torus { y: f64, samples: usize, seed: u64 },
}

/// Histogram of the family's values with frequencies normalized by the family size.
pub fn histogram_average(family: HistogramFamily, sigma: f64, edges: &[f64]) -> Result<(Histogram, Vec<i64>)> {
    match family {
        HistogramFamily::Dirichlet { q, y } => {
            let v = dirichlet_values(q, sigma, y)?;
            Ok((Histogram::from_values(edges, &v, v.len())?, Vec::new()))
        }
        HistogramFamily::DirichletFullL { q } => {
            let v = dirichlet_full_values(q, sigma)?;
            Ok((Histogram::from_values(edges, &v, v.len())?, Vec::new()))
        }
        HistogramFamily::Quadratic { y, mode } => {
            let set = filtered_discriminants(y, sigma)?;
            let mut excluded = set.excluded();
            let keep: Vec<i64> = set
                .discriminants
                .iter()
                .zip(&set.dagger_flags)
                .filter(|(_, f)| **f != Some(false))
                .map(|(d, _)| *d)
                .collect();
            let mut vals = Vec::with_capacity(keep.len());
            for (d, v) in keep.iter().zip(quadratic_log_values(&keep, sigma, mode)) {
                match v {
                    Some(v) => vals.push(v),
                    None => excluded.push(*d),
                }
            }
            Ok((Histogram::from_values(edges, &vals, set.len())?, excluded))
        }
        HistogramFamily::Torus { y, samples, seed } => {
            let v = torus_values(sigma, y, samples, seed)?;
            Ok((Histogram::from_values(edges, &v, samples)?, Vec::new()))
        }
    }
}

fn params(pairs: &[(&str, serde_json::Value)]) -> Metadata {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Dirichlet family average against `M̃_{σ,P(y)}`.
pub fn compare_dirichlet(q: u64, sigma: f64, xs: &[f64], y: f64) -> Result<ComparisonReport> {
    let empirical = dirichlet_average_many(q, sigma, xs, y)?;
    let m = MTildeFunction::new(sigma, y)?;
    let reference = xs.iter().map(|&x| m.eval(x)).collect::<Result<Vec<_>>>()?;
    let p = params(&[
        ("q", json!(q)),
        ("sigma", json!(sigma)),
        ("y", json!(y)),
        ("statistic", json!("psi_x")),
        ("normalization", json!("1/(q-2)")),
        ("reference", json!("m_tilde")),
    ]);
    Ok(ComparisonReport::build(Family::DirichletPrimeQ, p, xs.to_vec(), empirical, reference))
}

/// Quadratic family average against `Q̃_σ`.
pub fn compare_quadratic(
    y: u64,
    sigma: f64,
    xs: &[f64],
    mode: LambdaMode,
    via: Via,
    tail_tol: f64,
) -> Result<ComparisonReport> {
    if y < 1000 {
        return domain(format!("Y must be at least 1000, got {y}"));
    }
    if !(tail_tol > 0.0) {
        return domain(format!("tail_tol must be positive, got {tail_tol}"));
    }
    let set = filtered_discriminants(y, sigma)?;
    let avg = quadratic_average_set(&set, sigma, xs, mode, via)?;
    let reference = xs
        .iter()
        .map(|&x| q_tilde(sigma, x, tail_tol, mode).map(|v| v.value))
        .collect::<Result<Vec<_>>>()?;
    let mut p = params(&[
        ("Y", json!(y)),
        ("sigma", json!(sigma)),
        ("mode", json!(mode.to_string())),
        ("via", json!(via.label())),
        ("N(Y)", json!(avg.total)),
        ("dagger_step", json!(DAGGER_STEP)),
        ("tail_tol", json!(tail_tol)),
        ("statistic", json!("psi_x")),
        ("reference", json!("q_tilde")),
    ]);
    if let Some(s) = via.smoothing_for(y) {
        p.insert("X".into(), json!(s));
    }
    let mut r = ComparisonReport::build(Family::QuadraticD, p, xs.to_vec(), avg.values, reference);
    r.excluded_count = avg.excluded.len();
    r.excluded = avg.excluded;
    Ok(r)
}

/// Torus Monte Carlo against `M̃_{σ,P(y)}`.
pub fn compare_torus(sigma: f64, y: f64, xs: &[f64], samples: usize, seed: u64) -> Result<ComparisonReport> {
    let est = torus_mc(sigma, y, &Statistic::Psi(xs.to_vec()), samples, seed)?;
    let m = MTildeFunction::new(sigma, y)?;
    let reference = xs.iter().map(|&x| m.eval(x)).collect::<Result<Vec<_>>>()?;
    let p = params(&[
        ("sigma", json!(sigma)),
        ("y", json!(y)),
        ("samples", json!(samples)),
        ("seed", json!(seed)),
        ("rng", json!("ChaCha8, one stream per sample index")),
        ("statistic", json!("psi_x")),
        ("reference", json!("m_tilde")),
    ]);
    let mut r = ComparisonReport::build(Family::TorusMC, p, xs.to_vec(), est.mean, reference);
    r.standard_errors = Some(est.standard_error);
    Ok(r)
}

/// Histogram frequencies against bin masses of an inverted density.
pub fn compare_histogram(
    family: HistogramFamily,
    sigma: f64,
    edges: &[f64],
    density: &DensityGrid,
) -> Result<ComparisonReport> {
    let (h, excluded) = histogram_average(family, sigma, edges)?;
    let reference = h.reference_from(density);
    let kind = match family {
        HistogramFamily::Dirichlet { .. } | HistogramFamily::DirichletFullL { .. } => Family::DirichletPrimeQ,
        HistogramFamily::Quadratic { .. } => Family::QuadraticD,
        HistogramFamily::Torus { .. } => Family::TorusMC,
    };
    let mut p = params(&[
        ("sigma", json!(sigma)),
        ("family", serde_json::to_value(family)?),
        ("statistic", json!("histogram")),
        ("bin_edges", json!(edges)),
        ("outside", json!(h.outside)),
    ]);
    if let HistogramFamily::DirichletFullL { .. } = family {
        p.insert("note".into(), json!("full L-values; compared at the prime range of the given density"));
    }
    let mut r = ComparisonReport::build(
        kind,
        p,
        edges[..edges.len() - 1].to_vec(),
        h.frequencies.iter().map(|&f| Complex64::new(f, 0.0)).collect(),
        reference.iter().map(|&f| Complex64::new(f, 0.0)).collect(),
    );
    if matches!(family, HistogramFamily::Torus { .. }) {
        r.standard_errors = Some(h.standard_errors);
    }
    r.excluded_count = excluded.len();
    r.excluded = excluded;
    Ok(r)
}

/// A report where the reference is a precomputed characteristic function.
pub fn reference_values(f: &dyn CharacteristicFunction, xs: &[f64]) -> Result<Vec<Complex64>> {
    xs.iter().map(|&x| f.eval(x)).collect()
}
