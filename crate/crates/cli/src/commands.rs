use crate::args::*;
use serde::Serialize;
use serde_json::json;
use std::path::PathBuf;
use valdist_core::averages::{self, ComparisonReport, HistogramFamily, Via};
use valdist_core::characters::enumerate_fundamental_discriminants;
use valdist_core::fourier::{self, CharacteristicFunction, DensityGrid, FourierGrid, MTildeFunction, Metadata, QTildeFunction};
use valdist_core::local_factors::q_tilde;
use valdist_core::{io, lfunc, primes, Error, Result};

/// Where and how a run writes its files.
pub struct Context {
    pub out_dir: PathBuf,
    pub format: Format,
    pub config: Metadata,
    pub written: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

impl Context {
    fn warn(&mut self, w: String) {
        eprintln!("warning: {w}");
        self.warnings.push(w);
    }

    fn emit<T: Serialize>(&mut self, name: &str, kind: &str, config: &Metadata, csv: impl FnOnce() -> String, payload: &T) -> Result<()> {
        let (ext, body) = match self.format {
            Format::Csv => ("csv", csv()),
            Format::Json => ("json", io::json_document(config, kind, payload)?),
        };
        let path = self.out_dir.join(format!("{name}.{kind}.{ext}"));
        io::write_file(&path, &body)?;
        self.written.push(path);
        Ok(())
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.5) {
        return invalid(format!("sigma must exceed 0.5, got {sigma}"));
    }
    Ok(())
}

fn check_y(y: f64) -> Result<()> {
    if !(y > 2.0) {
        return invalid(format!("y must exceed 2, got {y}"));
    }
    Ok(())
}

fn check_x(xs: &[f64]) -> Result<()> {
    if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
        return invalid(format!("x values must be finite, got {x}"));
    }
    Ok(())
}

fn check_grid(g: &GridArgs) -> Result<()> {
    if !(g.tol > 0.0) {
        return invalid(format!("tol must be positive, got {}", g.tol));
    }
    if let Some(x) = g.x_max {
        if !(x > 0.0 && x.is_finite()) {
            return invalid(format!("x-max must be positive, got {x}"));
        }
    }
    if let Some(n) = g.n_points {
        if n < 129 || n % 2 == 0 {
            return invalid(format!("n-points must be odd and at least 129, got {n}"));
        }
    }
    if !(g.u_max > g.u_min) || g.n_u < 2 {
        return invalid(format!("empty u-grid [{}, {}] with {} points", g.u_min, g.u_max, g.n_u));
    }
    Ok(())
}

fn check_bins(b: &BinArgs) -> Result<()> {
    if b.bins > 0 && !(b.u_max > b.u_min) {
        return invalid(format!("empty histogram range [{}, {}]", b.u_min, b.u_max));
    }
    Ok(())
}

fn merged(config: &Metadata, extra: &Metadata) -> Metadata {
    let mut out = config.clone();
    for (k, v) in extra {
        match out.get(k) {
            Some(cur) if !cur.is_null() => {}
            _ => {
                out.insert(k.clone(), v.clone());
            }
        }
    }
    out
}

/// Samples and inverts `f`; `probe` picks the cutoff when none is given.
fn density(
    ctx: &mut Context,
    probe: &dyn CharacteristicFunction,
    make: impl Fn(f64) -> Result<Box<dyn CharacteristicFunction>>,
    g: &GridArgs,
) -> Result<(FourierGrid, DensityGrid)> {
    let x_max = match g.x_max {
        Some(x) => x,
        None => fourier::auto_truncate(probe, g.tol)?,
    };
    let u_extent = g.u_min.abs().max(g.u_max.abs());
    let n = g.n_points.unwrap_or_else(|| fourier::default_n_points(x_max, u_extent));
    let f = make(x_max)?;
    let grid = fourier::sample_characteristic(f.as_ref(), x_max, n)?;
    let d = fourier::invert(&grid, g.u_min, g.u_max, g.n_u)?;
    for w in &d.warnings {
        ctx.warn(w.clone());
    }
    Ok((grid, d))
}

fn write_density(ctx: &mut Context, name: &str, grid: &FourierGrid, d: &DensityGrid) -> Result<()> {
    let cfg = merged(&ctx.config, &grid.metadata);
    ctx.emit(name, "fourier", &cfg, || io::fourier_csv(grid, &cfg), grid)?;
    let cfg = merged(&ctx.config, &d.metadata);
    ctx.emit(name, "density", &cfg, || io::density_csv(d, &cfg), d)?;
    eprintln!("mass = {}, max imaginary residue = {:e}, min value = {:e}", d.mass, d.max_imag_residue, d.min_value);
    Ok(())
}

fn write_points(ctx: &mut Context, name: &str, xs: &[f64], values: Vec<num_complex::Complex64>, extra: Metadata) -> Result<()> {
    let cfg = merged(&ctx.config, &extra);
    let payload: Vec<_> = xs.iter().zip(&values).map(|(x, v)| json!({"x": x, "re": v.re, "im": v.im})).collect();
    ctx.emit(name, "points", &cfg, || io::points_csv(xs, &values, &cfg), &payload)
}

pub fn mdensity(ctx: &mut Context, a: &MDensityArgs) -> Result<()> {
    check_sigma(a.sigma)?;
    check_y(a.y)?;
    check_x(&a.x)?;
    check_grid(&a.grid)?;
    if a.sigma < fourier::SLOW_DECAY_SIGMA {
        ctx.warn(format!("slow-decay regime: sigma = {} < {}", a.sigma, fourier::SLOW_DECAY_SIGMA));
    }
    let f = MTildeFunction::new(a.sigma, a.y)?;
    let (grid, d) = density(ctx, &f, |_| Ok(Box::new(MTildeFunction::new(a.sigma, a.y)?)), &a.grid)?;
    write_density(ctx, &a.name, &grid, &d)?;
    if !a.x.is_empty() {
        let values = a.x.iter().map(|&x| f.eval(x)).collect::<Result<Vec<_>>>()?;
        write_points(ctx, &a.name, &a.x, values, f.metadata())?;
    }
    Ok(())
}

/// Cutoff range used when probing the decay of `Q̃`.
const Q_PROBE_RANGE: f64 = fourier::DEFAULT_TRUNCATION_CAP;

pub fn qdensity(ctx: &mut Context, a: &QDensityArgs) -> Result<()> {
    check_sigma(a.sigma)?;
    check_x(&a.x)?;
    check_grid(&a.grid)?;
    if !(a.tail_tol > 0.0) {
        return invalid(format!("tail-tol must be positive, got {}", a.tail_tol));
    }
    if a.sigma < fourier::SLOW_DECAY_SIGMA {
        ctx.warn(format!("slow-decay regime: sigma = {} < {}", a.sigma, fourier::SLOW_DECAY_SIGMA));
    }
    let probe = QTildeFunction::new(a.sigma, a.mode, Q_PROBE_RANGE)?;
    let tail_tol = a.tail_tol;
    let (mut grid, d) = density(
        ctx,
        &probe,
        |x_max| Ok(Box::new(QTildeFunction::for_grid(a.sigma, a.mode, x_max, tail_tol)?.0)),
        &a.grid,
    )?;
    let (f, tail) = QTildeFunction::for_grid(a.sigma, a.mode, grid.x_max, tail_tol)?;
    grid.metadata.insert("max_abs_tail_error".into(), json!(tail));
    if tail > tail_tol {
        ctx.warn(format!("Euler-product tail error {tail:e} on the grid exceeds tail-tol {tail_tol:e}"));
    }
    write_density(ctx, &a.name, &grid, &d)?;
    if a.check_real {
        eprintln!("check-real: max imaginary residue = {:e}", d.max_imag_residue);
        if !(d.max_imag_residue < 1e-8) {
            return Err(Error::Numeric(format!("imaginary residue {:e} is not below 1e-8", d.max_imag_residue)));
        }
    }
    if !a.x.is_empty() {
        let mut values = Vec::new();
        for &x in &a.x {
            let v = q_tilde(a.sigma, x, a.tail_tol, a.mode)?;
            if !v.within_tolerance {
                ctx.warn(format!("q_tilde at x = {x}: tail error {:e} above tail-tol", v.tail_error));
            }
            values.push(v.value);
        }
        write_points(ctx, &a.name, &a.x, values, f.metadata())?;
    }
    Ok(())
}

fn write_report(ctx: &mut Context, name: &str, kind: &str, r: &ComparisonReport) -> Result<()> {
    let cfg = ctx.config.clone();
    ctx.emit(name, kind, &cfg, || io::report_csv(r, &cfg), r)?;
    eprintln!("{kind}: max discrepancy = {:e}, excluded = {}", r.max_discrepancy(), r.excluded_count);
    Ok(())
}

fn default_grid() -> GridArgs {
    GridArgs { x_max: None, tol: 1e-8, n_points: None, u_min: -8.0, u_max: 8.0, n_u: 2001 }
}

fn histogram_grid(b: &BinArgs) -> GridArgs {
    let mut g = default_grid();
    g.u_min = g.u_min.min(b.u_min);
    g.u_max = g.u_max.max(b.u_max);
    g
}

pub fn dirichlet(ctx: &mut Context, a: &DirichletArgs) -> Result<()> {
    check_sigma(a.sigma)?;
    check_y(a.y)?;
    check_x(&a.x)?;
    check_bins(&a.histogram)?;
    if a.q < 5 || !primes::is_prime(a.q) {
        return invalid(format!("q must be a prime ≥ 5, got {}", a.q));
    }
    if a.y >= a.q as f64 {
        return invalid(format!("y = {} must be below q = {}", a.y, a.q));
    }
    if a.full_l && a.q > averages::FULL_L_MAX_Q {
        return invalid(format!("full-l needs q ≤ {}", averages::FULL_L_MAX_Q));
    }
    let r = averages::compare_dirichlet(a.q, a.sigma, &a.x, a.y)?;
    write_report(ctx, &a.name, "report", &r)?;
    if a.histogram.bins > 0 {
        let family = if a.full_l {
            ctx.warn(format!(
                "full-l histogram is compared with the y = {} density; the limit theorem ties y to q as {}",
                a.y,
                averages::theorem_y(a.q)
            ));
            HistogramFamily::DirichletFullL { q: a.q }
        } else {
            HistogramFamily::Dirichlet { q: a.q, y: a.y }
        };
        let f = MTildeFunction::new(a.sigma, a.y)?;
        let g = histogram_grid(&a.histogram);
        let (_, d) = density(ctx, &f, |_| Ok(Box::new(MTildeFunction::new(a.sigma, a.y)?)), &g)?;
        let edges = averages::uniform_edges(a.histogram.u_min, a.histogram.u_max, a.histogram.bins);
        let h = averages::compare_histogram(family, a.sigma, &edges, &d)?;
        write_report(ctx, &a.name, "histogram", &h)?;
    }
    Ok(())
}

pub fn quadratic(ctx: &mut Context, a: &QuadraticArgs) -> Result<()> {
    check_sigma(a.sigma)?;
    check_x(&a.x)?;
    check_bins(&a.histogram)?;
    if a.big_y < 1000 {
        return invalid(format!("Y must be at least 1000, got {}", a.big_y));
    }
    if !(a.tail_tol > 0.0) {
        return invalid(format!("tail-tol must be positive, got {}", a.tail_tol));
    }
    if let Some(s) = a.smoothing {
        if !(s > 1.0) {
            return invalid(format!("X must exceed 1, got {s}"));
        }
    }
    let via = match a.via {
        ViaArg::Oracle => Via::Oracle,
        ViaArg::Series => Via::SmoothedSeries { smoothing: a.smoothing },
    };
    let r = averages::compare_quadratic(a.big_y, a.sigma, &a.x, a.mode, via, a.tail_tol)?;
    if !r.excluded.is_empty() {
        eprintln!("excluded discriminants: {:?}", r.excluded);
    }
    write_report(ctx, &a.name, "report", &r)?;
    if a.histogram.bins > 0 {
        let probe = QTildeFunction::new(a.sigma, a.mode, Q_PROBE_RANGE)?;
        let g = histogram_grid(&a.histogram);
        let (_, d) = density(ctx, &probe, |x_max| Ok(Box::new(QTildeFunction::new(a.sigma, a.mode, x_max)?)), &g)?;
        let edges = averages::uniform_edges(a.histogram.u_min, a.histogram.u_max, a.histogram.bins);
        let family = HistogramFamily::Quadratic { y: a.big_y, mode: a.mode };
        let h = averages::compare_histogram(family, a.sigma, &edges, &d)?;
        write_report(ctx, &a.name, "histogram", &h)?;
    }
    Ok(())
}

pub fn torus(ctx: &mut Context, a: &TorusArgs) -> Result<()> {
    check_sigma(a.sigma)?;
    check_y(a.y)?;
    check_x(&a.x)?;
    check_bins(&a.histogram)?;
    if a.samples < averages::MIN_SAMPLES {
        return invalid(format!("samples must be at least {}, got {}", averages::MIN_SAMPLES, a.samples));
    }
    let r = averages::compare_torus(a.sigma, a.y, &a.x, a.samples, a.seed)?;
    write_report(ctx, &a.name, "report", &r)?;
    if a.histogram.bins > 0 {
        let f = MTildeFunction::new(a.sigma, a.y)?;
        let g = histogram_grid(&a.histogram);
        let (_, d) = density(ctx, &f, |_| Ok(Box::new(MTildeFunction::new(a.sigma, a.y)?)), &g)?;
        let edges = averages::uniform_edges(a.histogram.u_min, a.histogram.u_max, a.histogram.bins);
        let family = HistogramFamily::Torus { y: a.y, samples: a.samples, seed: a.seed };
        let h = averages::compare_histogram(family, a.sigma, &edges, &d)?;
        write_report(ctx, &a.name, "histogram", &h)?;
    }
    Ok(())
}

pub fn discriminants(ctx: &mut Context, a: &DiscriminantsArgs) -> Result<()> {
    if a.big_y < 3 {
        return invalid(format!("Y must be at least 3, got {}", a.big_y));
    }
    if let Some(s) = a.sigma {
        check_sigma(s)?;
        if !(a.dagger_step > 0.0) {
            return invalid(format!("dagger-step must be positive, got {}", a.dagger_step));
        }
    }
    let mut set = enumerate_fundamental_discriminants(a.big_y);
    if let Some(s) = a.sigma {
        lfunc::apply_dagger(&mut set, s, a.dagger_step)?;
        let ex = set.excluded();
        eprintln!("positivity filter at sigma = {s}: {} of {} excluded {:?}", ex.len(), set.len(), ex);
    }
    let cfg = ctx.config.clone();
    let payload: Vec<_> =
        set.discriminants.iter().zip(&set.dagger_flags).map(|(d, f)| json!({"D": d, "dagger_flag": f})).collect();
    let payload = json!({"count": set.len(), "discriminants": payload});
    ctx.emit(&a.name, "discriminants", &cfg, || io::discriminants_csv(&set, &cfg), &payload)
}
