//! Plot-ready CSV tables and JSON documents.
//!
//! CSV files start with `# key=value` lines holding the resolved
//! configuration, followed by a header row. Numbers use the shortest
//! round-trip representation, so identical inputs give identical bytes.

use crate::averages::ComparisonReport;
use crate::characters::DiscriminantSet;
use crate::error::Result;
use crate::fourier::{DensityGrid, FourierGrid, Metadata};
use serde::Serialize;
use serde_json::json;
use std::fmt::Write as _;
use std::path::Path;

fn scalar(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn preamble(config: &Metadata, extra: &Metadata) -> String {
    let mut out = String::new();
    for (k, v) in config {
        let _ = writeln!(out, "# {k}={}", scalar(v));
    }
    for (k, v) in extra {
        let _ = writeln!(out, "# {k}={}", scalar(v));
    }
    out
}

/// `u,density` with ringing undershoot clamped to zero.
pub fn density_csv(d: &DensityGrid, config: &Metadata) -> String {
    let mut extra = Metadata::new();
    extra.insert("mass".into(), json!(d.mass));
    extra.insert("max_imag_residue".into(), json!(d.max_imag_residue));
    extra.insert("raw_min_value".into(), json!(d.min_value));
    extra.insert("values".into(), json!("presentation grid, negative values clamped to 0"));
    for (i, w) in d.warnings.iter().enumerate() {
        extra.insert(format!("warning_{i}"), json!(w));
    }
    let mut out = preamble(config, &extra);
    out.push_str("u,density\n");
    for (k, v) in d.presentation().iter().enumerate() {
        let _ = writeln!(out, "{},{}", d.u(k), v);
    }
    out
}

/// `x,re,im`.
pub fn fourier_csv(g: &FourierGrid, config: &Metadata) -> String {
    let mut out = preamble(config, &Metadata::new());
    out.push_str("x,re,im\n");
    for (j, v) in g.values.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", g.x(j), v.re, v.im);
    }
    out
}

/// Pointwise `x,re,im` values, e.g. of a characteristic function at requested points.
pub fn points_csv(xs: &[f64], values: &[num_complex::Complex64], config: &Metadata) -> String {
    let mut out = preamble(config, &Metadata::new());
    out.push_str("x,re,im\n");
    for (x, v) in xs.iter().zip(values) {
        let _ = writeln!(out, "{x},{},{}", v.re, v.im);
    }
    out
}

pub fn report_csv(r: &ComparisonReport, config: &Metadata) -> String {
    let mut extra = Metadata::new();
    extra.insert("family".into(), serde_json::to_value(r.family).unwrap_or_default());
    for (k, v) in &r.parameters {
        extra.insert(format!("report.{k}"), v.clone());
    }
    extra.insert("excluded_count".into(), json!(r.excluded_count));
    extra.insert("excluded".into(), json!(r.excluded));
    let mut out = preamble(config, &extra);
    out.push_str("point,empirical_re,empirical_im,reference_re,reference_im,discrepancy,stderr\n");
    for i in 0..r.points.len() {
        let se = r.standard_errors.as_ref().map(|s| s[i].to_string()).unwrap_or_default();
        let (e, f) = (r.empirical[i], r.reference[i]);
        let _ = writeln!(out, "{},{},{},{},{},{},{se}", r.points[i], e.re, e.im, f.re, f.im, r.discrepancies[i]);
    }
    out
}

/// `D,dagger_flag` with an empty flag where the filter was not run.
pub fn discriminants_csv(set: &DiscriminantSet, config: &Metadata) -> String {
    let mut extra = Metadata::new();
    extra.insert("count".into(), json!(set.len()));
    let mut out = preamble(config, &extra);
    out.push_str("D,dagger_flag\n");
    for (d, f) in set.discriminants.iter().zip(&set.dagger_flags) {
        let flag = f.map(|b| b.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{d},{flag}");
    }
    out
}

/// `{"config": …, "<kind>": payload}` pretty-printed with a trailing newline.
pub fn json_document<T: Serialize>(config: &Metadata, kind: &str, payload: &T) -> Result<String> {
    let mut doc = serde_json::Map::new();
    doc.insert("config".into(), serde_json::to_value(config)?);
    doc.insert(kind.into(), serde_json::to_value(payload)?);
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{handle, invert, sample_characteristic};
    use num_complex::Complex64;

    #[test]
    fn csv_layouts() {
        let f = handle(|x: f64| Complex64::new((-x * x).exp(), 0.0));
        let g = sample_characteristic(&f, 6.0, 129).unwrap();
        let mut cfg = Metadata::new();
        cfg.insert("sigma".into(), json!(1.5));
        cfg.insert("mode".into(), json!("logl"));
        let s = fourier_csv(&g, &cfg);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# mode=logl");
        assert_eq!(lines[1], "# sigma=1.5");
        assert_eq!(lines[2], "x,re,im");
        assert_eq!(lines.len(), 3 + 129);
        assert!(lines[3 + 64].starts_with("0,1,0"));
        let d = invert(&g, -2.0, 2.0, 11).unwrap();
        let s = density_csv(&d, &cfg);
        assert!(s.contains("\nu,density\n"));
        assert!(s.contains("# mass="));
        let j = json_document(&cfg, "density", &d).unwrap();
        let back: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(back["config"]["sigma"], json!(1.5));
        assert_eq!(back["density"]["n_points"], json!(11));
    }

    #[test]
    fn write_file_replaces_contents() {
        let dir = std::env::temp_dir().join(format!("valdist-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("a.csv");
        write_file(&p, "one\n").unwrap();
        write_file(&p, "two\n").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two\n");
        assert!(write_file(&dir.join("missing/a.csv"), "x").is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
