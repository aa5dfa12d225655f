#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;

use args::{Cli, Command, EmpiricalCommand};
use clap::Parser;
use commands::Context;
use serde::Serialize;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};
use valdist_core::fourier::Metadata;
use valdist_core::Error;

fn exit_code(e: &Error) -> u8 {
    match e {
        e if e.is_validation() => 2,
        Error::Io(_) => 3,
        _ => 4,
    }
}

fn as_metadata<T: Serialize>(v: &T) -> Metadata {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::Object(m)) => m.into_iter().collect(),
        _ => Metadata::new(),
    }
}

/// Resolved configuration embedded in every output, minus execution details
/// (`threads`, `out-dir`) that must not change the bytes of the results.
fn resolved(cli: &Cli) -> Metadata {
    let (command, mut m) = match &cli.command {
        Command::Mdensity(a) => ("mdensity", as_metadata(a)),
        Command::Qdensity(a) => ("qdensity", as_metadata(a)),
        Command::Empirical(EmpiricalCommand::Dirichlet(a)) => ("empirical dirichlet", as_metadata(a)),
        Command::Empirical(EmpiricalCommand::Quadratic(a)) => ("empirical quadratic", as_metadata(a)),
        Command::Empirical(EmpiricalCommand::Torus(a)) => ("empirical torus", as_metadata(a)),
        Command::Discriminants(a) => ("discriminants", as_metadata(a)),
    };
    // flattened argument groups are flat flags on the command line too
    let nested: Vec<String> = m.iter().filter(|(_, v)| v.is_object()).map(|(k, _)| k.clone()).collect();
    for k in nested {
        if let Some(serde_json::Value::Object(inner)) = m.remove(&k) {
            m.extend(inner);
        }
    }
    m.insert("command".into(), serde_json::json!(command));
    m.insert("format".into(), serde_json::to_value(cli.format).unwrap_or_default());
    m.insert("version".into(), serde_json::json!(env!("CARGO_PKG_VERSION")));
    m
}

#[cfg(feature = "parallel")]
fn configure_threads(n: usize) -> valdist_core::Result<()> {
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_n: usize) -> valdist_core::Result<()> {
    Ok(())
}

fn run(cli: &Cli) -> valdist_core::Result<Context> {
    configure_threads(cli.threads)?;
    std::fs::create_dir_all(&cli.out_dir)?;
    let mut ctx = Context {
        out_dir: cli.out_dir.clone(),
        format: cli.format,
        config: resolved(cli),
        written: Vec::new(),
        warnings: Vec::new(),
    };
    let started = Instant::now();
    let name = match &cli.command {
        Command::Mdensity(a) => {
            commands::mdensity(&mut ctx, a)?;
            &a.name
        }
        Command::Qdensity(a) => {
            commands::qdensity(&mut ctx, a)?;
            &a.name
        }
        Command::Empirical(EmpiricalCommand::Dirichlet(a)) => {
            commands::dirichlet(&mut ctx, a)?;
            &a.name
        }
        Command::Empirical(EmpiricalCommand::Quadratic(a)) => {
            commands::quadratic(&mut ctx, a)?;
            &a.name
        }
        Command::Empirical(EmpiricalCommand::Torus(a)) => {
            commands::torus(&mut ctx, a)?;
            &a.name
        }
        Command::Discriminants(a) => {
            commands::discriminants(&mut ctx, a)?;
            &a.name
        }
    };
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let sidecar = serde_json::json!({
        "timestamp_unix": timestamp,
        "elapsed_seconds": started.elapsed().as_secs_f64(),
        "threads": cli.threads,
        "outputs": ctx.written,
        "warnings": ctx.warnings,
    });
    let path = ctx.out_dir.join(format!("{name}.sidecar.json"));
    valdist_core::io::write_file(&path, &format!("{}\n", serde_json::to_string_pretty(&sidecar)?))?;
    Ok(ctx)
}

fn main() -> ExitCode {
    let argv = match config::expand_args(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(ctx) => {
            for p in &ctx.written {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
