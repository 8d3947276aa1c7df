//! The `zk` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kernel::{corr_det, format_number, kernel_matrix, Gauge, Method};
use crate::oracle::{brute_corr, ensemble_brute_corr, sample, Family};
use crate::partitions::{HalfInt, Partition};
use crate::psi::{psi, psi_contour, QuadratureConfig};
use crate::specfun::{KrawtchoukParams, MeixnerParams};
use crate::verify::{run_suite, Overrides};
use crate::zmeasure::{weight, ZParams};

/// Exit code for malformed arguments or parameters.
pub const EXIT_USAGE: i32 = 2;
/// Exit code for failed checks and runtime errors.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "zk", version, about = "z-measures on partitions and their correlation kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Weight of one diagram.
    Weight {
        #[command(flatten)]
        params: ParamArgs,
        /// Row lengths, e.g. "3,1,1"; empty for the empty diagram.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        lambda: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// One value of the eigenbasis function psi_a(x).
    Psi {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_hyphen_values = true)]
        a: HalfInt,
        #[arg(long, allow_hyphen_values = true)]
        x: HalfInt,
        /// Evaluate through the contour integral instead of the series.
        #[arg(long)]
        contour: bool,
        #[command(flatten)]
        quad: QuadArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Kernel matrix on a point set.
    Kernel {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        points: PointArgs,
        #[arg(long, default_value = "series")]
        method: Method,
        #[arg(long, default_value = "underlined")]
        gauge: Gauge,
        #[command(flatten)]
        quad: QuadArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Correlation function of a point set.
    Corr {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        points: PointArgs,
        /// A kernel method, or "brute" for direct summation over diagrams.
        #[arg(long, default_value = "series")]
        method: CorrMethod,
        #[arg(long, default_value = "underlined")]
        gauge: Gauge,
        /// Largest diagram size summed by the brute method.
        #[arg(long, default_value_t = 30)]
        nmax: usize,
        #[command(flatten)]
        quad: QuadArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Correlation function of a Meixner or Krawtchouk ensemble by enumeration.
    Ensemble {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Number of particles.
        #[arg(long = "particles")]
        particles: u32,
        /// Meixner shape parameter.
        #[arg(long)]
        beta: Option<f64>,
        /// Meixner parameter in (0, 1).
        #[arg(long)]
        xi: Option<f64>,
        /// Krawtchouk success probability.
        #[arg(long)]
        p: Option<f64>,
        /// Krawtchouk support size minus one.
        #[arg(long = "support")]
        support: Option<u32>,
        /// Nonnegative integer points, comma separated.
        #[arg(long, value_delimiter = ',')]
        points: Vec<u32>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exact draws from the measure.
    Sample {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 30)]
        nmax: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Runs the identity checks and prints one line per check.
    Verify {
        /// partitions, specfun, zmeasure, psi, kernel, oracle or all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Tolerance override, as name=value; repeatable.
        #[arg(long = "tol", value_parser = parse_override)]
        tol: Vec<(String, f64)>,
        /// Machine-readable output instead of the table.
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kernel values on a rectangle of lattice points, for plotting.
    Grid {
        #[command(flatten)]
        params: ParamArgs,
        /// Range of x as "lo,hi".
        #[arg(long = "x-range", allow_hyphen_values = true)]
        x_range: String,
        /// Range of y as "lo,hi"; defaults to the x range.
        #[arg(long = "y-range", allow_hyphen_values = true)]
        y_range: Option<String>,
        #[arg(long, default_value = "series")]
        method: Method,
        #[arg(long, default_value = "underlined")]
        gauge: Gauge,
        #[command(flatten)]
        quad: QuadArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// Complex parameter z as "a+bi".
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    z: Complex64,
    /// Complex parameter z' as "a+bi".
    #[arg(long = "zp", value_parser = parse_complex, allow_hyphen_values = true)]
    zp: Complex64,
    #[arg(long, allow_hyphen_values = true)]
    xi: f64,
}

impl ParamArgs {
    fn build(&self) -> Result<ZParams> {
        ZParams::new(self.z, self.zp, self.xi)
    }
}

#[derive(Debug, Args)]
struct PointArgs {
    /// Half-integer points, comma separated, e.g. "-0.5,1.5".
    #[arg(long, allow_hyphen_values = true)]
    points: String,
}

impl PointArgs {
    fn parse(&self) -> Result<Vec<HalfInt>> {
        parse_points(&self.points)
    }
}

#[derive(Debug, Args)]
struct QuadArgs {
    /// Contour radius; defaults depend on the integral.
    #[arg(long)]
    radius: Option<f64>,
    /// Initial number of quadrature nodes.
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long = "max-doublings")]
    max_doublings: Option<u32>,
}

impl QuadArgs {
    fn build(&self, base: QuadratureConfig) -> Result<QuadratureConfig> {
        QuadratureConfig::new(
            self.radius.unwrap_or(base.radius()),
            self.nodes.unwrap_or(base.nodes()),
            self.max_doublings.unwrap_or(base.max_doublings()),
        )
    }
}

#[derive(Debug, Args)]
struct OutArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Meixner,
    Krawtchouk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CorrMethod {
    Brute,
    Kernel(Method),
}

impl FromStr for CorrMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "brute" {
            Ok(CorrMethod::Brute)
        } else {
            s.parse().map(CorrMethod::Kernel)
        }
    }
}

/// Parses "a+bi", "a-bi", "a", "bi" or "i".
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("cannot read {s:?} as a complex number a+bi"));
    let real = |v: &str| v.parse::<f64>().map_err(|_| bad());
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(real(&t)?, 0.0));
    };
    // the sign that starts the imaginary part, skipping exponent signs
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (real(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => real(v)?,
    };
    Ok(Complex64::new(re, im))
}

/// Parses a comma separated list of half-integers.
pub fn parse_points(s: &str) -> Result<Vec<HalfInt>> {
    s.split(',').map(|p| p.trim().parse()).collect()
}

fn parse_override(s: &str) -> std::result::Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or("expected name=value")?;
    let v: f64 = value.parse().map_err(|_| format!("bad tolerance {value:?}"))?;
    if !(v > 0.0) {
        return Err("tolerances must be positive".into());
    }
    Ok((name.to_string(), v))
}

fn parse_range(s: &str) -> Result<Vec<HalfInt>> {
    let ends = parse_points(s)?;
    match ends[..] {
        [lo, hi] if lo <= hi => Ok(HalfInt::range_inclusive(lo, hi).collect()),
        _ => Err(Error::Parse(format!("expected a range \"lo,hi\" with lo <= hi, got {s:?}"))),
    }
}

fn parse_lambda(s: &str) -> Result<Partition> {
    if s.trim().is_empty() {
        Ok(Partition::empty())
    } else {
        s.parse()
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameters(_) | Error::Parse(_) | Error::Config(_) | Error::Domain(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Caps the global thread pool at `ZK_THREADS` when set. Later calls in the
/// same process keep the first pool.
fn configure_threads() {
    if let Some(n) = std::env::var("ZK_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Runs the command line with process standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the command line, writing results and diagnostics to the given sinks.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    configure_threads();
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "zk: {e}");
            exit_code(&e)
        }
    }
}

/// Text of one command's output and the exit code it implies.
struct Output {
    text: String,
    code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    let (result, target) = match command {
        Command::Weight { params, lambda, out } => (cmd_weight(&params, &lambda, out.format), out),
        Command::Psi {
            params,
            a,
            x,
            contour,
            quad,
            out,
        } => (cmd_psi(&params, a, x, contour, &quad, out.format), out),
        Command::Kernel {
            params,
            points,
            method,
            gauge,
            quad,
            out,
        } => (cmd_kernel(&params, &points, method, gauge, &quad, out.format), out),
        Command::Corr {
            params,
            points,
            method,
            gauge,
            nmax,
            quad,
            out,
        } => (cmd_corr(&params, &points, method, gauge, nmax, &quad, out.format), out),
        Command::Ensemble {
            family,
            particles,
            beta,
            xi,
            p,
            support,
            points,
            out,
        } => (cmd_ensemble(family, particles, beta, xi, p, support, &points, out.format), out),
        Command::Sample {
            params,
            count,
            nmax,
            seed,
            out,
        } => (cmd_sample(&params, count, nmax, seed, out.format), out),
        Command::Verify { suite, tol, format, out } => (
            cmd_verify(&suite, tol, format),
            OutArgs {
                format: format.unwrap_or(Format::Json),
                out,
            },
        ),
        Command::Grid {
            params,
            x_range,
            y_range,
            method,
            gauge,
            quad,
            out,
        } => (cmd_grid(&params, &x_range, y_range.as_deref(), method, gauge, &quad, out.format), out),
    };
    let output = result?;
    match &target.out {
        Some(path) => fs::write(path, &output.text)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?,
        None => out
            .write_all(output.text.as_bytes())
            .map_err(|e| Error::Config(format!("cannot write output: {e}")))?,
    }
    Ok(output.code)
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("values serialize");
    s.push('\n');
    s
}

/// A flat record printed either as one JSON object or as a two-line CSV.
fn record(fields: &[(&str, Value)], format: Format) -> String {
    match format {
        Format::Json => {
            let map: serde_json::Map<String, Value> = fields.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
            to_json(&Value::Object(map))
        }
        Format::Csv => {
            let header: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
            let row: Vec<String> = fields.iter().map(|(_, v)| csv_cell(v)).collect();
            format!("{}\n{}\n", header.join(","), row.join(","))
        }
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("\"{}\"", items.iter().map(csv_cell).collect::<Vec<_>>().join(",")),
        other => other.to_string(),
    }
}

fn cmd_weight(params: &ParamArgs, lambda: &str, format: Format) -> Result<Output> {
    let prm = params.build()?;
    let lambda = parse_lambda(lambda)?;
    Ok(Output::ok(record(&[("weight", json!(weight(&prm, &lambda)))], format)))
}

fn cmd_psi(params: &ParamArgs, a: HalfInt, x: HalfInt, contour: bool, quad: &QuadArgs, format: Format) -> Result<Output> {
    let prm = params.build()?;
    let v = if contour {
        psi_contour(a, x, &prm, &quad.build(QuadratureConfig::single_contour())?)?
    } else {
        psi(a, x, &prm)?
    };
    Ok(Output::ok(record(
        &[("a", json!(a.value())), ("x", json!(x.value())), ("psi", json!(v))],
        format,
    )))
}

fn quadrature_for(method: Method, prm: &ZParams, quad: &QuadArgs) -> Result<QuadratureConfig> {
    let base = if method == Method::Contour {
        QuadratureConfig::double_contour(prm.xi())
    } else {
        QuadratureConfig::single_contour()
    };
    quad.build(base)
}

fn cmd_kernel(
    params: &ParamArgs,
    points: &PointArgs,
    method: Method,
    gauge: Gauge,
    quad: &QuadArgs,
    format: Format,
) -> Result<Output> {
    let prm = params.build()?;
    let q = quadrature_for(method, &prm, quad)?;
    let m = kernel_matrix(&points.parse()?, &prm, method, gauge, &q)?;
    Ok(Output::ok(match format {
        Format::Json => m.to_json() + "\n",
        Format::Csv => m.to_csv(),
    }))
}

#[allow(clippy::too_many_arguments)]
fn cmd_corr(
    params: &ParamArgs,
    points: &PointArgs,
    method: CorrMethod,
    gauge: Gauge,
    nmax: usize,
    quad: &QuadArgs,
    format: Format,
) -> Result<Output> {
    let prm = params.build()?;
    let pts = points.parse()?;
    let labels: Vec<Value> = pts.iter().map(|p| json!(p.value())).collect();
    let (name, value, tail) = match method {
        CorrMethod::Brute => {
            let r = brute_corr(&pts, &prm, nmax)?;
            ("brute".to_string(), r.value, r.tail_bound)
        }
        CorrMethod::Kernel(m) => {
            let q = quadrature_for(m, &prm, quad)?;
            (m.to_string(), corr_det(&pts, &prm, m, gauge, &q)?, 0.0)
        }
    };
    Ok(Output::ok(record(
        &[
            ("points", Value::Array(labels)),
            ("method", json!(name)),
            ("value", json!(value)),
            ("tail_bound", json!(tail)),
        ],
        format,
    )))
}

#[allow(clippy::too_many_arguments)]
fn cmd_ensemble(
    family: FamilyArg,
    particles: u32,
    beta: Option<f64>,
    xi: Option<f64>,
    p: Option<f64>,
    support: Option<u32>,
    points: &[u32],
    format: Format,
) -> Result<Output> {
    let missing = |flag: &str| Error::Config(format!("--{flag} is required for this family"));
    let fam = match family {
        FamilyArg::Meixner => Family::Meixner(MeixnerParams::new(
            beta.ok_or_else(|| missing("beta"))?,
            xi.ok_or_else(|| missing("xi"))?,
        )?),
        FamilyArg::Krawtchouk => Family::Krawtchouk(KrawtchoukParams::new(
            p.ok_or_else(|| missing("p"))?,
            support.ok_or_else(|| missing("support"))?,
        )?),
    };
    let r = ensemble_brute_corr(points, particles, &fam)?;
    Ok(Output::ok(record(
        &[
            ("points", json!(points)),
            ("value", json!(r.value)),
            ("tail_bound", json!(r.tail_bound)),
            ("support_max", json!(r.support_max)),
        ],
        format,
    )))
}

fn cmd_sample(params: &ParamArgs, count: usize, nmax: usize, seed: u64, format: Format) -> Result<Output> {
    let prm = params.build()?;
    let draws = sample(&prm, count, nmax, seed)?;
    Ok(Output::ok(match format {
        Format::Json => to_json(&serde_json::to_value(&draws).expect("records serialize")),
        Format::Csv => {
            let mut s = String::from("seed,index,n,partition\n");
            for d in &draws {
                s.push_str(&format!("{},{},{},\"{}\"\n", d.seed, d.index, d.n, d.partition));
            }
            s
        }
    }))
}

fn cmd_verify(suite: &str, tol: Vec<(String, f64)>, format: Option<Format>) -> Result<Output> {
    let overrides: Overrides = tol.into_iter().collect();
    let checks = run_suite(suite, &overrides)?;
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let text = match format {
        Some(Format::Json) => to_json(&serde_json::to_value(&checks).expect("checks serialize")),
        Some(Format::Csv) => {
            let mut s = String::from("suite,name,identity,tolerance,attained,pass\n");
            for c in &checks {
                s.push_str(&format!(
                    "{},{},\"{}\",{},{},{}\n",
                    c.suite,
                    c.name,
                    c.identity,
                    format_number(c.tolerance),
                    format_number(c.attained),
                    c.passed()
                ));
            }
            s
        }
        None => {
            let mut s: String = checks.iter().map(|c| format!("{c}\n")).collect();
            s.push_str(&format!("{} checks, {} failed\n", checks.len(), failed));
            s
        }
    };
    Ok(Output {
        text,
        code: if failed == 0 { 0 } else { EXIT_FAILURE },
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_grid(
    params: &ParamArgs,
    x_range: &str,
    y_range: Option<&str>,
    method: Method,
    gauge: Gauge,
    quad: &QuadArgs,
    format: Format,
) -> Result<Output> {
    let prm = params.build()?;
    let xs = parse_range(x_range)?;
    let ys = match y_range {
        Some(r) => parse_range(r)?,
        None => xs.clone(),
    };
    let mut all: Vec<HalfInt> = xs.iter().chain(&ys).copied().collect();
    all.sort();
    all.dedup();
    let q = quadrature_for(method, &prm, quad)?;
    let m = kernel_matrix(&all, &prm, method, gauge, &q)?;
    let index = |p: &HalfInt| all.binary_search(p).expect("point in union");
    let mut rows = Vec::with_capacity(xs.len() * ys.len());
    for x in &xs {
        for y in &ys {
            let (i, j) = (index(x), index(y));
            rows.push((*x, *y, m.entries[i][j], m.entries_im.as_ref().map(|im| im[i][j])));
        }
    }
    Ok(Output::ok(match format {
        Format::Csv => {
            let mut s = String::from(if m.is_complex() { "x,y,K,K_im\n" } else { "x,y,K\n" });
            for (x, y, k, k_im) in rows {
                s.push_str(&format!("{x},{y},{}", format_number(k)));
                if let Some(v) = k_im {
                    s.push_str(&format!(",{}", format_number(v)));
                }
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let cells: Vec<Value> = rows
                .into_iter()
                .map(|(x, y, k, k_im)| match k_im {
                    Some(v) => json!({"x": x.value(), "y": y.value(), "K": k, "K_im": v}),
                    None => json!({"x": x.value(), "y": y.value(), "K": k}),
                })
                .collect();
            to_json(&json!({"method": method.to_string(), "gauge": gauge, "cells": cells}))
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_formats() {
        assert_eq!(parse_complex("1+1i").unwrap(), Complex64::new(1.0, 1.0));
        assert_eq!(parse_complex("1-1i").unwrap(), Complex64::new(1.0, -1.0));
        assert_eq!(parse_complex("-0.5-2i").unwrap(), Complex64::new(-0.5, -2.0));
        assert_eq!(parse_complex("0.4").unwrap(), Complex64::new(0.4, 0.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("2.5i").unwrap(), Complex64::new(0.0, 2.5));
        assert_eq!(parse_complex("1e-3+2e+1i").unwrap(), Complex64::new(1e-3, 20.0));
        assert!(parse_complex("1+xi").is_err());
    }

    #[test]
    fn overrides_must_be_positive() {
        assert!(parse_override("a=1e-3").is_ok());
        assert!(parse_override("a=0").is_err());
        assert!(parse_override("a").is_err());
    }
}
