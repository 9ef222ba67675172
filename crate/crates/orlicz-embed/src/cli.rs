//! Argument parsing, dispatch and exit codes.
//!
//! Exit codes: 0 when every asserted constant holds, 1 when one fails, 2 for
//! usage and domain errors, 3 when an exact enumeration would exceed its cap.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use orlicz_embed_core::average::{Mode, Plan};
use orlicz_embed_core::construct::y_from_m;
use orlicz_embed_core::embed::{distortion_on, measure_distortion, DistortionReport, Matrix};
use orlicz_embed_core::{Error, Exponents, OrliczFunction, WeightVector};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{caps_from_env, parse_list, RunConfig};
use crate::construct::{self, Object};
use crate::report::{emit, render_csv, render_json, Format, Table};
use crate::suites::{self, Statement};
use crate::Threaded;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Matrices sampled by `distortion` unless `--samples` is given.
pub const DEFAULT_DISTORTION_SAMPLES: usize = 100;

#[derive(Debug, Parser)]
#[command(name = "orlicz-embed", version, about = "Numerical checks of Orlicz-norm inequalities and an L1 embedding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one inequality suite and report its constants.
    Verify {
        #[arg(value_enum)]
        lemma: Statement,
    },
    /// Build and print one object.
    Construct {
        #[arg(value_enum)]
        what: Object,
    },
    /// Measure the spread of the embedding over random directions.
    Distortion,
}

#[derive(Debug, Args)]
pub struct Options {
    /// Dimension; suites sweep their default sizes when absent.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Option<u64>,
    /// Outer exponent.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Inner exponent.
    #[arg(long, global = true)]
    pub r: Option<f64>,
    /// Root seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo samples per average (for `distortion`: matrices sampled).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: Option<u64>,
    /// exact, mc or auto.
    #[arg(long, global = true, default_value = "auto")]
    pub mode: Mode,
    /// Worker threads; 0 means one per CPU. Output does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Grid points per function for `eq1`.
    #[arg(long, global = true, default_value_t = 100, value_parser = clap::value_parser!(u64).range(2..))]
    pub grid: u64,
    /// Orlicz function, `power:p` or `power:p:scale`.
    #[arg(long = "M", global = true)]
    pub m: Option<OrliczFunction>,
    /// Comma-separated nonincreasing positive weights.
    #[arg(long, global = true)]
    pub a: Option<String>,
    /// JSON file with one matrix (2-D array) or several (3-D array).
    #[arg(long, global = true)]
    pub matrix: Option<PathBuf>,
    /// Permutation samples for the sampled L1 averages.
    #[arg(long, global = true, default_value_t = 500_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub perm_samples: u64,
    /// Random instances per suite and size.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub instances: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("cannot read matrix file: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Resource(_)) => EXIT_RESOURCE,
            CliError::Core(Error::Invariant(_)) => EXIT_FAIL,
            _ => EXIT_USAGE,
        }
    }
}

impl Options {
    pub fn config(&self) -> Result<RunConfig, CliError> {
        Ok(RunConfig {
            n: self.n.map(|n| n as usize),
            p: self.p,
            r: self.r,
            seed: self.seed,
            samples: self.samples,
            mode: self.mode,
            threads: self.threads,
            out: self.out.clone(),
            format: self.format,
            grid: self.grid as usize,
            m: self.m.clone(),
            a: self.a.as_deref().map(parse_list).transpose()?,
            matrix: self.matrix.clone(),
            perm_samples: self.perm_samples,
            instances: self.instances.map(|k| k as usize),
            caps: caps_from_env()?,
        })
    }
}

#[derive(Serialize)]
struct DistortionOutput<'a> {
    object: &'static str,
    params: Map<String, Value>,
    #[serde(flatten)]
    report: &'a DistortionReport,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    let cfg = cli.opts.config()?;
    let exec = Threaded::new(cfg.threads);
    let out = cfg.out.as_deref();
    match &cli.command {
        Command::Verify { lemma } => {
            let rep = suites::run(*lemma, &cfg, &exec)?;
            write(&rep, &rep.table, cfg.format, out)?;
            eprintln!("{}: {}", lemma.id(), if rep.pass { "PASS" } else { "FAIL" });
            Ok(if rep.pass { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Construct { what } => {
            let pass = match what {
                Object::OrliczFromA => {
                    let c = construct::orlicz_from_a(&cfg)?;
                    write(&c, &c.table, cfg.format, out)?;
                    c.pass
                }
                Object::YFromM => {
                    let c = construct::y_from_function(&cfg)?;
                    write(&c, &c.table, cfg.format, out)?;
                    c.pass
                }
                Object::Psi => {
                    let c = construct::psi(&cfg)?;
                    write(&c, &c.table, cfg.format, out)?;
                    c.pass
                }
            };
            Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Distortion => {
            let rep = distortion(&cfg, &exec)?;
            let mut table = Table::new(&["sample_index", "matrix_norm", "l1_norm", "ratio"]);
            for s in &rep.samples {
                table.push(vec![s.index as f64, s.matrix_norm, s.l1_norm, s.ratio]);
            }
            let full = DistortionOutput {
                object: "distortion",
                params: cfg.params(),
                report: &rep,
            };
            write(&full, &table, cfg.format, out)?;
            eprintln!(
                "{}: {} (n = {}, {} samples); lower bound context {}",
                rep.label,
                crate::report::fmt_number(rep.distortion),
                rep.n,
                rep.sample_count,
                crate::report::fmt_number(rep.lower_bound)
            );
            Ok(if rep.distortion.is_finite() { EXIT_PASS } else { EXIT_FAIL })
        }
    }
}

fn write(value: &impl Serialize, table: &Table, format: Format, out: Option<&std::path::Path>) -> Result<(), CliError> {
    let text = match format {
        Format::Json => render_json(value),
        Format::Csv => render_csv(table),
    };
    Ok(emit(&text, out)?)
}

pub fn distortion(cfg: &RunConfig, exec: &Threaded) -> Result<DistortionReport, CliError> {
    let e = Exponents::embedding(cfg.p.unwrap_or(1.5), cfg.r.unwrap_or(1.8))?;
    let given = match &cfg.matrix {
        Some(path) => Some(read_matrices(path)?),
        None => None,
    };
    let n = cfg
        .n
        .or_else(|| given.as_ref().and_then(|m| m.first().map(Matrix::n)))
        .unwrap_or(2);
    let y = match &cfg.a {
        Some(a) => WeightVector::new(a.clone())?,
        None => y_from_m(&cfg.function_or(OrliczFunction::power(1.3)?), n)?,
    };
    if y.len() != n {
        return Err(Error::Domain(format!("--a has {} entries but n = {n}", y.len())).into());
    }
    let plan = Plan {
        mode: cfg.mode,
        samples: cfg.perm_samples,
        seed: cfg.seed,
        caps: cfg.caps,
    };
    let rep = match given {
        Some(ms) => distortion_on(exec, &e, &y, &ms, cfg.seed, &plan)?,
        None => {
            let samples = cfg.samples.map_or(DEFAULT_DISTORTION_SAMPLES, |s| s as usize);
            measure_distortion(exec, &e, &y, samples, cfg.seed, &plan)?
        }
    };
    Ok(rep)
}

/// A 2-D array is one matrix, a 3-D array a list of them.
pub fn read_matrices(path: &std::path::Path) -> Result<Vec<Matrix>, CliError> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    let is_3d = v
        .as_array()
        .and_then(|rows| rows.first())
        .and_then(Value::as_array)
        .and_then(|row| row.first())
        .is_some_and(Value::is_array);
    let raw: Vec<Vec<Vec<f64>>> = if is_3d {
        serde_json::from_value(v)?
    } else {
        vec![serde_json::from_value(v)?]
    };
    let ms = raw.into_iter().map(Matrix::new).collect::<Result<Vec<_>, _>>()?;
    if let Some(first) = ms.first() {
        if ms.iter().any(|m| m.n() != first.n()) {
            return Err(Error::Domain("matrices in the file differ in size".into()).into());
        }
    }
    Ok(ms)
}
