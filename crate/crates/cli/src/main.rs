//! `cone-cf` command-line driver.
//!
//! Exit status: 0 on success, 1 when a check or experiment fails, 2 on usage
//! or configuration errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use cone_cf::contfrac::{cf_general_convergents, to_ordinary, ConvergentTrace, UnitFraction};
use cone_cf::exec::Execution;
use cone_cf::harness::{run_convergence_experiment, run_identity_suite, ExperimentConfig};
use cone_cf::io::{fmt_f64, read_sequence, SampleDump, SampleHeader};
use cone_cf::jordan::frob_norm;
use cone_cf::randmat::{sample_beta2, sample_wishart, Beta2Params, RngStream};
use cone_cf::SymMatrix;

const EQUIV_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "cone-cf",
    version,
    about = "Continued fractions on the positive-definite cone"
)]
struct Cli {
    /// Run batch workloads on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Dist {
    Wishart,
    Beta2,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the convergents of a continued fraction from a JSON file.
    Eval {
        file: PathBuf,
        /// Number of levels (default: all).
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Also write the convergence trace CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Compare a continued fraction with its ordinary equivalent.
    Equiv {
        file: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Randomized verification of the algebraic identities.
    Identities {
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Monte Carlo convergence experiment with beta-II partial numerators.
    Mc {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        a2: f64,
        #[arg(long, default_value_t = 2)]
        period: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 100)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        /// Per-(trial, k) CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Summary JSON file; the summary is always printed to stdout.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Draw Wishart or beta-II samples.
    Sample {
        #[arg(long, value_enum)]
        dist: Dist,
        #[arg(long)]
        p: f64,
        /// Second beta-II shape.
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Invalid input or configuration; exit status 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<E: std::fmt::Display>(e: E) -> anyhow::Error {
    UsageError(e.to_string()).into()
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn entry_header(r: usize) -> String {
    (1..=r)
        .flat_map(|i| (1..=r).map(move |j| format!("m{i}{j}")))
        .collect::<Vec<_>>()
        .join(",")
}

fn entry_row(m: &SymMatrix) -> String {
    m.as_slice()
        .iter()
        .map(|&v| fmt_f64(v))
        .collect::<Vec<_>>()
        .join(",")
}

fn depth_or_len(depth: Option<usize>, len: usize) -> Result<usize> {
    match depth {
        None => Ok(len),
        Some(d) if (1..=len).contains(&d) => Ok(d),
        Some(d) => Err(usage(format!("depth {d} outside 1..={len}"))),
    }
}

fn eval(file: &Path, depth: Option<usize>, format: Format, trace: Option<&Path>) -> Result<bool> {
    let seq = read_sequence(file).map_err(usage)?;
    let n = depth_or_len(depth, seq.len())?;
    let values = cf_general_convergents(&seq, n)?;
    let mut out = sink(None)?;
    match format {
        Format::Csv => {
            writeln!(out, "k,{}", entry_header(seq.r()))?;
            for (k, v) in values.iter().enumerate() {
                writeln!(out, "{},{}", k + 1, entry_row(v))?;
            }
        }
        Format::Json => {
            let rows: Vec<_> = values
                .iter()
                .enumerate()
                .map(|(k, v)| serde_json::json!({ "k": k + 1, "value": v }))
                .collect();
            serde_json::to_writer_pretty(&mut out, &serde_json::json!({ "convergents": rows }))?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    if let Some(path) = trace {
        let t = if seq.is_unit() {
            ConvergentTrace::for_unit(&UnitFraction::new(seq.xs().to_vec())?, n)?
        } else {
            ConvergentTrace::for_general(&seq, n)?
        };
        let mut w = sink(Some(path))?;
        t.write_csv(&mut w)?;
        w.flush()?;
    }
    Ok(true)
}

fn equiv(file: &Path, depth: Option<usize>) -> Result<bool> {
    let seq = read_sequence(file).map_err(usage)?;
    let n = depth_or_len(depth, seq.len())?;
    let direct = cf_general_convergents(&seq, n)?;
    let ordinary = to_ordinary(&seq)?;
    let mut worst: f64 = 0.0;
    for (k, d) in direct.iter().enumerate() {
        let o = ordinary.convergent(k + 1)?;
        worst = worst.max(frob_norm(&(&o - d)) / frob_norm(d).max(f64::MIN_POSITIVE));
    }
    let passed = worst <= EQUIV_TOL;
    let report = serde_json::json!({
        "depth": n,
        "max_rel_deviation": worst,
        "tol": EQUIV_TOL,
        "passed": passed,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(passed)
}

fn identities(
    rank: usize,
    cases: usize,
    seed: u64,
    format: Format,
    exec: Execution,
) -> Result<bool> {
    let report = run_identity_suite(rank, cases, seed, exec).map_err(usage)?;
    let mut out = sink(None)?;
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "name,tol,gating,cases,skipped,failures,worst")?;
            for s in &report.identities {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    s.name,
                    fmt_f64(s.tol),
                    s.gating,
                    s.cases,
                    s.skipped,
                    s.failures,
                    fmt_f64(s.worst)
                )?;
            }
        }
    }
    out.flush()?;
    Ok(report.passed)
}

fn mc(
    cfg: ExperimentConfig,
    out: Option<&Path>,
    summary: Option<&Path>,
    exec: Execution,
) -> Result<bool> {
    let result = run_convergence_experiment(&cfg, exec).map_err(usage)?;
    if let Some(path) = out {
        let mut w = sink(Some(path))?;
        result.write_csv(&mut w)?;
        w.flush()?;
    }
    let json = result.summary_json()?;
    if let Some(path) = summary {
        std::fs::write(path, format!("{json}\n"))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{json}");
    for t in result.trials.iter().filter(|t| t.error.is_some()) {
        eprintln!(
            "trial {}: {}",
            t.trial_id,
            t.error.as_deref().unwrap_or_default()
        );
    }
    Ok(result.clean())
}

#[allow(clippy::too_many_arguments)]
fn sample(
    dist: Dist,
    p: f64,
    q: Option<f64>,
    rank: usize,
    n: usize,
    seed: u64,
    format: Format,
    out: Option<&Path>,
    exec: Execution,
) -> Result<bool> {
    let root = RngStream::new(seed);
    let (name, q) = match dist {
        Dist::Wishart => {
            if q.is_some() {
                return Err(usage("--q applies to beta2 only"));
            }
            sample_wishart(p, rank, &mut root.split(0)).map_err(usage)?;
            ("wishart", None)
        }
        Dist::Beta2 => {
            let q = q.ok_or_else(|| usage("beta2 needs --q"))?;
            Beta2Params::new(p, q, rank).map_err(usage)?;
            ("beta2", Some(q))
        }
    };
    let samples = exec
        .map_indexed(n, |i| {
            let mut rng = root.split(i as u64);
            match q {
                None => sample_wishart(p, rank, &mut rng),
                Some(q) => sample_beta2(&Beta2Params::new(p, q, rank)?, &mut rng),
            }
            .map(|c| c.into_sym())
        })
        .into_iter()
        .collect::<cone_cf::Result<Vec<_>>>()?;
    let mut w = sink(out)?;
    match format {
        Format::Json => {
            let dump = SampleDump {
                header: SampleHeader {
                    dist: name.into(),
                    p,
                    q,
                    r: rank,
                    seed,
                    n,
                },
                samples,
            };
            serde_json::to_writer(&mut w, &dump)?;
            writeln!(w)?;
        }
        Format::Csv => {
            writeln!(w, "index,{}", entry_header(rank))?;
            for (i, m) in samples.iter().enumerate() {
                writeln!(w, "{},{}", i, entry_row(m))?;
            }
        }
    }
    w.flush()?;
    Ok(true)
}

fn run(cli: Cli) -> Result<bool> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match cli.command {
        Command::Eval {
            file,
            depth,
            format,
            trace,
        } => eval(&file, depth, format, trace.as_deref()),
        Command::Equiv { file, depth } => equiv(&file, depth),
        Command::Identities {
            rank,
            cases,
            seed,
            format,
        } => identities(rank, cases, seed, format, exec),
        Command::Mc {
            rank,
            b,
            a,
            a2,
            period,
            trials,
            depth,
            seed,
            eps,
            out,
            summary,
        } => {
            let cfg =
                ExperimentConfig::alternating(rank, b, a, a2, period, trials, depth, seed, eps)
                    .map_err(usage)?;
            mc(cfg, out.as_deref(), summary.as_deref(), exec)
        }
        Command::Sample {
            dist,
            p,
            q,
            rank,
            n,
            seed,
            format,
            out,
        } => sample(dist, p, q, rank, n, seed, format, out.as_deref(), exec),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
