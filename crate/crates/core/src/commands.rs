//! The `balflow` command line: `solve`, `verify`, `gen` and `bench`.
//!
//! Exit codes: 0 success (optimal, or every check passed), 1 usage, parse or
//! runtime error, 2 infeasible instance, 3 a verification check failed.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::balanced::{Algorithm, SolveOptions, Status};
use crate::error::{Error, Result};
use crate::gen::{generate, FunctionKind, GenParams};
use crate::instance::{AlgorithmChoice, Instance};
use crate::rational::{format, parse, Rational};
use crate::report::{verify, ReportFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

pub const BENCH_HEADER: [&str; 7] = ["seed", "n", "m", "algorithm", "iterations", "sfm_calls", "sigma_star"];

#[derive(Parser, Debug)]
#[command(
    name = "balflow",
    version,
    about = "Minimum-spread submodular flows with exact certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance and write a report.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Auto)]
        algorithm: AlgorithmArg,
        /// Recover a primal flow attaining the optimum.
        #[arg(long)]
        emit_flow: bool,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Store the wall time in the report (makes reruns differ).
        #[arg(long)]
        record_time: bool,
    },
    /// Re-check a report against its instance.
    Verify { instance: PathBuf, report: PathBuf },
    /// Write a seeded random instance.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = KindArg::Cut)]
        kind: KindArg,
        /// Build the graph from directed cycles.
        #[arg(long)]
        eulerian: bool,
        /// Arc weight range `lo:hi` (positive rationals); unweighted when omitted.
        #[arg(long, value_parser = parse_rational_range)]
        weights: Option<(Rational, Rational)>,
        /// Integer range `lo:hi` for offsets and modular values.
        #[arg(long, value_parser = parse_int_range, default_value = "-3:3")]
        values: (i64, i64),
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve generated instances and tabulate iteration counts.
    Bench {
        /// Half-open seed range `a..b`.
        #[arg(long, value_parser = parse_seed_range, default_value = "0..10")]
        seeds: (u64, u64),
        /// Comma-separated sizes `NxM`.
        #[arg(long, value_delimiter = ',', value_parser = parse_size, default_value = "6x10")]
        sizes: Vec<(usize, usize)>,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "basic,improved,weighted")]
        algorithms: Vec<AlgorithmArg>,
        #[arg(long, value_enum, default_value_t = KindArg::Cut)]
        kind: KindArg,
        /// CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Auto,
    Eulerian,
    Basic,
    Improved,
    Weighted,
    Integral,
}

impl AlgorithmArg {
    fn choice(self) -> AlgorithmChoice {
        match self {
            AlgorithmArg::Auto => AlgorithmChoice::Auto,
            AlgorithmArg::Eulerian => AlgorithmChoice::Fixed(Algorithm::Eulerian),
            AlgorithmArg::Basic => AlgorithmChoice::Fixed(Algorithm::BasicXy),
            AlgorithmArg::Improved => AlgorithmChoice::Fixed(Algorithm::ImprovedXy),
            AlgorithmArg::Weighted => AlgorithmChoice::Fixed(Algorithm::Weighted),
            AlgorithmArg::Integral => AlgorithmChoice::Fixed(Algorithm::Integral),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Cut,
    Modular,
    PerturbedCut,
}

impl From<KindArg> for FunctionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Cut => FunctionKind::Cut,
            KindArg::Modular => FunctionKind::Modular,
            KindArg::PerturbedCut => FunctionKind::PerturbedCut,
        }
    }
}

fn split_pair<'a>(s: &'a str, sep: &str) -> std::result::Result<(&'a str, &'a str), String> {
    s.split_once(sep)
        .ok_or_else(|| format!("expected `lo{sep}hi`, got {s:?}"))
}

fn parse_rational_range(s: &str) -> std::result::Result<(Rational, Rational), String> {
    let (lo, hi) = split_pair(s, ":")?;
    Ok((
        parse(lo).map_err(|e| e.to_string())?,
        parse(hi).map_err(|e| e.to_string())?,
    ))
}

fn parse_int_range(s: &str) -> std::result::Result<(i64, i64), String> {
    let (lo, hi) = split_pair(s, ":")?;
    Ok((
        lo.trim().parse().map_err(|e| format!("{e}"))?,
        hi.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

fn parse_seed_range(s: &str) -> std::result::Result<(u64, u64), String> {
    let (lo, hi) = split_pair(s, "..")?;
    Ok((
        lo.trim().parse().map_err(|e| format!("{e}"))?,
        hi.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

fn parse_size(s: &str) -> std::result::Result<(usize, usize), String> {
    let (n, m) = split_pair(s, "x")?;
    Ok((
        n.trim().parse().map_err(|e| format!("{e}"))?,
        m.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Solve {
            instance,
            algorithm,
            emit_flow,
            out,
            record_time,
        } => cmd_solve(&instance, algorithm.choice(), emit_flow, out.as_deref(), record_time),
        Command::Verify { instance, report } => cmd_verify(&instance, &report),
        Command::Gen {
            seed,
            n,
            m,
            kind,
            eulerian,
            weights,
            values,
            out,
        } => {
            let mut p = GenParams::new(seed, n, m, kind.into())
                .eulerian(eulerian)
                .values(values.0, values.1);
            p.weight_range = weights;
            cmd_gen(&p, out.as_deref())
        }
        Command::Bench {
            seeds,
            sizes,
            algorithms,
            kind,
            out,
        } => {
            let algorithms: Vec<AlgorithmChoice> = algorithms.into_iter().map(AlgorithmArg::choice).collect();
            cmd_bench(seeds.0..seeds.1, &sizes, &algorithms, kind.into(), out.as_deref())
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Format(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Format(e.to_string())),
    }
}

pub fn cmd_solve(
    path: &Path,
    choice: AlgorithmChoice,
    emit_flow: bool,
    out: Option<&Path>,
    record_time: bool,
) -> Result<i32> {
    let instance = Instance::load(path)?;
    let opts = SolveOptions {
        emit_flow,
        ..SolveOptions::default()
    };
    let start = Instant::now();
    let report = instance.solve(choice, &opts)?;
    let elapsed = record_time.then(|| start.elapsed().as_millis() as u64);
    let status = report.status;
    let file = ReportFile::new(&instance, report, elapsed);
    write_output(out, &file.to_json())?;
    match status {
        Status::Optimal => {
            let r = &file.report;
            let sigma = r.sigma_star().map_or("-".into(), format);
            let kappa = r.kappa_star().map_or("-".into(), format);
            eprintln!("{}: optimal, sigma* = {sigma}, kappa* = {kappa}", r.algorithm.name());
            Ok(EXIT_OK)
        }
        Status::Infeasible => {
            let set = file.report.infeasible_set.map_or("?".into(), |x| x.to_string());
            eprintln!(
                "{}: infeasible, set {set} has no boundary and b < 0",
                file.report.algorithm.name()
            );
            Ok(EXIT_INFEASIBLE)
        }
    }
}

pub fn cmd_verify(instance: &Path, report: &Path) -> Result<i32> {
    let inst = Instance::load(instance)?;
    let file = ReportFile::load(report)?;
    let checks = verify(&inst, &file)?;
    let mut failed = Vec::new();
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        if !c.passed {
            failed.push(c.name);
        }
    }
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!("failed checks: {}", failed.join(", "));
        Ok(EXIT_CHECK_FAILED)
    }
}

pub fn cmd_gen(p: &GenParams, out: Option<&Path>) -> Result<i32> {
    write_output(out, &generate(p)?.to_json())?;
    Ok(EXIT_OK)
}

/// Iteration bound stated for an algorithm on `m` arcs, if any.
pub fn iteration_bound(algorithm: Algorithm, m: usize) -> Option<usize> {
    match algorithm {
        Algorithm::Eulerian => Some(m + 1),
        Algorithm::ImprovedXy => Some((m + 1) * (m + 1)),
        _ => None,
    }
}

/// One CSV row per (seed, size, applicable algorithm). Algorithms that do
/// not apply to a generated graph (Eulerian versus not) are skipped. Fails
/// after writing if any row exceeds its iteration bound.
pub fn cmd_bench(
    seeds: std::ops::Range<u64>,
    sizes: &[(usize, usize)],
    algorithms: &[AlgorithmChoice],
    kind: FunctionKind,
    out: Option<&Path>,
) -> Result<i32> {
    let csv_err = |e: csv::Error| Error::Format(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(BENCH_HEADER).map_err(csv_err)?;
    let mut violations = Vec::new();
    for seed in seeds {
        for &(n, m) in sizes {
            let inst = generate(&GenParams::new(seed, n, m, kind))?;
            for &choice in algorithms {
                let algorithm = inst.resolve(choice);
                let report = match inst.solve(choice, &SolveOptions::default()) {
                    Ok(r) => r,
                    Err(Error::NotEulerian | Error::EulerianInput) => continue,
                    Err(e) => return Err(e),
                };
                if iteration_bound(algorithm, m).is_some_and(|bound| report.iterations > bound) {
                    violations.push(format!(
                        "seed {seed} n {n} m {m} {}: {} iterations",
                        algorithm.name(),
                        report.iterations
                    ));
                }
                w.write_record([
                    seed.to_string(),
                    n.to_string(),
                    m.to_string(),
                    algorithm.name().to_string(),
                    report.iterations.to_string(),
                    report.sfm_calls.to_string(),
                    report.sigma_star().map_or(String::new(), format),
                ])
                .map_err(csv_err)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    write_output(out, &String::from_utf8(bytes).expect("csv output is utf-8"))?;
    if violations.is_empty() {
        Ok(EXIT_OK)
    } else {
        Err(Error::Format(format!(
            "iteration bound exceeded: {}",
            violations.join("; ")
        )))
    }
}
