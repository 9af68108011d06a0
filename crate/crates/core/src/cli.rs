//! Command-line front end: `solve`, `bench` and `check`.
//!
//! Exit codes: 0 solved / within tolerance, 2 partial / tolerance violated,
//! 1 usage or I/O error.
//!
//! Bench CSV columns, in order:
//! `n,m,solver,variant,workers,flops,depth_flops,wall_time_ns,residual,status`.

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{parse_system, write_report, ReportRecord, System};
use crate::linop::{oracle_from_dense, residual_inf, DenseMatrix, Rhs, RowOracle};
use crate::oracle::gauss_solve;
use crate::randsrc::{Distribution, RngState};
use crate::rec::DEFAULT_REC_TOL;
use crate::scalar::Scalar;
use crate::solver::{feas_tol, solve, PairStrategy, SolveReport, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;

/// Step index reserved for the random test-system stream; solver steps are
/// numbered `1..=m`, so it never collides with them.
const SYSTEM_STREAM: u64 = u64::MAX;

#[derive(Parser, Debug)]
#[command(
    name = "recomb",
    version,
    about = "Randomized recombination solver for A x = b"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve a system from files or a random generator.
    Solve(SolveArgs),
    /// Compare flop counts and timings against Gaussian elimination.
    Bench(BenchArgs),
    /// Re-verify a report against its system.
    Check(CheckArgs),
}

#[derive(Args, Debug, Clone)]
#[command(group(ArgGroup::new("source").required(true).args(["matrix", "random"])))]
pub struct SystemArgs {
    /// Matrix file (Matrix Market or dense text).
    #[arg(short = 'A', long = "matrix", value_name = "PATH")]
    pub matrix: Option<PathBuf>,
    /// Right-hand side file; defaults to the matrix's last column.
    #[arg(short = 'b', long = "rhs", value_name = "PATH", requires = "matrix")]
    pub rhs: Option<PathBuf>,
    /// Random system with `n` unknowns and `m` equations (default `m = n`).
    #[arg(long, num_args = 1..=2, value_names = ["N", "M"])]
    pub random: Option<Vec<usize>>,
    /// Target condition number for the random system.
    #[arg(long, requires = "random")]
    pub cond: Option<f64>,
    /// Complex random system.
    #[arg(long, requires = "random")]
    pub complex: bool,
    /// Seed for the random system; defaults to the solver seed.
    #[arg(long, requires = "random")]
    pub system_seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistArg {
    Gaussian,
    Uniform,
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairsArg {
    Anchored,
    Uniform,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Law of the starting vectors.
    #[arg(long, value_enum, default_value_t = DistArg::Gaussian)]
    pub dist: DistArg,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mean: f64,
    #[arg(long, default_value_t = 1.0)]
    pub stddev: f64,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub hi: f64,
    /// Number of iterates (default n + 1).
    #[arg(long, value_name = "L")]
    pub iterates: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_REC_TOL)]
    pub rec_tol: f64,
    /// Enable the pair degeneracy guard.
    #[arg(long)]
    pub guard: bool,
    #[arg(long, default_value_t = 1e-8)]
    pub guard_threshold: f64,
    #[arg(long, default_value_t = 2.0)]
    pub respread_c: f64,
    /// Update only the iterates later steps need.
    #[arg(long)]
    pub reduced: bool,
    /// Retries per slot after a degenerate recombination.
    #[arg(long)]
    pub retries: Option<usize>,
    #[arg(long, value_enum, default_value_t = PairsArg::Anchored)]
    pub pairs: PairsArg,
    /// Worker threads for the per-step loop.
    #[arg(long, default_value_t = 1, value_name = "WORKERS")]
    pub parallel: usize,
    /// No retries, no guard, exactly n + 1 iterates.
    #[arg(long, conflicts_with_all = ["guard", "retries", "iterates", "reduced"])]
    pub strict_paper: bool,
}

impl SolverArgs {
    pub fn config(&self) -> Result<SolverConfig> {
        let distribution = match self.dist {
            DistArg::Gaussian => Distribution::gaussian(self.mean, self.stddev)?,
            DistArg::Uniform => Distribution::uniform(self.lo, self.hi)?,
            DistArg::Sphere => Distribution::Sphere,
        };
        let pairs = match self.pairs {
            PairsArg::Anchored => PairStrategy::Anchored,
            PairsArg::Uniform => PairStrategy::Uniform,
        };
        let base = if self.strict_paper {
            SolverConfig::strict_paper(self.seed)
        } else {
            let mut c = SolverConfig::with_seed(self.seed);
            c.iterates = self.iterates;
            c.guard = self.guard;
            c.reduced_updates = self.reduced;
            if let Some(r) = self.retries {
                c.max_retries_per_step = r;
            }
            c
        };
        let config = SolverConfig {
            distribution,
            rec_tol: self.rec_tol,
            degeneracy_dist_threshold: self.guard_threshold,
            respread_c: self.respread_c,
            workers: self.parallel,
            pairs,
            ..base
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Write the JSON report here.
    #[arg(short = 'o', long = "output", value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Include every output vector in the report.
    #[arg(long)]
    pub full_iterates: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Default,
    Strict,
    Reduced,
    Guarded,
}

impl Variant {
    fn name(self) -> &'static str {
        match self {
            Variant::Default => "default",
            Variant::Strict => "strict",
            Variant::Reduced => "reduced",
            Variant::Guarded => "guarded",
        }
    }

    fn apply(self, base: &SolverConfig) -> SolverConfig {
        match self {
            Variant::Default => base.clone(),
            Variant::Strict => SolverConfig {
                iterates: None,
                guard: false,
                reduced_updates: false,
                max_retries_per_step: 0,
                ..base.clone()
            },
            Variant::Reduced => SolverConfig {
                reduced_updates: true,
                ..base.clone()
            },
            Variant::Guarded => SolverConfig {
                guard: true,
                ..base.clone()
            },
        }
    }
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Numbers of unknowns.
    #[arg(long, value_delimiter = ',', default_values_t = [32usize, 64, 128, 256])]
    pub sizes: Vec<usize>,
    /// Equations per unknown (`m = round(ratio * n)`).
    #[arg(long, default_value_t = 1.0)]
    pub ratio: f64,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker counts to run the solver with.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize])]
    pub workers: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Variant::Default])]
    pub variants: Vec<Variant>,
    #[arg(long)]
    pub cond: Option<f64>,
    /// Largest n scanned for the flop crossover (0 skips the scan).
    #[arg(long, default_value_t = 100)]
    pub crossover_max: usize,
    /// CSV destination; standard output if omitted.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Report written by `solve`.
    #[arg(long, value_name = "PATH")]
    pub report: PathBuf,
    #[command(flatten)]
    pub system: SystemArgs,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => run_solve(a, out),
        Command::Bench(a) => run_bench(a, out, err),
        Command::Check(a) => run_check(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

// ---------------------------------------------------------------------------
// Random systems

/// Random `m x n` system `A x* = b` with i.i.d. standard Gaussian `x*`.
///
/// `A = D G` with `G` i.i.d. standard Gaussian and, when `cond` is given,
/// `D = diag(cond^(-i/(m-1)))`, a geometric row scaling spanning a factor
/// of `cond`. This steers the condition number without an SVD.
pub fn random_system<S: Scalar>(
    m: usize,
    n: usize,
    cond: Option<f64>,
    seed: u64,
) -> Result<(DenseMatrix<S>, Rhs<S>)> {
    if m == 0 || n == 0 {
        return Err(Error::Dimension(format!(
            "random system must be at least 1x1, got {m}x{n}"
        )));
    }
    if let Some(c) = cond {
        if !(c >= 1.0 && c.is_finite()) {
            return Err(Error::Config(format!(
                "condition target must be >= 1, got {c}"
            )));
        }
    }
    let mut rng = RngState::child(seed, SYSTEM_STREAM, 0);
    let mut data: Vec<S> = (0..m * n)
        .map(|_| S::sample_gaussian(&mut rng, 0.0, 1.0))
        .collect();
    if let (Some(c), true) = (cond, m > 1) {
        for i in 0..m {
            let d = S::from_real(c.powf(-(i as f64) / (m - 1) as f64));
            data[i * n..(i + 1) * n].iter_mut().for_each(|x| *x *= d);
        }
    }
    let a = DenseMatrix::from_row_major(m, n, data)?;
    let x: Vec<S> = (0..n)
        .map(|_| S::sample_gaussian(&mut rng, 0.0, 1.0))
        .collect();
    let b = Rhs(a.mul_vec(&x)?);
    Ok((a, b))
}

fn load_system(args: &SystemArgs, default_seed: u64) -> Result<System> {
    if let Some(path) = &args.matrix {
        return parse_system(path, args.rhs.as_deref());
    }
    let dims = args.random.as_deref().unwrap_or_default();
    let n = dims[0];
    let m = dims.get(1).copied().unwrap_or(n);
    if m > n {
        return Err(Error::Dimension(format!("--random {n} {m}: need m <= n")));
    }
    let seed = args.system_seed.unwrap_or(default_seed);
    Ok(if args.complex {
        let (a, b) = random_system::<Complex64>(m, n, args.cond, seed)?;
        System::Complex(a, b)
    } else {
        let (a, b) = random_system::<f64>(m, n, args.cond, seed)?;
        System::Real(a, b)
    })
}

// ---------------------------------------------------------------------------
// solve

fn run_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let config = args.solver.config()?;
    match load_system(&args.system, config.seed)? {
        System::Real(a, b) => solve_and_report(&a, &b, &config, args, out),
        System::Complex(a, b) => solve_and_report(&a, &b, &config, args, out),
    }
}

fn solve_and_report<S: Scalar>(
    a: &DenseMatrix<S>,
    b: &Rhs<S>,
    config: &SolverConfig,
    args: &SolveArgs,
    out: &mut dyn Write,
) -> Result<i32> {
    let oracle = oracle_from_dense(a, b)?;
    let report = solve(&oracle, config)?;
    if let Some(path) = &args.output {
        write_report(&report, path, args.full_iterates)?;
    }
    print_summary(&report, out).map_err(stdout_error)?;
    Ok(if report.is_solved() {
        EXIT_OK
    } else {
        EXIT_PARTIAL
    })
}

fn stdout_error(source: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn print_summary<S: Scalar>(report: &SolveReport<S>, out: &mut dyn Write) -> std::io::Result<()> {
    let k = report.completed_steps();
    let status = if report.is_solved() {
        "solved"
    } else {
        "partial"
    };
    writeln!(out, "status: {status} ({k}/{} rows)", report.rows)?;
    writeln!(
        out,
        "max residual: {:e} (tolerance {:e})",
        report.max_residual,
        feas_tol(report.rows, report.rhs_norm_inf)
    )?;
    writeln!(
        out,
        "flops: {} total, {} on the critical path",
        report.flops.total(),
        report.depth_flops
    )?;
    writeln!(out, "retries: {}", report.retries_used)?;
    writeln!(
        out,
        "wall time: {:.3} ms",
        report.wall_time.as_secs_f64() * 1e3
    )?;
    if let Some(f) = &report.failure {
        writeln!(out, "failure: {f}")?;
    }
    let x = report.iterates.vector(0);
    if x.len() <= 16 {
        let parts: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        writeln!(out, "solution: [{}]", parts.join(", "))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// bench

/// One CSV row of `bench`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub solver: String,
    pub variant: String,
    pub workers: usize,
    pub flops: u64,
    pub depth_flops: u64,
    pub wall_time_ns: u64,
    pub residual: f64,
    pub status: String,
}

/// Settings for [`bench_rows`].
#[derive(Debug, Clone)]
pub struct BenchPlan {
    pub sizes: Vec<usize>,
    pub ratio: f64,
    pub reps: usize,
    pub seed: u64,
    pub workers: Vec<usize>,
    pub variants: Vec<Variant>,
    pub cond: Option<f64>,
    pub base: SolverConfig,
}

impl Default for BenchPlan {
    fn default() -> Self {
        Self {
            sizes: vec![32, 64, 128, 256],
            ratio: 1.0,
            reps: 1,
            seed: 0,
            workers: vec![1],
            variants: vec![Variant::Default],
            cond: None,
            base: SolverConfig::default(),
        }
    }
}

fn nanos(d: std::time::Duration) -> u64 {
    u64::try_from(d.as_nanos()).unwrap_or(u64::MAX)
}

/// Runs the recombination solver (every variant and worker count) and, for
/// square systems, Gaussian elimination on seeded random real systems.
pub fn bench_rows(plan: &BenchPlan) -> Result<Vec<BenchRow>> {
    if !(plan.ratio > 0.0 && plan.ratio <= 1.0) {
        return Err(Error::Config(format!(
            "ratio must be in (0, 1], got {}",
            plan.ratio
        )));
    }
    let mut rows = Vec::new();
    for &n in &plan.sizes {
        let m = ((plan.ratio * n as f64).round() as usize).clamp(1, n);
        for rep in 0..plan.reps {
            let seed = plan.seed.wrapping_add(rep as u64);
            let (a, b) = random_system::<f64>(m, n, plan.cond, seed)?;
            let oracle = oracle_from_dense(&a, &b)?;
            for &variant in &plan.variants {
                for &workers in &plan.workers {
                    let config = SolverConfig {
                        seed,
                        workers,
                        ..variant.apply(&plan.base)
                    };
                    let r = solve(&oracle, &config)?;
                    rows.push(BenchRow {
                        n,
                        m,
                        solver: "recombination".into(),
                        variant: variant.name().into(),
                        workers,
                        flops: r.flops.total(),
                        depth_flops: r.depth_flops,
                        wall_time_ns: nanos(r.wall_time),
                        residual: r.max_residual,
                        status: if r.is_solved() { "solved" } else { "partial" }.into(),
                    });
                }
            }
            if m == n {
                let start = Instant::now();
                let (flops, residual, status) = match gauss_solve(&a, &b) {
                    Ok(e) => (
                        e.flops.total(),
                        residual_inf(&a, &b, &e.solution)?,
                        "solved",
                    ),
                    Err(Error::Singular { .. }) => (0, f64::NAN, "singular"),
                    Err(e) => return Err(e),
                };
                let wall = nanos(start.elapsed());
                rows.push(BenchRow {
                    n,
                    m,
                    solver: "elimination".into(),
                    variant: "partial-pivoting".into(),
                    workers: 1,
                    flops,
                    depth_flops: flops,
                    wall_time_ns: wall,
                    residual,
                    status: status.into(),
                });
            }
        }
    }
    Ok(rows)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Mean of `metric` per `n` over the rows matching `pred`, sorted by `n`.
pub fn series(
    rows: &[BenchRow],
    pred: impl Fn(&BenchRow) -> bool,
    metric: impl Fn(&BenchRow) -> f64,
) -> Vec<(f64, f64)> {
    let mut acc: std::collections::BTreeMap<usize, (f64, usize)> = Default::default();
    for r in rows.iter().filter(|r| pred(r)) {
        let e = acc.entry(r.n).or_default();
        e.0 += metric(r);
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(n, (s, c))| (n as f64, s / c as f64))
        .collect()
}

/// Smallest sizes at which recombination beats elimination on flops, under
/// several counting conventions. `None` means no crossing up to the scan
/// limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Crossover {
    /// Recombination critical-path flops vs elimination multiply-add pairs
    /// (the classical `n^3 / 3` count).
    pub depth_vs_pairs: Option<usize>,
    /// Recombination critical-path flops vs elimination raw flops.
    pub depth_vs_raw: Option<usize>,
    /// Recombination total flops vs elimination raw flops.
    pub total_vs_raw: Option<usize>,
}

/// Reference crossover from the constants 15 (recombination, per `n^2`) and
/// `1/3` (elimination, per `n^3`): the smallest `n` with `15 n^2 < n^3 / 3`.
pub fn reference_crossover() -> usize {
    (1..)
        .find(|&n: &usize| 15 * n * n * 3 < n * n * n)
        .expect("finite")
}

/// Scans square seeded Gaussian systems `n = 2..=max_n`.
pub fn flop_crossover(max_n: usize, seed: u64, base: &SolverConfig) -> Result<Crossover> {
    let mut c = Crossover {
        depth_vs_pairs: None,
        depth_vs_raw: None,
        total_vs_raw: None,
    };
    for n in 2..=max_n {
        let (a, b) = random_system::<f64>(n, n, None, seed)?;
        let oracle = oracle_from_dense(&a, &b)?;
        let r = solve(
            &oracle,
            &SolverConfig {
                seed,
                ..base.clone()
            },
        )?;
        let e = gauss_solve(&a, &b)?;
        let first = |slot: &mut Option<usize>, hit: bool| {
            if hit && slot.is_none() {
                *slot = Some(n);
            }
        };
        first(
            &mut c.depth_vs_pairs,
            r.depth_flops < e.flops.multiply_add_pairs(),
        );
        first(&mut c.depth_vs_raw, r.depth_flops < e.flops.total());
        first(&mut c.total_vs_raw, r.flops.total() < e.flops.total());
    }
    Ok(c)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), |v| format!("{v:.3}"))
}

fn fmt_n(x: Option<usize>) -> String {
    x.map_or_else(|| "none".into(), |v| v.to_string())
}

fn run_bench(args: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    if args.sizes.is_empty() || args.sizes.contains(&0) {
        return Err(Error::Config("sizes must be positive".into()));
    }
    if args.reps == 0 || args.workers.contains(&0) {
        return Err(Error::Config(
            "reps and worker counts must be positive".into(),
        ));
    }
    let plan = BenchPlan {
        sizes: args.sizes.clone(),
        ratio: args.ratio,
        reps: args.reps,
        seed: args.seed,
        workers: args.workers.clone(),
        variants: args.variants.clone(),
        cond: args.cond,
        base: SolverConfig::default(),
    };
    let rows = bench_rows(&plan)?;

    let csv_err = |e: csv::Error| Error::Report(format!("csv: {e}"));
    match &args.csv {
        Some(path) => {
            let file = File::create(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            let mut w = csv::Writer::from_writer(file);
            for r in &rows {
                w.serialize(r).map_err(csv_err)?;
            }
            w.flush().map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
        }
        None => {
            let mut w = csv::Writer::from_writer(&mut *out);
            for r in &rows {
                w.serialize(r).map_err(csv_err)?;
            }
            w.flush().map_err(stdout_error)?;
        }
    }

    // summary goes to stdout only when the CSV went to a file
    let summary: &mut dyn Write = if args.csv.is_some() { out } else { err };
    write_bench_summary(&rows, &plan, args.crossover_max, summary).map_err(stdout_error)?;
    Ok(EXIT_OK)
}

fn write_bench_summary(
    rows: &[BenchRow],
    plan: &BenchPlan,
    crossover_max: usize,
    w: &mut dyn Write,
) -> std::io::Result<()> {
    let w1 = plan.workers[0];
    for &v in &plan.variants {
        let pick =
            |r: &BenchRow| r.solver == "recombination" && r.variant == v.name() && r.workers == w1;
        let total = loglog_slope(&series(rows, pick, |r| r.flops as f64));
        let depth = loglog_slope(&series(rows, pick, |r| r.depth_flops as f64));
        writeln!(
            w,
            "recombination/{}: flops slope {}, critical-path slope {}",
            v.name(),
            fmt_opt(total),
            fmt_opt(depth)
        )?;
        for (n, f) in series(rows, pick, |r| r.flops as f64 / (r.n * r.n * r.m) as f64) {
            writeln!(w, "  n={n}: flops / (n^2 m) = {f:.2}")?;
        }
    }
    let gauss = loglog_slope(&series(
        rows,
        |r| r.solver == "elimination",
        |r| r.flops as f64,
    ));
    writeln!(w, "elimination: flops slope {}", fmt_opt(gauss))?;
    if crossover_max >= 2 {
        match flop_crossover(crossover_max, plan.seed, &plan.base) {
            Ok(c) => {
                writeln!(
                    w,
                    "crossover (critical path vs n^3/3 multiply-adds): n = {}",
                    fmt_n(c.depth_vs_pairs)
                )?;
                writeln!(
                    w,
                    "crossover (critical path vs raw elimination flops): n = {}",
                    fmt_n(c.depth_vs_raw)
                )?;
                writeln!(
                    w,
                    "crossover (total vs raw elimination flops): n = {}",
                    fmt_n(c.total_vs_raw)
                )?;
            }
            Err(e) => writeln!(w, "crossover scan failed: {e}")?,
        }
        writeln!(
            w,
            "reference crossover (15 n^2 < n^3/3): n = {}",
            reference_crossover()
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// check

/// First violation found by [`check_vectors`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub vector: usize,
    /// One-based row number.
    pub row: usize,
    pub residual: f64,
    pub tolerance: f64,
}

/// Checks rows `1..=k` of every vector against `feas_tol(k)`.
pub fn check_vectors<S: Scalar, O: RowOracle<S> + ?Sized>(
    oracle: &O,
    vectors: &[Vec<S>],
    k: usize,
) -> Result<Option<Violation>> {
    let tolerance = feas_tol(k, oracle.rhs_norm_inf());
    for (idx, v) in vectors.iter().enumerate() {
        if v.len() != oracle.dim() {
            return Err(Error::Dimension(format!(
                "report vector {idx} has {} entries, system has {} unknowns",
                v.len(),
                oracle.dim()
            )));
        }
        let residuals = oracle.row_residuals(v);
        if let Some((row, &r)) = residuals
            .iter()
            .enumerate()
            .take(k)
            .find(|(_, r)| !(**r <= tolerance))
        {
            return Ok(Some(Violation {
                vector: idx,
                row: row + 1,
                residual: r,
                tolerance,
            }));
        }
    }
    Ok(None)
}

fn check_typed<S: Scalar>(
    a: &DenseMatrix<S>,
    b: &Rhs<S>,
    record: &ReportRecord,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    if record.rows != a.rows() || record.dim != a.cols() {
        return Err(Error::Dimension(format!(
            "report is for a {}x{} system, got {}x{}",
            record.rows,
            record.dim,
            a.rows(),
            a.cols()
        )));
    }
    if record.completed_steps > record.rows {
        return Err(Error::Report(format!(
            "completed_steps {} exceeds {} rows",
            record.completed_steps, record.rows
        )));
    }
    let oracle = oracle_from_dense(a, b)?;
    let vectors = record.vectors::<S>()?;
    let k = record.completed_steps;
    let io = stdout_error;
    match check_vectors(&oracle, &vectors, k)? {
        None => {
            writeln!(out, "ok: {} vector(s) satisfy rows 1..={k}", vectors.len()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Some(v) => {
            writeln!(
                err,
                "row {} violated by vector {}: residual {:e} > tolerance {:e}",
                v.row, v.vector, v.residual, v.tolerance
            )
            .map_err(io)?;
            writeln!(out, "violated row: {}", v.row).map_err(io)?;
            Ok(EXIT_PARTIAL)
        }
    }
}

fn run_check(args: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let record = crate::io::read_report(&args.report)?;
    match load_system(&args.system, record.seed)? {
        System::Real(a, b) => {
            if record.scalar == "complex" {
                let a = DenseMatrix::from_row_major(
                    a.rows(),
                    a.cols(),
                    a.as_slice()
                        .iter()
                        .map(|&x| Complex64::from_real(x))
                        .collect(),
                )?;
                let b = Rhs(b.0.iter().map(|&x| Complex64::from_real(x)).collect());
                check_typed(&a, &b, &record, out, err)
            } else {
                check_typed(&a, &b, &record, out, err)
            }
        }
        System::Complex(a, b) => check_typed(&a, &b, &record, out, err),
    }
}

/// Convenience for tests and scripts: run with captured output.
pub fn run_captured<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(args, &mut out, &mut err);
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&err).into_owned(),
    )
}
