//! The recombination solver.
//!
//! Starting from `L >= n + 1` random vectors, step `k` replaces the iterate
//! set by recombinations of pairs of the previous generation against row
//! `k`. A recombination output inherits every equation its two inputs
//! satisfy, so after step `k` all iterates satisfy rows `1..=k`, and after
//! `m` steps they solve the system.
//!
//! Each step is one parallel map over slots: the previous generation is
//! shared read-only, every slot writes its own output, and every slot owns
//! its random stream and flop counter. Results are therefore bitwise
//! independent of the worker count.

mod guard;
mod iterates;
mod schedule;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use guard::{degeneracy_guard, GuardAction, CONTRACT_C, SPREAD_LIMIT};
pub use iterates::IterateSet;
pub use schedule::{
    amplification, anchored_pairs, choose_pairs, random_pair, PairSchedule, PairStrategy,
};

use crate::error::{Error, Result};
use crate::flops::FlopCounter;
use crate::linop::RowOracle;
use crate::randsrc::{sample_iterates, Distribution, DistributionSpec, RngState};
use crate::rec::{recombine, RecOutcome, DEFAULT_REC_TOL};
use crate::scalar::Scalar;

/// Stream slot reserved for drawing a step's pair schedule.
const SCHEDULE_SLOT: u64 = u64::MAX;

/// Feasibility budget after `k` steps: `1e-9 * k * max(1, |b|_inf)`.
pub fn feas_tol(k: usize, rhs_norm_inf: f64) -> f64 {
    1e-9 * k as f64 * rhs_norm_inf.max(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub distribution: Distribution,
    pub seed: u64,
    /// Number of iterates; `None` means `n + 1`.
    pub iterates: Option<usize>,
    pub rec_tol: f64,
    pub guard: bool,
    pub degeneracy_dist_threshold: f64,
    pub respread_c: f64,
    pub reduced_updates: bool,
    pub workers: usize,
    pub max_retries_per_step: usize,
    pub pairs: PairStrategy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            distribution: Distribution::default(),
            seed: 0,
            iterates: None,
            rec_tol: DEFAULT_REC_TOL,
            guard: false,
            degeneracy_dist_threshold: 1e-8,
            respread_c: 2.0,
            reduced_updates: false,
            workers: 1,
            max_retries_per_step: 3,
            pairs: PairStrategy::Anchored,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// No retries, no guard, exactly `n + 1` iterates, all updated each step.
    pub fn strict_paper(seed: u64) -> Self {
        Self {
            seed,
            iterates: None,
            guard: false,
            reduced_updates: false,
            max_retries_per_step: 0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.distribution.validate()?;
        if let Some(l) = self.iterates {
            if l < 2 {
                return Err(Error::Config(format!("need at least 2 iterates, got {l}")));
            }
        }
        if !(self.respread_c > 0.0 && self.respread_c != 1.0 && self.respread_c.is_finite()) {
            return Err(Error::Config(format!(
                "respread factor must be positive and not 1, got {}",
                self.respread_c
            )));
        }
        if !(self.rec_tol >= 0.0) || !(self.degeneracy_dist_threshold >= 0.0) {
            return Err(Error::Config("thresholds must be nonnegative".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        Ok(())
    }

    fn iterate_count(&self, n: usize) -> usize {
        self.iterates.unwrap_or(n + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Status {
    Solved,
    Partial { completed_steps: usize },
}

/// A slot whose recombination stayed degenerate after all retries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepFailure {
    /// One-based step (row) number.
    pub step: usize,
    pub slot: usize,
    pub pair: (usize, usize),
    pub denominator_magnitude: f64,
}

impl std::fmt::Display for StepFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "step {} slot {}: pair {:?} degenerate (|denominator| = {:e})",
            self.step, self.slot, self.pair, self.denominator_magnitude
        )
    }
}

#[derive(Debug, Clone)]
pub struct StepOutput<S> {
    pub iterates: IterateSet<S>,
    pub flops: FlopCounter,
    /// Flops on the step's critical path: the slowest slot of each phase.
    pub depth_flops: u64,
    pub retries: usize,
}

#[derive(Debug, Clone)]
pub struct SolveReport<S> {
    pub status: Status,
    pub iterates: IterateSet<S>,
    /// Largest `|a_j^T v - b_j|` over all output vectors and all rows.
    pub max_residual: f64,
    pub rhs_norm_inf: f64,
    pub rows: usize,
    pub flops: FlopCounter,
    pub depth_flops: u64,
    pub wall_time: Duration,
    pub retries_used: usize,
    pub failure: Option<StepFailure>,
    pub config: SolverConfig,
}

impl<S> SolveReport<S> {
    pub fn is_solved(&self) -> bool {
        self.status == Status::Solved
    }

    /// Number of leading equations the output vectors satisfy.
    pub fn completed_steps(&self) -> usize {
        match self.status {
            Status::Solved => self.rows,
            Status::Partial { completed_steps } => completed_steps,
        }
    }
}

/// Runs slot-indexed work sequentially or on a dedicated pool.
pub struct Executor {
    pool: Option<rayon::ThreadPool>,
}

impl Executor {
    pub fn new(workers: usize) -> Result<Self> {
        if workers <= 1 {
            return Ok(Self { pool: None });
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
        Ok(Self { pool: Some(pool) })
    }

    pub fn sequential() -> Self {
        Self { pool: None }
    }

    pub fn map<T, F>(&self, slots: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match &self.pool {
            None => (0..slots).map(f).collect(),
            Some(pool) => pool.install(|| (0..slots).into_par_iter().map(f).collect()),
        }
    }
}

/// Recombination step `k` (one-based) applied to generation `k - 1`.
pub fn step<S: Scalar, O: RowOracle<S> + ?Sized>(
    iterates: &IterateSet<S>,
    oracle: &O,
    k: usize,
    config: &SolverConfig,
    exec: &Executor,
) -> std::result::Result<StepOutput<S>, StepFailure> {
    assert!(k >= 1 && k <= oracle.rows(), "step {k} out of range");
    assert_eq!(
        iterates.generation(),
        k - 1,
        "iterate set is not at generation k-1"
    );
    let n = iterates.dim();
    let row = k - 1;
    let beta = oracle.rhs_entry(row);
    let available = iterates.len();
    // the first n+2-k iterates stay affinely independent under the anchored schedule
    let core = (n + 2 - k).min(available).max(2);
    let count = if config.reduced_updates {
        (n + 1).saturating_sub(k).max(2)
    } else {
        available
    };

    let mut flops = FlopCounter::new();
    let mut depth_flops = 0;
    let (schedule, pool) = match config.pairs {
        PairStrategy::Anchored => {
            let probed = exec.map(core, |i| {
                let mut c = FlopCounter::new();
                let s = oracle.row_action(row, iterates.vector(i), &mut c);
                (s, c)
            });
            depth_flops += probed.iter().map(|(_, c)| c.total()).max().unwrap_or(0);
            flops += probed.iter().map(|(_, c)| *c).sum();
            let actions: Vec<S> = probed.into_iter().map(|(s, _)| s).collect();
            let mut rng = RngState::child(config.seed, k as u64, SCHEDULE_SLOT);
            (anchored_pairs(&actions, beta, core, count, &mut rng), core)
        }
        PairStrategy::Uniform => {
            let mut rng = RngState::child(config.seed, k as u64, SCHEDULE_SLOT);
            (choose_pairs(&mut rng, available, count), available)
        }
    };

    let results = exec.map(count, |slot| {
        recombine_slot(
            iterates,
            oracle,
            row,
            beta,
            schedule.get(slot),
            slot,
            pool,
            config,
            k,
        )
    });

    let mut vectors = Vec::with_capacity(count);
    let mut retries = 0;
    let mut slowest = 0;
    for r in results {
        let (z, c, tries) = r?;
        vectors.push(z);
        flops += c;
        slowest = slowest.max(c.total());
        retries += tries;
    }
    depth_flops += slowest;
    Ok(StepOutput {
        iterates: IterateSet::new(n, vectors, k),
        flops,
        depth_flops,
        retries,
    })
}

#[allow(clippy::too_many_arguments)]
fn recombine_slot<S: Scalar, O: RowOracle<S> + ?Sized>(
    iterates: &IterateSet<S>,
    oracle: &O,
    row: usize,
    beta: S,
    first: (usize, usize),
    slot: usize,
    pool: usize,
    config: &SolverConfig,
    k: usize,
) -> std::result::Result<(Vec<S>, FlopCounter, usize), StepFailure> {
    let mut counter = FlopCounter::new();
    let mut rng: Option<RngState> = None;
    let mut pair = first;
    let mut attempt = 0;
    loop {
        let (i, j) = pair;
        let vi = iterates.vector(i);
        let vj = iterates.vector(j);
        let denominator = if config.guard {
            match degeneracy_guard(
                vi,
                vj,
                config.degeneracy_dist_threshold,
                config.respread_c,
                &mut counter,
            ) {
                GuardAction::Keep => try_rec(vi, vj, oracle, row, beta, config, &mut counter),
                GuardAction::Respread(w) => {
                    try_rec(vi, &w, oracle, row, beta, config, &mut counter)
                }
                GuardAction::Unusable => Err(0.0),
            }
        } else {
            try_rec(vi, vj, oracle, row, beta, config, &mut counter)
        };
        let d = match denominator {
            Ok(z) => return Ok((z, counter, attempt)),
            Err(d) => d,
        };
        if attempt >= config.max_retries_per_step || pool < 3 {
            return Err(StepFailure {
                step: k,
                slot,
                pair,
                denominator_magnitude: d,
            });
        }
        attempt += 1;
        let rng = rng.get_or_insert_with(|| RngState::child(config.seed, k as u64, slot as u64));
        let mut next = random_pair(rng, pool);
        while next == pair {
            next = random_pair(rng, pool);
        }
        pair = next;
    }
}

fn try_rec<S: Scalar, O: RowOracle<S> + ?Sized>(
    u: &[S],
    v: &[S],
    oracle: &O,
    row: usize,
    beta: S,
    config: &SolverConfig,
    counter: &mut FlopCounter,
) -> std::result::Result<Vec<S>, f64> {
    let outcome = recombine(
        u,
        v,
        |x, c| oracle.row_action(row, x, c),
        beta,
        config.rec_tol,
        counter,
    )
    .expect("iterates share one dimension");
    match outcome {
        RecOutcome::Success { z, .. } => Ok(z),
        RecOutcome::Degenerate {
            denominator_magnitude,
        } => Err(denominator_magnitude),
    }
}

pub fn solve<S: Scalar, O: RowOracle<S> + ?Sized>(
    oracle: &O,
    config: &SolverConfig,
) -> Result<SolveReport<S>> {
    solve_observed(oracle, config, |_| {})
}

/// [`solve`], calling `observe` on every completed generation (including
/// the starting one).
pub fn solve_observed<S, O, F>(
    oracle: &O,
    config: &SolverConfig,
    mut observe: F,
) -> Result<SolveReport<S>>
where
    S: Scalar,
    O: RowOracle<S> + ?Sized,
    F: FnMut(&IterateSet<S>),
{
    config.validate()?;
    let m = oracle.rows();
    let n = oracle.dim();
    if m == 0 || n == 0 {
        return Err(Error::Dimension(format!("empty system ({m}x{n})")));
    }
    if m > n {
        return Err(Error::Dimension(format!(
            "more equations than unknowns ({m}x{n}); full row rank needs m <= n"
        )));
    }
    let exec = Executor::new(config.workers)?;

    let start = Instant::now();
    let spec = DistributionSpec::new(config.distribution, n)?;
    let mut root = RngState::new(config.seed);
    let mut iterates = sample_iterates::<S>(&spec, &mut root, config.iterate_count(n))?;
    observe(&iterates);

    let mut flops = FlopCounter::new();
    let mut depth_flops = 0;
    let mut retries_used = 0;
    let mut failure = None;
    for k in 1..=m {
        match step(&iterates, oracle, k, config, &exec) {
            Ok(out) => {
                iterates = out.iterates;
                flops += out.flops;
                depth_flops += out.depth_flops;
                retries_used += out.retries;
                observe(&iterates);
            }
            Err(f) => {
                failure = Some(f);
                break;
            }
        }
    }
    let wall_time = start.elapsed();

    // per-row worst residual over all output vectors
    let per_vector = exec.map(iterates.len(), |i| oracle.row_residuals(iterates.vector(i)));
    let mut row_worst = vec![0.0_f64; m];
    for residuals in &per_vector {
        for (w, r) in row_worst.iter_mut().zip(residuals) {
            // NaN must count as a violation
            *w = if r.is_nan() { f64::INFINITY } else { w.max(*r) };
        }
    }
    let rhs_norm_inf = oracle.rhs_norm_inf();
    let completed = iterates.generation();
    let satisfied = satisfied_prefix(&row_worst, completed, rhs_norm_inf);
    let status = if satisfied == m {
        Status::Solved
    } else {
        Status::Partial {
            completed_steps: satisfied,
        }
    };

    Ok(SolveReport {
        status,
        iterates,
        max_residual: row_worst.iter().copied().fold(0.0, f64::max),
        rhs_norm_inf,
        rows: m,
        flops,
        depth_flops,
        wall_time,
        retries_used,
        failure,
        config: config.clone(),
    })
}

/// Largest `k <= limit` such that every row below `k` is within
/// `feas_tol(k)`.
fn satisfied_prefix(row_worst: &[f64], limit: usize, rhs_norm_inf: f64) -> usize {
    let mut prefix_max = 0.0_f64;
    let mut best = 0;
    for (j, &r) in row_worst.iter().enumerate().take(limit) {
        prefix_max = prefix_max.max(r);
        if prefix_max <= feas_tol(j + 1, rhs_norm_inf) {
            best = j + 1;
        }
    }
    best
}
