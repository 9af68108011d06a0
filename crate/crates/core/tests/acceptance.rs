//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero if any fail.

// `!(x <= tol)` is used on purpose so that NaN counts as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use recomb::cli::{flop_crossover, loglog_slope, random_system, reference_crossover};
use recomb::flops::FlopCounter;
use recomb::io::{parse_matrix, parse_system, ParseErrorKind, System};
use recomb::linop::{oracle_from_dense, residual_inf, DenseMatrix, Rhs, RowOracle};
use recomb::oracle::gauss_solve;
use recomb::rec::{recombine, RecOutcome};
use recomb::scalar::{norm2, norm_inf};
use recomb::solver::{feas_tol, solve, solve_observed, SolverConfig, Status};
use recomb::Error;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type Malformed = (&'static str, usize, fn(&ParseErrorKind) -> bool);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        if !$cond {
            return Err(format!($($fmt)*));
        }
    };
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn plain_dot(a: &[f64], v: &[f64]) -> f64 {
    a.iter().zip(v).map(|(x, y)| x * y).sum()
}

/// 1. Recombination lands on the hyperplane.
fn rec_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    while cases < 10_000 {
        let n = rng.random_range(2..=64);
        let u: Vec<f64> = (0..n).map(|_| gaussian(&mut rng)).collect();
        let v: Vec<f64> = (0..n).map(|_| gaussian(&mut rng)).collect();
        let a: Vec<f64> = (0..n).map(|_| gaussian(&mut rng)).collect();
        let beta = gaussian(&mut rng) * norm2(&a);
        // non-degenerate: the functional separates the inputs by a fair margin
        let (su, sv) = (plain_dot(&a, &u), plain_dot(&a, &v));
        if (su - sv).abs() < 0.1 * su.abs().max(sv.abs()) {
            continue;
        }
        let out = recombine(
            &u,
            &v,
            |x, c| recomb::flops::counted_action(&a, x, c),
            beta,
            1e-12,
            &mut FlopCounter::new(),
        )
        .map_err(|e| e.to_string())?;
        let RecOutcome::Success { z, .. } = out else {
            return Err(format!("case {cases}: unexpected degeneracy"));
        };
        let scale = beta.abs() + norm2(&a) * (norm2(&u) + norm2(&v));
        let err = (plain_dot(&a, &z) - beta).abs();
        worst = worst.max(err / scale);
        ensure!(
            err <= 1e-11 * scale,
            "case {cases}: |a.z - beta| = {err:e} > 1e-11 * {scale:e}"
        );
        cases += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 5.0, "took {secs:.2} s");
    Ok(format!(
        "{cases} cases, worst relative error {worst:.1e}, {secs:.2} s"
    ))
}

/// 2. After step k every iterate satisfies rows 1..k.
fn feasibility_ladder() -> Outcome {
    let mut checks = 0;
    for (i, n) in [4usize, 8, 16, 32].into_iter().enumerate() {
        let (a, b) = random_system::<f64>(n, n, None, 100 + i as u64).map_err(|e| e.to_string())?;
        let oracle = oracle_from_dense(&a, &b).map_err(|e| e.to_string())?;
        let bn = b.norm_inf();
        let mut violation = None;
        solve_observed(&oracle, &SolverConfig::with_seed(i as u64), |it| {
            let k = it.generation();
            let tol = feas_tol(k, bn);
            for v in it.vectors() {
                let res = oracle.row_residuals(v);
                if let Some(j) = (0..k).find(|&j| !(res[j] <= tol)) {
                    violation.get_or_insert((n, k, j + 1, res[j], tol));
                }
                checks += 1;
            }
        })
        .map_err(|e| e.to_string())?;
        if let Some((n, k, j, r, tol)) = violation {
            return Err(format!("n={n} step {k}: row {j} residual {r:e} > {tol:e}"));
        }
    }
    Ok(format!("{checks} iterate checks across n = 4, 8, 16, 32"))
}

/// 3. Almost-sure success, measured over many seeds.
fn probability_one_proxy() -> Outcome {
    let n = 32;
    let mut solved_default = 0;
    let mut solved_strict = 0;
    for seed in 0..500u64 {
        let (a, b) = random_system::<f64>(n, n, None, 10_000 + seed).map_err(|e| e.to_string())?;
        let oracle = oracle_from_dense(&a, &b).map_err(|e| e.to_string())?;
        if solve(&oracle, &SolverConfig::with_seed(seed))
            .map_err(|e| e.to_string())?
            .is_solved()
        {
            solved_default += 1;
        }
        if solve(&oracle, &SolverConfig::strict_paper(seed))
            .map_err(|e| e.to_string())?
            .is_solved()
        {
            solved_strict += 1;
        }
    }
    let detail = format!("default {solved_default}/500, strict {solved_strict}/500");
    ensure!(solved_default >= 499 && solved_strict >= 495, "{detail}");
    Ok(detail)
}

/// Infinity-norm condition number via an explicit inverse.
fn cond_inf(a: &DenseMatrix<f64>) -> Option<f64> {
    let n = a.rows();
    let mut inv_norm = vec![0.0; n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = gauss_solve(a, &Rhs(e)).ok()?.solution;
        for (acc, c) in inv_norm.iter_mut().zip(col) {
            *acc += c.abs();
        }
    }
    Some(a.norm_inf() * inv_norm.into_iter().fold(0.0, f64::max))
}

/// 4. Agreement with Gaussian elimination.
fn oracle_agreement() -> Outcome {
    let mut accepted = 0;
    let mut seed = 0u64;
    let mut worst: f64 = 0.0;
    let mut worst_cond: f64 = 0.0;
    while accepted < 100 {
        seed += 1;
        let n = 4 + (seed as usize * 7) % 61;
        let target = 10f64.powi((seed % 4) as i32 + 1);
        let (a, b) =
            random_system::<f64>(n, n, Some(target), 20_000 + seed).map_err(|e| e.to_string())?;
        match cond_inf(&a) {
            Some(c) if c <= 1e4 => worst_cond = worst_cond.max(c),
            _ => continue,
        }
        accepted += 1;
        let x = gauss_solve(&a, &b).map_err(|e| e.to_string())?.solution;
        let oracle = oracle_from_dense(&a, &b).map_err(|e| e.to_string())?;
        let r = solve(&oracle, &SolverConfig::with_seed(seed)).map_err(|e| e.to_string())?;
        ensure!(r.is_solved(), "n={n} seed {seed}: {:?}", r.status);
        let xn = norm_inf(&x);
        for v in r.iterates.vectors() {
            let d = v
                .iter()
                .zip(&x)
                .map(|(p, q)| (p - q).abs())
                .fold(0.0, f64::max);
            worst = worst.max(d / xn);
            ensure!(
                d <= 1e-6 * xn,
                "n={n} seed {seed}: distance {d:e} > 1e-6 * {xn:e}"
            );
        }
    }
    Ok(format!(
        "100 systems (n <= 64, cond_inf <= {worst_cond:.0}), worst relative distance {worst:.1e}"
    ))
}

/// 5. Cubic flop growth on square systems.
fn flop_scaling() -> Outcome {
    let mut pts = vec![];
    let mut ratios = vec![];
    for n in [32usize, 64, 128, 256] {
        let (a, b) = random_system::<f64>(n, n, None, 7).map_err(|e| e.to_string())?;
        let oracle = oracle_from_dense(&a, &b).map_err(|e| e.to_string())?;
        let r = solve(&oracle, &SolverConfig::with_seed(7)).map_err(|e| e.to_string())?;
        let total = r.flops.total() as f64;
        let n3 = (n * n * n) as f64;
        ensure!(total <= 20.0 * n3, "n={n}: {total} flops > 20 n^3");
        ratios.push(format!("{:.2}", total / n3));
        pts.push((n as f64, total));
    }
    let slope = loglog_slope(&pts).ok_or("no fit")?;
    ensure!((slope - 3.0).abs() <= 0.1, "slope {slope:.3}");
    Ok(format!(
        "slope {slope:.3}, flops/n^3 = [{}]",
        ratios.join(", ")
    ))
}

/// 6. Where recombination overtakes elimination.
fn crossover() -> Outcome {
    let c = flop_crossover(100, 3, &SolverConfig::default()).map_err(|e| e.to_string())?;
    let fmt = |x: Option<usize>| x.map_or_else(|| "none".to_string(), |v| v.to_string());
    let detail = format!(
        "critical path vs n^3/3 multiply-adds: n = {}; vs raw elimination flops: n = {}; total vs raw: n = {}; reference 15n^2 < n^3/3: n = {}",
        fmt(c.depth_vs_pairs),
        fmt(c.depth_vs_raw),
        fmt(c.total_vs_raw),
        reference_crossover()
    );
    ensure!(
        matches!(c.depth_vs_pairs, Some(n) if (20..=100).contains(&n)),
        "{detail}"
    );
    Ok(detail)
}

/// 7. Bitwise determinism across worker counts.
fn parallel_determinism() -> Outcome {
    let n = 64;
    let (a, b) = random_system::<f64>(n, n, None, 64).map_err(|e| e.to_string())?;
    let oracle = oracle_from_dense(&a, &b).map_err(|e| e.to_string())?;
    let mut runs = vec![];
    for workers in [1usize, 4, 8] {
        let config = SolverConfig {
            workers,
            ..SolverConfig::with_seed(64)
        };
        let r = solve(&oracle, &config).map_err(|e| e.to_string())?;
        runs.push((
            workers,
            r.iterates.fingerprint(),
            r.flops,
            r.depth_flops,
            r.wall_time,
        ));
    }
    for (w, fp, fl, d, _) in &runs[1..] {
        ensure!(
            *fp == runs[0].1,
            "workers={w}: iterates differ from workers=1"
        );
        ensure!(
            *fl == runs[0].2 && *d == runs[0].3,
            "workers={w}: flop counts differ"
        );
    }
    let times: Vec<String> = runs
        .iter()
        .map(|r| format!("{}w {:.1} ms", r.0, r.4.as_secs_f64() * 1e3))
        .collect();
    Ok(format!(
        "identical iterates and {} flops; {}",
        runs[0].2.total(),
        times.join(", ")
    ))
}

/// Row oracle whose row `rigged` returns a constant, so every pair is
/// degenerate at that step.
struct Rigged<'a> {
    inner: recomb::DenseOracle<'a, f64>,
    rigged: usize,
}

impl RowOracle<f64> for Rigged<'_> {
    fn rows(&self) -> usize {
        self.inner.rows()
    }
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn row_action(&self, k: usize, v: &[f64], counter: &mut FlopCounter) -> f64 {
        if k == self.rigged {
            1.0
        } else {
            self.inner.row_action(k, v, counter)
        }
    }
    fn rhs_entry(&self, k: usize) -> f64 {
        self.inner.rhs_entry(k)
    }
}

/// 8. A forced failure yields the partial solution so far.
fn partial_contract() -> Outcome {
    let n = 10;
    let (a, b) = random_system::<f64>(n, n, None, 8).map_err(|e| e.to_string())?;
    let mut seen = vec![];
    for k in [1usize, 4, 10] {
        let oracle = Rigged {
            inner: oracle_from_dense(&a, &b).map_err(|e| e.to_string())?,
            rigged: k - 1,
        };
        let r = solve(&oracle, &SolverConfig::strict_paper(8)).map_err(|e| e.to_string())?;
        ensure!(
            r.status
                == Status::Partial {
                    completed_steps: k - 1
                },
            "rigged step {k}: status {:?}",
            r.status
        );
        ensure!(
            r.failure.map(|f| f.step) == Some(k),
            "rigged step {k}: failure {:?}",
            r.failure
        );
        let tol = feas_tol(k - 1, b.norm_inf());
        for v in r.iterates.vectors() {
            let res = oracle.row_residuals(v);
            ensure!(
                res[..k - 1].iter().all(|&x| x <= tol),
                "rigged step {k}: rows 1..{} violated",
                k - 1
            );
        }
        seen.push(format!("k={k} -> partial({})", k - 1));
    }
    Ok(seen.join(", "))
}

/// 9. Underdetermined systems give distinct solutions.
fn underdetermined() -> Outcome {
    let one = (
        DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap(),
        Rhs(vec![2.0]),
    );
    let three = random_system::<f64>(3, 8, None, 38).map_err(|e| e.to_string())?;
    let mut details = vec![];
    for (name, (a, b)) in [("1x2", one), ("3x8", three)] {
        let oracle = oracle_from_dense(&a, &b).map_err(|e| e.to_string())?;
        let r = solve(&oracle, &SolverConfig::with_seed(11)).map_err(|e| e.to_string())?;
        ensure!(r.is_solved(), "{name}: {:?}", r.status);
        let tol = feas_tol(a.rows(), b.norm_inf());
        for v in r.iterates.vectors() {
            let res = residual_inf(&a, &b, v).map_err(|e| e.to_string())?;
            ensure!(res <= tol, "{name}: residual {res:e}");
        }
        let norms: Vec<f64> = r.iterates.vectors().iter().map(|v| norm2(v)).collect();
        let spread = norms.iter().cloned().fold(f64::MIN, f64::max)
            - norms.iter().cloned().fold(f64::MAX, f64::min);
        ensure!(
            spread > 1e-6,
            "{name}: outputs do not differ (norm spread {spread:e})"
        );
        details.push(format!(
            "{name}: {} outputs, norm spread {spread:.2}",
            norms.len()
        ));
    }
    Ok(details.join("; "))
}

/// 10. Complex scalars.
fn complex_instantiation() -> Outcome {
    let (a, b) = random_system::<Complex64>(8, 8, None, 10).map_err(|e| e.to_string())?;
    let oracle = oracle_from_dense(&a, &b).map_err(|e| e.to_string())?;
    let r = solve(&oracle, &SolverConfig::with_seed(10)).map_err(|e| e.to_string())?;
    ensure!(r.is_solved(), "{:?}", r.status);
    let bound = 1e-8 * b.norm_inf();
    let worst = r
        .iterates
        .vectors()
        .iter()
        .map(|v| residual_inf(&a, &b, v).unwrap())
        .fold(0.0, f64::max);
    ensure!(worst <= bound, "residual {worst:e} > {bound:e}");
    Ok(format!("residual {worst:.1e} <= {bound:.1e}"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// 11. File formats.
fn io_conformance() -> Outcome {
    let sys = parse_system(&fixture("id2_array.mtx"), Some(&fixture("rhs_34.txt")))
        .map_err(|e| e.to_string())?;
    ensure!(
        sys == System::Real(DenseMatrix::identity(2), Rhs(vec![3.0, 4.0])),
        "array identity: {sys:?}"
    );

    let sys = parse_system(
        &fixture("diag_coordinate.mtx"),
        Some(&fixture("rhs_34.txt")),
    )
    .map_err(|e| e.to_string())?;
    let System::Real(a, _) = sys else {
        return Err("coordinate: not real".into());
    };
    ensure!(a.as_slice() == [2.0, 0.0, 0.0, 4.0], "coordinate: {a:?}");

    let sys = parse_system(&fixture("complex.mtx"), Some(&fixture("complex_rhs.txt")))
        .map_err(|e| e.to_string())?;
    let System::Complex(a, b) = sys else {
        return Err("complex: not complex".into());
    };
    ensure!(
        a.get(0, 1) == Complex64::new(0.0, -2.0)
            && b.0 == vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
        "complex: {a:?} {b:?}"
    );

    let sys = parse_system(&fixture("comments.mtx"), None).map_err(|e| e.to_string());
    let Ok(System::Real(a, b)) = sys else {
        return Err(format!("comments: {sys:?}"));
    };
    ensure!(
        a.rows() == 3 && a.cols() == 2 && b.0 == vec![0.0, 0.0, 3.0],
        "comments: {a:?} {b:?}"
    );

    let text = std::fs::read_to_string(fixture("symmetric.mtx")).unwrap();
    let m = parse_matrix(&text).map_err(|e| e.to_string())?;
    ensure!(
        m == recomb::io::MatrixData::Real(
            DenseMatrix::from_rows(&[
                vec![4.0, 1.0, 0.0],
                vec![1.0, 5.0, -2.0],
                vec![0.0, -2.0, 0.0]
            ])
            .unwrap()
        ),
        "symmetric expansion: {m:?}"
    );

    let sys = parse_system(&fixture("dense_embedded.txt"), None).map_err(|e| e.to_string())?;
    ensure!(
        sys == System::Real(
            DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap(),
            Rhs(vec![5.0, 6.0])
        ),
        "dense text: {sys:?}"
    );

    let malformed: [Malformed; 6] = [
        ("out_of_range.mtx", 4, |k| {
            matches!(k, ParseErrorKind::IndexOutOfRange { row: 3, .. })
        }),
        (
            "non_numeric.mtx",
            5,
            |k| matches!(k, ParseErrorKind::NonNumeric(t) if t == "x3"),
        ),
        ("bad_header.mtx", 1, |k| {
            matches!(k, ParseErrorKind::Header(_))
        }),
        ("too_few.mtx", 5, |k| {
            matches!(k, ParseErrorKind::Dimension(_))
        }),
        ("duplicate.mtx", 4, |k| {
            matches!(k, ParseErrorKind::DuplicateEntry { row: 1, col: 2 })
        }),
        ("dense_short_row.txt", 3, |k| {
            matches!(k, ParseErrorKind::Dimension(_))
        }),
    ];
    for (name, line, kind) in malformed {
        match parse_system(&fixture(name), None) {
            Err(Error::Parse(e)) => {
                ensure!(e.line == line && kind(&e.kind), "{name}: got {e}");
                ensure!(
                    e.to_string().contains(&format!("line {line}")),
                    "{name}: message lacks line"
                );
            }
            other => return Err(format!("{name}: expected a parse error, got {other:?}")),
        }
    }

    let record = {
        let (a, b) = (DenseMatrix::identity(2), Rhs(vec![3.0, 4.0]));
        let o = oracle_from_dense(&a, &b).unwrap();
        let r = solve(&o, &SolverConfig::with_seed(1)).unwrap();
        recomb::io::ReportRecord::from_report(&r, true)
    };
    let back = recomb::io::ReportRecord::from_json(&record.to_json()).map_err(|e| e.to_string())?;
    ensure!(back == record, "report round trip changed fields");
    ensure!(
        record.status == "solved",
        "identity report status {}",
        record.status
    );
    Ok(
        "6 well-formed fixtures parsed, 6 malformed rejected with line numbers, report round trip"
            .into(),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("rec exactness", rec_exactness),
        ("feasibility ladder", feasibility_ladder),
        ("probability-one proxy", probability_one_proxy),
        ("oracle agreement", oracle_agreement),
        ("flop scaling", flop_scaling),
        ("flop crossover", crossover),
        ("parallel determinism", parallel_determinism),
        ("partial-solution contract", partial_contract),
        ("underdetermined systems", underdetermined),
        ("complex scalars", complex_instantiation),
        ("I/O conformance", io_conformance),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail} ({secs:.1} s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {why} ({secs:.1} s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
