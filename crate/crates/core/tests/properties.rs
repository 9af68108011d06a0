use proptest::prelude::*;

use recomb::cli::{bench_rows, loglog_slope, random_system, series, BenchPlan};
use recomb::linop::{oracle_from_dense, RowOracle};
use recomb::solver::{feas_tol, solve, SolverConfig};

#[test]
fn flops_for_n10_m10_fall_in_band() {
    let (a, b) = random_system::<f64>(10, 10, None, 1).unwrap();
    let o = oracle_from_dense(&a, &b).unwrap();
    let r = solve(&o, &SolverConfig::with_seed(1)).unwrap();
    assert_eq!(r.iterates.len(), 11);
    let total = r.flops.total();
    // per step: probe the n+2-k core iterates (2n-1 flops each), then
    // 11 recombinations of 7n+2 flops
    let (n, m, l) = (10u64, 10u64, 11u64);
    let probes: u64 = (1..=m).map(|k| (n + 2 - k) * (2 * n - 1)).sum();
    assert_eq!(total, m * l * (7 * n + 2) + probes);
    assert_eq!(total, 9_155);
    assert!((7_000..=20_000).contains(&total));
}

#[test]
fn strict_and_default_flops_agree() {
    for seed in 0..20 {
        let (a, b) = random_system::<f64>(24, 24, None, seed).unwrap();
        let o = oracle_from_dense(&a, &b).unwrap();
        let d = solve(&o, &SolverConfig::with_seed(seed)).unwrap();
        let s = solve(&o, &SolverConfig::strict_paper(seed)).unwrap();
        let (d, s) = (d.flops.total() as f64, s.flops.total() as f64);
        assert!((d - s).abs() <= 0.01 * d, "seed {seed}: {d} vs {s}");
    }
}

#[test]
fn critical_path_grows_quadratically() {
    let plan = BenchPlan {
        sizes: vec![32, 64, 128],
        ..BenchPlan::default()
    };
    let rows = bench_rows(&plan).unwrap();
    let rec = |r: &recomb::cli::BenchRow| r.solver == "recombination";
    let depth = loglog_slope(&series(&rows, rec, |r| r.depth_flops as f64)).unwrap();
    assert!((depth - 2.0).abs() <= 0.15, "{depth}");
    let gauss = loglog_slope(&series(
        &rows,
        |r| r.solver == "elimination",
        |r| r.flops as f64,
    ))
    .unwrap();
    assert!((gauss - 3.0).abs() <= 0.1, "{gauss}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outputs_satisfy_every_row(n in 1usize..24, frac in 0.0f64..1.0, seed in any::<u64>(), reduced in any::<bool>()) {
        let m = 1 + ((n - 1) as f64 * frac) as usize;
        let (a, b) = random_system::<f64>(m, n, None, seed).unwrap();
        let o = oracle_from_dense(&a, &b).unwrap();
        let config = SolverConfig { reduced_updates: reduced, ..SolverConfig::with_seed(seed) };
        let r = solve(&o, &config).unwrap();
        prop_assert!(r.is_solved());
        let tol = feas_tol(m, b.norm_inf());
        for v in r.iterates.vectors() {
            prop_assert!(o.row_residuals(v).iter().all(|&x| x <= tol));
        }
    }

    #[test]
    fn repeated_runs_are_identical(n in 2usize..16, seed in any::<u64>(), workers in 1usize..5) {
        let (a, b) = random_system::<f64>(n, n, None, seed).unwrap();
        let o = oracle_from_dense(&a, &b).unwrap();
        let first = solve(&o, &SolverConfig::with_seed(seed)).unwrap();
        let again = solve(&o, &SolverConfig { workers, ..SolverConfig::with_seed(seed) }).unwrap();
        prop_assert_eq!(first.iterates.fingerprint(), again.iterates.fingerprint());
        prop_assert_eq!(first.flops, again.flops);
    }
}

#[test]
fn gaussian_20x20_matches_elimination() {
    use recomb::linop::{residual_inf, DenseMatrix, Rhs};
    use recomb::oracle::gauss_solve;
    use recomb::randsrc::RngState;
    use recomb::scalar::Scalar;

    let mut rng = RngState::new(99);
    let data: Vec<f64> = (0..400).map(|_| f64::sample_gaussian(&mut rng, 0.0, 1.0)).collect();
    let a = DenseMatrix::from_row_major(20, 20, data).unwrap();
    let b = Rhs(a.mul_vec(&[1.0; 20]).unwrap());
    let x = gauss_solve(&a, &b).unwrap().solution;
    let o = oracle_from_dense(&a, &b).unwrap();
    let r = solve(&o, &SolverConfig::with_seed(99)).unwrap();
    assert!(r.is_solved());
    for v in r.iterates.vectors() {
        assert!(residual_inf(&a, &b, v).unwrap() <= 1e-8 * b.norm_inf());
        let d = v.iter().zip(&x).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(d <= 1e-6 * recomb::scalar::norm_inf(&x));
    }
}
