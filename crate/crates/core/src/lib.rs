//! Randomized recombination solver for full-row-rank linear systems
//! `A x = b` with `m <= n`.
//!
//! A set of random vectors is repeatedly recombined pairwise so that after
//! step `k` every vector satisfies the first `k` equations. The inner loop of
//! each step is embarrassingly parallel and touches the matrix only through
//! row actions, so the solver also works matrix-free via [`linop::RowOracle`].

// `!(x <= tol)` is used on purpose so that NaN counts as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod flops;
pub mod io;
pub mod linop;
pub mod oracle;
pub mod randsrc;
pub mod rec;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use flops::FlopCounter;
pub use linop::{oracle_from_dense, residual_inf, DenseMatrix, DenseOracle, Rhs, RowOracle};
pub use oracle::{gauss_solve, EliminationResult};
pub use randsrc::{Distribution, RngState};
pub use rec::{recombine, RecOutcome};
pub use scalar::Scalar;
pub use solver::{
    solve, solve_observed, IterateSet, PairStrategy, SolveReport, SolverConfig, Status,
};
