//! Recombination: the point on the line through `u` and `v` where a linear
//! functional takes a prescribed value.
//!
//! With `s_u = a(u)` and `s_v = a(v)`, the result is
//! `z = t u + (1 - t) v` with `t = (beta - s_v) / (s_u - s_v)`, so that
//! `a(z) = beta`. Since `z` is an affine combination of `u` and `v`, it
//! stays in every affine subspace that contains both inputs.

use crate::error::{Error, Result};
use crate::flops::{counted_lincomb, FlopCounter};
use crate::scalar::Scalar;

/// Relative threshold below which `|a(u) - a(v)|` counts as zero.
pub const DEFAULT_REC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum RecOutcome<S> {
    Success {
        z: Vec<S>,
        t: S,
    },
    /// The functional does not separate the two inputs.
    Degenerate {
        denominator_magnitude: f64,
    },
}

impl<S> RecOutcome<S> {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, RecOutcome::Degenerate { .. })
    }
}

/// Degeneracy test `|d| <= tol * max(|s_u|, |s_v|, MIN_POSITIVE)`.
#[inline]
pub fn is_degenerate_denominator(s_u: f64, s_v: f64, denominator: f64, tol: f64) -> bool {
    denominator <= tol * s_u.max(s_v).max(f64::MIN_POSITIVE)
}

/// Recombines `u` and `v` against the functional `a_action` and target
/// `beta`. `a_action` is evaluated exactly twice.
pub fn recombine<S, F>(
    u: &[S],
    v: &[S],
    mut a_action: F,
    beta: S,
    tol: f64,
    counter: &mut FlopCounter,
) -> Result<RecOutcome<S>>
where
    S: Scalar,
    F: FnMut(&[S], &mut FlopCounter) -> S,
{
    if u.len() != v.len() {
        return Err(Error::Dimension(format!(
            "recombination inputs have lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    if !(tol >= 0.0) {
        return Err(Error::Config(format!(
            "rec tolerance must be >= 0, got {tol}"
        )));
    }

    let s_u = a_action(u, counter);
    let s_v = a_action(v, counter);
    let denominator = s_u - s_v;
    counter.add(1);
    let d = denominator.magnitude();
    if is_degenerate_denominator(s_u.magnitude(), s_v.magnitude(), d, tol) {
        return Ok(RecOutcome::Degenerate {
            denominator_magnitude: d,
        });
    }

    let t = (beta - s_v) / denominator;
    let one_minus_t = S::one() - t;
    counter.add(2);
    counter.div(1);
    let z = counted_lincomb(t, u, one_minus_t, v, counter);
    Ok(RecOutcome::Success { z, t })
}
