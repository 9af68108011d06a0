//! Deterministic floating-point operation counting.
//!
//! Counting happens inside the arithmetic kernels below; comparisons and
//! magnitude tests are never counted. One flop is one field operation
//! (a complex multiply counts as one multiply).

use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlopCounter {
    pub adds: u64,
    pub muls: u64,
    pub divs: u64,
}

impl FlopCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn total(&self) -> u64 {
        self.adds + self.muls + self.divs
    }

    /// Operation count in the multiply-add convention, where a multiply and
    /// its paired add count as one operation.
    pub fn multiply_add_pairs(&self) -> u64 {
        self.muls + self.divs
    }

    #[inline]
    pub fn add(&mut self, n: u64) {
        self.adds += n;
    }

    #[inline]
    pub fn mul(&mut self, n: u64) {
        self.muls += n;
    }

    #[inline]
    pub fn div(&mut self, n: u64) {
        self.divs += n;
    }
}

impl AddAssign for FlopCounter {
    fn add_assign(&mut self, rhs: Self) {
        self.adds += rhs.adds;
        self.muls += rhs.muls;
        self.divs += rhs.divs;
    }
}

impl std::iter::Sum for FlopCounter {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(FlopCounter::default(), |mut acc, c| {
            acc += c;
            acc
        })
    }
}

/// Inner product `sum conj(u_i) * v_i`.
pub fn counted_dot<S: Scalar>(u: &[S], v: &[S], counter: &mut FlopCounter) -> S {
    debug_assert_eq!(u.len(), v.len());
    tally_reduction(u.len(), counter);
    u.iter()
        .zip(v)
        .fold(S::zero(), |acc, (&a, &b)| acc + a.conj() * b)
}

/// Row action `sum a_i * v_i` without conjugation: this is how a row of `A`
/// acts on a vector in `A x = b`.
pub fn counted_action<S: Scalar>(row: &[S], v: &[S], counter: &mut FlopCounter) -> S {
    debug_assert_eq!(row.len(), v.len());
    tally_reduction(row.len(), counter);
    row.iter()
        .zip(v)
        .fold(S::zero(), |acc, (&a, &b)| acc + a * b)
}

// n products and n - 1 additions; the leading `0 + x` is not arithmetic.
fn tally_reduction(n: usize, counter: &mut FlopCounter) {
    if n > 0 {
        counter.mul(n as u64);
        counter.add(n as u64 - 1);
    }
}

/// `alpha * u + beta * v`, written into a fresh vector.
pub fn counted_lincomb<S: Scalar>(
    alpha: S,
    u: &[S],
    beta: S,
    v: &[S],
    counter: &mut FlopCounter,
) -> Vec<S> {
    debug_assert_eq!(u.len(), v.len());
    let n = u.len() as u64;
    counter.mul(2 * n);
    counter.add(n);
    u.iter()
        .zip(v)
        .map(|(&a, &b)| alpha * a + beta * b)
        .collect()
}
