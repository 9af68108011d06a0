use crate::flops::FlopCounter;
use crate::scalar::{dist2, norm2, Scalar};

/// Spread beyond which a pair is pulled back together.
pub const SPREAD_LIMIT: f64 = 1e6;
/// Contraction factor used when a pair is too far apart.
pub const CONTRACT_C: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub enum GuardAction<S> {
    /// Use the pair as is.
    Keep,
    /// Recombine with this replacement for the second iterate.
    Respread(Vec<S>),
    /// The two iterates coincide; the pair cannot be used.
    Unusable,
}

/// Pair degeneracy check.
///
/// A pair closer than `threshold * max(|v_i|, |v_j|, 1)` has `v_j` pushed
/// out to `v_i + c (v_j - v_i)`; a pair farther apart than
/// `SPREAD_LIMIT * max(|v_i|, 1)` is contracted with `c = 0.5`. Either way
/// the replacement is an affine combination of the pair, so it satisfies
/// every equation both iterates satisfy.
pub fn degeneracy_guard<S: Scalar>(
    vi: &[S],
    vj: &[S],
    threshold: f64,
    respread_c: f64,
    counter: &mut FlopCounter,
) -> GuardAction<S> {
    let dist = dist2(vi, vj);
    if dist == 0.0 {
        return GuardAction::Unusable;
    }
    let ni = norm2(vi);
    let c = if dist < threshold * ni.max(norm2(vj)).max(1.0) {
        respread_c
    } else if dist > SPREAD_LIMIT * ni.max(1.0) {
        CONTRACT_C
    } else {
        return GuardAction::Keep;
    };

    let n = vi.len() as u64;
    counter.add(2 * n);
    counter.mul(n);
    let c = S::from_real(c);
    GuardAction::Respread(vi.iter().zip(vj).map(|(&a, &b)| a + c * (b - a)).collect())
}
