//! Pair schedules: which two iterates feed each recombination slot.
//!
//! Indices are zero-based and every pair is stored as `(i, j)` with `i < j`.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::randsrc::RngState;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairStrategy {
    /// Spanning tree over the affinely independent core, anchored at the two
    /// iterates that best separate the current row, plus low-amplification
    /// extra pairs for the remaining slots.
    #[default]
    Anchored,
    /// Pairs drawn uniformly from all unordered pairs.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSchedule {
    pairs: Vec<(usize, usize)>,
}

impl PairSchedule {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn get(&self, slot: usize) -> (usize, usize) {
        self.pairs[slot]
    }
}

#[inline]
fn ordered(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

/// Uniformly random unordered pair of distinct indices below `l`.
pub fn random_pair(rng: &mut RngState, l: usize) -> (usize, usize) {
    debug_assert!(l >= 2);
    let i = rng.random_range(0..l);
    let mut j = rng.random_range(0..l - 1);
    if j >= i {
        j += 1;
    }
    ordered(i, j)
}

fn all_pairs(l: usize) -> Vec<(usize, usize)> {
    (0..l)
        .flat_map(|i| (i + 1..l).map(move |j| (i, j)))
        .collect()
}

/// `count` pairs drawn uniformly without replacement from the `l (l-1) / 2`
/// unordered pairs. Once every pair has been used, the remainder is drawn
/// with replacement.
pub fn choose_pairs(rng: &mut RngState, l: usize, count: usize) -> PairSchedule {
    assert!(l >= 2, "need at least two iterates to form a pair");
    let total = l * (l - 1) / 2;
    let mut pairs = Vec::with_capacity(count);
    if 2 * count <= total {
        let mut seen = HashSet::with_capacity(count);
        while pairs.len() < count {
            let p = random_pair(rng, l);
            if seen.insert(p) {
                pairs.push(p);
            }
        }
    } else {
        let mut every = all_pairs(l);
        every.shuffle(rng);
        every.truncate(count);
        pairs = every;
        while pairs.len() < count {
            pairs.push(random_pair(rng, l));
        }
    }
    PairSchedule { pairs }
}

/// Worst-case growth `|t| + |1 - t|` of a recombination of iterates whose
/// row actions are `s_i`, `s_j`, targeting `beta`. Equals 1 exactly when the
/// target lies between the two actions.
pub fn amplification<S: Scalar>(s_i: S, s_j: S, beta: S) -> f64 {
    let d = (s_i - s_j).magnitude();
    if d == 0.0 {
        return f64::INFINITY;
    }
    ((beta - s_i).magnitude() + (beta - s_j).magnitude()) / d
}

const EXTRA_CANDIDATES: usize = 4;

/// Schedule that keeps the iterate set well conditioned.
///
/// `actions[i]` is the current row's action on iterate `i` for the first
/// `core` iterates, which must be affinely independent. The first
/// `core - 1` slots form a spanning tree of the core: the edge between the
/// two anchors (the iterate farthest from the target and the one farthest
/// from it), then every other core iterate joined to whichever anchor gives
/// the smaller amplification. A spanning tree keeps the new core affinely
/// independent. Remaining slots take the best of a few random unused core
/// pairs.
pub fn anchored_pairs<S: Scalar>(
    actions: &[S],
    beta: S,
    core: usize,
    count: usize,
    rng: &mut RngState,
) -> PairSchedule {
    assert!(
        core >= 2 && core <= actions.len(),
        "core of {core} iterates"
    );
    let s = &actions[..core];
    let far = argmax(core, |i| (s[i] - beta).magnitude(), None);
    let other = argmax(core, |i| (s[i] - s[far]).magnitude(), Some(far));

    let mut pairs = Vec::with_capacity(count);
    pairs.push(ordered(far, other));
    for i in (0..core).filter(|&i| i != far && i != other) {
        let via_far = amplification(s[i], s[far], beta);
        let via_other = amplification(s[i], s[other], beta);
        let anchor = if via_other < via_far { other } else { far };
        pairs.push(ordered(i, anchor));
    }
    pairs.truncate(count);

    let total = core * (core - 1) / 2;
    let mut used: HashSet<(usize, usize)> = pairs.iter().copied().collect();
    while pairs.len() < count {
        let exhausted = used.len() >= total;
        let mut best: Option<((usize, usize), f64)> = None;
        let mut draws = 0;
        while draws < EXTRA_CANDIDATES || best.is_none() {
            draws += 1;
            let p = random_pair(rng, core);
            if !exhausted && used.contains(&p) {
                continue;
            }
            let g = amplification(s[p.0], s[p.1], beta);
            if best.is_none_or(|(_, bg)| g < bg) {
                best = Some((p, g));
            }
        }
        let (p, _) = best.expect("candidate drawn");
        used.insert(p);
        pairs.push(p);
    }
    PairSchedule { pairs }
}

fn argmax(len: usize, key: impl Fn(usize) -> f64, skip: Option<usize>) -> usize {
    let mut best = usize::MAX;
    let mut best_key = f64::NEG_INFINITY;
    for i in (0..len).filter(|&i| Some(i) != skip) {
        let k = key(i);
        if best == usize::MAX || k > best_key {
            best = i;
            best_key = k;
        }
    }
    best
}
