use crate::scalar::Scalar;

/// The current candidate solutions.
///
/// After generation `k` every vector satisfies the first `k` equations up to
/// rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateSet<S> {
    dim: usize,
    vectors: Vec<Vec<S>>,
    generation: usize,
}

impl<S: Scalar> IterateSet<S> {
    pub fn new(dim: usize, vectors: Vec<Vec<S>>, generation: usize) -> Self {
        debug_assert!(vectors.iter().all(|v| v.len() == dim));
        Self {
            dim,
            vectors,
            generation,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn vector(&self, i: usize) -> &[S] {
        &self.vectors[i]
    }

    pub fn vectors(&self) -> &[Vec<S>] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<Vec<S>> {
        self.vectors
    }

    /// Bit patterns of every entry, for exact reproducibility checks.
    pub fn fingerprint(&self) -> Vec<u64> {
        self.vectors
            .iter()
            .flatten()
            .flat_map(|x| [x.re().to_bits(), x.im().to_bits()])
            .collect()
    }
}
