//! Gaussian elimination with partial pivoting: the classical baseline and
//! ground truth for square systems.

use crate::error::{Error, Result};
use crate::flops::FlopCounter;
use crate::linop::{DenseMatrix, Rhs};
use crate::scalar::{Scalar, UNIT_ROUNDOFF};

#[derive(Debug, Clone)]
pub struct EliminationResult<S> {
    pub solution: Vec<S>,
    /// `max |U_ij| / max |A_ij|`.
    pub pivot_growth: f64,
    /// Raw flops, about `2/3 n^3`. The multiply-add convention
    /// (`flops.multiply_add_pairs()`) gives about `1/3 n^3`.
    pub flops: FlopCounter,
}

/// Solves the square system `A x = b`.
///
/// A pivot with `|p| <= n * eps * |A[:, j]|_inf` (column of the input
/// matrix) is treated as zero and reported as singular.
pub fn gauss_solve<S: Scalar>(
    matrix: &DenseMatrix<S>,
    rhs: &Rhs<S>,
) -> Result<EliminationResult<S>> {
    let n = matrix.rows();
    if !matrix.is_square() {
        return Err(Error::Dimension(format!(
            "elimination needs a square matrix, got {}x{}",
            n,
            matrix.cols()
        )));
    }
    if rhs.len() != n {
        return Err(Error::Dimension(format!(
            "matrix has {n} rows but right-hand side has {} entries",
            rhs.len()
        )));
    }

    let col_norms: Vec<f64> = (0..n)
        .map(|j| (0..n).fold(0.0_f64, |acc, i| acc.max(matrix.get(i, j).magnitude())))
        .collect();
    let max_entry = col_norms.iter().copied().fold(0.0, f64::max);

    let mut a: Vec<Vec<S>> = (0..n).map(|i| matrix.row(i).to_vec()).collect();
    let mut b = rhs.0.clone();
    let mut flops = FlopCounter::new();
    let mut max_u = max_entry;

    for k in 0..n {
        let (p, pivot_mag) =
            (k..n)
                .map(|i| (i, a[i][k].magnitude()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if pivot_mag <= n as f64 * UNIT_ROUNDOFF * col_norms[k] {
            return Err(Error::Singular { column: k });
        }
        a.swap(k, p);
        b.swap(k, p);

        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let pivot = pivot_row[k];
        for (r, row) in bottom.iter_mut().enumerate() {
            let i = k + 1 + r;
            let l = row[k] / pivot;
            flops.div(1);
            row[k] = S::zero();
            for j in k + 1..n {
                row[j] -= l * pivot_row[j];
                max_u = max_u.max(row[j].magnitude());
            }
            let w = (n - k - 1) as u64;
            flops.mul(w);
            flops.add(w);
            let bk = b[k];
            b[i] -= l * bk;
            flops.mul(1);
            flops.add(1);
        }
    }

    let mut x = vec![S::zero(); n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in i + 1..n {
            acc -= a[i][j] * x[j];
        }
        let w = (n - i - 1) as u64;
        flops.mul(w);
        flops.add(w);
        x[i] = acc / a[i][i];
        flops.div(1);
    }

    let pivot_growth = if max_entry > 0.0 {
        max_u / max_entry
    } else {
        1.0
    };
    Ok(EliminationResult {
        solution: x,
        pivot_growth,
        flops,
    })
}

/// Exact raw flop count of [`gauss_solve`] on an `n x n` system.
pub fn gauss_flops(n: u64) -> u64 {
    // elimination: n(n-1)/2 divides, sum (n-k-1)(n-k) mul+add pairs
    // back substitution: n(n-1)/2 mul+add pairs, n divides
    let pairs_elim: u64 = (0..n).map(|k| (n - k - 1) * (n - k)).sum();
    let pairs_back = n * n.saturating_sub(1) / 2;
    let divs = n * n.saturating_sub(1) / 2 + n;
    2 * (pairs_elim + pairs_back) + divs
}
