//! Dense linear algebra and seeded randomness shared by every other module.

mod matrix;
pub mod rng;

pub use matrix::{dot, euclidean_distance, matmul, matmul_nt, matmul_tn, norm, Matrix};
pub use rng::RngState;

use crate::error::{Error, Result};

/// Iteration cap for [`spectral_norm`].
pub const SPECTRAL_MAX_ITERS: usize = 10_000;

/// Largest singular value of `a` by power iteration on `aᵀa`.
///
/// Starts from the normalized all-ones vector. If that vector lies in the null
/// space of `a`, the standard basis vectors are tried in order.
pub fn spectral_norm(a: &Matrix, tol: f64) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::invalid("spectral_norm of an empty matrix"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("spectral_norm tolerance must be > 0, got {tol}")));
    }
    let n = a.cols();
    let start = std::iter::once(vec![1.0 / (n as f64).sqrt(); n]).chain((0..n).map(|k| {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        e
    }));

    for v0 in start {
        let mut v = v0;
        let mut w = gram_apply(a, &v);
        let mut w_norm = norm(&w);
        if w_norm == 0.0 {
            continue;
        }
        let mut sigma = rayleigh_sigma(&v, &w);
        for _ in 0..SPECTRAL_MAX_ITERS {
            v = w.iter().map(|x| x / w_norm).collect();
            w = gram_apply(a, &v);
            w_norm = norm(&w);
            let next = rayleigh_sigma(&v, &w);
            if (next - sigma).abs() <= tol * next {
                return Ok(next);
            }
            sigma = next;
        }
        return Err(Error::NotConverged {
            iterations: SPECTRAL_MAX_ITERS,
            estimate: sigma,
        });
    }
    // Every basis vector is annihilated: a is the zero matrix.
    Ok(0.0)
}

// aᵀ(a v)
fn gram_apply(a: &Matrix, v: &[f64]) -> Vec<f64> {
    let av: Vec<f64> = a.row_iter().map(|r| dot(r, v)).collect();
    let mut out = vec![0.0; a.cols()];
    for (row, &s) in a.row_iter().zip(&av) {
        for (o, &x) in out.iter_mut().zip(row) {
            *o += x * s;
        }
    }
    out
}

// sqrt(vᵀ aᵀa v) for unit v.
fn rayleigh_sigma(v: &[f64], w: &[f64]) -> f64 {
    dot(v, w).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal() {
        let a = Matrix::from_rows(&[[3.0, 0.0], [0.0, -5.0]]).unwrap();
        assert!((spectral_norm(&a, 1e-12).unwrap() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn all_ones_rank_one() {
        for (m, n) in [(1, 1), (3, 4), (7, 2)] {
            let a = Matrix::filled(m, n, 1.0);
            let expected = ((m * n) as f64).sqrt();
            assert!((spectral_norm(&a, 1e-12).unwrap() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn start_vector_in_null_space() {
        // The all-ones start is annihilated by [1, -1].
        let a = Matrix::from_rows(&[[1.0, -1.0]]).unwrap();
        assert!((spectral_norm(&a, 1e-12).unwrap() - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(spectral_norm(&Matrix::zeros(2, 3), 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_tolerance_and_empty() {
        assert!(spectral_norm(&Matrix::zeros(0, 0), 1e-9).is_err());
        assert!(spectral_norm(&Matrix::identity(2), 0.0).is_err());
    }
}
