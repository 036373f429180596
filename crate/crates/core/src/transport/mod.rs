//! Optimal-transport computations: assignment-based EMD between point sets,
//! Kantorovich duality checks on finite configurations, and 1-D oracles.

mod duality;
mod hungarian;

pub use duality::{duality_report, Coupling, CriticAssignment, DualityFixture, DualityReport, FEASIBILITY_TOL};
pub use hungarian::{brute_force_assignment, hungarian, Assignment, BRUTE_FORCE_MAX_N};

use crate::error::{Error, Result};
use crate::numerics::{dot, euclidean_distance, Matrix};

/// Pairwise Euclidean distances between the rows of `a` and `b`.
pub fn euclidean_cost(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols() != b.cols() {
        return Err(Error::shape(
            "euclidean_cost",
            format!("{}-dimensional points", a.cols()),
            format!("{}-dimensional points", b.cols()),
        ));
    }
    Ok(Matrix::from_fn(a.rows(), b.rows(), |i, j| euclidean_distance(a.row(i), b.row(j))))
}

fn check_equal_sets(a: &Matrix, b: &Matrix, op: &'static str) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::shape(
            op,
            format!("{}x{} point sets", a.rows(), a.cols()),
            format!("{}x{}", b.rows(), b.cols()),
        ));
    }
    if a.rows() == 0 {
        return Err(Error::invalid(format!("{op}: point sets must be non-empty")));
    }
    Ok(())
}

/// W₁ between the uniform empirical measures on the rows of `a` and `b`:
/// the minimum assignment cost divided by `n`.
pub fn emd_empirical(a: &Matrix, b: &Matrix) -> Result<f64> {
    check_equal_sets(a, b, "emd_empirical")?;
    let cost = euclidean_cost(a, b)?;
    Ok(hungarian(&cost)?.total / a.rows() as f64)
}

/// Same quantity as [`emd_empirical`] by enumerating every permutation.
pub fn brute_force_emd(a: &Matrix, b: &Matrix) -> Result<f64> {
    check_equal_sets(a, b, "brute_force_emd")?;
    let cost = euclidean_cost(a, b)?;
    Ok(brute_force_assignment(&cost)?.total / a.rows() as f64)
}

/// W₁ between two densities tabulated on a common increasing grid, as the
/// trapezoidal integral of `|F_a − F_b|`.
pub fn w1_1d_cdf(grid: &[f64], density_a: &[f64], density_b: &[f64]) -> Result<f64> {
    if grid.len() < 2 || density_a.len() != grid.len() || density_b.len() != grid.len() {
        return Err(Error::shape(
            "w1_1d_cdf",
            format!("{} density values on a grid of >= 2 nodes", grid.len()),
            format!("{} and {}", density_a.len(), density_b.len()),
        ));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("w1_1d_cdf grid must be strictly increasing"));
    }
    if density_a.iter().chain(density_b).any(|d| !(d.is_finite() && *d >= 0.0)) {
        return Err(Error::invalid("densities must be finite and non-negative"));
    }
    let cdf_a = cumulative_trapezoid(grid, density_a);
    let cdf_b = cumulative_trapezoid(grid, density_b);
    for (name, cdf) in [("a", &cdf_a), ("b", &cdf_b)] {
        let mass = cdf.last().copied().unwrap_or(0.0);
        if (mass - 1.0).abs() > 1e-6 {
            return Err(Error::invalid(format!(
                "density {name} integrates to {mass}, not 1 (tolerance 1e-6)"
            )));
        }
    }
    let gap: Vec<f64> = cdf_a.iter().zip(&cdf_b).map(|(a, b)| (a - b).abs()).collect();
    Ok(trapezoid(grid, &gap))
}

/// Trapezoidal rule.
pub fn trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    grid.windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

fn cumulative_trapezoid(grid: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    out.push(0.0);
    for (x, y) in grid.windows(2).zip(values.windows(2)) {
        acc += 0.5 * (x[1] - x[0]) * (y[0] + y[1]);
        out.push(acc);
    }
    out
}

/// Smallest ‖g‖ such that `g·v = g·v′ = 1`, i.e. the least gradient norm a
/// differentiable critic needs to have unit slope along two unit directions.
///
/// `g` is found in `span{v, v′}` by solving the 2x2 Gram system.
pub fn min_gradient_norm_two_directions(v: &[f64], v_prime: &[f64]) -> Result<f64> {
    if v.len() != v_prime.len() || v.is_empty() {
        return Err(Error::shape(
            "min_gradient_norm_two_directions",
            "two non-empty vectors of equal dimension",
            format!("{} and {}", v.len(), v_prime.len()),
        ));
    }
    for (name, d) in [("v", v), ("v'", v_prime)] {
        let n = dot(d, d).sqrt();
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("{name} must have unit length, has {n}")));
        }
    }
    let c = dot(v, v_prime);
    if c <= -1.0 + 1e-9 {
        return Err(Error::invalid(
            "antipodal directions: no gradient has unit slope along both",
        ));
    }
    // Gram matrix [[1, c], [c, 1]]; for parallel directions g = v.
    let det = 1.0 - c * c;
    if det <= 1e-15 {
        return Ok(1.0);
    }
    let alpha = (1.0 - c) / det;
    let beta = (1.0 - c) / det;
    let g: Vec<f64> = v.iter().zip(v_prime).map(|(a, b)| alpha * a + beta * b).collect();
    Ok(dot(&g, &g).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(values: &[f64]) -> Matrix {
        Matrix::column(values).unwrap()
    }

    #[test]
    fn emd_identity_and_shift() {
        let a = pts(&[0.0, 2.0]);
        assert_eq!(emd_empirical(&a, &a).unwrap(), 0.0);
        assert!((emd_empirical(&a, &pts(&[1.0, 3.0])).unwrap() - 1.0).abs() < 1e-12);
        assert!((brute_force_emd(&a, &pts(&[1.0, 3.0])).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn emd_size_mismatch() {
        assert!(emd_empirical(&pts(&[0.0, 1.0]), &pts(&[0.0])).is_err());
        assert!(emd_empirical(&Matrix::zeros(0, 2), &Matrix::zeros(0, 2)).is_err());
    }

    #[test]
    fn seven_unit_moves() {
        // Seven real points, each with a generated partner at distance one.
        let real = Matrix::from_fn(7, 2, |r, c| if c == 0 { 3.0 * r as f64 } else { 0.0 });
        let gen = Matrix::from_fn(7, 2, |r, c| if c == 0 { 3.0 * r as f64 + 1.0 } else { 0.0 });
        assert!((emd_empirical(&real, &gen).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_pair_brute_force() {
        let a = Matrix::from_rows(&[[0.0, 0.0]]).unwrap();
        let b = Matrix::from_rows(&[[3.0, 4.0]]).unwrap();
        assert_eq!(brute_force_emd(&a, &b).unwrap(), 5.0);
    }

    #[test]
    fn w1_identical_densities() {
        let grid: Vec<f64> = (0..=1000).map(|i| -5.0 + 0.01 * i as f64).collect();
        let d: Vec<f64> = grid.iter().map(|x| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()).collect();
        assert!(w1_1d_cdf(&grid, &d, &d).unwrap().abs() < 1e-15);
    }

    #[test]
    fn w1_rejects_unnormalized() {
        let grid = [0.0, 1.0, 2.0];
        assert!(w1_1d_cdf(&grid, &[1.0, 1.0, 1.0], &[0.5, 0.5, 0.5]).is_err());
        assert!(w1_1d_cdf(&grid, &[0.5, 0.5, 0.5], &[0.5, 0.5]).is_err());
        assert!(w1_1d_cdf(&grid, &[0.5, -0.5, 1.5], &[0.5, 0.5, 0.5]).is_err());
    }

    #[test]
    fn two_direction_bound() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((min_gradient_norm_two_directions(&[1.0, 0.0], &[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((min_gradient_norm_two_directions(&[1.0, 0.0], &[0.0, 1.0]).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let v2 = [-0.5, 3f64.sqrt() / 2.0];
        assert!((min_gradient_norm_two_directions(&[1.0, 0.0], &v2).unwrap() - 2.0).abs() < 1e-12);
        assert!(min_gradient_norm_two_directions(&[s, s], &[-s, -s]).is_err());
        assert!(min_gradient_norm_two_directions(&[2.0, 0.0], &[1.0, 0.0]).is_err());
    }
}
