//! Central finite differences, used by the `verify gradcheck` suite.

use crate::error::Result;
use crate::nn::{evaluate, MlpParams};
use crate::numerics::Matrix;

/// Step used for parameter `θ`: `1e-5 · max(1, |θ|)`.
pub fn fd_step(theta: f64) -> f64 {
    1e-5 * theta.abs().max(1.0)
}

/// Central-difference gradient of `loss` with respect to every parameter.
pub fn fd_param_gradient<F>(params: &MlpParams, mut loss: F) -> Result<Vec<f64>>
where
    F: FnMut(&MlpParams) -> Result<f64>,
{
    let base = params.to_flat();
    let mut probe = params.clone();
    let mut grad = Vec::with_capacity(base.len());
    let mut flat = base.clone();
    for i in 0..base.len() {
        let h = fd_step(base[i]);
        flat[i] = base[i] + h;
        probe.set_flat(&flat)?;
        let plus = loss(&probe)?;
        flat[i] = base[i] - h;
        probe.set_flat(&flat)?;
        let minus = loss(&probe)?;
        flat[i] = base[i];
        grad.push((plus - minus) / (2.0 * h));
    }
    Ok(grad)
}

/// Central-difference input gradient of a scalar network at each row of `x`.
pub fn fd_input_gradient(params: &MlpParams, x: &Matrix, h: f64) -> Result<Matrix> {
    let mut out = Matrix::zeros(x.rows(), x.cols());
    for r in 0..x.rows() {
        for c in 0..x.cols() {
            let mut plus = x.slice_rows(r, r + 1);
            let mut minus = plus.clone();
            plus[(0, c)] += h;
            minus[(0, c)] -= h;
            let fp = evaluate(params, &plus)?[(0, 0)];
            let fm = evaluate(params, &minus)?[(0, 0)];
            out[(r, c)] = (fp - fm) / (2.0 * h);
        }
    }
    Ok(out)
}

/// `|a − b| / max(|a|, |b|, floor)`; the floor keeps exact zeros comparable.
pub fn relative_error(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

/// Largest relative error over two equal-length slices, with its index.
pub fn max_relative_error(analytic: &[f64], numeric: &[f64], floor: f64) -> (f64, usize) {
    analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &n)| relative_error(a, n, floor))
        .enumerate()
        .fold((0.0, 0), |(best, bi), (i, e)| if e > best { (e, i) } else { (best, bi) })
}
