//! Lipschitz constants of weight-clipped ReLU networks.
//!
//! Clipping every weight to `[−c, c]` bounds each affine layer's operator norm
//! by `c·√(n_in·n_out)`, attained only by constant-magnitude sign patterns. The
//! product of these per-layer maxima is the common constant `ᾱ` of the
//! architecture; it is attained by networks whose first layer has constant
//! ±c columns and whose later layers are all `+c`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{evaluate, forward, input_gradient, Layer, MlpParams, MlpSpec};
use crate::numerics::{euclidean_distance, Matrix, RngState};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchSignature {
    /// `[n_0, ..., n_L]`.
    pub widths: Vec<usize>,
    pub c_max: f64,
}

impl ArchSignature {
    pub fn new(widths: Vec<usize>, c_max: f64) -> Result<Self> {
        let arch = ArchSignature { widths, c_max };
        arch.relu_spec()?;
        if !(c_max > 0.0 && c_max.is_finite()) {
            return Err(Error::invalid(format!("c_max must be > 0, got {c_max}")));
        }
        Ok(arch)
    }

    /// Plain-ReLU spec for this architecture.
    pub fn relu_spec(&self) -> Result<MlpSpec> {
        MlpSpec::new(self.widths.clone(), 0.0)
    }

    pub fn num_layers(&self) -> usize {
        self.widths.len() - 1
    }
}

/// `ᾱ = Π_i c_max·√(n_{i−1}·n_i)`.
pub fn alpha_bar(arch: &ArchSignature) -> f64 {
    arch.widths
        .windows(2)
        .map(|w| arch.c_max * ((w[0] * w[1]) as f64).sqrt())
        .product()
}

/// A network attaining `ᾱ` together with the pair of inputs that witnesses it.
#[derive(Clone, Debug)]
pub struct ExhaustingNet {
    pub params: MlpParams,
    pub witness_x: Vec<f64>,
    pub witness_y: Vec<f64>,
}

impl ExhaustingNet {
    /// `‖f(x*) − f(y*)‖ / ‖x* − y*‖`.
    pub fn witness_ratio(&self) -> Result<f64> {
        witness_ratio(&self.params, &self.witness_x, &self.witness_y)
    }
}

pub fn witness_ratio(params: &MlpParams, x: &[f64], y: &[f64]) -> Result<f64> {
    let batch = Matrix::from_rows(&[x, y])?;
    let out = evaluate(params, &batch)?;
    Ok(euclidean_distance(out.row(0), out.row(1)) / euclidean_distance(x, y))
}

/// First layer: column `k` is constant `signs[k]·c_max`; later layers: all
/// `c_max`; biases zero.
///
/// Witness `(x*, y*) = (s, 2s)` with `s = signs`: each coordinate of both
/// points and of their difference has the sign of its column, so every
/// first-layer unit sees `c_max·‖x‖₁ > 0`. All later pre-activations are then
/// positive too, no ReLU clips, and every layer meets its operator-norm bound
/// along the pair's direction.
pub fn construct_exhausting_params(arch: &ArchSignature, first_layer_signs: &[f64]) -> Result<ExhaustingNet> {
    let spec = arch.relu_spec()?;
    let n0 = arch.widths[0];
    if first_layer_signs.len() != n0 {
        return Err(Error::shape(
            "construct_exhausting_params",
            format!("{n0} signs"),
            format!("{}", first_layer_signs.len()),
        ));
    }
    if first_layer_signs.iter().any(|&s| s != 1.0 && s != -1.0) {
        return Err(Error::invalid("first-layer signs must be +1 or -1"));
    }
    let c = arch.c_max;
    let layers = arch
        .widths
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let (n_in, n_out) = (w[0], w[1]);
            let weight = if i == 0 {
                Matrix::from_fn(n_out, n_in, |_, k| first_layer_signs[k] * c)
            } else {
                Matrix::filled(n_out, n_in, c)
            };
            Layer {
                weight,
                bias: vec![0.0; n_out],
            }
        })
        .collect();
    let params = MlpParams::from_layers(spec, layers)?;
    Ok(ExhaustingNet {
        params,
        witness_x: first_layer_signs.to_vec(),
        witness_y: first_layer_signs.iter().map(|s| 2.0 * s).collect(),
    })
}

/// Weights and biases drawn uniformly from `[−c_max, c_max]`, ReLU activations.
pub fn random_clipped_params(arch: &ArchSignature, rng: &mut RngState) -> Result<MlpParams> {
    let spec = arch.relu_spec()?;
    let c = arch.c_max;
    let layers = arch
        .widths
        .windows(2)
        .map(|w| Layer {
            weight: Matrix::from_fn(w[1], w[0], |_, _| rng.uniform_range(-c, c)),
            bias: (0..w[1]).map(|_| rng.uniform_range(-c, c)).collect(),
        })
        .collect();
    MlpParams::from_layers(spec, layers)
}

/// Where [`empirical_lipschitz`] looks.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleRegion {
    /// Samples are uniform on `[lo, hi]^d`.
    pub lo: f64,
    pub hi: f64,
    /// Points always included, e.g. a known witness pair.
    pub extra_points: Vec<Vec<f64>>,
}

impl SampleRegion {
    pub fn cube(lo: f64, hi: f64) -> Self {
        SampleRegion {
            lo,
            hi,
            extra_points: Vec::new(),
        }
    }

    pub fn with_points(mut self, points: Vec<Vec<f64>>) -> Self {
        self.extra_points = points;
        self
    }
}

/// Sampled lower bound on the Lipschitz constant of a scalar network.
///
/// Takes the largest input-gradient norm over all points and the largest
/// difference quotient over pairs: all pairs of `extra_points`, plus
/// consecutive pairs `(2k, 2k+1)` of the random samples. Samples are drawn in
/// sequence, so more samples from the same seed never lower the estimate.
pub fn empirical_lipschitz(
    params: &MlpParams,
    region: &SampleRegion,
    n_samples: usize,
    rng: &mut RngState,
) -> Result<f64> {
    let d = params.spec().input_dim();
    if params.spec().output_dim() != 1 {
        return Err(Error::shape("empirical_lipschitz", "d_out = 1", format!("d_out = {}", params.spec().output_dim())));
    }
    if region.extra_points.iter().any(|p| p.len() != d) {
        return Err(Error::shape("empirical_lipschitz", format!("{d}-dimensional extra points"), "other"));
    }
    let n_extra = region.extra_points.len();
    let mut rows: Vec<Vec<f64>> = region.extra_points.clone();
    for _ in 0..n_samples {
        rows.push((0..d).map(|_| rng.uniform_range(region.lo, region.hi)).collect());
    }
    if rows.is_empty() {
        return Ok(0.0);
    }
    let x = Matrix::from_rows(&rows)?;
    let (values, trace) = forward(params, &x)?;
    let grad_max = input_gradient(params, &trace)?
        .row_norms()
        .into_iter()
        .fold(0.0, f64::max);

    let quotient = |p: usize, q: usize| {
        let dist = euclidean_distance(x.row(p), x.row(q));
        if dist > 0.0 {
            (values[(p, 0)] - values[(q, 0)]).abs() / dist
        } else {
            0.0
        }
    };
    let mut ratio_max: f64 = 0.0;
    for p in 0..n_extra {
        for q in p + 1..n_extra {
            ratio_max = ratio_max.max(quotient(p, q));
        }
    }
    for k in 0..n_samples / 2 {
        ratio_max = ratio_max.max(quotient(n_extra + 2 * k, n_extra + 2 * k + 1));
    }
    Ok(grad_max.max(ratio_max))
}
