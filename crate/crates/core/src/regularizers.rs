//! Lipschitz-enforcement strategies and penalty-point sampling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::MlpParams;
use crate::numerics::{Matrix, RngState};

/// Pairs closer than this are skipped by the ratio penalty.
pub const EPS_DIST: f64 = 1e-8;

pub const DEFAULT_NOISE_SIGMA: f64 = 0.2;

/// How the critic is kept (approximately) 1-Lipschitz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RegularizerSpec {
    None,
    WeightClip {
        c_max: f64,
    },
    /// Two-sided gradient penalty `(‖∇f‖ − 1)²`.
    Gp {
        lambda: f64,
    },
    /// One-sided gradient penalty `max(0, ‖∇f‖ − 1)²`.
    Lp {
        lambda: f64,
    },
    /// Difference-quotient penalty on coupled batch pairs with metric `‖x−y‖^p`.
    Ratio {
        lambda: f64,
        p: u32,
        #[serde(default = "default_true")]
        one_sided: bool,
    },
}

fn default_true() -> bool {
    true
}

impl RegularizerSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RegularizerSpec::None => Ok(()),
            RegularizerSpec::WeightClip { c_max } => {
                if c_max > 0.0 && c_max.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("c_max must be > 0, got {c_max}")))
                }
            }
            RegularizerSpec::Gp { lambda } | RegularizerSpec::Lp { lambda } => check_lambda(lambda),
            RegularizerSpec::Ratio { lambda, p, .. } => {
                check_lambda(lambda)?;
                if p >= 1 {
                    Ok(())
                } else {
                    Err(Error::invalid("ratio penalty exponent p must be >= 1"))
                }
            }
        }
    }

    pub fn lambda(&self) -> f64 {
        match *self {
            RegularizerSpec::Gp { lambda }
            | RegularizerSpec::Lp { lambda }
            | RegularizerSpec::Ratio { lambda, .. } => lambda,
            RegularizerSpec::None | RegularizerSpec::WeightClip { .. } => 0.0,
        }
    }

    /// The gradient-norm penalty this spec applies, if any.
    pub fn grad_penalty(&self) -> Option<GradPenalty> {
        match self {
            RegularizerSpec::Gp { .. } => Some(GradPenalty::Gp),
            RegularizerSpec::Lp { .. } => Some(GradPenalty::Lp),
            _ => None,
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("lambda must be >= 0, got {lambda}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradPenalty {
    Gp,
    Lp,
}

/// Where the penalty points `x̂` come from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PerturbationScheme {
    /// `x̂ = t·x + (1−t)·y`, `t ~ U[0,1]` per row.
    Line,
    /// `x̂ = x + σ·N(0, I)`.
    NoiseReal { sigma: f64 },
    /// Even rows perturb the real point, odd rows the generated one.
    NoiseBoth { sigma: f64 },
}

impl Default for PerturbationScheme {
    fn default() -> Self {
        PerturbationScheme::Line
    }
}

impl PerturbationScheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PerturbationScheme::Line => Ok(()),
            PerturbationScheme::NoiseReal { sigma } | PerturbationScheme::NoiseBoth { sigma } => {
                if sigma > 0.0 && sigma.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("noise sigma must be > 0, got {sigma}")))
                }
            }
        }
    }
}

/// Draws one penalty point per row of `real`/`gen`.
pub fn sample_penalty_points(
    real: &Matrix,
    gen: &Matrix,
    scheme: PerturbationScheme,
    rng: &mut RngState,
) -> Result<Matrix> {
    if real.shape() != gen.shape() {
        return Err(Error::shape(
            "sample_penalty_points",
            format!("gen {}x{}", real.rows(), real.cols()),
            format!("{}x{}", gen.rows(), gen.cols()),
        ));
    }
    scheme.validate()?;
    match scheme {
        PerturbationScheme::Line => {
            let ts: Vec<f64> = (0..real.rows()).map(|_| rng.uniform()).collect();
            interpolate_rows(real, gen, &ts)
        }
        PerturbationScheme::NoiseReal { sigma } => {
            let noise = rng.normal_matrix(real.rows(), real.cols());
            Ok(Matrix::from_fn(real.rows(), real.cols(), |r, c| {
                real[(r, c)] + sigma * noise[(r, c)]
            }))
        }
        PerturbationScheme::NoiseBoth { sigma } => {
            let noise = rng.normal_matrix(real.rows(), real.cols());
            Ok(Matrix::from_fn(real.rows(), real.cols(), |r, c| {
                let base = if r % 2 == 0 { real[(r, c)] } else { gen[(r, c)] };
                base + sigma * noise[(r, c)]
            }))
        }
    }
}

/// Row-wise `t_i·real_i + (1−t_i)·gen_i`.
pub fn interpolate_rows(real: &Matrix, gen: &Matrix, ts: &[f64]) -> Result<Matrix> {
    if real.shape() != gen.shape() || ts.len() != real.rows() {
        return Err(Error::shape(
            "interpolate_rows",
            format!("{} rows in all inputs", real.rows()),
            format!("gen {} rows, {} weights", gen.rows(), ts.len()),
        ));
    }
    Ok(Matrix::from_fn(real.rows(), real.cols(), |r, c| {
        let t = ts[r];
        t * real[(r, c)] + (1.0 - t) * gen[(r, c)]
    }))
}

/// `(norm − 1)²` for GP, `max(0, norm − 1)²` for LP.
pub fn grad_norm_penalty(norm: f64, kind: GradPenalty) -> Result<f64> {
    if !(norm >= 0.0) {
        return Err(Error::invalid(format!("gradient norm must be >= 0, got {norm}")));
    }
    let excess = match kind {
        GradPenalty::Gp => norm - 1.0,
        GradPenalty::Lp => (norm - 1.0).max(0.0),
    };
    Ok(excess * excess)
}

/// d/dnorm of [`grad_norm_penalty`].
pub fn grad_norm_penalty_derivative(norm: f64, kind: GradPenalty) -> f64 {
    match kind {
        GradPenalty::Gp => 2.0 * (norm - 1.0),
        GradPenalty::Lp => 2.0 * (norm - 1.0).max(0.0),
    }
}

/// Penalty on the difference quotient `r = |f_x − f_y| / dist^p`.
///
/// Returns `None` for coincident pairs (`dist ≤ EPS_DIST`), which carry no
/// Lipschitz information.
pub fn ratio_penalty(f_x: f64, f_y: f64, dist: f64, p: u32, one_sided: bool) -> Option<f64> {
    ratio_penalty_with_slope(f_x, f_y, dist, p, one_sided).map(|(v, _)| v)
}

/// Penalty value and its derivative with respect to `f_x` (the derivative with
/// respect to `f_y` is the negation).
pub fn ratio_penalty_with_slope(f_x: f64, f_y: f64, dist: f64, p: u32, one_sided: bool) -> Option<(f64, f64)> {
    if !(dist > EPS_DIST) {
        return None;
    }
    let denom = dist.powi(p as i32);
    let diff = f_x - f_y;
    let r = diff.abs() / denom;
    let excess = if one_sided { (r - 1.0).max(0.0) } else { r - 1.0 };
    let sign = if diff > 0.0 {
        1.0
    } else if diff < 0.0 {
        -1.0
    } else {
        0.0
    };
    Some((excess * excess, 2.0 * excess * sign / denom))
}

/// Clamps every weight and bias into `[−c_max, c_max]`.
pub fn clip_weights(params: &MlpParams, c_max: f64) -> MlpParams {
    let mut out = params.clone();
    clip_weights_in_place(&mut out, c_max);
    out
}

pub fn clip_weights_in_place(params: &mut MlpParams, c_max: f64) {
    for v in params.values_mut() {
        *v = v.clamp(-c_max, c_max);
    }
}
