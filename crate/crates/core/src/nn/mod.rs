//! Feed-forward networks with Leaky-ReLU hidden layers and a linear output.
//!
//! Layer `i` maps `n_{i-1}` inputs to `n_i` outputs with weight `W_i`
//! (`n_i x n_{i-1}`) and bias `b_i`. Batches are row-major: one sample per row.
//!
//! Gradient-norm penalties are differentiated with the activation masks held
//! constant. For piecewise-linear activations this is the exact derivative
//! everywhere except on the measure-zero kink set.

pub mod gradcheck;
pub(crate) mod io;

pub use io::{read_params, write_params, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{matmul, matmul_nt, matmul_tn, Matrix, RngState};
use crate::regularizers::{grad_norm_penalty, grad_norm_penalty_derivative, GradPenalty};

/// Norms below this are treated as zero in penalty gradients.
pub const EPS_NORM: f64 = 1e-12;

pub const DEFAULT_LEAKY_SLOPE: f64 = 0.2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpSpec {
    /// `[d_in, h_1, ..., h_k, d_out]`.
    pub widths: Vec<usize>,
    /// Negative-side slope of the hidden activations; 0 is a plain ReLU.
    pub leaky_slope: f64,
}

impl MlpSpec {
    pub fn new(widths: Vec<usize>, leaky_slope: f64) -> Result<Self> {
        let spec = MlpSpec { widths, leaky_slope };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.widths.len() < 2 {
            return Err(Error::invalid(format!(
                "an MLP needs at least input and output widths, got {:?}",
                self.widths
            )));
        }
        if self.widths.iter().any(|&w| w == 0) {
            return Err(Error::invalid(format!("all widths must be >= 1, got {:?}", self.widths)));
        }
        if !(0.0..=1.0).contains(&self.leaky_slope) {
            return Err(Error::invalid(format!(
                "leaky_slope must lie in [0, 1], got {}",
                self.leaky_slope
            )));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.widths.last().expect("validated")
    }

    pub fn num_layers(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn num_params(&self) -> usize {
        self.widths.windows(2).map(|w| w[1] * w[0] + w[1]).sum()
    }
}

/// Weight and bias of one affine layer. Also used for gradients.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    /// `n_out x n_in`.
    pub weight: Matrix,
    pub bias: Vec<f64>,
}

impl Layer {
    fn zeros(n_out: usize, n_in: usize) -> Self {
        Layer {
            weight: Matrix::zeros(n_out, n_in),
            bias: vec![0.0; n_out],
        }
    }

    fn values(&self) -> impl Iterator<Item = &f64> {
        self.weight.as_slice().iter().chain(self.bias.iter())
    }

    fn values_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.weight.as_mut_slice().iter_mut().chain(self.bias.iter_mut())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MlpParams {
    spec: MlpSpec,
    layers: Vec<Layer>,
}

/// Per-parameter gradients, laid out like [`MlpParams`].
#[derive(Clone, Debug, PartialEq)]
pub struct ParamGrads {
    pub layers: Vec<Layer>,
}

/// Everything the backward passes need from one forward evaluation.
#[derive(Clone, Debug)]
pub struct ForwardTrace {
    /// `acts[0]` is the input batch, `acts[i]` the output of hidden layer `i`.
    acts: Vec<Matrix>,
    /// Pre-activations of every layer, output layer last.
    pre: Vec<Matrix>,
    /// Per-entry activation slope (1 or `leaky_slope`) of each hidden layer.
    masks: Vec<Matrix>,
}

impl ForwardTrace {
    pub fn input(&self) -> &Matrix {
        &self.acts[0]
    }

    pub fn batch_size(&self) -> usize {
        self.acts[0].rows()
    }

    pub fn pre_activations(&self) -> &[Matrix] {
        &self.pre
    }

    pub fn masks(&self) -> &[Matrix] {
        &self.masks
    }

    /// Smallest |pre-activation| over hidden units; distance to the nearest kink.
    pub fn min_kink_distance(&self) -> f64 {
        let hidden = self.pre.len().saturating_sub(1);
        self.pre[..hidden]
            .iter()
            .flat_map(|z| z.as_slice().iter())
            .fold(f64::INFINITY, |m, v| m.min(v.abs()))
    }

    /// Per-sample minimum |pre-activation| over hidden units.
    pub fn sample_kink_distances(&self) -> Vec<f64> {
        let hidden = self.pre.len().saturating_sub(1);
        (0..self.batch_size())
            .map(|r| {
                self.pre[..hidden]
                    .iter()
                    .flat_map(|z| z.row(r).iter())
                    .fold(f64::INFINITY, |m, v| m.min(v.abs()))
            })
            .collect()
    }
}

/// Value and parameter gradient of a gradient-norm penalty over a batch.
#[derive(Clone, Debug)]
pub struct PenaltyOutput {
    pub value: f64,
    pub grads: ParamGrads,
    /// ‖∇ₓf(x̂ᵢ)‖ for every sample of the penalty batch.
    pub norms: Vec<f64>,
}

impl MlpParams {
    /// Builds parameters from explicit layers, checking shapes against `spec`.
    pub fn from_layers(spec: MlpSpec, layers: Vec<Layer>) -> Result<Self> {
        spec.validate()?;
        if layers.len() != spec.num_layers() {
            return Err(Error::shape(
                "MlpParams::from_layers",
                format!("{} layers", spec.num_layers()),
                format!("{} layers", layers.len()),
            ));
        }
        for (i, (layer, w)) in layers.iter().zip(spec.widths.windows(2)).enumerate() {
            if layer.weight.shape() != (w[1], w[0]) || layer.bias.len() != w[1] {
                return Err(Error::shape(
                    "MlpParams::from_layers",
                    format!("layer {i}: weight {}x{}, bias {}", w[1], w[0], w[1]),
                    format!(
                        "weight {}x{}, bias {}",
                        layer.weight.rows(),
                        layer.weight.cols(),
                        layer.bias.len()
                    ),
                ));
            }
            if !layer.weight.is_finite() || layer.bias.iter().any(|b| !b.is_finite()) {
                return Err(Error::NonFinite(format!("parameters of layer {i}")));
            }
        }
        Ok(MlpParams { spec, layers })
    }

    /// All-zero parameters.
    pub fn zeros(spec: MlpSpec) -> Result<Self> {
        spec.validate()?;
        let layers = spec.widths.windows(2).map(|w| Layer::zeros(w[1], w[0])).collect();
        Ok(MlpParams { spec, layers })
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn num_params(&self) -> usize {
        self.spec.num_params()
    }

    /// Parameters in canonical order: per layer, weights row-major then bias.
    pub fn values(&self) -> impl Iterator<Item = &f64> {
        self.layers.iter().flat_map(Layer::values)
    }

    pub fn values_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers.iter_mut().flat_map(Layer::values_mut)
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.values().copied().collect()
    }

    /// Overwrites all parameters from a canonical-order slice.
    pub fn set_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.num_params() {
            return Err(Error::shape(
                "MlpParams::set_flat",
                format!("{} values", self.num_params()),
                format!("{} values", flat.len()),
            ));
        }
        for (p, &v) in self.values_mut().zip(flat) {
            *p = v;
        }
        Ok(())
    }

    pub fn zero_grads(&self) -> ParamGrads {
        ParamGrads {
            layers: self
                .spec
                .widths
                .windows(2)
                .map(|w| Layer::zeros(w[1], w[0]))
                .collect(),
        }
    }
}

impl ParamGrads {
    pub fn values(&self) -> impl Iterator<Item = &f64> {
        self.layers.iter().flat_map(Layer::values)
    }

    pub fn values_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers.iter_mut().flat_map(Layer::values_mut)
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.values().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weight.as_slice().len() + l.bias.len())
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `self += other`; shapes must agree.
    pub fn accumulate(&mut self, other: &ParamGrads) -> Result<()> {
        if self.layers.len() != other.layers.len()
            || self
                .layers
                .iter()
                .zip(&other.layers)
                .any(|(a, b)| a.weight.shape() != b.weight.shape() || a.bias.len() != b.bias.len())
        {
            return Err(Error::shape(
                "ParamGrads::accumulate",
                "congruent gradients",
                "different layer shapes",
            ));
        }
        for (a, b) in self.values_mut().zip(other.values()) {
            *a += b;
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.values().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Glorot-uniform weights, zero biases.
pub fn init_params(spec: &MlpSpec, rng: &mut RngState) -> Result<MlpParams> {
    spec.validate()?;
    let layers = spec
        .widths
        .windows(2)
        .map(|w| {
            let (n_in, n_out) = (w[0], w[1]);
            let limit = (6.0 / (n_in + n_out) as f64).sqrt();
            let weight = Matrix::from_fn(n_out, n_in, |_, _| rng.uniform_range(-limit, limit));
            Layer {
                weight,
                bias: vec![0.0; n_out],
            }
        })
        .collect();
    Ok(MlpParams {
        spec: spec.clone(),
        layers,
    })
}

/// Evaluates the network on a batch and records the trace for backprop.
pub fn forward(params: &MlpParams, x: &Matrix) -> Result<(Matrix, ForwardTrace)> {
    let spec = &params.spec;
    if x.cols() != spec.input_dim() {
        return Err(Error::shape(
            "forward",
            format!("{} input columns", spec.input_dim()),
            format!("{} columns", x.cols()),
        ));
    }
    let n_layers = params.layers.len();
    let mut acts = Vec::with_capacity(n_layers);
    let mut pre = Vec::with_capacity(n_layers);
    let mut masks = Vec::with_capacity(n_layers - 1);
    acts.push(x.clone());

    for (i, layer) in params.layers.iter().enumerate() {
        let mut z = matmul_nt(acts.last().expect("non-empty"), &layer.weight)?;
        z.add_row_vector(&layer.bias)?;
        if i + 1 < n_layers {
            let slope = spec.leaky_slope;
            let mask = z.map(|v| if v > 0.0 { 1.0 } else { slope });
            let a = z.hadamard(&mask)?;
            masks.push(mask);
            acts.push(a);
        }
        pre.push(z);
    }
    let out = pre.last().expect("at least one layer").clone();
    Ok((out, ForwardTrace { acts, pre, masks }))
}

/// Forward pass without keeping the trace.
pub fn evaluate(params: &MlpParams, x: &Matrix) -> Result<Matrix> {
    forward(params, x).map(|(out, _)| out)
}

fn require_scalar_output(params: &MlpParams, op: &'static str) -> Result<()> {
    if params.spec.output_dim() != 1 {
        return Err(Error::shape(op, "scalar output (d_out = 1)", format!("d_out = {}", params.spec.output_dim())));
    }
    Ok(())
}

fn check_trace(params: &MlpParams, trace: &ForwardTrace, op: &'static str) -> Result<()> {
    let ok = trace.pre.len() == params.layers.len()
        && trace
            .pre
            .iter()
            .zip(&params.layers)
            .all(|(z, l)| z.cols() == l.weight.rows());
    if ok {
        Ok(())
    } else {
        Err(Error::shape(op, "trace produced by these parameters", "incompatible trace"))
    }
}

/// Input gradient with the intermediate masked vectors `V_i = D_i ⊙ U_{i+1}`
/// kept for double backprop.
fn input_gradient_cached(params: &MlpParams, trace: &ForwardTrace) -> Result<(Matrix, Vec<Matrix>)> {
    let batch = trace.batch_size();
    let last = params.layers.last().expect("at least one layer");
    // U_L: every row equals the output weight row.
    let w_out = last.weight.row(0);
    let mut u = Matrix::from_fn(batch, w_out.len(), |_, c| w_out[c]);
    let hidden = params.layers.len() - 1;
    let mut vs = vec![Matrix::zeros(0, 0); hidden];
    for i in (0..hidden).rev() {
        let v = u.hadamard(&trace.masks[i])?;
        u = matmul(&v, &params.layers[i].weight)?;
        vs[i] = v;
    }
    Ok((u, vs))
}

/// `∇ₓf(xᵢ)` for every sample of the traced batch.
pub fn input_gradient(params: &MlpParams, trace: &ForwardTrace) -> Result<Matrix> {
    require_scalar_output(params, "input_gradient")?;
    check_trace(params, trace, "input_gradient")?;
    input_gradient_cached(params, trace).map(|(g, _)| g)
}

/// Parameter gradient of `Σᵢ upstream[i, :] · f(xᵢ)` (standard backprop).
pub fn backward(params: &MlpParams, trace: &ForwardTrace, upstream: &Matrix) -> Result<ParamGrads> {
    check_trace(params, trace, "backward")?;
    if upstream.shape() != (trace.batch_size(), params.spec.output_dim()) {
        return Err(Error::shape(
            "backward",
            format!("upstream {}x{}", trace.batch_size(), params.spec.output_dim()),
            format!("{}x{}", upstream.rows(), upstream.cols()),
        ));
    }
    let n_layers = params.layers.len();
    let mut grads = Vec::with_capacity(n_layers);
    let mut delta = upstream.clone();
    for i in (0..n_layers).rev() {
        let weight = matmul_tn(&delta, &trace.acts[i])?;
        let bias = delta.column_sums();
        grads.push(Layer { weight, bias });
        if i > 0 {
            let g = matmul(&delta, &params.layers[i].weight)?;
            delta = g.hadamard(&trace.masks[i - 1])?;
        }
    }
    grads.reverse();
    Ok(ParamGrads { layers: grads })
}

/// Parameter gradient of `Σᵢ coeffs[i] · f(xᵢ)` for a scalar-output network.
pub fn loss_param_grads(params: &MlpParams, trace: &ForwardTrace, coeffs: &[f64]) -> Result<ParamGrads> {
    require_scalar_output(params, "loss_param_grads")?;
    if coeffs.len() != trace.batch_size() {
        return Err(Error::shape(
            "loss_param_grads",
            format!("{} coefficients", trace.batch_size()),
            format!("{}", coeffs.len()),
        ));
    }
    backward(params, trace, &Matrix::column(coeffs)?)
}

/// `λ · mean_i φ(‖∇ₓf(x̂ᵢ)‖)` and its parameter gradient (double backprop).
pub fn penalty_param_grads(
    params: &MlpParams,
    trace: &ForwardTrace,
    kind: GradPenalty,
    lambda: f64,
) -> Result<PenaltyOutput> {
    require_scalar_output(params, "penalty_param_grads")?;
    check_trace(params, trace, "penalty_param_grads")?;
    let batch = trace.batch_size();
    let (g, vs) = input_gradient_cached(params, trace)?;
    let norms = g.row_norms();
    let mut grads = params.zero_grads();
    if batch == 0 {
        return Ok(PenaltyOutput {
            value: 0.0,
            grads,
            norms,
        });
    }
    let scale = lambda / batch as f64;
    let mut total = 0.0;
    let mut coeff = Vec::with_capacity(batch);
    for &n in &norms {
        total += grad_norm_penalty(n, kind)?;
        coeff.push(if n < EPS_NORM {
            0.0
        } else {
            scale * grad_norm_penalty_derivative(n, kind) / n
        });
    }
    let value = scale * total;
    if coeff.iter().all(|&c| c == 0.0) {
        return Ok(PenaltyOutput { value, grads, norms });
    }

    // S_1 = ∂value/∂g per sample.
    let mut s = g;
    for (r, &c) in coeff.iter().enumerate() {
        for v in s.row_mut(r) {
            *v *= c;
        }
    }
    let hidden = params.layers.len() - 1;
    for i in 0..hidden {
        // u_i = W_iᵀ v_i  ⇒  ∂/∂W_i = v_i s_iᵀ and ∂/∂v_i = W_i s_i.
        grads.layers[i].weight = matmul_tn(&vs[i], &s)?;
        let t = matmul_nt(&s, &params.layers[i].weight)?;
        s = t.hadamard(&trace.masks[i])?;
    }
    // u_L = w_Lᵀ: the output weight row collects the remaining sensitivity.
    let out_grad = s.column_sums();
    grads.layers[hidden]
        .weight
        .as_mut_slice()
        .copy_from_slice(&out_grad);
    Ok(PenaltyOutput { value, grads, norms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(widths: &[usize], slope: f64, layers: Vec<(Vec<Vec<f64>>, Vec<f64>)>) -> MlpParams {
        let spec = MlpSpec::new(widths.to_vec(), slope).unwrap();
        let layers = layers
            .into_iter()
            .map(|(w, b)| Layer {
                weight: Matrix::from_rows(&w).unwrap(),
                bias: b,
            })
            .collect();
        MlpParams::from_layers(spec, layers).unwrap()
    }

    fn kink_net() -> MlpParams {
        params(
            &[1, 1, 1],
            0.2,
            vec![(vec![vec![1.0]], vec![0.0]), (vec![vec![1.0]], vec![0.0])],
        )
    }

    #[test]
    fn linear_forward() {
        let p = params(&[2, 1], 0.2, vec![(vec![vec![2.0, -1.0]], vec![0.5])]);
        let x = Matrix::from_rows(&[[1.0, 1.0]]).unwrap();
        let (y, _) = forward(&p, &x).unwrap();
        assert_eq!(y.as_slice(), &[1.5]);
    }

    #[test]
    fn single_kink_forward_and_gradient() {
        let p = kink_net();
        let x = Matrix::from_rows(&[[-1.0]]).unwrap();
        let (y, trace) = forward(&p, &x).unwrap();
        assert!((y[(0, 0)] + 0.2).abs() < 1e-15);
        let g = input_gradient(&p, &trace).unwrap();
        assert!((g[(0, 0)] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn linear_critic_gradient_is_weight() {
        let p = params(&[3, 1], 0.2, vec![(vec![vec![0.5, -2.0, 1.5]], vec![3.0])]);
        let x = Matrix::from_rows(&[[1.0, 2.0, 3.0], [-4.0, 0.0, 9.0]]).unwrap();
        let (_, trace) = forward(&p, &x).unwrap();
        let g = input_gradient(&p, &trace).unwrap();
        for r in 0..2 {
            assert_eq!(g.row(r), &[0.5, -2.0, 1.5]);
        }
    }

    #[test]
    fn input_gradient_rejects_vector_output() {
        let p = MlpParams::zeros(MlpSpec::new(vec![2, 3, 2], 0.2).unwrap()).unwrap();
        let (_, trace) = forward(&p, &Matrix::zeros(1, 2)).unwrap();
        assert!(input_gradient(&p, &trace).is_err());
        assert!(penalty_param_grads(&p, &trace, GradPenalty::Gp, 1.0).is_err());
    }

    #[test]
    fn forward_rejects_wrong_width() {
        let p = kink_net();
        assert!(forward(&p, &Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn zero_coefficients_give_zero_gradients() {
        let mut rng = RngState::new(5);
        let p = init_params(&MlpSpec::new(vec![2, 8, 1], 0.2).unwrap(), &mut rng).unwrap();
        let x = rng.normal_matrix(4, 2);
        let (_, trace) = forward(&p, &x).unwrap();
        let g = loss_param_grads(&p, &trace, &[0.0; 4]).unwrap();
        assert!(g.values().all(|&v| v == 0.0));
        assert!(loss_param_grads(&p, &trace, &[0.0; 3]).is_err());
    }

    #[test]
    fn linear_critic_mean_gradient_is_mean_input() {
        let p = params(&[2, 1], 0.2, vec![(vec![vec![0.3, 0.7]], vec![0.0])]);
        let x = Matrix::from_rows(&[[1.0, 2.0], [3.0, -4.0], [5.0, 0.5]]).unwrap();
        let (_, trace) = forward(&p, &x).unwrap();
        let g = loss_param_grads(&p, &trace, &[1.0 / 3.0; 3]).unwrap();
        let w = g.layers[0].weight.as_slice();
        assert!((w[0] - 3.0).abs() < 1e-12);
        assert!((w[1] + 0.5).abs() < 1e-12);
        assert!((g.layers[0].bias[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lp_penalty_inactive_inside_unit_ball() {
        let p = params(&[2, 1], 0.2, vec![(vec![vec![0.6, 0.0]], vec![0.0])]);
        let x = Matrix::from_rows(&[[1.0, 1.0], [2.0, -3.0]]).unwrap();
        let (_, trace) = forward(&p, &x).unwrap();
        let out = penalty_param_grads(&p, &trace, GradPenalty::Lp, 10.0).unwrap();
        assert_eq!(out.value, 0.0);
        assert!(out.grads.values().all(|&v| v == 0.0));
    }

    #[test]
    fn lp_penalty_on_linear_critic_with_norm_two() {
        // f = wᵀx with ‖w‖ = 2: value λ(2-1)² = λ, gradient λ·2(‖w‖-1)·w/‖w‖ = λw.
        let lambda = 3.0;
        let w = [1.2, -1.6];
        let p = params(&[2, 1], 0.2, vec![(vec![w.to_vec()], vec![0.0])]);
        let x = Matrix::from_rows(&[[0.1, 0.2], [5.0, 1.0]]).unwrap();
        let (_, trace) = forward(&p, &x).unwrap();
        let out = penalty_param_grads(&p, &trace, GradPenalty::Lp, lambda).unwrap();
        assert!((out.value - lambda).abs() < 1e-12);
        let gw = out.grads.layers[0].weight.as_slice();
        assert!((gw[0] - lambda * w[0]).abs() < 1e-12);
        assert!((gw[1] - lambda * w[1]).abs() < 1e-12);
        assert_eq!(out.grads.layers[0].bias, vec![0.0]);
    }

    #[test]
    fn gp_penalty_zero_on_unit_gradient() {
        let p = params(&[2, 1], 0.2, vec![(vec![vec![0.6, 0.8]], vec![1.0])]);
        let x = Matrix::from_rows(&[[1.0, 1.0]]).unwrap();
        let (_, trace) = forward(&p, &x).unwrap();
        let out = penalty_param_grads(&p, &trace, GradPenalty::Gp, 10.0).unwrap();
        assert!(out.value.abs() < 1e-24);
    }

    #[test]
    fn glorot_bound_and_zero_bias() {
        let spec = MlpSpec::new(vec![2, 4, 1], 0.2).unwrap();
        for seed in 0..20 {
            let p = init_params(&spec, &mut RngState::new(seed)).unwrap();
            let bound0 = (6.0f64 / 6.0).sqrt();
            let bound1 = (6.0f64 / 5.0).sqrt();
            assert!(p.layers[0].weight.as_slice().iter().all(|w| w.abs() <= bound0));
            assert!(p.layers[1].weight.as_slice().iter().all(|w| w.abs() <= bound1));
            assert!(p.values().all(|w| w.abs() <= (2.0f64).sqrt()));
            assert!(p.layers.iter().all(|l| l.bias.iter().all(|&b| b == 0.0)));
        }
    }

    #[test]
    fn init_is_deterministic() {
        let spec = MlpSpec::new(vec![2, 16, 16, 1], 0.2).unwrap();
        let a = init_params(&spec, &mut RngState::new(9)).unwrap();
        let b = init_params(&spec, &mut RngState::new(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn glorot_mean_is_near_zero() {
        let spec = MlpSpec::new(vec![100, 100, 1], 0.2).unwrap();
        let p = init_params(&spec, &mut RngState::new(1)).unwrap();
        let w = p.layers[0].weight.as_slice();
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn spec_validation() {
        assert!(MlpSpec::new(vec![2], 0.2).is_err());
        assert!(MlpSpec::new(vec![2, 0, 1], 0.2).is_err());
        assert!(MlpSpec::new(vec![2, 1], 1.5).is_err());
        assert!(MlpSpec::new(vec![2, 1], 0.0).is_ok());
    }
}
