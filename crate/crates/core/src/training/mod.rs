//! The alternating critic/generator optimization loop.
//!
//! Every generator iteration `it` draws all its randomness from
//! `RngState::derive(seed, TRAIN, it)`, and EMD measurements from
//! `RngState::derive(seed, EMD, it)`. A run resumed from a checkpoint therefore
//! continues exactly as the uninterrupted run would have.

mod checkpoint;
mod config;
mod levelset;
mod runlog;

use std::time::Instant;

pub use checkpoint::{Checkpoint, BUNDLE_MAGIC, BUNDLE_VERSION};
pub use config::{FaultInjection, TrainConfig};
pub use levelset::{levelset_grid, Bounds, LevelSet, LevelSetMeta};
pub use runlog::{RunLog, RunRecord, RUNLOG_HEADER};

use crate::data::{sample_latent, Dataset};
use crate::error::{Error, Result};
use crate::nn::{backward, evaluate, forward, init_params, input_gradient, loss_param_grads, penalty_param_grads, MlpParams, ParamGrads};
use crate::numerics::rng::purpose;
use crate::numerics::{euclidean_distance, Matrix, RngState};
use crate::optim::RmsPropState;
use crate::regularizers::{clip_weights_in_place, ratio_penalty_with_slope, sample_penalty_points, RegularizerSpec};
use crate::transport::emd_empirical;

/// Margin added around the dataset bounding box for level-set plots.
pub const LEVELSET_MARGIN: f64 = 0.25;

/// Diagnostics of one critic step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticStats {
    /// `mean f(gen) − mean f(real)`, without the penalty.
    pub d_loss: f64,
    pub penalty: f64,
    /// Mean and max of `‖∇f(x̂)‖` over the penalty points.
    pub grad_norm_mean: f64,
    pub grad_norm_max: f64,
}

/// Unregularized critic loss `mean f(gen) − mean f(real)`.
pub fn critic_loss(critic: &MlpParams, real: &Matrix, gen: &Matrix) -> Result<f64> {
    let f_real = evaluate(critic, real)?;
    let f_gen = evaluate(critic, gen)?;
    Ok(mean(f_gen.as_slice()) - mean(f_real.as_slice()))
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Regularized critic objective `mean f(gen) − mean f(real) + λ·penalty` and
/// its parameter gradient.
///
/// Gradient penalties are evaluated at `points`; the ratio penalty pairs
/// `real[i]` with `gen[i]`. The returned gradient-norm statistics are taken at
/// `points` and are left at zero for regularizers without a gradient penalty
/// unless `with_stats` is set.
pub fn critic_objective(
    critic: &MlpParams,
    regularizer: RegularizerSpec,
    real: &Matrix,
    gen: &Matrix,
    points: &Matrix,
    with_stats: bool,
) -> Result<(CriticStats, ParamGrads)> {
    if real.shape() != gen.shape() || real.rows() == 0 {
        return Err(Error::shape(
            "critic_objective",
            "equal, non-empty real and generated batches",
            format!("{:?} vs {:?}", real.shape(), gen.shape()),
        ));
    }
    let n = real.rows();
    let inv_n = 1.0 / n as f64;
    let (f_real, real_trace) = forward(critic, real)?;
    let (f_gen, gen_trace) = forward(critic, gen)?;
    let (f_x, f_y) = (f_real.as_slice(), f_gen.as_slice());
    let d_loss = mean(f_y) - mean(f_x);
    let mut real_coeffs = vec![-inv_n; n];
    let mut gen_coeffs = vec![inv_n; n];

    let mut penalty = 0.0;
    let mut penalty_grads = None;
    let mut norms = Vec::new();
    match regularizer {
        RegularizerSpec::Gp { lambda } | RegularizerSpec::Lp { lambda } => {
            let kind = regularizer.grad_penalty().expect("gradient penalty");
            let (_, ptrace) = forward(critic, points)?;
            let out = penalty_param_grads(critic, &ptrace, kind, lambda)?;
            penalty = out.value;
            norms = out.norms;
            penalty_grads = Some(out.grads);
        }
        RegularizerSpec::Ratio { lambda, p, one_sided } => {
            let scale = lambda * inv_n;
            for i in 0..n {
                let dist = euclidean_distance(real.row(i), gen.row(i));
                if let Some((value, slope)) = ratio_penalty_with_slope(f_x[i], f_y[i], dist, p, one_sided) {
                    penalty += scale * value;
                    real_coeffs[i] += scale * slope;
                    gen_coeffs[i] -= scale * slope;
                }
            }
        }
        RegularizerSpec::None | RegularizerSpec::WeightClip { .. } => {}
    }
    if with_stats && penalty_grads.is_none() {
        let (_, ptrace) = forward(critic, points)?;
        norms = input_gradient(critic, &ptrace)?.row_norms();
    }

    let mut grads = loss_param_grads(critic, &gen_trace, &gen_coeffs)?;
    grads.accumulate(&loss_param_grads(critic, &real_trace, &real_coeffs)?)?;
    if let Some(pg) = penalty_grads {
        grads.accumulate(&pg)?;
    }
    let stats = CriticStats {
        d_loss,
        penalty,
        grad_norm_mean: mean(&norms),
        grad_norm_max: norms.iter().copied().fold(0.0, f64::max),
    };
    Ok((stats, grads))
}

/// Generator loss `−mean f(G(z))` and its gradient with respect to the
/// generator parameters, the critic held fixed.
pub fn generator_objective(critic: &MlpParams, generator: &MlpParams, z: &Matrix) -> Result<(f64, ParamGrads)> {
    if z.rows() == 0 {
        return Err(Error::invalid("empty latent batch"));
    }
    let n = z.rows() as f64;
    let (samples, gtrace) = forward(generator, z)?;
    let (f, ctrace) = forward(critic, &samples)?;
    let g_loss = -mean(f.as_slice());
    let upstream = input_gradient(critic, &ctrace)?.scale(-1.0 / n);
    let grads = backward(generator, &gtrace, &upstream)?;
    Ok((g_loss, grads))
}

/// Level-set bounds used during training: bounding box plus 25% margin.
pub fn default_levelset_bounds(data: &Dataset) -> Bounds {
    Bounds::with_margin(data.bounding_box(), LEVELSET_MARGIN)
}

/// Result of [`train_run`] or [`Trainer::run_to`].
#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub log: RunLog,
    /// State after the last completed iteration (or at the point of abort).
    pub checkpoint: Checkpoint,
    pub levelsets: Vec<LevelSet>,
}

/// Owns the full state of one run.
#[derive(Clone, Debug)]
pub struct Trainer {
    config: TrainConfig,
    data: Dataset,
    critic: MlpParams,
    generator: MlpParams,
    critic_opt: RmsPropState,
    generator_opt: RmsPropState,
    iteration: usize,
}

impl Trainer {
    pub fn new(config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let critic = init_params(
            &config.critic_spec()?,
            &mut RngState::derive(config.seed, purpose::CRITIC_INIT, 0),
        )?;
        let generator = init_params(
            &config.generator_spec()?,
            &mut RngState::derive(config.seed, purpose::GENERATOR_INIT, 0),
        )?;
        let mut critic = critic;
        if let RegularizerSpec::WeightClip { c_max } = config.regularizer {
            clip_weights_in_place(&mut critic, c_max);
        }
        Ok(Trainer {
            data: config.data(),
            critic_opt: RmsPropState::new(config.optimizer, &critic),
            generator_opt: RmsPropState::new(config.optimizer, &generator),
            critic,
            generator,
            iteration: 0,
            config,
        })
    }

    /// Continues a run from `ckpt`. The checkpoint must come from a run with
    /// the same seed and network shapes.
    pub fn resume(config: TrainConfig, ckpt: Checkpoint) -> Result<Self> {
        config.validate()?;
        if ckpt.seed != config.seed {
            return Err(Error::invalid(format!(
                "checkpoint seed {} differs from config seed {}",
                ckpt.seed, config.seed
            )));
        }
        if *ckpt.critic.spec() != config.critic_spec()? || *ckpt.generator.spec() != config.generator_spec()? {
            return Err(Error::invalid("checkpoint network shapes do not match the config"));
        }
        Ok(Trainer {
            data: config.data(),
            critic: ckpt.critic,
            generator: ckpt.generator,
            critic_opt: ckpt.critic_opt,
            generator_opt: ckpt.generator_opt,
            iteration: ckpt.iteration,
            config,
        })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn critic(&self) -> &MlpParams {
        &self.critic
    }

    pub fn generator(&self) -> &MlpParams {
        &self.generator
    }

    /// Generator iterations completed so far.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            iteration: self.iteration,
            seed: self.config.seed,
            critic: self.critic.clone(),
            critic_opt: self.critic_opt.clone(),
            generator: self.generator.clone(),
            generator_opt: self.generator_opt.clone(),
        }
    }

    /// One RMSprop step on the critic for
    /// `mean f(gen) − mean f(real) + λ·penalty`, rows of `real` and `gen`
    /// paired by index. `rng` supplies the penalty points.
    pub fn critic_update(&mut self, real: &Matrix, gen: &Matrix, rng: &mut RngState) -> Result<CriticStats> {
        self.critic_step(real, gen, rng, true)
    }

    fn critic_step(&mut self, real: &Matrix, gen: &Matrix, rng: &mut RngState, with_stats: bool) -> Result<CriticStats> {
        let points = sample_penalty_points(real, gen, self.config.perturbation, rng)?;
        let (mut stats, grads) = critic_objective(&self.critic, self.config.regularizer, real, gen, &points, with_stats)?;
        if let Some(fault) = self.config.fault_injection {
            if fault.seed == self.config.seed && fault.iteration == self.iteration + 1 {
                stats.d_loss = f64::NAN;
            }
        }
        if !stats.d_loss.is_finite() || !stats.penalty.is_finite() {
            return Err(Error::NonFinite(format!(
                "critic loss at iteration {}: d_loss = {}, penalty = {}",
                self.iteration + 1,
                stats.d_loss,
                stats.penalty
            )));
        }
        self.critic_opt.step(&mut self.critic, &grads)?;
        if let RegularizerSpec::WeightClip { c_max } = self.config.regularizer {
            clip_weights_in_place(&mut self.critic, c_max);
        }
        Ok(stats)
    }

    /// One RMSprop step on the generator for `−mean f(G(z))` with the critic
    /// frozen. Returns the loss before the step.
    pub fn generator_update(&mut self, z: &Matrix) -> Result<f64> {
        let (g_loss, grads) = generator_objective(&self.critic, &self.generator, z)?;
        if !g_loss.is_finite() {
            return Err(Error::NonFinite(format!(
                "generator loss at iteration {}: {g_loss}",
                self.iteration + 1
            )));
        }
        self.generator_opt.step(&mut self.generator, &grads)?;
        Ok(g_loss)
    }

    /// EMD between fresh real and generated samples of the configured size.
    pub fn estimate_emd(&self, rng: &mut RngState) -> Result<f64> {
        let m = self.config.emd_sample_size;
        let real = self.data.sample(m, rng);
        let gen = evaluate(&self.generator, &sample_latent(self.config.latent, m, rng))?;
        emd_empirical(&real, &gen)
    }

    pub fn levelset(&self) -> Result<LevelSet> {
        let bounds = default_levelset_bounds(&self.data);
        Ok(LevelSet {
            iteration: self.iteration,
            bounds,
            grid: levelset_grid(&self.critic, bounds, self.config.levelset_resolution)?,
        })
    }

    /// Runs generator iteration `self.iteration() + 1`.
    pub fn step(&mut self) -> Result<RunRecord> {
        let start = Instant::now();
        let it = self.iteration + 1;
        let n = self.config.batch_size;
        let mut rng = RngState::derive(self.config.seed, purpose::TRAIN, it as u64);
        let steps = self.config.critic_steps_at(it);
        let mut stats = None;
        for s in 0..steps {
            let real = self.data.sample(n, &mut rng);
            let z = sample_latent(self.config.latent, n, &mut rng);
            let gen = evaluate(&self.generator, &z)?;
            stats = Some(self.critic_step(&real, &gen, &mut rng, s + 1 == steps)?);
        }
        let stats = stats.expect("at least one critic step");
        let z = sample_latent(self.config.latent, n, &mut rng);
        let g_loss = self.generator_update(&z)?;
        self.iteration = it;
        let emd = if self.config.emd_scheduled(it) {
            Some(self.estimate_emd(&mut RngState::derive(self.config.seed, purpose::EMD, it as u64))?)
        } else {
            None
        };
        let wall_ms = if self.config.log_wall_time {
            start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };
        Ok(RunRecord {
            iter: it,
            d_loss: stats.d_loss,
            penalty: stats.penalty,
            grad_norm_mean: stats.grad_norm_mean,
            grad_norm_max: stats.grad_norm_max,
            g_loss,
            emd,
            wall_ms,
        })
    }

    /// Iterates until `until` generator iterations are complete or the run
    /// aborts. The log covers only the iterations run by this call.
    pub fn run_to(&mut self, until: usize) -> TrainOutcome {
        let mut log = RunLog::default();
        let mut levelsets = Vec::new();
        while self.iteration < until {
            match self.step() {
                Ok(record) => log.records.push(record),
                Err(e) => {
                    log.failure = Some(format!("iteration {}: {e}", self.iteration + 1));
                    break;
                }
            }
            if self.config.levelset_iters.contains(&self.iteration) {
                match self.levelset() {
                    Ok(ls) => levelsets.push(ls),
                    Err(e) => {
                        log.failure = Some(format!("level set at iteration {}: {e}", self.iteration));
                        break;
                    }
                }
            }
        }
        TrainOutcome {
            log,
            checkpoint: self.checkpoint(),
            levelsets,
        }
    }
}

/// Runs the configured number of generator iterations from a fresh start.
///
/// Only an invalid config is an error; a numerical abort is reported through
/// [`RunLog::failure`] with the partial log.
pub fn train_run(config: TrainConfig) -> Result<TrainOutcome> {
    let until = config.iterations;
    Ok(Trainer::new(config)?.run_to(until))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DatasetKind;

    fn tiny(regularizer: RegularizerSpec) -> TrainConfig {
        TrainConfig {
            dataset: DatasetKind::EightGaussians,
            critic_hidden: vec![8, 8],
            generator_hidden: vec![8],
            regularizer,
            batch_size: 16,
            n_critic: 2,
            warmup_gen_iters: 2,
            warmup_n_critic: 3,
            iterations: 4,
            emd_every: 2,
            emd_sample_size: 20,
            levelset_iters: vec![1, 4],
            levelset_resolution: 5,
            seed: 9,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn one_record_per_iteration_and_emd_on_schedule() {
        let out = train_run(tiny(RegularizerSpec::Lp { lambda: 10.0 })).unwrap();
        assert!(!out.log.is_failed());
        assert_eq!(out.log.records.len(), 4);
        let emd_iters: Vec<usize> = out.log.emd_series().iter().map(|&(i, _)| i).collect();
        assert_eq!(emd_iters, vec![2, 4]);
        assert_eq!(out.levelsets.iter().map(|l| l.iteration).collect::<Vec<_>>(), vec![1, 4]);
        assert_eq!(out.checkpoint.iteration, 4);
    }

    #[test]
    fn identical_real_and_generated_batches_cancel() {
        let mut t = Trainer::new(tiny(RegularizerSpec::Lp { lambda: 0.0 })).unwrap();
        let x = Dataset::standard(DatasetKind::EightGaussians).sample(16, &mut RngState::new(1));
        let before = t.critic().clone();
        let stats = t.critic_update(&x, &x, &mut RngState::new(2)).unwrap();
        assert_eq!(stats.d_loss, 0.0);
        assert_eq!(t.critic(), &before);
    }

    #[test]
    fn weight_clip_bounds_hold_after_each_step() {
        let out = train_run(tiny(RegularizerSpec::WeightClip { c_max: 0.01 })).unwrap();
        assert!(out.checkpoint.critic.values().all(|v| v.abs() <= 0.01));
    }

    #[test]
    fn constant_critic_gives_zero_generator_step() {
        let mut t = Trainer::new(tiny(RegularizerSpec::None)).unwrap();
        let last = t.critic.layers_mut().last_mut().unwrap();
        last.weight = Matrix::zeros(1, last.weight.cols());
        let before = t.generator().clone();
        t.generator_update(&RngState::new(4).normal_matrix(16, 2)).unwrap();
        assert_eq!(t.generator(), &before);
    }

    #[test]
    fn fault_injection_aborts_with_partial_log() {
        let mut c = tiny(RegularizerSpec::Gp { lambda: 10.0 });
        c.fault_injection = Some(FaultInjection { seed: 9, iteration: 3 });
        let out = train_run(c).unwrap();
        assert_eq!(out.log.records.len(), 2);
        assert!(out.log.failure.as_deref().unwrap().contains("iteration 3"));
    }
}
