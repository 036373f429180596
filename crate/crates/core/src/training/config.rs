use serde::{Deserialize, Serialize};

use crate::data::{Dataset, DatasetKind, LatentSpec};
use crate::error::{Error, Result};
use crate::nn::{MlpSpec, DEFAULT_LEAKY_SLOPE};
use crate::optim::RmsPropConfig;
use crate::regularizers::{PerturbationScheme, RegularizerSpec};

/// Full description of one training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub dataset: DatasetKind,
    /// Hidden widths of the critic (`[2, hidden.., 1]`).
    pub critic_hidden: Vec<usize>,
    /// Hidden widths of the generator (`[latent, hidden.., 2]`).
    pub generator_hidden: Vec<usize>,
    pub leaky_slope: f64,
    pub latent: LatentSpec,
    pub regularizer: RegularizerSpec,
    pub perturbation: PerturbationScheme,
    pub batch_size: usize,
    pub optimizer: RmsPropConfig,
    pub n_critic: usize,
    pub warmup_gen_iters: usize,
    pub warmup_n_critic: usize,
    /// Total generator iterations.
    pub iterations: usize,
    pub emd_every: usize,
    pub emd_sample_size: usize,
    pub levelset_iters: Vec<usize>,
    pub levelset_resolution: usize,
    pub seed: u64,
    /// Write measured wall-clock times into the run log. Off by default so
    /// that logs of equal runs are byte-identical.
    pub log_wall_time: bool,
    /// Test hook: poison the critic loss at this iteration to exercise the
    /// abort path.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault_injection: Option<FaultInjection>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultInjection {
    /// Only runs with this seed are affected.
    pub seed: u64,
    pub iteration: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dataset: DatasetKind::SwissRoll,
            critic_hidden: vec![512, 512, 512],
            generator_hidden: vec![512, 512, 512],
            leaky_slope: DEFAULT_LEAKY_SLOPE,
            latent: LatentSpec::default(),
            regularizer: RegularizerSpec::Lp { lambda: 10.0 },
            perturbation: PerturbationScheme::Line,
            batch_size: 256,
            optimizer: RmsPropConfig::default(),
            n_critic: 10,
            warmup_gen_iters: 25,
            warmup_n_critic: 100,
            iterations: 1000,
            emd_every: 10,
            emd_sample_size: 500,
            levelset_iters: vec![10, 50, 100, 1000],
            levelset_resolution: 128,
            seed: 0,
            log_wall_time: false,
            fault_injection: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("batch_size", self.batch_size),
            ("n_critic", self.n_critic),
            ("warmup_n_critic", self.warmup_n_critic),
            ("iterations", self.iterations),
            ("emd_every", self.emd_every),
            ("emd_sample_size", self.emd_sample_size),
            ("latent.dim", self.latent.dim),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::invalid(format!("{name} must be >= 1")));
            }
        }
        if self.levelset_resolution < 2 {
            return Err(Error::invalid("levelset_resolution must be >= 2"));
        }
        if self.levelset_iters.contains(&0) {
            return Err(Error::invalid("levelset_iters entries must be >= 1"));
        }
        self.regularizer
            .validate()
            .map_err(|e| Error::invalid(format!("regularizer: {e}")))?;
        self.perturbation
            .validate()
            .map_err(|e| Error::invalid(format!("perturbation: {e}")))?;
        self.optimizer
            .validate()
            .map_err(|e| Error::invalid(format!("optimizer: {e}")))?;
        self.critic_spec()?;
        self.generator_spec()?;
        Ok(())
    }

    pub fn critic_spec(&self) -> Result<MlpSpec> {
        let mut widths = vec![2];
        widths.extend(&self.critic_hidden);
        widths.push(1);
        MlpSpec::new(widths, self.leaky_slope)
    }

    pub fn generator_spec(&self) -> Result<MlpSpec> {
        let mut widths = vec![self.latent.dim];
        widths.extend(&self.generator_hidden);
        widths.push(2);
        MlpSpec::new(widths, self.leaky_slope)
    }

    pub fn data(&self) -> Dataset {
        Dataset::standard(self.dataset)
    }

    /// Critic steps before generator iteration `iter` (1-based).
    pub fn critic_steps_at(&self, iter: usize) -> usize {
        if iter <= self.warmup_gen_iters {
            self.warmup_n_critic
        } else {
            self.n_critic
        }
    }

    /// Critic steps performed by the end of generator iteration `iter`.
    pub fn total_critic_steps(&self, iter: usize) -> usize {
        let warm = iter.min(self.warmup_gen_iters);
        warm * self.warmup_n_critic + (iter - warm) * self.n_critic
    }

    pub fn emd_scheduled(&self, iter: usize) -> bool {
        iter % self.emd_every == 0
    }
}
