//! Complete training state on disk.
//!
//! Layout (little-endian): magic `WGLK`, version `u32`, completed generator
//! iterations `u64`, seed `u64`, then the critic as a `WGLP` block, its
//! optimizer, the generator as a `WGLP` block and its optimizer. An optimizer
//! is `lr`, `rho`, `eps` as `f64`, an accumulator length `u64` and that many
//! `f64`.
//!
//! Random streams are derived from `(seed, iteration)`, so the seed and the
//! iteration counter fully determine the generator state of a resumed run.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::nn::io::{read_f64, read_params, read_u32, read_u64, write_params};
use crate::nn::MlpParams;
use crate::optim::{RmsPropConfig, RmsPropState};

pub const BUNDLE_MAGIC: &[u8; 4] = b"WGLK";
pub const BUNDLE_VERSION: u32 = 1;

const MAX_ACCUMULATOR: u64 = 1 << 32;

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    /// Generator iterations completed.
    pub iteration: usize,
    pub seed: u64,
    pub critic: MlpParams,
    pub critic_opt: RmsPropState,
    pub generator: MlpParams,
    pub generator_opt: RmsPropState,
}

impl Checkpoint {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(BUNDLE_MAGIC)?;
        w.write_all(&BUNDLE_VERSION.to_le_bytes())?;
        w.write_all(&(self.iteration as u64).to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        write_params(&self.critic, &mut w)?;
        write_optimizer(&self.critic_opt, &mut w)?;
        write_params(&self.generator, &mut w)?;
        write_optimizer(&self.generator_opt, &mut w)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != BUNDLE_MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?}, expected {BUNDLE_MAGIC:?}")));
        }
        let version = read_u32(&mut r)?;
        if version != BUNDLE_VERSION {
            return Err(Error::Format(format!("unsupported checkpoint version {version}")));
        }
        let iteration = read_u64(&mut r)? as usize;
        let seed = read_u64(&mut r)?;
        let critic = read_params(&mut r)?;
        let critic_opt = read_optimizer(&mut r, &critic)?;
        let generator = read_params(&mut r)?;
        let generator_opt = read_optimizer(&mut r, &generator)?;
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(Error::Format("trailing bytes after checkpoint".into()));
        }
        Ok(Checkpoint {
            iteration,
            seed,
            critic,
            critic_opt,
            generator,
            generator_opt,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

fn write_optimizer<W: Write>(state: &RmsPropState, w: &mut W) -> Result<()> {
    let c = state.config;
    for v in [c.lr, c.rho, c.eps] {
        w.write_all(&v.to_le_bytes())?;
    }
    let acc = state.accumulator();
    w.write_all(&(acc.len() as u64).to_le_bytes())?;
    for v in acc {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_optimizer<R: Read>(r: &mut R, params: &MlpParams) -> Result<RmsPropState> {
    let config = RmsPropConfig {
        lr: read_f64(r)?,
        rho: read_f64(r)?,
        eps: read_f64(r)?,
    };
    config.validate().map_err(|e| Error::Format(e.to_string()))?;
    let len = read_u64(r)?;
    if len > MAX_ACCUMULATOR || len as usize != params.num_params() {
        return Err(Error::Format(format!(
            "optimizer holds {len} accumulators for {} parameters",
            params.num_params()
        )));
    }
    let acc = (0..len).map(|_| read_f64(r)).collect::<Result<Vec<_>>>()?;
    RmsPropState::from_accumulator(config, acc).map_err(|e| Error::Format(e.to_string()))
}
