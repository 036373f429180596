//! Binary parameter files.
//!
//! Layout (all little-endian): magic `WGLP`, format version `u32`, width count
//! `u32`, each width `u32`, `leaky_slope` as `f64`, then for every layer its
//! weight matrix row-major followed by its bias, as `f64`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::nn::{Layer, MlpParams, MlpSpec};
use crate::numerics::Matrix;

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"WGLP";
pub const CHECKPOINT_VERSION: u32 = 1;

// Refuse absurd headers before allocating.
const MAX_LAYERS: usize = 1 << 12;
const MAX_WIDTH: usize = 1 << 20;

pub fn write_params<W: Write>(params: &MlpParams, mut w: W) -> Result<()> {
    let spec = params.spec();
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    w.write_all(&(spec.widths.len() as u32).to_le_bytes())?;
    for &width in &spec.widths {
        w.write_all(&(width as u32).to_le_bytes())?;
    }
    w.write_all(&spec.leaky_slope.to_le_bytes())?;
    for layer in params.layers() {
        for v in layer.weight.as_slice().iter().chain(&layer.bias) {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_params<R: Read>(mut r: R) -> Result<MlpParams> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}, expected {CHECKPOINT_MAGIC:?}")));
    }
    let version = read_u32(&mut r)?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let count = read_u32(&mut r)? as usize;
    if !(2..=MAX_LAYERS).contains(&count) {
        return Err(Error::Format(format!("implausible width count {count}")));
    }
    let widths = (0..count)
        .map(|_| {
            let w = read_u32(&mut r)? as usize;
            if w == 0 || w > MAX_WIDTH {
                Err(Error::Format(format!("implausible layer width {w}")))
            } else {
                Ok(w)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let slope = read_f64(&mut r)?;
    let spec = MlpSpec::new(widths, slope).map_err(|e| Error::Format(e.to_string()))?;
    let mut layers = Vec::with_capacity(spec.num_layers());
    for w in spec.widths.windows(2) {
        let (n_in, n_out) = (w[0], w[1]);
        let weights = (0..n_in * n_out)
            .map(|_| read_f64(&mut r))
            .collect::<Result<Vec<_>>>()?;
        let bias = (0..n_out).map(|_| read_f64(&mut r)).collect::<Result<Vec<_>>>()?;
        layers.push(Layer {
            weight: Matrix::from_vec(n_out, n_in, weights)?,
            bias,
        });
    }
    MlpParams::from_layers(spec, layers)
}

pub(crate) fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub(crate) fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub(crate) fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
