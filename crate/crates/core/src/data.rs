//! Toy 2-D target distributions and the generator's latent prior.
//!
//! Geometry follows the common WGAN-GP toy setup: 8 Gaussians on a circle of
//! radius 2, a 5x5 grid with spacing 2, and a noisy Swiss roll, each rescaled
//! to roughly unit spread.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Matrix, RngState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DatasetKind {
    #[serde(rename = "8gaussians")]
    EightGaussians,
    #[serde(rename = "25gaussians")]
    TwentyFiveGaussians,
    #[serde(rename = "swissroll")]
    SwissRoll,
}

impl DatasetKind {
    pub const ALL: [DatasetKind; 3] = [
        DatasetKind::EightGaussians,
        DatasetKind::TwentyFiveGaussians,
        DatasetKind::SwissRoll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::EightGaussians => "8gaussians",
            DatasetKind::TwentyFiveGaussians => "25gaussians",
            DatasetKind::SwissRoll => "swissroll",
        }
    }
}

impl std::str::FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DatasetKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown dataset {s:?}")))
    }
}

/// Dataset with its geometric constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dataset {
    pub kind: DatasetKind,
    /// Radius (8 Gaussians), grid spacing (25 Gaussians) or unused (Swiss roll).
    pub spread: f64,
    /// Per-coordinate noise std before rescaling.
    pub noise: f64,
    /// Every point is divided by this.
    pub divisor: f64,
}

impl Dataset {
    pub fn standard(kind: DatasetKind) -> Self {
        match kind {
            DatasetKind::EightGaussians => Dataset {
                kind,
                spread: 2.0,
                noise: 0.02,
                divisor: 1.414,
            },
            DatasetKind::TwentyFiveGaussians => Dataset {
                kind,
                spread: 2.0,
                noise: 0.05,
                divisor: 2.828,
            },
            DatasetKind::SwissRoll => Dataset {
                kind,
                spread: 1.0,
                noise: 0.25,
                divisor: 7.5,
            },
        }
    }

    /// Mixture centers after rescaling (empty for the Swiss roll).
    pub fn centers(&self) -> Vec<[f64; 2]> {
        match self.kind {
            DatasetKind::EightGaussians => (0..8)
                .map(|k| {
                    let a = k as f64 * PI / 4.0;
                    [
                        self.spread * a.cos() / self.divisor,
                        self.spread * a.sin() / self.divisor,
                    ]
                })
                .collect(),
            DatasetKind::TwentyFiveGaussians => {
                let mut c = Vec::with_capacity(25);
                for i in -2..=2 {
                    for j in -2..=2 {
                        c.push([
                            self.spread * i as f64 / self.divisor,
                            self.spread * j as f64 / self.divisor,
                        ]);
                    }
                }
                c
            }
            DatasetKind::SwissRoll => Vec::new(),
        }
    }

    /// Box containing essentially all mass, as `(x_min, x_max, y_min, y_max)`.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        let half = match self.kind {
            DatasetKind::EightGaussians => (self.spread + 3.0 * self.noise) / self.divisor,
            DatasetKind::TwentyFiveGaussians => (2.0 * self.spread + 3.0 * self.noise) / self.divisor,
            // max t = 4.5π.
            DatasetKind::SwissRoll => (4.5 * PI + 3.0 * self.noise) / self.divisor,
        };
        (-half, half, -half, half)
    }

    pub fn sample(&self, n: usize, rng: &mut RngState) -> Matrix {
        let mut out = Matrix::zeros(n, 2);
        match self.kind {
            DatasetKind::EightGaussians | DatasetKind::TwentyFiveGaussians => {
                let centers = self.centers();
                for r in 0..n {
                    let c = centers[rng.below(centers.len() as u64) as usize];
                    let z = rng.standard_normal(2);
                    out[(r, 0)] = c[0] + self.noise * z[0] / self.divisor;
                    out[(r, 1)] = c[1] + self.noise * z[1] / self.divisor;
                }
            }
            DatasetKind::SwissRoll => {
                for r in 0..n {
                    let u = rng.uniform();
                    let t = 1.5 * PI * (1.0 + 2.0 * u);
                    let z = rng.standard_normal(2);
                    out[(r, 0)] = (t * t.cos() + self.noise * z[0]) / self.divisor;
                    out[(r, 1)] = (t * t.sin() + self.noise * z[1]) / self.divisor;
                }
            }
        }
        out
    }
}

/// `n` samples from the standard geometry of `kind`.
pub fn sample_real(kind: DatasetKind, n: usize, rng: &mut RngState) -> Matrix {
    Dataset::standard(kind).sample(n, rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatentSpec {
    pub dim: usize,
}

impl Default for LatentSpec {
    fn default() -> Self {
        LatentSpec { dim: 2 }
    }
}

/// I.i.d. standard normal latent codes.
pub fn sample_latent(spec: LatentSpec, n: usize, rng: &mut RngState) -> Matrix {
    rng.normal_matrix(n, spec.dim)
}
