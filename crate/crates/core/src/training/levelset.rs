//! Critic values on a regular 2-D grid, with CSV, PGM and JSON writers.
//!
//! Grid row `r` holds `y = y_min + r·Δy` and column `c` holds
//! `x = x_min + c·Δx`, both ends included. Rendered images therefore have `y`
//! increasing downward.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{evaluate, MlpParams};
use crate::numerics::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let b = Bounds { x_min, x_max, y_min, y_max };
        if !(x_min < x_max && y_min < y_max) || [x_min, x_max, y_min, y_max].iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("degenerate bounds {b:?}")));
        }
        Ok(b)
    }

    /// `(x_min, x_max, y_min, y_max)` widened by `fraction` of each side length.
    pub fn with_margin(bbox: (f64, f64, f64, f64), fraction: f64) -> Self {
        let (x0, x1, y0, y1) = bbox;
        let mx = (x1 - x0) * fraction;
        let my = (y1 - y0) * fraction;
        Bounds {
            x_min: x0 - mx,
            x_max: x1 + mx,
            y_min: y0 - my,
            y_max: y1 + my,
        }
    }

    pub fn node(&self, resolution: usize, row: usize, col: usize) -> (f64, f64) {
        let step = (resolution - 1) as f64;
        (
            self.x_min + (self.x_max - self.x_min) * col as f64 / step,
            self.y_min + (self.y_max - self.y_min) * row as f64 / step,
        )
    }
}

/// `f` on a `resolution x resolution` grid, row-major (rows are `y`).
pub fn levelset_grid(critic: &MlpParams, bounds: Bounds, resolution: usize) -> Result<Matrix> {
    if resolution < 2 {
        return Err(Error::invalid("levelset resolution must be >= 2"));
    }
    if critic.spec().input_dim() != 2 || critic.spec().output_dim() != 1 {
        return Err(Error::shape("levelset_grid", "2-D scalar critic", format!("{:?}", critic.spec().widths)));
    }
    let nodes = Matrix::from_fn(resolution * resolution, 2, |i, c| {
        let (x, y) = bounds.node(resolution, i / resolution, i % resolution);
        if c == 0 {
            x
        } else {
            y
        }
    });
    let values = evaluate(critic, &nodes)?;
    Matrix::from_vec(resolution, resolution, values.into_vec())
}

/// A level-set grid taken at a given generator iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSet {
    pub iteration: usize,
    pub bounds: Bounds,
    pub grid: Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSetMeta {
    pub iteration: usize,
    pub resolution: usize,
    pub bounds: Bounds,
    /// Values mapped to 0 and 255 in the PGM.
    pub min: f64,
    pub max: f64,
    pub row_axis: String,
}

impl LevelSet {
    pub fn resolution(&self) -> usize {
        self.grid.rows()
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.grid
            .as_slice()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// `x,y,f` rows in grid order.
    pub fn to_csv(&self) -> String {
        let res = self.resolution();
        let mut out = String::from("x,y,f\n");
        for r in 0..res {
            for c in 0..res {
                let (x, y) = self.bounds.node(res, r, c);
                let _ = writeln!(out, "{x},{y},{}", self.grid[(r, c)]);
            }
        }
        out
    }

    /// Binary PGM (P5), min–max normalized to 0..=255. A constant grid maps to 0.
    pub fn to_pgm(&self) -> Vec<u8> {
        let res = self.resolution();
        let (lo, hi) = self.min_max();
        let mut out = format!("P5\n{res} {res}\n255\n").into_bytes();
        let span = hi - lo;
        out.extend(self.grid.as_slice().iter().map(|&v| {
            if span > 0.0 {
                (255.0 * (v - lo) / span).round().clamp(0.0, 255.0) as u8
            } else {
                0
            }
        }));
        out
    }

    pub fn meta(&self) -> LevelSetMeta {
        let (min, max) = self.min_max();
        LevelSetMeta {
            iteration: self.iteration,
            resolution: self.resolution(),
            bounds: self.bounds,
            min,
            max,
            row_axis: "y increasing with row index (downward in the image)".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Layer, MlpSpec};

    fn linear_critic(w: [f64; 2], b: f64) -> MlpParams {
        MlpParams::from_layers(
            MlpSpec::new(vec![2, 1], 0.2).unwrap(),
            vec![Layer {
                weight: Matrix::from_rows(&[w]).unwrap(),
                bias: vec![b],
            }],
        )
        .unwrap()
    }

    #[test]
    fn constant_critic_constant_grid() {
        let grid = levelset_grid(&linear_critic([0.0, 0.0], 1.5), Bounds::new(-1.0, 1.0, -1.0, 1.0).unwrap(), 5).unwrap();
        assert!(grid.as_slice().iter().all(|&v| v == 1.5));
        let ls = LevelSet {
            iteration: 1,
            bounds: Bounds::new(-1.0, 1.0, -1.0, 1.0).unwrap(),
            grid,
        };
        assert!(ls.to_pgm()[ls.to_pgm().len() - 25..].iter().all(|&b| b == 0));
    }

    #[test]
    fn first_coordinate_critic() {
        let bounds = Bounds::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let grid = levelset_grid(&linear_critic([1.0, 0.0], 0.0), bounds, 3).unwrap();
        for r in 0..3 {
            assert_eq!(grid.row(r), &[-1.0, 0.0, 1.0]);
        }
    }

    #[test]
    fn pgm_layout() {
        let bounds = Bounds::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let grid = levelset_grid(&linear_critic([0.0, 1.0], 0.0), bounds, 2).unwrap();
        let ls = LevelSet { iteration: 3, bounds, grid };
        let pgm = ls.to_pgm();
        assert!(pgm.starts_with(b"P5\n2 2\n255\n"));
        assert_eq!(&pgm[pgm.len() - 4..], &[0, 0, 255, 255]);
        assert_eq!(ls.to_csv().lines().count(), 5);
    }

    #[test]
    fn resolution_must_be_at_least_two() {
        assert!(levelset_grid(&linear_critic([1.0, 0.0], 0.0), Bounds::new(0.0, 1.0, 0.0, 1.0).unwrap(), 1).is_err());
    }
}
