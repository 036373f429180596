use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{euclidean_distance, Matrix};

/// Slack allowed in Lipschitz and exhaustion checks, and in coupling marginals.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Weighted pairing of two finite point sets with uniform marginals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    /// `(index into A, index into B, weight)`.
    pub pairs: Vec<(usize, usize, f64)>,
}

impl Coupling {
    pub fn new(pairs: Vec<(usize, usize, f64)>) -> Self {
        Coupling { pairs }
    }

    /// Checks positivity, total mass 1 and uniform marginals over `n_a`/`n_b`
    /// points, each within [`FEASIBILITY_TOL`].
    pub fn validate(&self, n_a: usize, n_b: usize) -> Result<()> {
        if n_a == 0 || n_b == 0 {
            return Err(Error::invalid("coupling between empty point sets"));
        }
        let mut row_mass = vec![0.0; n_a];
        let mut col_mass = vec![0.0; n_b];
        for &(i, j, w) in &self.pairs {
            if i >= n_a || j >= n_b {
                return Err(Error::invalid(format!("coupling pair ({i}, {j}) out of range")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!("coupling weight {w} must be positive")));
            }
            row_mass[i] += w;
            col_mass[j] += w;
        }
        for (side, masses, n) in [("A", &row_mass, n_a), ("B", &col_mass, n_b)] {
            let target = 1.0 / n as f64;
            if let Some((k, m)) = masses
                .iter()
                .enumerate()
                .find(|(_, m)| (**m - target).abs() > FEASIBILITY_TOL)
            {
                return Err(Error::invalid(format!(
                    "marginal of {side}[{k}] is {m}, expected {target}"
                )));
            }
        }
        Ok(())
    }
}

/// Points of one side with the critic value at each.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticAssignment {
    pub points: Matrix,
    pub values: Vec<f64>,
}

impl CriticAssignment {
    pub fn new(points: Matrix, values: Vec<f64>) -> Result<Self> {
        if points.rows() != values.len() {
            return Err(Error::shape(
                "CriticAssignment",
                format!("{} values", points.rows()),
                format!("{}", values.len()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("critic values".into()));
        }
        Ok(CriticAssignment { points, values })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualityReport {
    /// `Σ w_ij ‖a_i − b_j‖`.
    pub primal: f64,
    /// `mean f(A) − mean f(B)`.
    pub dual: f64,
    pub gap: f64,
    /// `|f(p) − f(q)| ≤ ‖p − q‖ + tol` for every pair drawn from `A ∪ B`.
    pub lipschitz_feasible: bool,
    /// Every coupled pair satisfies `|f(a) − f(b)| = ‖a − b‖` within tol.
    pub exhausted_pairs: bool,
    /// Most violated pair `(p, q)` over `A ∪ B` (indices into A then B) and its
    /// excess, if infeasible.
    pub worst_violation: Option<(usize, usize, f64)>,
}

/// Primal cost of `coupling`, dual value of the critic, and the Kantorovich
/// optimality checks. `a` is the side the critic should rank higher.
pub fn duality_report(a: &CriticAssignment, b: &CriticAssignment, coupling: &Coupling) -> Result<DualityReport> {
    if a.points.cols() != b.points.cols() {
        return Err(Error::shape(
            "duality_report",
            format!("{}-dimensional points", a.points.cols()),
            format!("{}-dimensional", b.points.cols()),
        ));
    }
    coupling.validate(a.points.rows(), b.points.rows())?;

    let primal: f64 = coupling
        .pairs
        .iter()
        .map(|&(i, j, w)| w * euclidean_distance(a.points.row(i), b.points.row(j)))
        .sum();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let dual = mean(&a.values) - mean(&b.values);

    let all: Vec<(&[f64], f64)> = a
        .points
        .row_iter()
        .zip(a.values.iter().copied())
        .chain(b.points.row_iter().zip(b.values.iter().copied()))
        .collect();
    let mut worst: Option<(usize, usize, f64)> = None;
    for p in 0..all.len() {
        for q in p + 1..all.len() {
            let excess = (all[p].1 - all[q].1).abs() - euclidean_distance(all[p].0, all[q].0);
            if excess > FEASIBILITY_TOL && worst.map_or(true, |(_, _, e)| excess > e) {
                worst = Some((p, q, excess));
            }
        }
    }

    let exhausted_pairs = coupling.pairs.iter().all(|&(i, j, _)| {
        let dist = euclidean_distance(a.points.row(i), b.points.row(j));
        ((a.values[i] - b.values[j]).abs() - dist).abs() <= FEASIBILITY_TOL
    });

    Ok(DualityReport {
        primal,
        dual,
        gap: primal - dual,
        lipschitz_feasible: worst.is_none(),
        exhausted_pairs,
        worst_violation: worst,
    })
}

/// JSON fixture: two valued point sets and the coupling between them.
///
/// ```json
/// {"a": {"points": [[0.0]], "values": [1.0]},
///  "b": {"points": [[1.0]], "values": [0.0]},
///  "coupling": [[0, 0, 1.0]]}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualityFixture {
    pub a: FixtureSide,
    pub b: FixtureSide,
    pub coupling: Vec<(usize, usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureSide {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

impl FixtureSide {
    fn to_assignment(&self) -> Result<CriticAssignment> {
        CriticAssignment::new(Matrix::from_rows(&self.points)?, self.values.clone())
    }
}

impl DualityFixture {
    pub fn report(&self) -> Result<DualityReport> {
        duality_report(
            &self.a.to_assignment()?,
            &self.b.to_assignment()?,
            &Coupling::new(self.coupling.clone()),
        )
    }
}
