//! Oracle suites behind `wganlab verify`.
//!
//! Every check compares a computed value against an independent reference
//! (finite differences, permutation brute force, quadrature, a closed form)
//! and reports the measured discrepancy next to its tolerance.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::time::Instant;

use statrs::function::erf::erf;
use wganlab_core::lipschitz::{
    alpha_bar, construct_exhausting_params, empirical_lipschitz, random_clipped_params, ArchSignature, SampleRegion,
};
use wganlab_core::nn::gradcheck::{fd_input_gradient, fd_param_gradient, max_relative_error};
use wganlab_core::nn::{evaluate, forward, init_params, input_gradient, MlpParams, MlpSpec};
use wganlab_core::regularizers::{grad_norm_penalty, RegularizerSpec};
use wganlab_core::training::critic_objective;
use wganlab_core::transport::{
    brute_force_assignment, duality_report, emd_empirical, euclidean_cost, hungarian, trapezoid, w1_1d_cdf, Coupling,
    CriticAssignment,
};
use wganlab_core::{Matrix, Result, RngState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Gradcheck,
    Hungarian,
    Duality,
    Gaussian,
    Clipping,
    All,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

pub fn run(suite: Suite) -> Result<Vec<Check>> {
    match suite {
        Suite::Gradcheck => gradcheck(),
        Suite::Hungarian => hungarian_suite(),
        Suite::Duality => duality(),
        Suite::Gaussian => gaussian(),
        Suite::Clipping => clipping(),
        Suite::All => {
            let mut all = Vec::new();
            for s in [Suite::Gradcheck, Suite::Hungarian, Suite::Duality, Suite::Gaussian, Suite::Clipping] {
                all.extend(run(s)?);
            }
            Ok(all)
        }
    }
}

pub const GRADCHECK_CRITICS: usize = 20;
pub const PARAM_GRAD_TOL: f64 = 1e-4;
pub const INPUT_GRAD_TOL: f64 = 1e-5;
/// Below this magnitude gradients are compared absolutely: central
/// differences at step 1e-5 carry roundoff of order 1e-10 on loss values
/// near 10.
const GRAD_FLOOR: f64 = 1e-4;
const KINK_MARGIN: f64 = 1e-3;

fn random_critic(rng: &mut RngState) -> Result<MlpParams> {
    let spec = MlpSpec::new(vec![2, 16, 16, 16, 1], 0.2)?;
    let mut p = init_params(&spec, rng)?;
    let scale = rng.uniform_range(0.8, 2.5);
    for v in p.values_mut() {
        *v *= scale;
    }
    for layer in p.layers_mut() {
        for b in &mut layer.bias {
            *b = rng.uniform_range(-0.2, 0.2);
        }
    }
    Ok(p)
}

fn kink_free_batch(p: &MlpParams, n: usize, rng: &mut RngState) -> Result<Matrix> {
    let mut rows = Vec::with_capacity(n);
    while rows.len() < n {
        let x = [rng.uniform_range(-2.0, 2.0), rng.uniform_range(-2.0, 2.0)];
        let (_, trace) = forward(p, &Matrix::from_rows(&[x])?)?;
        if trace.min_kink_distance() > KINK_MARGIN {
            rows.push(x);
        }
    }
    Matrix::from_rows(&rows)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Critic loss plus gradient-norm penalty, recomputed from forward passes.
fn penalized_loss(p: &MlpParams, reg: RegularizerSpec, real: &Matrix, gen: &Matrix, points: &Matrix) -> Result<f64> {
    let d = mean(evaluate(p, gen)?.as_slice()) - mean(evaluate(p, real)?.as_slice());
    let (_, trace) = forward(p, points)?;
    let kind = reg.grad_penalty().expect("gradient-norm regularizer");
    let terms = input_gradient(p, &trace)?
        .row_norms()
        .into_iter()
        .map(|n| grad_norm_penalty(n, kind))
        .collect::<Result<Vec<_>>>()?;
    Ok(d + reg.lambda() * mean(&terms))
}

/// Largest relative errors over the random critics: (LP, GP, input).
pub fn gradient_errors(critics: usize) -> Result<(f64, f64, f64)> {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for seed in 0..critics as u64 {
        let mut rng = RngState::new(seed);
        let p = random_critic(&mut rng)?;
        let real = kink_free_batch(&p, 6, &mut rng)?;
        let gen = kink_free_batch(&p, 6, &mut rng)?;
        let points = kink_free_batch(&p, 6, &mut rng)?;
        for (reg, slot) in [
            (RegularizerSpec::Lp { lambda: 10.0 }, &mut worst.0),
            (RegularizerSpec::Gp { lambda: 10.0 }, &mut worst.1),
        ] {
            let (_, grads) = critic_objective(&p, reg, &real, &gen, &points, false)?;
            let numeric = fd_param_gradient(&p, |q| penalized_loss(q, reg, &real, &gen, &points))?;
            *slot = slot.max(max_relative_error(&grads.to_flat(), &numeric, GRAD_FLOOR).0);
        }
        let (_, trace) = forward(&p, &points)?;
        let analytic = input_gradient(&p, &trace)?;
        let numeric = fd_input_gradient(&p, &points, 1e-6)?;
        worst.2 = worst.2.max(max_relative_error(analytic.as_slice(), numeric.as_slice(), GRAD_FLOOR).0);
    }
    Ok(worst)
}

fn gradcheck() -> Result<Vec<Check>> {
    let start = Instant::now();
    let (lp, gp, input) = gradient_errors(GRADCHECK_CRITICS)?;
    let secs = start.elapsed().as_secs_f64();
    let n = GRADCHECK_CRITICS;
    Ok(vec![
        Check::new(
            "gradcheck.lp_parameters",
            lp < PARAM_GRAD_TOL,
            format!("max relative error {lp:.3e} over {n} critics (tol {PARAM_GRAD_TOL:e})"),
        ),
        Check::new(
            "gradcheck.gp_parameters",
            gp < PARAM_GRAD_TOL,
            format!("max relative error {gp:.3e} over {n} critics (tol {PARAM_GRAD_TOL:e})"),
        ),
        Check::new(
            "gradcheck.input",
            input < INPUT_GRAD_TOL,
            format!("max relative error {input:.3e} over {n} critics (tol {INPUT_GRAD_TOL:e})"),
        ),
        Check::new("gradcheck.runtime", secs < 30.0, format!("{secs:.2} s (limit 30 s)")),
    ])
}

pub const HUNGARIAN_INSTANCES: usize = 500;

fn hungarian_suite() -> Result<Vec<Check>> {
    let mut rng = RngState::new(2);
    let mut matches = 0;
    let mut worst = 0.0f64;
    for _ in 0..HUNGARIAN_INSTANCES {
        let n = 2 + rng.below(6) as usize;
        let cost = Matrix::from_fn(n, n, |_, _| rng.uniform_range(0.0, 10.0));
        let diff = (hungarian(&cost)?.total - brute_force_assignment(&cost)?.total).abs();
        worst = worst.max(diff);
        if diff <= 1e-9 {
            matches += 1;
        }
    }
    let a = rng.normal_matrix(500, 2);
    let b = rng.normal_matrix(500, 2);
    let start = Instant::now();
    let value = emd_empirical(&a, &b)?;
    let secs = start.elapsed().as_secs_f64();
    Ok(vec![
        Check::new(
            "hungarian.brute_force",
            matches == HUNGARIAN_INSTANCES,
            format!("{matches}/{HUNGARIAN_INSTANCES} matches, max |difference| {worst:.1e} (tol 1e-9)"),
        ),
        Check::new(
            "hungarian.500x500",
            secs < 1.0 && value.is_finite(),
            format!("EMD {value:.6} in {secs:.3} s (limit 1 s)"),
        ),
    ])
}

fn assignment(points: &[&[f64]], values: &[f64]) -> Result<CriticAssignment> {
    CriticAssignment::new(Matrix::from_rows(points)?, values.to_vec())
}

/// Unit square with generated points on the right: `f = 1, a + 1` at
/// `(1,0), (1,1)` and `f = 0, a` at `(0,0), (0,1)`, horizontally coupled.
pub fn unit_square(a: f64) -> Result<(CriticAssignment, CriticAssignment, Coupling)> {
    Ok((
        assignment(&[&[1.0, 0.0], &[1.0, 1.0]], &[1.0, a + 1.0])?,
        assignment(&[&[0.0, 0.0], &[0.0, 1.0]], &[0.0, a])?,
        Coupling::new(vec![(0, 0, 0.5), (1, 1, 0.5)]),
    ))
}

/// Two generated points at 0 with `f = 1`, real points at ±1 with `f = 0`.
pub fn kink_configuration() -> Result<(CriticAssignment, CriticAssignment, Coupling)> {
    Ok((
        assignment(&[&[0.0], &[0.0]], &[1.0, 1.0])?,
        assignment(&[&[-1.0], &[1.0]], &[0.0, 0.0])?,
        Coupling::new(vec![(0, 0, 0.5), (1, 1, 0.5)]),
    ))
}

fn duality() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let (a, b, c) = kink_configuration()?;
    let r = duality_report(&a, &b, &c)?;
    checks.push(Check::new(
        "duality.kink",
        r.gap.abs() < 1e-9 && r.lipschitz_feasible && r.exhausted_pairs,
        format!("gap {:.1e}, primal {}, feasible {}, exhausted {}", r.gap, r.primal, r.lipschitz_feasible, r.exhausted_pairs),
    ));
    for a_val in [-0.41, 0.0, 0.41] {
        let (a, b, c) = unit_square(a_val)?;
        let r = duality_report(&a, &b, &c)?;
        let optimal = hungarian(&euclidean_cost(&a.points, &b.points)?)?.total / 2.0;
        checks.push(Check::new(
            &format!("duality.unit_square(a={a_val})"),
            r.gap.abs() < 1e-9 && r.lipschitz_feasible && r.exhausted_pairs && (optimal - r.primal).abs() < 1e-12,
            format!(
                "gap {:.1e}, feasible {}, exhausted {}, assignment optimum {optimal}",
                r.gap, r.lipschitz_feasible, r.exhausted_pairs
            ),
        ));
    }
    for a_val in [0.5, SQRT_2 - 1.0 + 1e-6] {
        let (a, b, c) = unit_square(a_val)?;
        let r = duality_report(&a, &b, &c)?;
        let excess = r.worst_violation.map_or(0.0, |v| v.2);
        checks.push(Check::new(
            &format!("duality.unit_square_infeasible(a={a_val})"),
            !r.lipschitz_feasible,
            format!("feasible {}, worst excess {excess:.3e}", r.lipschitz_feasible),
        ));
    }
    Ok(checks)
}

pub const GAUSSIAN_W1: f64 = 0.368745;

fn normal_pdf(x: f64, mu: f64) -> f64 {
    (-(x - mu) * (x - mu) / 2.0).exp() / (2.0 * PI).sqrt()
}

/// W₁ between `N(0,1)` and `½N(−1,1) + ½N(1,1)`: by the CDF integral, by
/// the critic `−|x|`, and in closed form.
pub fn gaussian_w1() -> Result<(f64, f64, f64)> {
    let n = 200_001;
    let xs: Vec<f64> = (0..n).map(|i| -10.0 + 20.0 * i as f64 / (n - 1) as f64).collect();
    let mu: Vec<f64> = xs.iter().map(|&x| normal_pdf(x, 0.0)).collect();
    let nu: Vec<f64> = xs
        .iter()
        .map(|&x| 0.5 * normal_pdf(x, -1.0) + 0.5 * normal_pdf(x, 1.0))
        .collect();
    let by_cdf = w1_1d_cdf(&xs, &mu, &nu)?;
    let weighted = |d: &[f64]| -> Vec<f64> { xs.iter().zip(d).map(|(x, p)| x.abs() * p).collect() };
    let by_critic = trapezoid(&xs, &weighted(&nu)) - trapezoid(&xs, &weighted(&mu));
    let c = (2.0 / PI).sqrt();
    let closed = c * (-0.5f64).exp() + erf(1.0 / SQRT_2) - c;
    Ok((by_cdf, by_critic, closed))
}

fn gaussian() -> Result<Vec<Check>> {
    let start = Instant::now();
    let (cdf, critic, closed) = gaussian_w1()?;
    let secs = start.elapsed().as_secs_f64();
    Ok(vec![
        Check::new(
            "gaussian.cdf_vs_critic",
            (cdf - critic).abs() < 1e-4,
            format!("CDF integral {cdf:.9}, critic quadrature {critic:.9} (tol 1e-4)"),
        ),
        Check::new(
            "gaussian.constant",
            (cdf - GAUSSIAN_W1).abs() < 1e-4 && (critic - GAUSSIAN_W1).abs() < 1e-4,
            format!("both within {:.2e} of {GAUSSIAN_W1} (tol 1e-4)", (cdf - GAUSSIAN_W1).abs().max((critic - GAUSSIAN_W1).abs())),
        ),
        Check::new(
            "gaussian.closed_form",
            (closed - cdf).abs() < 1e-4,
            format!("closed form {closed:.9}"),
        ),
        Check::new("gaussian.runtime", secs < 5.0, format!("{secs:.2} s (limit 5 s)")),
    ])
}

pub const CLIP_ARCHS: [&[usize]; 3] = [&[2, 3, 1], &[2, 8, 8, 1], &[3, 5, 4, 1]];
pub const CLIP_RANDOM_NETS: usize = 200;

fn clipping() -> Result<Vec<Check>> {
    let start = Instant::now();
    let arch = ArchSignature::new(vec![2, 3, 1], 0.5)?;
    let bound = alpha_bar(&arch);
    let net = construct_exhausting_params(&arch, &[1.0, 1.0])?;
    let witness = net.witness_ratio()?;
    let region = SampleRegion::cube(-2.0, 2.0).with_points(vec![net.witness_x.clone(), net.witness_y.clone()]);
    let estimate = empirical_lipschitz(&net.params, &region, 100, &mut RngState::new(1))?;
    let mut checks = vec![
        Check::new(
            "clipping.alpha_bar",
            (bound - 1.060660).abs() < 1e-6,
            format!("arch [2, 3, 1], c_max 0.5: alpha_bar {bound:.9}"),
        ),
        Check::new(
            "clipping.witness",
            (witness - bound).abs() < 1e-9 && (estimate - bound).abs() < 1e-9,
            format!("witness ratio {witness:.12}, estimator {estimate:.12} (tol 1e-9)"),
        ),
    ];

    let mut rng = RngState::new(2024);
    let mut checked = 0;
    let mut closest = f64::INFINITY;
    let mut worst_ratio = 0.0f64;
    for (k, widths) in CLIP_ARCHS.iter().enumerate() {
        let arch = ArchSignature::new(widths.to_vec(), 0.5)?;
        let bound = alpha_bar(&arch);
        let share = CLIP_RANDOM_NETS / CLIP_ARCHS.len() + usize::from(k < CLIP_RANDOM_NETS % CLIP_ARCHS.len());
        for _ in 0..share {
            let p = random_clipped_params(&arch, &mut rng)?;
            let est = empirical_lipschitz(&p, &SampleRegion::cube(-3.0, 3.0), 400, &mut rng)?;
            closest = closest.min(bound - est);
            worst_ratio = worst_ratio.max(est / bound);
            checked += 1;
        }
    }
    checks.push(Check::new(
        "clipping.random_nets",
        closest > 1e-6,
        format!("{checked} nets, largest estimate {:.4} of alpha_bar, min margin {closest:.3e} (need > 1e-6)", worst_ratio),
    ));
    let secs = start.elapsed().as_secs_f64();
    checks.push(Check::new("clipping.runtime", secs < 30.0, format!("{secs:.2} s (limit 30 s)")));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_matches_constant() {
        let (cdf, critic, closed) = gaussian_w1().unwrap();
        assert!((closed - GAUSSIAN_W1).abs() < 5e-6);
        assert!((cdf - closed).abs() < 1e-6);
        assert!((critic - closed).abs() < 1e-6);
    }

    #[test]
    fn duality_suite_passes() {
        assert!(run(Suite::Duality).unwrap().iter().all(|c| c.passed));
    }

    #[test]
    fn check_line_format() {
        let c = Check::new("x", false, "detail".into());
        assert_eq!(c.to_string(), "FAIL x: detail");
    }
}
