use proptest::prelude::*;

use wganlab_core::nn::{forward, init_params, input_gradient, MlpSpec};
use wganlab_core::numerics::{matmul, matmul_nt, matmul_tn, spectral_norm};
use wganlab_core::optim::{RmsPropConfig, RmsPropState};
use wganlab_core::regularizers::{clip_weights, grad_norm_penalty, ratio_penalty, GradPenalty};
use wganlab_core::transport::{brute_force_assignment, emd_empirical, hungarian};
use wganlab_core::{Matrix, RngState};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-3.0f64..3.0, rows * cols).prop_map(move |v| Matrix::from_vec(rows, cols, v).unwrap())
}

fn dims() -> impl Strategy<Value = (usize, usize, usize, usize)> {
    (1usize..6, 1usize..6, 1usize..6, 1usize..6)
}

fn close(a: &Matrix, b: &Matrix, tol: f64) -> bool {
    a.shape() == b.shape() && a.as_slice().iter().zip(b.as_slice()).all(|(x, y)| (x - y).abs() <= tol)
}

proptest! {
    #[test]
    fn matmul_is_associative(((m, k, l, n), seed) in (dims(), any::<u64>())) {
        let mut rng = RngState::new(seed);
        let a = rng.normal_matrix(m, k);
        let b = rng.normal_matrix(k, l);
        let c = rng.normal_matrix(l, n);
        let left = matmul(&matmul(&a, &b).unwrap(), &c).unwrap();
        let right = matmul(&a, &matmul(&b, &c).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-10));
    }

    #[test]
    fn transposed_products_agree(((m, k, n, _), seed) in (dims(), any::<u64>())) {
        let mut rng = RngState::new(seed);
        let a = rng.normal_matrix(k, m);
        let b = rng.normal_matrix(k, n);
        let tn = matmul_tn(&a, &b).unwrap();
        prop_assert!(close(&tn, &matmul(&a.transpose(), &b).unwrap(), 1e-12));
        let c = rng.normal_matrix(n, m);
        let nt = matmul_nt(&a, &c).unwrap();
        prop_assert!(close(&nt, &matmul(&a, &c.transpose()).unwrap(), 1e-12));
    }

    #[test]
    fn spectral_norm_is_bracketed(a in (1usize..6, 1usize..6).prop_flat_map(|(r, c)| matrix(r, c))) {
        let s = spectral_norm(&a, 1e-12).unwrap();
        let max_row = a.row_norms().into_iter().fold(0.0, f64::max);
        prop_assert!(s <= a.frobenius_norm() * (1.0 + 1e-9) + 1e-12);
        prop_assert!(s >= max_row * (1.0 - 1e-6) - 1e-9);
        prop_assert!((spectral_norm(&a.transpose(), 1e-12).unwrap() - s).abs() <= 1e-6 * s.max(1.0));
        prop_assert!((spectral_norm(&a.scale(-2.5), 1e-12).unwrap() - 2.5 * s).abs() <= 1e-6 * s.max(1.0));
    }

    #[test]
    fn lp_never_exceeds_gp(norm in 0.0f64..10.0) {
        let lp = grad_norm_penalty(norm, GradPenalty::Lp).unwrap();
        let gp = grad_norm_penalty(norm, GradPenalty::Gp).unwrap();
        prop_assert!(0.0 <= lp && lp <= gp);
        if norm >= 1.0 {
            prop_assert_eq!(lp, gp);
        } else {
            prop_assert_eq!(lp, 0.0);
        }
    }

    #[test]
    fn clipping_is_idempotent_and_bounded(seed in any::<u64>(), c_max in 0.001f64..2.0) {
        let mut rng = RngState::new(seed);
        let spec = MlpSpec::new(vec![2, 5, 3, 1], 0.2).unwrap();
        let mut p = init_params(&spec, &mut rng).unwrap();
        for v in p.values_mut() {
            *v *= 10.0;
        }
        let once = clip_weights(&p, c_max);
        prop_assert!(once.values().all(|v| v.abs() <= c_max));
        prop_assert_eq!(clip_weights(&once, c_max), once);
    }

    #[test]
    fn ratio_penalty_is_symmetric(f_x in -5.0f64..5.0, f_y in -5.0f64..5.0, dist in 1e-3f64..5.0, p in 1u32..4, one_sided: bool) {
        prop_assert_eq!(ratio_penalty(f_x, f_y, dist, p, one_sided), ratio_penalty(f_y, f_x, dist, p, one_sided));
        prop_assert!(ratio_penalty(f_x, f_y, dist, p, one_sided).unwrap() >= 0.0);
    }

    #[test]
    fn hungarian_matches_brute_force(n in 1usize..7, seed in any::<u64>()) {
        let mut rng = RngState::new(seed);
        let cost = Matrix::from_fn(n, n, |_, _| rng.uniform_range(0.0, 10.0));
        let fast = hungarian(&cost).unwrap();
        let slow = brute_force_assignment(&cost).unwrap();
        prop_assert!((fast.total - slow.total).abs() < 1e-9);
        let mut seen = fast.perm.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn emd_is_a_metric(n in 1usize..7, seed in any::<u64>()) {
        let mut rng = RngState::new(seed);
        let a = rng.normal_matrix(n, 2);
        let b = rng.normal_matrix(n, 2);
        let c = rng.normal_matrix(n, 2);
        let ab = emd_empirical(&a, &b).unwrap();
        prop_assert_eq!(emd_empirical(&a, &a).unwrap(), 0.0);
        prop_assert!((ab - emd_empirical(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!(ab <= emd_empirical(&a, &c).unwrap() + emd_empirical(&c, &b).unwrap() + 1e-12);
        // Reordering the points of one side does not change the value.
        let reversed = Matrix::from_fn(n, 2, |r, col| b[(n - 1 - r, col)]);
        prop_assert!((emd_empirical(&a, &reversed).unwrap() - ab).abs() < 1e-12);
    }

    #[test]
    fn rmsprop_zero_gradient_keeps_parameters(seed in any::<u64>()) {
        let mut rng = RngState::new(seed);
        let spec = MlpSpec::new(vec![2, 4, 1], 0.2).unwrap();
        let mut p = init_params(&spec, &mut rng).unwrap();
        let before = p.clone();
        let mut state = RmsPropState::new(RmsPropConfig::default(), &p);
        let zero = p.zero_grads();
        state.step(&mut p, &zero).unwrap();
        prop_assert_eq!(p, before);
    }

    #[test]
    fn input_gradient_of_linear_critic_is_its_weight(w0 in -3.0f64..3.0, w1 in -3.0f64..3.0, seed in any::<u64>()) {
        let spec = MlpSpec::new(vec![2, 1], 0.2).unwrap();
        let mut p = init_params(&spec, &mut RngState::new(seed)).unwrap();
        p.layers_mut()[0].weight = Matrix::from_rows(&[[w0, w1]]).unwrap();
        let x = RngState::new(seed ^ 1).normal_matrix(4, 2);
        let (_, trace) = forward(&p, &x).unwrap();
        let g = input_gradient(&p, &trace).unwrap();
        for r in 0..4 {
            prop_assert_eq!(g.row(r), &[w0, w1]);
        }
    }
}
