mod common;

use common::{
    ball_projection_oracle, dense_vec, gaussian_matrix, matrix_prox_objective, matrix_prox_oracle, prox_objective,
    schatten, vector_prox_oracle, NORMS,
};
use falc::linalg::{slice_norm, DenseMatrix, NormIndex};
use falc::prox::{project_ball, shrink_matrix, shrink_vec, shrink_vec_ball};
use falc::rng::SplitMix64;
use proptest::prelude::*;

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm_index() -> impl Strategy<Value = NormIndex> {
    prop_oneof![Just(NormIndex::One), Just(NormIndex::Two), Just(NormIndex::Inf)]
}

fn small_vec() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 1..6)
}

#[test]
fn documented_examples() {
    let s = shrink_vec(&dense_vec(vec![3.0, -0.5, 0.0]), 1.0, NormIndex::One);
    assert_eq!(s.as_slice(), &[2.0, 0.0, 0.0]);
    let s = shrink_vec(&dense_vec(vec![3.0, 4.0]), 2.0, NormIndex::Two);
    assert!(close(s.as_slice(), &[1.8, 2.4], 1e-15));

    let p = project_ball(&dense_vec(vec![1.0, 0.5]), NormIndex::One, 1.0);
    assert!(close(p.as_slice(), &[0.75, 0.25], 1e-15));
    let p = project_ball(&dense_vec(vec![3.0, -4.0]), NormIndex::Two, 1.0);
    assert!(close(p.as_slice(), &[0.6, -0.8], 1e-15));
    let p = project_ball(&dense_vec(vec![2.0, -0.3]), NormIndex::Inf, 1.0);
    assert_eq!(p.as_slice(), &[1.0, -0.3]);

    let b = shrink_vec_ball(&dense_vec(vec![3.0, -1.0, 0.5]), 0.1, NormIndex::Inf, 1.0);
    assert!(close(b.as_slice(), &[1.0, -1.0, 0.5], 1e-15));

    let y = DenseMatrix::from_diag(&[3.0, 1.0]);
    let r = shrink_matrix(&y, 1.5, NormIndex::One, f64::INFINITY).unwrap();
    assert!(r.constrained.sub(&DenseMatrix::from_diag(&[1.5, 0.0])).max_abs() <= 1e-14);
    assert_eq!(r.constrained, r.unconstrained);
}

#[test]
fn linf_shrink_matches_grid_search() {
    // 2-d objective scanned on a fine grid, then refined locally
    let y = [1.7, -0.4];
    let delta = 0.9;
    let got = shrink_vec(&dense_vec(y.to_vec()), delta, NormIndex::Inf);
    let mut best = (f64::INFINITY, [0.0; 2]);
    let h = 1e-3;
    for i in -2000..=2000 {
        for j in -2000..=2000 {
            let x = [i as f64 * h, j as f64 * h];
            let v = prox_objective(&x, &y, delta, NormIndex::Inf);
            if v < best.0 {
                best = (v, x);
            }
        }
    }
    assert!(dist(got.as_slice(), &best.1) <= 2e-3);
    assert!(prox_objective(got.as_slice(), &y, delta, NormIndex::Inf) <= best.0 + 1e-12);
}

#[test]
fn oracle_agreement_sample() {
    let mut rng = SplitMix64::new(21);
    for _ in 0..20 {
        for p in NORMS {
            let dim = 1 + rng.below(4);
            let y: Vec<f64> = (0..dim).map(|_| 2.0 * rng.gaussian()).collect();
            let delta = rng.uniform(0.0, 1.5);
            let eta = rng.uniform(0.1, 3.0);
            let ours = shrink_vec_ball(&dense_vec(y.clone()), delta, p, eta);
            let oracle = vector_prox_oracle(&y, delta, p, eta, 20_000);
            assert!(slice_norm(ours.as_slice(), p) <= eta * (1.0 + 1e-12));
            let gap = prox_objective(ours.as_slice(), &y, delta, p) - prox_objective(&oracle, &y, delta, p);
            assert!(gap <= 1e-7, "{p:?}: gap {gap}");

            let ym = gaussian_matrix(&mut rng, 2, 2);
            let ours = shrink_matrix(&ym, delta, p, eta).unwrap().constrained;
            let oracle = matrix_prox_oracle(&ym, delta, p, eta, 5_000);
            assert!(schatten(&ours, p) <= eta * (1.0 + 1e-10));
            let gap = matrix_prox_objective(&ours, &ym, delta, p) - matrix_prox_objective(&oracle, &ym, delta, p);
            assert!(gap <= 1e-7, "matrix {p:?}: gap {gap}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn shrink_is_nonexpansive(a in small_vec(), seed in any::<u64>(), delta in 0.0f64..3.0, p in norm_index()) {
        let mut rng = SplitMix64::new(seed);
        let b: Vec<f64> = a.iter().map(|v| v + rng.gaussian()).collect();
        let sa = shrink_vec(&dense_vec(a.clone()), delta, p);
        let sb = shrink_vec(&dense_vec(b.clone()), delta, p);
        prop_assert!(dist(sa.as_slice(), sb.as_slice()) <= dist(&a, &b) * (1.0 + 1e-12) + 1e-14);
        let pa = project_ball(&dense_vec(a.clone()), p, delta);
        let pb = project_ball(&dense_vec(b.clone()), p, delta);
        prop_assert!(dist(pa.as_slice(), pb.as_slice()) <= dist(&a, &b) * (1.0 + 1e-12) + 1e-14);
        let ba = shrink_vec_ball(&dense_vec(a.clone()), delta, p, 1.0);
        let bb = shrink_vec_ball(&dense_vec(b.clone()), delta, p, 1.0);
        prop_assert!(dist(ba.as_slice(), bb.as_slice()) <= dist(&a, &b) * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn projection_is_idempotent_and_feasible(y in small_vec(), rho in 0.0f64..4.0, p in norm_index()) {
        let once = project_ball(&dense_vec(y.clone()), p, rho);
        prop_assert!(slice_norm(once.as_slice(), p) <= rho * (1.0 + 1e-12) + 1e-15);
        let twice = project_ball(&once, p, rho);
        prop_assert!(close(once.as_slice(), twice.as_slice(), 1e-12));
        prop_assert!(close(once.as_slice(), &ball_projection_oracle(&y, p, rho), 1e-9));
    }

    #[test]
    fn moreau_decomposition(y in small_vec(), delta in 0.01f64..3.0, p in norm_index()) {
        // y = prox_{δ‖·‖}(y) + Π_{δ·dual ball}(y)
        let s = shrink_vec(&dense_vec(y.clone()), delta, p);
        let q = project_ball(&dense_vec(y.clone()), p.dual(), delta);
        let sum: Vec<f64> = s.as_slice().iter().zip(q.as_slice()).map(|(a, b)| a + b).collect();
        prop_assert!(close(&sum, &y, 1e-12));
    }

    #[test]
    fn ball_shrink_is_feasible(y in small_vec(), delta in 0.0f64..3.0, eta in 0.0f64..4.0, p in norm_index()) {
        let x = shrink_vec_ball(&dense_vec(y.clone()), delta, p, eta);
        prop_assert!(slice_norm(x.as_slice(), p) <= eta * (1.0 + 1e-12) + 1e-15);
        if slice_norm(shrink_vec(&dense_vec(y.clone()), delta, p).as_slice(), p) <= eta {
            prop_assert_eq!(x, shrink_vec(&dense_vec(y), delta, p));
        }
    }

    #[test]
    fn matrix_shrink_on_diagonal_acts_on_entries(
        d in prop::collection::vec(-5.0f64..5.0, 1..5),
        delta in 0.0f64..3.0,
        eta in 0.1f64..6.0,
        p in norm_index(),
    ) {
        let r = shrink_matrix(&DenseMatrix::from_diag(&d), delta, p, eta).unwrap();
        let want = shrink_vec_ball(&dense_vec(d.clone()), delta, p, eta);
        prop_assert!(r.constrained.sub(&DenseMatrix::from_diag(want.as_slice())).max_abs() <= 1e-12);
        let want = shrink_vec(&dense_vec(d), delta, p);
        prop_assert!(r.unconstrained.sub(&DenseMatrix::from_diag(want.as_slice())).max_abs() <= 1e-12);
        prop_assert_eq!(r.used_svd, p != NormIndex::Two);
    }

    #[test]
    fn matrix_shrink_is_nonexpansive(seed in any::<u64>(), delta in 0.0f64..2.0, p in norm_index()) {
        let mut rng = SplitMix64::new(seed);
        let a = gaussian_matrix(&mut rng, 3, 4);
        let b = a.add(&gaussian_matrix(&mut rng, 3, 4).scaled(0.3));
        let sa = shrink_matrix(&a, delta, p, 2.0).unwrap();
        let sb = shrink_matrix(&b, delta, p, 2.0).unwrap();
        let lim = a.sub(&b).frobenius_norm() * (1.0 + 1e-10) + 1e-12;
        prop_assert!(sa.constrained.sub(&sb.constrained).frobenius_norm() <= lim);
        prop_assert!(sa.unconstrained.sub(&sb.unconstrained).frobenius_norm() <= lim);
    }
}
