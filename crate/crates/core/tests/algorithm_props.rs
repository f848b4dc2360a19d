use natreg_core::algorithms::{
    min_norm_ols_fit, ols_fit, ridge_fit, ridge_objective, sse, LinearModel,
};
use natreg_core::dataset::synth_dataset;
use natreg_core::linalg::{rel_distance, sample_gaussian, singular_values, svd, Matrix, SeedState};
use natreg_core::Dataset;
use rand::Rng;

fn full_rank_fixture(i: usize) -> Dataset {
    let s = SeedState::new(2718, "alg-fixture").trial(i);
    let mut rng = s.derive("dims").rng();
    let p = rng.random_range(1..=8);
    let q = rng.random_range(1..=4);
    let n = rng.random_range(p + 1..=40);
    synth_dataset(&s, n, p, q, 0.5).unwrap().0
}

fn any_rank_fixture(i: usize) -> Dataset {
    let s = SeedState::new(2718, "alg-any").trial(i);
    let mut rng = s.derive("dims").rng();
    let p = rng.random_range(1..=8);
    let q = rng.random_range(1..=4);
    let n = rng.random_range(1..=12);
    synth_dataset(&s, n, p, q, 0.5).unwrap().0
}

fn with_direction(f: &Matrix, seed: &SeedState, norm: f64) -> Matrix {
    let dir = sample_gaussian(f.rows(), f.cols(), seed);
    f.add(&dir.scale(norm / dir.frobenius_norm())).unwrap()
}

#[test]
fn ols_normal_equation_residual() {
    for i in 0..100 {
        let d = full_rank_fixture(i);
        let f = ols_fit(&d).unwrap();
        let resid = d.x().matmul(f.coefficients()).unwrap().sub(d.y()).unwrap();
        let normal = d.x().tr_matmul(&resid).unwrap().frobenius_norm();
        let scale = d.x().tr_matmul(d.y()).unwrap().frobenius_norm();
        assert!(
            normal <= 1e-9 * scale,
            "fixture {i}: {normal:e} vs {scale:e}"
        );
    }
}

#[test]
fn ridge_stationarity_any_rank() {
    for i in 0..100 {
        for d in [full_rank_fixture(i), any_rank_fixture(i)] {
            let lambda = 0.1 + (i % 7) as f64;
            let f = ridge_fit(&d, lambda).unwrap();
            let lhs = d
                .x()
                .gram()
                .add_diagonal(lambda)
                .matmul(f.coefficients())
                .unwrap();
            let xty = d.x().tr_matmul(d.y()).unwrap();
            let err = lhs.sub(&xty).unwrap().frobenius_norm();
            assert!(err <= 1e-9 * xty.frobenius_norm(), "fixture {i}: {err:e}");
        }
    }
}

#[test]
fn ridge_approaches_ols_as_lambda_vanishes() {
    for i in 0..20 {
        let d = full_rank_fixture(i);
        let ols = ols_fit(&d).unwrap();
        let smax = singular_values(&d.x().gram())[0];
        let mut last = f64::INFINITY;
        for e in [0, -2, -4, -6, -8] {
            let lambda = 10f64.powi(e) * smax;
            let dist = rel_distance(
                ridge_fit(&d, lambda).unwrap().coefficients(),
                ols.coefficients(),
            )
            .unwrap();
            assert!(
                dist < last,
                "fixture {i}: not monotone at lambda {lambda:e}"
            );
            last = dist;
        }
        let tiny = ridge_fit(&d, 1e-10 * smax).unwrap();
        assert!(rel_distance(tiny.coefficients(), ols.coefficients()).unwrap() <= 1e-6);
    }
}

#[test]
fn closed_forms_are_optimal_under_perturbation() {
    let lambda = 0.7;
    for i in 0..10 {
        let d = full_rank_fixture(i);
        let ols = ols_fit(&d).unwrap();
        let ridge = ridge_fit(&d, lambda).unwrap();
        let base_sse = sse(&d, &ols).unwrap();
        let base_ridge = ridge_objective(&d, &ridge, lambda).unwrap();
        for k in 0..100 {
            let s = SeedState::new(i as u64, "perturb").trial(k);
            let moved = LinearModel::new(with_direction(ols.coefficients(), &s, 0.1));
            assert!(sse(&d, &moved).unwrap() >= base_sse);
            let moved = LinearModel::new(with_direction(ridge.coefficients(), &s, 0.1));
            assert!(ridge_objective(&d, &moved, lambda).unwrap() >= base_ridge);
        }
    }
}

#[test]
fn min_norm_is_shortest_minimizer() {
    let mut exercised = 0;
    for i in 0..50 {
        let d = any_rank_fixture(i);
        let dec = svd(d.x());
        let rank = dec.rank(1.0);
        if rank == d.p() {
            continue;
        }
        exercised += 1;
        let f = min_norm_ols_fit(&d);
        let base_sse = sse(&d, &f).unwrap();
        // Project a random p×q matrix onto the null space of x.
        let z = sample_gaussian(d.p(), d.q(), &SeedState::new(i as u64, "null"));
        let v_r = Matrix::from_fn(d.p(), rank, |r, c| dec.v[(r, c)]);
        let proj = v_r.matmul(&v_r.tr_matmul(&z).unwrap()).unwrap();
        let null = z.sub(&proj).unwrap();
        let null = null.scale(0.1 / null.frobenius_norm());
        assert!(d.x().matmul(&null).unwrap().frobenius_norm() <= 1e-12);
        let moved = LinearModel::new(f.coefficients().add(&null).unwrap());
        assert!(moved.coefficients().frobenius_norm() > f.coefficients().frobenius_norm());
        assert!((sse(&d, &moved).unwrap() - base_sse).abs() <= 1e-10);
    }
    assert!(exercised > 10);
}

#[test]
fn min_norm_agrees_with_ols_on_full_rank() {
    for i in 0..30 {
        let d = full_rank_fixture(i);
        let a = min_norm_ols_fit(&d);
        let b = ols_fit(&d).unwrap();
        assert!(rel_distance(a.coefficients(), b.coefficients()).unwrap() <= 1e-9);
    }
}

#[test]
fn exact_data_recovers_true_model() {
    for i in 0..20 {
        let s = SeedState::new(99, "exact").trial(i);
        let (d, model) = synth_dataset(&s, 30, 1 + i % 6, 2, 0.0).unwrap();
        let f = ols_fit(&d).unwrap();
        assert!(rel_distance(f.coefficients(), &model).unwrap() <= 1e-8);
        assert!(sse(&d, &LinearModel::new(model)).unwrap() == 0.0);
    }
}
