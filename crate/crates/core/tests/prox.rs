use adgd_core::problem::{matrix_to_vec, to_matrix, Point};
use adgd_core::prox::{
    project_l1_ball, project_nuclear_ball, singular_values, AffineProjector, ProxOperator,
};
use adgd_core::sampling::{self, SeededRng};
use adgd_core::ProxFriendly;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

fn gaussian(rng: &mut SeededRng, d: usize, scale: f64) -> Point {
    Point::from_fn(d, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
}

fn symmetric(rng: &mut SeededRng, n: usize, scale: f64) -> Point {
    let a = to_matrix(gaussian(rng, n * n, scale).as_slice(), n, n);
    Point::from_vec(matrix_to_vec(&((&a + a.transpose()) * 0.5)))
}

struct Case {
    name: &'static str,
    op: ProxOperator,
    dim: usize,
    symmetric_input: Option<usize>,
    scale: f64,
}

fn cases() -> Vec<Case> {
    let mut rng = sampling::rng(404);
    let a = sampling::gaussian_matrix(&mut rng, 3, 8);
    let b = sampling::gaussian_vector(&mut rng, 3);
    vec![
        Case {
            name: "nonneg",
            op: ProxOperator::NonNegative,
            dim: 12,
            symmetric_input: None,
            scale: 1.0,
        },
        Case {
            name: "dual_entropy_domain",
            op: ProxOperator::DualEntropyDomain { m: 7 },
            dim: 8,
            symmetric_input: None,
            scale: 1.0,
        },
        Case {
            name: "affine",
            op: ProxOperator::Affine(AffineProjector::new(a, b).unwrap()),
            dim: 8,
            symmetric_input: None,
            scale: 3.0,
        },
        Case {
            name: "spectral_box",
            op: ProxOperator::SpectralBox {
                n: 4,
                lower: 0.1,
                upper: 2.0,
            },
            dim: 16,
            symmetric_input: Some(4),
            scale: 2.0,
        },
        Case {
            name: "nuclear_ball",
            op: ProxOperator::NuclearBall {
                rows: 4,
                cols: 5,
                radius: 2.0,
            },
            dim: 20,
            symmetric_input: None,
            scale: 1.0,
        },
    ]
}

fn sample(case: &Case, rng: &mut SeededRng) -> Point {
    match case.symmetric_input {
        Some(n) => symmetric(rng, n, case.scale),
        None => gaussian(rng, case.dim, case.scale),
    }
}

#[test]
fn projections_are_idempotent_and_nonexpansive() {
    for case in cases() {
        let mut rng = sampling::rng(1);
        for i in 0..100 {
            let z = sample(&case, &mut rng);
            let w = sample(&case, &mut rng);
            let pz = case.op.prox(1.0, &z).unwrap();
            let pw = case.op.prox(1.0, &w).unwrap();
            let again = case.op.prox(1.0, &pz).unwrap();
            assert!((&again - &pz).norm() <= 1e-10 * (1.0 + pz.norm()), "{} idempotence at {i}: {}", case.name, (&again - &pz).norm());
            assert!(
                (&pz - &pw).norm() <= (&z - &w).norm() * (1.0 + 1e-12),
                "{} nonexpansiveness at {i}",
                case.name
            );
            assert!(case.op.contains(&pz), "{} output infeasible at {i}", case.name);
        }
    }
}

#[test]
fn projections_satisfy_the_variational_inequality() {
    for case in cases() {
        let mut rng = sampling::rng(2);
        for i in 0..50 {
            let z = sample(&case, &mut rng);
            let pz = case.op.prox(1.0, &z).unwrap();
            let x = case.op.prox(1.0, &sample(&case, &mut rng)).unwrap();
            let vi = (&z - &pz).dot(&(&x - &pz));
            assert!(vi <= 1e-9 * (1.0 + z.norm() * x.norm()), "{} at {i}: {vi}", case.name);
        }
    }
}

#[test]
fn l1_projection_is_idempotent_and_nonexpansive() {
    let mut rng = sampling::rng(3);
    for _ in 0..100 {
        let z: Vec<f64> = gaussian(&mut rng, 10, 2.0).as_slice().to_vec();
        let w: Vec<f64> = gaussian(&mut rng, 10, 2.0).as_slice().to_vec();
        let (pz, pw) = (project_l1_ball(&z, 3.0), project_l1_ball(&w, 3.0));
        let again = project_l1_ball(&pz, 3.0);
        let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
        assert!(dist(&again, &pz) <= 1e-10);
        assert!(dist(&pz, &pw) <= dist(&z, &w) * (1.0 + 1e-12));
        assert!(pz.iter().map(|v| v.abs()).sum::<f64>() <= 3.0 * (1.0 + 1e-12));
    }
}

/// Soft threshold `v` at the level where its l1 norm equals `r`, found by bisection.
fn threshold_oracle(v: &[f64], r: f64) -> Vec<f64> {
    let mass = |t: f64| v.iter().map(|x| (x.abs() - t).max(0.0)).sum::<f64>();
    if mass(0.0) <= r {
        return v.to_vec();
    }
    let (mut lo, mut hi) = (0.0, v.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mass(mid) > r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    v.iter().map(|x| x.signum() * (x.abs() - t).max(0.0)).collect()
}

#[test]
fn l1_projection_matches_threshold_scan() {
    let mut rng = sampling::rng(6);
    for i in 0..200 {
        let v = gaussian(&mut rng, 10, 2.0);
        let r = rng.random_range(0.1..8.0);
        let got = project_l1_ball(v.as_slice(), r);
        let want = threshold_oracle(v.as_slice(), r);
        let err = got.iter().zip(&want).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(err <= 1e-8, "input {i}: error {err}");
    }
}

#[test]
fn nuclear_projection_matches_threshold_scan() {
    let mut rng = sampling::rng(7);
    for i in 0..200 {
        let z = to_matrix(gaussian(&mut rng, 16, 1.5).as_slice(), 4, 4);
        let r = rng.random_range(0.2..6.0);
        let got = project_nuclear_ball(&z, r).unwrap();
        let svd = z.clone().svd(true, true);
        let sigma = threshold_oracle(svd.singular_values.as_slice(), r);
        let want = svd.u.unwrap() * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(sigma)) * svd.v_t.unwrap();
        assert!((&got - &want).norm() <= 1e-8, "input {i}: error {}", (&got - &want).norm());
        assert!(singular_values(&got).unwrap().sum() <= r * (1.0 + 1e-10));
    }
}
