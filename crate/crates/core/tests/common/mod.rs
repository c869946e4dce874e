#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use prefopt::bench::Init;
use prefopt::cone::ray_to_equality;
use prefopt::preference::Preference;
use prefopt::problem::{Objective, Problem, Quadratic, RandomStream};
use rand::SeedableRng;

pub fn angle_ray(angle: f64) -> DVector<f64> {
    DVector::from_vec(vec![angle.cos(), angle.sin()])
}

/// Orthant cone plus the equality constraint for the ray at `angle`.
pub fn ray_preference(cone: DMatrix<f64>, angle: f64, c_h: f64) -> Preference {
    let (b, off) = ray_to_equality(&angle_ray(angle)).unwrap();
    Preference::new(cone)
        .unwrap()
        .with_equalities(b, off)
        .unwrap()
        .with_weights(1.0, c_h)
        .unwrap()
}

pub fn standard_angles(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| PI / 20.0 + 8.0 * PI / 20.0 * i as f64 / (n - 1) as f64)
        .collect()
}

/// Entries `N(0, 1/q)`.
pub fn scaled_normal_start(q: usize, seed: u64) -> DVector<f64> {
    let mut rng = RandomStream::seed_from_u64(seed);
    Init::Normal {
        scale: 1.0 / (q as f64).sqrt(),
    }
    .sample(q, &mut rng)
}

/// Two convex quadratics in R^q centered at `+-e_1`.
pub fn bi_quadratic(q: usize) -> Problem {
    let mut c1 = DVector::zeros(q);
    c1[0] = 1.0;
    let c2 = -c1.clone();
    Problem::quadratic(vec![c1, c2], vec![1.0, 1.0]).unwrap()
}

/// Finite sum of `n` bi-objective quadratics whose centers are jittered
/// deterministically around `(+-1, 0, ...)`; the second scale is jittered
/// around 0.7 by the same amount.
pub fn noisy_quadratic_sum(q: usize, n: usize, spread: f64) -> Problem {
    let samples: Vec<Arc<dyn Objective>> = (0..n)
        .map(|i| {
            let phase = 2.0 * PI * i as f64 / n as f64;
            let mut c1 = DVector::zeros(q);
            let mut c2 = DVector::zeros(q);
            c1[0] = 1.0 + spread * phase.cos();
            c2[0] = -1.0 + spread * phase.sin();
            if q > 1 {
                c1[1] = spread * (2.0 * phase).sin();
                c2[1] = -spread * (3.0 * phase).cos();
            }
            Arc::new(Quadratic::new(vec![c1, c2], vec![1.0, 0.7 + spread * phase.sin()]).unwrap()) as Arc<dyn Objective>
        })
        .collect();
    Problem::finite_sum(samples).unwrap()
}
