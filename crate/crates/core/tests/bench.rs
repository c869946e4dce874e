mod common;

use std::f64::consts::PI;

use common::*;
use nalgebra::{DMatrix, DVector};
use prefopt::bench::{run_suite, uniform_preference_rays, ControlledAscent, Init, SuiteOptions};
use prefopt::metrics::pf_distance_synthetic;
use prefopt::preference::Preference;
use prefopt::problem::{Problem, RandomStream};
use prefopt::solvers::{run, SolverConfig};
use rand::SeedableRng;

fn options(q: usize, seed: u64, parallelism: usize) -> SuiteOptions {
    SuiteOptions {
        parallelism,
        init: Init::Normal {
            scale: 1.0 / (q as f64).sqrt(),
        },
        base_seed: seed,
        ..Default::default()
    }
}

fn strip_timing(mut rep: prefopt::solvers::RunReport) -> prefopt::solvers::RunReport {
    rep.wall_time_secs = 0.0;
    rep
}

#[test]
fn single_preference_suite_wraps_one_run() {
    let p = Problem::synthetic_concave(8).unwrap();
    let pref = ray_preference(DMatrix::identity(2, 2), 0.3 * PI, 1.0);
    let cfg = SolverConfig::meta().with_iterations(30);
    let suite = run_suite(&p, std::slice::from_ref(&pref), &cfg, &options(8, 7, 1)).unwrap();
    assert_eq!(suite.runs.len(), 1);
    let outcome = &suite.runs[0];
    assert_eq!(outcome.seed, 7);

    let mut rng = RandomStream::seed_from_u64(7);
    rng.set_stream(1);
    let theta0 = Init::Normal { scale: 1.0 / 8f64.sqrt() }.sample(8, &mut rng);
    assert_eq!(outcome.theta0, theta0.as_slice());
    let direct = run(&p, &pref, &theta0, &cfg.with_seed(7)).unwrap();
    assert_eq!(strip_timing(outcome.report.clone().unwrap()), strip_timing(direct));
}

#[test]
fn five_ray_suite_aligns() {
    let q = 20;
    let p = Problem::synthetic_concave(q).unwrap();
    let prefs: Vec<Preference> = standard_angles(5)
        .into_iter()
        .map(|a| ray_preference(DMatrix::identity(2, 2), a, 1.0))
        .collect();
    let suite = run_suite(&p, &prefs, &SolverConfig::meta(), &options(q, 0, 2)).unwrap();
    assert_eq!(suite.failures(), 0);
    for h in &suite.alignments {
        assert!(h.unwrap() <= 1e-2, "{h:?}");
    }
    for rep in suite.successful() {
        assert!(pf_distance_synthetic(&rep.final_objectives()).unwrap() <= 1e-2);
    }
    let hv = suite.hypervolume.unwrap();
    assert!(hv > 0.0 && hv.is_finite());
    assert_eq!(suite.reference_point.as_ref().unwrap().len(), 2);
    assert!(suite.mean_kkt.unwrap() >= 0.0);
}

#[test]
fn results_do_not_depend_on_parallelism() {
    let p = Problem::synthetic_concave(6).unwrap();
    let prefs: Vec<Preference> = standard_angles(6)
        .into_iter()
        .map(|a| ray_preference(DMatrix::identity(2, 2), a, 1.0))
        .collect();
    let cfg = SolverConfig::meta().with_iterations(25);
    let serial = run_suite(&p, &prefs, &cfg, &options(6, 3, 1)).unwrap();
    let parallel = run_suite(&p, &prefs, &cfg, &options(6, 3, 4)).unwrap();
    assert_eq!(serial.hypervolume, parallel.hypervolume);
    for (a, b) in serial.runs.iter().zip(&parallel.runs) {
        assert_eq!(a.index, b.index);
        assert_eq!(a.theta0, b.theta0);
        assert_eq!(
            strip_timing(a.report.clone().unwrap()),
            strip_timing(b.report.clone().unwrap())
        );
    }
}

#[test]
fn a_failing_run_does_not_stop_the_others() {
    let p = Problem::synthetic_concave(4).unwrap();
    let good = ray_preference(DMatrix::identity(2, 2), PI / 4.0, 1.0);
    // -I makes A F negative, which the adaptive domain rejects
    let bad = ray_preference(-DMatrix::identity(2, 2), PI / 4.0, 1.0);
    let cfg = SolverConfig::meta().with_iterations(10);
    let suite = run_suite(&p, &[good.clone(), bad, good], &cfg, &options(4, 0, 2)).unwrap();
    assert_eq!(suite.failures(), 1);
    assert!(suite.runs[1].report.is_none());
    assert!(suite.runs[1].numerical_error);
    assert!(suite.runs[1].error.is_some());
    assert!(suite.runs[0].report.is_some() && suite.runs[2].report.is_some());
    assert!(suite.alignments[1].is_none());
}

#[test]
fn controlled_ascent_builds_a_cone_per_run() {
    let q = 6;
    let p = Problem::synthetic_concave(q).unwrap();
    let rays = uniform_preference_rays(3, PI / 8.0, 3.0 * PI / 8.0).unwrap();
    let prefs: Vec<Preference> = rays
        .iter()
        .map(|r| ray_preference(DMatrix::identity(2, 2), r[1].atan2(r[0]), 1.0))
        .collect();
    let target = DVector::from_vec(vec![0.0, 0.0]);
    let opts = SuiteOptions {
        controlled_ascent: Some(ControlledAscent {
            target: target.clone(),
            base_rays: DMatrix::identity(2, 2),
        }),
        ..options(q, 1, 1)
    };
    let cfg = SolverConfig::meta().with_iterations(5);
    let suite = run_suite(&p, &prefs, &cfg, &opts).unwrap();
    assert_eq!(suite.failures(), 0);
    // F_go equal to run 0's F0 leaves that run without an ascent direction
    let f0 = p.value(&DVector::from_vec(suite.runs[0].theta0.clone())).unwrap();
    let degenerate = SuiteOptions {
        controlled_ascent: Some(ControlledAscent {
            target: f0,
            base_rays: DMatrix::identity(2, 2),
        }),
        ..options(q, 1, 1)
    };
    let suite = run_suite(&p, &prefs, &cfg, &degenerate).unwrap();
    assert!(suite.runs[0].report.is_none());
    assert!(suite.runs[0].error.as_ref().unwrap().contains("differ"));
}
