//! Preference sweeps: ray generation, initial points, and parallel suites of
//! independent runs.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::controlled_ascent_cone;
use crate::error::{Error, Result};
use crate::metrics::hypervolume;
use crate::preference::Preference;
use crate::problem::{Problem, RandomStream};
use crate::solvers::{run, RunReport, SolverConfig};

/// `n` unit rays `(cos a, sin a)` with angles equally spaced over
/// `[angle_lo, angle_hi]`, endpoints included. One ray uses the midpoint.
pub fn uniform_preference_rays(n: usize, angle_lo: f64, angle_hi: f64) -> Result<Vec<DVector<f64>>> {
    let quarter = std::f64::consts::FRAC_PI_2;
    if n == 0 || !(angle_lo > 0.0 && angle_lo <= angle_hi && angle_hi < quarter) {
        return Err(Error::InvalidArgument(format!(
            "need n >= 1 and 0 < angle_lo <= angle_hi < pi/2, got n = {n}, [{angle_lo}, {angle_hi}]"
        )));
    }
    let angles: Vec<f64> = if n == 1 {
        vec![0.5 * (angle_lo + angle_hi)]
    } else {
        (0..n)
            .map(|i| angle_lo + (angle_hi - angle_lo) * i as f64 / (n - 1) as f64)
            .collect()
    };
    Ok(angles
        .into_iter()
        .map(|a| DVector::from_vec(vec![a.cos(), a.sin()]))
        .collect())
}

/// How initial points are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Init {
    /// Entries `scale * N(0, 1)`.
    Normal {
        #[serde(default = "one")]
        scale: f64,
    },
    /// Entries uniform in `[low, high]`.
    Uniform { low: f64, high: f64 },
    /// Entries uniform in `[low, high]`, all with one random sign per run,
    /// which places the start next to one end of the synthetic front.
    HardNearFront {
        #[serde(default = "hard_low")]
        low: f64,
        #[serde(default = "hard_high")]
        high: f64,
    },
    Fixed { theta: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

fn hard_low() -> f64 {
    0.15
}

fn hard_high() -> f64 {
    0.5
}

impl Init {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Init::Normal { scale } if !(scale.is_finite() && *scale >= 0.0) => {
                Err(Error::InvalidArgument("normal init scale must be finite and >= 0".into()))
            }
            Init::Uniform { low, high } | Init::HardNearFront { low, high } if !(low <= high && low.is_finite() && high.is_finite()) => {
                Err(Error::InvalidArgument(format!("init range [{low}, {high}] is invalid")))
            }
            Init::Fixed { theta } if theta.len() != dim => Err(Error::Dimension(format!(
                "fixed init has length {}, problem dimension is {dim}",
                theta.len()
            ))),
            _ => Ok(()),
        }
    }

    pub fn sample(&self, dim: usize, rng: &mut RandomStream) -> DVector<f64> {
        match self {
            Init::Normal { scale } => {
                DVector::from_iterator(dim, (0..dim).map(|_| scale * rng.sample::<f64, _>(StandardNormal)))
            }
            Init::Uniform { low, high } => DVector::from_iterator(dim, (0..dim).map(|_| rng.random_range(*low..=*high))),
            Init::HardNearFront { low, high } => {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                DVector::from_iterator(dim, (0..dim).map(|_| sign * rng.random_range(*low..=*high)))
            }
            Init::Fixed { theta } => DVector::from_column_slice(theta),
        }
    }
}

/// Replace each run's cone with the controlled-ascent cone built from its own
/// starting objectives `F(theta_0)` and the target `f_go`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlledAscent {
    pub target: DVector<f64>,
    pub base_rays: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub parallelism: usize,
    pub init: Init,
    /// Run `i` uses seed `base_seed + i` for its start and its solver.
    pub base_seed: u64,
    /// Hypervolume reference; defaults to the componentwise worst objective
    /// value seen in any recorded iterate.
    pub reference: Option<DVector<f64>>,
    pub controlled_ascent: Option<ControlledAscent>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            parallelism: 1,
            init: Init::Normal { scale: 1.0 },
            base_seed: 0,
            reference: None,
            controlled_ascent: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub index: usize,
    pub seed: u64,
    pub theta0: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<RunReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// True when the error was a numerical abort.
    #[serde(default)]
    pub numerical_error: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub runs: Vec<RunOutcome>,
    pub hypervolume: Option<f64>,
    pub reference_point: Option<Vec<f64>>,
    /// Final `|h|_1` per run, `None` for failed runs.
    pub alignments: Vec<Option<f64>>,
    pub mean_kkt: Option<f64>,
}

impl SuiteReport {
    pub fn successful(&self) -> impl Iterator<Item = &RunReport> {
        self.runs.iter().filter_map(|r| r.report.as_ref())
    }

    pub fn failures(&self) -> usize {
        self.runs.iter().filter(|r| r.error.is_some()).count()
    }
}

fn one_run(
    problem: &Problem,
    pref: &Preference,
    cfg: &SolverConfig,
    options: &SuiteOptions,
    index: usize,
) -> RunOutcome {
    let seed = options.base_seed.wrapping_add(index as u64);
    let mut rng = RandomStream::seed_from_u64(seed);
    // keep the start independent of the solver's stream
    rng.set_stream(1);
    let theta0 = options.init.sample(problem.dim(), &mut rng);
    let run_cfg = SolverConfig { seed, ..cfg.clone() };
    let result = (|| {
        let pref = match &options.controlled_ascent {
            Some(ca) => {
                let f0 = problem.value(&theta0)?;
                let cone = controlled_ascent_cone(&f0, &ca.target, &ca.base_rays)?;
                pref.clone().with_cone(cone.into_halfspaces())?
            }
            None => pref.clone(),
        };
        run(problem, &pref, &theta0, &run_cfg)
    })();
    let theta0 = theta0.iter().copied().collect();
    match result {
        Ok(report) => RunOutcome {
            index,
            seed,
            theta0,
            report: Some(report),
            error: None,
            numerical_error: false,
        },
        Err(e) => RunOutcome {
            index,
            seed,
            theta0,
            report: None,
            numerical_error: e.is_numerical(),
            error: Some(e.to_string()),
        },
    }
}

/// One independent run per preference, executed on a pool of
/// `options.parallelism` workers. Results come back in preference order and
/// a failing run never aborts its siblings.
pub fn run_suite(
    problem: &Problem,
    preferences: &[Preference],
    cfg: &SolverConfig,
    options: &SuiteOptions,
) -> Result<SuiteReport> {
    if preferences.is_empty() {
        return Err(Error::InvalidArgument("suite needs at least one preference".into()));
    }
    options.init.validate(problem.dim())?;
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.parallelism.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    let runs: Vec<RunOutcome> = pool.install(|| {
        preferences
            .par_iter()
            .enumerate()
            .map(|(i, pref)| one_run(problem, pref, cfg, options, i))
            .collect()
    });
    Ok(summarize(runs, options.reference.clone()))
}

fn summarize(runs: Vec<RunOutcome>, reference: Option<DVector<f64>>) -> SuiteReport {
    let reports: Vec<&RunReport> = runs.iter().filter_map(|r| r.report.as_ref()).collect();
    let alignments = runs.iter().map(|r| r.report.as_ref().map(|rep| rep.h_l1)).collect();
    let mean_kkt = (!reports.is_empty()).then(|| reports.iter().map(|r| r.kkt).sum::<f64>() / reports.len() as f64);
    let reference = reference.or_else(|| {
        let first = reports.first()?;
        let mut worst = DVector::from_element(first.objectives_final.len(), f64::NEG_INFINITY);
        for rec in reports.iter().flat_map(|r| r.trajectory.iter()) {
            for (w, f) in worst.iter_mut().zip(&rec.objectives) {
                *w = w.max(*f);
            }
        }
        Some(worst)
    });
    let finals: Vec<DVector<f64>> = reports.iter().map(|r| r.final_objectives()).collect();
    let hv = reference.as_ref().and_then(|r| hypervolume(&finals, r).ok());
    SuiteReport {
        runs,
        hypervolume: hv,
        reference_point: reference.map(|r| r.iter().copied().collect()),
        alignments,
        mean_kkt,
    }
}
