//! Outer-loop solvers.
//!
//! * [`run_meta`]: solves the subprogram to tolerance at every iterate
//!   (double loop) and steps along `d_t = -J A_ag^T l_t`.
//! * [`run_single_loop`]: one projected-gradient step on the multipliers per
//!   outer step.
//! * [`run_stochastic`]: the single-loop method on sampled Jacobians, with two
//!   independent samples per step so the multiplier gradient is unbiased.
//! * [`run_linear_scalarization`]: plain gradient descent on `w^T F`.
//!
//! Every run records `theta_0 .. theta_T` (subsampled by `record_every`, with
//! the first and last always kept).

use std::time::Instant;

use nalgebra::DVector;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{all_finite, positive_part_l1};
use crate::preference::Preference;
use crate::problem::{Problem, RandomStream};
use crate::subproblem::{solve_pgd, MultiplierDomain, Multipliers, PgdOptions, SubproblemContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Meta,
    SingleLoop,
    Stochastic,
    LinearScalarization,
}

/// Step-size schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepSchedule {
    Constant { value: f64 },
    /// `scale / sqrt(T)` for an iteration budget `T`.
    InvSqrtBudget { scale: f64 },
}

impl StepSchedule {
    pub fn value(&self, budget: usize) -> f64 {
        match *self {
            StepSchedule::Constant { value } => value,
            StepSchedule::InvSqrtBudget { scale } => scale / (budget.max(1) as f64).sqrt(),
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        let v = match *self {
            StepSchedule::Constant { value } => value,
            StepSchedule::InvSqrtBudget { scale } => scale,
        };
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub variant: Variant,
    pub alpha: StepSchedule,
    /// Multiplier step for the single-loop and stochastic variants.
    pub gamma: StepSchedule,
    pub iterations: usize,
    /// Inner solver settings for the meta variant.
    pub inner: PgdOptions,
    /// Early stop once the convergence measure drops to this value
    /// (KKT residual for meta, `|d|^2 + |h|^2` for single-loop/stochastic).
    pub stop_kkt: Option<f64>,
    pub seed: u64,
    pub domain: MultiplierDomain,
    /// Meta variant: start each inner solve from the previous multipliers.
    pub warm_start: bool,
    pub record_every: usize,
    pub record_theta: bool,
    /// Scalarization weights (linear scalarization only).
    pub weights: Option<Vec<f64>>,
}

impl SolverConfig {
    /// Double-loop defaults: `alpha = 0.05`, `T = 100`, inner PGD
    /// `(0.1, 250, 1e-5)`, adaptive domain.
    pub fn meta() -> Self {
        Self {
            variant: Variant::Meta,
            alpha: StepSchedule::Constant { value: 0.05 },
            gamma: StepSchedule::Constant { value: 0.01 },
            iterations: 100,
            inner: PgdOptions::default(),
            stop_kkt: None,
            seed: 0,
            domain: MultiplierDomain::Adaptive,
            warm_start: true,
            record_every: 1,
            record_theta: false,
            weights: None,
        }
    }

    /// Single-loop defaults: `alpha = gamma = 0.1`, simplified domain.
    pub fn single_loop() -> Self {
        Self {
            variant: Variant::SingleLoop,
            alpha: StepSchedule::Constant { value: 0.1 },
            gamma: StepSchedule::Constant { value: 0.1 },
            domain: MultiplierDomain::Simplified,
            ..Self::meta()
        }
    }

    pub fn stochastic() -> Self {
        Self {
            variant: Variant::Stochastic,
            ..Self::single_loop()
        }
    }

    pub fn linear_scalarization(weights: Vec<f64>) -> Self {
        Self {
            variant: Variant::LinearScalarization,
            alpha: StepSchedule::Constant { value: 0.1 },
            weights: Some(weights),
            ..Self::meta()
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = StepSchedule::Constant { value: alpha };
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = StepSchedule::Constant { value: gamma };
        self
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_domain(mut self, domain: MultiplierDomain) -> Self {
        self.domain = domain;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.alpha.validate("alpha")?;
        self.gamma.validate("gamma")?;
        if self.iterations == 0 {
            return Err(Error::InvalidArgument("iteration budget must be positive".into()));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidArgument("record_every must be positive".into()));
        }
        if !(self.inner.step > 0.0 && self.inner.tol >= 0.0) {
            return Err(Error::InvalidArgument("inner step must be positive and tol non-negative".into()));
        }
        if let Some(s) = self.stop_kkt {
            if !(s >= 0.0) {
                return Err(Error::InvalidArgument("stop_kkt must be non-negative".into()));
            }
        }
        Ok(())
    }

    fn records(&self, t: usize) -> bool {
        t.is_multiple_of(self.record_every) || t == self.iterations
    }
}

/// Diagnostics at one iterate `theta_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateRecord {
    pub t: usize,
    pub objectives: Vec<f64>,
    pub norm_d: f64,
    pub g_plus_l1: f64,
    pub h_l1: f64,
    /// Exact KKT residual for the meta variant; evaluated at the current
    /// (approximate) multipliers otherwise.
    pub kkt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub trajectory: Vec<IterateRecord>,
    pub theta_final: Vec<f64>,
    pub objectives_final: Vec<f64>,
    pub g_plus_l1: f64,
    pub h_l1: f64,
    pub norm_d: f64,
    pub kkt: f64,
    /// Number of outer updates applied.
    pub iterations: usize,
    pub stopped_early: bool,
    pub wall_time_secs: f64,
    pub config: SolverConfig,
}

impl RunReport {
    pub fn final_record(&self) -> &IterateRecord {
        self.trajectory.last().expect("trajectory is never empty")
    }

    pub fn final_objectives(&self) -> DVector<f64> {
        DVector::from_vec(self.objectives_final.clone())
    }
}

struct Recorder<'a> {
    cfg: &'a SolverConfig,
    trajectory: Vec<IterateRecord>,
}

impl<'a> Recorder<'a> {
    fn new(cfg: &'a SolverConfig) -> Self {
        Self {
            cfg,
            trajectory: Vec::new(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        t: usize,
        force: bool,
        f: &DVector<f64>,
        d: &DVector<f64>,
        g: &DVector<f64>,
        h: &DVector<f64>,
        kkt: f64,
        theta: &DVector<f64>,
    ) {
        if !(force || self.cfg.records(t)) {
            return;
        }
        self.trajectory.push(IterateRecord {
            t,
            objectives: f.iter().copied().collect(),
            norm_d: d.norm(),
            g_plus_l1: positive_part_l1(g),
            h_l1: h.lp_norm(1),
            kkt,
            theta: self.cfg.record_theta.then(|| theta.iter().copied().collect()),
        });
    }

    fn finish(self, theta: DVector<f64>, iterations: usize, stopped_early: bool, start: Instant) -> RunReport {
        let last = self.trajectory.last().expect("at least one record").clone();
        RunReport {
            objectives_final: last.objectives.clone(),
            g_plus_l1: last.g_plus_l1,
            h_l1: last.h_l1,
            norm_d: last.norm_d,
            kkt: last.kkt,
            theta_final: theta.iter().copied().collect(),
            trajectory: self.trajectory,
            iterations,
            stopped_early,
            wall_time_secs: start.elapsed().as_secs_f64(),
            config: self.cfg.clone(),
        }
    }
}

fn check_theta(problem: &Problem, theta: &DVector<f64>, t: usize) -> Result<()> {
    check_dim("theta", problem.dim(), theta.len())?;
    if !all_finite(theta) {
        return Err(Error::NonFinite(format!("theta at iteration {t}")));
    }
    Ok(())
}

fn check_pref(problem: &Problem, pref: &Preference) -> Result<()> {
    check_dim("preference objectives", problem.num_objectives(), pref.num_objectives())
}

/// Dispatches on `cfg.variant`.
pub fn run(problem: &Problem, pref: &Preference, theta0: &DVector<f64>, cfg: &SolverConfig) -> Result<RunReport> {
    match cfg.variant {
        Variant::Meta => run_meta(problem, pref, theta0, cfg),
        Variant::SingleLoop => run_single_loop(problem, pref, theta0, cfg),
        Variant::Stochastic => run_stochastic(problem, pref, theta0, cfg),
        Variant::LinearScalarization => {
            let m = problem.num_objectives();
            let weights = match &cfg.weights {
                Some(w) => DVector::from_vec(w.clone()),
                None => DVector::from_element(m, 1.0 / m as f64),
            };
            run_linear_scalarization(problem, pref, &weights, theta0, cfg)
        }
    }
}

/// Double-loop method: exact(ish) subprogram solve by PGD at every iterate.
pub fn run_meta(problem: &Problem, pref: &Preference, theta0: &DVector<f64>, cfg: &SolverConfig) -> Result<RunReport> {
    cfg.validate()?;
    check_pref(problem, pref)?;
    let start = Instant::now();
    let alpha = cfg.alpha.value(cfg.iterations);
    let mut rec = Recorder::new(cfg);
    let mut theta = theta0.clone();
    let mut previous: Option<Multipliers> = None;
    let mut t = 0;
    let stopped_early = loop {
        check_theta(problem, &theta, t)?;
        let ctx = SubproblemContext::at(problem, pref, &theta, cfg.domain)?;
        let init = match (&previous, cfg.warm_start) {
            (Some(prev), true) => ctx.project(prev),
            _ => ctx.initial_multipliers(),
        };
        let res = solve_pgd(&ctx, &init, &cfg.inner)?;
        let stopped_early = cfg.stop_kkt.is_some_and(|s| res.kkt <= s);
        let last = t == cfg.iterations || stopped_early;
        rec.push(
            t,
            last,
            ctx.objective_values(),
            &res.direction,
            ctx.inequality_values(),
            ctx.equality_values(),
            res.kkt,
            &theta,
        );
        if last {
            break stopped_early;
        }
        theta += &res.direction * alpha;
        previous = Some(res.multipliers);
        t += 1;
    };
    Ok(rec.finish(theta, t, stopped_early, start))
}

fn require_equalities_only(pref: &Preference, variant: &str) -> Result<()> {
    if pref.num_inequalities() > 0 {
        return Err(Error::Unsupported(format!(
            "{variant} solver handles equality constraints only; got {} inequality constraints",
            pref.num_inequalities()
        )));
    }
    Ok(())
}

/// Single-loop method: alternate one `theta` step and one projected-gradient
/// step on the multipliers.
pub fn run_single_loop(
    problem: &Problem,
    pref: &Preference,
    theta0: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<RunReport> {
    cfg.validate()?;
    check_pref(problem, pref)?;
    require_equalities_only(pref, "single-loop")?;
    let start = Instant::now();
    let alpha = cfg.alpha.value(cfg.iterations);
    let gamma = cfg.gamma.value(cfg.iterations);
    let mut rec = Recorder::new(cfg);
    let mut theta = theta0.clone();
    let mut lambda: Option<Multipliers> = None;
    let mut t = 0;
    let stopped_early = loop {
        check_theta(problem, &theta, t)?;
        let ctx = SubproblemContext::at(problem, pref, &theta, cfg.domain)?;
        let current = match lambda.take() {
            None => ctx.initial_multipliers(),
            Some(l) if cfg.domain == MultiplierDomain::Adaptive => ctx.project(&l),
            Some(l) => l,
        };
        let d = ctx.direction(&current);
        let measure = d.norm_squared() + ctx.equality_values().norm_squared();
        let stopped_early = cfg.stop_kkt.is_some_and(|s| measure <= s);
        let last = t == cfg.iterations || stopped_early;
        rec.push(
            t,
            last,
            ctx.objective_values(),
            &d,
            ctx.inequality_values(),
            ctx.equality_values(),
            ctx.kkt_residual_at(&current),
            &theta,
        );
        if last {
            break stopped_early;
        }
        theta += &d * alpha;
        let grad = ctx.phi_gradient(&current)?;
        let (m, mg, mh) = ctx.dims();
        let stepped = Multipliers::from_stacked(&(current.stacked() - grad * gamma), m, mg, mh)?;
        if !all_finite(&stepped.stacked()) {
            return Err(Error::NonFinite(format!("multipliers at iteration {t}")));
        }
        lambda = Some(ctx.project(&stepped));
        t += 1;
    };
    Ok(rec.finish(theta, t, stopped_early, start))
}

/// Double-sample multiplier gradient
/// `A_ag J_2^T J_1 A_ag^T l - [0; c_g g_1; c_h h_1]`, where `ctx1` is built from
/// the first sample and `jacobian2` is the second sample's Jacobian.
pub fn double_sample_gradient(
    ctx1: &SubproblemContext,
    jacobian2: &nalgebra::DMatrix<f64>,
    lambda: &Multipliers,
) -> Result<DVector<f64>> {
    check_dim("second-sample Jacobian rows", ctx1.jacobian().nrows(), jacobian2.nrows())?;
    check_dim("second-sample Jacobian columns", ctx1.jacobian().ncols(), jacobian2.ncols())?;
    let weighted2 = jacobian2 * ctx1.stacked().transpose();
    let inner = ctx1.weighted_jacobian() * lambda.stacked();
    Ok(weighted2.tr_mul(&inner) - ctx1.linear_term())
}

/// Stochastic single-loop method with double sampling. All randomness comes
/// from `cfg.seed`. Diagnostics in the trajectory are evaluated with the
/// deterministic objective; `norm_d` is the norm of the sampled direction.
pub fn run_stochastic(
    problem: &Problem,
    pref: &Preference,
    theta0: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<RunReport> {
    cfg.validate()?;
    check_pref(problem, pref)?;
    require_equalities_only(pref, "stochastic")?;
    if !problem.is_stochastic() {
        return Err(Error::InvalidArgument(format!(
            "stochastic solver needs a sampler; problem '{}' has none",
            problem.name()
        )));
    }
    let start = Instant::now();
    let alpha = cfg.alpha.value(cfg.iterations);
    let gamma = cfg.gamma.value(cfg.iterations);
    let mut rng = RandomStream::seed_from_u64(cfg.seed);
    let mut rec = Recorder::new(cfg);
    let mut theta = theta0.clone();
    let mut lambda: Option<Multipliers> = None;
    let mut t = 0;
    let stopped_early = loop {
        check_theta(problem, &theta, t)?;
        let first = problem.sample(&theta, &mut rng)?;
        let second = problem.sample(&theta, &mut rng)?;
        let ctx1 = SubproblemContext::new(first.jacobian, first.value, pref, cfg.domain)?;
        let current = match lambda.take() {
            None => ctx1.initial_multipliers(),
            Some(l) if cfg.domain == MultiplierDomain::Adaptive => ctx1.project(&l),
            Some(l) => l,
        };
        let d = ctx1.direction(&current);

        let exact = SubproblemContext::at(problem, pref, &theta, MultiplierDomain::Simplified)?;
        let measure = d.norm_squared() + exact.equality_values().norm_squared();
        let stopped_early = cfg.stop_kkt.is_some_and(|s| measure <= s);
        let last = t == cfg.iterations || stopped_early;
        rec.push(
            t,
            last,
            exact.objective_values(),
            &d,
            exact.inequality_values(),
            exact.equality_values(),
            exact.kkt_residual_at(&current),
            &theta,
        );
        if last {
            break stopped_early;
        }
        theta += &d * alpha;
        let grad = double_sample_gradient(&ctx1, &second.jacobian, &current)?;
        let (m, mg, mh) = ctx1.dims();
        let stepped = Multipliers::from_stacked(&(current.stacked() - grad * gamma), m, mg, mh)?;
        if !all_finite(&stepped.stacked()) {
            return Err(Error::NonFinite(format!("multipliers at iteration {t}")));
        }
        lambda = Some(ctx1.project(&stepped));
        t += 1;
    };
    Ok(rec.finish(theta, t, stopped_early, start))
}

/// Gradient descent on `w^T F`. Constraints in `pref` are evaluated for the
/// diagnostics but not enforced.
pub fn run_linear_scalarization(
    problem: &Problem,
    pref: &Preference,
    weights: &DVector<f64>,
    theta0: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<RunReport> {
    cfg.validate()?;
    check_pref(problem, pref)?;
    check_dim("scalarization weights", problem.num_objectives(), weights.len())?;
    if weights.iter().any(|w| !(*w >= 0.0)) || (weights.sum() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument("scalarization weights must be >= 0 and sum to 1".into()));
    }
    let start = Instant::now();
    let alpha = cfg.alpha.value(cfg.iterations);
    let mut rec = Recorder::new(cfg);
    let mut theta = theta0.clone();
    let mut t = 0;
    let stopped_early = loop {
        check_theta(problem, &theta, t)?;
        let eval = problem.evaluate(&theta)?;
        let (g, h) = pref.eval_constraints(&eval.value)?;
        let d = -(&eval.jacobian * weights);
        let kkt = d.norm_squared() + positive_part_l1(&g) + h.lp_norm(1);
        let stopped_early = cfg.stop_kkt.is_some_and(|s| kkt <= s);
        let last = t == cfg.iterations || stopped_early;
        rec.push(t, last, &eval.value, &d, &g, &h, kkt, &theta);
        if last {
            break stopped_early;
        }
        theta += &d * alpha;
        t += 1;
    };
    Ok(rec.finish(theta, t, stopped_early, start))
}
