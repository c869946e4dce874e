//! Experiment configuration files (TOML).
//!
//! [`parse_config`] turns a config document into a fully validated
//! [`ExperimentSpec`]. Unknown keys are rejected everywhere. Every default is
//! filled in, rays and two-point preferences are expanded into explicit
//! constraint matrices, and cones given by rays become halfspace matrices, so
//! [`ExperimentSpec::to_toml`] followed by [`parse_config`] reproduces the
//! same spec.
//!
//! ```toml
//! seed = 0
//!
//! [problem]
//! kind = "synthetic_concave"
//! q = 20
//!
//! [preference]
//! kind = "uniform_rays"
//! count = 5
//!
//! [solver]
//! variant = "meta"
//! alpha = 0.05
//! ```

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bench::{uniform_preference_rays, ControlledAscent, Init, SuiteOptions};
use crate::cone::{ray_to_equality, rays_to_halfspaces, two_points_to_equality};
use crate::error::{Error, Result};
use crate::preference::Preference;
use crate::problem::{Objective, Problem, Quadratic};
use crate::solvers::{SolverConfig, StepSchedule, Variant};
use crate::subproblem::{MultiplierDomain, PgdOptions};

pub const DEFAULT_ANGLE_LO: f64 = PI / 20.0;
pub const DEFAULT_ANGLE_HI: f64 = 9.0 * PI / 20.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    SyntheticConcave {
        q: usize,
    },
    Quadratic {
        centers: Vec<Vec<f64>>,
        scales: Vec<f64>,
    },
    /// Uniform mixture of quadratics; the only built-in problem with a sampler.
    FiniteSumQuadratic {
        samples: Vec<QuadraticSample>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticSample {
    pub centers: Vec<Vec<f64>>,
    pub scales: Vec<f64>,
}

impl ProblemSpec {
    pub fn build(&self) -> Result<Problem> {
        match self {
            ProblemSpec::SyntheticConcave { q } => Problem::synthetic_concave(*q),
            ProblemSpec::Quadratic { centers, scales } => Problem::quadratic(to_vectors(centers), scales.clone()),
            ProblemSpec::FiniteSumQuadratic { samples } => {
                let objectives = samples
                    .iter()
                    .map(|s| Ok(Arc::new(Quadratic::new(to_vectors(&s.centers), s.scales.clone())?) as Arc<dyn Objective>))
                    .collect::<Result<Vec<_>>>()?;
                Problem::finite_sum(objectives)
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConeConfig {
    #[default]
    Identity,
    /// Halfspace rows `A` of `C_A = {y : A y >= 0}`.
    Matrix {
        matrix: Vec<Vec<f64>>,
    },
    /// Generating rays, one per entry.
    Rays {
        rays: Vec<Vec<f64>>,
    },
    /// Per-run cone from `F(theta_0)`, the target point, and base rays
    /// (default: the coordinate axes).
    ControlledAscent {
        target: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        base_rays: Option<Vec<Vec<f64>>>,
    },
}

/// One set of preference constraints. `ray` is kept as a label for plots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSet {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub b_g: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub b_g_offset: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub b_h: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub b_h_offset: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreferenceKind {
    /// No constraints: a single unconstrained run.
    #[default]
    None,
    /// `ray`: one equality-constrained run.
    Ray,
    /// `rays`: one run per ray.
    Rays,
    /// `count` 2-D rays with equally spaced angles in `[angle_lo, angle_hi]`.
    UniformRays,
    /// Equality constraint through the objective-space points `from`, `to`.
    TwoPoint,
    /// `sets`: one run per constraint set.
    Explicit,
}

fn default_weight() -> f64 {
    1.0
}

/// The `[preference]` section. Which of the optional keys are allowed
/// depends on `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreferenceConfig {
    #[serde(default)]
    pub kind: PreferenceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rays: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle_lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle_hi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sets: Option<Vec<ConstraintSet>>,
    #[serde(default = "default_weight")]
    pub c_g: f64,
    #[serde(default = "default_weight")]
    pub c_h: f64,
}

impl Default for PreferenceConfig {
    fn default() -> Self {
        Self {
            kind: PreferenceKind::None,
            ray: None,
            rays: None,
            count: None,
            angle_lo: None,
            angle_hi: None,
            from: None,
            to: None,
            sets: None,
            c_g: 1.0,
            c_h: 1.0,
        }
    }
}

impl PreferenceConfig {
    fn present_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let mut mark = |present: bool, key| {
            if present {
                keys.push(key)
            }
        };
        mark(self.ray.is_some(), "ray");
        mark(self.rays.is_some(), "rays");
        mark(self.count.is_some(), "count");
        mark(self.angle_lo.is_some(), "angle_lo");
        mark(self.angle_hi.is_some(), "angle_hi");
        mark(self.from.is_some(), "from");
        mark(self.to.is_some(), "to");
        mark(self.sets.is_some(), "sets");
        keys
    }

    fn check_keys(&self) -> Result<()> {
        let allowed: &[&str] = match self.kind {
            PreferenceKind::None => &[],
            PreferenceKind::Ray => &["ray"],
            PreferenceKind::Rays => &["rays"],
            PreferenceKind::UniformRays => &["count", "angle_lo", "angle_hi"],
            PreferenceKind::TwoPoint => &["from", "to"],
            PreferenceKind::Explicit => &["sets"],
        };
        match self.present_keys().into_iter().find(|k| !allowed.contains(k)) {
            Some(k) => Err(Error::Config(format!(
                "preference key `{k}` does not apply to kind {:?}",
                self.kind
            ))),
            None => Ok(()),
        }
    }
}

fn required<'a, T>(v: &'a Option<T>, key: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::Config(format!("preference needs `{key}`")))
}

/// A step size written either as a bare number or as a schedule table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepConfig {
    Value(f64),
    Schedule(StepSchedule),
}

impl From<StepConfig> for StepSchedule {
    fn from(s: StepConfig) -> Self {
        match s {
            StepConfig::Value(value) => StepSchedule::Constant { value },
            StepConfig::Schedule(s) => s,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<StepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<StepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<PgdOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_kkt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<MultiplierDomain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warm_start: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_every: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_theta: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

/// Initialization as written in a config; a normal init without `scale`
/// uses `1/sqrt(q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitConfig {
    Normal {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
    Uniform {
        low: f64,
        high: f64,
    },
    HardNearFront {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        low: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        high: Option<f64>,
    },
    Fixed {
        theta: Vec<f64>,
    },
}

impl Default for InitConfig {
    fn default() -> Self {
        InitConfig::Normal { scale: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default)]
    pub plot: bool,
}

/// The document as written, before defaults and expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    pub problem: ProblemSpec,
    #[serde(default)]
    pub cone: ConeConfig,
    #[serde(default)]
    pub preference: PreferenceConfig,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub init: InitConfig,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_parallelism() -> usize {
    1
}

/// Cone after normalization.
#[derive(Debug, Clone, PartialEq)]
pub enum ConeSpec {
    Fixed(DMatrix<f64>),
    ControlledAscent { target: DVector<f64>, base_rays: DMatrix<f64> },
}

/// A validated experiment: everything needed to run, with defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub seed: u64,
    pub parallelism: usize,
    pub problem: ProblemSpec,
    pub num_objectives: usize,
    pub dim: usize,
    pub cone: ConeSpec,
    pub constraint_sets: Vec<ConstraintSet>,
    pub c_g: f64,
    pub c_h: f64,
    pub solver: SolverConfig,
    pub init: Init,
    pub output_dir: Option<String>,
    pub plot: bool,
}

pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    normalize(file)
}

fn to_vectors(rows: &[Vec<f64>]) -> Vec<DVector<f64>> {
    rows.iter().map(|r| DVector::from_column_slice(r)).collect()
}

fn to_matrix(rows: &[Vec<f64>], cols: usize, what: &str) -> Result<DMatrix<f64>> {
    if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
        return Err(Error::Config(format!(
            "{what}: every row needs {cols} entries, found a row with {}",
            bad.len()
        )));
    }
    Ok(DMatrix::from_row_iterator(rows.len(), cols, rows.iter().flatten().copied()))
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

fn normalize(file: ConfigFile) -> Result<ExperimentSpec> {
    if file.seed > i64::MAX as u64 {
        return Err(Error::Config("seed must fit in a signed 64-bit integer".into()));
    }
    if file.parallelism == 0 {
        return Err(Error::Config("parallelism must be >= 1".into()));
    }
    let problem = file.problem.build().map_err(config_err)?;
    let m = problem.num_objectives();
    let q = problem.dim();

    let cone = match &file.cone {
        ConeConfig::Identity => ConeSpec::Fixed(DMatrix::identity(m, m)),
        ConeConfig::Matrix { matrix } => ConeSpec::Fixed(to_matrix(matrix, m, "cone matrix")?),
        ConeConfig::Rays { rays } => {
            // rays are listed one per entry; the generator matrix holds them as columns
            let y = to_matrix(rays, m, "cone rays")?.transpose();
            ConeSpec::Fixed(rays_to_halfspaces(&y).map_err(config_err)?)
        }
        ConeConfig::ControlledAscent { target, base_rays } => {
            if target.len() != m {
                return Err(Error::Config(format!("controlled-ascent target needs {m} entries")));
            }
            let base = match base_rays {
                Some(r) => to_matrix(r, m, "base rays")?.transpose(),
                None => DMatrix::identity(m, m),
            };
            ConeSpec::ControlledAscent {
                target: DVector::from_column_slice(target),
                base_rays: base,
            }
        }
    };
    if let ConeSpec::Fixed(a) = &cone {
        Preference::new(a.clone()).map_err(config_err)?;
    }

    let pref = &file.preference;
    let constraint_sets = expand_preferences(pref, m)?;

    let solver = solver_config(&file.solver, file.seed)?;
    let init = match &file.init {
        InitConfig::Normal { scale } => Init::Normal {
            scale: scale.unwrap_or(1.0 / (q as f64).sqrt()),
        },
        InitConfig::Uniform { low, high } => Init::Uniform { low: *low, high: *high },
        InitConfig::HardNearFront { low, high } => Init::HardNearFront {
            low: low.unwrap_or(0.15),
            high: high.unwrap_or(0.5),
        },
        InitConfig::Fixed { theta } => Init::Fixed { theta: theta.clone() },
    };
    init.validate(q).map_err(config_err)?;

    let spec = ExperimentSpec {
        seed: file.seed,
        parallelism: file.parallelism,
        problem: file.problem,
        num_objectives: m,
        dim: q,
        cone,
        constraint_sets,
        c_g: pref.c_g,
        c_h: pref.c_h,
        solver,
        init,
        output_dir: file.output.dir,
        plot: file.output.plot,
    };
    spec.validate()?;
    Ok(spec)
}

fn ray_set(ray: &[f64], m: usize) -> Result<ConstraintSet> {
    if ray.len() != m {
        return Err(Error::Config(format!("preference ray needs {m} entries, got {}", ray.len())));
    }
    let (b, off) = ray_to_equality(&DVector::from_column_slice(ray)).map_err(config_err)?;
    Ok(ConstraintSet {
        b_g: Vec::new(),
        b_g_offset: Vec::new(),
        b_h: to_rows(&b),
        b_h_offset: off.iter().copied().collect(),
        ray: Some(ray.to_vec()),
    })
}

fn expand_preferences(pref: &PreferenceConfig, m: usize) -> Result<Vec<ConstraintSet>> {
    pref.check_keys()?;
    let empty = ConstraintSet {
        b_g: Vec::new(),
        b_g_offset: Vec::new(),
        b_h: Vec::new(),
        b_h_offset: Vec::new(),
        ray: None,
    };
    match pref.kind {
        PreferenceKind::None => Ok(vec![empty]),
        PreferenceKind::Ray => Ok(vec![ray_set(required(&pref.ray, "ray")?, m)?]),
        PreferenceKind::Rays => {
            let rays = required(&pref.rays, "rays")?;
            if rays.is_empty() {
                return Err(Error::Config("rays list is empty".into()));
            }
            rays.iter().map(|r| ray_set(r, m)).collect()
        }
        PreferenceKind::UniformRays => {
            if m != 2 {
                return Err(Error::Config("uniform_rays needs a 2-objective problem".into()));
            }
            let count = *required(&pref.count, "count")?;
            let lo = pref.angle_lo.unwrap_or(DEFAULT_ANGLE_LO);
            let hi = pref.angle_hi.unwrap_or(DEFAULT_ANGLE_HI);
            uniform_preference_rays(count, lo, hi)
                .map_err(config_err)?
                .iter()
                .map(|r| ray_set(r.as_slice(), m))
                .collect()
        }
        PreferenceKind::TwoPoint => {
            let (from, to) = (required(&pref.from, "from")?, required(&pref.to, "to")?);
            if from.len() != m || to.len() != m {
                return Err(Error::Config(format!("two-point preference needs points with {m} entries")));
            }
            let (b, off) = two_points_to_equality(&DVector::from_column_slice(from), &DVector::from_column_slice(to))
                .map_err(config_err)?;
            Ok(vec![ConstraintSet {
                b_h: to_rows(&b),
                b_h_offset: off.iter().copied().collect(),
                ..empty
            }])
        }
        PreferenceKind::Explicit => {
            let sets = required(&pref.sets, "sets")?;
            if sets.is_empty() {
                return Err(Error::Config("explicit preference needs at least one set".into()));
            }
            Ok(sets.clone())
        }
    }
}

fn solver_config(s: &SolverSection, seed: u64) -> Result<SolverConfig> {
    let variant = s.variant.unwrap_or(Variant::Meta);
    let mut cfg = match variant {
        Variant::Meta => SolverConfig::meta(),
        Variant::SingleLoop => SolverConfig::single_loop(),
        Variant::Stochastic => SolverConfig::stochastic(),
        Variant::LinearScalarization => SolverConfig {
            variant,
            ..SolverConfig::linear_scalarization(Vec::new())
        },
    };
    if let Some(a) = s.alpha {
        cfg.alpha = a.into();
    }
    if let Some(g) = s.gamma {
        cfg.gamma = g.into();
    }
    if let Some(t) = s.iterations {
        cfg.iterations = t;
    }
    if let Some(inner) = s.inner {
        cfg.inner = inner;
    }
    cfg.stop_kkt = s.stop_kkt;
    if let Some(d) = s.domain {
        cfg.domain = d;
    }
    if let Some(w) = s.warm_start {
        cfg.warm_start = w;
    }
    if let Some(r) = s.record_every {
        cfg.record_every = r;
    }
    if let Some(r) = s.record_theta {
        cfg.record_theta = r;
    }
    cfg.weights = s.weights.clone();
    if variant != Variant::LinearScalarization && cfg.weights.is_some() {
        return Err(Error::Config("`weights` only applies to linear_scalarization".into()));
    }
    cfg.seed = seed;
    cfg.validate().map_err(config_err)?;
    Ok(cfg)
}

impl ExperimentSpec {
    pub fn build_problem(&self) -> Result<Problem> {
        self.problem.build()
    }

    /// Cone used for every run; for controlled ascent the per-run cone
    /// replaces it, and the orthant stands in.
    fn base_cone(&self) -> DMatrix<f64> {
        match &self.cone {
            ConeSpec::Fixed(a) => a.clone(),
            ConeSpec::ControlledAscent { .. } => DMatrix::identity(self.num_objectives, self.num_objectives),
        }
    }

    pub fn preferences(&self) -> Result<Vec<Preference>> {
        let m = self.num_objectives;
        self.constraint_sets
            .iter()
            .map(|set| {
                let mut p = Preference::new(self.base_cone())?;
                if !set.b_g.is_empty() {
                    p = p.with_inequalities(
                        to_matrix(&set.b_g, m, "b_g")?,
                        DVector::from_column_slice(&set.b_g_offset),
                    )?;
                }
                if !set.b_h.is_empty() {
                    p = p.with_equalities(
                        to_matrix(&set.b_h, m, "b_h")?,
                        DVector::from_column_slice(&set.b_h_offset),
                    )?;
                }
                p.with_weights(self.c_g, self.c_h)
            })
            .collect()
    }

    pub fn suite_options(&self) -> SuiteOptions {
        SuiteOptions {
            parallelism: self.parallelism,
            init: self.init.clone(),
            base_seed: self.seed,
            reference: None,
            controlled_ascent: match &self.cone {
                ConeSpec::ControlledAscent { target, base_rays } => Some(ControlledAscent {
                    target: target.clone(),
                    base_rays: base_rays.clone(),
                }),
                ConeSpec::Fixed(_) => None,
            },
        }
    }

    /// Cross-section checks that need the built problem and preferences.
    pub fn validate(&self) -> Result<()> {
        let m = self.num_objectives;
        if let ConeSpec::Fixed(a) = &self.cone {
            if a.nrows() != m || a.ncols() != m {
                return Err(Error::Config(format!("cone matrix must be {m}x{m}")));
            }
        }
        for (i, set) in self.constraint_sets.iter().enumerate() {
            if set.b_g.len() != set.b_g_offset.len() || set.b_h.len() != set.b_h_offset.len() {
                return Err(Error::Config(format!(
                    "preference set {i}: each constraint row needs exactly one offset"
                )));
            }
        }
        let prefs = self.preferences().map_err(config_err)?;
        let variant = self.solver.variant;
        if matches!(variant, Variant::SingleLoop | Variant::Stochastic) {
            if let Some(p) = prefs.iter().find(|p| p.num_inequalities() > 0) {
                return Err(Error::Config(format!(
                    "{variant:?} solver supports equality preferences only, got {} inequality rows",
                    p.num_inequalities()
                )));
            }
        }
        if variant == Variant::Stochastic && !matches!(self.problem, ProblemSpec::FiniteSumQuadratic { .. }) {
            return Err(Error::Config("stochastic solver needs a finite_sum_quadratic problem".into()));
        }
        if let Some(w) = &self.solver.weights {
            if w.len() != m || w.iter().any(|x| !(*x >= 0.0)) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::Config(format!(
                    "weights must have {m} non-negative entries summing to 1"
                )));
            }
        }
        if !(self.c_g > 0.0 && self.c_h > 0.0) {
            return Err(Error::Config("c_g and c_h must be positive".into()));
        }
        Ok(())
    }

    /// The normalized config document; parsing it yields `self` again.
    pub fn to_config_file(&self) -> ConfigFile {
        let s = &self.solver;
        ConfigFile {
            seed: self.seed,
            parallelism: self.parallelism,
            problem: self.problem.clone(),
            cone: match &self.cone {
                ConeSpec::Fixed(a) => ConeConfig::Matrix { matrix: to_rows(a) },
                ConeSpec::ControlledAscent { target, base_rays } => ConeConfig::ControlledAscent {
                    target: target.iter().copied().collect(),
                    base_rays: Some(to_rows(&base_rays.transpose())),
                },
            },
            preference: PreferenceConfig {
                kind: PreferenceKind::Explicit,
                sets: Some(self.constraint_sets.clone()),
                c_g: self.c_g,
                c_h: self.c_h,
                ..PreferenceConfig::default()
            },
            solver: SolverSection {
                variant: Some(s.variant),
                alpha: Some(StepConfig::Schedule(s.alpha)),
                gamma: Some(StepConfig::Schedule(s.gamma)),
                iterations: Some(s.iterations),
                inner: Some(s.inner),
                stop_kkt: s.stop_kkt,
                domain: Some(s.domain),
                warm_start: Some(s.warm_start),
                record_every: Some(s.record_every),
                record_theta: Some(s.record_theta),
                weights: s.weights.clone(),
            },
            init: match &self.init {
                Init::Normal { scale } => InitConfig::Normal { scale: Some(*scale) },
                Init::Uniform { low, high } => InitConfig::Uniform { low: *low, high: *high },
                Init::HardNearFront { low, high } => InitConfig::HardNearFront {
                    low: Some(*low),
                    high: Some(*high),
                },
                Init::Fixed { theta } => InitConfig::Fixed { theta: theta.clone() },
            },
            output: OutputSection {
                dir: self.output_dir.clone(),
                plot: self.plot,
            },
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&self.to_config_file()).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn num_runs(&self) -> usize {
        self.constraint_sets.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[problem]
kind = "synthetic_concave"
q = 20

[preference]
kind = "ray"
ray = [1.0, 1.0]
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let spec = parse_config(MINIMAL).unwrap();
        assert_eq!(spec.solver.variant, Variant::Meta);
        assert_eq!(spec.solver.alpha, StepSchedule::Constant { value: 0.05 });
        assert_eq!(spec.solver.iterations, 100);
        assert_eq!(spec.c_h, 1.0);
        assert_eq!(spec.cone, ConeSpec::Fixed(DMatrix::identity(2, 2)));
        assert_eq!(spec.seed, 0);
        assert_eq!(spec.num_runs(), 1);
    }

    #[test]
    fn diagonal_ray_expands_to_difference_row() {
        let spec = parse_config(MINIMAL).unwrap();
        let b = &spec.constraint_sets[0].b_h;
        let r = 1.0 / 2f64.sqrt();
        assert_eq!(b.len(), 1);
        assert!((b[0][0] - r).abs() < 1e-15 && (b[0][1] + r).abs() < 1e-15);
        assert_eq!(spec.constraint_sets[0].b_h_offset, vec![0.0]);
    }

    #[test]
    fn inequalities_with_single_loop_are_rejected() {
        let text = r#"
[problem]
kind = "synthetic_concave"
q = 4

[preference]
kind = "explicit"
sets = [{ b_g = [[1.0, 0.0]], b_g_offset = [-0.5] }]

[solver]
variant = "single_loop"
"#;
        assert!(matches!(parse_config(text), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let typo = MINIMAL.replace("ray = [1.0, 1.0]", "ray = [1.0, 1.0]\nc_hh = 2.0");
        assert!(parse_config(&typo).is_err());
        let top = format!("sed = 3\n{MINIMAL}");
        assert!(parse_config(&top).is_err());
        let solver = format!("{MINIMAL}\n[solver]\nalpah = 0.1\n");
        assert!(parse_config(&solver).is_err());
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let bad_ray = MINIMAL.replace("[1.0, 1.0]", "[1.0, 1.0, 1.0]");
        assert!(parse_config(&bad_ray).is_err());
        let bad_cone = format!("{MINIMAL}\n[cone]\nkind = \"matrix\"\nmatrix = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]\n");
        assert!(parse_config(&bad_cone).is_err());
        let singular = format!("{MINIMAL}\n[cone]\nkind = \"matrix\"\nmatrix = [[1.0, 2.0], [2.0, 4.0]]\n");
        assert!(parse_config(&singular).is_err());
    }

    #[test]
    fn rays_cone_becomes_halfspaces() {
        let text = format!("{MINIMAL}\n[cone]\nkind = \"rays\"\nrays = [[2.0, -1.0], [-1.0, 2.0]]\n");
        let spec = parse_config(&text).unwrap();
        let ConeSpec::Fixed(a) = &spec.cone else { panic!() };
        let mut rows: Vec<(f64, f64)> = a.row_iter().map(|r| (r[0], r[1])).collect();
        rows.sort_by(|x, y| x.0.total_cmp(&y.0));
        let s5 = 5f64.sqrt();
        assert!((rows[0].0 - 1.0 / s5).abs() < 1e-10 && (rows[0].1 - 2.0 / s5).abs() < 1e-10);
        assert!((rows[1].0 - 2.0 / s5).abs() < 1e-10 && (rows[1].1 - 1.0 / s5).abs() < 1e-10);
    }

    #[test]
    fn normalization_is_idempotent() {
        let texts = [
            MINIMAL.to_string(),
            r#"
seed = 12
parallelism = 3
[problem]
kind = "synthetic_concave"
q = 6
[cone]
kind = "controlled_ascent"
target = [0.2, 0.2]
[preference]
kind = "uniform_rays"
count = 4
c_h = 0.01
[solver]
alpha = 0.6
iterations = 200
inner = { step = 0.1, max_iters = 50, tol = 1e-6 }
[init]
kind = "hard_near_front"
[output]
dir = "somewhere"
plot = true
"#
            .to_string(),
            r#"
[problem]
kind = "finite_sum_quadratic"
samples = [
  { centers = [[1.0, 0.0], [-1.0, 0.0]], scales = [1.0, 1.0] },
  { centers = [[1.2, 0.1], [-0.9, 0.0]], scales = [1.0, 0.8] },
]
[preference]
kind = "two_point"
from = [0.0, 0.0]
to = [1.0, 2.0]
[solver]
variant = "stochastic"
alpha = { kind = "inv_sqrt_budget", scale = 0.5 }
gamma = 0.01
stop_kkt = 1e-6
[init]
kind = "fixed"
theta = [0.3, -0.2]
"#
            .to_string(),
        ];
        for text in texts {
            let spec = parse_config(&text).unwrap();
            let again = parse_config(&spec.to_toml().unwrap()).unwrap();
            assert_eq!(spec, again);
            assert_eq!(spec.to_toml().unwrap(), again.to_toml().unwrap());
        }
    }

    #[test]
    fn stochastic_requires_sampled_problem() {
        let text = format!("{MINIMAL}\n[solver]\nvariant = \"stochastic\"\n");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn scalarization_weights_checked() {
        let ok = r#"
[problem]
kind = "synthetic_concave"
q = 4
[solver]
variant = "linear_scalarization"
weights = [0.25, 0.75]
"#;
        assert!(parse_config(ok).is_ok());
        assert!(parse_config(&ok.replace("0.75", "0.5")).is_err());
        let misplaced = MINIMAL.to_string() + "\n[solver]\nweights = [0.5, 0.5]\n";
        assert!(parse_config(&misplaced).is_err());
    }
}
