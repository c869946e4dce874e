//! Vector-valued objectives `F: R^q -> R^M` with exact Jacobians, plus the
//! built-in benchmark instances.
//!
//! Jacobians are stored `q x M`: column `m` is the gradient of `f_m`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};

/// Seedable random stream used by every stochastic component.
pub type RandomStream = ChaCha8Rng;

/// Objective values together with the Jacobian at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: DVector<f64>,
    pub jacobian: DMatrix<f64>,
}

/// A smooth vector objective with an analytic Jacobian.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;
    fn num_objectives(&self) -> usize;
    fn value(&self, theta: &DVector<f64>) -> DVector<f64>;
    /// `q x M` Jacobian, one column per objective.
    fn jacobian(&self, theta: &DVector<f64>) -> DMatrix<f64>;

    fn evaluate(&self, theta: &DVector<f64>) -> Evaluation {
        Evaluation {
            value: self.value(theta),
            jacobian: self.jacobian(theta),
        }
    }
}

/// Produces unbiased stochastic evaluations `F_xi(theta)`, `grad F_xi(theta)`.
pub trait Sampler: Send + Sync {
    fn sample(&self, theta: &DVector<f64>, rng: &mut RandomStream) -> Evaluation;
}

/// An optimization problem: deterministic objective plus optional sampler.
#[derive(Clone)]
pub struct Problem {
    name: String,
    objective: Arc<dyn Objective>,
    sampler: Option<Arc<dyn Sampler>>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("num_objectives", &self.num_objectives())
            .field("stochastic", &self.sampler.is_some())
            .finish()
    }
}

impl Problem {
    pub fn new(name: impl Into<String>, objective: Arc<dyn Objective>) -> Self {
        Self {
            name: name.into(),
            objective,
            sampler: None,
        }
    }

    pub fn with_sampler(mut self, sampler: Arc<dyn Sampler>) -> Self {
        self.sampler = Some(sampler);
        self
    }

    /// Attaches a sampler that always returns the deterministic evaluation.
    pub fn with_exact_sampler(self) -> Self {
        let exact = ExactSampler(self.objective.clone());
        self.with_sampler(Arc::new(exact))
    }

    /// `F(theta) = (1 - exp(-|theta - u|^2), 1 - exp(-|theta + u|^2))` with
    /// `u = 1/sqrt(q) * 1`. Its Pareto front is non-convex.
    pub fn synthetic_concave(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("synthetic_concave needs q >= 1".into()));
        }
        Ok(Self::new("synthetic_concave", Arc::new(SyntheticConcave::new(q))))
    }

    /// `f_m(theta) = scale_m * |theta - center_m|^2`.
    pub fn quadratic(centers: Vec<DVector<f64>>, scales: Vec<f64>) -> Result<Self> {
        Ok(Self::new("quadratic", Arc::new(Quadratic::new(centers, scales)?)))
    }

    /// Uniform mixture of per-sample objectives. The deterministic evaluators
    /// average all samples; the sampler draws one sample uniformly.
    pub fn finite_sum(samples: Vec<Arc<dyn Objective>>) -> Result<Self> {
        let sum = Arc::new(FiniteSum::new(samples)?);
        Ok(Self::new("finite_sum", sum.clone()).with_sampler(sum))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn num_objectives(&self) -> usize {
        self.objective.num_objectives()
    }

    pub fn objective(&self) -> &Arc<dyn Objective> {
        &self.objective
    }

    pub fn sampler(&self) -> Option<&Arc<dyn Sampler>> {
        self.sampler.as_ref()
    }

    pub fn is_stochastic(&self) -> bool {
        self.sampler.is_some()
    }

    pub fn value(&self, theta: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim("theta", self.dim(), theta.len())?;
        Ok(self.objective.value(theta))
    }

    pub fn jacobian(&self, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
        check_dim("theta", self.dim(), theta.len())?;
        Ok(self.objective.jacobian(theta))
    }

    pub fn evaluate(&self, theta: &DVector<f64>) -> Result<Evaluation> {
        check_dim("theta", self.dim(), theta.len())?;
        Ok(self.objective.evaluate(theta))
    }

    /// One stochastic evaluation. Errors when the problem has no sampler.
    pub fn sample(&self, theta: &DVector<f64>, rng: &mut RandomStream) -> Result<Evaluation> {
        check_dim("theta", self.dim(), theta.len())?;
        let sampler = self
            .sampler
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument(format!("problem '{}' has no sampler", self.name)))?;
        Ok(sampler.sample(theta, rng))
    }
}

struct ExactSampler(Arc<dyn Objective>);

impl Sampler for ExactSampler {
    fn sample(&self, theta: &DVector<f64>, _rng: &mut RandomStream) -> Evaluation {
        self.0.evaluate(theta)
    }
}

/// Two Gaussian wells centred at `+u` and `-u`.
#[derive(Debug, Clone)]
pub struct SyntheticConcave {
    center: DVector<f64>,
}

impl SyntheticConcave {
    pub fn new(q: usize) -> Self {
        Self {
            center: DVector::from_element(q, 1.0 / (q as f64).sqrt()),
        }
    }

    fn parts(&self, theta: &DVector<f64>) -> [(f64, DVector<f64>); 2] {
        let minus = theta - &self.center;
        let plus = theta + &self.center;
        [
            ((-minus.norm_squared()).exp(), minus),
            ((-plus.norm_squared()).exp(), plus),
        ]
    }
}

impl Objective for SyntheticConcave {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn num_objectives(&self) -> usize {
        2
    }

    fn value(&self, theta: &DVector<f64>) -> DVector<f64> {
        let [(e1, _), (e2, _)] = self.parts(theta);
        DVector::from_vec(vec![1.0 - e1, 1.0 - e2])
    }

    fn jacobian(&self, theta: &DVector<f64>) -> DMatrix<f64> {
        let [(e1, r1), (e2, r2)] = self.parts(theta);
        let mut jac = DMatrix::zeros(self.dim(), 2);
        jac.set_column(0, &(r1 * (2.0 * e1)));
        jac.set_column(1, &(r2 * (2.0 * e2)));
        jac
    }
}

/// Separable quadratic bowls `f_m(theta) = s_m |theta - c_m|^2`.
#[derive(Debug, Clone)]
pub struct Quadratic {
    centers: Vec<DVector<f64>>,
    scales: Vec<f64>,
}

impl Quadratic {
    pub fn new(centers: Vec<DVector<f64>>, scales: Vec<f64>) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::InvalidArgument("quadratic needs at least one center".into()));
        }
        check_dim("quadratic scales", centers.len(), scales.len())?;
        let q = centers[0].len();
        if q == 0 {
            return Err(Error::InvalidArgument("quadratic centers must be non-empty".into()));
        }
        for c in &centers {
            check_dim("quadratic center", q, c.len())?;
        }
        if scales.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::InvalidArgument("quadratic scales must be finite and >= 0".into()));
        }
        Ok(Self { centers, scales })
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.centers[0].len()
    }

    fn num_objectives(&self) -> usize {
        self.centers.len()
    }

    fn value(&self, theta: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.centers.len(),
            self.centers
                .iter()
                .zip(&self.scales)
                .map(|(c, s)| s * (theta - c).norm_squared()),
        )
    }

    fn jacobian(&self, theta: &DVector<f64>) -> DMatrix<f64> {
        let mut jac = DMatrix::zeros(self.dim(), self.centers.len());
        for (m, (c, s)) in self.centers.iter().zip(&self.scales).enumerate() {
            jac.set_column(m, &((theta - c) * (2.0 * s)));
        }
        jac
    }
}

/// Objectives that do not depend on `theta`.
#[derive(Debug, Clone)]
pub struct Constant {
    dim: usize,
    values: DVector<f64>,
}

impl Constant {
    pub fn new(dim: usize, values: DVector<f64>) -> Self {
        Self { dim, values }
    }
}

impl Objective for Constant {
    fn dim(&self) -> usize {
        self.dim
    }

    fn num_objectives(&self) -> usize {
        self.values.len()
    }

    fn value(&self, _theta: &DVector<f64>) -> DVector<f64> {
        self.values.clone()
    }

    fn jacobian(&self, _theta: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(self.dim, self.values.len())
    }
}

/// Uniform finite mixture `F = (1/n) sum_i F_i`.
pub struct FiniteSum {
    samples: Vec<Arc<dyn Objective>>,
}

impl FiniteSum {
    pub fn new(samples: Vec<Arc<dyn Objective>>) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::InvalidArgument("finite sum needs at least one sample".into()))?;
        let (q, m) = (first.dim(), first.num_objectives());
        for s in &samples {
            check_dim("finite-sum sample dim", q, s.dim())?;
            check_dim("finite-sum sample objectives", m, s.num_objectives())?;
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[Arc<dyn Objective>] {
        &self.samples
    }
}

impl Objective for FiniteSum {
    fn dim(&self) -> usize {
        self.samples[0].dim()
    }

    fn num_objectives(&self) -> usize {
        self.samples[0].num_objectives()
    }

    fn value(&self, theta: &DVector<f64>) -> DVector<f64> {
        let n = self.samples.len() as f64;
        let mut acc = DVector::zeros(self.num_objectives());
        for s in &self.samples {
            acc += s.value(theta);
        }
        acc / n
    }

    fn jacobian(&self, theta: &DVector<f64>) -> DMatrix<f64> {
        let n = self.samples.len() as f64;
        let mut acc = DMatrix::zeros(self.dim(), self.num_objectives());
        for s in &self.samples {
            acc += s.jacobian(theta);
        }
        acc / n
    }
}

impl Sampler for FiniteSum {
    fn sample(&self, theta: &DVector<f64>, rng: &mut RandomStream) -> Evaluation {
        let idx = rng.random_range(0..self.samples.len());
        self.samples[idx].evaluate(theta)
    }
}

/// Central finite-difference Jacobian with step `h * (1 + |theta|)`.
pub fn finite_difference_jacobian(objective: &dyn Objective, theta: &DVector<f64>, h: f64) -> DMatrix<f64> {
    let step = h * (1.0 + theta.norm());
    let mut jac = DMatrix::zeros(objective.dim(), objective.num_objectives());
    let mut probe = theta.clone();
    for i in 0..theta.len() {
        probe[i] = theta[i] + step;
        let up = objective.value(&probe);
        probe[i] = theta[i] - step;
        let down = objective.value(&probe);
        probe[i] = theta[i];
        jac.set_row(i, &((up - down) / (2.0 * step)).transpose());
    }
    jac
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::StandardNormal;

    fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).norm() / (1e-12 + b.norm())
    }

    #[test]
    fn synthetic_values_at_origin_and_center() {
        let p = Problem::synthetic_concave(20).unwrap();
        let f = p.value(&DVector::zeros(20)).unwrap();
        let e1 = 1.0 - (-1.0f64).exp();
        assert!((f[0] - e1).abs() < 1e-12 && (f[1] - e1).abs() < 1e-12);
        assert!((f[0] - 0.632121).abs() < 1e-6);

        let u = DVector::from_element(20, 1.0 / 20f64.sqrt());
        let f = p.value(&u).unwrap();
        assert!(f[0].abs() < 1e-12);
        assert!((f[1] - (1.0 - (-4.0f64).exp())).abs() < 1e-12);
        assert!((f[1] - 0.981684).abs() < 1e-6);
    }

    #[test]
    fn synthetic_rejects_zero_dim() {
        assert!(Problem::synthetic_concave(0).is_err());
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let mut rng = RandomStream::seed_from_u64(7);
        let problems: Vec<Problem> = vec![
            Problem::synthetic_concave(4).unwrap(),
            Problem::synthetic_concave(20).unwrap(),
            Problem::quadratic(
                vec![DVector::from_vec(vec![1.0, -2.0, 0.5]), DVector::from_vec(vec![0.0, 1.0, 3.0])],
                vec![1.0, 0.5],
            )
            .unwrap(),
        ];
        for p in &problems {
            for _ in 0..20 {
                let theta = DVector::from_iterator(p.dim(), (0..p.dim()).map(|_| rng.sample::<f64, _>(StandardNormal) * 0.4));
                let exact = p.jacobian(&theta).unwrap();
                let fd = finite_difference_jacobian(p.objective().as_ref(), &theta, 1e-5);
                assert!(rel_err(&fd, &exact) <= 1e-5, "{} at {theta}", p.name());
            }
        }
    }

    #[test]
    fn finite_sum_rejects_empty_and_mismatched() {
        assert!(Problem::finite_sum(vec![]).is_err());
        let a: Arc<dyn Objective> = Arc::new(Constant::new(2, DVector::zeros(2)));
        let b: Arc<dyn Objective> = Arc::new(Constant::new(3, DVector::zeros(2)));
        assert!(Problem::finite_sum(vec![a, b]).is_err());
    }

    #[test]
    fn single_sample_sampler_is_exact() {
        let q: Arc<dyn Objective> = Arc::new(
            Quadratic::new(vec![DVector::from_vec(vec![1.0, 2.0])], vec![1.0]).unwrap(),
        );
        let p = Problem::finite_sum(vec![q]).unwrap();
        let theta = DVector::from_vec(vec![0.3, -0.1]);
        let mut rng = RandomStream::seed_from_u64(1);
        for _ in 0..5 {
            assert_eq!(p.sample(&theta, &mut rng).unwrap(), p.evaluate(&theta).unwrap());
        }
    }

    #[test]
    fn symmetric_samples_cancel_at_origin() {
        let a = DVector::from_vec(vec![1.0, -2.0]);
        let s1: Arc<dyn Objective> = Arc::new(Quadratic::new(vec![a.clone()], vec![1.0]).unwrap());
        let s2: Arc<dyn Objective> = Arc::new(Quadratic::new(vec![-a], vec![1.0]).unwrap());
        let p = Problem::finite_sum(vec![s1, s2]).unwrap();
        let jac = p.jacobian(&DVector::zeros(2)).unwrap();
        assert!(jac.norm() < 1e-15);
    }

    #[test]
    fn missing_sampler_is_an_error() {
        let p = Problem::synthetic_concave(2).unwrap();
        let mut rng = RandomStream::seed_from_u64(0);
        assert!(p.sample(&DVector::zeros(2), &mut rng).is_err());
        assert!(p.value(&DVector::zeros(3)).is_err());
    }
}
