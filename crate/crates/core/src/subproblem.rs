//! The direction-finding subprogram.
//!
//! For an iterate `theta` with Jacobian `J` (`q x M`), objective values `f`
//! and constraint values `g`, `h`, the primal direction problem
//!
//! ```text
//! min_{d, c}  c + |d|^2 / 2
//! s.t.  A J^T d <= c (A f) / (1^T A f),  B_g J^T d + c_g g <= 0,  B_h J^T d + c_h h = 0
//! ```
//!
//! is solved through its dual over multipliers `l = (l_f, l_g, l_h)`:
//!
//! ```text
//! phi(l) = |J A_ag^T l|^2 / 2 - c_g l_g^T g - c_h l_h^T h,   A_ag = [A; B_g; B_h]
//! ```
//!
//! with `d* = -J A_ag^T l*` and `psi = -phi(l*)`. The `l_f` block lives on the
//! `A f`-weighted simplex (adaptive domain) or on the unit simplex
//! (simplified domain, the SQP-style variant without objective adaptation).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{all_finite, positive_part_l1};
use crate::preference::Preference;
use crate::problem::Problem;

/// Tolerance on domain membership accepted by [`SubproblemContext::phi_value`].
pub const DOMAIN_TOL: f64 = 1e-8;

/// Domain of the objective multipliers `l_f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplierDomain {
    /// `{l >= 0 : l^T (A f) = 1^T (A f)}`; requires `A f > 0`.
    Adaptive,
    /// Unit simplex.
    Simplified,
}

/// Multipliers for the cone, inequality and equality blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Multipliers {
    pub f: DVector<f64>,
    pub g: DVector<f64>,
    pub h: DVector<f64>,
}

impl Multipliers {
    pub fn new(f: DVector<f64>, g: DVector<f64>, h: DVector<f64>) -> Self {
        Self { f, g, h }
    }

    pub fn len(&self) -> usize {
        self.f.len() + self.g.len() + self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `[l_f; l_g; l_h]`.
    pub fn stacked(&self) -> DVector<f64> {
        let mut out = DVector::zeros(self.len());
        let (m, mg) = (self.f.len(), self.g.len());
        out.rows_mut(0, m).copy_from(&self.f);
        out.rows_mut(m, mg).copy_from(&self.g);
        out.rows_mut(m + mg, self.h.len()).copy_from(&self.h);
        out
    }

    pub fn from_stacked(v: &DVector<f64>, m: usize, mg: usize, mh: usize) -> Result<Self> {
        check_dim("stacked multipliers", m + mg + mh, v.len())?;
        Ok(Self {
            f: v.rows(0, m).into_owned(),
            g: v.rows(m, mg).into_owned(),
            h: v.rows(m + mg, mh).into_owned(),
        })
    }
}

/// Everything the subprogram needs at one iterate. Immutable once built.
#[derive(Debug, Clone)]
pub struct SubproblemContext {
    jacobian: DMatrix<f64>,
    f: DVector<f64>,
    g: DVector<f64>,
    h: DVector<f64>,
    stacked: DMatrix<f64>,
    /// `J A_ag^T`, `q x (M + M_g + M_h)`.
    weighted_jacobian: DMatrix<f64>,
    simplex_weights: DVector<f64>,
    simplex_budget: f64,
    c_g: f64,
    c_h: f64,
    domain: MultiplierDomain,
    dims: (usize, usize, usize),
}

impl SubproblemContext {
    pub fn new(
        jacobian: DMatrix<f64>,
        f: DVector<f64>,
        pref: &Preference,
        domain: MultiplierDomain,
    ) -> Result<Self> {
        let m = pref.num_objectives();
        check_dim("Jacobian columns", m, jacobian.ncols())?;
        check_dim("objective values", m, f.len())?;
        if !all_finite(&f) || jacobian.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("objective values or Jacobian".into()));
        }
        let (g, h) = pref.eval_constraints(&f)?;
        let (simplex_weights, simplex_budget) = match domain {
            MultiplierDomain::Simplified => (DVector::from_element(m, 1.0), 1.0),
            MultiplierDomain::Adaptive => {
                let af = pref.cone() * &f;
                if af.iter().any(|x| !(*x > 0.0)) {
                    return Err(Error::DomainViolation(af.iter().copied().collect()));
                }
                let budget = af.sum();
                (af, budget)
            }
        };
        let stacked = pref.stacked();
        let weighted_jacobian = &jacobian * stacked.transpose();
        Ok(Self {
            jacobian,
            f,
            g,
            h,
            stacked,
            weighted_jacobian,
            simplex_weights,
            simplex_budget,
            c_g: pref.c_g(),
            c_h: pref.c_h(),
            domain,
            dims: (m, pref.num_inequalities(), pref.num_equalities()),
        })
    }

    /// Evaluates the problem at `theta` and builds the context.
    pub fn at(problem: &Problem, pref: &Preference, theta: &DVector<f64>, domain: MultiplierDomain) -> Result<Self> {
        let eval = problem.evaluate(theta)?;
        Self::new(eval.jacobian, eval.value, pref, domain)
    }

    pub fn jacobian(&self) -> &DMatrix<f64> {
        &self.jacobian
    }

    pub fn objective_values(&self) -> &DVector<f64> {
        &self.f
    }

    pub fn inequality_values(&self) -> &DVector<f64> {
        &self.g
    }

    pub fn equality_values(&self) -> &DVector<f64> {
        &self.h
    }

    /// `A_ag = [A; B_g; B_h]`.
    pub fn stacked(&self) -> &DMatrix<f64> {
        &self.stacked
    }

    pub fn weighted_jacobian(&self) -> &DMatrix<f64> {
        &self.weighted_jacobian
    }

    pub fn domain(&self) -> MultiplierDomain {
        self.domain
    }

    /// `(M, M_g, M_h)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    fn check_shape(&self, lambda: &Multipliers) -> Result<()> {
        let (m, mg, mh) = self.dims;
        check_dim("l_f", m, lambda.f.len())?;
        check_dim("l_g", mg, lambda.g.len())?;
        check_dim("l_h", mh, lambda.h.len())
    }

    /// Symmetric feasible start: `l_f` uniform on its simplex, `l_g = l_h = 0`.
    pub fn initial_multipliers(&self) -> Multipliers {
        let (m, mg, mh) = self.dims;
        let f = match self.domain {
            MultiplierDomain::Simplified => DVector::from_element(m, 1.0 / m as f64),
            // 1 is feasible: (A f)^T 1 = 1^T (A f)
            MultiplierDomain::Adaptive => DVector::from_element(m, 1.0),
        };
        self.project(&Multipliers::new(f, DVector::zeros(mg), DVector::zeros(mh)))
    }

    pub fn in_domain(&self, lambda: &Multipliers, tol: f64) -> bool {
        let budget_gap = (self.simplex_weights.dot(&lambda.f) - self.simplex_budget).abs();
        lambda.f.iter().all(|x| *x >= -tol)
            && lambda.g.iter().all(|x| *x >= -tol)
            && budget_gap <= tol * (1.0 + self.simplex_budget.abs())
    }

    /// `J A_ag^T l`; the direction is its negative.
    pub fn combined_gradient(&self, lambda: &Multipliers) -> DVector<f64> {
        &self.weighted_jacobian * lambda.stacked()
    }

    /// `d = -J A_ag^T l`.
    pub fn direction(&self, lambda: &Multipliers) -> DVector<f64> {
        -self.combined_gradient(lambda)
    }

    /// `[0; c_g g; c_h h]`.
    pub fn linear_term(&self) -> DVector<f64> {
        linear_term(self.dims.0, &self.g, &self.h, self.c_g, self.c_h)
    }

    pub fn phi_value(&self, lambda: &Multipliers) -> Result<f64> {
        self.check_shape(lambda)?;
        if !self.in_domain(lambda, DOMAIN_TOL) {
            return Err(Error::InvalidArgument("multipliers outside their domain".into()));
        }
        Ok(self.phi_unchecked(lambda))
    }

    fn phi_unchecked(&self, lambda: &Multipliers) -> f64 {
        0.5 * self.combined_gradient(lambda).norm_squared()
            - self.c_g * lambda.g.dot(&self.g)
            - self.c_h * lambda.h.dot(&self.h)
    }

    /// `A_ag J^T J A_ag^T l - [0; c_g g; c_h h]`. No domain check.
    pub fn phi_gradient(&self, lambda: &Multipliers) -> Result<DVector<f64>> {
        self.check_shape(lambda)?;
        let s = lambda.stacked();
        let inner = &self.weighted_jacobian * &s;
        Ok(self.weighted_jacobian.tr_mul(&inner) - self.linear_term())
    }

    /// Euclidean projection onto the multiplier domain. The three blocks are
    /// separable, so projecting each block is exact.
    pub fn project(&self, lambda: &Multipliers) -> Multipliers {
        let f = project_weighted_simplex(&lambda.f, &self.simplex_weights, self.simplex_budget)
            .expect("context weights are validated positive");
        Multipliers {
            f,
            g: lambda.g.map(|x| x.max(0.0)),
            h: lambda.h.clone(),
        }
    }

    /// Stationarity + complementary slackness + feasibility:
    /// `|J A_ag^T l|^2 + l_g^T [-g]_+ + |[g]_+|_1 + |h|_1`.
    pub fn kkt_residual_at(&self, lambda: &Multipliers) -> f64 {
        let stationarity = self.combined_gradient(lambda).norm_squared();
        let slackness: f64 = lambda.g.iter().zip(self.g.iter()).map(|(l, g)| l * (-g).max(0.0)).sum();
        stationarity + slackness + positive_part_l1(&self.g) + self.h.lp_norm(1)
    }
}

pub(crate) fn linear_term(m: usize, g: &DVector<f64>, h: &DVector<f64>, c_g: f64, c_h: f64) -> DVector<f64> {
    let mut out = DVector::zeros(m + g.len() + h.len());
    out.rows_mut(m, g.len()).copy_from(&(g * c_g));
    out.rows_mut(m + g.len(), h.len()).copy_from(&(h * c_h));
    out
}

/// `argmin_{l >= 0, w^T l = b} |l - p|^2` for positive weights `w` and budget
/// `b`. The solution is `l_i = max(0, p_i - mu w_i)`; `mu` is located by
/// scanning the sorted breakpoints `p_i / w_i`.
pub fn project_weighted_simplex(p: &DVector<f64>, w: &DVector<f64>, budget: f64) -> Result<DVector<f64>> {
    check_dim("simplex weights", p.len(), w.len())?;
    if p.is_empty() {
        return Err(Error::Dimension("cannot project onto an empty simplex".into()));
    }
    if w.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidArgument("simplex weights must be positive".into()));
    }
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(Error::InvalidArgument("simplex budget must be positive".into()));
    }
    if !all_finite(p) {
        return Err(Error::NonFinite("point to project".into()));
    }
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&i, &j| (p[j] / w[j]).total_cmp(&(p[i] / w[i])));

    let (mut wp, mut ww) = (0.0, 0.0);
    let mut mu = 0.0;
    for (k, &i) in order.iter().enumerate() {
        wp += w[i] * p[i];
        ww += w[i] * w[i];
        mu = (wp - budget) / ww;
        match order.get(k + 1) {
            Some(&next) if p[next] / w[next] > mu => continue,
            _ => break,
        }
    }
    Ok(DVector::from_iterator(
        p.len(),
        p.iter().zip(w.iter()).map(|(pi, wi)| (pi - mu * wi).max(0.0)),
    ))
}

/// Inner projected-gradient settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PgdOptions {
    pub step: f64,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for PgdOptions {
    fn default() -> Self {
        Self {
            step: 0.1,
            max_iters: 250,
            tol: 1e-5,
        }
    }
}

/// Solution of the subprogram at one iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemResult {
    pub multipliers: Multipliers,
    pub direction: DVector<f64>,
    /// Optimal value of the primal direction problem, `-phi`.
    pub psi: f64,
    pub phi: f64,
    pub kkt: f64,
    pub inner_iters: usize,
}

/// Projected gradient descent on `phi` from `start`.
///
/// Stops once the projected-gradient norm `|l - P(l - step grad)| / step`
/// falls to `tol`, or after `max_iters` iterations. A step that fails to
/// decrease `phi` is rejected and the step size halved.
pub fn solve_pgd(ctx: &SubproblemContext, start: &Multipliers, opts: &PgdOptions) -> Result<SubproblemResult> {
    if !(opts.step > 0.0 && opts.step.is_finite()) {
        return Err(Error::InvalidArgument(format!("inner step must be positive, got {}", opts.step)));
    }
    ctx.check_shape(start)?;
    let mut lambda = ctx.project(start);
    let mut phi = ctx.phi_unchecked(&lambda);
    let mut step = opts.step;
    let mut iters = 0;
    while iters < opts.max_iters {
        let grad = ctx.phi_gradient(&lambda)?;
        let trial = Multipliers::from_stacked(
            &(lambda.stacked() - &grad * step),
            ctx.dims.0,
            ctx.dims.1,
            ctx.dims.2,
        )?;
        if !all_finite(&trial.stacked()) {
            return Err(Error::NonFinite("multiplier iterate (step size too large?)".into()));
        }
        let candidate = ctx.project(&trial);
        let moved = (candidate.stacked() - lambda.stacked()).norm();
        if moved / step <= opts.tol {
            break;
        }
        iters += 1;
        let candidate_phi = ctx.phi_unchecked(&candidate);
        if !candidate_phi.is_finite() {
            return Err(Error::NonFinite("subprogram objective".into()));
        }
        if candidate_phi >= phi {
            step *= 0.5;
            continue;
        }
        lambda = candidate;
        phi = candidate_phi;
    }
    Ok(finish(ctx, lambda, phi, iters))
}

fn finish(ctx: &SubproblemContext, lambda: Multipliers, phi: f64, inner_iters: usize) -> SubproblemResult {
    let direction = ctx.direction(&lambda);
    let kkt = ctx.kkt_residual_at(&lambda);
    SubproblemResult {
        multipliers: lambda,
        direction,
        psi: -phi,
        phi,
        kkt,
        inner_iters,
    }
}

/// Solves the subprogram from the symmetric start with the given options.
pub fn solve(ctx: &SubproblemContext, opts: &PgdOptions) -> Result<SubproblemResult> {
    solve_pgd(ctx, &ctx.initial_multipliers(), opts)
}

/// KKT residual of a solution computed for `ctx`.
pub fn kkt_residual(ctx: &SubproblemContext, res: &SubproblemResult) -> f64 {
    ctx.kkt_residual_at(&res.multipliers)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    fn unconstrained(jac: DMatrix<f64>, f: DVector<f64>, domain: MultiplierDomain) -> SubproblemContext {
        let m = jac.ncols();
        SubproblemContext::new(jac, f, &Preference::pareto(m).unwrap(), domain).unwrap()
    }

    fn no_blocks(f: DVector<f64>) -> Multipliers {
        Multipliers::new(f, DVector::zeros(0), DVector::zeros(0))
    }

    #[test]
    fn phi_of_orthonormal_pair() {
        let ctx = unconstrained(DMatrix::identity(2, 2), v(&[1.0, 1.0]), MultiplierDomain::Simplified);
        let phi = ctx.phi_value(&no_blocks(v(&[0.5, 0.5]))).unwrap();
        assert!((phi - 0.25).abs() < 1e-15);
    }

    #[test]
    fn phi_single_objective_reduction() {
        let jac = DMatrix::from_column_slice(3, 2, &[1.0, 2.0, -1.0, 0.5, 0.0, 3.0]);
        let ctx = unconstrained(jac.clone(), v(&[1.0, 1.0]), MultiplierDomain::Simplified);
        let phi = ctx.phi_value(&no_blocks(v(&[1.0, 0.0]))).unwrap();
        assert!((phi - 0.5 * jac.column(0).norm_squared()).abs() < 1e-14);
    }

    #[test]
    fn phi_linear_term_only() {
        // f chosen so that h = f_1 - f_2 = 0.5
        let pref = Preference::pareto(2)
            .unwrap()
            .with_equalities(DMatrix::from_row_slice(1, 2, &[1.0, -1.0]), v(&[0.0]))
            .unwrap();
        let ctx = SubproblemContext::new(DMatrix::zeros(2, 2), v(&[0.75, 0.25]), &pref, MultiplierDomain::Simplified)
            .unwrap();
        let lam = Multipliers::new(v(&[0.5, 0.5]), v(&[]), v(&[2.0]));
        assert!((ctx.phi_value(&lam).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn phi_rejects_out_of_domain() {
        let ctx = unconstrained(DMatrix::identity(2, 2), v(&[1.0, 1.0]), MultiplierDomain::Simplified);
        assert!(ctx.phi_value(&no_blocks(v(&[0.7, 0.7]))).is_err());
        assert!(ctx.phi_value(&no_blocks(v(&[1.0]))).is_err());
    }

    #[test]
    fn phi_gradient_at_zero_is_linear_term() {
        let pref = Preference::pareto(2)
            .unwrap()
            .with_inequalities(DMatrix::from_row_slice(1, 2, &[0.0, 1.0]), v(&[-0.5]))
            .unwrap()
            .with_equalities(DMatrix::from_row_slice(1, 2, &[1.0, -1.0]), v(&[0.0]))
            .unwrap()
            .with_weights(2.0, 3.0)
            .unwrap();
        let jac = DMatrix::from_column_slice(2, 2, &[1.0, 0.3, -0.2, 0.8]);
        let ctx = SubproblemContext::new(jac, v(&[0.1, 0.7]), &pref, MultiplierDomain::Simplified).unwrap();
        let zero = Multipliers::new(v(&[0.0, 0.0]), v(&[0.0]), v(&[0.0]));
        let grad = ctx.phi_gradient(&zero).unwrap();
        let expect = v(&[0.0, 0.0, -2.0 * 0.2, -3.0 * (0.1 - 0.7)]);
        assert!((grad - expect).norm() < 1e-15);
    }

    #[test]
    fn phi_gradient_identity_gram() {
        let ctx = unconstrained(DMatrix::identity(3, 3), v(&[1.0, 1.0, 1.0]), MultiplierDomain::Simplified);
        let lam = no_blocks(v(&[0.2, 0.3, 0.5]));
        assert!((ctx.phi_gradient(&lam).unwrap() - &lam.f).norm() < 1e-15);
    }

    #[test]
    fn weighted_simplex_examples() {
        let p = project_weighted_simplex(&v(&[3.0, 0.0]), &v(&[1.0, 2.0]), 3.0).unwrap();
        assert!((p - v(&[3.0, 0.0])).norm() < 1e-12);
        let p = project_weighted_simplex(&v(&[0.0, 0.0]), &v(&[1.0, 2.0]), 3.0).unwrap();
        assert!((p - v(&[0.6, 1.2])).norm() < 1e-12);
        let p = project_weighted_simplex(&v(&[5.0, 5.0]), &v(&[1.0, 1.0]), 1.0).unwrap();
        assert!((p - v(&[0.5, 0.5])).norm() < 1e-12);
    }

    #[test]
    fn weighted_simplex_rejects_bad_input() {
        assert!(project_weighted_simplex(&v(&[1.0, 1.0]), &v(&[1.0, 0.0]), 1.0).is_err());
        assert!(project_weighted_simplex(&v(&[1.0, 1.0]), &v(&[1.0, 1.0]), 0.0).is_err());
        assert!(project_weighted_simplex(&v(&[1.0]), &v(&[1.0, 1.0]), 1.0).is_err());
    }

    #[test]
    fn projection_examples() {
        let ctx = unconstrained(DMatrix::identity(2, 2), v(&[1.0, 1.0]), MultiplierDomain::Simplified);
        let feasible = no_blocks(v(&[0.3, 0.7]));
        assert!((ctx.project(&feasible).f - &feasible.f).norm() < 1e-15);
        assert!((ctx.project(&no_blocks(v(&[2.0, 0.0]))).f - v(&[1.0, 0.0])).norm() < 1e-15);

        let pref = Preference::pareto(2)
            .unwrap()
            .with_inequalities(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]), v(&[-1.0, -1.0]))
            .unwrap();
        let ctx = SubproblemContext::new(DMatrix::identity(2, 2), v(&[0.5, 0.5]), &pref, MultiplierDomain::Simplified)
            .unwrap();
        let lam = Multipliers::new(v(&[0.5, 0.5]), v(&[-1.0, 2.0]), v(&[]));
        assert_eq!(ctx.project(&lam).g, v(&[0.0, 2.0]));
    }

    #[test]
    fn adaptive_domain_requires_positive_af() {
        let pref = Preference::pareto(2).unwrap();
        let err = SubproblemContext::new(DMatrix::identity(2, 2), v(&[0.0, 1.0]), &pref, MultiplierDomain::Adaptive);
        assert!(matches!(err, Err(Error::DomainViolation(_))));
        let ok = SubproblemContext::new(DMatrix::identity(2, 2), v(&[0.5, 1.0]), &pref, MultiplierDomain::Adaptive)
            .unwrap();
        let start = ok.initial_multipliers();
        assert!(ok.in_domain(&start, 1e-12));
    }

    #[test]
    fn pgd_orthonormal_pair() {
        let ctx = unconstrained(DMatrix::identity(2, 2), v(&[1.0, 1.0]), MultiplierDomain::Simplified);
        let res = solve(&ctx, &PgdOptions::default()).unwrap();
        assert!((res.direction.clone() - v(&[-0.5, -0.5])).norm() < 1e-6);
        assert!((res.psi + 0.25).abs() < 1e-6);
        assert!((2.0 * res.psi + res.direction.norm_squared()).abs() < 1e-6);
    }

    #[test]
    fn pgd_identical_gradients() {
        let g = v(&[0.3, -1.0, 2.0]);
        let jac = DMatrix::from_columns(&[g.clone(), g.clone()]);
        let ctx = unconstrained(jac.clone(), v(&[1.0, 2.0]), MultiplierDomain::Simplified);
        let res = solve(&ctx, &PgdOptions::default()).unwrap();
        assert!((res.direction + &g).norm() < 1e-12);

        // adaptive: l^T (1, 2) = 3 puts all weight on the larger value, d = -1.5 g
        let ctx = unconstrained(jac, v(&[1.0, 2.0]), MultiplierDomain::Adaptive);
        let res = solve_pgd(&ctx, &ctx.initial_multipliers(), &PgdOptions { max_iters: 5000, tol: 1e-12, ..Default::default() })
            .unwrap();
        assert!((res.direction + g * 1.5).norm() < 1e-9);
    }

    #[test]
    fn pgd_rejects_bad_step() {
        let ctx = unconstrained(DMatrix::identity(2, 2), v(&[1.0, 1.0]), MultiplierDomain::Simplified);
        let opts = PgdOptions { step: 0.0, ..PgdOptions::default() };
        assert!(solve(&ctx, &opts).is_err());
    }

    #[test]
    fn pgd_halves_oversized_steps() {
        let jac = DMatrix::identity(2, 2) * 30.0;
        let ctx = unconstrained(jac, v(&[1.0, 1.0]), MultiplierDomain::Simplified);
        let start = no_blocks(v(&[1.0, 0.0]));
        let res = solve_pgd(&ctx, &start, &PgdOptions { step: 1.0, max_iters: 500, tol: 1e-9 }).unwrap();
        assert!((res.multipliers.f - v(&[0.5, 0.5])).norm() < 1e-6);
    }

    #[test]
    fn kkt_examples() {
        let jac = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, -1.0, 0.0]);
        let ctx = unconstrained(jac, v(&[1.0, 1.0]), MultiplierDomain::Simplified);
        let res = solve(&ctx, &PgdOptions::default()).unwrap();
        assert!(kkt_residual(&ctx, &res) < 1e-10);

        let eq = Preference::pareto(2)
            .unwrap()
            .with_equalities(DMatrix::from_row_slice(1, 2, &[1.0, 0.0]), v(&[-0.3]))
            .unwrap();
        let ctx = SubproblemContext::new(DMatrix::zeros(2, 2), v(&[0.5, 0.5]), &eq, MultiplierDomain::Simplified)
            .unwrap();
        let lam = Multipliers::new(v(&[0.5, 0.5]), v(&[]), v(&[0.0]));
        assert!((ctx.kkt_residual_at(&lam) - 0.2).abs() < 1e-12);

        let ineq = Preference::pareto(2)
            .unwrap()
            .with_inequalities(DMatrix::from_row_slice(1, 2, &[1.0, 0.0]), v(&[-0.8]))
            .unwrap();
        let ctx = SubproblemContext::new(DMatrix::zeros(2, 2), v(&[0.5, 0.5]), &ineq, MultiplierDomain::Simplified)
            .unwrap();
        let lam = Multipliers::new(v(&[0.5, 0.5]), v(&[0.5]), v(&[]));
        assert!((ctx.kkt_residual_at(&lam) - 0.15).abs() < 1e-12);
    }
}
