//! Relative (ordering cone) and absolute (linear objective-space constraint)
//! preferences.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::linalg;

/// Preference data: the cone matrix `A` (`C_A = {y : Ay >= 0}`), inequality
/// constraints `B_g f + b_g <= 0`, equality constraints `B_h f + b_h = 0`, and
/// the positive constraint weights `c_g`, `c_h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Preference {
    cone: DMatrix<f64>,
    b_g: DMatrix<f64>,
    b_g_offset: DVector<f64>,
    b_h: DMatrix<f64>,
    b_h_offset: DVector<f64>,
    c_g: f64,
    c_h: f64,
}

impl Preference {
    /// Preference with cone matrix `a` and no constraints. `a` must be square
    /// and full rank.
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "cone matrix must be square and non-empty, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("cone matrix".into()));
        }
        if !linalg::is_full_rank(&a) {
            return Err(Error::Cone("cone matrix A must be full rank".into()));
        }
        let m = a.nrows();
        Ok(Self {
            cone: a,
            b_g: DMatrix::zeros(0, m),
            b_g_offset: DVector::zeros(0),
            b_h: DMatrix::zeros(0, m),
            b_h_offset: DVector::zeros(0),
            c_g: 1.0,
            c_h: 1.0,
        })
    }

    /// Pareto ordering (`A = I`) without constraints.
    pub fn pareto(m: usize) -> Result<Self> {
        Self::new(DMatrix::identity(m, m))
    }

    pub fn with_inequalities(mut self, b_g: DMatrix<f64>, offset: DVector<f64>) -> Result<Self> {
        check_dim("B_g columns", self.num_objectives(), b_g.ncols())?;
        check_dim("b_g length", b_g.nrows(), offset.len())?;
        if b_g.iter().chain(offset.iter()).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("inequality constraint data".into()));
        }
        self.b_g = b_g;
        self.b_g_offset = offset;
        Ok(self)
    }

    /// Equality constraints; `b_h` must have full row rank.
    pub fn with_equalities(mut self, b_h: DMatrix<f64>, offset: DVector<f64>) -> Result<Self> {
        check_dim("B_h columns", self.num_objectives(), b_h.ncols())?;
        check_dim("b_h length", b_h.nrows(), offset.len())?;
        if b_h.iter().chain(offset.iter()).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("equality constraint data".into()));
        }
        if b_h.nrows() > 0 && !linalg::has_full_row_rank(&b_h) {
            return Err(Error::InvalidArgument("B_h must have full row rank".into()));
        }
        self.b_h = b_h;
        self.b_h_offset = offset;
        Ok(self)
    }

    pub fn with_weights(mut self, c_g: f64, c_h: f64) -> Result<Self> {
        if !(c_g > 0.0 && c_g.is_finite() && c_h > 0.0 && c_h.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "c_g and c_h must be positive and finite, got {c_g}, {c_h}"
            )));
        }
        self.c_g = c_g;
        self.c_h = c_h;
        Ok(self)
    }

    /// Replaces the cone matrix, keeping the constraints.
    pub fn with_cone(self, a: DMatrix<f64>) -> Result<Self> {
        let fresh = Self::new(a)?;
        check_dim("cone size", self.num_objectives(), fresh.num_objectives())?;
        Ok(Self { cone: fresh.cone, ..self })
    }

    pub fn cone(&self) -> &DMatrix<f64> {
        &self.cone
    }

    pub fn b_g(&self) -> &DMatrix<f64> {
        &self.b_g
    }

    pub fn b_g_offset(&self) -> &DVector<f64> {
        &self.b_g_offset
    }

    pub fn b_h(&self) -> &DMatrix<f64> {
        &self.b_h
    }

    pub fn b_h_offset(&self) -> &DVector<f64> {
        &self.b_h_offset
    }

    pub fn c_g(&self) -> f64 {
        self.c_g
    }

    pub fn c_h(&self) -> f64 {
        self.c_h
    }

    pub fn num_objectives(&self) -> usize {
        self.cone.nrows()
    }

    pub fn num_inequalities(&self) -> usize {
        self.b_g.nrows()
    }

    pub fn num_equalities(&self) -> usize {
        self.b_h.nrows()
    }

    /// `[A; B_g; B_h]`, of size `(M + M_g + M_h) x M`.
    pub fn stacked(&self) -> DMatrix<f64> {
        let m = self.num_objectives();
        let (mg, mh) = (self.num_inequalities(), self.num_equalities());
        let mut out = DMatrix::zeros(m + mg + mh, m);
        out.rows_mut(0, m).copy_from(&self.cone);
        out.rows_mut(m, mg).copy_from(&self.b_g);
        out.rows_mut(m + mg, mh).copy_from(&self.b_h);
        out
    }

    /// Constraint values `(g, h) = (B_g f + b_g, B_h f + b_h)`.
    pub fn eval_constraints(&self, f: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
        check_dim("objective point", self.num_objectives(), f.len())?;
        let g = &self.b_g * f + &self.b_g_offset;
        let h = &self.b_h * f + &self.b_h_offset;
        Ok((g, h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(1, v.len(), v)
    }

    #[test]
    fn equality_on_symmetric_ray() {
        let p = Preference::pareto(2)
            .unwrap()
            .with_equalities(row(&[1.0, -1.0]), DVector::zeros(1))
            .unwrap();
        let (g, h) = p.eval_constraints(&DVector::from_vec(vec![0.3, 0.3])).unwrap();
        assert_eq!(g.len(), 0);
        assert_eq!(h[0], 0.0);

        let (_, h) = p.eval_constraints(&DVector::from_vec(vec![0.6321, 0.9817])).unwrap();
        assert!((h[0] + 0.3496).abs() < 1e-12);
    }

    #[test]
    fn epsilon_constraint_arithmetic() {
        let p = Preference::pareto(2)
            .unwrap()
            .with_inequalities(row(&[0.0, 1.0]), DVector::from_vec(vec![-0.5]))
            .unwrap();
        let (g, _) = p.eval_constraints(&DVector::from_vec(vec![0.1, 0.7])).unwrap();
        assert!((g[0] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn validation_errors() {
        assert!(Preference::new(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0])).is_err());
        assert!(Preference::new(DMatrix::zeros(2, 3)).is_err());
        let p = Preference::pareto(2).unwrap();
        assert!(p.clone().with_weights(0.0, 1.0).is_err());
        assert!(p.clone().with_weights(1.0, -1.0).is_err());
        assert!(p
            .clone()
            .with_equalities(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]), DVector::zeros(2))
            .is_err());
        assert!(p.clone().with_equalities(row(&[1.0, 0.0, 0.0]), DVector::zeros(1)).is_err());
        assert!(p.eval_constraints(&DVector::zeros(3)).is_err());
    }

    #[test]
    fn stacked_layout() {
        let p = Preference::pareto(2)
            .unwrap()
            .with_inequalities(row(&[0.0, 1.0]), DVector::from_vec(vec![-0.5]))
            .unwrap()
            .with_equalities(row(&[1.0, -1.0]), DVector::zeros(1))
            .unwrap();
        let s = p.stacked();
        assert_eq!(s.shape(), (4, 2));
        assert_eq!(s.row(2)[1], 1.0);
        assert_eq!(s.row(3)[1], -1.0);
    }
}
