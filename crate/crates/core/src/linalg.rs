//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

pub(crate) const RANK_TOL: f64 = 1e-10;

/// Numerical rank from singular values relative to the largest one.
pub fn rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > RANK_TOL * max).count()
}

pub fn is_full_rank(m: &DMatrix<f64>) -> bool {
    m.nrows() == m.ncols() && rank(m) == m.nrows()
}

pub fn has_full_row_rank(m: &DMatrix<f64>) -> bool {
    rank(m) == m.nrows()
}

/// Orthonormal basis (as matrix rows) of the orthogonal complement of
/// `span{v}`. Returns `(n-1) x n`.
pub fn orthogonal_complement_rows(v: &DVector<f64>) -> DMatrix<f64> {
    let n = v.len();
    let unit = v / v.norm();
    // Gram-Schmidt on the coordinate axes, skipping the one most aligned with v.
    let skip = unit.iamax();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(n - 1);
    for i in (0..n).filter(|i| *i != skip) {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        let mut w = &e - &unit * unit.dot(&e);
        for b in &basis {
            w -= b * b.dot(&w);
        }
        // second pass keeps the basis orthonormal to round-off
        w -= &unit * unit.dot(&w);
        for b in &basis {
            w -= b * b.dot(&w);
        }
        basis.push(w.normalize());
    }
    let mut out = DMatrix::zeros(n - 1, n);
    for (r, b) in basis.iter().enumerate() {
        out.set_row(r, &b.transpose());
    }
    out
}

/// Unit vector spanning the null space of the `(n-1) x n` matrix whose rows are
/// `rows`, or `None` when the rows are rank deficient.
pub fn null_vector(rows: &DMatrix<f64>) -> Option<DVector<f64>> {
    let n = rows.ncols();
    if rows.nrows() + 1 != n {
        return None;
    }
    if rank(rows) != n - 1 {
        return None;
    }
    // Pad with a zero row so the SVD yields a full n x n V^T.
    let mut square = DMatrix::zeros(n, n);
    square.rows_mut(0, n - 1).copy_from(rows);
    let svd = square.svd(false, true);
    let v_t = svd.v_t?;
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    let v = v_t.row(idx).transpose();
    Some(v.normalize())
}

pub fn positive_part_l1(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |acc, x| acc + x.max(0.0))
}

pub fn all_finite(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthonormal() {
        let v = DVector::from_vec(vec![0.3, -1.2, 2.0, 0.7]);
        let b = orthogonal_complement_rows(&v);
        assert!((&b * &v).norm() < 1e-12);
        assert!((&b * b.transpose() - DMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn null_vector_of_plane() {
        let rows = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let v = null_vector(&rows).unwrap();
        assert!((v[2].abs() - 1.0).abs() < 1e-12);
        let deficient = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        assert!(null_vector(&deficient).is_none());
    }

    #[test]
    fn rank_detects_deficiency() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(rank(&m), 1);
        assert!(!is_full_rank(&m));
        assert!(is_full_rank(&DMatrix::identity(3, 3)));
    }
}
