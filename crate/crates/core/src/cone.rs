//! Polyhedral ordering cones `C_A = {y : A y >= 0}`.
//!
//! Cones are usually specified by their extreme rays `Y` (columns) and
//! converted to the half-space form `A` by facet enumeration: every
//! `(M-1)`-subset of rays with rank `M-1` spans a candidate hyperplane whose
//! unit normal is oriented towards the interior point `Y 1` and kept when all
//! rays lie on its non-negative side. Exact for the small `M` this crate
//! targets (`M <= 4`).

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::linalg;

/// Slack tolerated on facets when testing membership.
pub const MEMBERSHIP_TOL: f64 = 1e-12;
/// Slack tolerated when checking that rays lie on the inner side of a facet.
pub const FACET_TOL: f64 = 1e-10;
const SAME_DIRECTION_TOL: f64 = 1e-12;

/// A pointed polyhedral cone with non-empty interior.
#[derive(Debug, Clone, PartialEq)]
pub struct Cone {
    a: DMatrix<f64>,
    rays: Option<DMatrix<f64>>,
}

impl Cone {
    pub fn from_halfspaces(a: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() || !linalg::is_full_rank(&a) {
            return Err(Error::Cone("half-space matrix must be square and full rank".into()));
        }
        Ok(Self { a, rays: None })
    }

    /// Builds the cone generated by the columns of `rays`.
    pub fn from_rays(rays: &DMatrix<f64>) -> Result<Self> {
        let y = normalize_columns(rays)?;
        let a = rays_to_halfspaces(&y)?;
        Ok(Self { a, rays: Some(y) })
    }

    /// Non-negative orthant (Pareto ordering).
    pub fn orthant(m: usize) -> Self {
        Self {
            a: DMatrix::identity(m, m),
            rays: Some(DMatrix::identity(m, m)),
        }
    }

    pub fn halfspaces(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn rays(&self) -> Option<&DMatrix<f64>> {
        self.rays.as_ref()
    }

    pub fn into_halfspaces(self) -> DMatrix<f64> {
        self.a
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn contains(&self, y: &DVector<f64>) -> Result<bool> {
        contains(&self.a, y)
    }

    pub fn dominates(&self, v: &DVector<f64>, w: &DVector<f64>) -> Result<bool> {
        dominates(&self.a, v, w)
    }
}

/// Strict `C_A`-dominance: `v` dominates `w` iff `A (v - w) < 0` componentwise.
pub fn dominates(a: &DMatrix<f64>, v: &DVector<f64>, w: &DVector<f64>) -> Result<bool> {
    check_dim("dominates v", a.ncols(), v.len())?;
    check_dim("dominates w", a.ncols(), w.len())?;
    Ok((a * (v - w)).iter().all(|x| *x < 0.0))
}

/// Optimality-sense dominance: `A (v - w) <= 0` with at least one strict
/// component, i.e. `A v` is no worse than `A w` anywhere and better somewhere.
pub fn improves(a: &DMatrix<f64>, v: &DVector<f64>, w: &DVector<f64>) -> Result<bool> {
    check_dim("improves v", a.ncols(), v.len())?;
    check_dim("improves w", a.ncols(), w.len())?;
    let diff = a * (v - w);
    Ok(diff.iter().all(|x| *x <= 0.0) && diff.iter().any(|x| *x < 0.0))
}

/// `A y >= -1e-12` componentwise.
pub fn contains(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<bool> {
    check_dim("contains y", a.ncols(), y.len())?;
    Ok((a * y).iter().all(|x| *x >= -MEMBERSHIP_TOL))
}

fn normalize_columns(rays: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut y = rays.clone();
    for mut col in y.column_iter_mut() {
        let n = col.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Cone("rays must be non-zero and finite".into()));
        }
        col /= n;
    }
    Ok(y)
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Facet normals of the cone generated by the (unit) columns of `rays`, which
/// may hold more than `M` generators. Normals are unit-norm and oriented to
/// the interior point `rays * 1`.
fn facet_normals(rays: &DMatrix<f64>) -> Result<Vec<DVector<f64>>> {
    let m = rays.nrows();
    let n = rays.ncols();
    if m == 0 {
        return Err(Error::Cone("empty ray matrix".into()));
    }
    if m == 1 {
        // a pointed cone in R^1 is a half-line
        let s = rays.row(0);
        if s.iter().all(|x| *x > 0.0) || s.iter().all(|x| *x < 0.0) {
            return Ok(vec![DVector::from_element(1, s[0].signum())]);
        }
        return Err(Error::Cone("cone is not pointed".into()));
    }
    if linalg::rank(rays) < m {
        return Err(Error::Cone("rays do not span a full-dimensional cone".into()));
    }
    let interior: DVector<f64> = rays.column_sum();
    let mut normals: Vec<DVector<f64>> = Vec::new();
    for subset in subsets(n, m - 1) {
        let mut span = DMatrix::zeros(m - 1, m);
        for (r, &c) in subset.iter().enumerate() {
            span.set_row(r, &rays.column(c).transpose());
        }
        let Some(mut a) = linalg::null_vector(&span) else {
            continue;
        };
        let side = a.dot(&interior);
        if side.abs() <= FACET_TOL {
            // a hyperplane through the interior point is not a facet
            continue;
        }
        if side < 0.0 {
            a = -a;
        }
        let proj = rays.transpose() * &a;
        if proj.iter().all(|x| *x >= -FACET_TOL)
            && !normals.iter().any(|b| (b - &a).norm() <= 1e-9)
        {
            normals.push(a);
        }
    }
    if normals.len() < m {
        return Err(Error::Cone(format!(
            "cone is not pointed or not full-dimensional ({} facets found for M = {m})",
            normals.len()
        )));
    }
    Ok(normals)
}

/// Converts an `M x M` extreme-ray matrix (unit columns) to the half-space
/// matrix `A` with unit rows, so that `C_A = {Y l : l >= 0}`.
pub fn rays_to_halfspaces(rays: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let m = rays.nrows();
    if rays.ncols() != m {
        return Err(Error::Dimension(format!(
            "ray matrix must be square, got {}x{}",
            m,
            rays.ncols()
        )));
    }
    if !linalg::is_full_rank(rays) {
        return Err(Error::Cone("ray matrix is rank deficient".into()));
    }
    let y = normalize_columns(rays)?;
    let normals = facet_normals(&y)?;
    if normals.len() != m {
        return Err(Error::Cone(format!("expected {m} facets, found {}", normals.len())));
    }
    let mut a = DMatrix::zeros(m, m);
    for (r, n) in normals.iter().enumerate() {
        a.set_row(r, &n.transpose());
    }
    Ok(a)
}

/// Extends `base_rays` with the controlled-ascent direction
/// `(F0 - F_go) / |F0 - F_go|`, keeps the extreme rays of the conic hull and
/// returns the resulting cone. The result contains `F0 - F_go`, so moving from
/// `F0` to `F_go` is an improvement in the new ordering.
pub fn controlled_ascent_cone(
    f0: &DVector<f64>,
    f_go: &DVector<f64>,
    base_rays: &DMatrix<f64>,
) -> Result<Cone> {
    let m = base_rays.nrows();
    check_dim("F0", m, f0.len())?;
    check_dim("F_go", m, f_go.len())?;
    let diff = f0 - f_go;
    let norm = diff.norm();
    if !(norm > 0.0) {
        return Err(Error::InvalidArgument("F0 and F_go must differ".into()));
    }
    let base = normalize_columns(base_rays)?;

    let mut generators: Vec<DVector<f64>> = Vec::new();
    for candidate in base.column_iter().map(|c| c.into_owned()).chain(std::iter::once(diff / norm)) {
        if !generators.iter().any(|g| g.dot(&candidate) >= 1.0 - SAME_DIRECTION_TOL) {
            generators.push(candidate);
        }
    }
    let all = DMatrix::from_columns(&generators);
    let normals = facet_normals(&all)?;
    if normals.len() != m {
        return Err(Error::Unsupported(format!(
            "controlled-ascent hull has {} facets; only simplicial cones (M facets) are supported",
            normals.len()
        )));
    }
    // extreme rays lie on M-1 linearly independent facets
    let mut extreme: Vec<DVector<f64>> = Vec::new();
    for g in &generators {
        let active: Vec<&DVector<f64>> = normals.iter().filter(|a| a.dot(g).abs() <= FACET_TOL).collect();
        let independent = if active.is_empty() {
            0
        } else {
            linalg::rank(&DMatrix::from_columns(&active.iter().map(|a| (*a).clone()).collect::<Vec<_>>()))
        };
        if independent + 1 >= m {
            extreme.push(g.clone());
        }
    }
    if extreme.len() != m {
        return Err(Error::Cone(format!(
            "controlled-ascent hull has {} extreme rays, expected {m}",
            extreme.len()
        )));
    }
    let rays = DMatrix::from_columns(&extreme);
    let a = rays_to_halfspaces(&rays)?;
    Ok(Cone { a, rays: Some(rays) })
}

fn orient_rows(mut b: DMatrix<f64>) -> DMatrix<f64> {
    for mut row in b.row_iter_mut() {
        if let Some(first) = row.iter().find(|x| x.abs() > 1e-12).copied() {
            if first < 0.0 {
                row.neg_mut();
            }
        }
    }
    b
}

/// Equality constraint `B_h f = 0` confining objectives to the ray through `v`.
/// Rows of `B_h` are an orthonormal basis of `span{v}`'s complement, each
/// signed so its first non-zero entry is positive.
pub fn ray_to_equality(v: &DVector<f64>) -> Result<(DMatrix<f64>, DVector<f64>)> {
    if v.len() < 2 {
        return Err(Error::Dimension("ray needs at least two objectives".into()));
    }
    if !(v.norm() > 0.0) || !linalg::all_finite(v) {
        return Err(Error::InvalidArgument("ray must be a non-zero finite vector".into()));
    }
    let b = orient_rows(linalg::orthogonal_complement_rows(v));
    let rows = b.nrows();
    Ok((b, DVector::zeros(rows)))
}

/// Equality constraint through two objective points: `B_h (F1 - F2) = 0` and
/// `b_h = -B_h F1`.
pub fn two_points_to_equality(
    f1: &DVector<f64>,
    f2: &DVector<f64>,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    check_dim("two-point F2", f1.len(), f2.len())?;
    let diff = f1 - f2;
    if !(diff.norm() > 0.0) {
        return Err(Error::InvalidArgument("reference points must differ".into()));
    }
    let (b, _) = ray_to_equality(&diff)?;
    let offset = -(&b * f1);
    Ok((b, offset))
}
