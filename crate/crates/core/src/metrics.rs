//! Evaluation metrics for sets of objective vectors.

use nalgebra::{DMatrix, DVector};

use crate::cone::improves;
use crate::error::{check_dim, Error, Result};

/// Grid size used by [`pf_distance_synthetic`].
pub const SYNTHETIC_FRONT_GRID: usize = 10_000;

/// Exact hypervolume of the region dominated by `points` and bounded by
/// `reference`. Points that do not strictly dominate the reference are
/// ignored. Supports `2 <= M <= 4`.
pub fn hypervolume(points: &[DVector<f64>], reference: &DVector<f64>) -> Result<f64> {
    let m = reference.len();
    if m < 2 {
        return Err(Error::Dimension("hypervolume needs at least two objectives".into()));
    }
    if m > 4 {
        return Err(Error::Unsupported(format!("hypervolume for M = {m} > 4")));
    }
    if reference.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("hypervolume reference point".into()));
    }
    let mut inside: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for p in points {
        check_dim("hypervolume point", m, p.len())?;
        if p.iter().zip(reference.iter()).all(|(a, r)| a < r) {
            inside.push(p.iter().copied().collect());
        }
    }
    let reference: Vec<f64> = reference.iter().copied().collect();
    Ok(slice_volume(&mut inside, &reference))
}

fn sweep_2d(points: &mut [Vec<f64>], reference: &[f64]) -> f64 {
    points.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut ceiling = reference[1];
    for p in points.iter() {
        if p[1] < ceiling {
            area += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    area
}

/// Slices along the last coordinate and recurses on the cross sections.
fn slice_volume(points: &mut [Vec<f64>], reference: &[f64]) -> f64 {
    let m = reference.len();
    if points.is_empty() {
        return 0.0;
    }
    if m == 2 {
        return sweep_2d(points, reference);
    }
    let last = m - 1;
    points.sort_by(|a, b| a[last].total_cmp(&b[last]));
    let mut volume = 0.0;
    for i in 0..points.len() {
        let top = points.get(i + 1).map_or(reference[last], |p| p[last]);
        let height = top - points[i][last];
        if height <= 0.0 {
            continue;
        }
        let mut section: Vec<Vec<f64>> = points[..=i].iter().map(|p| p[..last].to_vec()).collect();
        volume += height * slice_volume(&mut section, &reference[..last]);
    }
    volume
}

/// Componentwise `r_m * f_m`.
pub fn relative_loss_profile(preference: &DVector<f64>, f: &DVector<f64>) -> Result<DVector<f64>> {
    check_dim("relative loss profile", preference.len(), f.len())?;
    Ok(preference.component_mul(f))
}

/// Points of the set that are `C_A`-optimal within it: no other point `q`
/// has `A q <= A p` with a strict component. Input order is preserved.
pub fn nondominated_filter(points: &[DVector<f64>], a: &DMatrix<f64>) -> Result<Vec<DVector<f64>>> {
    let mut keep = Vec::new();
    'outer: for (i, p) in points.iter().enumerate() {
        for (j, other) in points.iter().enumerate() {
            if i != j && improves(a, other, p)? {
                continue 'outer;
            }
        }
        keep.push(p.clone());
    }
    Ok(keep)
}

/// Point of the analytic Pareto front of the two-well benchmark at parameter
/// `s in [-1, 1]` (the minimizers lie on the segment `s u`).
pub fn synthetic_front_point(s: f64) -> DVector<f64> {
    DVector::from_vec(vec![1.0 - (-(s - 1.0).powi(2)).exp(), 1.0 - (-(s + 1.0).powi(2)).exp()])
}

/// Euclidean distance from `f` to the two-well benchmark's front, measured
/// on a uniform grid of [`SYNTHETIC_FRONT_GRID`] parameters.
pub fn pf_distance_synthetic(f: &DVector<f64>) -> Result<f64> {
    check_dim("synthetic front point", 2, f.len())?;
    let n = SYNTHETIC_FRONT_GRID;
    Ok((0..n)
        .map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64)
        .map(|s| (synthetic_front_point(s) - f).norm())
        .fold(f64::INFINITY, f64::min))
}
