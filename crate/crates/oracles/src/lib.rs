//! Brute-force reference computations, written without the library's linear
//! algebra so they can check it: Cramer-rule conic coordinates, Monte Carlo
//! hypervolume, and dense-grid solutions of the two-objective dual problem.

use rand::Rng;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn det2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn det3(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - b[0] * (a[1] * c[2] - a[2] * c[1]) + c[0] * (a[1] * b[2] - a[2] * b[1])
}

/// Coordinates `l` with `y = sum_i l_i rays[i]` for 2 or 3 linearly
/// independent rays in as many dimensions, by Cramer's rule. `None` when the
/// rays are (numerically) dependent or the dimension is unsupported.
pub fn conic_coordinates(rays: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    match rays.len() {
        2 => {
            let (r0, r1) = ([rays[0][0], rays[0][1]], [rays[1][0], rays[1][1]]);
            let d = det2(r0, r1);
            if d.abs() < 1e-14 {
                return None;
            }
            let yy = [y[0], y[1]];
            Some(vec![det2(yy, r1) / d, det2(r0, yy) / d])
        }
        3 => {
            let d = det3(&rays[0], &rays[1], &rays[2]);
            if d.abs() < 1e-14 {
                return None;
            }
            Some(vec![
                det3(y, &rays[1], &rays[2]) / d,
                det3(&rays[0], y, &rays[2]) / d,
                det3(&rays[0], &rays[1], y) / d,
            ])
        }
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Hypervolume dominated by `points` below `reference`, estimated from
/// `samples` uniform draws in the bounding box.
pub fn hypervolume_monte_carlo<R: Rng>(
    points: &[Vec<f64>],
    reference: &[f64],
    samples: usize,
    rng: &mut R,
) -> McEstimate {
    let m = reference.len();
    let lower: Vec<f64> = (0..m)
        .map(|k| points.iter().map(|p| p[k]).fold(reference[k], f64::min))
        .collect();
    let volume: f64 = (0..m).map(|k| reference[k] - lower[k]).product();
    if volume <= 0.0 || samples == 0 {
        return McEstimate { value: 0.0, std_error: 0.0 };
    }
    let mut x = vec![0.0; m];
    let mut hits = 0usize;
    for _ in 0..samples {
        for k in 0..m {
            x[k] = rng.random_range(lower[k]..reference[k]);
        }
        if points.iter().any(|p| p.iter().zip(&x).all(|(pi, xi)| pi <= xi)) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    McEstimate {
        value: volume * p,
        std_error: volume * (p * (1.0 - p) / samples as f64).sqrt(),
    }
}

/// Two-objective dual problem
/// `phi(l) = 1/2 |J (A^T l_f + b^T l_h)|^2 - c_h l_h h` over
/// `{l_f >= 0 : w . l_f = budget}` and `l_h` free (single equality row `b`).
#[derive(Debug, Clone)]
pub struct TwoObjectiveDual {
    /// Jacobian columns, one per objective.
    pub columns: [Vec<f64>; 2],
    /// Cone rows.
    pub cone: [[f64; 2]; 2],
    pub weights: [f64; 2],
    pub budget: f64,
    /// `(b, h, c_h)` for the optional equality row.
    pub equality: Option<([f64; 2], f64, f64)>,
}

impl TwoObjectiveDual {
    fn combine(&self, coef: [f64; 2]) -> Vec<f64> {
        self.columns[0]
            .iter()
            .zip(&self.columns[1])
            .map(|(a, b)| coef[0] * a + coef[1] * b)
            .collect()
    }

    fn multipliers_at(&self, t: f64) -> [f64; 2] {
        [self.budget * t / self.weights[0], self.budget * (1.0 - t) / self.weights[1]]
    }

    /// Value at `t` on the simplex edge with `l_h` minimized in closed form.
    pub fn value_on_edge(&self, t: f64) -> f64 {
        let l = self.multipliers_at(t);
        let a = &self.cone;
        let u = self.combine([a[0][0] * l[0] + a[1][0] * l[1], a[0][1] * l[0] + a[1][1] * l[1]]);
        match self.equality {
            None => 0.5 * dot(&u, &u),
            Some((b, h, c_h)) => {
                let v = self.combine(b);
                let vv = dot(&v, &v);
                let lh = if vv > 0.0 { (c_h * h - dot(&u, &v)) / vv } else { 0.0 };
                let w: Vec<f64> = u.iter().zip(&v).map(|(x, y)| x + lh * y).collect();
                0.5 * dot(&w, &w) - c_h * h * lh
            }
        }
    }

    /// Smallest value over `n + 1` equally spaced edge points.
    pub fn grid_minimum(&self, n: usize) -> f64 {
        (0..=n).map(|i| self.value_on_edge(i as f64 / n as f64)).fold(f64::INFINITY, f64::min)
    }
}

/// Point of minimum norm on the segment between `a` and `b`, from a grid of
/// `n + 1` points.
pub fn grid_min_norm_point(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let at = |t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| t * x + (1.0 - t) * y).collect() };
    let mut best = at(0.0);
    let mut best_norm = dot(&best, &best);
    for i in 1..=n {
        let p = at(i as f64 / n as f64);
        let nn = dot(&p, &p);
        if nn < best_norm {
            best = p;
            best_norm = nn;
        }
    }
    best
}
