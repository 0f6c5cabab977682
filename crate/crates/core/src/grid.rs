//! Evaluation grids and discrete shape tests (monotonicity, log-concavity)
//! with slack for numerical noise.

use serde::Serialize;

use crate::distributions::Distribution;

/// Slack for the shape tests.
///
/// `slack` is relative to the compared magnitudes; `noise` is the relative
/// accuracy of the tabulated values themselves, which matters once they are
/// differenced into chord slopes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub slack: f64,
    pub noise: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { slack: 1e-9, noise: 1e-13 }
    }
}

impl Tolerance {
    /// For values that come out of a quadrature rather than a closed form.
    pub fn quadrature() -> Self {
        Self { slack: 1e-9, noise: 1e-10 }
    }
}

/// `n` points at the quantiles `u = 0.005 … 0.995` of `dist`, strictly increasing.
pub fn quantile_grid(dist: &dyn Distribution, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let mut xs: Vec<f64> = (0..n)
        .map(|i| dist.quantile(0.005 + 0.99 * i as f64 / (n - 1) as f64))
        .filter(|x| x.is_finite())
        .collect();
    xs.dedup();
    xs
}

/// Sorted, de-duplicated union of the quantile grids of two distributions.
pub fn union_grid(x: &dyn Distribution, y: &dyn Distribution, n: usize) -> Vec<f64> {
    let mut xs = quantile_grid(x, n);
    xs.extend(quantile_grid(y, n));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Two grid points and the values that break a shape condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub x1: f64,
    pub x2: f64,
    pub v1: f64,
    pub v2: f64,
}

/// Direction of a monotonicity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Nondecreasing,
    Nonincreasing,
}

fn magnitude(v: f64) -> f64 {
    if v.is_finite() {
        v.abs()
    } else {
        0.0
    }
}

fn finite_scale(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(magnitude(*v)))
}

fn scan(
    pts: &[(f64, f64, f64)],
    direction: Direction,
    slack: f64,
    scale: f64,
) -> Option<Violation> {
    for p in pts.windows(2) {
        let ((x1, v1, n1), (x2, v2, n2)) = (p[0], p[1]);
        let tol = slack * (magnitude(v1) + magnitude(v2) + 1e-3 * scale) + n1 + n2;
        let bad = match direction {
            Direction::Nondecreasing => v2 < v1 - tol,
            Direction::Nonincreasing => v2 > v1 + tol,
        };
        if bad {
            return Some(Violation { x1, x2, v1, v2 });
        }
    }
    None
}

/// First consecutive pair violating monotonicity. `NaN` values are skipped;
/// infinities compare in the extended reals.
pub fn first_monotone_violation(
    xs: &[f64],
    values: &[f64],
    direction: Direction,
    tol: Tolerance,
) -> Option<Violation> {
    let scale = finite_scale(values);
    let pts: Vec<(f64, f64, f64)> = xs
        .iter()
        .zip(values)
        .filter(|(_, v)| !v.is_nan())
        .map(|(x, v)| (*x, *v, tol.noise * magnitude(*v).max(scale).max(1.0)))
        .collect();
    scan(&pts, direction, tol.slack, scale)
}

/// Chord slopes with their noise estimates, at chord midpoints.
fn chord_slopes(xs: &[f64], values: &[f64], tol: Tolerance) -> Vec<(f64, f64, f64)> {
    let scale = finite_scale(values).max(1.0);
    (0..xs.len().saturating_sub(1))
        .filter(|&i| values[i].is_finite() && values[i + 1].is_finite())
        .map(|i| {
            let dx = xs[i + 1] - xs[i];
            let s = (values[i + 1] - values[i]) / dx;
            (0.5 * (xs[i] + xs[i + 1]), s, 2.0 * tol.noise * scale / dx)
        })
        .collect()
}

/// Concavity (chord slopes nonincreasing) of tabulated values; pass
/// logarithms to test log-concavity.
pub fn first_concavity_violation(xs: &[f64], values: &[f64], tol: Tolerance) -> Option<Violation> {
    let pts = chord_slopes(xs, values, tol);
    let scale = pts.iter().fold(0.0f64, |m, p| m.max(magnitude(p.1)));
    scan(&pts, Direction::Nonincreasing, tol.slack, scale)
}

/// Convexity (chord slopes nondecreasing) of tabulated values.
pub fn first_convexity_violation(xs: &[f64], values: &[f64], tol: Tolerance) -> Option<Violation> {
    let pts = chord_slopes(xs, values, tol);
    let scale = pts.iter().fold(0.0f64, |m, p| m.max(magnitude(p.1)));
    scan(&pts, Direction::Nondecreasing, tol.slack, scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::make_catalog;

    #[test]
    fn grid_is_increasing_inside_support() {
        let d = make_catalog("weibull", &[("alpha", 0.5), ("beta", 1.0)]).unwrap();
        let g = quantile_grid(d.as_ref(), 256);
        assert_eq!(g.len(), 256);
        assert!(g.windows(2).all(|p| p[1] > p[0]));
        assert!(g[0] > 0.0);
    }

    #[test]
    fn monotone_and_shape() {
        let xs: Vec<f64> = (1..100).map(|i| i as f64 * 0.1).collect();
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert!(first_monotone_violation(&xs, &sq, Direction::Nondecreasing, Tolerance::default()).is_none());
        assert!(first_monotone_violation(&xs, &sq, Direction::Nonincreasing, Tolerance::default()).is_some());
        assert!(first_convexity_violation(&xs, &sq, Tolerance::default()).is_none());
        let v = first_concavity_violation(&xs, &sq, Tolerance::default()).unwrap();
        assert!(v.v2 > v.v1);
        // a line is both concave and convex
        let line: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x).collect();
        assert!(first_concavity_violation(&xs, &line, Tolerance::default()).is_none());
        assert!(first_convexity_violation(&xs, &line, Tolerance::default()).is_none());
    }

    #[test]
    fn infinities_in_extended_order() {
        let xs = [1.0, 2.0, 3.0];
        assert!(first_monotone_violation(&xs, &[0.0, 1.0, f64::INFINITY], Direction::Nondecreasing, Tolerance { slack: 0.0, noise: 0.0 }).is_none());
        assert!(first_monotone_violation(&xs, &[0.0, f64::NEG_INFINITY, 1.0], Direction::Nondecreasing, Tolerance { slack: 0.0, noise: 0.0 }).is_some());
    }
}
