//! Box-constrained limited-memory quasi-Newton minimization with numerical
//! gradients.

use std::collections::VecDeque;

use serde::Serialize;

use super::Interval;
use crate::error::{Error, Result};

/// Result of [`minimize_bounded`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeResult {
    pub argmin: Vec<f64>,
    pub objective: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Tuning knobs for [`minimize_bounded_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    pub tol: f64,
    pub max_iterations: usize,
    pub memory: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_iterations: 1000, memory: 10 }
    }
}

fn project(x: &mut [f64], bounds: &[Interval]) {
    for (xi, b) in x.iter_mut().zip(bounds) {
        *xi = xi.clamp(b.lo, b.hi);
    }
}

/// `x - P(x - g)`, the gradient projected onto the box.
pub fn projected_gradient(x: &[f64], g: &[f64], bounds: &[Interval]) -> Vec<f64> {
    x.iter()
        .zip(g)
        .zip(bounds)
        .map(|((xi, gi), b)| xi - (xi - gi).clamp(b.lo, b.hi))
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Numerical gradient with step `1e-6·(1+|x_i|)`: central where the box
/// allows it, one-sided against a bound or a non-finite neighbour.
pub fn bounded_gradient<F: Fn(&[f64]) -> f64>(
    f: &F,
    x: &[f64],
    fx: f64,
    bounds: &[Interval],
) -> Result<Vec<f64>> {
    let mut probe = x.to_vec();
    let mut grad = vec![0.0; x.len()];
    for i in 0..x.len() {
        let h = 1e-6 * (1.0 + x[i].abs());
        let b = bounds[i];
        let up = if x[i] + h <= b.hi {
            probe[i] = x[i] + h;
            let v = f(&probe);
            v.is_finite().then_some(v)
        } else {
            None
        };
        let down = if x[i] - h >= b.lo {
            probe[i] = x[i] - h;
            let v = f(&probe);
            v.is_finite().then_some(v)
        } else {
            None
        };
        probe[i] = x[i];
        grad[i] = match (up, down) {
            (Some(u), Some(d)) => (u - d) / (2.0 * h),
            (Some(u), None) => (u - fx) / h,
            (None, Some(d)) => (fx - d) / h,
            (None, None) => {
                return Err(Error::Evaluation(format!(
                    "objective not finite on either side of coordinate {i} at {x:?}"
                )))
            }
        };
    }
    Ok(grad)
}

/// Minimize `objective` over the box `bounds` starting from `x0`.
///
/// `converged` is set when the projected gradient norm drops to `tol`.
pub fn minimize_bounded<F: Fn(&[f64]) -> f64>(
    objective: F,
    x0: &[f64],
    bounds: &[Interval],
    tol: f64,
) -> Result<OptimizeResult> {
    let opts = MinimizeOptions { tol, ..MinimizeOptions::default() };
    minimize_bounded_with(objective, x0, bounds, &opts)
}

pub fn minimize_bounded_with<F: Fn(&[f64]) -> f64>(
    objective: F,
    x0: &[f64],
    bounds: &[Interval],
    opts: &MinimizeOptions,
) -> Result<OptimizeResult> {
    if x0.len() != bounds.len() {
        return Err(Error::Domain(format!(
            "start has {} coordinates but {} bounds were given",
            x0.len(),
            bounds.len()
        )));
    }
    if x0.iter().zip(bounds).any(|(x, b)| !(b.lo <= *x && *x <= b.hi)) {
        return Err(Error::Domain(format!("start {x0:?} lies outside the bounds")));
    }
    let mut x = x0.to_vec();
    let mut fx = objective(&x);
    if !fx.is_finite() {
        return Err(Error::Start);
    }
    let mut g = bounded_gradient(&objective, &x, fx, bounds)?;
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let n = x.len();
    let mut iterations = 0;
    let mut pg_norm = norm(&projected_gradient(&x, &g, bounds));

    while iterations < opts.max_iterations && pg_norm > opts.tol {
        iterations += 1;
        // Variables pinned at a bound with the gradient pushing outward stay fixed.
        let free: Vec<bool> = (0..n)
            .map(|i| {
                let at_lo = x[i] <= bounds[i].lo && g[i] > 0.0;
                let at_hi = x[i] >= bounds[i].hi && g[i] < 0.0;
                !(at_lo || at_hi)
            })
            .collect();
        let masked = |v: &[f64]| -> Vec<f64> {
            v.iter().zip(&free).map(|(a, f)| if *f { *a } else { 0.0 }).collect()
        };

        let mut q = masked(&g);
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= a * yi;
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            let gamma = dot(s, y) / dot(y, y);
            for qi in q.iter_mut() {
                *qi *= gamma;
            }
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (a - b) * si;
            }
        }
        let mut d: Vec<f64> = masked(&q).iter().map(|v| -v).collect();
        if dot(&d, &g) >= 0.0 || d.iter().any(|v| !v.is_finite()) {
            history.clear();
            d = masked(&g).iter().map(|v| -v).collect();
        }

        let mut step = if history.is_empty() {
            (1.0 / norm(&d).max(1e-300)).min(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..60 {
            let mut trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + step * di).collect();
            project(&mut trial, bounds);
            let moved: Vec<f64> = trial.iter().zip(&x).map(|(t, xi)| t - xi).collect();
            let decrease = dot(&g, &moved);
            let ft = objective(&trial);
            if ft.is_finite() && ft <= fx + 1e-4 * decrease && decrease < 0.0 {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            if history.is_empty() {
                break;
            }
            history.clear();
            continue;
        };
        let g_new = bounded_gradient(&objective, &x_new, f_new, bounds)?;
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) && sy > 0.0 {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        let stalled = (fx - f_new).abs() <= 1e-16 * (1.0 + fx.abs());
        x = x_new;
        fx = f_new;
        g = g_new;
        pg_norm = norm(&projected_gradient(&x, &g, bounds));
        if stalled && history.is_empty() {
            break;
        }
    }
    Ok(OptimizeResult {
        argmin: x,
        objective: fx,
        gradient_norm: pg_norm,
        iterations,
        converged: pg_norm <= opts.tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_bowl() {
        let r = minimize_bounded(|x| (x[0] - 3.0).powi(2), &[1.0], &[Interval::new(0.0, 10.0)], 1e-8)
            .unwrap();
        assert!(r.converged);
        assert!((r.argmin[0] - 3.0).abs() < 1e-6);
    }

    #[test]
    fn origin_in_square() {
        let b = [Interval::new(-1.0, 1.0); 2];
        let r = minimize_bounded(|x| x[0] * x[0] + x[1] * x[1], &[0.5, 0.5], &b, 1e-8).unwrap();
        assert!(r.converged);
        assert!(r.argmin.iter().all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn active_bound() {
        let r = minimize_bounded(|x| (x[0] + 2.0).powi(2) + (x[1] - 0.5).powi(2), &[0.5, 0.9], &[Interval::new(0.0, 1.0); 2], 1e-8)
            .unwrap();
        assert!(r.converged);
        assert_eq!(r.argmin[0], 0.0);
        assert!((r.argmin[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let r = minimize_bounded(f, &[-1.2, 1.0], &[Interval::new(-5.0, 5.0); 2], 1e-7).unwrap();
        assert!((r.argmin[0] - 1.0).abs() < 1e-4 && (r.argmin[1] - 1.0).abs() < 1e-4, "{r:?}");
    }

    #[test]
    fn non_finite_start() {
        let err = minimize_bounded(|x| x[0].ln(), &[0.0], &[Interval::new(0.0, 1.0)], 1e-6).unwrap_err();
        assert_eq!(err, Error::Start);
    }

    #[test]
    fn rejects_non_finite_trial_points() {
        // The objective is infinite left of 0.2; the minimizer must stay right of it.
        let f = |x: &[f64]| if x[0] < 0.2 { f64::INFINITY } else { (x[0] - 0.3).powi(2) };
        let r = minimize_bounded(f, &[5.0], &[Interval::new(0.0, 10.0)], 1e-8).unwrap();
        assert!((r.argmin[0] - 0.3).abs() < 1e-6);
    }
}
