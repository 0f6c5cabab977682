//! Reliability functionals (hazard, reversed hazard, mean residual life,
//! Glaser function) and grid-based aging classification.
//!
//! Grid checks are one-sided: a flag set to `true` means no violation was
//! found on the grid, not that the property is proved.

mod conditions;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::grid::{first_monotone_violation, quantile_grid, Direction, Tolerance, Violation};
use crate::numerics::{integrate_with, Interval, QuadratureOptions};

pub use conditions::{check_theorem_conditions, AgingTheorem, ConditionReport, Hypothesis};

/// Smallest grid accepted by [`classify_aging`].
pub const MIN_GRID: usize = 64;

fn mrl_options() -> QuadratureOptions {
    QuadratureOptions {
        abs_tol: 0.0,
        rel_tol: 1e-12,
        max_subdivisions: 4000,
    }
}

/// Failure rate `f(x)/sf(x)`.
pub fn hazard(dist: &dyn Distribution, x: f64) -> Result<f64> {
    let sf = dist.sf(x);
    if sf <= 0.0 || sf.is_nan() {
        return Err(Error::Tail(format!("survival function of {} vanishes at {x}", dist.label())));
    }
    Ok(dist.pdf(x) / sf)
}

/// Reversed failure rate `f(x)/F(x)`.
pub fn reversed_hazard(dist: &dyn Distribution, x: f64) -> Result<f64> {
    let cdf = dist.cdf(x);
    if cdf <= 0.0 || cdf.is_nan() {
        return Err(Error::Tail(format!("distribution function of {} vanishes at {x}", dist.label())));
    }
    Ok(dist.pdf(x) / cdf)
}

fn survival_integral(dist: &dyn Distribution, a: f64, b: f64) -> Result<f64> {
    if a >= b {
        return Ok(0.0);
    }
    let r = integrate_with(|t| dist.sf(t), Interval::new(a, b), &mrl_options()).map_err(|e| {
        Error::Integrability(format!("∫ sf over ({a}, {b}) for {}: {e}", dist.label()))
    })?;
    if !r.value.is_finite() {
        return Err(Error::Integrability(format!("∫ sf over ({a}, {b}) for {} diverges", dist.label())));
    }
    Ok(r.value)
}

/// Mean residual life `∫_x^u sf / sf(x)`.
pub fn mrl(dist: &dyn Distribution, x: f64) -> Result<f64> {
    let sf = dist.sf(x);
    if sf <= 0.0 || sf.is_nan() {
        return Err(Error::Tail(format!("survival function of {} vanishes at {x}", dist.label())));
    }
    Ok(survival_integral(dist, x, dist.support().hi)? / sf)
}

/// Glaser function `-f'(x)/f(x)`; analytic where the distribution provides
/// the log-density derivative, central differences otherwise.
pub fn glaser(dist: &dyn Distribution, x: f64) -> Result<f64> {
    if let Some(d) = dist.pdf_log_derivative(x) {
        return Ok(-d);
    }
    numeric_glaser(dist, x)
}

fn numeric_glaser(dist: &dyn Distribution, x: f64) -> Result<f64> {
    let s = dist.support();
    let mut h = 1e-5 * x.abs().max(1.0);
    h = h.min(0.5 * (x - s.lo)).min(0.5 * (s.hi - x));
    if !(h > 0.0) {
        return Err(Error::Domain(format!("{x} is not interior to the support of {}", dist.label())));
    }
    let (a, b) = (dist.ln_pdf(x - h), dist.ln_pdf(x + h));
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Evaluation(format!("log-density of {} not finite near {x}", dist.label())));
    }
    Ok(-(b - a) / (2.0 * h))
}

/// Mean residual life at every grid point, from interval integrals of the
/// survival function summed right to left plus one tail integral.
pub fn mrl_on_grid(dist: &dyn Distribution, xs: &[f64]) -> Result<Vec<f64>> {
    let Some(&last) = xs.last() else {
        return Ok(Vec::new());
    };
    let mut acc = survival_integral(dist, last, dist.support().hi)?;
    let mut out = vec![0.0; xs.len()];
    for i in (0..xs.len()).rev() {
        if i + 1 < xs.len() {
            acc += survival_integral(dist, xs[i], xs[i + 1])?;
        }
        let sf = dist.sf(xs[i]);
        out[i] = if sf > 0.0 { acc / sf } else { f64::NAN };
    }
    Ok(out)
}

/// Aging-class flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AgingClasses {
    pub ilr: bool,
    pub dlr: bool,
    pub ifr: bool,
    pub dfr: bool,
    pub dmrl: bool,
    pub imrl: bool,
}

impl AgingClasses {
    pub fn named(&self) -> [(&'static str, bool); 6] {
        [
            ("ILR", self.ilr),
            ("DLR", self.dlr),
            ("IFR", self.ifr),
            ("DFR", self.dfr),
            ("DMRL", self.dmrl),
            ("IMRL", self.imrl),
        ]
    }
}

/// A grid point where a functional could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    pub quantity: String,
    pub x: Option<f64>,
    pub message: String,
}

/// Result of [`classify_aging`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgingReport {
    pub distribution: String,
    pub classes: AgingClasses,
    pub grid: Vec<f64>,
    /// First violating grid pair for each rejected class.
    pub witnesses: BTreeMap<String, Violation>,
    pub failures: Vec<PointFailure>,
}

fn pointwise(
    dist: &dyn Distribution,
    xs: &[f64],
    quantity: &str,
    f: impl Fn(&dyn Distribution, f64) -> Result<f64>,
    failures: &mut Vec<PointFailure>,
) -> Vec<f64> {
    xs.iter()
        .map(|&x| match f(dist, x) {
            Ok(v) => v,
            Err(e) => {
                failures.push(PointFailure {
                    quantity: quantity.to_string(),
                    x: Some(x),
                    message: e.to_string(),
                });
                f64::NAN
            }
        })
        .collect()
}

fn monotone_pair(
    xs: &[f64],
    values: &[f64],
    tol: Tolerance,
    names: (&str, &str),
    witnesses: &mut BTreeMap<String, Violation>,
) -> (bool, bool) {
    let usable = values.iter().filter(|v| !v.is_nan()).count() >= 2;
    let mut flag = |dir, name: &str| match first_monotone_violation(xs, values, dir, tol) {
        None => usable,
        Some(v) => {
            witnesses.insert(name.to_string(), v);
            false
        }
    };
    (flag(Direction::Nondecreasing, names.0), flag(Direction::Nonincreasing, names.1))
}

/// Classify `dist` on an interior quantile grid of `grid_size` points.
pub fn classify_aging(dist: &dyn Distribution, grid_size: usize) -> Result<AgingReport> {
    if grid_size < MIN_GRID {
        return Err(Error::Domain(format!("grid_size must be at least {MIN_GRID}, got {grid_size}")));
    }
    Ok(classify_aging_on_grid(dist, &quantile_grid(dist, grid_size)))
}

/// Classify `dist` on the given increasing grid of interior points.
pub fn classify_aging_on_grid(dist: &dyn Distribution, xs: &[f64]) -> AgingReport {
    let mut failures = Vec::new();
    let mut witnesses = BTreeMap::new();

    let analytic = xs.first().is_some_and(|&x| dist.pdf_log_derivative(x).is_some());
    let glaser_tol = if analytic {
        Tolerance::default()
    } else {
        Tolerance { slack: 1e-6, noise: 1e-7 }
    };
    let eta = pointwise(dist, xs, "glaser", glaser, &mut failures);
    let (ilr, dlr) = monotone_pair(xs, &eta, glaser_tol, ("ILR", "DLR"), &mut witnesses);

    let r = pointwise(dist, xs, "hazard", hazard, &mut failures);
    let (ifr, dfr) = monotone_pair(xs, &r, Tolerance::quadrature(), ("IFR", "DFR"), &mut witnesses);

    let (imrl, dmrl) = match mrl_on_grid(dist, xs) {
        Ok(m) => monotone_pair(xs, &m, Tolerance::quadrature(), ("IMRL", "DMRL"), &mut witnesses),
        Err(e) => {
            failures.push(PointFailure {
                quantity: "mrl".into(),
                x: None,
                message: e.to_string(),
            });
            (false, false)
        }
    };

    AgingReport {
        distribution: dist.label(),
        classes: AgingClasses { ilr, dlr, ifr, dfr, dmrl, imrl },
        grid: xs.to_vec(),
        witnesses,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::make_catalog;
    use crate::weights::make_weight;
    use crate::wtrv::construct;

    #[test]
    fn hazard_examples() {
        let e = make_catalog("exponential", &[("lambda", 1.7)]).unwrap();
        assert!((hazard(e.as_ref(), 0.3).unwrap() - 1.7).abs() < 1e-12);
        assert!((hazard(e.as_ref(), 4.0).unwrap() - 1.7).abs() < 1e-12);
        let u = make_catalog("uniform", &[]).unwrap();
        assert!((hazard(u.as_ref(), 0.25).unwrap() - 1.0 / 0.75).abs() < 1e-12);
        assert!(matches!(hazard(u.as_ref(), 1.0), Err(Error::Tail(_))));
        let l = make_catalog("pareto_lomax", &[("alpha", 2.5)]).unwrap();
        assert!((hazard(l.as_ref(), 1.5).unwrap() - 2.5 / 2.5).abs() < 1e-12);
    }

    #[test]
    fn reversed_hazard_and_mrl() {
        let u = make_catalog("uniform", &[]).unwrap();
        assert!((reversed_hazard(u.as_ref(), 0.2).unwrap() - 5.0).abs() < 1e-12);
        assert!(matches!(reversed_hazard(u.as_ref(), 0.0), Err(Error::Tail(_))));
        let e = make_catalog("exponential", &[("lambda", 2.0)]).unwrap();
        for x in [0.0, 0.5, 3.0] {
            assert!((mrl(e.as_ref(), x).unwrap() - 0.5).abs() < 1e-9);
        }
        // uniform: (1 - x)/2
        assert!((mrl(u.as_ref(), 0.4).unwrap() - 0.3).abs() < 1e-12);
        let heavy = make_catalog("pareto_lomax", &[("alpha", 0.8)]).unwrap();
        assert!(matches!(mrl(heavy.as_ref(), 1.0), Err(Error::Integrability(_))));
    }

    #[test]
    fn glaser_of_beta() {
        let (a, b) = (2.5, 3.0);
        let d = make_catalog("beta", &[("alpha", a), ("beta", b)]).unwrap();
        for x in [0.1, 0.5, 0.9] {
            let expect = (b - 1.0) / (1.0 - x) - (a - 1.0) / x;
            assert!((glaser(d.as_ref(), x).unwrap() - expect).abs() < 1e-10);
            assert!((numeric_glaser(d.as_ref(), x).unwrap() - expect).abs() < 1e-5);
        }
    }

    #[test]
    fn exponential_is_on_every_boundary() {
        let e = make_catalog("exponential", &[("lambda", 0.7)]).unwrap();
        let r = classify_aging(e.as_ref(), 128).unwrap();
        assert!(r.classes.named().iter().all(|(_, v)| *v), "{r:?}");
    }

    #[test]
    fn gamma_and_weibull_shapes() {
        let g = make_catalog("gamma", &[("k", 2.5), ("lambda", 1.0)]).unwrap();
        let c = classify_aging(g.as_ref(), 128).unwrap().classes;
        assert!(c.ilr && c.ifr && c.dmrl && !c.dlr && !c.dfr && !c.imrl);
        let w = make_catalog("weibull", &[("alpha", 0.6), ("beta", 1.0)]).unwrap();
        let c = classify_aging(w.as_ref(), 128).unwrap().classes;
        assert!(c.dlr && c.dfr && c.imrl && !c.ilr && !c.ifr && !c.dmrl);
    }

    #[test]
    fn small_grid_rejected() {
        let e = make_catalog("exponential", &[("lambda", 1.0)]).unwrap();
        assert!(classify_aging(e.as_ref(), 10).is_err());
    }

    #[test]
    fn uniform_neg_log_sq_is_ifr() {
        let u = make_catalog("uniform", &[]).unwrap();
        let xw = construct(u, make_weight("neg_log_sq", &[]).unwrap()).unwrap();
        let r = classify_aging(&xw, 256).unwrap();
        assert!(r.classes.ifr, "{r:?}");
    }
}
