//! Grid checks for the likelihood ratio, failure rate, reversed failure rate
//! and usual stochastic orders, plus verification of WTRV ordering results.
//!
//! Ratios are compared as log-ratio differences on the merged quantile grids
//! of both distributions. Support bound clauses (`l_X ≤ l_Y`, `u_X ≤ u_Y`)
//! are read from the support metadata.

mod audit;
mod theorems;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::grid::{first_monotone_violation, union_grid, Direction, Tolerance, Violation};

pub use audit::{randomized_theorem_audit, AuditReport, Counterexample};
pub use theorems::{
    emit_ratio_curve, theorem_fixture, verify_theorem, OrderTheorem, TheoremFixture, TheoremReport, FIXTURE_NAMES,
};

/// Smallest grid accepted by [`check_order`].
pub const MIN_GRID: usize = 64;

/// Additive slack for pointwise survival dominance.
pub const ST_SLACK: f64 = 1e-10;

const RATIO_TOLERANCE: Tolerance = Tolerance { slack: 1e-9, noise: 1e-12 };

/// The four orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StochasticOrder {
    Lr,
    Fr,
    Rfr,
    St,
}

impl StochasticOrder {
    pub const ALL: [StochasticOrder; 4] = [Self::Lr, Self::Fr, Self::Rfr, Self::St];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Lr => "lr",
            Self::Fr => "fr",
            Self::Rfr => "rfr",
            Self::St => "st",
        }
    }
}

impl fmt::Display for StochasticOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StochasticOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lr" => Ok(Self::Lr),
            "fr" | "hr" => Ok(Self::Fr),
            "rfr" | "rh" => Ok(Self::Rfr),
            "st" => Ok(Self::St),
            _ => Err(Error::Parse {
                text: s.to_string(),
                reason: "expected one of lr, fr, rfr, st".into(),
            }),
        }
    }
}

/// Summary of the grid a verdict was computed on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridDescription {
    pub points: usize,
    pub lo: f64,
    pub hi: f64,
}

impl GridDescription {
    fn of(xs: &[f64]) -> Self {
        Self {
            points: xs.len(),
            lo: xs.first().copied().unwrap_or(f64::NAN),
            hi: xs.last().copied().unwrap_or(f64::NAN),
        }
    }
}

/// Outcome of [`check_order`] for `X ≤ Y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderVerdict {
    pub order: StochasticOrder,
    pub x: String,
    pub y: String,
    /// Full definition: bound clauses and the ratio (or dominance) condition.
    pub holds_on_grid: bool,
    pub bounds_ok: bool,
    /// The ratio (or dominance) condition on the common support only.
    pub restricted_holds: bool,
    pub first_violation: Option<Violation>,
    pub grid: GridDescription,
}

fn ln_ratio(num: f64, den: f64) -> f64 {
    match (num > 0.0, den > 0.0) {
        (true, true) => num.ln() - den.ln(),
        (true, false) => f64::INFINITY,
        (false, true) => f64::NEG_INFINITY,
        (false, false) => f64::NAN,
    }
}

/// Check `X ≤_order Y` on the union of the two `grid_size`-point quantile grids.
pub fn check_order(
    x: &dyn Distribution,
    y: &dyn Distribution,
    order: StochasticOrder,
    grid_size: usize,
) -> Result<OrderVerdict> {
    if grid_size < MIN_GRID {
        return Err(Error::Domain(format!("grid_size must be at least {MIN_GRID}, got {grid_size}")));
    }
    Ok(check_order_on_grid(x, y, order, &union_grid(x, y, grid_size)))
}

/// Check `X ≤_order Y` on an explicit increasing grid.
pub fn check_order_on_grid(
    x: &dyn Distribution,
    y: &dyn Distribution,
    order: StochasticOrder,
    grid: &[f64],
) -> OrderVerdict {
    let (sx, sy) = (x.support(), y.support());
    let bounds_ok = sx.lo <= sy.lo && sx.hi <= sy.hi;
    let (common_lo, common_hi) = (sx.lo.max(sy.lo), sx.hi.min(sy.hi));
    let (min_lo, max_hi) = (sx.lo.min(sy.lo), sx.hi.max(sy.hi));
    let inner: Vec<f64> = grid.iter().copied().filter(|&t| t > common_lo && t < common_hi).collect();

    let ratio_check = |xs: &[f64], f: &dyn Fn(f64) -> f64| {
        let values: Vec<f64> = xs.iter().map(|&t| f(t)).collect();
        first_monotone_violation(xs, &values, Direction::Nondecreasing, RATIO_TOLERANCE)
    };

    let (full_violation, restricted_violation) = match order {
        StochasticOrder::Lr => {
            let v = ratio_check(&inner, &|t| y.ln_pdf(t) - x.ln_pdf(t));
            (v, v)
        }
        StochasticOrder::Fr => {
            let f = |t: f64| ln_ratio(y.sf(t), x.sf(t));
            let mut xs = Vec::with_capacity(grid.len() + 1);
            let mut vals = Vec::with_capacity(grid.len() + 1);
            if min_lo.is_finite() {
                xs.push(min_lo);
                vals.push(0.0);
            }
            for &t in grid.iter().filter(|&&t| t > min_lo && t < max_hi) {
                xs.push(t);
                vals.push(f(t));
            }
            (
                first_monotone_violation(&xs, &vals, Direction::Nondecreasing, RATIO_TOLERANCE),
                ratio_check(&inner, &f),
            )
        }
        StochasticOrder::Rfr => {
            let f = |t: f64| ln_ratio(y.cdf(t), x.cdf(t));
            let mut xs: Vec<f64> = grid.iter().copied().filter(|&t| t > min_lo && t < max_hi).collect();
            let mut vals: Vec<f64> = xs.iter().map(|&t| f(t)).collect();
            if max_hi.is_finite() {
                xs.push(max_hi);
                vals.push(0.0);
            }
            (
                first_monotone_violation(&xs, &vals, Direction::Nondecreasing, RATIO_TOLERANCE),
                ratio_check(&inner, &f),
            )
        }
        StochasticOrder::St => {
            let dominance = |xs: &[f64]| {
                xs.iter().find_map(|&t| {
                    let (a, b) = (x.sf(t), y.sf(t));
                    (a > b + ST_SLACK).then_some(Violation { x1: t, x2: t, v1: a, v2: b })
                })
            };
            (dominance(grid), dominance(&inner))
        }
    };

    OrderVerdict {
        order,
        x: x.label(),
        y: y.label(),
        holds_on_grid: bounds_ok && full_violation.is_none(),
        bounds_ok,
        restricted_holds: restricted_violation.is_none(),
        first_violation: full_violation,
        grid: GridDescription::of(grid),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{make_catalog, DistributionHandle};

    fn exp(lambda: f64) -> DistributionHandle {
        make_catalog("exponential", &[("lambda", lambda)]).unwrap()
    }

    #[test]
    fn exponential_rates() {
        let (fast, slow) = (exp(2.0), exp(1.0));
        for order in StochasticOrder::ALL {
            let v = check_order(fast.as_ref(), slow.as_ref(), order, 128).unwrap();
            assert!(v.holds_on_grid, "{order}: {v:?}");
            let back = check_order(slow.as_ref(), fast.as_ref(), order, 128).unwrap();
            assert!(!back.holds_on_grid, "{order}");
            assert!(back.first_violation.is_some());
        }
    }

    #[test]
    fn gamma_lr() {
        let x = make_catalog("gamma", &[("k", 1.5), ("lambda", 2.0)]).unwrap();
        let y = make_catalog("gamma", &[("k", 3.0), ("lambda", 1.0)]).unwrap();
        assert!(check_order(x.as_ref(), y.as_ref(), StochasticOrder::Lr, 256).unwrap().holds_on_grid);
    }

    #[test]
    fn rfr_needs_upper_bound_clause() {
        // F_Y/F_X = x/(1-e^{-x}) rises on (0,1) but X reaches past 1.
        let x = exp(1.0);
        let y = make_catalog("uniform", &[]).unwrap();
        let v = check_order(x.as_ref(), y.as_ref(), StochasticOrder::Rfr, 256).unwrap();
        assert!(v.restricted_holds);
        assert!(!v.bounds_ok);
        assert!(!v.holds_on_grid);
    }

    #[test]
    fn crossing_survival_functions() {
        let x = make_catalog("weibull", &[("alpha", 0.5), ("beta", 1.0)]).unwrap();
        let y = make_catalog("weibull", &[("alpha", 3.0), ("beta", 1.0)]).unwrap();
        for order in StochasticOrder::ALL {
            assert!(!check_order(x.as_ref(), y.as_ref(), order, 128).unwrap().holds_on_grid);
            assert!(!check_order(y.as_ref(), x.as_ref(), order, 128).unwrap().holds_on_grid);
        }
    }

    #[test]
    fn parse_orders() {
        assert_eq!("LR".parse::<StochasticOrder>().unwrap(), StochasticOrder::Lr);
        assert!("cx".parse::<StochasticOrder>().is_err());
    }
}
