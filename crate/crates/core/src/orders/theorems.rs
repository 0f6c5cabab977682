//! Hypothesis and conclusion checks for the results that transfer orders
//! between `X`, `Y` and their WTRVs, with the worked examples as fixtures.

use std::cell::OnceCell;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use super::{check_order, OrderVerdict, StochasticOrder, MIN_GRID};
use crate::distributions::{make_catalog, Distribution, DistributionHandle};
use crate::error::{Error, Result};
use crate::grid::{first_monotone_violation, union_grid, Direction, Tolerance, Violation};
use crate::numerics::Interval;
use crate::reliability::{hazard, Hypothesis};
use crate::weights::{make_weight, WeightFunction};
use crate::wtrv::{construct, wtrv_of_minimum, WtrvDistribution};

const GRID: usize = 256;
const SHAPE_TOLERANCE: Tolerance = Tolerance { slack: 1e-9, noise: 1e-12 };

/// Which ordering result to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderTheorem {
    /// `X ≤_fr Y`, `w₂'/w₁'` increasing, bounds ⇒ `X_{w₁} ≤_lr Y_{w₂}`.
    Thm5i,
    /// `X_{w₁} ≤_lr Y_{w₂}`, `w₁'/w₂'` increasing ⇒ `X ≤_fr Y`.
    Thm5ii,
    /// `X_{w₁} ≤_rfr Y_{w₂}`, `w₁'/w₂'` increasing, `w₁'(0) ≠ 0` ⇒ `X ≤_st Y`.
    Thm6,
    /// `X_w ≤_fr X`, `Y_w ≤_fr Y` ⇒ `X_w ∧ Y_w ≤_lr (X ∧ Y)_w`, and the reverse.
    Thm7,
    /// `w₁'/r_X` decreasing, `w₂'/r_Y` increasing, `X ≤_st Y` ⇒ `X_{w₁} ≤_st Y_{w₂}`.
    Thm8,
    /// As for `Thm8` with bounds and `≤_fr`.
    Thm9,
    /// As for `Thm8` with bounds and `≤_rfr`.
    Thm10,
}

impl OrderTheorem {
    pub const ALL: [OrderTheorem; 7] = [
        Self::Thm5i,
        Self::Thm5ii,
        Self::Thm6,
        Self::Thm7,
        Self::Thm8,
        Self::Thm9,
        Self::Thm10,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Thm5i => "thm5i",
            Self::Thm5ii => "thm5ii",
            Self::Thm6 => "thm6",
            Self::Thm7 => "thm7",
            Self::Thm8 => "thm8",
            Self::Thm9 => "thm9",
            Self::Thm10 => "thm10",
        }
    }
}

impl fmt::Display for OrderTheorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OrderTheorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse {
                text: s.to_string(),
                reason: "expected one of thm5i, thm5ii, thm6, thm7, thm8, thm9, thm10".into(),
            })
    }
}

/// Hypotheses, conclusion and consistency for one `(X, Y, w₁, w₂)` tuple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub theorem: OrderTheorem,
    pub x: String,
    pub y: String,
    pub w1: String,
    pub w2: String,
    /// `"forward"` or `"reverse"` for the two-sided minimum result.
    pub branch: Option<String>,
    pub hypotheses: Vec<Hypothesis>,
    pub hypotheses_hold: bool,
    pub conclusion: String,
    /// `None` when the conclusion could not be evaluated (or was skipped).
    pub conclusion_holds: Option<bool>,
    pub conclusion_verdict: Option<OrderVerdict>,
    /// False only when every hypothesis passed and the conclusion failed.
    pub consistent: bool,
    pub note: Option<String>,
}

struct Inputs<'a> {
    x: &'a DistributionHandle,
    y: &'a DistributionHandle,
    w1: WeightFunction,
    w2: WeightFunction,
    grid: Vec<f64>,
    xw: OnceCell<std::result::Result<Arc<WtrvDistribution>, Error>>,
    yw: OnceCell<std::result::Result<Arc<WtrvDistribution>, Error>>,
}

impl<'a> Inputs<'a> {
    fn xw(&self) -> Result<Arc<WtrvDistribution>> {
        self.xw.get_or_init(|| construct(self.x.clone(), self.w1).map(Arc::new)).clone()
    }

    fn yw(&self) -> Result<Arc<WtrvDistribution>> {
        self.yw.get_or_init(|| construct(self.y.clone(), self.w2).map(Arc::new)).clone()
    }

    fn s1(&self) -> Interval {
        self.w1.effective_support(self.x.as_ref())
    }

    fn s2(&self) -> Interval {
        self.w2.effective_support(self.y.as_ref())
    }

    fn points_in(&self, s: Interval) -> Vec<f64> {
        self.grid.iter().copied().filter(|&t| s.contains(t)).collect()
    }
}

fn intersect(a: Interval, b: Interval) -> Interval {
    Interval::new(a.lo.max(b.lo), a.hi.min(b.hi))
}

fn monotone(xs: &[f64], values: &[f64], dir: Direction) -> Option<Violation> {
    first_monotone_violation(xs, values, dir, SHAPE_TOLERANCE)
}

/// `num'/den'` increasing on `s`.
fn weight_ratio_increasing(name: &str, num: &WeightFunction, den: &WeightFunction, xs: &[f64]) -> Hypothesis {
    let values: Vec<f64> = xs.iter().map(|&t| num.ln_w_prime(t) - den.ln_w_prime(t)).collect();
    Hypothesis::new(name, monotone(xs, &values, Direction::Nondecreasing))
}

fn weight_nonzero(name: &str, w: &WeightFunction, xs: &[f64]) -> Hypothesis {
    Hypothesis::flag(name, xs.iter().all(|&t| w.w_prime(t) > 0.0))
}

/// `w'/r_D` monotone in `dir` over the support of `d`.
fn weight_over_hazard(name: &str, w: &WeightFunction, d: &dyn Distribution, xs: &[f64], dir: Direction) -> Hypothesis {
    let values: Vec<f64> = xs
        .iter()
        .map(|&t| hazard(d, t).map_or(f64::NAN, |r| w.ln_w_prime(t) - r.ln()))
        .collect();
    Hypothesis::new(name, monotone(xs, &values, dir))
}

fn order_hypothesis(name: &str, a: &dyn Distribution, b: &dyn Distribution, order: StochasticOrder) -> Hypothesis {
    match check_order(a, b, order, GRID) {
        Ok(v) => Hypothesis {
            name: name.to_string(),
            holds: v.holds_on_grid,
            witness: v.first_violation,
        },
        Err(_) => Hypothesis::flag(name, false),
    }
}

fn wtrv_order_hypothesis(name: &str, a: Result<Arc<WtrvDistribution>>, b: Result<Arc<WtrvDistribution>>, order: StochasticOrder) -> Hypothesis {
    match (a, b) {
        (Ok(a), Ok(b)) => order_hypothesis(name, a.as_ref(), b.as_ref(), order),
        _ => Hypothesis::flag(name, false),
    }
}

enum Conclusion {
    /// `X_{w₁} ≤ Y_{w₂}`.
    Weighted(StochasticOrder),
    /// `X ≤ Y`.
    Base(StochasticOrder),
    /// `X_w ∧ Y_w ≤_lr (X ∧ Y)_w` (forward) or the reverse.
    Minimum { forward: bool },
}

fn hypotheses(inp: &Inputs, which: OrderTheorem) -> (Vec<Hypothesis>, Conclusion, Option<String>) {
    let (x, y) = (inp.x.as_ref(), inp.y.as_ref());
    let (s1, s2) = (inp.s1(), inp.s2());
    let common = inp.points_in(intersect(s1, s2));
    let bounds = || {
        vec![
            Hypothesis::flag("l1 <= l2", s1.lo <= s2.lo),
            Hypothesis::flag("u1 <= u2", s1.hi <= s2.hi),
        ]
    };
    let hazard_pair = || {
        vec![
            weight_over_hazard("w1'/r_X decreasing", &inp.w1, x, &inp.points_in(x.support()), Direction::Nonincreasing),
            weight_over_hazard("w2'/r_Y increasing", &inp.w2, y, &inp.points_in(y.support()), Direction::Nondecreasing),
        ]
    };
    match which {
        OrderTheorem::Thm5i => {
            let mut h = bounds();
            h.push(order_hypothesis("X <=fr Y", x, y, StochasticOrder::Fr));
            h.push(weight_ratio_increasing("w2'/w1' increasing on S1∩S2", &inp.w2, &inp.w1, &common));
            h.push(weight_nonzero("w1' != 0 on S1", &inp.w1, &inp.points_in(s1)));
            (h, Conclusion::Weighted(StochasticOrder::Lr), None)
        }
        OrderTheorem::Thm5ii => {
            let h = vec![
                Hypothesis::flag("S_X = S1", x.support() == s1),
                Hypothesis::flag("S_Y = S2", y.support() == s2),
                wtrv_order_hypothesis("X_w1 <=lr Y_w2", inp.xw(), inp.yw(), StochasticOrder::Lr),
                weight_ratio_increasing("w1'/w2' increasing on S1∩S2", &inp.w1, &inp.w2, &common),
                weight_nonzero("w2' != 0 on S2", &inp.w2, &inp.points_in(s2)),
            ];
            (h, Conclusion::Base(StochasticOrder::Fr), None)
        }
        OrderTheorem::Thm6 => {
            let h = vec![
                Hypothesis::flag("S_X = S1", x.support() == s1),
                Hypothesis::flag("S_Y = S2", y.support() == s2),
                wtrv_order_hypothesis("X_w1 <=rfr Y_w2", inp.xw(), inp.yw(), StochasticOrder::Rfr),
                weight_ratio_increasing("w1'/w2' increasing", &inp.w1, &inp.w2, &common),
                weight_nonzero("w2' != 0 on S_X∩S_Y", &inp.w2, &common),
                Hypothesis::flag("w1'(0) != 0", inp.w1.w_prime(0.0) != 0.0),
            ];
            (h, Conclusion::Base(StochasticOrder::St), None)
        }
        OrderTheorem::Thm7 => {
            let same = x.support() == y.support();
            let branch = |forward: bool| {
                let (rel, a) = if forward { ("<=fr", true) } else { (">=fr", false) };
                let pick = |d: &DistributionHandle, dw: Result<Arc<WtrvDistribution>>, name: &str| match dw {
                    Ok(dw) if a => order_hypothesis(name, dw.as_ref(), d.as_ref(), StochasticOrder::Fr),
                    Ok(dw) => order_hypothesis(name, d.as_ref(), dw.as_ref(), StochasticOrder::Fr),
                    Err(_) => Hypothesis::flag(name, false),
                };
                vec![
                    Hypothesis::flag("S_X = S_Y", same),
                    pick(inp.x, inp.xw(), &format!("X_w {rel} X")),
                    pick(inp.y, inp.yw(), &format!("Y_w {rel} Y")),
                ]
            };
            let forward = branch(true);
            if forward.iter().all(|h| h.holds) {
                return (forward, Conclusion::Minimum { forward: true }, Some("forward".into()));
            }
            let reverse = branch(false);
            if reverse.iter().all(|h| h.holds) {
                return (reverse, Conclusion::Minimum { forward: false }, Some("reverse".into()));
            }
            (forward, Conclusion::Minimum { forward: true }, Some("forward".into()))
        }
        OrderTheorem::Thm8 => {
            let mut h = hazard_pair();
            h.push(order_hypothesis("X <=st Y", x, y, StochasticOrder::St));
            (h, Conclusion::Weighted(StochasticOrder::St), None)
        }
        OrderTheorem::Thm9 | OrderTheorem::Thm10 => {
            let order = if which == OrderTheorem::Thm9 {
                StochasticOrder::Fr
            } else {
                StochasticOrder::Rfr
            };
            let mut h = bounds();
            h.extend(hazard_pair());
            h.push(order_hypothesis(&format!("X <={order} Y"), x, y, order));
            (h, Conclusion::Weighted(order), None)
        }
    }
}

fn describe(c: &Conclusion) -> String {
    match c {
        Conclusion::Weighted(o) => format!("X_w1 <={o} Y_w2"),
        Conclusion::Base(o) => format!("X <={o} Y"),
        Conclusion::Minimum { forward: true } => "X_w ∧ Y_w <=lr (X ∧ Y)_w".into(),
        Conclusion::Minimum { forward: false } => "(X ∧ Y)_w <=lr X_w ∧ Y_w".into(),
    }
}

fn conclude(inp: &Inputs, c: &Conclusion) -> Result<OrderVerdict> {
    match *c {
        Conclusion::Weighted(o) => check_order(inp.xw()?.as_ref(), inp.yw()?.as_ref(), o, GRID),
        Conclusion::Base(o) => check_order(inp.x.as_ref(), inp.y.as_ref(), o, GRID),
        Conclusion::Minimum { forward } => {
            let m = wtrv_of_minimum(&[inp.x.clone(), inp.y.clone()], inp.w1)?;
            if forward {
                check_order(&m.minimum_of_wtrvs, &m.of_minimum, StochasticOrder::Lr, GRID)
            } else {
                check_order(&m.of_minimum, &m.minimum_of_wtrvs, StochasticOrder::Lr, GRID)
            }
        }
    }
}

/// Check the hypotheses of `which` for `(X, Y, w₁, w₂)` on grids, then build
/// the WTRVs and check the conclusion.
pub fn verify_theorem(
    x: &DistributionHandle,
    y: &DistributionHandle,
    w1: WeightFunction,
    w2: WeightFunction,
    which: OrderTheorem,
) -> TheoremReport {
    verify(x, y, w1, w2, which, true)
}

/// As [`verify_theorem`]; when `always_conclude` is false the conclusion is
/// skipped for tuples whose hypotheses fail.
pub(crate) fn verify(
    x: &DistributionHandle,
    y: &DistributionHandle,
    w1: WeightFunction,
    w2: WeightFunction,
    which: OrderTheorem,
    always_conclude: bool,
) -> TheoremReport {
    let inp = Inputs {
        x,
        y,
        w1,
        w2,
        grid: union_grid(x.as_ref(), y.as_ref(), GRID.max(MIN_GRID)),
        xw: OnceCell::new(),
        yw: OnceCell::new(),
    };
    let (hypotheses, conclusion, branch) = hypotheses(&inp, which);
    let hypotheses_hold = hypotheses.iter().all(|h| h.holds);
    let mut note = None;
    if which == OrderTheorem::Thm7 && w1 != w2 {
        note = Some("the minimum result uses a single weight; w2 is ignored".to_string());
    }
    let verdict = if hypotheses_hold || always_conclude {
        match conclude(&inp, &conclusion) {
            Ok(v) => Some(v),
            Err(e) => {
                note = Some(format!("conclusion could not be evaluated: {e}"));
                None
            }
        }
    } else {
        None
    };
    let conclusion_holds = verdict.as_ref().map(|v| v.holds_on_grid);
    if !hypotheses_hold && note.is_none() {
        note = Some("hypotheses not met on the grid; the result makes no claim".into());
    }
    TheoremReport {
        theorem: which,
        x: x.label(),
        y: y.label(),
        w1: w1.to_string(),
        w2: w2.to_string(),
        branch,
        hypotheses,
        hypotheses_hold,
        conclusion: describe(&conclusion),
        conclusion_holds,
        conclusion_verdict: verdict,
        consistent: !(hypotheses_hold && conclusion_holds == Some(false)),
        note,
    }
}

/// A named worked example.
#[derive(Debug, Clone)]
pub struct TheoremFixture {
    pub name: &'static str,
    pub theorem: OrderTheorem,
    pub x: DistributionHandle,
    pub y: DistributionHandle,
    pub w1: WeightFunction,
    pub w2: WeightFunction,
}

impl TheoremFixture {
    pub fn verify(&self) -> TheoremReport {
        verify_theorem(&self.x, &self.y, self.w1, self.w2, self.theorem)
    }
}

/// Names accepted by [`theorem_fixture`].
pub const FIXTURE_NAMES: [&str; 5] = [
    "thm5i-example4",
    "thm6-example6",
    "thm7-exponential",
    "thm9-example7",
    "thm10-example8",
];

/// Worked examples: exponential pairs with power weights (lr), the
/// squared/linear exponential pair (rfr to st), uniform against exponential
/// with `expm1`/linear weights (fr), and exponential against uniform with
/// linear/`-x - log(1-x)` weights (rfr).
pub fn theorem_fixture(name: &str) -> Result<TheoremFixture> {
    let exp = |l: f64| make_catalog("exponential", &[("lambda", l)]);
    let uniform = || make_catalog("uniform", &[]);
    let power = |c: f64| make_weight("power", &[("c", c)]);
    let (theorem, x, y, w1, w2) = match name {
        "thm5i-example4" => (OrderTheorem::Thm5i, exp(2.0)?, exp(0.5)?, power(1.5)?, power(3.0)?),
        "thm6-example6" => (OrderTheorem::Thm6, exp(2.0)?, exp(1.0)?, power(2.0)?, WeightFunction::linear()),
        "thm7-exponential" => (
            OrderTheorem::Thm7,
            exp(1.0)?,
            exp(2.5)?,
            WeightFunction::linear(),
            WeightFunction::linear(),
        ),
        "thm9-example7" => (
            OrderTheorem::Thm9,
            uniform()?,
            exp(1.0)?,
            make_weight("expm1", &[])?,
            WeightFunction::linear(),
        ),
        "thm10-example8" => (
            OrderTheorem::Thm10,
            exp(1.0)?,
            uniform()?,
            WeightFunction::linear(),
            make_weight("neg_x_log1m", &[])?,
        ),
        _ => {
            return Err(Error::Catalog(format!(
                "{name} (fixtures: {})",
                FIXTURE_NAMES.join(", ")
            )))
        }
    };
    let name = FIXTURE_NAMES.iter().find(|n| **n == name).copied().unwrap_or("custom");
    Ok(TheoremFixture { name, theorem, x, y, w1, w2 })
}

/// The density ratio `f_{Y_{w₂}}/f_{X_{w₁}}` at `n` evenly spaced interior
/// points of the common support (truncated to the 0.995 quantiles when it is
/// unbounded).
pub fn emit_ratio_curve(fixture: &TheoremFixture, n: usize) -> Result<Vec<(f64, f64)>> {
    let xw = construct(fixture.x.clone(), fixture.w1)?;
    let yw = construct(fixture.y.clone(), fixture.w2)?;
    let (a, b) = (xw.support(), yw.support());
    let lo = a.lo.max(b.lo);
    let mut hi = a.hi.min(b.hi);
    if hi.is_infinite() {
        hi = xw.quantile(0.995).min(yw.quantile(0.995));
    }
    let n = n.max(2);
    Ok((1..=n)
        .map(|i| {
            let t = lo + (hi - lo) * i as f64 / (n + 1) as f64;
            (t, (yw.ln_pdf(t) - xw.ln_pdf(t)).exp())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_power_pair_is_lr_ordered() {
        let r = theorem_fixture("thm5i-example4").unwrap().verify();
        assert!(r.hypotheses_hold, "{r:?}");
        assert_eq!(r.conclusion_holds, Some(true));
    }

    #[test]
    fn uniform_exponential_fr_but_not_lr() {
        let f = theorem_fixture("thm9-example7").unwrap();
        let r = f.verify();
        assert!(r.hypotheses_hold, "{r:?}");
        assert_eq!(r.conclusion_holds, Some(true));
        let xw = construct(f.x.clone(), f.w1).unwrap();
        let yw = construct(f.y.clone(), f.w2).unwrap();
        let lr = check_order(&xw, &yw, StochasticOrder::Lr, 256).unwrap();
        assert!(!lr.holds_on_grid);
        // e^{-2x}(e-2)/(1-x) falls until x = 1/2
        assert!(lr.first_violation.unwrap().x1 < 0.5);
        let curve = emit_ratio_curve(&f, 99).unwrap();
        let (x_min, _) = curve.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        assert!((x_min - 0.5).abs() < 0.011);
        for (x, r) in curve {
            let expect = (-2.0 * x).exp() * (std::f64::consts::E - 2.0) / (1.0 - x);
            assert!((r - expect).abs() < 1e-8 * expect, "{x}: {r} vs {expect}");
        }
    }

    #[test]
    fn weight_vanishing_at_zero_fails_thm6() {
        let r = theorem_fixture("thm6-example6").unwrap().verify();
        let h = r.hypotheses.iter().find(|h| h.name == "w1'(0) != 0").unwrap();
        assert!(!h.holds);
        assert!(!r.hypotheses_hold);
        assert_eq!(r.conclusion_holds, Some(true));
    }

    #[test]
    fn exponential_minimum() {
        let r = theorem_fixture("thm7-exponential").unwrap().verify();
        assert!(r.hypotheses_hold, "{r:?}");
        assert_eq!(r.conclusion_holds, Some(true));
    }

    #[test]
    fn unknown_fixture() {
        assert!(matches!(theorem_fixture("thm11"), Err(Error::Catalog(_))));
    }
}
