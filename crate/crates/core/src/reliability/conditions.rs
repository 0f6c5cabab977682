//! Hypothesis and conclusion checks for the aging-preservation results:
//! monotone hazard and MRL of `X` combined with shape conditions on `w'`,
//! `w'/r_X` and `m_X` imply an aging class (or an lr comparison) for `X_w`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{classify_aging, classify_aging_on_grid, hazard, mrl_on_grid, AgingReport};
use crate::distributions::{Distribution, DistributionHandle};
use crate::error::{Error, Result};
use crate::grid::{
    first_concavity_violation, first_convexity_violation, first_monotone_violation, quantile_grid, Direction,
    Tolerance, Violation,
};
use crate::orders::{check_order, StochasticOrder};
use crate::weights::WeightFunction;
use crate::wtrv::construct;

const GRID: usize = 256;
const SHAPE_TOLERANCE: Tolerance = Tolerance { slack: 1e-9, noise: 1e-12 };

/// Which aging result to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AgingTheorem {
    /// `X` IFR [DFR] and `w'` log-concave [log-convex] ⇒ `X_w` ILR [DLR].
    Prop1,
    /// `X` IFR, `w'/r_X` increasing and log-concave ⇒ `X_w` IFR.
    Thm1,
    /// `X` DFR, `w'/r_X` increasing and log-convex ⇒ `X_w` DFR.
    Thm2,
    /// `X` DMRL, `w'/r_X` increasing and log-concave, `m_X` log-convex ⇒ `X_w` IFR.
    Thm3,
    /// `X` IMRL, `w'/r_X` increasing and log-convex, `m_X` log-concave ⇒ `X_w` DFR.
    Thm4,
    /// `X` IFR and `w` concave ⇒ `X_w ≤_lr X`; `X` DFR and `w` convex ⇒ `X ≤_lr X_w`.
    Prop2,
}

impl AgingTheorem {
    pub const ALL: [AgingTheorem; 6] = [Self::Prop1, Self::Thm1, Self::Thm2, Self::Thm3, Self::Thm4, Self::Prop2];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Prop1 => "prop1",
            Self::Thm1 => "thm1",
            Self::Thm2 => "thm2",
            Self::Thm3 => "thm3",
            Self::Thm4 => "thm4",
            Self::Prop2 => "prop2",
        }
    }
}

impl fmt::Display for AgingTheorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AgingTheorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse {
                text: s.to_string(),
                reason: "expected one of prop1, thm1, thm2, thm3, thm4, prop2".into(),
            })
    }
}

/// One grid-checked hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
    pub witness: Option<Violation>,
}

impl Hypothesis {
    pub fn new(name: impl Into<String>, witness: Option<Violation>) -> Self {
        Self {
            name: name.into(),
            holds: witness.is_none(),
            witness,
        }
    }

    pub fn flag(name: impl Into<String>, holds: bool) -> Self {
        Self {
            name: name.into(),
            holds,
            witness: None,
        }
    }
}

/// Hypotheses, conclusion and their consistency for one `(X, w)` pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub theorem: AgingTheorem,
    pub distribution: String,
    pub weight: String,
    /// `"IFR"` or `"DFR"` for the two-sided results.
    pub branch: Option<String>,
    pub hypotheses: Vec<Hypothesis>,
    pub hypotheses_hold: bool,
    pub conclusion: String,
    /// `None` when `X_w` could not be built.
    pub conclusion_holds: Option<bool>,
    /// False only when every hypothesis passed and the conclusion failed.
    pub consistent: bool,
    pub note: Option<String>,
}

enum Conclusion {
    Class(&'static str),
    WeightedBelow,
    WeightedAbove,
}

struct Tabulated {
    xs: Vec<f64>,
    base: AgingReport,
    ln_w_prime: Vec<f64>,
    /// `log(w'/r_X)`.
    ln_ratio: Vec<f64>,
    ln_mrl: Result<Vec<f64>>,
}

impl Tabulated {
    fn new(dist: &dyn Distribution, w: &WeightFunction) -> Self {
        let s = w.effective_support(dist);
        let xs: Vec<f64> = quantile_grid(dist, GRID).into_iter().filter(|&x| s.contains(x)).collect();
        let ln_w_prime: Vec<f64> = xs.iter().map(|&x| w.ln_w_prime(x)).collect();
        let ln_ratio = xs
            .iter()
            .zip(&ln_w_prime)
            .map(|(&x, lw)| hazard(dist, x).map_or(f64::NAN, |r| lw - r.ln()))
            .collect();
        let ln_mrl = mrl_on_grid(dist, &xs).map(|m| m.into_iter().map(f64::ln).collect());
        Self {
            base: classify_aging_on_grid(dist, &xs),
            xs,
            ln_w_prime,
            ln_ratio,
            ln_mrl,
        }
    }

    fn class(&self, name: &str) -> Hypothesis {
        let c = self.base.classes.named();
        let holds = c.iter().any(|(n, v)| *n == name && *v);
        Hypothesis {
            name: format!("X is {name}"),
            holds,
            witness: if holds { None } else { self.base.witnesses.get(name).copied() },
        }
    }

    fn ratio_increasing(&self) -> Hypothesis {
        Hypothesis::new(
            "w'/r_X increasing",
            first_monotone_violation(&self.xs, &self.ln_ratio, Direction::Nondecreasing, SHAPE_TOLERANCE),
        )
    }

    fn ratio_log_concave(&self, concave: bool) -> Hypothesis {
        if concave {
            Hypothesis::new("w'/r_X log-concave", first_concavity_violation(&self.xs, &self.ln_ratio, SHAPE_TOLERANCE))
        } else {
            Hypothesis::new("w'/r_X log-convex", first_convexity_violation(&self.xs, &self.ln_ratio, SHAPE_TOLERANCE))
        }
    }

    fn w_prime_log_concave(&self, concave: bool) -> Hypothesis {
        if concave {
            Hypothesis::new("w' log-concave", first_concavity_violation(&self.xs, &self.ln_w_prime, SHAPE_TOLERANCE))
        } else {
            Hypothesis::new("w' log-convex", first_convexity_violation(&self.xs, &self.ln_w_prime, SHAPE_TOLERANCE))
        }
    }

    fn w_concave(&self, concave: bool) -> Hypothesis {
        let (name, dir) = if concave {
            ("w concave", Direction::Nonincreasing)
        } else {
            ("w convex", Direction::Nondecreasing)
        };
        Hypothesis::new(name, first_monotone_violation(&self.xs, &self.ln_w_prime, dir, SHAPE_TOLERANCE))
    }

    fn mrl_log_shape(&self, concave: bool) -> Hypothesis {
        let name = if concave { "m_X log-concave" } else { "m_X log-convex" };
        match &self.ln_mrl {
            Ok(lm) => {
                let tol = Tolerance::quadrature();
                let v = if concave {
                    first_concavity_violation(&self.xs, lm, tol)
                } else {
                    first_convexity_violation(&self.xs, lm, tol)
                };
                Hypothesis::new(name, v)
            }
            Err(_) => Hypothesis::flag(name, false),
        }
    }
}

fn branch_hypotheses(t: &Tabulated, which: AgingTheorem, dfr: bool) -> (Vec<Hypothesis>, Conclusion) {
    match which {
        AgingTheorem::Prop1 if !dfr => (
            vec![t.class("IFR"), t.w_prime_log_concave(true)],
            Conclusion::Class("ILR"),
        ),
        AgingTheorem::Prop1 => (vec![t.class("DFR"), t.w_prime_log_concave(false)], Conclusion::Class("DLR")),
        AgingTheorem::Thm1 => (
            vec![t.class("IFR"), t.ratio_increasing(), t.ratio_log_concave(true)],
            Conclusion::Class("IFR"),
        ),
        AgingTheorem::Thm2 => (
            vec![t.class("DFR"), t.ratio_increasing(), t.ratio_log_concave(false)],
            Conclusion::Class("DFR"),
        ),
        AgingTheorem::Thm3 => (
            vec![t.class("DMRL"), t.ratio_increasing(), t.ratio_log_concave(true), t.mrl_log_shape(false)],
            Conclusion::Class("IFR"),
        ),
        AgingTheorem::Thm4 => (
            vec![t.class("IMRL"), t.ratio_increasing(), t.ratio_log_concave(false), t.mrl_log_shape(true)],
            Conclusion::Class("DFR"),
        ),
        AgingTheorem::Prop2 if !dfr => (vec![t.class("IFR"), t.w_concave(true)], Conclusion::WeightedBelow),
        AgingTheorem::Prop2 => (vec![t.class("DFR"), t.w_concave(false)], Conclusion::WeightedAbove),
    }
}

/// Grid-check the hypotheses of `which` for `(dist, w)` and, by building
/// `X_w`, its conclusion.
pub fn check_theorem_conditions(dist: DistributionHandle, w: WeightFunction, which: AgingTheorem) -> ConditionReport {
    let t = Tabulated::new(dist.as_ref(), &w);
    let two_sided = matches!(which, AgingTheorem::Prop1 | AgingTheorem::Prop2);
    let (mut hypotheses, mut conclusion) = branch_hypotheses(&t, which, false);
    let mut branch = two_sided.then(|| "IFR".to_string());
    if two_sided && !hypotheses.iter().all(|h| h.holds) {
        let (alt, alt_conclusion) = branch_hypotheses(&t, which, true);
        if alt.iter().all(|h| h.holds) {
            hypotheses = alt;
            conclusion = alt_conclusion;
            branch = Some("DFR".into());
        }
    }
    let hypotheses_hold = hypotheses.iter().all(|h| h.holds);

    let description = match conclusion {
        Conclusion::Class(c) => format!("X_w is {c}"),
        Conclusion::WeightedBelow => "X_w <=lr X".into(),
        Conclusion::WeightedAbove => "X <=lr X_w".into(),
    };

    let (conclusion_holds, note) = match construct(dist.clone(), w) {
        Err(e) => (None, Some(format!("X_w could not be constructed: {e}"))),
        Ok(xw) => match conclusion {
            Conclusion::Class(c) => match classify_aging(&xw, GRID) {
                Ok(r) => (r.classes.named().iter().find(|(n, _)| *n == c).map(|(_, v)| *v), None),
                Err(e) => (None, Some(e.to_string())),
            },
            Conclusion::WeightedBelow => (
                check_order(&xw, dist.as_ref(), StochasticOrder::Lr, GRID).ok().map(|v| v.holds_on_grid),
                None,
            ),
            Conclusion::WeightedAbove => (
                check_order(dist.as_ref(), &xw, StochasticOrder::Lr, GRID).ok().map(|v| v.holds_on_grid),
                None,
            ),
        },
    };

    ConditionReport {
        theorem: which,
        distribution: dist.label(),
        weight: w.to_string(),
        branch,
        hypotheses,
        hypotheses_hold,
        conclusion: description,
        conclusion_holds,
        consistent: !(hypotheses_hold && conclusion_holds == Some(false)),
        note,
    }
}
