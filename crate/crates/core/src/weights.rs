//! Weight functions `w` with `w(0) = 0`, their derivatives, and admissibility
//! checks against a base distribution.

use std::fmt;

use serde::Serialize;

use crate::distributions::{parse_call, Distribution};
use crate::error::{Error, Result};
use crate::numerics::{integrate_with, Interval, QuadratureOptions, QuadratureResult};

/// Names accepted by [`make_weight`].
pub const WEIGHT_NAMES: [&str; 8] = [
    "power",
    "scaled_power",
    "log1p_power",
    "neg_log_sq",
    "exp_shift_sq",
    "expm1",
    "neg_x_log1m",
    "linear",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    /// `x^c`
    Power { c: f64 },
    /// `(x/β)^α`
    ScaledPower { alpha: f64, beta: f64 },
    /// `log(1 + x^c)`
    Log1pPower { c: f64 },
    /// `-log(1 - x²)` on `[0, 1)`
    NegLogSq,
    /// `e^{(x+1)²} - e`
    ExpShiftSq,
    /// `e^x - 1`
    Expm1,
    /// `-x - log(1 - x)` on `[0, 1)`
    NegXLog1m,
    /// `x`
    Linear,
}

/// An increasing weight with analytic first and log-second derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightFunction {
    kind: WeightKind,
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params().iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}({})", self.name(), params.join(","))
    }
}

/// Build a weight from its name and named parameters.
pub fn make_weight(name: &str, params: &[(&str, f64)]) -> Result<WeightFunction> {
    let get = |key: &str| -> Result<f64> {
        let v = params
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::Domain(format!("weight {name} requires parameter '{key}'")))?;
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(format!("weight {name} requires {key} > 0, got {v}")));
        }
        Ok(v)
    };
    let kind = match name {
        "power" => WeightKind::Power { c: get("c")? },
        "scaled_power" => WeightKind::ScaledPower { alpha: get("alpha")?, beta: get("beta")? },
        "log1p_power" => WeightKind::Log1pPower { c: get("c")? },
        "neg_log_sq" => WeightKind::NegLogSq,
        "exp_shift_sq" => WeightKind::ExpShiftSq,
        "expm1" => WeightKind::Expm1,
        "neg_x_log1m" => WeightKind::NegXLog1m,
        "linear" => WeightKind::Linear,
        other => return Err(Error::Domain(format!("unknown weight '{other}'"))),
    };
    let w = WeightFunction { kind };
    let known: Vec<&str> = w.params().iter().map(|(k, _)| *k).collect();
    if let Some((k, _)) = params.iter().find(|(k, _)| !known.contains(k)) {
        return Err(Error::Domain(format!("weight {name} has no parameter '{k}'")));
    }
    Ok(w)
}

/// Parse a weight spec such as `"power(c=2)"`.
pub fn parse_weight(text: &str) -> Result<WeightFunction> {
    let call = parse_call(text)?;
    make_weight(&call.name, &call.param_refs())
}

impl WeightFunction {
    pub fn linear() -> Self {
        Self { kind: WeightKind::Linear }
    }

    pub fn power(c: f64) -> Result<Self> {
        make_weight("power", &[("c", c)])
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            WeightKind::Power { .. } => "power",
            WeightKind::ScaledPower { .. } => "scaled_power",
            WeightKind::Log1pPower { .. } => "log1p_power",
            WeightKind::NegLogSq => "neg_log_sq",
            WeightKind::ExpShiftSq => "exp_shift_sq",
            WeightKind::Expm1 => "expm1",
            WeightKind::NegXLog1m => "neg_x_log1m",
            WeightKind::Linear => "linear",
        }
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match self.kind {
            WeightKind::Power { c } | WeightKind::Log1pPower { c } => vec![("c", c)],
            WeightKind::ScaledPower { alpha, beta } => vec![("alpha", alpha), ("beta", beta)],
            _ => Vec::new(),
        }
    }

    /// Where `w` is defined: `[0, 1)` for the two logarithmic weights, `[0, ∞)` otherwise.
    pub fn domain_hint(&self) -> Interval {
        match self.kind {
            WeightKind::NegLogSq | WeightKind::NegXLog1m => Interval::new(0.0, 1.0),
            _ => Interval::new(0.0, f64::INFINITY),
        }
    }

    pub fn w(&self, x: f64) -> f64 {
        match self.kind {
            WeightKind::Power { c } => x.powf(c),
            WeightKind::ScaledPower { alpha, beta } => (x / beta).powf(alpha),
            WeightKind::Log1pPower { c } => x.powf(c).ln_1p(),
            WeightKind::NegLogSq => -(-x * x).ln_1p(),
            WeightKind::ExpShiftSq => {
                // e^{(x+1)²} - e = e (e^{x² + 2x} - 1)
                std::f64::consts::E * (x * x + 2.0 * x).exp_m1()
            }
            WeightKind::Expm1 => x.exp_m1(),
            WeightKind::NegXLog1m => -x - (-x).ln_1p(),
            WeightKind::Linear => x,
        }
    }

    pub fn w_prime(&self, x: f64) -> f64 {
        match self.kind {
            WeightKind::Linear => 1.0,
            WeightKind::Expm1 => x.exp(),
            _ => self.ln_w_prime(x).exp(),
        }
    }

    /// `log w'(x)`, finite where `w'` would overflow.
    pub fn ln_w_prime(&self, x: f64) -> f64 {
        match self.kind {
            WeightKind::Power { c } => c.ln() + (c - 1.0) * x.ln(),
            WeightKind::ScaledPower { alpha, beta } => (alpha / beta).ln() + (alpha - 1.0) * (x / beta).ln(),
            WeightKind::Log1pPower { c } => c.ln() + (c - 1.0) * x.ln() - x.powf(c).ln_1p(),
            WeightKind::NegLogSq => (2.0 * x).ln() - (-x * x).ln_1p(),
            WeightKind::ExpShiftSq => 2f64.ln() + (x + 1.0).ln() + (x + 1.0) * (x + 1.0),
            WeightKind::Expm1 => x,
            WeightKind::NegXLog1m => x.ln() - (-x).ln_1p(),
            WeightKind::Linear => 0.0,
        }
    }

    /// `d/dx log w'(x) = w''(x)/w'(x)`.
    pub fn ln_w_prime_derivative(&self, x: f64) -> f64 {
        match self.kind {
            WeightKind::Power { c } | WeightKind::ScaledPower { alpha: c, .. } => (c - 1.0) / x,
            WeightKind::Log1pPower { c } => (c - 1.0) / x - c * x.powf(c - 1.0) / (1.0 + x.powf(c)),
            WeightKind::NegLogSq => 1.0 / x + 2.0 * x / (1.0 - x * x),
            WeightKind::ExpShiftSq => 1.0 / (x + 1.0) + 2.0 * (x + 1.0),
            WeightKind::Expm1 => 1.0,
            WeightKind::NegXLog1m => 1.0 / x + 1.0 / (1.0 - x),
            WeightKind::Linear => 0.0,
        }
    }

    /// `w''(x)`.
    pub fn w_double_prime(&self, x: f64) -> f64 {
        match self.kind {
            WeightKind::Linear => 0.0,
            _ => self.w_prime(x) * self.ln_w_prime_derivative(x),
        }
    }

    /// Effective interval on which a WTRV of `dist` under this weight lives.
    pub fn effective_support(&self, dist: &dyn Distribution) -> Interval {
        let s = dist.support();
        let d = self.domain_hint();
        Interval::new(s.lo.max(d.lo), s.hi.min(d.hi))
    }
}

/// Flags from [`validate_weight`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightValidity {
    pub starts_at_zero: bool,
    pub nondecreasing_on_grid: bool,
    pub integrability_ok: bool,
    /// `∫ w'·sf` when it converged.
    pub expected_weight: Option<f64>,
    pub note: Option<String>,
}

impl WeightValidity {
    pub fn is_valid(&self) -> bool {
        self.starts_at_zero && self.nondecreasing_on_grid && self.integrability_ok
    }
}

/// `∫ w'(x) sf(x) dx` over the support of `dist`.
pub(crate) fn tail_integral(
    dist: &dyn Distribution,
    w: &WeightFunction,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult> {
    let support = dist.support();
    let integrand = |x: f64| {
        let sf = dist.sf(x);
        if sf <= 0.0 {
            0.0
        } else {
            (w.ln_w_prime(x) + sf.ln()).exp()
        }
    };
    integrate_with(integrand, support, opts)
}

fn evaluation_grid(dist: &dyn Distribution, n: usize) -> Vec<f64> {
    let s = dist.support();
    if s.is_bounded() {
        (1..=n).map(|i| s.lo + (s.hi - s.lo) * i as f64 / (n + 1) as f64).collect()
    } else {
        (0..n)
            .map(|i| dist.quantile(0.005 + 0.99 * i as f64 / (n - 1) as f64))
            .collect()
    }
}

/// Check `w(0) = 0`, monotonicity on a 256-point grid, and finiteness of
/// `E[w(X)] = ∫ w'·sf`.
pub fn validate_weight(w: &WeightFunction, dist: &dyn Distribution) -> Result<WeightValidity> {
    let support = dist.support();
    if support.lo != 0.0 {
        return Err(Error::Domain(format!(
            "weights need a base distribution with lower bound 0, {} starts at {}",
            dist.label(),
            support.lo
        )));
    }
    let domain = w.domain_hint();
    if support.hi > domain.hi {
        return Err(Error::Evaluation(format!(
            "weight {w} is undefined beyond {} but {} extends to {}",
            domain.hi,
            dist.label(),
            support.hi
        )));
    }
    let starts_at_zero = w.w(0.0).abs() <= 1e-12;
    let grid = evaluation_grid(dist, 256);
    let mut values = Vec::with_capacity(grid.len());
    for &x in &grid {
        let (v, d) = (w.w(x), w.w_prime(x));
        if v.is_nan() || d.is_nan() {
            return Err(Error::Evaluation(format!("weight {w} is NaN at {x}")));
        }
        values.push((v, d));
    }
    let nondecreasing_on_grid = values.iter().all(|(_, d)| *d >= 0.0)
        && values
            .windows(2)
            .all(|p| p[1].0 >= p[0].0 - 1e-12 * (1.0 + p[0].0.abs()));

    let opts = QuadratureOptions { abs_tol: 1e-10, rel_tol: 1e-10, max_subdivisions: 2000 };
    let (integrability_ok, expected_weight, note) = match tail_integral(dist, w, &opts) {
        Ok(r) if r.value.is_finite() => (true, Some(r.value), None),
        Ok(r) => (false, None, Some(format!("tail integral evaluated to {}", r.value))),
        Err(Error::Accuracy { estimate, .. }) => (
            false,
            None,
            Some(format!("tail integral did not settle (last estimate {estimate:e})")),
        ),
        Err(Error::NonFiniteIntegrand { x }) => (
            false,
            None,
            Some(format!("w'·sf overflows at x = {x:e}")),
        ),
        Err(e) => return Err(e),
    };
    Ok(WeightValidity {
        starts_at_zero,
        nondecreasing_on_grid,
        integrability_ok,
        expected_weight,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::make_catalog;
    use approx::assert_relative_eq;

    fn all_weights() -> Vec<WeightFunction> {
        vec![
            make_weight("power", &[("c", 2.0)]).unwrap(),
            make_weight("power", &[("c", 0.5)]).unwrap(),
            make_weight("scaled_power", &[("alpha", 1.7), ("beta", 2.0)]).unwrap(),
            make_weight("log1p_power", &[("c", 2.5)]).unwrap(),
            make_weight("neg_log_sq", &[]).unwrap(),
            make_weight("exp_shift_sq", &[]).unwrap(),
            make_weight("expm1", &[]).unwrap(),
            make_weight("neg_x_log1m", &[]).unwrap(),
            WeightFunction::linear(),
        ]
    }

    #[test]
    fn power_two_values() {
        let w = WeightFunction::power(2.0).unwrap();
        assert_eq!(w.w(0.5), 0.25);
        assert_relative_eq!(w.w_prime(0.5), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn neg_log_sq_derivative() {
        let w = parse_weight("neg_log_sq").unwrap();
        for &x in &[0.1, 0.5, 0.9] {
            assert_relative_eq!(w.w_prime(x), 2.0 * x / (1.0 - x * x), max_relative = 1e-14);
        }
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        for w in all_weights() {
            assert!(w.w(0.0).abs() <= 1e-12, "{w}");
            let hi = w.domain_hint().hi.min(3.0);
            for i in 1..50 {
                let x = hi * i as f64 / 50.0;
                let h = 1e-6 * x.min(hi - x);
                let numeric = (w.w(x + h) - w.w(x - h)) / (2.0 * h);
                assert_relative_eq!(numeric, w.w_prime(x), max_relative = 1e-5);
                let numeric2 = (w.w_prime(x + h) - w.w_prime(x - h)) / (2.0 * h);
                let analytic2 = w.w_double_prime(x);
                assert!((numeric2 - analytic2).abs() <= 1e-5 * (1.0 + analytic2.abs()), "{w} at {x}");
            }
        }
    }

    #[test]
    fn validation_examples() {
        let exp1 = make_catalog("exponential", &[("lambda", 1.0)]).unwrap();
        let v = validate_weight(&WeightFunction::linear(), exp1.as_ref()).unwrap();
        assert!(v.is_valid());
        assert_relative_eq!(v.expected_weight.unwrap(), 1.0, max_relative = 1e-9);

        let lomax = make_catalog("pareto_lomax", &[("alpha", 1.0)]).unwrap();
        let v = validate_weight(&WeightFunction::power(2.0).unwrap(), lomax.as_ref()).unwrap();
        assert!(v.starts_at_zero && v.nondecreasing_on_grid);
        assert!(!v.integrability_ok);

        let kw = make_catalog("kumaraswamy", &[("a", 2.0), ("b", 3.0)]).unwrap();
        let v = validate_weight(&WeightFunction::power(0.5).unwrap(), kw.as_ref()).unwrap();
        assert!(v.is_valid());
    }

    #[test]
    fn domain_mismatch_is_an_evaluation_error() {
        let exp1 = make_catalog("exponential", &[("lambda", 1.0)]).unwrap();
        let w = parse_weight("neg_log_sq").unwrap();
        assert!(matches!(validate_weight(&w, exp1.as_ref()), Err(Error::Evaluation(_))));
    }

    #[test]
    fn unknown_weight() {
        assert!(matches!(make_weight("cubic", &[]), Err(Error::Domain(_))));
        assert!(matches!(make_weight("power", &[("c", -1.0)]), Err(Error::Domain(_))));
    }
}
