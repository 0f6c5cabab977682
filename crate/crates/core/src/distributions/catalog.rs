//! Parametric families used as construction inputs and comparison targets.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{
    beta_inc_reg_unchecked, erf, erfc, gamma_inc_reg_unchecked, ln_beta_unchecked,
    ln_gamma_unchecked, Interval,
};

use super::{invert_cdf, Distribution, DistributionHandle};

/// Names accepted by [`make_catalog`].
pub const CATALOG_NAMES: [&str; 14] = [
    "exponential",
    "gamma",
    "weibull",
    "rayleigh",
    "half_normal",
    "generalized_gamma",
    "burr12",
    "pareto_lomax",
    "uniform",
    "beta",
    "kumaraswamy",
    "weighted_kumaraswamy",
    "chi_square",
    "truncated_power",
];

/// A catalog family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Rate `lambda`: sf `e^{-λx}`.
    Exponential { lambda: f64 },
    /// Shape `k`, rate `lambda`.
    Gamma { k: f64, lambda: f64 },
    /// Shape `alpha`, scale `beta`: sf `e^{-(x/β)^α}`.
    Weibull { alpha: f64, beta: f64 },
    Rayleigh { sigma: f64 },
    HalfNormal { sigma: f64 },
    /// pdf `p x^{d-1} e^{-(x/a)^p} / (a^d Γ(d/p))`.
    GeneralizedGamma { p: f64, a: f64, d: f64 },
    /// sf `(1 + x^c)^{-k}`.
    Burr12 { c: f64, k: f64 },
    /// sf `(1 + x)^{-α}` (Pareto type II with unit scale).
    ParetoLomax { alpha: f64 },
    /// Uniform on `(0, b)`.
    Uniform { b: f64 },
    Beta { alpha: f64, beta: f64 },
    /// cdf `1 - (1 - x^a)^b`.
    Kumaraswamy { a: f64, b: f64 },
    /// pdf `c x^{c-1} (1 - x^a)^b / (b B(1 + c/a, b))`.
    WeightedKumaraswamy { a: f64, b: f64, c: f64 },
    ChiSquare { k: f64 },
    /// sf `(1 - x)^{β-1}` on `(0, 1)`, `β > 1`.
    TruncatedPower { beta: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Exponential { .. } => "exponential",
            Family::Gamma { .. } => "gamma",
            Family::Weibull { .. } => "weibull",
            Family::Rayleigh { .. } => "rayleigh",
            Family::HalfNormal { .. } => "half_normal",
            Family::GeneralizedGamma { .. } => "generalized_gamma",
            Family::Burr12 { .. } => "burr12",
            Family::ParetoLomax { .. } => "pareto_lomax",
            Family::Uniform { .. } => "uniform",
            Family::Beta { .. } => "beta",
            Family::Kumaraswamy { .. } => "kumaraswamy",
            Family::WeightedKumaraswamy { .. } => "weighted_kumaraswamy",
            Family::ChiSquare { .. } => "chi_square",
            Family::TruncatedPower { .. } => "truncated_power",
        }
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Family::Exponential { lambda } => vec![("lambda", lambda)],
            Family::Gamma { k, lambda } => vec![("k", k), ("lambda", lambda)],
            Family::Weibull { alpha, beta } => vec![("alpha", alpha), ("beta", beta)],
            Family::Rayleigh { sigma } | Family::HalfNormal { sigma } => vec![("sigma", sigma)],
            Family::GeneralizedGamma { p, a, d } => vec![("p", p), ("a", a), ("d", d)],
            Family::Burr12 { c, k } => vec![("c", c), ("k", k)],
            Family::ParetoLomax { alpha } => vec![("alpha", alpha)],
            Family::Uniform { b } => vec![("b", b)],
            Family::Beta { alpha, beta } => vec![("alpha", alpha), ("beta", beta)],
            Family::Kumaraswamy { a, b } => vec![("a", a), ("b", b)],
            Family::WeightedKumaraswamy { a, b, c } => vec![("a", a), ("b", b), ("c", c)],
            Family::ChiSquare { k } => vec![("k", k)],
            Family::TruncatedPower { beta } => vec![("beta", beta)],
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = self
            .params()
            .into_iter()
            .find(|(_, v)| !(v.is_finite() && *v > 0.0));
        if let Some((k, v)) = bad {
            return Err(Error::Domain(format!(
                "{} requires {k} > 0 and finite, got {v}",
                self.name()
            )));
        }
        if let Family::TruncatedPower { beta } = self {
            if *beta <= 1.0 {
                return Err(Error::Domain(format!(
                    "truncated_power requires beta > 1, got {beta}"
                )));
            }
        }
        Ok(())
    }

    /// Validated distribution object.
    pub fn build(self) -> Result<CatalogDistribution> {
        self.validate()?;
        Ok(CatalogDistribution { family: self })
    }
}

/// A validated member of a catalog family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatalogDistribution {
    family: Family,
}

fn lookup(name: &str, params: &[(&str, f64)], key: &str, default: Option<f64>) -> Result<f64> {
    match params.iter().find(|(k, _)| *k == key) {
        Some((_, v)) => Ok(*v),
        None => default.ok_or_else(|| Error::Domain(format!("{name} requires parameter '{key}'"))),
    }
}

/// Build a catalog distribution from its name and named parameters.
pub fn make_catalog(name: &str, params: &[(&str, f64)]) -> Result<DistributionHandle> {
    let get = |key: &str| lookup(name, params, key, None);
    let family = match name {
        "exponential" => Family::Exponential { lambda: get("lambda")? },
        "gamma" => Family::Gamma { k: get("k")?, lambda: get("lambda")? },
        "weibull" => Family::Weibull { alpha: get("alpha")?, beta: get("beta")? },
        "rayleigh" => Family::Rayleigh { sigma: get("sigma")? },
        "half_normal" => Family::HalfNormal { sigma: get("sigma")? },
        "generalized_gamma" => Family::GeneralizedGamma { p: get("p")?, a: get("a")?, d: get("d")? },
        "burr12" => Family::Burr12 { c: get("c")?, k: get("k")? },
        "pareto_lomax" => Family::ParetoLomax { alpha: get("alpha")? },
        "uniform" => Family::Uniform { b: lookup(name, params, "b", Some(1.0))? },
        "beta" => Family::Beta { alpha: get("alpha")?, beta: get("beta")? },
        "kumaraswamy" => Family::Kumaraswamy { a: get("a")?, b: get("b")? },
        "weighted_kumaraswamy" => Family::WeightedKumaraswamy { a: get("a")?, b: get("b")?, c: get("c")? },
        "chi_square" => Family::ChiSquare { k: get("k")? },
        "truncated_power" => Family::TruncatedPower { beta: get("beta")? },
        other => return Err(Error::Catalog(format!("unknown distribution '{other}'"))),
    };
    let known: Vec<&str> = family.params().iter().map(|(k, _)| *k).collect();
    if let Some((k, _)) = params.iter().find(|(k, _)| !known.contains(k)) {
        return Err(Error::Domain(format!("{name} has no parameter '{k}'")));
    }
    Ok(Arc::new(family.build()?))
}

/// `E[X^n] = b B(1 + n/a, b)` for Kumaraswamy(a, b).
pub fn kumaraswamy_raw_moment(a: f64, b: f64, n: f64) -> f64 {
    b * ln_beta_unchecked(1.0 + n / a, b).exp()
}

/// `E[X^n] = c B((c+n)/a, b+1) / (a b B(1 + c/a, b))` for WK(a, b, c).
pub fn weighted_kumaraswamy_raw_moment(a: f64, b: f64, c: f64, n: f64) -> f64 {
    c / (a * b) * (ln_beta_unchecked((c + n) / a, b + 1.0) - ln_beta_unchecked(1.0 + c / a, b)).exp()
}

impl CatalogDistribution {
    pub fn family(&self) -> Family {
        self.family
    }

    /// Closed-form raw moment `E[X^n]` for the bounded families that have one.
    pub fn raw_moment(&self, n: f64) -> Option<f64> {
        match self.family {
            Family::Kumaraswamy { a, b } => Some(kumaraswamy_raw_moment(a, b, n)),
            Family::WeightedKumaraswamy { a, b, c } => Some(weighted_kumaraswamy_raw_moment(a, b, c, n)),
            Family::Beta { alpha, beta } => {
                Some((ln_beta_unchecked(alpha + n, beta) - ln_beta_unchecked(alpha, beta)).exp())
            }
            Family::Uniform { b } => Some(b.powf(n) / (n + 1.0)),
            _ => None,
        }
    }

    /// `(cdf, sf)` evaluated together where both come from one special function.
    fn cdf_sf(&self, x: f64) -> (f64, f64) {
        let s = self.support();
        if x <= s.lo {
            return (0.0, 1.0);
        }
        if x >= s.hi {
            return (1.0, 0.0);
        }
        match self.family {
            Family::Exponential { lambda } => (-(-lambda * x).exp_m1(), (-lambda * x).exp()),
            Family::Gamma { k, lambda } => gamma_inc_reg_unchecked(k, lambda * x),
            Family::ChiSquare { k } => gamma_inc_reg_unchecked(0.5 * k, 0.5 * x),
            Family::Weibull { alpha, beta } => {
                let h = (x / beta).powf(alpha);
                (-(-h).exp_m1(), (-h).exp())
            }
            Family::Rayleigh { sigma } => {
                let h = x * x / (2.0 * sigma * sigma);
                (-(-h).exp_m1(), (-h).exp())
            }
            Family::HalfNormal { sigma } => {
                let z = x / (sigma * SQRT_2);
                (erf(z), erfc(z))
            }
            Family::GeneralizedGamma { p, a, d } => gamma_inc_reg_unchecked(d / p, (x / a).powf(p)),
            Family::Burr12 { c, k } => {
                let ln_sf = -k * x.powf(c).ln_1p();
                (-ln_sf.exp_m1(), ln_sf.exp())
            }
            Family::ParetoLomax { alpha } => {
                let ln_sf = -alpha * x.ln_1p();
                (-ln_sf.exp_m1(), ln_sf.exp())
            }
            Family::Uniform { b } => (x / b, (b - x) / b),
            Family::Beta { alpha, beta } => beta_inc_reg_unchecked(x, alpha, beta),
            Family::Kumaraswamy { a, b } => {
                let ln_sf = b * (-x.powf(a)).ln_1p();
                (-ln_sf.exp_m1(), ln_sf.exp())
            }
            Family::WeightedKumaraswamy { a, b, c } => beta_inc_reg_unchecked(x.powf(a), c / a, b + 1.0),
            Family::TruncatedPower { beta } => {
                let ln_sf = (beta - 1.0) * (-x).ln_1p();
                (-ln_sf.exp_m1(), ln_sf.exp())
            }
        }
    }
}

impl Distribution for CatalogDistribution {
    fn name(&self) -> &str {
        self.family.name()
    }

    fn params(&self) -> Vec<(String, f64)> {
        self.family
            .params()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }

    fn support(&self) -> Interval {
        match self.family {
            Family::Uniform { b } => Interval::new(0.0, b),
            Family::Beta { .. }
            | Family::Kumaraswamy { .. }
            | Family::WeightedKumaraswamy { .. }
            | Family::TruncatedPower { .. } => Interval::new(0.0, 1.0),
            _ => Interval::new(0.0, f64::INFINITY),
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        let s = self.support();
        if !(x > s.lo && x < s.hi) {
            return 0.0;
        }
        self.ln_pdf(x).exp()
    }

    fn ln_pdf(&self, x: f64) -> f64 {
        let s = self.support();
        if !(x > s.lo && x < s.hi) {
            return f64::NEG_INFINITY;
        }
        match self.family {
            Family::Exponential { lambda } => lambda.ln() - lambda * x,
            Family::Gamma { k, lambda } => {
                k * lambda.ln() + (k - 1.0) * x.ln() - lambda * x - ln_gamma_unchecked(k)
            }
            Family::ChiSquare { k } => {
                let h = 0.5 * k;
                -h * 2f64.ln() + (h - 1.0) * x.ln() - 0.5 * x - ln_gamma_unchecked(h)
            }
            Family::Weibull { alpha, beta } => {
                let z = x / beta;
                (alpha / beta).ln() + (alpha - 1.0) * z.ln() - z.powf(alpha)
            }
            Family::Rayleigh { sigma } => {
                let s2 = sigma * sigma;
                (x / s2).ln() - x * x / (2.0 * s2)
            }
            Family::HalfNormal { sigma } => {
                0.5 * (2.0 / PI).ln() - sigma.ln() - x * x / (2.0 * sigma * sigma)
            }
            Family::GeneralizedGamma { p, a, d } => {
                p.ln() + (d - 1.0) * x.ln() - (x / a).powf(p) - d * a.ln() - ln_gamma_unchecked(d / p)
            }
            Family::Burr12 { c, k } => {
                (c * k).ln() + (c - 1.0) * x.ln() - (k + 1.0) * x.powf(c).ln_1p()
            }
            Family::ParetoLomax { alpha } => alpha.ln() - (alpha + 1.0) * x.ln_1p(),
            Family::Uniform { b } => -b.ln(),
            Family::Beta { alpha, beta } => {
                (alpha - 1.0) * x.ln() + (beta - 1.0) * (-x).ln_1p() - ln_beta_unchecked(alpha, beta)
            }
            Family::Kumaraswamy { a, b } => {
                (a * b).ln() + (a - 1.0) * x.ln() + (b - 1.0) * (-x.powf(a)).ln_1p()
            }
            Family::WeightedKumaraswamy { a, b, c } => {
                c.ln() + (c - 1.0) * x.ln() + b * (-x.powf(a)).ln_1p()
                    - b.ln()
                    - ln_beta_unchecked(1.0 + c / a, b)
            }
            Family::TruncatedPower { beta } => (beta - 1.0).ln() + (beta - 2.0) * (-x).ln_1p(),
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        self.cdf_sf(x).0
    }

    fn sf(&self, x: f64) -> f64 {
        self.cdf_sf(x).1
    }

    fn quantile(&self, u: f64) -> f64 {
        if !(0.0..=1.0).contains(&u) {
            return f64::NAN;
        }
        // -log(1 - u), accurate for small u
        let tail = -(-u).ln_1p();
        match self.family {
            Family::Exponential { lambda } => tail / lambda,
            Family::Weibull { alpha, beta } => beta * tail.powf(1.0 / alpha),
            Family::Rayleigh { sigma } => sigma * (2.0 * tail).sqrt(),
            Family::Burr12 { c, k } => (tail / k).exp_m1().powf(1.0 / c),
            Family::ParetoLomax { alpha } => (tail / alpha).exp_m1(),
            Family::Uniform { b } => u * b,
            Family::Kumaraswamy { a, b } => (-(-tail / b).exp_m1()).powf(1.0 / a),
            Family::TruncatedPower { beta } => -(-tail / (beta - 1.0)).exp_m1(),
            _ => invert_cdf(self, u),
        }
    }

    fn pdf_log_derivative(&self, x: f64) -> Option<f64> {
        let s = self.support();
        if !(x > s.lo && x < s.hi) {
            return None;
        }
        let v = match self.family {
            Family::Exponential { lambda } => -lambda,
            Family::Gamma { k, lambda } => (k - 1.0) / x - lambda,
            Family::ChiSquare { k } => (0.5 * k - 1.0) / x - 0.5,
            Family::Weibull { alpha, beta } => {
                (alpha - 1.0) / x - alpha / beta * (x / beta).powf(alpha - 1.0)
            }
            Family::Rayleigh { sigma } => 1.0 / x - x / (sigma * sigma),
            Family::HalfNormal { sigma } => -x / (sigma * sigma),
            Family::GeneralizedGamma { p, a, d } => (d - 1.0) / x - p / a * (x / a).powf(p - 1.0),
            Family::Burr12 { c, k } => {
                (c - 1.0) / x - (k + 1.0) * c * x.powf(c - 1.0) / (1.0 + x.powf(c))
            }
            Family::ParetoLomax { alpha } => -(alpha + 1.0) / (1.0 + x),
            Family::Uniform { .. } => 0.0,
            Family::Beta { alpha, beta } => (alpha - 1.0) / x - (beta - 1.0) / (1.0 - x),
            Family::Kumaraswamy { a, b } => {
                (a - 1.0) / x - (b - 1.0) * a * x.powf(a - 1.0) / (1.0 - x.powf(a))
            }
            Family::WeightedKumaraswamy { a, b, c } => {
                (c - 1.0) / x - b * a * x.powf(a - 1.0) / (1.0 - x.powf(a))
            }
            Family::TruncatedPower { beta } => -(beta - 2.0) / (1.0 - x),
        };
        Some(v)
    }
}
