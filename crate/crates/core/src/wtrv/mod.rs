//! Construction of weighted tail random variables.
//!
//! [`construct`] computes the normalizer `E[w(X)] = ∫ w'·F̄` and tabulates the
//! cumulative mass of `w'·F̄` on an adaptive Gauss–Kronrod partition of the
//! support. The cdf and sf at an arbitrary point combine the tabulated
//! prefix (or suffix) mass with one small quadrature inside the containing
//! cell, so both tails keep full relative precision.

mod minimum;
mod table1;

use std::sync::Arc;

use crate::distributions::{Distribution, DistributionHandle, Family};
use crate::error::{Error, Result};
use crate::numerics::{
    brent_root_xtol, integrate_partition, integrate_with, Interval, QuadratureOptions, Segment,
};
use crate::weights::{tail_integral, validate_weight, WeightFunction};

pub use minimum::{wtrv_of_minimum, MinimumComposition, MinimumDistribution};
pub use table1::{table1_oracle_suite, Table1Row};

/// Minimum number of cells in the cdf table.
pub const MIN_TABLE_NODES: usize = 512;

/// `E[w(X)] = ∫_0^{u_X} w'(x) F̄(x) dx`.
///
/// Fails with an integrability error when the quadrature cannot certify an
/// absolute error of `1e-9·(1 + value)`.
pub fn expected_weight(dist: &dyn Distribution, w: &WeightFunction) -> Result<f64> {
    if dist.support().lo != 0.0 {
        return Err(Error::Domain(format!(
            "{} does not start at 0",
            dist.label()
        )));
    }
    let opts = QuadratureOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-11,
        max_subdivisions: 4000,
    };
    match tail_integral(dist, w, &opts) {
        Ok(r) if r.value.is_finite() && r.abs_error_estimate <= 1e-9 * (1.0 + r.value.abs()) => {
            Ok(r.value)
        }
        Ok(r) => Err(Error::Integrability(format!(
            "E[w(X)] for {} and {w} has error estimate {:e} on {:e}",
            dist.label(),
            r.abs_error_estimate,
            r.value
        ))),
        Err(Error::Accuracy { estimate, abs_error, .. }) => Err(Error::Integrability(format!(
            "E[w(X)] for {} and {w} did not converge (estimate {estimate:e} ± {abs_error:e})",
            dist.label()
        ))),
        Err(Error::NonFiniteIntegrand { x }) => Err(Error::Integrability(format!(
            "w'·sf for {} and {w} is not finite at x = {x:e}",
            dist.label()
        ))),
        Err(e) => Err(e),
    }
}

/// Beyond this `x`, table cells are integrated in `x` rather than `t`.
const FAR_X: f64 = 1e4;

/// Coordinate map used for tabulation: identity on bounded supports,
/// `t = x/(1+x)` on `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Coordinate {
    Identity,
    Compact,
}

impl Coordinate {
    fn to_x(self, t: f64) -> f64 {
        match self {
            Coordinate::Identity => t,
            Coordinate::Compact => {
                if t >= 1.0 {
                    f64::INFINITY
                } else {
                    t / (1.0 - t)
                }
            }
        }
    }
}

/// The distribution of `X_w`.
#[derive(Debug, Clone)]
pub struct WtrvDistribution {
    base: DistributionHandle,
    weight: WeightFunction,
    normalizer: f64,
    ln_normalizer: f64,
    support: Interval,
    /// Cell boundaries in `x`; the last may be `+∞`.
    nodes: Vec<f64>,
    /// Normalized mass left of each node.
    prefix: Vec<f64>,
    /// Normalized mass right of each node.
    suffix: Vec<f64>,
}

fn unnormalized(base: &dyn Distribution, w: &WeightFunction, x: f64) -> f64 {
    let sf = base.sf(x);
    if sf <= 0.0 {
        0.0
    } else {
        (w.ln_w_prime(x) + sf.ln()).exp()
    }
}

fn refine(
    segments: &mut Vec<Segment>,
    f: &dyn Fn(f64) -> f64,
    min_cells: usize,
) -> Result<()> {
    while segments.len() < min_cells {
        // split the heaviest cell
        let (idx, _) = segments
            .iter()
            .enumerate()
            .max_by(|a, b| (a.1.value.abs()).total_cmp(&b.1.value.abs()))
            .expect("non-empty partition");
        let s = segments[idx];
        let mid = 0.5 * (s.a + s.b);
        let opts = QuadratureOptions { abs_tol: 0.0, rel_tol: 1e-14, max_subdivisions: 64 };
        let left = integral_or_estimate(integrate_partition(f, s.a, mid, &opts).map(|r| r.0))?;
        let right = integral_or_estimate(integrate_partition(f, mid, s.b, &opts).map(|r| r.0))?;
        segments[idx] = Segment { a: s.a, b: mid, value: left, error: 0.0 };
        segments.insert(idx + 1, Segment { a: mid, b: s.b, value: right, error: 0.0 });
    }
    Ok(())
}

fn integral_or_estimate(r: Result<crate::numerics::QuadratureResult>) -> Result<f64> {
    match r {
        Ok(r) => Ok(r.value),
        Err(Error::Accuracy { estimate, .. }) => Ok(estimate),
        Err(e) => Err(e),
    }
}

/// Build `X_w` from a base distribution with lower bound 0 and an admissible weight.
pub fn construct(dist: DistributionHandle, w: WeightFunction) -> Result<WtrvDistribution> {
    let validity = validate_weight(&w, dist.as_ref())?;
    if !validity.starts_at_zero {
        return Err(Error::Domain(format!("weight {w} does not vanish at 0")));
    }
    if !validity.nondecreasing_on_grid {
        return Err(Error::Domain(format!("weight {w} is not nondecreasing on {}", dist.label())));
    }
    if !validity.integrability_ok {
        return Err(Error::Integrability(format!(
            "w' of {w} is not integrable against {}: {}",
            dist.label(),
            validity.note.unwrap_or_default()
        )));
    }
    // Certifies the normalizer to the documented accuracy.
    let certified = expected_weight(dist.as_ref(), &w)?;

    let support = w.effective_support(dist.as_ref());
    let coordinate = if support.is_bounded() { Coordinate::Identity } else { Coordinate::Compact };
    let base = dist.clone();
    let g = move |t: f64| -> f64 {
        match coordinate {
            Coordinate::Identity => unnormalized(base.as_ref(), &w, t),
            Coordinate::Compact => {
                let x = t / (1.0 - t);
                let v = unnormalized(base.as_ref(), &w, x);
                if v == 0.0 {
                    0.0
                } else {
                    v / ((1.0 - t) * (1.0 - t))
                }
            }
        }
    };
    let (t_lo, t_hi) = match coordinate {
        Coordinate::Identity => (support.lo, support.hi),
        Coordinate::Compact => (support.lo / (1.0 + support.lo), 1.0),
    };
    // Tightest tolerance first; slowly decaying tails may need a looser one.
    let mut found = None;
    for rel_tol in [1e-13, 1e-11, 1e-9] {
        let opts = QuadratureOptions { abs_tol: 0.0, rel_tol, max_subdivisions: 6000 };
        match integrate_partition(&g, t_lo, t_hi, &opts) {
            Ok(partition) => {
                found = Some(partition);
                break;
            }
            Err(Error::Accuracy { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    let (_, mut segments) = found.ok_or_else(|| {
        Error::Integrability(format!("the distribution table of {} and {w} did not converge", dist.label()))
    })?;
    refine(&mut segments, &g, MIN_TABLE_NODES)?;

    let mut nodes = Vec::with_capacity(segments.len() + 1);
    nodes.push(coordinate.to_x(segments[0].a));
    for s in &segments {
        nodes.push(coordinate.to_x(s.b));
    }
    nodes[0] = support.lo;
    *nodes.last_mut().expect("non-empty") = support.hi;
    if coordinate == Coordinate::Compact {
        // Near t = 1 the map x = t/(1-t) loses relative precision, and t cannot
        // reach past x ~ 1e16 at all. Far cells are redone in x.
        let opts = QuadratureOptions { abs_tol: 1e-15 * certified, rel_tol: 1e-12, max_subdivisions: 4000 };
        let f = |x: f64| unnormalized(dist.as_ref(), &w, x);
        for (i, s) in segments.iter_mut().enumerate() {
            if nodes[i + 1] > FAR_X {
                s.value = integrate_with(f, Interval::new(nodes[i], nodes[i + 1]), &opts)
                    .map_err(|e| Error::Integrability(format!("tail of {} and {w}: {e}", dist.label())))?
                    .value;
            }
        }
    }

    let total: f64 = segments.iter().map(|s| s.value).sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Integrability(format!(
            "E[w(X)] for {} and {w} evaluated to {total}",
            dist.label()
        )));
    }
    if (total - certified).abs() > 1e-9 * certified {
        return Err(Error::Integrability(format!(
            "distribution table of {} and {w} sums to {total:e}, expected {certified:e}",
            dist.label()
        )));
    }
    let mut prefix = vec![0.0; nodes.len()];
    for (i, s) in segments.iter().enumerate() {
        prefix[i + 1] = prefix[i] + s.value / total;
    }
    let mut suffix = vec![0.0; nodes.len()];
    for (i, s) in segments.iter().enumerate().rev() {
        suffix[i] = suffix[i + 1] + s.value / total;
    }
    Ok(WtrvDistribution {
        base: dist,
        weight: w,
        normalizer: total,
        ln_normalizer: total.ln(),
        support,
        nodes,
        prefix,
        suffix,
    })
}

/// The equilibrium distribution: `X_w` with `w(x) = x`, density `F̄/μ`.
pub fn equilibrium(dist: DistributionHandle) -> Result<WtrvDistribution> {
    construct(dist, WeightFunction::linear())
}

/// Weighted Kumaraswamy `WK(a, b, c)` in closed form.
pub fn weighted_kumaraswamy(a: f64, b: f64, c: f64) -> Result<DistributionHandle> {
    Ok(Arc::new(Family::WeightedKumaraswamy { a, b, c }.build()?))
}

impl WtrvDistribution {
    pub fn base(&self) -> &DistributionHandle {
        &self.base
    }

    pub fn weight(&self) -> &WeightFunction {
        &self.weight
    }

    /// `E[w(X)]` as summed over the tabulation.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Cell boundaries of the cdf table.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Tabulated cdf at the nodes; strictly increasing wherever the density is positive.
    pub fn table_cdf(&self) -> &[f64] {
        &self.prefix
    }

    fn cell_of(&self, x: f64) -> usize {
        let idx = self.nodes.partition_point(|n| *n <= x);
        idx.saturating_sub(1).min(self.nodes.len() - 2)
    }

    fn mass(&self, a: f64, b: f64) -> f64 {
        if a >= b {
            return 0.0;
        }
        let f = |x: f64| unnormalized(self.base.as_ref(), &self.weight, x);
        let opts = QuadratureOptions {
            abs_tol: 1e-16 * self.normalizer,
            rel_tol: 1e-13,
            max_subdivisions: 200,
        };
        let raw = match integrate_with(f, Interval::new(a, b), &opts) {
            Ok(r) => r.value,
            Err(Error::Accuracy { estimate, .. }) => estimate,
            Err(_) => f64::NAN,
        };
        raw / self.normalizer
    }

    /// `(cdf, sf)` at `x`; the smaller of the two is computed directly.
    fn cdf_sf(&self, x: f64) -> (f64, f64) {
        if x.is_nan() {
            return (f64::NAN, f64::NAN);
        }
        if x <= self.support.lo {
            return (0.0, 1.0);
        }
        if x >= self.support.hi {
            return (1.0, 0.0);
        }
        let i = self.cell_of(x);
        if self.prefix[i] < 0.5 {
            let cdf = (self.prefix[i] + self.mass(self.nodes[i], x)).clamp(0.0, 1.0);
            (cdf, 1.0 - cdf)
        } else {
            let sf = (self.suffix[i + 1] + self.mass(x, self.nodes[i + 1])).clamp(0.0, 1.0);
            (1.0 - sf, sf)
        }
    }
}

impl Distribution for WtrvDistribution {
    fn name(&self) -> &str {
        "wtrv"
    }

    fn params(&self) -> Vec<(String, f64)> {
        let mut out: Vec<(String, f64)> = self
            .base
            .params()
            .into_iter()
            .map(|(k, v)| (format!("base.{k}"), v))
            .collect();
        out.extend(self.weight.params().into_iter().map(|(k, v)| (format!("weight.{k}"), v)));
        out
    }

    fn support(&self) -> Interval {
        self.support
    }

    fn pdf(&self, x: f64) -> f64 {
        if !(x > self.support.lo && x < self.support.hi) {
            return 0.0;
        }
        self.ln_pdf(x).exp()
    }

    fn ln_pdf(&self, x: f64) -> f64 {
        if !(x > self.support.lo && x < self.support.hi) {
            return f64::NEG_INFINITY;
        }
        self.weight.ln_w_prime(x) + self.base.sf(x).ln() - self.ln_normalizer
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
        if u == 0.0 {
            return self.support.lo;
        }
        if u == 1.0 {
            return self.support.hi;
        }
        // cell whose tabulated cdf brackets u
        let mut i = self.prefix.partition_point(|p| *p <= u).saturating_sub(1);
        i = i.min(self.nodes.len() - 2);
        let lo = self.nodes[i];
        let mut hi = self.nodes[i + 1];
        if !hi.is_finite() {
            let mut step = 1.0f64.max(lo);
            hi = lo + step;
            while self.cdf(hi) < u {
                step *= 2.0;
                hi = lo + step;
                if !hi.is_finite() {
                    return f64::INFINITY;
                }
            }
        }
        let root = if u <= 0.5 {
            brent_root_xtol(|x| self.cdf(x) - u, lo, hi, 1e-15, 0.0)
        } else {
            let v = 1.0 - u;
            brent_root_xtol(|x| v - self.sf(x), lo, hi, 1e-15, 0.0)
        };
        root.unwrap_or(f64::NAN)
    }

    fn pdf_log_derivative(&self, x: f64) -> Option<f64> {
        if !(x > self.support.lo && x < self.support.hi) {
            return None;
        }
        let sf = self.base.sf(x);
        if sf <= 0.0 {
            return None;
        }
        let hazard = self.base.pdf(x) / sf;
        Some(self.weight.ln_w_prime_derivative(x) - hazard)
    }

    fn label(&self) -> String {
        format!("wtrv[{}; {}]", self.base.label(), self.weight)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::make_catalog;
    use crate::weights::make_weight;
    use approx::assert_relative_eq;

    fn exp(lambda: f64) -> DistributionHandle {
        make_catalog("exponential", &[("lambda", lambda)]).unwrap()
    }

    #[test]
    fn slowly_decaying_tail_keeps_its_mass() {
        // Lomax(α) with x^c, c close to α: sf of X_w decays like x^{-(α-c)}
        // and a visible share of the mass lies beyond x = 1e16.
        let (alpha, c) = (2.965667560880634, 2.7275055494870224);
        let d = make_catalog("pareto_lomax", &[("alpha", alpha)]).unwrap();
        let xw = construct(d, make_weight("power", &[("c", c)]).unwrap()).unwrap();
        let exact = (crate::numerics::ln_gamma(c + 1.0).unwrap() + crate::numerics::ln_gamma(alpha - c).unwrap()
            - crate::numerics::ln_gamma(alpha).unwrap())
        .exp();
        assert_relative_eq!(xw.normalizer(), exact, max_relative = 1e-9);
        assert_relative_eq!(xw.table_cdf().last().copied().unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn expected_weight_examples() {
        assert_relative_eq!(expected_weight(exp(1.0).as_ref(), &WeightFunction::linear()).unwrap(), 1.0, max_relative = 1e-10);
        let uni = make_catalog("uniform", &[]).unwrap();
        let sq = WeightFunction::power(2.0).unwrap();
        assert_relative_eq!(expected_weight(uni.as_ref(), &sq).unwrap(), 1.0 / 3.0, max_relative = 1e-10);
        let (a, b, c) = (2.0, 3.0, 1.5);
        let kw = make_catalog("kumaraswamy", &[("a", a), ("b", b)]).unwrap();
        let expected = b * crate::numerics::beta_fn(1.0 + c / a, b).unwrap();
        let got = expected_weight(kw.as_ref(), &WeightFunction::power(c).unwrap()).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-9);
    }

    #[test]
    fn divergent_expected_weight() {
        let lomax = make_catalog("pareto_lomax", &[("alpha", 2.0)]).unwrap();
        let w = make_weight("exp_shift_sq", &[]).unwrap();
        assert!(matches!(expected_weight(lomax.as_ref(), &w), Err(Error::Integrability(_))));
        assert!(matches!(construct(lomax, w), Err(Error::Integrability(_))));
    }

    #[test]
    fn exponential_power_gives_gamma() {
        let xw = construct(exp(2.0), WeightFunction::power(3.0).unwrap()).unwrap();
        let gamma = make_catalog("gamma", &[("k", 3.0), ("lambda", 2.0)]).unwrap();
        for i in 1..200 {
            let x = i as f64 * 0.03;
            assert!((xw.pdf(x) - gamma.pdf(x)).abs() < 1e-10);
            assert!((xw.cdf(x) - gamma.cdf(x)).abs() < 1e-12, "cdf at {x}");
            assert!((xw.sf(x) - gamma.sf(x)).abs() <= 1e-11 * gamma.sf(x).max(1e-300) + 1e-300, "sf at {x}");
        }
        assert!(xw.nodes().len() > MIN_TABLE_NODES);
        // strictly increasing wherever the remaining mass is representable
        let (cdf, sf) = (xw.table_cdf(), &xw.suffix);
        for i in 0..cdf.len() - 1 {
            assert!(cdf[i + 1] >= cdf[i]);
            assert!(cdf[i + 1] > cdf[i] || sf[i + 1] < sf[i] || sf[i] == 0.0, "node {i}");
        }
    }

    #[test]
    fn equilibrium_cases() {
        let e = equilibrium(exp(1.7)).unwrap();
        for &x in &[0.1, 1.0, 3.0] {
            assert_relative_eq!(e.pdf(x), 1.7 * (-1.7 * x).exp(), max_relative = 1e-10);
        }
        let u = equilibrium(make_catalog("uniform", &[]).unwrap()).unwrap();
        assert_relative_eq!(u.pdf(0.25), 1.5, max_relative = 1e-10);
        let g = equilibrium(make_catalog("gamma", &[("k", 2.0), ("lambda", 1.0)]).unwrap()).unwrap();
        for &x in &[0.2, 1.0, 4.0] {
            assert_relative_eq!(g.pdf(x), (1.0 + x) * (-x).exp() / 2.0, max_relative = 1e-10);
        }
        let cauchy_like = make_catalog("pareto_lomax", &[("alpha", 1.0)]).unwrap();
        assert!(matches!(equilibrium(cauchy_like), Err(Error::Integrability(_))));
    }

    #[test]
    fn quantile_round_trip() {
        let xw = construct(
            make_catalog("kumaraswamy", &[("a", 2.0), ("b", 3.0)]).unwrap(),
            WeightFunction::power(0.5).unwrap(),
        )
        .unwrap();
        for i in 1..1000 {
            let u = i as f64 / 1000.0;
            assert!((xw.cdf(xw.quantile(u)) - u).abs() <= 1e-7);
        }
    }

    #[test]
    fn closed_form_weighted_kumaraswamy_agrees() {
        let wk = weighted_kumaraswamy(2.0, 3.0, 1.5).unwrap();
        let xw = construct(
            make_catalog("kumaraswamy", &[("a", 2.0), ("b", 3.0)]).unwrap(),
            WeightFunction::power(1.5).unwrap(),
        )
        .unwrap();
        for i in 1..100 {
            let x = i as f64 / 100.0;
            assert!((wk.pdf(x) - xw.pdf(x)).abs() < 1e-10);
            assert!((wk.sf(x) - xw.sf(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_log_derivative() {
        let xw = construct(exp(1.0), WeightFunction::power(2.5).unwrap()).unwrap();
        for &x in &[0.3, 1.0, 2.5] {
            let h = 1e-5;
            let numeric = (xw.ln_pdf(x + h) - xw.ln_pdf(x - h)) / (2.0 * h);
            assert!((numeric - xw.pdf_log_derivative(x).unwrap()).abs() < 1e-7);
        }
    }
}
