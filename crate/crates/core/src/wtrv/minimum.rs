//! Minimum of independent lifetimes and its weighted counterpart.

use std::sync::Arc;

use crate::distributions::{Distribution, DistributionHandle};
use crate::error::{Error, Result};
use crate::numerics::Interval;
use crate::weights::WeightFunction;

use super::{construct, WtrvDistribution};

/// `min(X_1, ..., X_n)` for independent components: `F̄ = Π F̄_i`.
#[derive(Debug, Clone)]
pub struct MinimumDistribution {
    components: Vec<DistributionHandle>,
    support: Interval,
}

impl MinimumDistribution {
    pub fn new(components: Vec<DistributionHandle>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::Domain("a minimum needs at least two components".into()));
        }
        let support = components[0].support();
        if components.iter().any(|c| c.support() != support) {
            return Err(Error::Domain(
                "minimum components must share one support".into(),
            ));
        }
        Ok(Self { components, support })
    }

    pub fn components(&self) -> &[DistributionHandle] {
        &self.components
    }

    fn ln_sf(&self, x: f64) -> f64 {
        self.components.iter().map(|c| c.sf(x).ln()).sum()
    }
}

impl Distribution for MinimumDistribution {
    fn name(&self) -> &str {
        "minimum"
    }

    fn params(&self) -> Vec<(String, f64)> {
        self.components
            .iter()
            .enumerate()
            .flat_map(|(i, c)| {
                c.params()
                    .into_iter()
                    .map(move |(k, v)| (format!("{i}.{k}"), v))
            })
            .collect()
    }

    fn support(&self) -> Interval {
        self.support
    }

    fn pdf(&self, x: f64) -> f64 {
        if !self.support.contains(x) {
            return 0.0;
        }
        // f = F̄ Σ r_i
        let sf = self.sf(x);
        if sf == 0.0 {
            return 0.0;
        }
        let hazard: f64 = self.components.iter().map(|c| c.pdf(x) / c.sf(x)).sum();
        sf * hazard
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= self.support.lo {
            return 0.0;
        }
        if x >= self.support.hi {
            return 1.0;
        }
        -self.ln_sf(x).exp_m1()
    }

    fn sf(&self, x: f64) -> f64 {
        if x <= self.support.lo {
            return 1.0;
        }
        if x >= self.support.hi {
            return 0.0;
        }
        self.ln_sf(x).exp()
    }

    fn label(&self) -> String {
        let parts: Vec<String> = self.components.iter().map(|c| c.label()).collect();
        format!("min[{}]", parts.join(", "))
    }
}

/// Both sides of the minimum comparison: `(X_1 ∧ … ∧ X_n)_w` and
/// `X_{1,w} ∧ … ∧ X_{n,w}`.
#[derive(Debug, Clone)]
pub struct MinimumComposition {
    pub of_minimum: WtrvDistribution,
    pub minimum_of_wtrvs: MinimumDistribution,
}

pub fn wtrv_of_minimum(dists: &[DistributionHandle], w: WeightFunction) -> Result<MinimumComposition> {
    let minimum = MinimumDistribution::new(dists.to_vec())?;
    let of_minimum = construct(Arc::new(minimum), w)?;
    let weighted = dists
        .iter()
        .map(|d| construct(d.clone(), w).map(|x| Arc::new(x) as DistributionHandle))
        .collect::<Result<Vec<_>>>()?;
    let minimum_of_wtrvs = MinimumDistribution::new(weighted)?;
    Ok(MinimumComposition { of_minimum, minimum_of_wtrvs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::make_catalog;
    use approx::assert_relative_eq;

    fn exp(lambda: f64) -> DistributionHandle {
        make_catalog("exponential", &[("lambda", lambda)]).unwrap()
    }

    #[test]
    fn exponential_minimums() {
        let m = wtrv_of_minimum(&[exp(1.0), exp(1.0)], WeightFunction::linear()).unwrap();
        for &x in &[0.1, 0.7, 2.0] {
            assert_relative_eq!(m.of_minimum.pdf(x), 2.0 * (-2.0 * x).exp(), max_relative = 1e-10);
        }
        let m = MinimumDistribution::new(vec![exp(1.0), exp(2.0)]).unwrap();
        for &x in &[0.1, 0.7, 2.0] {
            assert_relative_eq!(m.sf(x), (-3.0 * x).exp(), max_relative = 1e-13);
            assert_relative_eq!(m.pdf(x), 3.0 * (-3.0 * x).exp(), max_relative = 1e-13);
        }
    }

    #[test]
    fn mismatched_supports() {
        let u = make_catalog("uniform", &[]).unwrap();
        assert!(matches!(MinimumDistribution::new(vec![u, exp(1.0)]), Err(Error::Domain(_))));
        assert!(matches!(MinimumDistribution::new(vec![exp(1.0)]), Err(Error::Domain(_))));
    }
}
