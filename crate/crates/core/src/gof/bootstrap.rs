//! Parametric bootstrap p-values: simulate from the fitted model, refit,
//! and recompute the statistic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{statistic, GofTest};
use crate::distributions::sample;
use crate::error::{Error, Result};
use crate::fit::{fit_from, BoundaryPolicy, Model, NormalizedSample};

/// Fewest replicates accepted.
pub const MIN_REPLICATES: usize = 99;

/// Outcome of [`bootstrap_pvalue`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapResult {
    pub observed: f64,
    /// `(1 + #{T* ≥ T_obs})/(R + 1)` over the successful replicates.
    pub p_value: f64,
    pub replicates: usize,
    pub exceedances: usize,
    pub failures: usize,
}

/// `(1 + exceedances)/(replicates + 1)`.
pub fn bootstrap_fraction(exceedances: usize, replicates: usize) -> f64 {
    (1 + exceedances) as f64 / (replicates + 1) as f64
}

/// Parametric bootstrap p-value of `test` for `model` fitted to `sample`
/// with parameters `params`. Each replicate draws as many points as the
/// likelihood set, refits from `params`, and recomputes the statistic.
pub fn bootstrap_pvalue(
    data: &NormalizedSample,
    model: Model,
    params: &[f64],
    test: GofTest,
    replicates: usize,
    bins: usize,
    seed: u64,
) -> Result<BootstrapResult> {
    if replicates < MIN_REPLICATES {
        return Err(Error::Domain(format!("need at least {MIN_REPLICATES} replicates, got {replicates}")));
    }
    let fitted = model.distribution(params)?;
    let observed = statistic(test, data.likelihood_values(), fitted.as_ref(), bins)?;
    let n = data.likelihood_values().len();
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..replicates).map(|_| seeder.gen()).collect();
    let stats: Vec<Option<f64>> = seeds
        .par_iter()
        .map(|&s| {
            let draw = sample(fitted.as_ref(), n, s);
            let replicate = NormalizedSample::from_unit(draw, BoundaryPolicy::ExcludeBoundary).ok()?;
            let refit = fit_from(&replicate, model, params).ok()?;
            let d = refit.distribution().ok()?;
            statistic(test, replicate.likelihood_values(), d.as_ref(), bins).ok()
        })
        .collect();
    let failures = stats.iter().filter(|s| s.is_none()).count();
    if failures * 10 > replicates {
        return Err(Error::Bootstrap(format!("{failures} of {replicates} refits failed")));
    }
    let ok = replicates - failures;
    let exceedances = stats.iter().flatten().filter(|&&t| t >= observed).count();
    Ok(BootstrapResult {
        observed,
        p_value: bootstrap_fraction(exceedances, ok),
        replicates: ok,
        exceedances,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_formula() {
        assert_eq!(bootstrap_fraction(0, 99), 0.01);
        assert_eq!(bootstrap_fraction(99, 99), 1.0);
    }

    #[test]
    fn model_sample_is_not_rejected() {
        let truth = Model::Kw.distribution(&[2.0, 3.0]).unwrap();
        let data = NormalizedSample::from_unit(sample(truth.as_ref(), 150, 21), BoundaryPolicy::ExcludeBoundary).unwrap();
        let fit = crate::fit::fit_mle(&data, Model::Kw, 4, 3).unwrap();
        let r = bootstrap_pvalue(&data, Model::Kw, &fit.values(), GofTest::Ks, 99, 10, 5).unwrap();
        assert!(r.p_value > 0.01, "{r:?}");
        assert_eq!(r.failures, 0);
        let again = bootstrap_pvalue(&data, Model::Kw, &fit.values(), GofTest::Ks, 99, 10, 5).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn too_few_replicates() {
        let data = NormalizedSample::from_unit(vec![0.2, 0.4, 0.6], BoundaryPolicy::ExcludeBoundary).unwrap();
        assert!(bootstrap_pvalue(&data, Model::Kw, &[1.0, 1.0], GofTest::Ks, 10, 10, 1).is_err());
    }
}
