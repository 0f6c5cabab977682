//! Goodness-of-fit tests against a fully specified model: Kolmogorov–Smirnov,
//! Anderson–Darling, Cramér–von Mises and an equal-probability chi-square.
//!
//! Asymptotic p-values treat the model parameters as known. When the
//! parameters were estimated from the same data, [`bootstrap_pvalue`] gives
//! the sound alternative.

mod bootstrap;
mod pvalues;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::numerics::{chi_square_sf, kolmogorov_sf};

pub use bootstrap::{bootstrap_pvalue, BootstrapResult, MIN_REPLICATES};
pub use pvalues::{ad_pvalue, cvm_pvalue};

/// Probability-integral values are kept this far from 0 and 1.
pub const BOUNDARY_NUDGE: f64 = 1e-12;

/// A statistic with its p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GofTest {
    Ks,
    Ad,
    Cvm,
    Chisq,
}

impl GofTest {
    pub const ALL: [GofTest; 4] = [Self::Ks, Self::Ad, Self::Cvm, Self::Chisq];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Ks => "ks",
            Self::Ad => "ad",
            Self::Cvm => "cvm",
            Self::Chisq => "chisq",
        }
    }
}

impl fmt::Display for GofTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GofTest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ks" => Ok(Self::Ks),
            "ad" => Ok(Self::Ad),
            "cvm" => Ok(Self::Cvm),
            "chisq" | "chi2" | "chisquare" => Ok(Self::Chisq),
            _ => Err(Error::Parse {
                text: s.to_string(),
                reason: "expected ks, ad, cvm or chisq".into(),
            }),
        }
    }
}

/// How a p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PValueMethod {
    Asymptotic,
    Bootstrap,
}

impl fmt::Display for PValueMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Asymptotic => "asymptotic",
            Self::Bootstrap => "bootstrap",
        })
    }
}

impl FromStr for PValueMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "asymptotic" => Ok(Self::Asymptotic),
            "bootstrap" => Ok(Self::Bootstrap),
            _ => Err(Error::Parse {
                text: s.to_string(),
                reason: "expected asymptotic or bootstrap".into(),
            }),
        }
    }
}

/// Degrees of freedom for the chi-square reference distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DfConvention {
    /// `bins - 1`.
    BinsMinusOne,
    /// `bins - 1 - k` for `k` estimated parameters.
    BinsMinusOneMinusK(usize),
    /// A calibrated value.
    Fixed(f64),
}

impl DfConvention {
    pub fn df(&self, bins: usize) -> f64 {
        match *self {
            Self::BinsMinusOne => bins as f64 - 1.0,
            Self::BinsMinusOneMinusK(k) => bins as f64 - 1.0 - k as f64,
            Self::Fixed(df) => df,
        }
    }
}

fn probability_integral(sorted: &[f64], model: &dyn Distribution) -> Result<Vec<f64>> {
    if sorted.len() < 2 {
        return Err(Error::DegenerateSample(format!("need at least 2 observations, got {}", sorted.len())));
    }
    if sorted.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("sample must be sorted ascending".into()));
    }
    sorted
        .iter()
        .map(|&x| {
            let u = model.cdf(x);
            if u.is_nan() {
                Err(Error::Evaluation(format!("model cdf is NaN at {x}")))
            } else {
                Ok(u)
            }
        })
        .collect()
}

/// `D_n = max_i max(i/n - u_i, u_i - (i-1)/n)` with `u_i = F(x_(i))`.
pub fn ks_statistic(u: &[f64]) -> f64 {
    let n = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(i, &ui)| ((i + 1) as f64 / n - ui).max(ui - i as f64 / n))
        .fold(0.0, f64::max)
}

/// `A² = -n - (1/n) Σ (2i-1)[log u_i + log(1 - u_{n+1-i})]`.
pub fn ad_statistic(u: &[f64]) -> Result<f64> {
    let n = u.len();
    let u: Vec<f64> = u.iter().map(|&x| x.clamp(BOUNDARY_NUDGE, 1.0 - BOUNDARY_NUDGE)).collect();
    if let Some(&x) = u.iter().find(|&&x| x <= 0.0 || x >= 1.0) {
        return Err(Error::Boundary(x));
    }
    let s: f64 = (0..n)
        .map(|i| (2 * i + 1) as f64 * (u[i].ln() + (-u[n - 1 - i]).ln_1p()))
        .sum();
    Ok(-(n as f64) - s / n as f64)
}

/// `W² = Σ (u_i - (2i-1)/(2n))² + 1/(12n)`.
pub fn cvm_statistic(u: &[f64]) -> f64 {
    let n = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(i, &ui)| {
            let d = ui - (2 * i + 1) as f64 / (2.0 * n);
            d * d
        })
        .sum::<f64>()
        + 1.0 / (12.0 * n)
}

/// Observed counts in `bins` equal-probability cells of the model.
pub fn equal_probability_counts(u: &[f64], bins: usize) -> Vec<usize> {
    let mut counts = vec![0; bins];
    for &ui in u {
        counts[((ui * bins as f64) as usize).min(bins - 1)] += 1;
    }
    counts
}

/// `Σ (O_j - E_j)²/E_j` with `E_j = n/bins`.
pub fn chisq_statistic(u: &[f64], bins: usize) -> Result<f64> {
    if bins < 2 {
        return Err(Error::Binning(format!("need at least 2 bins, got {bins}")));
    }
    let expected = u.len() as f64 / bins as f64;
    if expected < 1.0 {
        return Err(Error::Binning(format!(
            "expected count {expected} per bin is below 1 ({} observations, {bins} bins)",
            u.len()
        )));
    }
    Ok(equal_probability_counts(u, bins)
        .iter()
        .map(|&o| (o as f64 - expected).powi(2) / expected)
        .sum())
}

/// Kolmogorov–Smirnov test with the asymptotic p-value `Q_KS(√n·D_n)`.
pub fn ks_test(sorted: &[f64], model: &dyn Distribution) -> Result<TestOutcome> {
    let u = probability_integral(sorted, model)?;
    let d = ks_statistic(&u);
    Ok(TestOutcome {
        statistic: d,
        p_value: kolmogorov_sf((u.len() as f64).sqrt() * d),
    })
}

/// Anderson–Darling test.
pub fn ad_test(sorted: &[f64], model: &dyn Distribution) -> Result<TestOutcome> {
    let u = probability_integral(sorted, model)?;
    let a = ad_statistic(&u)?;
    Ok(TestOutcome {
        statistic: a,
        p_value: ad_pvalue(a, u.len()),
    })
}

/// Cramér–von Mises test.
pub fn cvm_test(sorted: &[f64], model: &dyn Distribution) -> Result<TestOutcome> {
    let u = probability_integral(sorted, model)?;
    let w = cvm_statistic(&u);
    Ok(TestOutcome {
        statistic: w,
        p_value: cvm_pvalue(w, u.len()),
    })
}

/// Chi-square test on equal-probability bins.
pub fn chisq_test(sorted: &[f64], model: &dyn Distribution, bins: usize, df: DfConvention) -> Result<TestOutcome> {
    let u = probability_integral(sorted, model)?;
    let x2 = chisq_statistic(&u, bins)?;
    let dof = df.df(bins);
    if !(dof > 0.0) {
        return Err(Error::Domain(format!("chi-square degrees of freedom must be positive, got {dof}")));
    }
    Ok(TestOutcome {
        statistic: x2,
        p_value: chi_square_sf(x2, dof)?,
    })
}

/// Survival probabilities of `statistic` under chi-square laws with
/// `1..=max_df` degrees of freedom, and the df whose p-value is closest to
/// `target_p`.
pub fn df_sweep(statistic: f64, target_p: f64, max_df: usize) -> Result<(usize, Vec<(usize, f64)>)> {
    let table = (1..=max_df.max(1))
        .map(|df| chi_square_sf(statistic, df as f64).map(|p| (df, p)))
        .collect::<Result<Vec<_>>>()?;
    let best = table
        .iter()
        .min_by(|a, b| (a.1 - target_p).abs().total_cmp(&(b.1 - target_p).abs()))
        .map(|t| t.0)
        .unwrap_or(1);
    Ok((best, table))
}

/// One row of a [`GofReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofEntry {
    pub test: GofTest,
    pub statistic: f64,
    pub p_value: f64,
    pub method: PValueMethod,
    /// Degrees of freedom (chi-square only).
    pub df: Option<f64>,
}

/// Statistics and p-values of several tests against one model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofReport {
    pub model: String,
    pub n: usize,
    pub tests: Vec<GofEntry>,
}

impl GofReport {
    pub fn get(&self, test: GofTest) -> Option<&GofEntry> {
        self.tests.iter().find(|e| e.test == test)
    }
}

/// Run the asymptotic versions of `tests` on a sorted sample.
pub fn gof_report(
    sorted: &[f64],
    model: &dyn Distribution,
    tests: &[GofTest],
    bins: usize,
    df: DfConvention,
) -> Result<GofReport> {
    let mut entries = Vec::with_capacity(tests.len());
    for &test in tests {
        let (outcome, dof) = match test {
            GofTest::Ks => (ks_test(sorted, model)?, None),
            GofTest::Ad => (ad_test(sorted, model)?, None),
            GofTest::Cvm => (cvm_test(sorted, model)?, None),
            GofTest::Chisq => (chisq_test(sorted, model, bins, df)?, Some(df.df(bins))),
        };
        entries.push(GofEntry {
            test,
            statistic: outcome.statistic,
            p_value: outcome.p_value,
            method: PValueMethod::Asymptotic,
            df: dof,
        });
    }
    Ok(GofReport {
        model: model.label(),
        n: sorted.len(),
        tests: entries,
    })
}

/// The statistic of `test` alone.
pub fn statistic(test: GofTest, sorted: &[f64], model: &dyn Distribution, bins: usize) -> Result<f64> {
    let u = probability_integral(sorted, model)?;
    match test {
        GofTest::Ks => Ok(ks_statistic(&u)),
        GofTest::Ad => ad_statistic(&u),
        GofTest::Cvm => Ok(cvm_statistic(&u)),
        GofTest::Chisq => chisq_statistic(&u, bins),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{make_catalog, sample};

    fn quantile_sample(n: usize) -> Vec<f64> {
        (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect()
    }

    #[test]
    fn staircase_geometry() {
        let u = quantile_sample(40);
        assert!((ks_statistic(&u) - 0.5 / 40.0).abs() < 1e-15);
        assert!((cvm_statistic(&u) - 1.0 / 480.0).abs() < 1e-15);
        assert_eq!(chisq_statistic(&u, 10).unwrap(), 0.0);
    }

    #[test]
    fn small_hand_case() {
        let u: [f64; 5] = [0.1, 0.3, 0.35, 0.8, 0.9];
        let n = 5.0;
        let mut s = 0.0;
        for i in 1..=5 {
            s += (2.0 * i as f64 - 1.0) * (u[i - 1].ln() + (1.0 - u[5 - i]).ln());
        }
        assert!((ad_statistic(&u).unwrap() - (-n - s / n)).abs() < 1e-12);
        let w: f64 = (1..=5).map(|i| (u[i - 1] - (2.0 * i as f64 - 1.0) / 10.0).powi(2)).sum::<f64>() + 1.0 / 60.0;
        assert!((cvm_statistic(&u) - w).abs() < 1e-15);
        let d = (1..=5)
            .map(|i| (i as f64 / n - u[i - 1]).max(u[i - 1] - (i - 1) as f64 / n))
            .fold(0.0, f64::max);
        assert_eq!(ks_statistic(&u), d);
    }

    #[test]
    fn probability_integral_invariance() {
        let model = make_catalog("kumaraswamy", &[("a", 2.0), ("b", 3.0)]).unwrap();
        let mut xs = sample(model.as_ref(), 60, 9);
        xs.sort_by(f64::total_cmp);
        let mut us: Vec<f64> = xs.iter().map(|&x| model.cdf(x)).collect();
        us.sort_by(f64::total_cmp);
        let uni = make_catalog("uniform", &[]).unwrap();
        for test in GofTest::ALL {
            let a = statistic(test, &xs, model.as_ref(), 10).unwrap();
            let b = statistic(test, &us, uni.as_ref(), 10).unwrap();
            assert!((a - b).abs() < 1e-12, "{test}");
        }
    }

    #[test]
    fn boundary_values_are_nudged() {
        let u = [0.0, 0.4, 1.0];
        assert!(ad_statistic(&u).unwrap().is_finite());
    }

    #[test]
    fn binning_needs_one_per_bin() {
        assert!(matches!(chisq_statistic(&[0.1, 0.5, 0.9], 10), Err(Error::Binning(_))));
    }

    #[test]
    fn df_sweep_recovers_known_df() {
        let p = chi_square_sf(9.235, 7.0).unwrap();
        let (best, table) = df_sweep(9.235, p, 12).unwrap();
        assert_eq!(best, 7);
        assert_eq!(table.len(), 12);
    }

    #[test]
    fn unsorted_rejected() {
        let uni = make_catalog("uniform", &[]).unwrap();
        assert!(ks_test(&[0.5, 0.2], uni.as_ref()).is_err());
    }
}
