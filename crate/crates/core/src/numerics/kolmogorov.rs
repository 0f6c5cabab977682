//! Asymptotic Kolmogorov distribution.

use std::f64::consts::PI;

/// `Q(λ) = 2 Σ_{k≥1} (-1)^{k-1} exp(-2k²λ²)`, the limiting survival function
/// of `√n · D_n`.
///
/// For small `λ` the alternating series converges slowly, so the equivalent
/// theta-function form `1 - √(2π)/λ Σ exp(-(2k-1)²π²/(8λ²))` is used there.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda.is_nan() {
        return f64::NAN;
    }
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.0 {
        let mut cdf = 0.0;
        let scale = (2.0 * PI).sqrt() / lambda;
        for k in 1..200 {
            let m = (2 * k - 1) as f64;
            let term = scale * (-(m * m) * PI * PI / (8.0 * lambda * lambda)).exp();
            cdf += term;
            if term < 1e-16 {
                break;
            }
        }
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_series(lambda: f64) -> f64 {
        2.0 * (1..=100)
            .map(|k| {
                let kf = k as f64;
                let t = (-2.0 * kf * kf * lambda * lambda).exp();
                if k % 2 == 1 { t } else { -t }
            })
            .sum::<f64>()
    }

    #[test]
    fn limits() {
        assert_eq!(kolmogorov_sf(0.0), 1.0);
        assert!(kolmogorov_sf(5.0) < 1e-10);
    }

    #[test]
    fn matches_direct_series() {
        for &l in &[0.5, 0.8, 1.0, 1.36, 2.0] {
            assert!((kolmogorov_sf(l) - direct_series(l)).abs() < 1e-12, "λ = {l}");
        }
    }

    #[test]
    fn monotone_decreasing() {
        let mut prev = 1.0;
        for i in 1..400 {
            let v = kolmogorov_sf(i as f64 * 0.01);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }
}
