//! Finite-difference gradients.

use crate::error::{Error, Result};

/// Central-difference gradient of `f` at `x` with step `h` in every coordinate.
pub fn finite_diff_grad<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("finite difference step must be positive, got {h}")));
    }
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = f(&probe);
        probe[i] = x[i] - h;
        let down = f(&probe);
        probe[i] = x[i];
        if !(up.is_finite() && down.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite evaluation within {h} of coordinate {i}"
            )));
        }
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_and_constant() {
        let g = finite_diff_grad(|x| x[0] * x[0], &[3.0], 1e-5).unwrap();
        assert!((g[0] - 6.0).abs() < 1e-8);
        let g = finite_diff_grad(|_| 7.5, &[1.0, -2.0, 4.0], 1e-4).unwrap();
        assert!(g.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn non_finite_neighbourhood() {
        let err = finite_diff_grad(|x| x[0].ln(), &[0.0], 1e-3).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }
}
