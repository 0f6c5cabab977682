//! Numeric kernels shared by the rest of the crate.

mod diff;
mod kolmogorov;
mod optimize;
mod quadrature;
mod roots;
mod special;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use diff::finite_diff_grad;
pub use kolmogorov::kolmogorov_sf;
pub use optimize::{
    bounded_gradient, minimize_bounded, minimize_bounded_with, projected_gradient, MinimizeOptions,
    OptimizeResult,
};
pub use quadrature::{
    integrate_adaptive, integrate_partition, integrate_with, QuadratureOptions, QuadratureResult,
    Segment,
};
pub use roots::{brent_root, brent_root_xtol};
pub use special::{
    beta_fn, beta_inc_reg, bessel_k_scaled, chi_square_sf, erf, erfc, gamma_inc_reg,
    incomplete_beta_upper, ln_beta, ln_gamma,
};
pub(crate) use special::{
    beta_inc_reg_unchecked, gamma_inc_reg_unchecked, ln_beta_unchecked,
    ln_gamma_unchecked,
};

/// An interval `(lo, hi)`; `hi` may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Unchecked constructor.
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    /// Validating constructor: `lo` finite and `lo < hi`.
    pub fn try_new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || hi.is_nan() || lo >= hi {
            return Err(Error::Domain(format!("invalid interval ({lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.hi.is_finite()
    }
}
