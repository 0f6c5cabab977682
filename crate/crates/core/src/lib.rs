//! Weighted tail random variables.
//!
//! Given a non-negative base distribution `X` with survival function `F̄` and an
//! increasing weight `w` with `w(0) = 0`, the weighted tail random variable
//! `X_w` has density
//!
//! ```text
//! f_{X_w}(x) = w'(x) F̄(x) / E[w(X)],    0 <= x < u_X,
//! ```
//!
//! where `E[w(X)] = ∫ w'(x) F̄(x) dx`. With `w(x) = x` this is the equilibrium
//! distribution of renewal theory.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: special functions, adaptive Gauss–Kronrod quadrature,
//!   Brent root finding, a box-constrained limited-memory quasi-Newton
//!   minimizer, finite differences and the Kolmogorov distribution.
//! - [`distributions`]: the [`Distribution`](distributions::Distribution)
//!   trait and the catalog of base distributions.
//! - [`weights`]: weight functions and their validation.
//! - [`wtrv`]: the construction engine.
//! - [`grid`]: quantile grids and discrete monotonicity and shape tests.
//! - [`reliability`] and [`orders`]: grid-based aging-class and
//!   stochastic-order checkers, plus theorem verification fixtures.
//! - [`fit`], [`gof`], [`data`]: the bounded-data application pipeline
//!   (normalisation, maximum likelihood, goodness of fit, descriptive stats).

pub mod data;
pub mod distributions;
mod error;
pub mod fit;
pub mod gof;
pub mod grid;
pub mod numerics;
pub mod orders;
pub mod reliability;
pub mod weights;
pub mod wtrv;

pub use distributions::{make_catalog, Distribution, DistributionHandle, Interval};
pub use error::{Error, Result};
pub use weights::{make_weight, WeightFunction};
pub use wtrv::{construct, equilibrium, expected_weight, WtrvDistribution};
