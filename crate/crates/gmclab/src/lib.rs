//! Numerical laboratory for critical moments of subcritical Gaussian
//! multiplicative chaos.
//!
//! The crate is split into five layers:
//!
//! * [`specfun`]: gamma-family special functions and the closed-form
//!   asymptotic constants (reflection coefficient, Fyodorov-Bouchaud,
//!   Keating-Snaith, moments-of-moments leading orders).
//! * [`fields`]: log-correlated Gaussian fields on grids and their chaos
//!   measures.
//! * [`gmc_moments`]: Monte Carlo and quadrature moments of chaos mass,
//!   slope and exponent fits.
//! * [`paths`]: Brownian path decompositions and the exponential functionals
//!   built from them.
//! * [`rmt`]: circular beta ensembles and Toeplitz determinants with
//!   Fisher-Hartwig singularities.
//!
//! Supporting numerics live in [`quad`], [`stats`] and [`rng`].

pub mod error;
pub mod fields;
pub mod gmc_moments;
pub mod paths;
pub mod quad;
pub mod rmt;
pub mod rng;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
