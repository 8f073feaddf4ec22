//! Circular beta ensembles, moments of moments of characteristic polynomials,
//! and Toeplitz determinants with Fisher-Hartwig singularities.

mod cbe;
mod toeplitz;

pub use cbe::{
    char_poly_pow, cross_moment_mc, eigenangles_from_verblunsky, ks_moment_exact, ks_moment_exact_log, log_abs_char_poly,
    mom_estimate, sample_cbe, verblunsky, EigenangleSample,
};
pub use toeplitz::{
    fh_uniformity_check, fh_upper_bound_check, hermitian_toeplitz_logdet, single_singularity_coefficients,
    symbol_coefficients, toeplitz_determinant, toeplitz_mom, FisherHartwigSymbol, UpperBoundCheck,
    MAX_DETERMINANTS, MAX_DIMENSION,
};
