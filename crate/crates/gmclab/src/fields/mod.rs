//! Log-correlated Gaussian fields on grids and their discretised chaos measures.

pub mod chaos;
pub mod grid;
pub mod kernel;
pub mod mollifier;
pub mod sampler;

pub use chaos::{chaos_measure, ChaosMeasure, FieldSample};
pub use grid::Grid;
pub use kernel::{build_covariance_matrix, CovarianceSpec, Domain, Kernel, Mollifier, Offset};
pub use sampler::{sample_field, FieldSampler};
