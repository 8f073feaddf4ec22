//! Moments of discretised chaos masses: Monte Carlo and deterministic
//! quadrature estimators, and the scaling experiments built on them.

mod experiments;
mod inequality;
mod monte_carlo;
mod quadrature;

pub use experiments::{
    critical_slope_experiment, fit_slope, multifractal_scaling_experiment, multifractal_exponent,
    supercritical_exponent, supercritical_exponent_experiment, MultifractalResult, SlopeExperiment,
};
pub use inequality::{check_pair, elementary_inequality_check, random_pair, DiscretePair, InequalityOutcome, PairCheck};
pub use monte_carlo::{mc_masses, mc_moment, mc_moment_with};
pub use quadrature::{quadrature_moment, stationary_moment, QuadratureRule};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    MonteCarlo,
    Quadrature,
    ClosedForm,
}

impl EstimateMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimateMethod::MonteCarlo => "monte-carlo",
            EstimateMethod::Quadrature => "quadrature",
            EstimateMethod::ClosedForm => "closed-form",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub stderr: f64,
    pub replicates: usize,
    pub method: EstimateMethod,
    pub heavy_tail_flag: bool,
}

/// Share of the sum above which a single replicate marks the sample as heavy-tailed.
pub const HEAVY_TAIL_SHARE: f64 = 0.10;
/// Number of batches for batch-means standard errors.
pub const BATCHES: usize = 20;

impl MomentEstimate {
    pub fn deterministic(value: f64, method: EstimateMethod) -> Self {
        MomentEstimate { value, stderr: 0.0, replicates: 1, method, heavy_tail_flag: false }
    }

    /// Mean of nonnegative replicate values with a batch-means standard error.
    pub fn from_replicates(samples: &[f64]) -> Self {
        let (value, stderr) = crate::stats::batch_means(samples, BATCHES);
        MomentEstimate {
            value,
            stderr,
            replicates: samples.len(),
            method: EstimateMethod::MonteCarlo,
            heavy_tail_flag: crate::stats::max_share(samples) > HEAVY_TAIL_SHARE,
        }
    }

    /// `|self - other|` in units of the combined standard error.
    pub fn z_score(&self, other: f64) -> f64 {
        (self.value - other).abs() / self.stderr
    }
}

/// Fitted line of a moment against `log(1/eps)` (or `log eps` in log-log fits).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Strictly decreasing.
    pub eps_list: Vec<f64>,
    /// Number of trailing (smallest) scales that entered the fit.
    pub fitted_points: usize,
}

/// One row of the experiment CSV.
#[derive(Debug, Clone, Serialize)]
pub struct MomentRecord {
    pub kernel_id: String,
    pub gamma: f64,
    pub d: u32,
    pub p: f64,
    pub eps: f64,
    pub method: &'static str,
    pub value: f64,
    pub stderr: f64,
    pub replicates: usize,
    pub heavy_tail_flag: bool,
    pub seed: Option<u64>,
}

pub const MOMENT_CSV_HEADER: [&str; 11] = [
    "kernel_id", "gamma", "d", "p", "eps", "method", "value", "stderr", "replicates", "heavy_tail_flag", "seed",
];

/// Appends records as CSV rows (no header).
pub fn write_moment_records<W: Write>(w: W, records: &[MomentRecord]) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for r in records {
        out.serialize(r).map_err(|e| Error::Numerical(format!("csv: {e}")))?;
    }
    out.flush().map_err(|e| Error::Numerical(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimate_invariants() {
        let e = MomentEstimate::deterministic(3.0, EstimateMethod::Quadrature);
        assert_eq!(e.stderr, 0.0);
        let mut s = vec![1.0; 100];
        let m = MomentEstimate::from_replicates(&s);
        assert!(!m.heavy_tail_flag && m.stderr == 0.0);
        s[5] = 30.0;
        assert!(MomentEstimate::from_replicates(&s).heavy_tail_flag);
    }

    #[test]
    fn record_csv_row() {
        let r = MomentRecord {
            kernel_id: "cutoff:0.01".into(),
            gamma: 1.0,
            d: 1,
            p: 2.0,
            eps: 0.01,
            method: EstimateMethod::Quadrature.as_str(),
            value: 9.2,
            stderr: 0.0,
            replicates: 1,
            heavy_tail_flag: false,
            seed: None,
        };
        let mut buf = Vec::new();
        write_moment_records(&mut buf, &[r]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim(), "cutoff:0.01,1.0,1,2.0,0.01,quadrature,9.2,0.0,1,false,");
    }
}
