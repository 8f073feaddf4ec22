//! Brownian path simulators for the drifted, conditioned and composed
//! processes, distributional checks of the path decompositions, and Monte
//! Carlo functionals of conditioned paths.

mod checks;
mod functional;
mod simulate;

pub use checks::{
    bes3_cdf, bes3_marginal_check, exp_max_check, independence_check, time_reversal_check, two_m_minus_b_check, williams_check, IndependenceOutcome,
    TimeReversalOutcome, WilliamsOutcome,
};
pub use functional::{exp_functional_moment, lateral_covariances, reflection_mc, ReflectionEstimate};
pub use simulate::{
    bridge_crossing_probability, bridge_max, conditioned_from, simulate_bm_drift, simulate_conditioned_bm,
    two_m_minus_b_transform, williams_compose, ConditionedScheme,
};

use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    BmDrift,
    Conditioned,
    Bes3,
    WilliamsComposite,
    TwoMMinusB,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathMeta {
    pub drift: f64,
    pub kind: PathKind,
}

/// A trajectory on the uniform grid `times[i] = i dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub dt: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: PathMeta,
    /// Maximum over `[times[i-1], times[i]]` sampled from the Brownian bridge
    /// (entry 0 is `values[0]`); present for drifted Brownian paths.
    pub step_max: Option<Vec<f64>>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at the grid time closest to `t`.
    pub fn at(&self, t: f64) -> f64 {
        let i = ((t / self.dt).round() as usize).min(self.values.len() - 1);
        self.values[i]
    }

    /// Running maximum, using the bridge maxima when available.
    pub fn running_max(&self) -> Vec<f64> {
        let src = self.step_max.as_ref().unwrap_or(&self.values);
        let mut m = f64::NEG_INFINITY;
        src.iter()
            .zip(&self.values)
            .map(|(&s, &v)| {
                m = m.max(s).max(v);
                m
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> crate::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let err = |e: csv::Error| crate::Error::Numerical(format!("csv: {e}"));
        out.write_record(["time", "value"]).map_err(err)?;
        for (t, v) in self.times.iter().zip(&self.values) {
            out.serialize((t, v)).map_err(err)?;
        }
        out.flush().map_err(|e| crate::Error::Numerical(e.to_string()))
    }
}
