use super::MomentEstimate;
use crate::error::{precondition, Result};
use crate::fields::chaos::chaos_mass;
use crate::fields::{CovarianceSpec, FieldSampler, Grid};
use crate::rng;

/// Chaos masses `int g dM` for `reps` independent fields.
///
/// Replicate pairs share one stream, so spectral samplers use both halves of
/// each transform.
pub fn mc_masses(sampler: &FieldSampler, gamma: f64, g: &[f64], reps: usize, seed: u64) -> Result<Vec<f64>> {
    if !g.is_empty() && g.len() != sampler.len() {
        return Err(precondition("density length does not match the grid"));
    }
    let cell = sampler.grid().cell_volume;
    let var = sampler.variance().clone();
    let pairs = reps.div_ceil(2);
    let chunks = rng::par_replicates(seed, rng::tag("gmc-masses"), pairs, |r, _| {
        let (a, b) = sampler.sample_pair(r);
        Ok([chaos_mass(&a, &var, gamma, cell, g)?, chaos_mass(&b, &var, gamma, cell, g)?])
    });
    let mut out = Vec::with_capacity(2 * pairs);
    for c in chunks {
        out.extend(c?);
    }
    out.truncate(reps);
    Ok(out)
}

/// Monte Carlo estimate of `E[(int g dM)^p]` with an existing sampler.
pub fn mc_moment_with(
    sampler: &FieldSampler,
    gamma: f64,
    p: f64,
    g: &[f64],
    replicates: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    if !(p > 0.0) {
        return Err(precondition(format!("moment order must be positive, got {p}")));
    }
    if replicates < 100 {
        return Err(precondition("at least 100 replicates are required"));
    }
    let masses = mc_masses(sampler, gamma, g, replicates, seed)?;
    let powers: Vec<f64> = masses.iter().map(|m| m.powf(p)).collect();
    Ok(MomentEstimate::from_replicates(&powers))
}

/// Monte Carlo estimate of `E[(int g dM)^p]`; an empty `g` means `g = 1`.
pub fn mc_moment(
    spec: &CovarianceSpec,
    grid: Grid,
    gamma: f64,
    p: f64,
    g: &[f64],
    replicates: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    let sampler = FieldSampler::auto(spec, grid)?;
    mc_moment_with(&sampler, gamma, p, g, replicates, seed)
}
