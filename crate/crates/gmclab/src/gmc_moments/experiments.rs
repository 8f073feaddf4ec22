use super::quadrature::{moment_by_rule, QuadratureRule};
use super::{MomentEstimate, SlopeFit};
use crate::error::{precondition, Error, Result};
use crate::fields::chaos::log_weight;
use crate::fields::{CovarianceSpec, FieldSampler};
use crate::rng;
use crate::specfun::{theorem_slope, GmcParams};
use crate::stats::linear_fit;

const MIN_R_SQUARED: f64 = 0.95;

fn check_decreasing(eps_list: &[f64]) -> Result<()> {
    if eps_list.len() < 2 {
        return Err(precondition("need at least two scales"));
    }
    if eps_list.iter().any(|&e| !(e > 0.0)) || eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(precondition("scales must be positive and strictly decreasing"));
    }
    Ok(())
}

/// Least-squares fit of `values` against `log(1/eps)`.
///
/// When the full fit has `r^2 < 0.95` only the smallest two decades are kept;
/// if that still fails a fit-quality error is returned.
pub fn fit_slope(eps_list: &[f64], values: &[f64]) -> Result<SlopeFit> {
    check_decreasing(eps_list)?;
    let x: Vec<f64> = eps_list.iter().map(|e| (1.0 / e).ln()).collect();
    let full = linear_fit(&x, values);
    let (fit, used) = if full.r_squared >= MIN_R_SQUARED {
        (full, x.len())
    } else {
        let floor = eps_list[eps_list.len() - 1] * 100.0;
        let start = eps_list.iter().position(|&e| e <= floor).unwrap_or(0).min(x.len() - 2);
        let tail = linear_fit(&x[start..], &values[start..]);
        if tail.r_squared < MIN_R_SQUARED {
            return Err(Error::FitQuality(tail.r_squared));
        }
        (tail, x.len() - start)
    };
    Ok(SlopeFit {
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        eps_list: eps_list.to_vec(),
        fitted_points: used,
    })
}

#[derive(Debug, Clone)]
pub struct SlopeExperiment {
    pub fit: SlopeFit,
    pub p: f64,
    pub estimates: Vec<MomentEstimate>,
    /// Predicted coefficient of `log(1/eps)` for `g = 1` and the constant covariance offset.
    pub predicted: f64,
}

fn integer_order(p: f64) -> Result<u32> {
    let r = p.round();
    if (p - r).abs() > 1e-12 || !(2.0..=3.0).contains(&r) {
        return Err(precondition(format!("quadrature needs an integer order 2 or 3, got {p}")));
    }
    Ok(r as u32)
}

/// Critical moments `E[M_eps(D)^p]`, `p = 2d/gamma^2`, over a family of specs
/// indexed by `eps`, fitted against `log(1/eps)`.
pub fn critical_slope_experiment<F>(family: F, eps_list: &[f64], gamma: f64, rule: QuadratureRule) -> Result<SlopeExperiment>
where
    F: Fn(f64) -> Result<CovarianceSpec>,
{
    check_decreasing(eps_list)?;
    if eps_list[0] / eps_list[eps_list.len() - 1] < 1e3 * (1.0 - 1e-12) {
        return Err(precondition("scales must span at least three decades"));
    }
    let first = family(eps_list[0])?;
    let params = GmcParams::new(gamma, first.d())?;
    params.require_subcritical()?;
    let p = params.p();
    let order = integer_order(p)?;
    let mut estimates = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let spec = family(eps)?;
        estimates.push(moment_by_rule(&spec, gamma, order, rule)?);
    }
    let values: Vec<f64> = estimates.iter().map(|e| e.value).collect();
    let fit = fit_slope(eps_list, &values)?;
    let f0 = first.offset.eval([0.0; 2], [0.0; 2]);
    let weight = first.domain.volume() * (first.d() as f64 * (p - 1.0) * f0).exp();
    let predicted = theorem_slope(params, weight)?;
    Ok(SlopeExperiment { fit, p, estimates, predicted })
}

/// `-(gamma^2/2)(p - 1)(p - 2d/gamma^2)`, the exponent of `eps` in supercritical moments.
pub fn supercritical_exponent(gamma: f64, d: u32, p: f64) -> f64 {
    let g2 = gamma * gamma;
    -(g2 / 2.0) * (p - 1.0) * (p - 2.0 * d as f64 / g2)
}

/// Log-log fit of supercritical integer moments of the cutoff field on `[0, 1]`.
///
/// Returns the fit (slope against `log eps`) and the predicted exponent.
pub fn supercritical_exponent_experiment(gamma: f64, p: u32, eps_list: &[f64], rule: QuadratureRule) -> Result<(SlopeFit, f64)> {
    check_decreasing(eps_list)?;
    if !(gamma > 0.0) || !(2..=3).contains(&p) {
        return Err(precondition("need gamma > 0 and p in {2, 3}"));
    }
    let critical = 2.0 / (gamma * gamma);
    if (p as f64 - critical).abs() <= 1e-12 {
        return Err(precondition("p equals 2d/gamma^2; use the critical experiment"));
    }
    if (p as f64) < critical {
        return Err(precondition("p is below 2d/gamma^2; moments stay bounded"));
    }
    let mut x = Vec::with_capacity(eps_list.len());
    let mut y = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let spec = CovarianceSpec::cutoff(0.0, 1.0, eps)?;
        let m = moment_by_rule(&spec, gamma, p, rule)?;
        x.push(eps.ln());
        y.push(m.value.ln());
    }
    let f = linear_fit(&x, &y);
    let fit = SlopeFit {
        slope: f.slope,
        intercept: f.intercept,
        r_squared: f.r_squared,
        eps_list: eps_list.to_vec(),
        fitted_points: eps_list.len(),
    };
    Ok((fit, supercritical_exponent(gamma, 1, p as f64)))
}

/// `alpha d + (gamma^2/2) alpha (1 - alpha)`.
pub fn multifractal_exponent(gamma: f64, d: u32, alpha: f64) -> f64 {
    alpha * d as f64 + 0.5 * gamma * gamma * alpha * (1.0 - alpha)
}

#[derive(Debug, Clone)]
pub struct MultifractalResult {
    /// Slope of `log E[M(B_r)^alpha]` against `log r`; `eps_list` holds the radii.
    pub fit: SlopeFit,
    pub predicted: f64,
    pub estimates: Vec<MomentEstimate>,
    /// Set when any radius is heavy-tailed; the comparison is then not meaningful.
    pub heavy_tail: bool,
}

/// `E[M(B(x, r))^alpha]` for decreasing radii on a one-dimensional grid.
///
/// Each field draw contributes the average over disjoint balls tiling the
/// domain; stationarity makes every ball an unbiased copy of the centred one.
pub fn multifractal_scaling_experiment(
    sampler: &FieldSampler,
    gamma: f64,
    alpha: f64,
    radii: &[f64],
    reps: usize,
    seed: u64,
) -> Result<MultifractalResult> {
    check_decreasing(radii)?;
    let grid = sampler.grid().clone();
    if grid.dim != 1 {
        return Err(precondition("ball averaging is implemented for one-dimensional grids"));
    }
    let d = 1;
    let pmax = 2.0 * d as f64 / (gamma * gamma);
    if !(0.0..pmax).contains(&alpha) {
        return Err(precondition(format!("alpha must lie in [0, {pmax})")));
    }
    let h = grid.cell_volume;
    let n = grid.len();
    let cells: Vec<usize> = radii.iter().map(|r| (2.0 * r / h).round() as usize).collect();
    if cells.iter().any(|&m| m < 2 || m > n) {
        return Err(precondition("radii must span at least two cells and fit in the domain"));
    }
    let var = sampler.variance().clone();
    let stats = |values: &[f64]| -> Result<Vec<f64>> {
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for (x, v) in values.iter().zip(var.iter()) {
            acc += log_weight(gamma, *x, *v)?.exp() * h;
            prefix.push(acc);
        }
        Ok(cells
            .iter()
            .map(|&m| {
                let count = n / m;
                (0..count).map(|b| (prefix[(b + 1) * m] - prefix[b * m]).powf(alpha)).sum::<f64>() / count as f64
            })
            .collect())
    };
    let pairs = reps.div_ceil(2);
    let rows = rng::par_replicates(seed, rng::tag("gmc-multifractal"), pairs, |r, _| {
        let (a, b) = sampler.sample_pair(r);
        Ok([stats(&a)?, stats(&b)?])
    });
    let mut per_radius = vec![Vec::with_capacity(reps); radii.len()];
    for row in rows {
        for s in row? {
            for (k, v) in s.into_iter().enumerate() {
                per_radius[k].push(v);
            }
        }
    }
    let estimates: Vec<MomentEstimate> = per_radius
        .iter()
        .map(|v| MomentEstimate::from_replicates(&v[..reps.min(v.len())]))
        .collect();
    let x: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let y: Vec<f64> = estimates.iter().map(|e| e.value.ln()).collect();
    let f = linear_fit(&x, &y);
    Ok(MultifractalResult {
        fit: SlopeFit {
            slope: f.slope,
            intercept: f.intercept,
            r_squared: f.r_squared,
            eps_list: radii.to_vec(),
            fitted_points: radii.len(),
        },
        predicted: multifractal_exponent(gamma, d, alpha),
        heavy_tail: estimates.iter().any(|e| e.heavy_tail_flag),
        estimates,
    })
}
