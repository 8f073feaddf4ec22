use super::simulate::{conditioned_from, normal, ConditionedScheme};
use crate::error::{precondition, Result};
use crate::fields::{FieldSampler, Grid};
use crate::gmc_moments::MomentEstimate;
use crate::rng;
use serde::Serialize;

/// `E[(int_0^T e^{gamma (B_t - mu t)} dt)^q]` for each horizon in increasing `t_list`,
/// using the trapezoid rule along one path per replicate.
pub fn exp_functional_moment(
    gamma: f64,
    mu: f64,
    q: f64,
    t_list: &[f64],
    dt: f64,
    reps: usize,
    seed: u64,
) -> Result<Vec<MomentEstimate>> {
    if t_list.is_empty() || t_list.windows(2).any(|w| w[1] <= w[0]) || !(t_list[0] >= dt) || !(dt > 0.0) {
        return Err(precondition("horizons must increase and be at least dt"));
    }
    let marks: Vec<usize> = t_list.iter().map(|t| (t / dt).round() as usize).collect();
    let last = *marks.last().unwrap();
    let sd = dt.sqrt();
    let rows = rng::par_replicates(seed, rng::tag("exp-functional"), reps, |r, _| {
        let mut out = Vec::with_capacity(marks.len());
        let mut b = 0.0;
        let mut f_prev = 1.0;
        let mut integral = 0.0;
        let mut next_mark = 0;
        for k in 1..=last {
            b += sd * normal(r);
            let f = (gamma * (b - mu * k as f64 * dt)).exp();
            integral += 0.5 * (f_prev + f) * dt;
            f_prev = f;
            if k == marks[next_mark] {
                out.push(if q == 0.0 { 1.0 } else { integral.powf(q) });
                next_mark += 1;
            }
        }
        out
    });
    Ok((0..marks.len())
        .map(|j| {
            let v: Vec<f64> = rows.iter().map(|row| row[j]).collect();
            MomentEstimate::from_replicates(&v)
        })
        .collect())
}

/// Same-branch and cross-branch covariances of the lateral field at log-radius separation `tau`.
///
/// Same branch: `-log(1 - e^{-(tau v cutoff)})`; cross branch: `-log(1 + e^{-tau})`.
pub fn lateral_covariances(tau: f64, cutoff: f64) -> (f64, f64) {
    let tau = tau.abs();
    (-(-(-tau.max(cutoff)).exp()).ln_1p(), -((-tau).exp()).ln_1p())
}

#[derive(Debug, Clone, Serialize)]
pub struct ReflectionEstimate {
    pub estimate: MomentEstimate,
    pub mu: f64,
    pub p: f64,
    /// Mean share of the functional carried by the outermost 10% of the time grid.
    pub truncation_share: f64,
    pub truncation_warning: bool,
}

/// Monte Carlo estimate of `E[(int e^{-gamma B_t} Z(dt))^{p-1}]` for `d = 1`, with `B`
/// two-sided conditioned with drift `mu = (gamma/2)(p-1)` and `Z` the lateral chaos.
///
/// The lateral field is split into `U = (X+ + X-)/sqrt2` and `V = (X+ - X-)/sqrt2`,
/// which are independent stationary processes in `t`, each sampled by circulant embedding.
pub fn reflection_mc(
    gamma: f64,
    t_cut: f64,
    dt: f64,
    reps: usize,
    seed: u64,
    scheme: ConditionedScheme,
) -> Result<ReflectionEstimate> {
    if !(gamma > 0.0 && gamma * gamma < 2.0) {
        return Err(precondition("need 0 < gamma^2 < 2"));
    }
    let p = 2.0 / (gamma * gamma);
    let mu = 0.5 * gamma * (p - 1.0);
    if t_cut < 10.0 / (gamma * mu) * (1.0 - 1e-12) {
        return Err(precondition(format!("T_cut must be at least {}", 10.0 / (gamma * mu))));
    }
    let k = (t_cut / dt).round() as usize;
    let n = 2 * k + 1;
    let cutoff = 0.5 * dt;
    let grid = || Grid::interval(-(k as f64 + 0.5) * dt, (k as f64 + 0.5) * dt, n);
    let u = FieldSampler::stationary(grid()?, |tau| {
        let (s, c) = lateral_covariances(tau, cutoff);
        s + c
    })?;
    let v = FieldSampler::stationary(grid()?, |tau| {
        let (s, c) = lateral_covariances(tau, cutoff);
        s - c
    })?;
    let c0 = lateral_covariances(0.0, cutoff).0;
    let outer = (0.9 * k as f64).ceil() as usize;
    let rows = rng::par_replicates(seed, rng::tag("reflection"), reps, |r, _| {
        let right = conditioned_from(mu, dt, dt, k, scheme, r);
        let left = conditioned_from(mu, dt, dt, k, scheme, r);
        let uu = u.sample_values(r);
        let vv = v.sample_values(r);
        let mut total = 0.0;
        let mut tail = 0.0;
        for i in 0..n {
            let j = i as isize - k as isize;
            let b = match j {
                0 => 0.0,
                j if j > 0 => right[j as usize - 1],
                j => left[(-j) as usize - 1],
            };
            let x_plus = (uu[i] + vv[i]) * std::f64::consts::FRAC_1_SQRT_2;
            let x_minus = (uu[i] - vv[i]) * std::f64::consts::FRAC_1_SQRT_2;
            let lateral = (gamma * x_plus - 0.5 * gamma * gamma * c0).exp() + (gamma * x_minus - 0.5 * gamma * gamma * c0).exp();
            let term = (-gamma * b).exp() * lateral * dt;
            total += term;
            if j.unsigned_abs() >= outer {
                tail += term;
            }
        }
        (total.powf(p - 1.0), tail / total)
    });
    let values: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let share = rows.iter().map(|r| r.1).sum::<f64>() / reps as f64;
    Ok(ReflectionEstimate {
        estimate: MomentEstimate::from_replicates(&values),
        mu,
        p,
        truncation_share: share,
        truncation_warning: share > 0.05,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gamma_functional_is_deterministic() {
        let e = exp_functional_moment(0.0, 1.0, 1.5, &[1.0, 2.0], 0.01, 100, 3).unwrap();
        assert!((e[0].value - 1.0).abs() < 1e-12 && (e[1].value - 2f64.powf(1.5)).abs() < 1e-12);
        let z = exp_functional_moment(1.0, 1.0, 0.0, &[1.0], 0.01, 100, 3).unwrap();
        assert_eq!(z[0].value, 1.0);
    }

    #[test]
    fn lateral_covariance_values() {
        let (s, c) = lateral_covariances(0.0, 0.01);
        assert!((c + 2f64.ln()).abs() < 1e-15);
        assert!((s + (1.0 - (-0.01f64).exp()).ln()).abs() < 1e-12);
    }

    #[test]
    fn reflection_functional_is_positive() {
        let r = reflection_mc(1.0, 20.0, 0.1, 200, 1, ConditionedScheme::Radial).unwrap();
        assert!(r.estimate.value > 0.0 && r.mu == 0.5);
        assert!(reflection_mc(1.0, 5.0, 0.1, 200, 1, ConditionedScheme::Radial).is_err());
    }
}
