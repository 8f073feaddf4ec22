use super::simulate::{
    bridge_max, conditioned_from, normal, run_to_level, simulate_bm_drift, two_m_minus_b_transform, williams_compose,
    ConditionedScheme, ConditionedStepper,
};
use crate::error::{precondition, Error, Result};
use crate::rng;
use crate::stats::{ks_one_sample, ks_two_sample, mean, KsRecord};
use rand::Rng;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct WilliamsOutcome {
    pub t1: KsRecord,
    pub t5: KsRecord,
}

/// Marginals at `t = 1` and `t = 5` of the composed path against direct drift `-mu` paths.
pub fn williams_check(mu: f64, dt: f64, reps: usize, seed: u64, scheme: ConditionedScheme) -> Result<WilliamsOutcome> {
    let composed = rng::par_replicates(seed, rng::tag("williams-composed"), reps, |r, _| {
        let (p, _) = williams_compose(mu, 5.0, dt, scheme, r)?;
        Ok((p.at(1.0), p.at(5.0)))
    });
    let direct = rng::par_replicates(seed, rng::tag("williams-direct"), reps, |r, _| {
        let p = simulate_bm_drift(-mu, 5.0, dt, r)?;
        Ok((p.at(1.0), p.at(5.0)))
    });
    let composed: Vec<(f64, f64)> = composed.into_iter().collect::<Result<_>>()?;
    let direct: Vec<(f64, f64)> = direct.into_iter().collect::<Result<_>>()?;
    let split = |v: &[(f64, f64)]| -> (Vec<f64>, Vec<f64>) { v.iter().copied().unzip() };
    let (c1, c5) = split(&composed);
    let (d1, d5) = split(&direct);
    Ok(WilliamsOutcome {
        t1: KsRecord::new("williams_t1", reps, ks_two_sample(&c1, &d1), 0.02),
        t5: KsRecord::new("williams_t5", reps, ks_two_sample(&c5, &d5), 0.03),
    })
}

/// All-time maximum of Brownian motion with drift `-mu` against `Exp(2 mu)`.
///
/// A path is stopped once it falls `12 / (2 mu)` below its running maximum.
pub fn exp_max_check(mu: f64, dt: f64, reps: usize, seed: u64) -> Result<KsRecord> {
    if !(mu > 0.0) || !(dt > 0.0) {
        return Err(precondition("need mu > 0 and dt > 0"));
    }
    let drop = 12.0 / (2.0 * mu);
    let sd = dt.sqrt();
    let maxima = rng::par_replicates(seed, rng::tag("exp-max"), reps, |r, _| {
        let (mut x, mut s) = (0.0f64, 0.0f64);
        while x > s - drop {
            let next = x - mu * dt + sd * normal(r);
            s = s.max(bridge_max(x, next, dt, r.random()));
            x = next;
        }
        s
    });
    let ks = ks_one_sample(&maxima, |m| 1.0 - (-2.0 * mu * m).exp());
    Ok(KsRecord::new("exp_max", reps, ks, 0.02))
}

/// Distribution function of the three-dimensional Bessel process at time `t` from 0.
pub fn bes3_cdf(x: f64, t: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let u = x / t.sqrt();
    2.0 * crate::stats::normal_cdf(u) - 1.0 - (2.0 / std::f64::consts::PI).sqrt() * u * (-0.5 * u * u).exp()
}

/// `2S - B` at `t = 1` against the conditioned process at `t = 1`
/// (against the exact Bessel law when `mu = 0`).
pub fn two_m_minus_b_check(mu: f64, dt: f64, reps: usize, seed: u64, scheme: ConditionedScheme) -> Result<KsRecord> {
    let transformed = rng::par_replicates(seed, rng::tag("2m-b"), reps, |r, _| {
        let p = simulate_bm_drift(mu, 1.0, dt, r)?;
        Ok(two_m_minus_b_transform(&p, mu)?.at(1.0))
    });
    let transformed: Vec<f64> = transformed.into_iter().collect::<Result<_>>()?;
    let ks = if mu == 0.0 {
        ks_one_sample(&transformed, |x| bes3_cdf(x, 1.0))
    } else {
        let n = (1.0 / dt).round() as usize;
        let conditioned = rng::par_replicates(seed, rng::tag("2m-b-conditioned"), reps, |r, _| {
            *conditioned_from(mu, dt, dt, n, scheme, r).last().unwrap()
        });
        ks_two_sample(&transformed, &conditioned)
    };
    Ok(KsRecord::new(format!("two_m_minus_b_mu{mu}"), reps, ks, 0.03))
}

/// Bessel marginal check of the conditioned simulator at `t = 1` with `mu = 0`.
pub fn bes3_marginal_check(dt: f64, reps: usize, seed: u64, scheme: ConditionedScheme) -> KsRecord {
    let n = (1.0 / dt).round() as usize;
    let v = rng::par_replicates(seed, rng::tag("bes3"), reps, |r, _| *conditioned_from(0.0, dt, dt, n, scheme, r).last().unwrap());
    KsRecord::new("bes3_marginal", reps, ks_one_sample(&v, |x| bes3_cdf(x, 1.0)), 0.03)
}

#[derive(Debug, Clone, Serialize)]
pub struct TimeReversalOutcome {
    /// First hitting time of `x` by the drift `mu` path against the last passage time of the conditioned path.
    pub hitting: KsRecord,
    /// `B` at half the hitting time against `x` minus the conditioned path at half the last passage time.
    pub midpoint: KsRecord,
}

/// Last-passage time of `x` by the conditioned process and the path up to it.
fn last_passage<R: Rng + ?Sized>(mu: f64, x: f64, dt: f64, scheme: ConditionedScheme, r: &mut R) -> Result<(f64, Vec<f64>)> {
    let escape = x + 12.0;
    let max_steps = ((100.0 * escape / mu.max(0.1)) / dt) as usize;
    let mut values = vec![0.0];
    let mut last = 0usize;
    let mut b = 0.0;
    let mut gen = ConditionedStepper::new(mu, dt, scheme);
    for k in 0..max_steps {
        let next = gen.step(dt, r);
        let touched = b <= x
            || next <= x
            || r.random::<f64>() < (-2.0 * (b - x) * (next - x) / dt).exp();
        if touched {
            last = k;
        }
        values.push(next);
        b = next;
        if b > escape {
            return Ok(((last as f64 + 0.5) * dt, values));
        }
    }
    if (b - x).abs() < 1.0 || b < x {
        return Err(Error::Numerical(format!("horizon too short: conditioned path ends at {b:.3} near {x}")));
    }
    Ok(((last as f64 + 0.5) * dt, values))
}

/// Hitting time of `x` by drift `mu` Brownian motion against the last passage
/// time of `x` by the conditioned process, plus the mid-path comparison.
pub fn time_reversal_check(mu: f64, x: f64, dt: f64, reps: usize, seed: u64, scheme: ConditionedScheme) -> Result<TimeReversalOutcome> {
    if !(mu > 0.0) || !(x > 0.0) {
        return Err(precondition("need mu > 0 and x > 0"));
    }
    let hits = rng::par_replicates(seed, rng::tag("reversal-hit"), reps, |r, _| {
        let guard = (1e3 * (x / mu + 1.0) / dt) as usize;
        let (k, values) = run_to_level(mu, x, dt, guard, r).ok_or_else(|| Error::Numerical("level not reached".into()))?;
        let tau = (k as f64 + 0.5) * dt;
        let mid = values[((tau / 2.0 / dt).round() as usize).min(values.len() - 1)];
        Ok((tau, mid))
    });
    let last = rng::par_replicates(seed, rng::tag("reversal-last"), reps, |r, _| {
        let (l, values) = last_passage(mu, x, dt, scheme, r)?;
        let mid = values[((l / 2.0 / dt).round() as usize).min(values.len() - 1)];
        Ok((l, x - mid))
    });
    let (tau, b_mid): (Vec<f64>, Vec<f64>) = hits.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    let (ell, c_mid): (Vec<f64>, Vec<f64>) = last.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    Ok(TimeReversalOutcome {
        hitting: KsRecord::new("time_reversal", reps, ks_two_sample(&tau, &ell), 0.03),
        midpoint: KsRecord::new("time_reversal_midpoint", reps, ks_two_sample(&b_mid, &c_mid), 0.05),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IndependenceOutcome {
    pub correlation: f64,
    pub stderr: f64,
    pub n: usize,
}

/// Correlation between the average of `2S - B` before `S` first reaches `x`
/// and the increment of `2S - B` over the following unit of time.
pub fn independence_check(mu: f64, x: f64, dt: f64, reps: usize, seed: u64) -> Result<IndependenceOutcome> {
    let horizon = 1.0;
    let pairs = rng::par_replicates(seed, rng::tag("independence"), reps, |r, _| {
        let sd = dt.sqrt();
        let (mut b, mut s) = (0.0f64, 0.0f64);
        let mut sum = 0.0;
        let mut count = 0usize;
        loop {
            sum += 2.0 * s - b;
            count += 1;
            let next = b + mu * dt + sd * normal(r);
            s = s.max(bridge_max(b, next, dt, r.random()));
            b = next;
            if s >= x {
                break;
            }
        }
        let start = 2.0 * s - b;
        for _ in 0..(horizon / dt).round() as usize {
            let next = b + mu * dt + sd * normal(r);
            s = s.max(bridge_max(b, next, dt, r.random()));
            b = next;
        }
        (sum / count as f64, 2.0 * s - b - start)
    });
    let (a, c): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let (ma, mc) = (mean(&a), mean(&c));
    let cov: f64 = a.iter().zip(&c).map(|(u, v)| (u - ma) * (v - mc)).sum::<f64>();
    let va: f64 = a.iter().map(|u| (u - ma).powi(2)).sum();
    let vc: f64 = c.iter().map(|v| (v - mc).powi(2)).sum();
    let rho = cov / (va * vc).sqrt();
    Ok(IndependenceOutcome { correlation: rho, stderr: (1.0 - rho * rho) / (reps as f64 - 1.0).sqrt(), n: reps })
}
