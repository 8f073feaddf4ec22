use super::{Path, PathKind, PathMeta};
use crate::error::{precondition, Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;

/// How the positive process with drift `mu coth(mu b)` is discretised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConditionedScheme {
    /// Euler-Maruyama with the drift evaluated at `max(b, sqrt(dt))` and reflection at 0.
    #[default]
    Euler,
    /// Norm of a three-dimensional Brownian motion with drift of length `mu`;
    /// exact in law at the grid times.
    Radial,
}

fn check_grid(t: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !(t >= dt) {
        return Err(precondition(format!("need 0 < dt <= T, got dt = {dt}, T = {t}")));
    }
    Ok((t / dt).round() as usize)
}

fn grid_times(n: usize, dt: f64) -> Vec<f64> {
    (0..=n).map(|i| i as f64 * dt).collect()
}

/// Maximum of a Brownian bridge from `a` to `b` over a step of length `dt`, given a uniform `u`.
pub fn bridge_max(a: f64, b: f64, dt: f64, u: f64) -> f64 {
    let d = b - a;
    0.5 * (a + b + (d * d - 2.0 * dt * (1.0 - u).ln()).sqrt())
}

/// Probability that a Brownian bridge from `a` to `b` over `dt` reaches `level`.
pub fn bridge_crossing_probability(a: f64, b: f64, level: f64, dt: f64) -> f64 {
    if a >= level || b >= level {
        1.0
    } else {
        (-2.0 * (level - a) * (level - b) / dt).exp()
    }
}

pub(crate) fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Brownian motion with drift `mu`, exact at the grid times, with bridge-sampled step maxima.
pub fn simulate_bm_drift<R: Rng + ?Sized>(mu: f64, t: f64, dt: f64, rng: &mut R) -> Result<Path> {
    let n = check_grid(t, dt)?;
    let sd = dt.sqrt();
    let mut values = Vec::with_capacity(n + 1);
    let mut step_max = Vec::with_capacity(n + 1);
    let mut x = 0.0;
    values.push(0.0);
    step_max.push(0.0);
    for _ in 0..n {
        let next = x + mu * dt + sd * normal(rng);
        step_max.push(bridge_max(x, next, dt, rng.random()));
        values.push(next);
        x = next;
    }
    Ok(Path {
        dt,
        times: grid_times(n, dt),
        values,
        meta: PathMeta { drift: mu, kind: PathKind::BmDrift },
        step_max: Some(step_max),
    })
}

pub(crate) struct ConditionedStepper {
    mu: f64,
    scheme: ConditionedScheme,
    b_min: f64,
    state: [f64; 3],
}

impl ConditionedStepper {
    pub(crate) fn new(mu: f64, dt: f64, scheme: ConditionedScheme) -> Self {
        ConditionedStepper { mu, scheme, b_min: dt.sqrt(), state: [0.0; 3] }
    }

    fn drift(&self, b: f64) -> f64 {
        let b = b.max(self.b_min);
        if self.mu == 0.0 {
            1.0 / b
        } else {
            self.mu / (self.mu * b).tanh()
        }
    }

    pub(crate) fn step<R: Rng + ?Sized>(&mut self, h: f64, rng: &mut R) -> f64 {
        let sd = h.sqrt();
        match self.scheme {
            ConditionedScheme::Euler => {
                let b = self.state[0];
                self.state[0] = (b + self.drift(b) * h + sd * normal(rng)).abs();
                self.state[0]
            }
            ConditionedScheme::Radial => {
                self.state[0] += self.mu * h + sd * normal(rng);
                self.state[1] += sd * normal(rng);
                self.state[2] += sd * normal(rng);
                let [a, b, c] = self.state;
                (a * a + b * b + c * c).sqrt()
            }
        }
    }
}

/// Values of the conditioned process started at 0 at times `first + i dt`, `i < count`.
pub fn conditioned_from<R: Rng + ?Sized>(
    mu: f64,
    first: f64,
    dt: f64,
    count: usize,
    scheme: ConditionedScheme,
    rng: &mut R,
) -> Vec<f64> {
    let mut c = ConditionedStepper::new(mu, dt, scheme);
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(c.step(first, rng));
    for _ in 1..count {
        out.push(c.step(dt, rng));
    }
    out
}

/// Brownian motion with drift `mu >= 0` conditioned to stay positive
/// (drift `mu coth(mu b)`, the three-dimensional Bessel process when `mu = 0`).
pub fn simulate_conditioned_bm<R: Rng + ?Sized>(
    mu: f64,
    t: f64,
    dt: f64,
    scheme: ConditionedScheme,
    rng: &mut R,
) -> Result<Path> {
    if !(mu >= 0.0) {
        return Err(precondition("conditioned drift must be nonnegative"));
    }
    let n = check_grid(t, dt)?;
    let mut values = vec![0.0];
    values.extend(conditioned_from(mu, dt, dt, n, scheme, rng));
    let kind = if mu == 0.0 { PathKind::Bes3 } else { PathKind::Conditioned };
    Ok(Path { dt, times: grid_times(n, dt), values, meta: PathMeta { drift: mu, kind }, step_max: None })
}

/// First step index `k` such that the path reaches `level` during `[k dt, (k+1) dt]`,
/// with bridge detection between grid points; also returns the values up to that step.
pub(crate) fn run_to_level<R: Rng + ?Sized>(
    mu: f64,
    level: f64,
    dt: f64,
    max_steps: usize,
    rng: &mut R,
) -> Option<(usize, Vec<f64>)> {
    let sd = dt.sqrt();
    let mut x = 0.0;
    let mut values = vec![0.0];
    for k in 0..max_steps {
        let next = x + mu * dt + sd * normal(rng);
        let p = bridge_crossing_probability(x, next, level, dt);
        if p >= 1.0 || rng.random::<f64>() < p {
            return Some((k, values));
        }
        values.push(next);
        x = next;
    }
    None
}

/// Drift `-mu` Brownian path assembled from an `Exp(2 mu)` maximum `M`, a drift `+mu`
/// path run until it reaches `M`, and `M` minus a conditioned path afterwards.
///
/// The hitting time is placed at the midpoint of the step in which the bridge
/// between grid points first reaches `M`.
pub fn williams_compose<R: Rng + ?Sized>(
    mu: f64,
    t: f64,
    dt: f64,
    scheme: ConditionedScheme,
    rng: &mut R,
) -> Result<(Path, f64)> {
    if !(mu > 0.0) {
        return Err(precondition("Williams decomposition needs mu > 0"));
    }
    let n = check_grid(t, dt)?;
    let m = -(1.0 - rng.random::<f64>()).ln() / (2.0 * mu);
    let guard = ((1e3 * (m / mu) / dt).ceil() as usize).max(16);
    let (k, mut values) = run_to_level(mu, m, dt, guard, rng)
        .ok_or_else(|| Error::Numerical(format!("maximum {m:.3e} not reached within {guard} steps")))?;
    values.truncate(n + 1);
    if values.len() <= n {
        let tau = (k as f64 + 0.5) * dt;
        let first = (k + 1) as f64 * dt - tau;
        let rest = n + 1 - values.len();
        values.extend(conditioned_from(mu, first, dt, rest, scheme, rng).into_iter().map(|b| m - b));
    }
    Ok((
        Path {
            dt,
            times: grid_times(n, dt),
            values,
            meta: PathMeta { drift: -mu, kind: PathKind::WilliamsComposite },
            step_max: None,
        },
        m,
    ))
}

/// `2 S - B` with `S` the running maximum (bridge maxima when the path carries them).
pub fn two_m_minus_b_transform(path: &Path, mu: f64) -> Result<Path> {
    if path.meta.kind != PathKind::BmDrift || (path.meta.drift - mu).abs() > 1e-12 {
        return Err(precondition("2M - B needs a drifted Brownian path with the stated drift"));
    }
    let s = path.running_max();
    let values = s.iter().zip(&path.values).map(|(s, b)| 2.0 * s - b).collect();
    Ok(Path {
        dt: path.dt,
        times: path.times.clone(),
        values,
        meta: PathMeta { drift: mu, kind: PathKind::TwoMMinusB },
        step_max: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn bridge_max_bounds() {
        assert!(bridge_max(0.0, 1.0, 0.01, 0.0) >= 1.0);
        assert!((bridge_max(0.3, -0.2, 0.01, 0.0) - 0.3).abs() < 1e-15);
        assert_eq!(bridge_crossing_probability(0.0, 2.0, 1.0, 0.1), 1.0);
        assert!(bridge_crossing_probability(0.0, 0.0, 1.0, 0.1) < 1e-8);
    }

    #[test]
    fn paths_start_at_zero_and_conditioned_stay_positive() {
        let mut r = substream(1, 1, 1);
        for scheme in [ConditionedScheme::Euler, ConditionedScheme::Radial] {
            let p = simulate_conditioned_bm(0.5, 1.0, 1e-3, scheme, &mut r).unwrap();
            assert_eq!(p.values[0], 0.0);
            assert_eq!(p.len(), 1001);
            assert!(p.values.iter().all(|&v| v >= 0.0));
        }
        let b = simulate_bm_drift(1.0, 1.0, 1e-2, &mut r).unwrap();
        assert_eq!(b.values[0], 0.0);
        let s = b.running_max();
        assert!(s.iter().zip(&b.values).all(|(s, v)| s >= v));
    }

    #[test]
    fn two_m_minus_b_dominates_input() {
        let mut r = substream(2, 1, 1);
        let b = simulate_bm_drift(1.0, 2.0, 1e-2, &mut r).unwrap();
        let out = two_m_minus_b_transform(&b, 1.0).unwrap();
        assert!(out.values.iter().zip(&b.values).all(|(o, i)| o >= i));
        assert!(two_m_minus_b_transform(&b, 0.5).is_err());
    }

    #[test]
    fn williams_never_exceeds_its_maximum() {
        let mut r = substream(3, 1, 1);
        for _ in 0..50 {
            let (p, m) = williams_compose(1.0, 2.0, 1e-2, ConditionedScheme::Radial, &mut r).unwrap();
            assert!(p.values.iter().all(|&v| v <= m));
            assert_eq!(p.len(), 201);
        }
    }

    #[test]
    fn bad_grid_rejected() {
        let mut r = substream(3, 1, 1);
        assert!(simulate_bm_drift(0.0, 0.001, 0.01, &mut r).is_err());
        assert!(simulate_conditioned_bm(-1.0, 1.0, 0.01, ConditionedScheme::Euler, &mut r).is_err());
    }
}
