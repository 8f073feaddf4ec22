use crate::error::{precondition, Error, Result};
use crate::gmc_moments::MomentEstimate;
use crate::rng;
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;

/// Sorted eigenangles in `[0, 2 pi)` of one circular beta ensemble draw.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenangleSample {
    pub angles: Vec<f64>,
    pub beta: f64,
}

/// Verblunsky coefficients of the CMV model: `|a_k|^2 ~ Beta(1, beta (N-k-1)/2)` with
/// uniform phase for `k < N-1`, and `a_{N-1}` uniform on the unit circle.
pub fn verblunsky<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let phase = 2.0 * PI * rng.random::<f64>();
            let r = if k + 1 == n {
                1.0
            } else {
                let b = beta * (n - k - 1) as f64 / 2.0;
                let u: f64 = rng.random();
                // Beta(1, b) by inversion
                (1.0 - (1.0 - u).powf(1.0 / b)).sqrt()
            };
            Complex64::from_polar(r, phase)
        })
        .collect()
}

/// Continuous phase `psi_{N-1}(theta)` of the Blaschke product `z Phi_{N-1}(z) / Phi*_{N-1}(z)`
/// at `z = e^{i theta}` and its derivative in `theta`.
fn phase(alpha: &[Complex64], theta: f64) -> (f64, f64) {
    let z = Complex64::from_polar(1.0, theta);
    let mut psi = theta;
    let mut dpsi = 1.0;
    let mut e = z;
    for a in &alpha[..alpha.len() - 1] {
        let ae = a * e;
        let w = Complex64::new(1.0 - ae.re, -ae.im);
        let n2 = w.norm_sqr();
        // d arg w / d theta = Im(w' conj(w)) / |w|^2 with w' = -i a e psi'
        let darg = -dpsi * (ae * w.conj()).re / n2;
        psi = theta + psi - 2.0 * w.im.atan2(w.re);
        dpsi = 1.0 + dpsi - 2.0 * darg;
        let wc = w.conj();
        e = z * e * wc * wc / n2;
    }
    (psi, dpsi)
}

/// Zeros of the paraorthogonal polynomial, i.e. solutions of `psi_{N-1}(theta) = -arg a_{N-1} mod 2 pi`.
pub fn eigenangles_from_verblunsky(alpha: &[Complex64]) -> Result<Vec<f64>> {
    let n = alpha.len();
    if n == 0 {
        return Err(precondition("need at least one Verblunsky coefficient"));
    }
    let target = -alpha[n - 1].arg();
    let f = |t: f64| phase(alpha, t);
    let grid = 4 * n;
    let h = 2.0 * PI / grid as f64;
    let vals: Vec<f64> = (0..=grid).map(|j| f(j as f64 * h).0).collect();
    let base = vals[0];
    // first branch of the target at or above psi(0)
    let m0 = ((base - target) / (2.0 * PI)).ceil();
    let mut roots = Vec::with_capacity(n);
    let mut j = 0;
    for m in 0..n {
        let level = target + 2.0 * PI * (m0 + m as f64);
        while j < grid && vals[j + 1] < level {
            j += 1;
        }
        let (mut lo, mut hi) = (j as f64 * h, (j + 1) as f64 * h);
        let mut x = 0.5 * (lo + hi);
        for _ in 0..100 {
            let (v, dv) = f(x);
            let g = v - level;
            if g.abs() < 1e-13 {
                break;
            }
            if g < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let newton = x - g / dv;
            x = if dv > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-14 {
                break;
            }
        }
        if !x.is_finite() {
            return Err(Error::Numerical("eigenangle solver diverged".into()));
        }
        roots.push(x.rem_euclid(2.0 * PI));
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

pub fn sample_cbe<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> Result<EigenangleSample> {
    if n == 0 || !(beta > 0.0) {
        return Err(precondition("need N >= 1 and beta > 0"));
    }
    let alpha = verblunsky(n, beta, rng);
    Ok(EigenangleSample { angles: eigenangles_from_verblunsky(&alpha)?, beta })
}

/// `log |P_N(theta)| = sum_j log |1 - e^{i(theta_j - theta)}|`.
pub fn log_abs_char_poly(angles: &[f64], theta: f64) -> f64 {
    angles.iter().map(|&a| (2.0 * ((a - theta) / 2.0).sin().abs()).ln()).sum()
}

/// `|P_N(theta)|^{2s}` on a grid, computed in log space; exact eigenangle hits are nudged by `1e-12`.
pub fn char_poly_pow(sample: &EigenangleSample, theta_grid: &[f64], s: f64) -> Vec<f64> {
    theta_grid
        .iter()
        .map(|&t| {
            if s == 0.0 {
                return 1.0;
            }
            let mut l = log_abs_char_poly(&sample.angles, t);
            if !l.is_finite() {
                l = log_abs_char_poly(&sample.angles, t + 1e-12);
            }
            (2.0 * s * l).exp()
        })
        .collect()
}

/// Monte Carlo `E[((1/2 pi) int |P_N|^{2s})^k]` with the periodic trapezoid rule on `grid_size` nodes.
pub fn mom_estimate(n: usize, beta: f64, k: f64, s: f64, grid_size: usize, reps: usize, seed: u64) -> Result<MomentEstimate> {
    if grid_size < 8 * n {
        return Err(Error::Resolution(format!("grid of {grid_size} nodes is below 8N = {}", 8 * n)));
    }
    if k == 0.0 {
        return Ok(MomentEstimate { value: 1.0, stderr: 0.0, replicates: reps, method: crate::gmc_moments::EstimateMethod::MonteCarlo, heavy_tail_flag: false });
    }
    let grid: Vec<f64> = (0..grid_size).map(|j| 2.0 * PI * j as f64 / grid_size as f64).collect();
    let vals = rng::par_replicates(seed, rng::tag("mom"), reps, |r, _| {
        let sample = sample_cbe(n, beta, r)?;
        // a random rotation keeps grid nodes off the eigenangles
        let shift = 2.0 * PI * r.random::<f64>() / grid_size as f64;
        let shifted: Vec<f64> = grid.iter().map(|t| t + shift).collect();
        let m = char_poly_pow(&sample, &shifted, s).iter().sum::<f64>() / grid_size as f64;
        Ok(m.powf(k))
    });
    let vals: Vec<f64> = vals.into_iter().collect::<Result<_>>()?;
    Ok(MomentEstimate::from_replicates(&vals))
}

/// Monte Carlo `E[prod_j |P_N(theta_j)|^{2s}]` under the circular beta ensemble.
pub fn cross_moment_mc(n: usize, beta: f64, s: f64, thetas: &[f64], reps: usize, seed: u64) -> Result<MomentEstimate> {
    let vals = rng::par_replicates(seed, rng::tag("cross-moment"), reps, |r, _| {
        let sample = sample_cbe(n, beta, r)?;
        Ok(char_poly_pow(&sample, thetas, s).iter().product::<f64>())
    });
    let vals: Vec<f64> = vals.into_iter().collect::<Result<_>>()?;
    Ok(MomentEstimate::from_replicates(&vals))
}

/// `E_{CbE(N)} |P_N|^{2s} = prod_{j<N} Gamma(1 + j b) Gamma(1 + 2s + j b) / Gamma(1 + s + j b)^2`, `b = beta/2`, in log space.
pub fn ks_moment_exact_log(n: usize, beta: f64, s: f64) -> Result<f64> {
    use crate::specfun::log_gamma;
    let b = beta / 2.0;
    let mut acc = 0.0;
    for j in 0..n {
        let x = 1.0 + j as f64 * b;
        acc += log_gamma(x)? + log_gamma(x + 2.0 * s)? - 2.0 * log_gamma(x + s)?;
    }
    Ok(acc)
}

pub fn ks_moment_exact(n: usize, beta: f64, s: f64) -> Result<f64> {
    Ok(ks_moment_exact_log(n, beta, s)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn eigenangles_are_roots_of_paraorthogonal_polynomial() {
        let mut r = substream(1, 1, 1);
        let alpha = verblunsky(12, 2.0, &mut r);
        let angles = eigenangles_from_verblunsky(&alpha).unwrap();
        assert_eq!(angles.len(), 12);
        // evaluate Phi_N(z) = z Phi_{N-1} - conj(a_{N-1}) Phi*_{N-1} by the Szego recursion
        for &t in &angles {
            let z = Complex64::from_polar(1.0, t);
            let (mut p, mut q) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
            for a in &alpha[..11] {
                let (np, nq) = (z * p - a.conj() * q, q - a * z * p);
                p = np;
                q = nq;
            }
            let last = z * p - alpha[11].conj() * q;
            assert!(last.norm() < 1e-9 * q.norm(), "{t}: {}", last.norm());
        }
        assert!(angles.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn exact_moment_telescopes() {
        assert!((ks_moment_exact(3, 2.0, 1.0).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(ks_moment_exact(7, 2.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn char_poly_power_cases() {
        let s = EigenangleSample { angles: vec![0.0], beta: 2.0 };
        assert!((char_poly_pow(&s, &[PI], 0.7)[0] - 2f64.powf(1.4)).abs() < 1e-12);
        assert_eq!(char_poly_pow(&s, &[0.3, 1.0], 0.0), vec![1.0, 1.0]);
        assert!(char_poly_pow(&s, &[0.0], 0.5)[0].is_finite());
    }

    #[test]
    fn coarse_grid_is_rejected() {
        assert!(matches!(mom_estimate(16, 2.0, 1.0, 1.0, 100, 100, 1), Err(Error::Resolution(_))));
        assert_eq!(mom_estimate(16, 2.0, 0.0, 1.0, 128, 100, 1).unwrap().value, 1.0);
    }
}
