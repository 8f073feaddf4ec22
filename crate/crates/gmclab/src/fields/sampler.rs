use super::chaos::FieldSample;
use super::grid::Grid;
use super::kernel::{build_covariance_matrix, CovarianceSpec, Domain, Kernel};
use crate::error::{precondition, Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

enum Method {
    Dense { lower: DMatrix<f64> },
    Circulant { scale: Vec<f64>, fft: Arc<dyn Fft<f64>> },
    Fourier { amplitude: Vec<f64>, fft: Arc<dyn Fft<f64>> },
}

/// Reusable Gaussian sampler for one covariance on one grid.
pub struct FieldSampler {
    grid: Arc<Grid>,
    variance: Arc<Vec<f64>>,
    method: Method,
    /// Jitter added to the diagonal before factorisation (dense path only).
    pub jitter: f64,
}

impl FieldSampler {
    /// Cholesky factor of `C + jitter I`, escalating the jitter up to `1e-8 trace / n`.
    pub fn dense(spec: &CovarianceSpec, grid: Grid) -> Result<Self> {
        let c = build_covariance_matrix(spec, &grid)?;
        let n = grid.len();
        let variance: Vec<f64> = (0..n).map(|i| c[(i, i)]).collect();
        let mean_diag = variance.iter().sum::<f64>() / n as f64;
        let mut jitter = 0.0;
        let mut step = 1e-14;
        loop {
            let mut m = c.clone();
            for i in 0..n {
                m[(i, i)] += jitter;
            }
            if let Some(ch) = m.cholesky() {
                return Ok(FieldSampler {
                    grid: Arc::new(grid),
                    variance: Arc::new(variance),
                    method: Method::Dense { lower: ch.unpack() },
                    jitter,
                });
            }
            if step > 1e-8 {
                return Err(Error::NotPositiveDefinite(format!(
                    "{} on {n} points fails to factor with jitter {jitter:e}",
                    spec.kernel.id()
                )));
            }
            jitter = step * mean_diag.abs().max(1.0);
            step *= 10.0;
        }
    }

    /// Circulant embedding for stationary kernels on uniform one-dimensional grids.
    pub fn circulant(spec: &CovarianceSpec, grid: Grid) -> Result<Self> {
        spec.validate()?;
        if !spec.is_stationary() || grid.dim != 1 {
            return Err(precondition("circulant embedding needs a stationary 1-D kernel"));
        }
        let periodic = spec.domain == Domain::Circle;
        Self::embed(grid, periodic, |r| spec.lag_covariance(r))
    }

    /// Circulant embedding for an arbitrary stationary covariance `lag(|s - t|)` on a uniform 1-D grid.
    pub fn stationary<F: Fn(f64) -> f64>(grid: Grid, lag: F) -> Result<Self> {
        if grid.dim != 1 {
            return Err(precondition("circulant embedding needs a 1-D grid"));
        }
        Self::embed(grid, false, lag)
    }

    fn embed<F: Fn(f64) -> f64>(grid: Grid, periodic: bool, lag: F) -> Result<Self> {
        let h = grid.spacing.ok_or_else(|| precondition("circulant embedding needs a uniform grid"))?;
        let n = grid.len();
        let mut m = if periodic { n } else { (2 * n.saturating_sub(1)).max(2).next_power_of_two() };
        let mut planner = FftPlanner::new();
        for _ in 0..4 {
            let mut eig: Vec<Complex64> = (0..m)
                .map(|j| {
                    let d = j.min(m - j) as f64 * h;
                    let r = if periodic { 2.0 * (d / 2.0).sin() } else { d };
                    Complex64::new(lag(r), 0.0)
                })
                .collect();
            planner.plan_fft_forward(m).process(&mut eig);
            let max = eig.iter().map(|z| z.re).fold(f64::MIN, f64::max);
            let min = eig.iter().map(|z| z.re).fold(f64::MAX, f64::min);
            if min >= -1e-8 * max {
                let scale = eig.iter().map(|z| (z.re.max(0.0) / m as f64).sqrt()).collect();
                return Ok(FieldSampler {
                    grid: Arc::new(grid),
                    variance: Arc::new(vec![lag(0.0); n]),
                    method: Method::Circulant { scale, fft: planner.plan_fft_forward(m) },
                    jitter: 0.0,
                });
            }
            if periodic {
                return Err(Error::NotPositiveDefinite(format!("periodic covariance has eigenvalue {min:e}")));
            }
            m *= 2;
        }
        Err(Error::NotPositiveDefinite("circulant embedding stays indefinite".into()))
    }

    /// Independent Fourier modes of the truncated circle field (variance `1/k` per mode pair).
    pub fn fourier(spec: &CovarianceSpec, grid: Grid) -> Result<Self> {
        let Kernel::CircleGff { modes } = spec.kernel else {
            return Err(precondition("Fourier sampler needs the circle kernel"));
        };
        if spec.domain != Domain::Circle || grid.dim != 1 {
            return Err(precondition("Fourier sampler needs a circle grid"));
        }
        if !spec.offset.is_constant() || spec.offset.eval([0.0; 2], [0.0; 2]) != 0.0 {
            return Err(precondition("Fourier sampler supports a zero offset only"));
        }
        let n = grid.len();
        let amplitude: Vec<f64> = (1..=modes).map(|k| 1.0 / (k as f64).sqrt()).collect();
        let var: f64 = (1..=modes).map(|k| 1.0 / k as f64).sum();
        let fft = FftPlanner::new().plan_fft_inverse(n);
        Ok(FieldSampler {
            grid: Arc::new(grid),
            variance: Arc::new(vec![var; n]),
            method: Method::Fourier { amplitude, fft },
            jitter: 0.0,
        })
    }

    /// Fourier modes for the circle kernel on its own grid, dense factorisation otherwise.
    pub fn auto(spec: &CovarianceSpec, grid: Grid) -> Result<Self> {
        if matches!(spec.kernel, Kernel::CircleGff { .. }) && spec.domain == Domain::Circle {
            if let Ok(s) = Self::fourier(spec, grid.clone()) {
                return Ok(s);
            }
        }
        Self::dense(spec, grid)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn variance(&self) -> &Arc<Vec<f64>> {
        &self.variance
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldSample {
        let values = self.sample_values(rng);
        FieldSample { grid: self.grid.clone(), values, pointwise_variance: self.variance.clone() }
    }

    pub fn sample_values<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match &self.method {
            Method::Circulant { .. } => self.sample_pair(rng).0,
            _ => self.draw(rng).0,
        }
    }

    /// Two independent draws; the circulant and Fourier paths get both from one transform.
    pub fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
        match &self.method {
            Method::Dense { .. } => {
                let a = self.draw(rng).0;
                let b = self.draw(rng).0;
                (a, b)
            }
            _ => {
                let (a, b) = self.draw(rng);
                (a, b.expect("spectral draws come in pairs"))
            }
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<f64>, Option<Vec<f64>>) {
        let n = self.len();
        match &self.method {
            Method::Dense { lower } => {
                let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                let mut out = vec![0.0; n];
                for (j, &zj) in z.iter().enumerate() {
                    let col = lower.column(j);
                    for i in j..n {
                        out[i] += col[i] * zj;
                    }
                }
                (out, None)
            }
            Method::Circulant { scale, fft } => {
                let mut buf: Vec<Complex64> = scale
                    .iter()
                    .map(|&s| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex64::new(s * re, s * im)
                    })
                    .collect();
                fft.process(&mut buf);
                let a = buf[..n].iter().map(|z| z.re).collect();
                let b = buf[..n].iter().map(|z| z.im).collect();
                (a, Some(b))
            }
            Method::Fourier { amplitude, fft } => {
                let mut buf = vec![Complex64::new(0.0, 0.0); n];
                let mut other = vec![Complex64::new(0.0, 0.0); n];
                for (i, &amp) in amplitude.iter().enumerate() {
                    let k = (i + 1) % n;
                    let a: f64 = rng.sample(StandardNormal);
                    let b: f64 = rng.sample(StandardNormal);
                    buf[k] += Complex64::new(amp * a, -amp * b);
                    let a2: f64 = rng.sample(StandardNormal);
                    let b2: f64 = rng.sample(StandardNormal);
                    other[k] += Complex64::new(amp * a2, -amp * b2);
                }
                fft.process(&mut buf);
                fft.process(&mut other);
                let a = buf.iter().map(|z| z.re).collect();
                let b = other.iter().map(|z| z.re).collect();
                (a, Some(b))
            }
        }
    }
}

/// One draw of the field using the dense factorisation.
pub fn sample_field<R: Rng + ?Sized>(spec: &CovarianceSpec, grid: Grid, rng: &mut R) -> Result<FieldSample> {
    Ok(FieldSampler::dense(spec, grid)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn empirical_cov(s: &FieldSampler, i: usize, j: usize, reps: usize) -> (f64, f64) {
        let mut rng = substream(11, 3, 0);
        let mut xy = 0.0;
        let mut xx = 0.0;
        for _ in 0..reps {
            let (a, b) = s.sample_pair(&mut rng);
            xy += a[i] * a[j] + b[i] * b[j];
            xx += a[i] * a[i] + b[i] * b[i];
        }
        (xy / (2 * reps) as f64, xx / (2 * reps) as f64)
    }

    #[test]
    fn circulant_reproduces_lag_covariance() {
        let spec = CovarianceSpec::mollified(0.0, 1.0, 1.0 / 64.0).unwrap();
        let grid = Grid::interval(0.0, 1.0, 256).unwrap();
        let s = FieldSampler::circulant(&spec, grid).unwrap();
        let (cij, cii) = empirical_cov(&s, 10, 30, 4000);
        let h = 1.0 / 256.0;
        assert!((cij - spec.lag_covariance(20.0 * h)).abs() < 0.15);
        assert!((cii - spec.lag_covariance(0.0)).abs() < 0.2);
    }

    #[test]
    fn fourier_matches_series_variance() {
        let spec = CovarianceSpec::circle(64).unwrap();
        let s = FieldSampler::fourier(&spec, Grid::circle(256).unwrap()).unwrap();
        let (cij, cii) = empirical_cov(&s, 0, 40, 4000);
        let var: f64 = (1..=64).map(|k| 1.0 / k as f64).sum();
        assert!((cii - var).abs() < 0.15);
        let lag = 40.0 * 2.0 * std::f64::consts::PI / 256.0;
        assert!((cij - super::super::kernel::circle_series(lag, 64)).abs() < 0.1);
    }

    #[test]
    fn dense_is_deterministic_given_stream() {
        let spec = CovarianceSpec::cutoff(0.0, 0.5, 0.05).unwrap();
        let g = Grid::interval(0.0, 0.5, 5).unwrap();
        let a = sample_field(&spec, g.clone(), &mut substream(1, 2, 3)).unwrap();
        let b = sample_field(&spec, g, &mut substream(1, 2, 3)).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.values.len(), 5);
    }

    #[test]
    fn oversized_exact_kernel_is_rejected() {
        let spec = CovarianceSpec::cutoff(0.0, 8.0, 1e-3).unwrap();
        let g = Grid::interval(0.0, 8.0, 200).unwrap();
        assert!(matches!(FieldSampler::dense(&spec, g), Err(Error::NotPositiveDefinite(_))));
    }
}
