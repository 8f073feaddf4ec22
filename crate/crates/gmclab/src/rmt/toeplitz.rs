use crate::error::{domain, precondition, Error, Result};
use crate::quad::{graded_breaks, GaussLegendre};
use crate::specfun::keating_snaith_prefactor;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Symbol `prod_j |z - e^{i theta_j}|^{2s}` with the dimension of its Toeplitz matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherHartwigSymbol {
    pub singular_angles: Vec<f64>,
    pub s: f64,
    pub n: usize,
}

impl FisherHartwigSymbol {
    pub fn new(singular_angles: Vec<f64>, s: f64, n: usize) -> Result<Self> {
        let sym = FisherHartwigSymbol { singular_angles, s, n };
        sym.validate()?;
        Ok(sym)
    }

    pub fn validate(&self) -> Result<()> {
        if self.singular_angles.is_empty() {
            return Err(precondition("need at least one singularity"));
        }
        if !(self.s >= 0.0) {
            return Err(domain(format!("exponent must be nonnegative, got {}", self.s)));
        }
        if self.n == 0 || self.n > MAX_DIMENSION {
            return Err(precondition(format!("matrix dimension must lie in 1..={MAX_DIMENSION}")));
        }
        Ok(())
    }
}

pub const MAX_DIMENSION: usize = 1024;
pub const MAX_DETERMINANTS: usize = 1_000_000;

/// Fourier coefficients `c_0..=c_len` of `|1 - e^{i theta}|^{2s}`.
pub fn single_singularity_coefficients(s: f64, len: usize) -> Result<Vec<f64>> {
    let c0 = (crate::specfun::log_gamma(1.0 + 2.0 * s)? - 2.0 * crate::specfun::log_gamma(1.0 + s)?).exp();
    let mut c = Vec::with_capacity(len + 1);
    c.push(c0);
    for m in 0..len {
        let mf = m as f64;
        c.push(c[m] * (mf - s) / (mf + 1.0 + s));
    }
    Ok(c)
}

/// Coefficients `f_0..f_{n-1}` of the symbol, from the per-singularity series truncated
/// at `|m| <= fft_len / 4` and multiplied on an FFT grid of length `fft_len`.
pub fn symbol_coefficients(sym: &FisherHartwigSymbol, fft_len: usize) -> Result<Vec<Complex64>> {
    sym.validate()?;
    let n = sym.n;
    if sym.singular_angles.len() == 1 {
        let c = single_singularity_coefficients(sym.s, n)?;
        let t = sym.singular_angles[0];
        return Ok((0..n).map(|m| c[m] * Complex64::from_polar(1.0, -(m as f64) * t)).collect());
    }
    let k = sym.singular_angles.len();
    let half = fft_len / (k + 1);
    if half < n {
        return Err(precondition("FFT grid too short for the requested dimension"));
    }
    let c = single_singularity_coefficients(sym.s, half)?;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(fft_len);
    let inv = planner.plan_fft_inverse(fft_len);
    let mut acc = vec![Complex64::new(1.0, 0.0); fft_len];
    let mut buf = vec![Complex64::new(0.0, 0.0); fft_len];
    for &t in &sym.singular_angles {
        buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
        buf[0] = Complex64::new(c[0], 0.0);
        for m in 1..=half {
            let e = Complex64::from_polar(c[m], -(m as f64) * t);
            buf[m] = e;
            buf[fft_len - m] = e.conj();
        }
        fwd.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a *= b;
        }
    }
    inv.process(&mut acc);
    let scale = 1.0 / fft_len as f64;
    Ok(acc[..n].iter().map(|v| v * scale).collect())
}

/// `log det (f_{j-k})_{j,k<n}` for Hermitian Toeplitz data `f_0..f_{n-1}` by the Levinson recursion.
pub fn hermitian_toeplitz_logdet(f: &[Complex64]) -> Result<f64> {
    let n = f.len();
    if n == 0 {
        return Ok(0.0);
    }
    let mut e = f[0].re;
    if !(e > 0.0) {
        return Err(Error::NotPositiveDefinite("nonpositive diagonal".into()));
    }
    let mut logdet = e.ln();
    let mut a = vec![Complex64::new(1.0, 0.0)];
    for m in 0..n - 1 {
        let delta: Complex64 = (0..=m).map(|j| f[m + 1 - j] * a[j]).sum();
        let kappa = -delta / e;
        let q = 1.0 - kappa.norm_sqr();
        if !(q > 0.0) {
            return Err(Error::NotPositiveDefinite(format!("reflection coefficient of modulus {} at order {}", kappa.norm(), m + 1)));
        }
        a.push(Complex64::new(0.0, 0.0));
        let prev = a.clone();
        for i in 0..=m + 1 {
            a[i] = prev[i] + kappa * prev[m + 1 - i].conj();
        }
        e *= q;
        logdet += e.ln();
    }
    Ok(logdet)
}

fn fft_length(n: usize) -> usize {
    (64 * n).max(1 << 16).next_power_of_two()
}

/// `log D_n(f)`; a failed factorization is retried once on a grid four times longer.
pub fn toeplitz_determinant(sym: &FisherHartwigSymbol) -> Result<f64> {
    sym.validate()?;
    if sym.s == 0.0 {
        return Ok(0.0);
    }
    let len = fft_length(sym.n);
    match symbol_coefficients(sym, len).and_then(|f| hermitian_toeplitz_logdet(&f)) {
        Err(Error::NotPositiveDefinite(_)) => hermitian_toeplitz_logdet(&symbol_coefficients(sym, 4 * len)?),
        r => r,
    }
}

/// Gauss-Legendre nodes on `[a, b]` with panels graded geometrically towards the ends.
fn graded_rule(a: f64, b: f64, first: f64, nodes: usize, both_ends: bool) -> Vec<(f64, f64)> {
    let span = if both_ends { 0.5 * (b - a) } else { b - a };
    let breaks = graded_breaks(span, first.min(0.25 * span), 2.0);
    let panels = breaks.len() - 1;
    let sides = if both_ends { 2 } else { 1 };
    let order = nodes.div_ceil(panels * sides).max(4);
    let gl = GaussLegendre::new(order);
    let mut out = Vec::with_capacity(order * panels * sides);
    for w in breaks.windows(2) {
        for (x, wt) in gl.mapped(w[0], w[1]) {
            out.push((a + x, wt));
            if both_ends {
                out.push((b - x, wt));
            }
        }
    }
    out
}

/// Deterministic `MoM_N(k, s)` by the Heine identity and graded quadrature over the free angles.
///
/// `quad_nodes` is the node budget per angular dimension.
pub fn toeplitz_mom(n: usize, k: u32, s: f64, quad_nodes: usize) -> Result<f64> {
    if !(k == 2 || k == 3) {
        return Err(precondition(format!("k must be 2 or 3, got {k}")));
    }
    if quad_nodes < 128 {
        return Err(precondition("need at least 128 quadrature nodes per dimension"));
    }
    if !(s >= 0.0) {
        return Err(domain(format!("exponent must be nonnegative, got {s}")));
    }
    if n == 0 || n > MAX_DIMENSION {
        return Err(precondition(format!("N must lie in 1..={MAX_DIMENSION}")));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    let first = 0.25 / n as f64;
    let det = |angles: Vec<f64>| -> Result<f64> {
        Ok(toeplitz_determinant(&FisherHartwigSymbol { singular_angles: angles, s, n })?.exp())
    };
    if k == 2 {
        // D(phi) = D(2 pi - phi)
        let rule = graded_rule(0.0, PI, first, quad_nodes, false);
        let vals: Vec<f64> = rule
            .par_iter()
            .map(|&(x, w)| det(vec![0.0, x]).map(|d| w * d))
            .collect::<Result<_>>()?;
        return Ok(vals.iter().sum::<f64>() / PI);
    }
    let outer = graded_rule(0.0, 2.0 * PI, first, quad_nodes, true);
    let inner_len = graded_rule(0.0, 1.0, first, quad_nodes, true).len();
    if outer.len() * inner_len > MAX_DETERMINANTS {
        return Err(precondition(format!("{} determinants exceed the budget of {MAX_DETERMINANTS}", outer.len() * inner_len)));
    }
    let vals: Vec<f64> = outer
        .par_iter()
        .map(|&(x, w)| {
            let inner = graded_rule(x, 2.0 * PI, first, quad_nodes, true);
            let mut acc = 0.0;
            for (y, v) in inner {
                acc += v * det(vec![0.0, x, y])?;
            }
            Ok(w * acc)
        })
        .collect::<Result<_>>()?;
    // two orderings of the free angles
    Ok(2.0 * vals.iter().sum::<f64>() / (4.0 * PI * PI))
}

fn chord(a: f64, b: f64) -> f64 {
    2.0 * ((a - b) / 2.0).sin().abs()
}

/// Ratio of `D_N` to its separated-singularity asymptotic
/// `N^{k s^2} (G(1+s)^2 / G(1+2s))^k prod_{u<v} |e^{i theta_u} - e^{i theta_v}|^{-2 s^2}`.
pub fn fh_uniformity_check(thetas: &[f64], s: f64, n: usize, delta: f64) -> Result<f64> {
    if thetas.is_empty() {
        return Err(precondition("need at least one angle"));
    }
    let min_sep = (n as f64).powf(-(1.0 - delta));
    for (i, &a) in thetas.iter().enumerate() {
        for &b in &thetas[i + 1..] {
            if chord(a, b) < min_sep {
                return Err(precondition(format!("separation {} below N^-(1-delta) = {min_sep}", chord(a, b))));
            }
        }
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    let logd = toeplitz_determinant(&FisherHartwigSymbol::new(thetas.to_vec(), s, n)?)?;
    Ok((logd - log_separated_asymptotic(thetas, s, n, 0.0)?).exp())
}

/// `log` of the separated asymptotic, with each chord floored at `floor`.
fn log_separated_asymptotic(thetas: &[f64], s: f64, n: usize, floor: f64) -> Result<f64> {
    let k = thetas.len() as f64;
    let mut l = k * s * s * (n as f64).ln() + k * keating_snaith_prefactor(s)?.ln();
    for (i, &a) in thetas.iter().enumerate() {
        for &b in &thetas[i + 1..] {
            l -= 2.0 * s * s * chord(a, b).max(floor).ln();
        }
    }
    Ok(l)
}

/// Outcome of the uniform upper-bound check over random angle tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperBoundCheck {
    /// Largest ratio over the fitting half of the tuples.
    pub fitted_constant: f64,
    /// Largest ratio over the held-out half.
    pub holdout_max: f64,
    /// Held-out tuples exceeding three times the fitted constant.
    pub exceedances: usize,
    pub tuples: usize,
}

/// Ratios `D_N / (N^{k s^2} prod (|e^{i theta_u} - e^{i theta_v}| v 1/N)^{-2 s^2})` over random tuples.
///
/// Half the tuples cluster their angles at distances log-uniform in `[1/(4N), 1]` to probe merging.
pub fn fh_upper_bound_check(k: usize, n: usize, s: f64, tuples: usize, seed: u64) -> Result<UpperBoundCheck> {
    use rand::Rng;
    if k == 0 || tuples < 2 {
        return Err(precondition("need k >= 1 and at least two tuples"));
    }
    let floor = 1.0 / n as f64;
    let ratios = crate::rng::par_replicates(seed, crate::rng::tag("fh-bound"), tuples, |r, i| {
        let mut angles = vec![2.0 * PI * r.random::<f64>()];
        for _ in 1..k {
            let t = if i % 2 == 0 {
                2.0 * PI * r.random::<f64>()
            } else {
                let lo = (0.25 * floor).ln();
                let d = (lo + (0.0 - lo) * r.random::<f64>()).exp();
                angles[0] + if r.random::<bool>() { d } else { -d }
            };
            angles.push(t.rem_euclid(2.0 * PI));
        }
        let logd = toeplitz_determinant(&FisherHartwigSymbol::new(angles.clone(), s, n)?)?;
        let ks = k as f64 * keating_snaith_prefactor(s)?.ln();
        Ok((logd - log_separated_asymptotic(&angles, s, n, floor)? + ks).exp())
    });
    let ratios: Vec<f64> = ratios.into_iter().collect::<Result<_>>()?;
    let (fit, hold) = ratios.split_at(tuples / 2);
    let c = fit.iter().cloned().fold(0.0, f64::max);
    let holdout_max = hold.iter().cloned().fold(0.0, f64::max);
    Ok(UpperBoundCheck {
        fitted_constant: c,
        holdout_max,
        exceedances: hold.iter().filter(|&&r| r > 3.0 * c).count(),
        tuples,
    })
}
