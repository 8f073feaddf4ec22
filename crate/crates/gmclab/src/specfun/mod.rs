//! Gamma-family special functions and the explicit asymptotic constants.

mod barnes;
mod gamma;
mod upsilon;

pub use barnes::{barnes_g, SignedLog};
pub use gamma::{gamma, gamma_signed, log_gamma, EULER_GAMMA};
pub use upsilon::{upsilon_bracket, upsilon_beta};

pub(crate) use barnes::ln_barnes_g_pos;
pub(crate) use gamma::ln_gamma_pos;

use crate::error::{domain, precondition, Error, Result};
use crate::quad::{self, GaussLegendre};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Chaos parameters: `gamma` and the dimension `d`, with `p = 2d / gamma^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmcParams {
    pub gamma: f64,
    pub d: u32,
}

impl GmcParams {
    pub fn new(gamma: f64, d: u32) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(domain(format!("gamma must be positive, got {gamma}")));
        }
        if d != 1 && d != 2 {
            return Err(domain(format!("dimension must be 1 or 2, got {d}")));
        }
        Ok(GmcParams { gamma, d })
    }

    /// Critical moment order `2d / gamma^2`.
    pub fn p(&self) -> f64 {
        2.0 * self.d as f64 / (self.gamma * self.gamma)
    }

    pub fn require_subcritical(&self) -> Result<()> {
        let g2 = self.gamma * self.gamma;
        if g2 >= 2.0 * self.d as f64 {
            return Err(domain(format!(
                "gamma^2 = {g2} is not below 2d = {}",
                2 * self.d
            )));
        }
        Ok(())
    }
}

/// Natural logarithm of the reflection coefficient.
///
/// The coefficient itself overflows `f64` for small `gamma`, its logarithm does not.
pub fn log_reflection_coefficient(params: GmcParams) -> Result<f64> {
    params.require_subcritical()?;
    let g2 = params.gamma * params.gamma;
    match params.d {
        1 => {
            let a = 1.0 - 0.5 * g2;
            let e = 2.0 / g2;
            Ok((e - 1.0) * (2.0 * PI).ln() - a.ln() - e * ln_gamma_pos(a))
        }
        _ => {
            let q = 0.25 * g2;
            let e = 4.0 / g2 - 1.0;
            let base = PI.ln() + ln_gamma_pos(q) - ln_gamma_pos(1.0 - q);
            let (lg, sg) = gamma_signed(q - 1.0)?;
            // the leading minus sign cancels against Gamma(q - 1) < 0
            if sg > 0.0 {
                return Err(Error::Numerical("Gamma(gamma^2/4 - 1) is not negative".into()));
            }
            Ok(e * base - e.ln() + lg - ln_gamma_pos(1.0 - q) - ln_gamma_pos(e))
        }
    }
}

/// Closed-form reflection coefficient of the chaos measure.
pub fn reflection_coefficient(params: GmcParams) -> Result<f64> {
    let ln = log_reflection_coefficient(params)?;
    let v = ln.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical(format!(
            "reflection coefficient exp({ln:.1}) overflows; use the log form"
        )))
    }
}

/// `Gamma(1 - k gamma^2 / 2) / Gamma(1 - gamma^2 / 2)^k`.
pub fn fyodorov_bouchaud(k: f64, gamma: f64) -> Result<f64> {
    let g2 = gamma * gamma;
    if !(g2 > 0.0 && g2 < 2.0) {
        return Err(domain(format!("need 0 < gamma^2 < 2, got {g2}")));
    }
    if !(k > 0.0) {
        return Err(domain(format!("need k > 0, got {k}")));
    }
    let a = 1.0 - k * g2 / 2.0;
    if !(a > 0.0) {
        return Err(domain(format!("k = {k} reaches the pole at 2/gamma^2 = {}", 2.0 / g2)));
    }
    if k == 1.0 {
        return Ok(1.0);
    }
    Ok((ln_gamma_pos(a) - k * ln_gamma_pos(1.0 - g2 / 2.0)).exp())
}

/// Coefficient of `log(1/eps)` in the critical moment blow-up.
///
/// `weight_integral` is `int_D exp(d (p - 1) f(u, u)) g(u)^p du`.
pub fn theorem_slope(params: GmcParams, weight_integral: f64) -> Result<f64> {
    let c = reflection_coefficient(params)?;
    let p = params.p();
    Ok(weight_integral * 0.5 * params.gamma * params.gamma * (p - 1.0).powi(2) * c)
}

/// Leading constant of the chaos tail `P(int g dM > t) ~ C / t^p`.
pub fn tail_constant(params: GmcParams, weight_integral: f64) -> Result<f64> {
    let c = reflection_coefficient(params)?;
    Ok(weight_integral * (1.0 - 1.0 / params.p()) * c)
}

/// Limit of `(p - 1 - a) E[(int |x|^{-gamma^2} M(dx))^a]` as `a -> p - 1` from below.
pub fn lower_limit_constant(params: GmcParams) -> Result<f64> {
    Ok((params.p() - 1.0) * reflection_coefficient(params)?)
}

/// One-sided bound `(2 pi)^{k-1} (k - 1) / Gamma(1 - 1/k)^k` for the dyadic toy model.
pub fn branching_walk_bound(k: f64) -> Result<f64> {
    if !(k > 1.0) {
        return Err(domain(format!("need k > 1, got {k}")));
    }
    Ok(((k - 1.0) * (2.0 * PI).ln() + (k - 1.0).ln() - k * ln_gamma_pos(1.0 - 1.0 / k)).exp())
}

/// `int_D exp(d (p - 1) f(u, u)) g(u)^p du` over an interval.
pub fn weight_integral_1d<F, G>(p: f64, f_diag: F, g: G, a: f64, b: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let r = quad::integrate(
        |u| ((p - 1.0) * f_diag(u)).exp() * g(u).powf(p),
        a,
        b,
        1e-12,
        1e-12,
    )?;
    Ok(r.value)
}

/// Same weight over the rectangle `[a0, b0] x [a1, b1]` by tensor Gauss-Legendre.
pub fn weight_integral_2d<F, G>(
    p: f64,
    f_diag: F,
    g: G,
    lo: [f64; 2],
    hi: [f64; 2],
) -> f64
where
    F: Fn([f64; 2]) -> f64,
    G: Fn([f64; 2]) -> f64,
{
    let gl = GaussLegendre::new(48);
    let mut s = 0.0;
    for (x, wx) in gl.mapped(lo[0], hi[0]) {
        for (y, wy) in gl.mapped(lo[1], hi[1]) {
            s += wx * wy * (2.0 * (p - 1.0) * f_diag([x, y])).exp() * g([x, y]).powf(p);
        }
    }
    s
}

/// `G(1 + s)^2 / G(1 + 2s)`.
pub fn keating_snaith_prefactor(s: f64) -> Result<f64> {
    if !(s > -0.5) {
        return Err(domain(format!("need s > -1/2, got {s}")));
    }
    Ok((2.0 * ln_barnes_g_pos(1.0 + s) - ln_barnes_g_pos(1.0 + 2.0 * s)).exp())
}

/// `exp(U(1 - b/2) + U(1 + 2s - b/2) - 2 U(1 + s - b/2))` with `U = upsilon_beta(., b)`.
pub fn cbe_prefactor(s: f64, beta: f64) -> Result<f64> {
    let h = 1.0 - 0.5 * beta;
    let v = upsilon_beta(h, beta)? + upsilon_beta(h + 2.0 * s, beta)?
        - 2.0 * upsilon_beta(h + s, beta)?;
    Ok(v.exp())
}

/// `(1 / 2 pi) int_0^{2 pi} |1 - e^{2 i theta}|^a d theta` for `a > -1`.
///
/// Composite Gauss-Legendre on panels graded towards the integrable
/// singularity at `theta = 0`, using the symmetry of `|sin|`.
pub fn power_sine_mean(a: f64) -> Result<f64> {
    if !(a > -1.0) {
        return Err(domain(format!(
            "|1 - e^(2i theta)|^{a} is not integrable (exponent must exceed -1)"
        )));
    }
    let gl = GaussLegendre::new(20);
    let half = 0.5 * PI;
    let tiny: f64 = 1e-14;
    // int_0^tiny (2 theta)^a
    let mut s = (2.0 * tiny).powf(a) * tiny / (a + 1.0);
    let mut lo = tiny;
    while lo < half {
        let hi = (2.0 * lo).min(half);
        s += gl.integrate(|t| (2.0 * t.sin()).powf(a), lo, hi);
        lo = hi;
    }
    Ok(2.0 * s / PI)
}

/// Matrix ensemble for moments of moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Ensemble {
    Cue,
    CBetaE { beta: f64 },
    On,
    Sp2N,
}

/// Ensemble together with the moment parameters `k` and `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFormula {
    pub ensemble: Ensemble,
    pub k: f64,
    pub s: f64,
}

impl EnsembleFormula {
    pub fn new(ensemble: Ensemble, k: f64, s: f64) -> Result<Self> {
        if !(k > 0.0) || !(s > 0.0) {
            return Err(domain(format!("need k > 0 and s > 0, got k = {k}, s = {s}")));
        }
        if let Ensemble::CBetaE { beta } = ensemble {
            if !(beta > 0.0) {
                return Err(domain(format!("need beta > 0, got {beta}")));
            }
        }
        Ok(EnsembleFormula { ensemble, k, s })
    }

    /// Signed distance from criticality, zero when critical.
    pub fn criticality(&self) -> f64 {
        match self.ensemble {
            Ensemble::CBetaE { beta } => self.k * 2.0 * self.s * self.s / beta - 1.0,
            _ => self.k * self.s * self.s - 1.0,
        }
    }
}

/// Growth shape `N^exponent (log N)^log_power`, with `N` replaced by `2N` for `Sp(2N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadingOrder {
    /// Leading constant; `None` when no explicit constant is known.
    pub constant: Option<f64>,
    pub n_exponent: f64,
    pub log_power: u32,
    /// Multiplier of `N` in the power part (1 or 2).
    pub n_scale: f64,
    /// Full leading-order value at the requested `N`, when the constant is known.
    pub value: Option<f64>,
}

impl LeadingOrder {
    pub fn constant_known(&self) -> bool {
        self.constant.is_some()
    }
}

const CRITICAL_TOL: f64 = 1e-9;

fn critical_cue_constant(k: f64) -> Result<f64> {
    let s = 1.0 / k.sqrt();
    Ok(((k - 1.0).ln() - k * ln_gamma_pos(1.0 - 1.0 / k)).exp()
        * keating_snaith_prefactor(s)?.powf(k))
}

/// Leading-order asymptotics of moments of moments.
pub fn mom_leading_order(formula: EnsembleFormula, n: u64) -> Result<LeadingOrder> {
    if n == 0 {
        return Err(precondition("N must be positive"));
    }
    let EnsembleFormula { ensemble, k, s } = formula;
    let nf = n as f64;
    let crit = formula.criticality();
    let is_critical = crit.abs() <= CRITICAL_TOL;
    let build = |c: Option<f64>, exponent: f64, log_power: u32, scale: f64| {
        let value = c.map(|c| {
            c * (scale * nf).powf(exponent) * if log_power == 1 { nf.ln() } else { 1.0 }
        });
        LeadingOrder { constant: c, n_exponent: exponent, log_power, n_scale: scale, value }
    };
    match ensemble {
        Ensemble::Cue => {
            if (k - 1.0).abs() <= CRITICAL_TOL {
                return Ok(build(Some(keating_snaith_prefactor(s)?), s * s, 0, 1.0));
            }
            if is_critical {
                if k <= 1.0 {
                    return Err(precondition("critical regime needs k > 1"));
                }
                return Ok(build(Some(critical_cue_constant(k)?), 1.0, 1, 1.0));
            }
            if crit < 0.0 {
                let c = fyodorov_bouchaud(k, 2f64.sqrt() * s)? * keating_snaith_prefactor(s)?.powf(k);
                return Ok(build(Some(c), k * s * s, 0, 1.0));
            }
            Ok(build(None, k * k * s * s - k + 1.0, 0, 1.0))
        }
        Ensemble::CBetaE { beta } => {
            if !is_critical {
                return Err(precondition(format!(
                    "circular beta formula covers only k = beta / (2 s^2); got k = {k}, beta / (2 s^2) = {}",
                    beta / (2.0 * s * s)
                )));
            }
            if k <= 1.0 {
                return Err(precondition("critical regime needs 2 s^2 < beta"));
            }
            let c = ((k - 1.0).ln() - k * ln_gamma_pos(1.0 - 1.0 / k)).exp()
                * cbe_prefactor(s, beta)?.powf(k);
            Ok(build(Some(c), 1.0, 1, 1.0))
        }
        Ensemble::On | Ensemble::Sp2N => {
            if !is_critical {
                return Err(precondition(format!(
                    "orthogonal/symplectic formulas cover only s = 1/sqrt(k); got k s^2 = {}",
                    k * s * s
                )));
            }
            if k <= 1.0 {
                return Err(precondition("critical regime needs k > 1"));
            }
            let (a, scale) = if ensemble == Ensemble::On {
                (k + k.sqrt() - 2.0, 1.0)
            } else {
                let golden = 0.5 * (1.0 + 5f64.sqrt());
                if k <= golden * golden {
                    return Err(domain(format!(
                        "symplectic formula needs k > ((1 + sqrt 5)/2)^2 = {}, got {k}",
                        golden * golden
                    )));
                }
                (k - k.sqrt() - 2.0, 2.0)
            };
            let c = critical_cue_constant(k)? * power_sine_mean(a)?;
            let mut lo = build(Some(c), 1.0, 1, scale);
            // the symplectic leading order is c * 2N * log N
            lo.value = Some(c * scale * nf * nf.ln());
            Ok(lo)
        }
    }
}
