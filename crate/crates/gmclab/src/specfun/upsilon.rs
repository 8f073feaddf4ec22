use super::barnes::ln_barnes_g_pos;
use super::gamma::ln_gamma_pos;
use crate::error::{domain, Result};
use crate::quad;

/// `1/(2t) - 1/t^2 + 1/(t(e^t - 1))`, finite at `t = 0` with limit `1/12`.
pub fn upsilon_bracket(t: f64) -> f64 {
    if t < 0.5 {
        const C: [f64; 6] = [
            1.0 / 12.0,
            -1.0 / 720.0,
            1.0 / 30_240.0,
            -1.0 / 1_209_600.0,
            1.0 / 47_900_160.0,
            -691.0 / 1_307_674_368_000.0,
        ];
        let t2 = t * t;
        let mut s = 0.0;
        for &c in C.iter().rev() {
            s = s * t2 + c;
        }
        return s;
    }
    0.5 / t - 1.0 / (t * t) + 1.0 / (t * t.exp_m1())
}

/// The function entering the circular beta ensemble moments-of-moments constant.
pub fn upsilon_beta(x: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(domain(format!("beta must be positive, got {beta}")));
    }
    let arg = 1.0 + 2.0 * x / beta;
    if !(arg > 0.0) {
        return Err(domain(format!("1 + 2x/beta must be positive, got {arg}")));
    }
    let integrand = |t: f64| {
        if t == 0.0 {
            return -x / (6.0 * beta);
        }
        upsilon_bracket(t) * (-x * t).exp_m1() / (0.5 * beta * t).exp_m1()
    };
    let head = quad::integrate(integrand, 0.0, 1.0, 1e-13, 1e-13)?;
    let tail = quad::integrate_to_infinity(integrand, 1.0, 1e-13, 1e-13)?;
    Ok(0.5 * beta * ln_barnes_g_pos(arg) - (x - 0.5) * ln_gamma_pos(arg)
        + head.value
        + tail.value
        + x * x / beta
        + 0.5 * x)
}
