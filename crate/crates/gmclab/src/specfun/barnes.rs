use super::gamma::{ln_gamma_pos, zeta_minus_one, EULER_GAMMA, LN_SQRT_2PI};
use crate::error::{domain, Result};

/// A real number stored as `sign * exp(ln_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub ln_abs: f64,
    pub sign: f64,
}

impl SignedLog {
    pub fn value(&self) -> f64 {
        self.sign * self.ln_abs.exp()
    }
}

const ZETA_PRIME_MINUS_ONE: f64 = -0.165_421_143_700_450_93;

/// `ln G(1 + z)` for `|z| <= 1/2` from the Taylor series about 1.
fn ln_g1p_series(z: f64) -> f64 {
    let mut sum = z * LN_SQRT_2PI - 0.5 * (z + (1.0 + EULER_GAMMA) * z * z) + z.ln_1p() - z
        + 0.5 * z * z;
    let mut zk = -z * z;
    for k in 2..80 {
        zk *= -z;
        let term = zeta_minus_one(k) * zk / (k + 1) as f64;
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

/// `ln G(1 + z)` for large `z` from the asymptotic expansion.
fn ln_g1p_asymptotic(z: f64) -> f64 {
    const B: [f64; 6] = [
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
    ];
    let lz = z.ln();
    let mut s = 0.5 * z * z * lz - 0.75 * z * z + z * LN_SQRT_2PI - lz / 12.0
        + ZETA_PRIME_MINUS_ONE;
    let r = 1.0 / (z * z);
    let mut rk = 1.0;
    for (i, &b) in B.iter().enumerate() {
        let k = (i + 1) as f64;
        rk *= r;
        s += b / (4.0 * k * (k + 1.0)) * rk;
    }
    s
}

pub(crate) fn ln_barnes_g_pos(x: f64) -> f64 {
    if x > 12.0 {
        return ln_g1p_asymptotic(x - 1.0);
    }
    if x < 0.5 {
        // G(x + 1) = Gamma(x) G(x)
        return ln_barnes_g_pos(x + 1.0) - ln_gamma_pos(x);
    }
    let mut y = x;
    let mut acc = 0.0;
    while y > 1.5 {
        y -= 1.0;
        acc += ln_gamma_pos(y);
    }
    acc + ln_g1p_series(y - 1.0)
}

/// Barnes G-function for real `x > 0`, returned in log space.
pub fn barnes_g(x: f64) -> Result<SignedLog> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("barnes_g needs x > 0, got {x}")));
    }
    Ok(SignedLog { ln_abs: ln_barnes_g_pos(x), sign: 1.0 })
}
