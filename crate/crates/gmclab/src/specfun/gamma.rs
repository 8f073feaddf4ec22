use crate::error::{domain, Result};
use std::f64::consts::PI;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
pub(crate) const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

const ZETA_MINUS_ONE: [f64; 18] = [
    0.644_934_066_848_226_4,
    0.202_056_903_159_594_3,
    0.082_323_233_711_138_19,
    0.036_927_755_143_369_93,
    0.017_343_061_984_449_14,
    0.008_349_277_381_922_827,
    0.004_077_356_197_944_339,
    0.002_008_392_826_082_214,
    0.000_994_575_127_818_085_3,
    0.000_494_188_604_119_464_6,
    0.000_246_086_553_308_048_3,
    0.000_122_713_347_578_489_1,
    6.124_813_505_870_483e-5,
    3.058_823_630_702_049e-5,
    1.528_225_940_865_187e-5,
    7.637_197_637_899_762e-6,
    3.817_293_264_999_84e-6,
    1.908_212_716_553_939e-6,
];

/// `zeta(k) - 1` for integer `k >= 2`.
pub(crate) fn zeta_minus_one(k: usize) -> f64 {
    if k < 20 {
        ZETA_MINUS_ONE[k - 2]
    } else {
        (2..14).rev().map(|n| (n as f64).powi(-(k as i32))).sum()
    }
}

/// `ln Gamma(1 + z) + ln(1 + z)` for `|z| <= 1/2`.
fn lgamma1p_series(z: f64) -> f64 {
    let mut sum = z * (1.0 - EULER_GAMMA);
    let mut zk = -z;
    for k in 2..60 {
        zk *= -z;
        let term = zeta_minus_one(k) * zk / k as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn stirling(x: f64) -> f64 {
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let r = 1.0 / (x * x);
    let mut corr = 0.0;
    for &c in C.iter().rev() {
        corr = corr * r + c;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + corr / x
}

/// `ln Gamma(x)` for `x > 0`, no argument checks.
pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        let z = x;
        return lgamma1p_series(z) - z.ln_1p() - z.ln();
    }
    if x <= 1.5 {
        let z = x - 1.0;
        return lgamma1p_series(z) - z.ln_1p();
    }
    if x <= 2.5 {
        let z = x - 2.0;
        return lgamma1p_series(z);
    }
    if x < 10.0 {
        let mut y = x;
        let mut acc = 0.0;
        while y > 2.5 {
            y -= 1.0;
            acc += y.ln();
        }
        return acc + ln_gamma_pos(y);
    }
    stirling(x)
}

/// Natural logarithm of the gamma function for real `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("log_gamma needs x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

/// `ln|Gamma(x)|` together with the sign of `Gamma(x)` for any real non-pole `x`.
pub fn gamma_signed(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(domain(format!("gamma of non-finite argument {x}")));
    }
    if x > 0.0 {
        return Ok((ln_gamma_pos(x), 1.0));
    }
    if x == x.floor() {
        return Err(domain(format!("gamma has a pole at {x}")));
    }
    // Gamma(x) Gamma(1 - x) = pi / sin(pi x)
    let s = (PI * x).sin();
    let lg = PI.ln() - s.abs().ln() - ln_gamma_pos(1.0 - x);
    Ok((lg, s.signum()))
}

/// Gamma function value with sign.
pub fn gamma(x: f64) -> Result<f64> {
    let (l, s) = gamma_signed(x)?;
    Ok(s * l.exp())
}
