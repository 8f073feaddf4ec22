use crate::quad::{self, GaussLegendre};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Unnormalised bump `exp(-1 / (1 - |4u|^2))` supported on `|u| < 1/4`.
pub fn bump(u: f64) -> f64 {
    let v = 16.0 * u * u;
    if v >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - v)).exp()
    }
}

struct Tables {
    gl: GaussLegendre,
    /// 1-D normalisation `1 / int bump`.
    c1: f64,
    /// 2-D radial normalisation `1 / int_{R^2} bump(|x|) dx`.
    c2: f64,
    /// Even moments `int rho(w) w^{2k} dw`, `rho` the self-convolution.
    moments: Vec<f64>,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let gl = GaussLegendre::new(128);
        let mass = gl.integrate(bump, -0.25, 0.25);
        let c1 = 1.0 / mass;
        let radial = gl.integrate(|q| 2.0 * PI * q * bump(q), 0.0, 0.25);
        let c2 = 1.0 / radial;
        let mut moments = vec![0.0; 21];
        for (s, ws) in gl.mapped(-0.25, 0.25) {
            for (t, wt) in gl.mapped(-0.25, 0.25) {
                let w = ws * wt * c1 * c1 * bump(s) * bump(t);
                let d2 = (s - t) * (s - t);
                let mut p = 1.0;
                for m in moments.iter_mut() {
                    *m += w * p;
                    p *= d2;
                }
            }
        }
        Tables { gl, c1, c2, moments }
    })
}

/// Density of `s - t` for independent `s, t` drawn from the normalised bump.
pub fn self_convolution(w: f64) -> f64 {
    let t = tables();
    let lo = (-0.25f64).max(w - 0.25);
    let hi = 0.25f64.min(w + 0.25);
    if hi <= lo {
        return 0.0;
    }
    t.c1 * t.c1 * t.gl.integrate(|s| bump(s) * bump(s - w), lo, hi)
}

/// `-int int nu(s) nu(t) log|u + s - t| ds dt` for the unit-scale 1-D bump.
///
/// The mollified covariance at separation `r` is `-log(eps) + log_potential_1d(r / eps)`.
pub fn log_potential_1d(u: f64) -> f64 {
    let u = u.abs();
    if u >= 2.0 {
        let t = tables();
        let r = 1.0 / (u * u);
        let mut s = -u.ln();
        let mut rk = 1.0;
        for k in 1..t.moments.len() {
            rk *= r;
            let term = t.moments[k] * rk / (2 * k) as f64;
            s += term;
            if term < 1e-18 {
                break;
            }
        }
        return s;
    }
    let f = |w: f64| {
        let d = (u + w).abs();
        if d == 0.0 {
            0.0
        } else {
            -self_convolution(w) * d.ln()
        }
    };
    let cut = -u;
    let r = if cut > -0.5 {
        let a = quad::integrate(f, -0.5, cut, 1e-13, 1e-13);
        let b = quad::integrate(f, cut, 0.5, 1e-13, 1e-13);
        match (a, b) {
            (Ok(a), Ok(b)) => a.value + b.value,
            _ => f64::NAN,
        }
    } else {
        quad::integrate(f, -0.5, 0.5, 1e-13, 1e-13).map(|r| r.value).unwrap_or(f64::NAN)
    };
    r
}

/// Piecewise Chebyshev interpolant on `[0, len]` with equal panels.
struct Chebyshev {
    width: f64,
    panels: Vec<Vec<f64>>,
}

impl Chebyshev {
    fn fit<F: Fn(f64) -> f64 + Sync>(f: F, len: f64, panels: usize, n: usize) -> Self {
        use rayon::prelude::*;
        let width = len / panels as f64;
        let nodes: Vec<f64> = (0..n).map(|j| (PI * (j as f64 + 0.5) / n as f64).cos()).collect();
        let panels = (0..panels)
            .into_par_iter()
            .map(|p| {
                let lo = p as f64 * width;
                let vals: Vec<f64> = nodes.iter().map(|&x| f(lo + 0.5 * width * (x + 1.0))).collect();
                (0..n)
                    .map(|k| {
                        let s: f64 = (0..n)
                            .map(|j| vals[j] * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos())
                            .sum();
                        s * if k == 0 { 1.0 } else { 2.0 } / n as f64
                    })
                    .collect()
            })
            .collect();
        Chebyshev { width, panels }
    }

    fn eval(&self, u: f64) -> f64 {
        let p = ((u / self.width) as usize).min(self.panels.len() - 1);
        let coef = &self.panels[p];
        let x = 2.0 * (u - p as f64 * self.width) / self.width - 1.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in coef.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        x * b1 - b2 + coef[0]
    }
}

/// Tabulated [`log_potential_1d`]; absolute error below `1e-10`.
pub fn log_potential_1d_fast(u: f64) -> f64 {
    static T: OnceLock<Chebyshev> = OnceLock::new();
    let u = u.abs();
    if u >= 2.0 {
        return log_potential_1d(u);
    }
    T.get_or_init(|| Chebyshev::fit(log_potential_1d, 2.0, 32, 24)).eval(u)
}

/// Tabulated [`log_potential_2d`]; absolute error below `1e-10`.
pub fn log_potential_2d_fast(r: f64) -> f64 {
    static T: OnceLock<Chebyshev> = OnceLock::new();
    let r = r.abs();
    if r >= 0.5 {
        return -r.ln();
    }
    T.get_or_init(|| Chebyshev::fit(log_potential_2d, 0.5, 8, 24)).eval(r)
}

/// Logarithmic potential of the normalised radial bump at distance `rho`:
/// `-int nu(t) log|a - t| dt` for `|a| = rho`.
fn radial_potential(rho: f64) -> f64 {
    if rho >= 0.25 {
        return -rho.ln();
    }
    let t = tables();
    let inner = if rho > 0.0 {
        t.gl.integrate(|q| 2.0 * PI * t.c2 * q * bump(q), 0.0, rho)
    } else {
        0.0
    };
    let outer = t.gl.integrate(|q| 2.0 * PI * t.c2 * q * bump(q) * q.ln(), rho, 0.25);
    let head = if rho > 0.0 { -rho.ln() * inner } else { 0.0 };
    head - outer
}

/// 2-D analogue of [`log_potential_1d`] for the radial bump.
///
/// Outside distance 1/2 both mollifiers see a harmonic function and the
/// value is exactly `-log r` by the mean-value property.
pub fn log_potential_2d(r: f64) -> f64 {
    let r = r.abs();
    if r >= 0.5 {
        return -r.ln();
    }
    let t = tables();
    let gl = GaussLegendre::new(40);
    let mut s = 0.0;
    for (q, wq) in gl.mapped(0.0, 0.25) {
        let radial = t.c2 * q * bump(q);
        if radial == 0.0 {
            continue;
        }
        let mut ang = 0.0;
        for (phi, wphi) in gl.mapped(0.0, PI) {
            let x = r + q * phi.cos();
            let y = q * phi.sin();
            ang += wphi * radial_potential((x * x + y * y).sqrt());
        }
        s += wq * radial * 2.0 * ang;
    }
    s
}
