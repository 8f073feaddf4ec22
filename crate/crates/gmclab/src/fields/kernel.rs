use super::grid::Grid;
use super::mollifier;
use crate::error::{precondition, Error, Result};
use nalgebra::DMatrix;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval { a: f64, b: f64 },
    Rectangle { lo: [f64; 2], hi: [f64; 2] },
    /// Unit circle, points given by their angle; distances are chord lengths.
    Circle,
}

impl Domain {
    pub fn dim(&self) -> u32 {
        match self {
            Domain::Rectangle { .. } => 2,
            _ => 1,
        }
    }

    pub fn volume(&self) -> f64 {
        match *self {
            Domain::Interval { a, b } => b - a,
            Domain::Rectangle { lo, hi } => (hi[0] - lo[0]) * (hi[1] - lo[1]),
            Domain::Circle => 2.0 * std::f64::consts::PI,
        }
    }

    pub fn diameter(&self) -> f64 {
        match *self {
            Domain::Interval { a, b } => b - a,
            Domain::Rectangle { lo, hi } => (hi[0] - lo[0]).hypot(hi[1] - lo[1]),
            Domain::Circle => 2.0,
        }
    }

    /// Euclidean distance between two points of the domain.
    pub fn distance(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        match self {
            Domain::Interval { .. } => (x[0] - y[0]).abs(),
            Domain::Rectangle { .. } => (x[0] - y[0]).hypot(x[1] - y[1]),
            Domain::Circle => 2.0 * ((x[0] - y[0]) / 2.0).sin().abs(),
        }
    }

    /// Cell-midpoint grid with `n` points per axis.
    pub fn grid(&self, n: usize) -> Result<Grid> {
        match *self {
            Domain::Interval { a, b } => Grid::interval(a, b, n),
            Domain::Rectangle { lo, hi } => Grid::rectangle(lo, hi, n, n),
            Domain::Circle => Grid::circle(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mollifier {
    /// `c exp(-1/(1 - |4u|^2))` on the ball of radius 1/4.
    Bump,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `-log(|x - y| v eps)`.
    ExactCutoff { eps: f64 },
    /// Covariance of `X * nu_eps` for the exact field `X` with kernel `-log|x - y|`.
    MollifiedExact { eps: f64, mollifier: Mollifier },
    /// Truncated Fourier series `sum_{k <= modes} cos(k (theta - phi)) / k`.
    CircleGff { modes: usize },
    /// `log((|x| v |y|) / (|x - y| v cutoff (|x| v |y|)))` on the punctured line.
    ExactLateral { cutoff: f64 },
}

impl Kernel {
    pub fn id(&self) -> String {
        match self {
            Kernel::ExactCutoff { eps } => format!("cutoff:{eps}"),
            Kernel::MollifiedExact { eps, .. } => format!("mollified:{eps}"),
            Kernel::CircleGff { modes } => format!("circle:{modes}"),
            Kernel::ExactLateral { cutoff } => format!("lateral:{cutoff}"),
        }
    }
}

pub type OffsetFn = Arc<dyn Fn([f64; 2], [f64; 2]) -> f64 + Send + Sync>;

/// Continuous remainder `f(x, y)` added to the logarithmic kernel.
#[derive(Clone, Default)]
pub enum Offset {
    #[default]
    Zero,
    Constant(f64),
    Function(OffsetFn),
}

impl Offset {
    pub fn eval(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        match self {
            Offset::Zero => 0.0,
            Offset::Constant(c) => *c,
            Offset::Function(f) => f(x, y),
        }
    }

    pub fn is_constant(&self) -> bool {
        !matches!(self, Offset::Function(_))
    }
}

impl fmt::Debug for Offset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Offset::Zero => write!(f, "Zero"),
            Offset::Constant(c) => write!(f, "Constant({c})"),
            Offset::Function(_) => write!(f, "Function(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CovarianceSpec {
    pub domain: Domain,
    pub kernel: Kernel,
    pub offset: Offset,
}

impl CovarianceSpec {
    pub fn new(domain: Domain, kernel: Kernel, offset: Offset) -> Result<Self> {
        let spec = CovarianceSpec { domain, kernel, offset };
        spec.validate()?;
        Ok(spec)
    }

    pub fn cutoff(a: f64, b: f64, eps: f64) -> Result<Self> {
        Self::new(Domain::Interval { a, b }, Kernel::ExactCutoff { eps }, Offset::Zero)
    }

    pub fn mollified(a: f64, b: f64, eps: f64) -> Result<Self> {
        Self::new(
            Domain::Interval { a, b },
            Kernel::MollifiedExact { eps, mollifier: Mollifier::Bump },
            Offset::Zero,
        )
    }

    pub fn circle(modes: usize) -> Result<Self> {
        Self::new(Domain::Circle, Kernel::CircleGff { modes }, Offset::Zero)
    }

    pub fn d(&self) -> u32 {
        self.domain.dim()
    }

    pub fn validate(&self) -> Result<()> {
        match self.domain {
            Domain::Interval { a, b } if !(b > a) => {
                return Err(precondition(format!("empty interval [{a}, {b}]")))
            }
            Domain::Rectangle { lo, hi } if !(hi[0] > lo[0] && hi[1] > lo[1]) => {
                return Err(precondition("empty rectangle"))
            }
            _ => {}
        }
        match self.kernel {
            Kernel::ExactCutoff { eps } | Kernel::MollifiedExact { eps, .. } if !(eps > 0.0) => {
                Err(precondition(format!("cutoff must be positive, got {eps}")))
            }
            Kernel::MollifiedExact { .. } if self.domain == Domain::Circle => {
                Err(precondition("mollified kernel is defined on intervals and rectangles"))
            }
            Kernel::CircleGff { modes } if modes == 0 || self.domain != Domain::Circle => {
                Err(precondition("circle kernel needs the circle domain and at least one mode"))
            }
            Kernel::ExactLateral { cutoff }
                if !(cutoff > 0.0) || !matches!(self.domain, Domain::Interval { .. }) =>
            {
                Err(precondition("lateral kernel needs an interval and a positive cutoff"))
            }
            _ => Ok(()),
        }
    }

    /// True when the covariance depends on the points only through their distance.
    pub fn is_stationary(&self) -> bool {
        self.offset.is_constant() && !matches!(self.kernel, Kernel::ExactLateral { .. })
    }

    /// Covariance as a function of distance, for stationary specs.
    pub fn lag_covariance(&self, r: f64) -> f64 {
        self.base_lag(r) + self.offset.eval([0.0; 2], [0.0; 2])
    }

    fn base_lag(&self, r: f64) -> f64 {
        match self.kernel {
            Kernel::ExactCutoff { eps } => -(r.max(eps)).ln(),
            Kernel::MollifiedExact { eps, .. } => {
                let u = r / eps;
                -eps.ln()
                    + if self.d() == 1 {
                        mollifier::log_potential_1d_fast(u)
                    } else {
                        mollifier::log_potential_2d_fast(u)
                    }
            }
            Kernel::CircleGff { modes } => {
                // r is a chord; recover the angle
                let delta = 2.0 * (r / 2.0).min(1.0).asin();
                circle_series(delta, modes)
            }
            Kernel::ExactLateral { .. } => f64::NAN,
        }
    }

    pub fn covariance(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        let base = match self.kernel {
            Kernel::CircleGff { modes } => circle_series(x[0] - y[0], modes),
            Kernel::ExactLateral { cutoff } => {
                let m = x[0].abs().max(y[0].abs());
                (m / (x[0] - y[0]).abs().max(cutoff * m)).ln()
            }
            _ => self.base_lag(self.domain.distance(x, y)),
        };
        base + self.offset.eval(x, y)
    }
}

pub(crate) fn circle_series(delta: f64, modes: usize) -> f64 {
    // cos(k delta) by the Chebyshev recurrence
    let c1 = delta.cos();
    let (mut prev, mut cur) = (1.0, c1);
    let mut s = 0.0;
    for k in 1..=modes {
        s += cur / k as f64;
        let next = 2.0 * c1 * cur - prev;
        prev = cur;
        cur = next;
    }
    s
}

/// Dense covariance matrix of `spec` on `grid`.
pub fn build_covariance_matrix(spec: &CovarianceSpec, grid: &Grid) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let n = grid.len();
    if n > 1 << 13 {
        return Err(precondition(format!("dense covariance limited to 8192 points, got {n}")));
    }
    if grid.dim != spec.d() {
        return Err(precondition("grid dimension does not match the domain"));
    }
    let mut c = DMatrix::zeros(n, n);
    let expensive = matches!(spec.kernel, Kernel::MollifiedExact { .. });
    let mut cache: HashMap<u64, f64> = HashMap::new();
    for j in 0..n {
        for i in j..n {
            let (x, y) = (grid.points[i], grid.points[j]);
            let v = if expensive {
                let r = spec.domain.distance(x, y);
                // distances recur on tensor grids; key on a rounded value
                let key = (r * 1e12).round() as u64;
                let lag = *cache
                    .entry(key)
                    .or_insert_with(|| spec.base_lag(r));
                lag + spec.offset.eval(x, y)
            } else {
                spec.covariance(x, y)
            };
            if !v.is_finite() {
                return Err(Error::Numerical(format!("covariance not finite at ({i}, {j})")));
            }
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    Ok(c)
}
