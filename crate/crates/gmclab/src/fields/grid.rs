use crate::error::{precondition, Result};
use std::f64::consts::PI;

/// Ordered grid points with a common cell volume.
///
/// One-dimensional points keep a zero second coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub dim: u32,
    pub points: Vec<[f64; 2]>,
    pub cell_volume: f64,
    /// Spacing of a uniform one-dimensional grid (intervals and circles).
    pub spacing: Option<f64>,
    /// Points per axis.
    pub shape: [usize; 2],
}

impl Grid {
    /// Cell midpoints of `n` equal cells of `[a, b]`.
    pub fn interval(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(b > a) || n == 0 {
            return Err(precondition(format!("bad interval grid [{a}, {b}] with {n} cells")));
        }
        let h = (b - a) / n as f64;
        let points = (0..n).map(|i| [a + (i as f64 + 0.5) * h, 0.0]).collect();
        Ok(Grid { dim: 1, points, cell_volume: h, spacing: Some(h), shape: [n, 1] })
    }

    /// Cell midpoints of an `nx` by `ny` tensor grid, row-major in `x`.
    pub fn rectangle(lo: [f64; 2], hi: [f64; 2], nx: usize, ny: usize) -> Result<Self> {
        if !(hi[0] > lo[0] && hi[1] > lo[1]) || nx == 0 || ny == 0 {
            return Err(precondition("bad rectangle grid"));
        }
        let hx = (hi[0] - lo[0]) / nx as f64;
        let hy = (hi[1] - lo[1]) / ny as f64;
        let mut points = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                points.push([lo[0] + (i as f64 + 0.5) * hx, lo[1] + (j as f64 + 0.5) * hy]);
            }
        }
        Ok(Grid { dim: 2, points, cell_volume: hx * hy, spacing: None, shape: [nx, ny] })
    }

    /// Equally spaced angles `2 pi j / n` on the unit circle.
    pub fn circle(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(precondition("empty circle grid"));
        }
        let h = 2.0 * PI / n as f64;
        let points = (0..n).map(|j| [j as f64 * h, 0.0]).collect();
        Ok(Grid { dim: 1, points, cell_volume: h, spacing: Some(h), shape: [n, 1] })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn volume(&self) -> f64 {
        self.cell_volume * self.len() as f64
    }
}
