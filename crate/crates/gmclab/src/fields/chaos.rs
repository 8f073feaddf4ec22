use super::grid::Grid;
use crate::error::{precondition, Error, Result};
use std::io::Write;
use std::sync::Arc;

/// One realisation of a field on a grid together with its pointwise variance.
#[derive(Debug, Clone)]
pub struct FieldSample {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
    pub pointwise_variance: Arc<Vec<f64>>,
}

impl FieldSample {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x", "y", "value", "variance"]).map_err(csv_err)?;
        for ((p, v), s) in self.grid.points.iter().zip(&self.values).zip(self.pointwise_variance.iter()) {
            out.serialize((p[0], p[1], v, s)).map_err(csv_err)?;
        }
        out.flush().map_err(|e| Error::Numerical(e.to_string()))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Numerical(format!("csv: {e}"))
}

/// Discretised chaos: one nonnegative weight per grid cell.
#[derive(Debug, Clone)]
pub struct ChaosMeasure {
    pub grid: Arc<Grid>,
    pub weights: Vec<f64>,
    pub gamma: f64,
}

const MAX_LOG_WEIGHT: f64 = 700.0;

/// Log of the chaos density `gamma X - gamma^2 Var X / 2`, checked against overflow.
pub fn log_weight(gamma: f64, value: f64, variance: f64) -> Result<f64> {
    let lw = gamma * value - 0.5 * gamma * gamma * variance;
    if lw > MAX_LOG_WEIGHT || lw.is_nan() {
        return Err(Error::Overflow(lw));
    }
    Ok(lw)
}

/// `sum_i g_i exp(gamma X_i - gamma^2 Var X_i / 2) dx`, or the unweighted mass when `g` is empty.
pub fn chaos_mass(values: &[f64], variance: &[f64], gamma: f64, cell: f64, g: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..values.len() {
        let w = log_weight(gamma, values[i], variance[i])?.exp();
        total += if g.is_empty() { w } else { g[i] * w };
    }
    Ok(total * cell)
}

pub fn chaos_measure(field: &FieldSample, gamma: f64) -> Result<ChaosMeasure> {
    if field.values.len() != field.grid.len() || field.pointwise_variance.len() != field.grid.len() {
        return Err(precondition("field sample does not match its grid"));
    }
    if !gamma.is_finite() {
        return Err(precondition("gamma must be finite"));
    }
    let cell = field.grid.cell_volume;
    let weights = field
        .values
        .iter()
        .zip(field.pointwise_variance.iter())
        .map(|(&x, &v)| {
            if !v.is_finite() || v < 0.0 {
                return Err(precondition("field variance must be finite and nonnegative"));
            }
            Ok(log_weight(gamma, x, v)?.exp() * cell)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChaosMeasure { grid: field.grid.clone(), weights, gamma })
}

impl ChaosMeasure {
    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `int g dM` for `g` given per grid point.
    pub fn integrate(&self, g: &[f64]) -> f64 {
        self.weights.iter().zip(g).map(|(w, g)| w * g).sum()
    }

    /// `int g dM` for `g` given as a function of the point.
    pub fn integrate_fn<F: Fn([f64; 2]) -> f64>(&self, g: F) -> f64 {
        self.weights.iter().zip(&self.grid.points).map(|(w, &p)| w * g(p)).sum()
    }

    pub fn atoms(&self) -> impl Iterator<Item = ([f64; 2], f64)> + '_ {
        self.grid.points.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x", "y", "weight"]).map_err(csv_err)?;
        for (p, wt) in self.atoms() {
            out.serialize((p[0], p[1], wt)).map_err(csv_err)?;
        }
        out.flush().map_err(|e| Error::Numerical(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> FieldSample {
        let grid = Arc::new(Grid::interval(0.0, 1.0, 4).unwrap());
        FieldSample { grid, values: vec![0.3, -1.0, 2.0, 0.0], pointwise_variance: Arc::new(vec![1.0; 4]) }
    }

    #[test]
    fn zero_gamma_gives_lebesgue() {
        let m = chaos_measure(&toy(), 0.0).unwrap();
        assert!(m.weights.iter().all(|&w| w == 0.25));
    }

    #[test]
    fn integration_is_linear() {
        let m = chaos_measure(&toy(), 0.7).unwrap();
        assert_eq!(m.integrate(&[2.0; 4]), 2.0 * m.integrate(&[1.0; 4]));
        assert!((m.total_mass() - m.integrate_fn(|_| 1.0)).abs() < 1e-15);
    }

    #[test]
    fn overflow_is_flagged() {
        let mut f = toy();
        f.values[0] = 1e4;
        assert!(matches!(chaos_measure(&f, 1.0), Err(Error::Overflow(_))));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut buf = Vec::new();
        chaos_measure(&toy(), 0.5).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("x,y,weight"));
    }
}
