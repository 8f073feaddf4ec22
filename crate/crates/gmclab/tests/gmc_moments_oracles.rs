use gmclab::fields::{CovarianceSpec, FieldSampler, Grid};
use gmclab::gmc_moments::*;

fn agree(mc: &MomentEstimate, exact: f64) -> bool {
    (mc.value - exact).abs() <= 4.0 * mc.stderr
}

#[test]
fn second_moment_monte_carlo_matches_quadrature() {
    let spec = CovarianceSpec::mollified(0.0, 1.0, 1.0 / 32.0).unwrap();
    let grid = Grid::interval(0.0, 1.0, 128).unwrap();
    let quad = quadrature_moment(&spec, &grid, 0.5, 2, &[]).unwrap();
    let mc = mc_moment(&spec, grid, 0.5, 2.0, &[], 20_000, 11).unwrap();
    assert!(agree(&mc, quad.value), "{} +- {} vs {}", mc.value, mc.stderr, quad.value);
}

#[test]
fn third_moment_monte_carlo_matches_quadrature() {
    let gamma = (2.0f64 / 3.0).sqrt();
    let spec = CovarianceSpec::mollified(0.0, 1.0, 1.0 / 256.0).unwrap();
    let grid = Grid::interval(0.0, 1.0, 1024).unwrap();
    let quad = quadrature_moment(&spec, &grid, gamma, 3, &[]).unwrap();
    let sampler = FieldSampler::circulant(&spec, grid).unwrap();
    let mc = mc_moment_with(&sampler, gamma, 3.0, &[], 200_000, 12).unwrap();
    assert!(agree(&mc, quad.value), "{} +- {} vs {}", mc.value, mc.stderr, quad.value);
}

#[test]
fn weighted_moment_monte_carlo_matches_tuple_sum() {
    let spec = CovarianceSpec::mollified(0.0, 1.0, 1.0 / 16.0).unwrap();
    let grid = Grid::interval(0.0, 1.0, 64).unwrap();
    let g: Vec<f64> = grid.points.iter().map(|x| 1.0 + x[0]).collect();
    let quad = quadrature_moment(&spec, &grid, 0.8, 2, &g).unwrap();
    let mc = mc_moment(&spec, grid, 0.8, 2.0, &g, 20_000, 13).unwrap();
    assert!(agree(&mc, quad.value), "{} +- {} vs {}", mc.value, mc.stderr, quad.value);
}

#[test]
fn trivial_moments() {
    let spec = CovarianceSpec::mollified(0.0, 2.0, 0.05).unwrap();
    let grid = Grid::interval(0.0, 2.0, 160).unwrap();
    let first = mc_moment(&spec, grid.clone(), 0.9, 1.0, &[], 10_000, 14).unwrap();
    assert!((first.value - 2.0).abs() <= 3.0 * first.stderr);
    let flat = mc_moment(&spec, grid.clone(), 0.0, 3.0, &[], 200, 14).unwrap();
    assert!((flat.value - 8.0).abs() < 1e-12 && flat.stderr < 1e-12);
    let quad = quadrature_moment(&spec, &grid, 0.0, 2, &[]).unwrap();
    assert!((quad.value - 4.0).abs() < 1e-12);
    assert_eq!(quad.stderr, 0.0);
}

// midpoint lag sums of e^{C} split by separation
fn split(eps: f64, near: f64, far: f64) -> (f64, f64, f64) {
    let spec = CovarianceSpec::cutoff(0.0, 1.0, eps).unwrap();
    let n = (4.0 / eps).round() as usize;
    let h = 1.0 / n as f64;
    let (mut total, mut lo, mut hi) = (0.0, 0.0, 0.0);
    for l in 0..n {
        let u = l as f64 * h;
        let w = if l == 0 { 1.0 } else { 2.0 } * (n - l) as f64 * h * h * spec.lag_covariance(u).exp();
        total += w;
        if u <= near * eps {
            lo += w;
        }
        if u >= far {
            hi += w;
        }
    }
    (total, lo, hi)
}

#[test]
fn removal_of_irrelevant_mass() {
    let (k, r) = (4.0, 0.25);
    let parts: Vec<_> = [2f64.powi(-8), 2f64.powi(-12), 2f64.powi(-16)].iter().map(|&e| split(e, k, r)).collect();
    // continuum near part plus the boundary lag counted in full
    let bound = 2.0 * (1.0 + f64::ln(k)) + 0.5 / k;
    for w in parts.windows(2) {
        assert!(w[1].1 / w[1].0 < w[0].1 / w[0].0);
        assert!(w[1].2 / w[1].0 < w[0].2 / w[0].0);
        assert!((w[1].2 - w[0].2).abs() < 1e-2);
    }
    assert!(parts.iter().all(|p| p.1 <= bound));
    let far = 2.0 * (f64::ln(1.0 / r) - 1.0 + r);
    assert!((parts[2].2 - far).abs() < 1e-3, "{} vs {far}", parts[2].2);
}

#[test]
fn multifractal_trivial_exponents() {
    let spec = CovarianceSpec::mollified(0.0, 1.0, 4.0 / 4096.0).unwrap();
    let sampler = FieldSampler::circulant(&spec, Grid::interval(0.0, 1.0, 4096).unwrap()).unwrap();
    let radii: Vec<f64> = (3..=8).map(|j| 2f64.powi(-j)).collect();
    let one = multifractal_scaling_experiment(&sampler, 0.8, 1.0, &radii, 2000, 15).unwrap();
    assert_eq!(one.predicted, 1.0);
    assert!((one.fit.slope - 1.0).abs() < 0.02, "{}", one.fit.slope);
    let zero = multifractal_scaling_experiment(&sampler, 0.8, 0.0, &radii, 200, 15).unwrap();
    assert!(zero.fit.slope.abs() < 1e-12);
}

#[test]
fn inequality_examples() {
    let same = DiscretePair { atoms: vec![(1.0, 1.0), (3.0, 3.0)], probs: vec![0.5, 0.5] };
    let c = check_pair(&same, 2.0);
    assert!(c.first && c.second);
    assert!((same.expect(|a, b| (a + b).powi(2)) - 4.0 * same.expect(|_, b| b * b)).abs() < 1e-12);
    let zero = DiscretePair { atoms: vec![(0.0, 0.5), (0.0, 2.0)], probs: vec![0.3, 0.7] };
    assert!(check_pair(&zero, 0.5).first);
    for k in [1.5, 3.0] {
        assert!(elementary_inequality_check(k, 1000, 16).holds_in_scope());
    }
}
