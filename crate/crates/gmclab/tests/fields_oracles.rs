use gmclab::fields::*;
use gmclab::rng::{par_replicates, substream};
use gmclab::stats::{ks_two_sample, mean, variance};
use rand::Rng;

fn mean_se(x: &[f64]) -> (f64, f64) {
    (mean(x), (variance(x) / x.len() as f64).sqrt())
}

fn mollified(a: f64, b: f64, eps: f64, offset: f64) -> CovarianceSpec {
    CovarianceSpec::new(
        Domain::Interval { a, b },
        Kernel::MollifiedExact { eps, mollifier: Mollifier::Bump },
        Offset::Constant(offset),
    )
    .unwrap()
}

fn mass(values: &[f64], var: &[f64], gamma: f64, cell: f64) -> f64 {
    values.iter().zip(var).map(|(x, v)| (gamma * x - 0.5 * gamma * gamma * v).exp() * cell).sum()
}

#[test]
fn field_is_centred_with_the_target_covariance() {
    let spec = mollified(0.0, 0.5, 0.05, 0.0);
    let grid = Grid::interval(0.0, 0.5, 32).unwrap();
    let c = build_covariance_matrix(&spec, &grid).unwrap();
    let sampler = FieldSampler::dense(&spec, grid).unwrap();
    let draws = par_replicates(1, 0, 10_000, |r, _| {
        let v = sampler.sample_values(r);
        (v[3], v[20])
    });
    let a: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let sigma = c[(3, 3)].sqrt();
    assert!(mean(&a).abs() < 5.0 * sigma / 100.0);
    let prods: Vec<f64> = draws.iter().map(|d| d.0 * d.1).collect();
    let (m, se) = mean_se(&prods);
    assert!((m - c[(3, 20)]).abs() < 5.0 * se, "{m} vs {}", c[(3, 20)]);
}

#[test]
fn circle_field_fourier_matches_dense() {
    let spec = CovarianceSpec::circle(31).unwrap();
    let fourier = FieldSampler::fourier(&spec, Grid::circle(64).unwrap()).unwrap();
    let dense = FieldSampler::dense(&spec, Grid::circle(64).unwrap()).unwrap();
    let a = par_replicates(2, 0, 10_000, |r, _| fourier.sample_values(r)[0]);
    let b = par_replicates(2, 1, 10_000, |r, _| dense.sample_values(r)[0]);
    assert!(ks_two_sample(&a, &b) < 0.02);
}

#[test]
fn expected_chaos_mass_is_lebesgue() {
    let spec = mollified(0.0, 0.5, 0.02, 0.0);
    let sampler = FieldSampler::circulant(&spec, Grid::interval(0.0, 0.5, 128).unwrap()).unwrap();
    let masses = par_replicates(3, 0, 10_000, |r, _| {
        chaos_measure(&sampler.sample(r), 0.5).unwrap().total_mass()
    });
    let (m, se) = mean_se(&masses);
    assert!((m - 0.5).abs() < 3.0 * se, "{m} +- {se}");
}

#[test]
fn grid_refinement_keeps_expected_mass() {
    let spec = mollified(0.0, 0.5, 0.05, 0.0);
    let est = |n: usize| {
        let sampler = FieldSampler::dense(&spec, Grid::interval(0.0, 0.5, n).unwrap()).unwrap();
        let v = par_replicates(4, n as u64, 40_000, |r, _| chaos_measure(&sampler.sample(r), 0.5).unwrap().total_mass());
        mean_se(&v)
    };
    let ((coarse, s0), (fine, s1)) = (est(128), est(256));
    assert!(s0.max(s1) < 0.004, "{s0} {s1}");
    assert!((coarse / fine - 1.0).abs() < 0.02, "{coarse} vs {fine}");
}

#[test]
fn cameron_martin_shift() {
    let gamma = 0.7;
    let mut pick = substream(5, 0, 0);
    for case in 0..3 {
        let eps = pick.random_range(0.05..0.2);
        let offset = pick.random_range(0.0..0.5);
        let spec = mollified(0.0, 0.5, eps, offset);
        let grid = Grid::interval(0.0, 0.5, 16).unwrap();
        let c = build_covariance_matrix(&spec, &grid).unwrap();
        let cell = grid.cell_volume;
        let x0 = pick.random_range(0..16);
        let sampler = FieldSampler::dense(&spec, grid).unwrap();
        let var: Vec<f64> = (0..16).map(|i| c[(i, i)]).collect();
        let tilted = par_replicates(6, case, 20_000, |r, _| {
            let v = sampler.sample_values(r);
            (gamma * v[x0] - 0.5 * gamma * gamma * var[x0]).exp() * mass(&v, &var, gamma, cell)
        });
        let shifted = par_replicates(7, case, 20_000, |r, _| {
            let v: Vec<f64> = sampler.sample_values(r).iter().enumerate().map(|(i, x)| x + gamma * c[(x0, i)]).collect();
            mass(&v, &var, gamma, cell)
        });
        let (a, sa) = mean_se(&tilted);
        let (b, sb) = mean_se(&shifted);
        assert!((a - b).abs() < 4.0 * (sa * sa + sb * sb).sqrt(), "case {case}: {a} vs {b}");
    }
}

#[test]
fn kahane_bracket_for_a_constant_shift() {
    let (gamma, shift, k) = (0.8f64, 0.5f64, 2.0f64);
    let moment = |offset: f64, tag: u64| {
        let spec = mollified(0.0, 0.5, 0.05, offset);
        let grid = Grid::interval(0.0, 0.5, 16).unwrap();
        let cell = grid.cell_volume;
        let sampler = FieldSampler::dense(&spec, grid).unwrap();
        let var = sampler.variance().clone();
        let v = par_replicates(8, tag, 100_000, |r, _| mass(&sampler.sample_values(r), &var, gamma, cell).powf(k));
        mean_se(&v)
    };
    let (m0, s0) = moment(0.0, 0);
    let (m1, s1) = moment(shift, 1);
    let ratio = m1 / m0;
    let se = ratio * ((s0 / m0).powi(2) + (s1 / m1).powi(2)).sqrt();
    let bound = (0.5 * gamma * gamma * k * (k - 1.0) * shift).exp();
    assert!(ratio >= (1.0 / bound) * (1.0 - 5.0 * se) && ratio <= bound * (1.0 + 5.0 * se), "{ratio} +- {se}, bound {bound}");
}

#[test]
fn weighted_integral_is_linear_per_sample() {
    let spec = mollified(0.0, 0.5, 0.05, 0.0);
    let sampler = FieldSampler::dense(&spec, Grid::interval(0.0, 0.5, 32).unwrap()).unwrap();
    let m = chaos_measure(&sampler.sample(&mut substream(9, 0, 0)), 1.1).unwrap();
    assert_eq!(m.integrate(&[2.0; 32]), 2.0 * m.integrate(&[1.0; 32]));
    assert!(m.atoms().all(|(_, w)| w.is_finite() && w >= 0.0));
}
