use gmclab::rmt::*;
use gmclab::rng::{par_replicates, substream};
use gmclab::specfun::keating_snaith_prefactor;
use gmclab::stats::{ks_one_sample, mean, variance};
use num_complex::Complex64;
use std::f64::consts::PI;

fn mean_and_stderr(x: &[f64]) -> (f64, f64) {
    (mean(x), (variance(x) / x.len() as f64).sqrt())
}

#[test]
fn single_angle_is_uniform() {
    let x: Vec<f64> = par_replicates(1, 0, 10_000, |r, _| sample_cbe(1, 2.0, r).unwrap().angles[0]);
    assert!(ks_one_sample(&x, |t| t / (2.0 * PI)) < 0.02);
}

#[test]
fn unitary_trace_second_moment() {
    let x: Vec<f64> = par_replicates(2, 0, 10_000, |r, _| {
        let s = sample_cbe(8, 2.0, r).unwrap();
        s.angles.iter().map(|&a| Complex64::from_polar(1.0, a)).sum::<Complex64>().norm_sqr()
    });
    let (m, se) = mean_and_stderr(&x);
    assert!((m - 1.0).abs() < 5.0 * se, "{m} +- {se}");
}

#[test]
fn characteristic_polynomial_second_moment() {
    let x: Vec<f64> = par_replicates(3, 0, 10_000, |r, _| {
        char_poly_pow(&sample_cbe(4, 2.0, r).unwrap(), &[0.0], 1.0)[0]
    });
    let (m, se) = mean_and_stderr(&x);
    assert!((m - 5.0).abs() < 5.0 * se, "{m} +- {se}");
}

#[test]
fn first_moment_of_the_integral() {
    let e = mom_estimate(3, 2.0, 1.0, 1.0, 64, 10_000, 4).unwrap();
    assert!((e.value - 4.0).abs() < 4.0 * e.stderr, "{e:?}");
    let e = mom_estimate(4, 2.0, 1.0, 1.0, 64, 10_000, 5).unwrap();
    assert!((e.value - 5.0).abs() < 5.0 * e.stderr, "{e:?}");
}

#[test]
fn other_beta_matches_exact_product() {
    for &beta in &[1.0, 4.0] {
        let x: Vec<f64> = par_replicates(6, beta as u64, 10_000, |r, _| {
            char_poly_pow(&sample_cbe(5, beta, r).unwrap(), &[0.3], 0.5)[0]
        });
        let (m, se) = mean_and_stderr(&x);
        let want = ks_moment_exact(5, beta, 0.5).unwrap();
        assert!((m - want).abs() < 5.0 * se, "beta {beta}: {m} +- {se} vs {want}");
    }
}

#[test]
fn rotating_the_spectrum_keeps_the_integral() {
    let grid: Vec<f64> = (0..256).map(|j| 2.0 * PI * j as f64 / 256.0).collect();
    let pairs: Vec<(f64, f64)> = par_replicates(7, 0, 2000, |r, _| {
        let s = sample_cbe(16, 2.0, r).unwrap();
        let mut rot = s.clone();
        rot.angles.iter_mut().for_each(|a| *a = (*a + 1.234).rem_euclid(2.0 * PI));
        let a = char_poly_pow(&s, &grid, 0.5).iter().sum::<f64>() / 256.0;
        let b = char_poly_pow(&rot, &grid, 0.5).iter().sum::<f64>() / 256.0;
        (a, b)
    });
    let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (ma, sa) = mean_and_stderr(&a);
    let (mb, _) = mean_and_stderr(&b);
    assert!((ma - mb).abs() < sa, "{ma} vs {mb}");
}

#[test]
fn exact_product_matches_asymptotic() {
    let n = 1024;
    let r = ks_moment_exact(n, 2.0, 0.5).unwrap()
        / (keating_snaith_prefactor(0.5).unwrap() * (n as f64).powf(0.25));
    assert!((r - 1.0).abs() < 0.01, "{r}");
}

#[test]
fn heine_identity_for_a_pair_of_points() {
    let e = cross_moment_mc(64, 2.0, 0.5, &[0.0, 1.0], 10_000, 8).unwrap();
    let d = toeplitz_determinant(&FisherHartwigSymbol::new(vec![0.0, 1.0], 0.5, 64).unwrap())
        .unwrap()
        .exp();
    assert!((e.value - d).abs() < 4.0 * e.stderr, "{e:?} vs {d}");
}

#[test]
fn determinant_at_one_singularity_over_sizes() {
    for &s in &[0.25, 0.5, 1.0] {
        for n in [1usize, 2, 3, 8, 33, 100, 256] {
            let d = toeplitz_determinant(&FisherHartwigSymbol::new(vec![2.5], s, n).unwrap()).unwrap();
            let want = ks_moment_exact_log(n, 2.0, s).unwrap();
            assert!(((d - want) / want).abs() < 1e-8, "s={s} n={n}");
        }
    }
}

#[test]
fn separated_singularities_follow_the_asymptotic() {
    let chord = 0.5f64;
    let r = fh_uniformity_check(&[0.0, 2.0 * (chord / 2.0).asin()], 0.5, 256, 0.5).unwrap();
    assert!((0.95..=1.05).contains(&r), "{r}");
    let sep = 256f64.powf(-0.5);
    let r = fh_uniformity_check(&[0.0, 2.0 * (sep / 2.0).asin()], 0.5, 256, 0.5).unwrap();
    assert!((0.8..=1.2).contains(&r), "{r}");
}

#[test]
fn upper_bound_is_uniform_in_the_angles() {
    for k in [2usize, 3] {
        let b = fh_upper_bound_check(k, 128, 0.5, 1000, 9).unwrap();
        assert_eq!(b.exceedances, 0, "{b:?}");
    }
}

#[test]
fn subcritical_moment_of_moments() {
    let s = 0.4f64;
    let c = gmclab::specfun::gamma(1.0 - 2.0 * s * s).unwrap()
        / gmclab::specfun::gamma(1.0 - s * s).unwrap().powi(2)
        * keating_snaith_prefactor(s).unwrap().powi(2);
    let v = toeplitz_mom(128, 2, s, 128).unwrap();
    assert!((v / 128f64.powf(2.0 * s * s) / c - 1.0).abs() < 0.05);
    let k3 = toeplitz_mom(12, 3, s, 128).unwrap();
    assert!(k3 > v.min(1.0) && k3.is_finite());
}

#[test]
fn third_moment_of_moments_small_n() {
    // N = 1: |P|^{2s} = |1 - e^{i(a - theta)}|^{2s}, so MoM_1(k, s) = E[c0^k] = c0^k
    let s = 0.5;
    let c0 = single_singularity_coefficients(s, 0).unwrap()[0];
    let v = toeplitz_mom(1, 3, s, 128).unwrap();
    assert!((v - c0.powi(3)).abs() < 1e-6 * c0.powi(3), "{v} vs {}", c0.powi(3));
    let v = toeplitz_mom(1, 2, s, 128).unwrap();
    assert!((v - c0 * c0).abs() < 1e-8, "{v}");
}

#[test]
fn sampler_is_deterministic_per_seed() {
    let a = sample_cbe(10, 3.0, &mut substream(4, 4, 4)).unwrap();
    let b = sample_cbe(10, 3.0, &mut substream(4, 4, 4)).unwrap();
    assert_eq!(a, b);
    assert!(a.angles.iter().all(|&t| (0.0..2.0 * PI).contains(&t)));
}
