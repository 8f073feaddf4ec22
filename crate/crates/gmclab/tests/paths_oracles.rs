use gmclab::paths::*;
use gmclab::rng::{par_replicates, substream};
use gmclab::stats::{mean, variance};

const SEED: u64 = 7;

#[test]
fn drifted_motion_has_linear_mean_and_variance() {
    let (mu, t) = (0.7, 2.0);
    let ends = par_replicates(SEED, 0, 20_000, |r, _| simulate_bm_drift(mu, t, 0.01, r).unwrap().values[200]);
    let n = ends.len() as f64;
    let (m, v) = (mean(&ends), variance(&ends));
    assert!((m - mu * t).abs() < 5.0 * (v / n).sqrt(), "{m}");
    assert!((v - t).abs() < 5.0 * t * (2.0 / n).sqrt(), "{v}");
}

#[test]
fn conditioned_path_grows_at_the_drift() {
    let mu = 1.0;
    for scheme in [ConditionedScheme::Euler, ConditionedScheme::Radial] {
        let ends = par_replicates(SEED, 1, 2000, |r, _| simulate_conditioned_bm(mu, 100.0, 0.01, scheme, r).unwrap().values[10_000]);
        let rate = mean(&ends) / 100.0;
        assert!((rate - mu).abs() < 0.03, "{scheme:?}: {rate}");
        assert!(ends.iter().all(|&b| b > 0.0));
    }
}

#[test]
fn composed_path_stays_below_its_maximum() {
    let mut r = substream(SEED, 2, 0);
    for _ in 0..200 {
        let (p, m) = williams_compose(1.0, 5.0, 1e-3, ConditionedScheme::Euler, &mut r).unwrap();
        assert!(p.values.iter().all(|&v| v <= m));
    }
}

#[test]
fn exponential_functional_trivial_cases() {
    let t = [0.5, 1.0, 2.0];
    let flat = exp_functional_moment(0.0, 0.3, 1.5, &t, 0.01, 100, SEED).unwrap();
    for (e, &ti) in flat.iter().zip(&t) {
        assert!((e.value - f64::powf(ti, 1.5)).abs() < 1e-9 && e.stderr < 1e-9);
    }
    let zero = exp_functional_moment(1.0, 0.3, 0.0, &t, 0.01, 100, SEED).unwrap();
    assert!(zero.iter().all(|e| e.value == 1.0));
}

#[test]
fn decomposition_checks_pass() {
    for scheme in [ConditionedScheme::Euler, ConditionedScheme::Radial] {
        let w = williams_check(1.0, 1e-3, 10_000, SEED, scheme).unwrap();
        assert!(w.t1.pass && w.t5.pass, "{w:?}");
        let two = two_m_minus_b_check(1.0, 1e-3, 10_000, SEED, scheme).unwrap();
        assert!(two.pass, "{two:?}");
        let bes = bes3_marginal_check(1e-3, 10_000, SEED, scheme);
        assert!(bes.pass, "{bes:?}");
        let rev = time_reversal_check(1.0, 1.0, 1e-3, 10_000, SEED, scheme).unwrap();
        assert!(rev.hitting.pass && rev.midpoint.pass, "{rev:?}");
    }
    let max = exp_max_check(1.0, 1e-3, 10_000, SEED).unwrap();
    assert!(max.pass, "{max:?}");
}

#[test]
fn pre_and_post_hitting_segments_are_uncorrelated() {
    let ind = independence_check(1.0, 1.0, 1e-3, 10_000, SEED).unwrap();
    assert!(ind.correlation.abs() <= 5.0 * ind.stderr, "{ind:?}");
}

#[test]
fn same_seed_same_paths() {
    let a = simulate_conditioned_bm(0.5, 1.0, 0.01, ConditionedScheme::Euler, &mut substream(3, 4, 5)).unwrap();
    let b = simulate_conditioned_bm(0.5, 1.0, 0.01, ConditionedScheme::Euler, &mut substream(3, 4, 5)).unwrap();
    assert_eq!(a, b);
    let x = exp_max_check(1.0, 1e-2, 500, 9).unwrap();
    let y = exp_max_check(1.0, 1e-2, 500, 9).unwrap();
    assert_eq!(x.ks, y.ks);
}
