use gmclab::specfun::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn barnes_functional_equation(x in 0.5f64..6.0) {
        let g1 = barnes_g(x + 1.0).unwrap().value();
        let g0 = barnes_g(x).unwrap().value();
        let gam = log_gamma(x).unwrap().exp();
        prop_assert!((g1 - gam * g0).abs() / g1 <= 1e-10);
    }

    #[test]
    fn fyodorov_bouchaud_unit_at_k_one(g2 in 1e-6f64..1.999_999) {
        prop_assert_eq!(fyodorov_bouchaud(1.0, g2.sqrt()).unwrap(), 1.0);
    }

    #[test]
    fn subcritical_cue_factorises(s in 0.05f64..0.95, frac in 0.05f64..0.95, n in 2u64..5000) {
        let k = 1.0 + frac * (1.0 / (s * s) - 1.0);
        prop_assume!((k - 1.0).abs() > 1e-6 && k * s * s < 1.0 - 1e-6);
        let lo = mom_leading_order(EnsembleFormula::new(Ensemble::Cue, k, s).unwrap(), n).unwrap();
        let expected = fyodorov_bouchaud(k, 2f64.sqrt() * s).unwrap()
            * keating_snaith_prefactor(s).unwrap().powf(k)
            * (n as f64).powf(k * s * s);
        prop_assert!((lo.value.unwrap() / expected - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn gamma_recurrence(x in 0.01f64..50.0) {
        let a = log_gamma(x + 1.0).unwrap();
        let b = log_gamma(x).unwrap() + x.ln();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }
}

#[test]
fn reflection_positive_and_continuous() {
    for d in [1u32, 2] {
        let top = (2.0 * d as f64).sqrt();
        for i in 1..=100 {
            let gamma = top * i as f64 / 101.0;
            let params = GmcParams::new(gamma, d).unwrap();
            let ln = log_reflection_coefficient(params).unwrap();
            assert!(ln.is_finite(), "d = {d}, gamma = {gamma}");
            match reflection_coefficient(params) {
                Ok(c) => assert!(c > 0.0 && (c.ln() - ln).abs() < 1e-9),
                Err(_) => assert!(ln > 709.0),
            }
            let nudged = log_reflection_coefficient(GmcParams::new(gamma * (1.0 + 1e-9), d).unwrap()).unwrap();
            assert!((nudged - ln).abs() < 1e-4 * ln.abs().max(1.0), "jump at d = {d}, gamma = {gamma}");
        }
    }
}
