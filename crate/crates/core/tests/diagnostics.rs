use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tmg_core::diagnostics::{acf, esf, ess, quartiles};
use tmg_core::Error;

fn ar1(rho: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = 0.0;
    let s = (1.0 - rho * rho).sqrt();
    (0..n)
        .map(|_| {
            x = rho * x + s * rng.sample::<f64, _>(StandardNormal);
            x
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn esf_is_affine_invariant(seed in 0u64..10_000, scale in 0.01f64..100.0, shift in -50.0f64..50.0, neg in any::<bool>()) {
        let x = ar1(0.5, 500, seed);
        let k = if neg { -scale } else { scale };
        let y: Vec<f64> = x.iter().map(|v| k * v + shift).collect();
        let (a, b) = (esf(&x).unwrap(), esf(&y).unwrap());
        prop_assert!((a - b).abs() < 1e-9 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn acf_is_bounded(seed in 0u64..10_000) {
        let x = ar1(0.3, 200, seed);
        let r = acf(&x, 50).unwrap();
        prop_assert_eq!(r.len(), 50);
        prop_assert!(r.iter().all(|v| v.abs() <= 1.0 + 1e-12));
    }
}

#[test]
fn ar1_esf_matches_the_analytic_factor() {
    for rho in [0.0, 0.5, 0.9] {
        let x = ar1(rho, 200_000, 17);
        let want = (1.0 - rho) / (1.0 + rho);
        let got = esf(&x).unwrap();
        assert!((got - want).abs() < 0.1 * want.max(0.1), "rho {rho}: {got} vs {want}");
        assert!((ess(&x).unwrap() - got * x.len() as f64).abs() < 1e-6 * x.len() as f64);
    }
}

#[test]
fn degenerate_inputs_are_errors() {
    assert!(matches!(esf(&[1.0; 20]), Err(Error::ZeroVariance)));
    assert!(esf(&[1.0]).is_err());
    assert!(quartiles(&[]).is_none());
}

#[test]
fn single_sampler_single_repeat_gives_one_row() {
    use tmg_core::diagnostics::{benchmark, BenchSampler};
    use tmg_core::engine::NoClock;
    let p = tmg_core::models::wedge().unwrap();
    let samplers = vec![("hmc".to_string(), BenchSampler::Hmc { travel_time: std::f64::consts::FRAC_PI_2, frame: None })];
    let rows = benchmark(&p.model, &samplers, 500, 50, 1, 3, &p.init, &[1], &NoClock).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].repeats, 1);
    assert!(rows[0].esf.median > 0.0);
    assert!(rows[0].ess_per_cpu.is_none());
}
