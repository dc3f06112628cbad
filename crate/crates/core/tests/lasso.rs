mod common;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tmg_core::constraints::LinearConstraint;
use tmg_core::lasso::{lasso_beta_step, lasso_integrate, run_lasso_chain, LassoData, LassoModel};
use tmg_core::linalg::DenseMatrix;

/// CDF of `exp(-β²/2 - λ|β|)` by composite Simpson quadrature.
fn laplace_gauss_cdf(lambda: f64) -> impl Fn(f64) -> f64 {
    let density = move |b: f64| (-0.5 * b * b - lambda * b.abs()).exp();
    let (lo, hi, n) = (-12.0, 12.0, 24_000);
    let h = (hi - lo) / n as f64;
    let mut cum = vec![0.0; n + 1];
    for i in 0..n {
        let a = lo + i as f64 * h;
        cum[i + 1] = cum[i] + h / 6.0 * (density(a) + 4.0 * density(a + 0.5 * h) + density(a + h));
    }
    let total = cum[n];
    move |x: f64| {
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let k = ((x - lo) / h) as usize;
        let a = lo + k as f64 * h;
        let r = x - a;
        // Simpson on the partial cell
        let part = r / 6.0 * (density(a) + 4.0 * density(a + 0.5 * r) + density(x));
        (cum[k] + part) / total
    }
}

#[test]
fn one_dimensional_stationary_law() {
    let lambda = 1.5;
    let model = LassoModel::new(DenseMatrix::identity(1), vec![0.0], lambda, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let mut beta = vec![0.3];
    let mut xs = Vec::new();
    let mut flips = 0;
    for _ in 0..20_000 {
        let (next, stats) = lasso_beta_step(&model, &beta, &mut rng).unwrap();
        assert!((stats.energy_start - stats.energy_end).abs() < 1e-8);
        flips += stats.flips;
        beta = next;
        xs.push(beta[0]);
    }
    assert!(flips > 1000);
    let p = ks_one_sample(&xs, laplace_gauss_cdf(lambda));
    assert!(p > 0.001, "{p}");
    assert!(ks_one_sample(&xs, laplace_gauss_cdf(1.2)) < 1e-4);
}

#[test]
fn flips_conserve_energy_in_several_dimensions() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..30 {
        let m = random_spd(&mut rng, 4, 0.5);
        let c = normal_vec(&mut rng, 4);
        let model = LassoModel::new(m, c, 0.8, 0.7).unwrap();
        let beta = normal_vec(&mut rng, 4);
        let v = model.refresh_velocity(&mut rng);
        let (state, stats) = lasso_integrate(&model, &beta, &v, 5.0).unwrap();
        assert!((stats.energy_start - stats.energy_end).abs() < 1e-8, "{stats:?}");
        let h = model.energy(&state.signs, &state.beta, &state.velocity);
        assert!((h - stats.energy_start).abs() < 1e-8);
    }
}

#[test]
fn walls_and_flips_together() {
    let wall = LinearConstraint::upper_bound(2, 0, 0.5).unwrap();
    let model = LassoModel::new(DenseMatrix::identity(2), vec![0.0, 0.0], 1.0, 1.0).unwrap().with_constraints(vec![wall]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let mut beta = vec![0.0, 0.0];
    for _ in 0..2000 {
        let (next, stats) = lasso_beta_step(&model, &beta, &mut rng).unwrap();
        assert!((stats.energy_start - stats.energy_end).abs() < 1e-8);
        assert!(next[0] <= 0.5 + 1e-9);
        beta = next;
    }
}

#[test]
fn joint_chain_recovers_a_strong_signal() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let truth = [3.0, 0.0, -2.0];
    let z: Vec<Vec<f64>> = (0..200).map(|_| normal_vec(&mut rng, 3)).collect();
    let noise = normal_vec(&mut rng, 200);
    let y: Vec<f64> = z.iter().zip(&noise).map(|(r, e)| r.iter().zip(&truth).map(|(a, b)| a * b).sum::<f64>() + 0.5 * e).collect();
    let data = LassoData::new(z, y).unwrap();
    let chain = run_lasso_chain(&data, 1.0, 2000, 200, &[0.0; 3], 1.0, 4).unwrap();
    for (j, t) in truth.iter().enumerate() {
        let (m, _) = mean_var(&chain.beta.column(j));
        assert!((m - t).abs() < 0.2, "{j}: {m}");
    }
    let (s2, _) = mean_var(&chain.sigma2);
    assert!((s2 - 0.25).abs() < 0.1, "{s2}");
    assert!(chain.max_energy_drift < 1e-8);
}
