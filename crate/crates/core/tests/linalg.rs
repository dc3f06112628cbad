mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tmg_core::linalg::{
    squared_exponential_row, BandedMatrix, CholeskyFactor, DenseMatrix, Form, GaussianSpec, RegressionPrecision,
    StructuredMatrix, ToeplitzMatrix,
};

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

/// Random symmetric diagonally dominant band matrix.
fn random_banded(rng: &mut ChaCha8Rng, n: usize, k: usize) -> BandedMatrix {
    let mut diags = Vec::new();
    let off: Vec<Vec<f64>> = (1..=k).map(|j| normal_vec(rng, n - j.min(n))).collect();
    let dom: Vec<f64> = (0..n)
        .map(|i| {
            let mut s = 0.0;
            for (j, d) in off.iter().enumerate() {
                if i + j + 1 < n {
                    s += d[i].abs();
                }
                if i > j {
                    s += d[i - j - 1].abs();
                }
            }
            s + 0.5
        })
        .collect();
    diags.push(dom);
    diags.extend(off);
    BandedMatrix::from_diagonals(diags).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn whitening_round_trips(seed in 0u64..10_000, d in 1usize..8, precision in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_spd(&mut rng, d, 0.3);
        let form = if precision { Form::Precision } else { Form::Covariance };
        let f = CholeskyFactor::new(form, &StructuredMatrix::Dense(a)).unwrap();
        let x = normal_vec(&mut rng, d);
        prop_assert!(close(&f.unwhiten(&f.whiten(&x).unwrap()).unwrap(), &x, 1e-9));
        prop_assert!(close(&f.whiten(&f.unwhiten(&x).unwrap()).unwrap(), &x, 1e-9));
        prop_assert!(close(&f.covariance_mul(&f.precision_mul(&x).unwrap()).unwrap(), &x, 1e-8));
    }

    #[test]
    fn factor_reproduces_the_matrix(seed in 0u64..10_000, d in 1usize..8, precision in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_spd(&mut rng, d, 0.3);
        let form = if precision { Form::Precision } else { Form::Covariance };
        let f = CholeskyFactor::new(form, &StructuredMatrix::Dense(a.clone())).unwrap();
        prop_assert!(close(f.reconstruct().unwrap().as_slice(), a.as_slice(), 1e-10));
    }

    #[test]
    fn banded_matches_dense(seed in 0u64..10_000, n in 2usize..12, k in 1usize..3, precision in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_banded(&mut rng, n, k);
        let dense = b.to_dense();
        let form = if precision { Form::Precision } else { Form::Covariance };
        let fb = CholeskyFactor::new(form, &StructuredMatrix::Banded(b)).unwrap();
        let fd = CholeskyFactor::new(form, &StructuredMatrix::Dense(dense)).unwrap();
        let x = normal_vec(&mut rng, n);
        prop_assert!(close(&fb.unwhiten(&x).unwrap(), &fd.unwhiten(&x).unwrap(), 1e-10));
        prop_assert!(close(&fb.whiten(&x).unwrap(), &fd.whiten(&x).unwrap(), 1e-10));
        prop_assert!(close(&fb.unwhiten_transpose(&x).unwrap(), &fd.unwhiten_transpose(&x).unwrap(), 1e-10));
    }

    #[test]
    fn regression_matches_dense(seed in 0u64..10_000, p in 1usize..4, n in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z: Vec<Vec<f64>> = (0..n).map(|_| normal_vec(&mut rng, p)).collect();
        let r = RegressionPrecision::new(&z, 2.0).unwrap();
        let dense = r.to_dense();
        let fr = CholeskyFactor::new(Form::Precision, &StructuredMatrix::Regression(r)).unwrap();
        let fd = CholeskyFactor::new(Form::Precision, &StructuredMatrix::Dense(dense.clone())).unwrap();
        let x = normal_vec(&mut rng, p + n);
        prop_assert!(close(&fr.precision_mul(&x).unwrap(), &dense.mul_vec(&x), 1e-10));
        prop_assert!(close(&fr.covariance_mul(&x).unwrap(), &fd.covariance_mul(&x).unwrap(), 1e-8));
        // W Wᵀ agrees even though the square roots differ
        let wx = fr.whiten(&x).unwrap();
        prop_assert!((wx.iter().map(|v| v * v).sum::<f64>() - dense.bilinear(&x, &x)).abs() < 1e-8 * (1.0 + dense.bilinear(&x, &x)));
    }

    #[test]
    fn toeplitz_matches_dense(seed in 0u64..10_000, n in 20usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let row = squared_exponential_row(n, 0.1, 1.5, 0.01, 1e-3);
        let t = ToeplitzMatrix::new(row).unwrap();
        let ft = CholeskyFactor::new(Form::Covariance, &StructuredMatrix::Toeplitz(t.clone())).unwrap();
        let fd = CholeskyFactor::new(Form::Covariance, &StructuredMatrix::Dense(t.to_dense())).unwrap();
        let x = normal_vec(&mut rng, n);
        prop_assert!(close(&ft.whiten(&x).unwrap(), &fd.whiten(&x).unwrap(), 1e-8));
        prop_assert!(close(&ft.covariance_mul(&x).unwrap(), &t.mul_vec(&x), 1e-10));
    }
}

#[test]
fn precision_spec_mean_solves_the_linear_term() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m = random_spd(&mut rng, 5, 1.0);
    let r = normal_vec(&mut rng, 5);
    let g = GaussianSpec::precision(StructuredMatrix::Dense(m.clone()), r.clone()).unwrap();
    assert!(close(&m.mul_vec(g.mean()), &r, 1e-10));
}

#[test]
fn sample_moments_match_covariance() {
    let cov = DenseMatrix::from_rows(&[vec![2.0, 0.6, 0.0], vec![0.6, 1.0, -0.3], vec![0.0, -0.3, 0.5]]).unwrap();
    let g = GaussianSpec::covariance(StructuredMatrix::Dense(cov.clone()), vec![1.0, -1.0, 0.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 100_000;
    let draws: Vec<Vec<f64>> = (0..n).map(|_| g.sample(&mut rng).unwrap()).collect();
    for i in 0..3 {
        let mi = draws.iter().map(|x| x[i]).sum::<f64>() / n as f64;
        assert!((mi - g.mean()[i]).abs() < 0.02, "{i}");
        for j in 0..3 {
            let c = draws.iter().map(|x| (x[i] - g.mean()[i]) * (x[j] - g.mean()[j])).sum::<f64>() / n as f64;
            assert!((c - cov.get(i, j)).abs() < 0.03, "{i} {j}: {c}");
        }
    }
}

#[test]
fn circulant_draws_match_toeplitz_lags() {
    let n = 64;
    let row = squared_exponential_row(n, 0.1, 1.0, 0.05, 1e-6);
    let t = ToeplitzMatrix::new(row.clone()).unwrap();
    let g = GaussianSpec::covariance(StructuredMatrix::Toeplitz(t), vec![0.0; n]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let draws = 20_000;
    let mut acc = [0.0; 4];
    for _ in 0..draws {
        let x = g.draw_centered(&mut rng).unwrap();
        for (lag, a) in acc.iter_mut().enumerate() {
            *a += x[10] * x[10 + lag];
        }
    }
    for (lag, a) in acc.iter().enumerate() {
        assert!((a / draws as f64 - row[lag]).abs() < 0.04, "lag {lag}");
    }
}
