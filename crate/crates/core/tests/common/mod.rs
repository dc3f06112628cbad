#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tmg_core::constraints::{Constraint, Factor, LinearConstraint, ProductConstraint, QuadraticConstraint};
use tmg_core::engine::{Frame, TmgModel};
use tmg_core::linalg::{DenseMatrix, GaussianSpec, StructuredMatrix};

/// Asymptotic Kolmogorov tail `P(K > x)`.
pub fn kolmogorov_tail(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..200 {
        let k = k as f64;
        let term = (-2.0 * k * k * x * x).exp();
        s += if k as i64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// One-sample KS p-value against a continuous CDF.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        let f = cdf(*x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let sn = n.sqrt();
    kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d)
}

/// Two-sample KS statistic and p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < na && j < nb {
        let x = a[i].min(b[j]);
        while i < na && a[i] <= x {
            i += 1;
        }
        while j < nb && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let ne = (na * nb) as f64 / (na + nb) as f64;
    let sn = ne.sqrt();
    (d, kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d))
}

/// Thins a correlated series so that KS p-values are meaningful.
pub fn thin(values: &[f64], every: usize) -> Vec<f64> {
    values.iter().step_by(every).copied().collect()
}

pub fn normal_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

/// `A Aᵀ + shift I` with standard normal `A`.
pub fn random_spd(rng: &mut ChaCha8Rng, d: usize, shift: f64) -> DenseMatrix {
    let a: Vec<f64> = normal_vec(rng, d * d);
    DenseMatrix::from_fn(d, |i, j| {
        let s: f64 = (0..d).map(|k| a[i * d + k] * a[j * d + k]).sum();
        s + if i == j { shift } else { 0.0 }
    })
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> DenseMatrix {
    let a = normal_vec(rng, d * d);
    DenseMatrix::from_fn(d, |i, j| scale * 0.5 * (a[i * d + j] + a[j * d + i]))
}

/// Linear constraint with value `margin` at `x0`.
pub fn linear_through(rng: &mut ChaCha8Rng, x0: &[f64], margin: f64) -> LinearConstraint {
    let f = normal_vec(rng, x0.len());
    let g = margin - f.iter().zip(x0).map(|(a, b)| a * b).sum::<f64>();
    LinearConstraint::new(f, g).unwrap()
}

/// Quadratic constraint with value `margin` at `x0`.
pub fn quadratic_through(rng: &mut ChaCha8Rng, x0: &[f64], margin: f64) -> QuadraticConstraint {
    let d = x0.len();
    let mut a = random_symmetric(rng, d, 0.5);
    if rng.random_bool(0.5) {
        // bounded region: negative definite part dominates
        let spd = random_spd(rng, d, 0.5);
        a = DenseMatrix::from_fn(d, |i, j| a.get(i, j) * 0.2 - spd.get(i, j) * 0.3);
    }
    let b = normal_vec(rng, d);
    let tmp = QuadraticConstraint::new(a.clone(), b.clone(), 0.0).unwrap();
    let c = margin - tmp.value(x0);
    QuadraticConstraint::new(a, b, c).unwrap()
}

/// A random model of dimension `d ≤ 6` with mixed constraint kinds, strictly
/// feasible at the returned point.
pub fn random_model(rng: &mut ChaCha8Rng, frame: Frame) -> (TmgModel, Vec<f64>) {
    let d = rng.random_range(1..=6);
    let cov = random_spd(rng, d, 0.5);
    let mean = normal_vec(rng, d);
    let gaussian = GaussianSpec::covariance(StructuredMatrix::Dense(cov), mean.clone()).unwrap();
    let x0: Vec<f64> = mean.iter().map(|m| m + 0.5 * rng.sample::<f64, _>(StandardNormal)).collect();
    let n = rng.random_range(1..=5);
    let mut constraints = Vec::new();
    for _ in 0..n {
        let margin = rng.random_range(0.2..2.0);
        let c = match rng.random_range(0..3) {
            0 => Constraint::Linear(linear_through(rng, &x0, margin)),
            1 => Constraint::Quadratic(quadratic_through(rng, &x0, margin)),
            _ => {
                let f1 = if rng.random_bool(0.5) {
                    Factor::Linear(linear_through(rng, &x0, margin))
                } else {
                    Factor::Quadratic(quadratic_through(rng, &x0, margin))
                };
                let m2 = rng.random_range(0.2..2.0);
                let f2 = Factor::Linear(linear_through(rng, &x0, m2));
                Constraint::Product(ProductConstraint::new(vec![f1, f2]).unwrap())
            }
        };
        constraints.push(c);
    }
    (TmgModel::new(gaussian, constraints, frame).unwrap(), x0)
}

pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}
