mod common;

use std::f64::consts::TAU;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tmg_core::constraints::{linear_hit_time, quadratic_hit_time, Trajectory};
use tmg_core::HIT_GUARD;

/// First outward zero of `k` on `(HIT_GUARD, 2π)` by grid scan and bisection.
fn grid_oracle(k: impl Fn(f64) -> f64) -> Option<f64> {
    const STEPS: usize = 200_000;
    let mut prev_t = HIT_GUARD;
    let mut prev = k(prev_t);
    for i in 1..=STEPS {
        let t = HIT_GUARD + (TAU - HIT_GUARD) * i as f64 / STEPS as f64;
        let v = k(t);
        if prev >= 0.0 && v < 0.0 {
            let (mut lo, mut hi) = (prev_t, t);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if k(mid) >= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        prev_t = t;
        prev = v;
    }
    None
}

#[test]
fn quadratic_hit_times_match_grid_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut hits = 0;
    for case in 0..300 {
        let d = rng.random_range(1..=5);
        let mu = normal_vec(&mut rng, d);
        let x0 = normal_vec(&mut rng, d);
        let v0 = normal_vec(&mut rng, d);
        let margin = rng.random_range(0.05..2.0);
        let c = quadratic_through(&mut rng, &x0, margin);
        let traj = Trajectory::new(mu, &x0, &v0);
        let got = quadratic_hit_time(&traj, &c).unwrap();
        let want = grid_oracle(|t| c.value(&traj.position(t)));
        match (got, want) {
            (Some(a), Some(b)) => {
                hits += 1;
                assert!((a - b).abs() < 1e-7, "case {case}: {a} vs {b}");
            }
            (None, None) => {}
            _ => panic!("case {case}: {got:?} vs {want:?}"),
        }
    }
    assert!(hits > 100, "{hits}");
}

#[test]
fn linear_hit_times_match_grid_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..300 {
        let d = rng.random_range(1..=5);
        let mu = normal_vec(&mut rng, d);
        let x0 = normal_vec(&mut rng, d);
        let v0 = normal_vec(&mut rng, d);
        let margin = rng.random_range(0.05..2.0);
        let c = linear_through(&mut rng, &x0, margin);
        let traj = Trajectory::new(mu, &x0, &v0);
        let got = linear_hit_time(&traj, &c);
        let want = grid_oracle(|t| c.value(&traj.position(t)));
        match (got, want) {
            (Some(a), Some(b)) => assert!((a - b).abs() < 1e-9, "case {case}: {a} vs {b}"),
            (None, None) => {}
            _ => panic!("case {case}: {got:?} vs {want:?}"),
        }
    }
}

#[test]
fn trajectory_stays_inside_before_hit() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let d = rng.random_range(1..=4);
        let x0 = normal_vec(&mut rng, d);
        let v0 = normal_vec(&mut rng, d);
        let c = quadratic_through(&mut rng, &x0, 0.5);
        let traj = Trajectory::centered(&x0, &v0);
        let end = quadratic_hit_time(&traj, &c).unwrap().unwrap_or(TAU);
        for i in 0..1000 {
            let t = end * i as f64 / 1000.0;
            assert!(c.value(&traj.position(t)) > -1e-9);
        }
    }
}

#[test]
fn clustered_quartic_roots_do_not_hide_a_crossing() {
    use tmg_core::constraints::QuadraticConstraint;
    use tmg_core::linalg::DenseMatrix;
    #[rustfmt::skip]
    let a = DenseMatrix::from_row_major(4, vec![
        -0.8216867261585439, -0.9616422713092323, -2.0167768365899787, -2.2055276363215794,
        -0.9616422713092323, -1.5376019045866889, -2.53976698207879, -1.4690762240914914,
        -2.0167768365899787, -2.53976698207879, -1.756204534013847, -1.7806789753994345,
        -2.2055276363215794, -1.4690762240914914, -1.7806789753994345, -2.1593547628374172,
    ]).unwrap();
    let b = vec![1.3162320225800455, -0.5021308866772843, -1.5497358447933398, -0.7663328485517278];
    let c = QuadraticConstraint::new(a, b, -0.42971400977200336).unwrap();
    let x = [-0.3027086437033831, 0.7278824800336322, -0.7085340767608681, 0.15061128918532773];
    let v = [-0.6794436687130101, -1.7091510913394177, -1.7115223011832175, -0.2918151026430862];
    let traj = Trajectory::centered(&x, &v);
    let got = quadratic_hit_time(&traj, &c).unwrap().unwrap();
    let want = grid_oracle(|t| c.value(&traj.position(t))).unwrap();
    assert!((got - want).abs() < 1e-9, "{got} vs {want}");
}
