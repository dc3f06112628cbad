use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

use super::{solve_quartic, Constraint, Factor, LinearConstraint, ProductConstraint, QuadraticConstraint};
use crate::linalg::dot;
use crate::{Result, HIT_GUARD};

/// `x(t) = μ + a sin t + b cos t`
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub mu: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    centered: bool,
}

impl Trajectory {
    /// Trajectory through `position` with `velocity` at `t = 0`, oscillating
    /// around `mu`.
    pub fn new(mu: Vec<f64>, position: &[f64], velocity: &[f64]) -> Self {
        let b = position.iter().zip(&mu).map(|(x, m)| x - m).collect();
        let centered = mu.iter().all(|v| *v == 0.0);
        Self { mu, a: velocity.to_vec(), b, centered }
    }

    /// Trajectory around the origin.
    pub fn centered(position: &[f64], velocity: &[f64]) -> Self {
        Self { mu: alloc::vec![0.0; position.len()], a: velocity.to_vec(), b: position.to_vec(), centered: true }
    }

    pub fn from_coefficients(mu: Vec<f64>, a: Vec<f64>, b: Vec<f64>) -> Self {
        let centered = mu.iter().all(|v| *v == 0.0);
        Self { mu, a, b, centered }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    pub fn position(&self, t: f64) -> Vec<f64> {
        let (s, c) = libm::sincos(t);
        (0..self.dim()).map(|i| self.mu[i] + self.a[i] * s + self.b[i] * c).collect()
    }

    pub fn velocity(&self, t: f64) -> Vec<f64> {
        let (s, c) = libm::sincos(t);
        (0..self.dim()).map(|i| self.a[i] * c - self.b[i] * s).collect()
    }
}

/// A wall contact found along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct HitEvent {
    pub time: f64,
    pub constraint_index: usize,
    /// For product constraints, the factor that vanished.
    pub factor_index: Option<usize>,
    /// Gradient of the vanishing constraint (or factor) at the hit point.
    pub gradient: Vec<f64>,
}

/// Reduces an angle into `[0, 2π)`.
fn wrap(t: f64) -> f64 {
    let r = t - TAU * libm::floor(t / TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Smallest `t > HIT_GUARD` in one period where
/// `g + p sin t + q cos t` crosses zero from above.
pub(crate) fn sinusoid_down_crossing(g: f64, p: f64, q: f64) -> Option<f64> {
    let u = libm::hypot(p, q);
    if !(u > g.abs()) {
        return None;
    }
    let phi = libm::atan2(-p, q);
    let mut t = wrap(libm::acos(-g / u) - phi);
    if t <= HIT_GUARD {
        t += TAU;
    }
    Some(t)
}

/// Down-crossing of `g + p sin t + q cos t` strictly before `window`.
/// `sin_w`, `cos_w` are the sine and cosine of `window`; cheap sign tests
/// skip the trigonometric solve when no crossing can occur in the window.
#[inline]
pub(crate) fn sinusoid_crossing_within(g: f64, p: f64, q: f64, window: f64, sin_w: f64, cos_w: f64) -> Option<f64> {
    if window <= PI && g + q > 0.0 {
        let end = g + p * sin_w + q * cos_w;
        let interior_min = p < 0.0 && p * cos_w - q * sin_w > 0.0;
        if end > 0.0 && !interior_min {
            return None;
        }
        if end > 0.0 && g * g >= p * p + q * q && g > 0.0 {
            return None;
        }
    }
    sinusoid_down_crossing(g, p, q).filter(|&t| t < window)
}

/// First time the trajectory reaches `F · x + g = 0` moving outward, within
/// one period. `None` when the wall is out of reach (`u ≤ |g'|`).
pub fn linear_hit_time(traj: &Trajectory, c: &LinearConstraint) -> Option<f64> {
    let g = if traj.centered { c.offset() } else { c.value(&traj.mu) };
    sinusoid_down_crossing(g, c.dot(&traj.a), c.dot(&traj.b))
}

/// Coefficients of `K(t) = q1 cos²t + q2 cos t + q3 + sin t (q4 cos t + q5)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct QuadCoeffs {
    q: [f64; 5],
}

impl QuadCoeffs {
    fn new(traj: &Trajectory, c: &QuadraticConstraint) -> Self {
        let (bb, cc) = if traj.centered {
            (c.b().to_vec(), c.c())
        } else {
            let r = c.recentered(&traj.mu);
            (r.b().to_vec(), r.c())
        };
        let a_a = c.a().mul_vec(&traj.a);
        let a_b = c.a().mul_vec(&traj.b);
        let aaa = dot(&traj.a, &a_a);
        let bab = dot(&traj.b, &a_b);
        let aab = dot(&traj.a, &a_b);
        Self { q: [bab - aaa, dot(&bb, &traj.b), cc + aaa, 2.0 * aab, dot(&bb, &traj.a)] }
    }

    fn value(&self, t: f64) -> f64 {
        let [q1, q2, q3, q4, q5] = self.q;
        let (s, c) = libm::sincos(t);
        q1 * c * c + q2 * c + q3 + s * (q4 * c + q5)
    }

    fn derivative(&self, t: f64) -> f64 {
        let [q1, q2, _, q4, q5] = self.q;
        let (s, c) = libm::sincos(t);
        // d/dt of q1 c² + q2 c + q3 + q4 s c + q5 s
        -2.0 * q1 * c * s - q2 * s + q4 * (c * c - s * s) + q5 * c
    }

    fn scale(&self) -> f64 {
        self.q.iter().map(|v| v.abs()).sum()
    }

    /// Newton refinement of a root in `t`, staying near the start.
    fn polish(&self, t0: f64) -> f64 {
        let mut t = t0;
        for _ in 0..8 {
            let k = self.value(t);
            let dk = self.derivative(t);
            if k == 0.0 || dk == 0.0 {
                break;
            }
            let next = t - k / dk;
            if !next.is_finite() || (next - t0).abs() > 1e-4 {
                break;
            }
            if (next - t).abs() <= 1e-16 * (1.0 + t.abs()) {
                t = next;
                break;
            }
            t = next;
        }
        t
    }

    /// Same function in the variable `s = t - π/2`.
    fn rotated(&self) -> Self {
        let [q1, q2, q3, q4, q5] = self.q;
        Self { q: [-q1, q5, q1 + q3, -q4, -q2] }
    }

    /// Candidate zeros from the quartic in `cos t` (unverified, unwrapped).
    fn cos_candidates(&self, out: &mut Vec<f64>, offset: f64) -> Result<()> {
        let [q1, q2, q3, q4, q5] = self.q;
        if q2 == 0.0 && q5 == 0.0 {
            // 2K = (q1 + 2 q3) + q1 cos 2t + q4 sin 2t
            if let Some(theta) = sinusoid_down_crossing(q1 + 2.0 * q3, q4, q1) {
                let h = theta / 2.0;
                out.extend([h + offset, h + PI + offset, h - PI + offset]);
            }
            return Ok(());
        }
        let mut r = [
            q1 * q1 + q4 * q4,
            2.0 * q1 * q2 + 2.0 * q4 * q5,
            q2 * q2 + 2.0 * q1 * q3 + q5 * q5 - q4 * q4,
            2.0 * q2 * q3 - 2.0 * q4 * q5,
            q3 * q3 - q5 * q5,
        ];
        let rmax = r.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for k in 0..4 {
            if r[k].abs() <= 1e-12 * rmax {
                r[k] = 0.0;
            } else {
                break;
            }
        }
        if r.iter().all(|v| *v == 0.0) {
            return Ok(());
        }
        for c in solve_quartic(r[0], r[1], r[2], r[3], r[4])? {
            if c.abs() > 1.0 + 1e-9 {
                continue;
            }
            let base = libm::acos(c.clamp(-1.0, 1.0));
            out.extend([base + offset, TAU - base + offset]);
        }
        Ok(())
    }

    fn first_crossing(&self) -> Result<Option<f64>> {
        let scale = self.scale();
        if scale == 0.0 {
            return Ok(None);
        }
        // acos loses accuracy near t = 0 and t = π, so the quartic is also
        // solved a quarter period away and the candidate sets are merged
        let mut candidates: Vec<f64> = Vec::with_capacity(16);
        self.cos_candidates(&mut candidates, 0.0)?;
        self.rotated().cos_candidates(&mut candidates, FRAC_PI_2)?;
        let tol = 1e-7 * scale;
        let mut best: Option<f64> = None;
        for t in candidates {
            let t = wrap(t);
            let t = self.polish(t);
            let t = if t <= HIT_GUARD { t + TAU } else { t };
            if t <= HIT_GUARD || t > TAU + HIT_GUARD {
                continue;
            }
            // un-squared check, then require an outward crossing
            if self.value(t).abs() > tol || self.derivative(t) > 0.0 {
                continue;
            }
            if best.is_none_or(|b| t < b) {
                best = Some(t);
            }
        }
        Ok(best)
    }
}

/// First time the trajectory reaches `xᵀAx + B·x + C = 0` moving outward,
/// within one period.
pub fn quadratic_hit_time(traj: &Trajectory, c: &QuadraticConstraint) -> Result<Option<f64>> {
    QuadCoeffs::new(traj, c).first_crossing()
}

fn factor_hit_time(traj: &Trajectory, f: &Factor) -> Result<Option<f64>> {
    match f {
        Factor::Linear(c) => Ok(linear_hit_time(traj, c)),
        Factor::Quadratic(c) => quadratic_hit_time(traj, c),
    }
}

/// Earliest zero of any factor; the event carries that factor's gradient.
/// `constraint_index` is left at 0 for the caller to fill in.
pub fn product_hit_time(traj: &Trajectory, c: &ProductConstraint) -> Result<Option<HitEvent>> {
    let mut best: Option<(f64, usize)> = None;
    for (k, f) in c.factors().iter().enumerate() {
        if let Some(t) = factor_hit_time(traj, f)? {
            if best.is_none_or(|(b, _)| t < b) {
                best = Some((t, k));
            }
        }
    }
    Ok(best.map(|(time, k)| HitEvent {
        time,
        constraint_index: 0,
        factor_index: Some(k),
        gradient: c.factors()[k].gradient(&traj.position(time)),
    }))
}

/// Hit time of any constraint together with the vanishing factor (if any).
pub(crate) fn constraint_hit(traj: &Trajectory, c: &Constraint) -> Result<Option<(f64, Option<usize>)>> {
    Ok(match c {
        Constraint::Linear(l) => linear_hit_time(traj, l).map(|t| (t, None)),
        Constraint::Quadratic(q) => quadratic_hit_time(traj, q)?.map(|t| (t, None)),
        Constraint::Product(p) => {
            let mut best: Option<(f64, usize)> = None;
            for (k, f) in p.factors().iter().enumerate() {
                if let Some(t) = factor_hit_time(traj, f)? {
                    if best.is_none_or(|(b, _)| t < b) {
                        best = Some((t, k));
                    }
                }
            }
            best.map(|(t, k)| (t, Some(k)))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use alloc::vec;

    fn lin(f: f64, g: f64) -> LinearConstraint {
        LinearConstraint::new(vec![f], g).unwrap()
    }

    #[test]
    fn rotated_coefficients_shift_by_a_quarter_period() {
        let k = QuadCoeffs { q: [0.7, -1.3, 0.2, 2.1, -0.4] };
        let r = k.rotated();
        for i in 0..20 {
            let t = i as f64 * 0.37;
            assert!((r.value(t) - k.value(t + FRAC_PI_2)).abs() < 1e-14);
        }
    }

    #[test]
    fn cosine_zero() {
        let t = linear_hit_time(&Trajectory::centered(&[1.0], &[0.0]), &lin(1.0, 0.0)).unwrap();
        assert!((t - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn phase_shifted_zero() {
        let t = linear_hit_time(&Trajectory::centered(&[1.0], &[1.0]), &lin(1.0, 0.0)).unwrap();
        assert!((t - 3.0 * PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn unreachable_wall() {
        assert_eq!(linear_hit_time(&Trajectory::centered(&[1.0], &[0.0]), &lin(1.0, 2.0)), None);
    }

    #[test]
    fn just_bounced_wall_not_redetected() {
        // on the wall, moving inward
        let t = linear_hit_time(&Trajectory::centered(&[0.0], &[1.0]), &lin(1.0, 0.0)).unwrap();
        assert!((t - PI).abs() < 1e-15);
    }

    #[test]
    fn centered_disc() {
        let q = QuadraticConstraint::new(DenseMatrix::from_rows(&[vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap(), vec![0.0, 0.0], 0.5)
            .unwrap();
        let t = quadratic_hit_time(&Trajectory::centered(&[0.0, 0.0], &[1.0, 0.0]), &q).unwrap().unwrap();
        assert!((t - PI / 4.0).abs() < 1e-14, "{t}");
    }

    #[test]
    fn one_dimensional_quadratic_via_quartic() {
        // x² - 2x + 0.75 ≥ 0 with x(t) = 2 cos t: boundary x = 1.5
        let q = QuadraticConstraint::new(DenseMatrix::identity(1), vec![-2.0], 0.75).unwrap();
        let t = quadratic_hit_time(&Trajectory::centered(&[2.0], &[0.0]), &q).unwrap().unwrap();
        assert!((t - libm::acos(0.75)).abs() < 1e-12, "{t}");
    }

    #[test]
    fn shifted_trajectory_uses_center() {
        // same boundary, trajectory around mu = 1: x(t) = 1 + cos t reaches 1.5 at acos(0.5)
        let q = QuadraticConstraint::new(DenseMatrix::identity(1), vec![-2.0], 0.75).unwrap();
        let t = quadratic_hit_time(&Trajectory::new(vec![1.0], &[2.0], &[0.0]), &q).unwrap().unwrap();
        assert!((t - libm::acos(0.5)).abs() < 1e-12, "{t}");
    }

    #[test]
    fn slab_as_product() {
        let p = ProductConstraint::new(vec![Factor::Linear(lin(1.0, 0.0)), Factor::Linear(lin(-1.0, 2.0))]).unwrap();
        let traj = Trajectory::new(vec![1.0], &[1.0], &[1.5]);
        let ev = product_hit_time(&traj, &p).unwrap().unwrap();
        assert!((ev.time - libm::asin(2.0 / 3.0)).abs() < 1e-14);
        assert_eq!(ev.factor_index, Some(1));
        assert_eq!(ev.gradient, vec![-1.0]);
    }

    #[test]
    fn singleton_product_matches_linear() {
        let c = lin(1.0, 0.0);
        let traj = Trajectory::centered(&[0.4], &[-0.3]);
        let p = ProductConstraint::new(vec![Factor::Linear(c.clone())]).unwrap();
        assert_eq!(product_hit_time(&traj, &p).unwrap().unwrap().time, linear_hit_time(&traj, &c).unwrap());
    }
}
