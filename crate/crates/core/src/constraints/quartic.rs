//! Real roots of polynomials up to degree four.
//!
//! Roots are isolated through the real roots of the derivative, then located
//! by safeguarded Newton steps inside each monotone bracket and
//! Newton-polished on the original polynomial.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Target polish residual, relative to `Σ |r_k| |c|^k`.
pub const POLISH_TOL: f64 = 1e-12;
/// Residual above which a polished root is reported as a failure.
pub const FAILURE_TOL: f64 = 1e-10;

const MAX_NEWTON: usize = 60;

/// Evaluates `Σ coeffs[k] c^k` together with its derivative and the
/// rounding scale `Σ |coeffs[k]| |c|^k`.
fn horner(coeffs: &[f64], c: f64) -> (f64, f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    let mut scale = 0.0;
    let ac = c.abs();
    for &k in coeffs.iter().rev() {
        dp = dp * c + p;
        p = p * c + k;
        scale = scale * ac + k.abs();
    }
    (p, dp, scale)
}

/// Newton iteration on the polynomial with ascending `coeffs`.
/// Returns the polished root and its relative residual.
fn polish(coeffs: &[f64], mut c: f64) -> (f64, f64) {
    let (mut p, _, mut scale) = horner(coeffs, c);
    let mut best = (c, rel(p, scale));
    for _ in 0..MAX_NEWTON {
        if best.1 < POLISH_TOL {
            break;
        }
        let (_, dp, _) = horner(coeffs, c);
        if dp == 0.0 || !dp.is_finite() {
            break;
        }
        let next = c - p / dp;
        if !next.is_finite() {
            break;
        }
        c = next;
        let e = horner(coeffs, c);
        p = e.0;
        scale = e.2;
        let r = rel(p, scale);
        if r < best.1 {
            best = (c, r);
        }
    }
    best
}

fn rel(p: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        0.0
    } else {
        p.abs() / scale
    }
}

/// All real roots of `r4 c⁴ + r3 c³ + r2 c² + r1 c + r0`, sorted ascending,
/// with repeated roots reported once. The degree drops when leading
/// coefficients are exactly zero.
pub fn solve_quartic(r4: f64, r3: f64, r2: f64, r1: f64, r0: f64) -> Result<Vec<f64>> {
    let coeffs = [r0, r1, r2, r3, r4];
    if coeffs.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateAllZero);
    }
    if coeffs.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("polynomial coefficients must be finite"));
    }
    let degree = coeffs.iter().rposition(|&v| v != 0.0).unwrap_or(0);
    let active = &coeffs[..=degree];
    let mut roots = Vec::with_capacity(degree);
    for c in real_roots(active) {
        let (c, residual) = polish(active, c);
        if residual > FAILURE_TOL {
            return Err(Error::QuarticSolverFailure { residual });
        }
        roots.push(c);
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-7 * (1.0 + b.abs()));
    Ok(roots)
}

/// Real roots of the polynomial with ascending `coeffs` and nonzero leading
/// coefficient. The real roots of the derivative split the line into
/// monotone pieces; each piece with a sign change holds exactly one root,
/// and a critical point where the polynomial vanishes is a repeated root.
fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len() - 1;
    match n {
        0 => return Vec::new(),
        1 => return alloc::vec![-coeffs[0] / coeffs[1]],
        2 => return quadratic_roots(coeffs[1] / coeffs[2], coeffs[0] / coeffs[2]),
        _ => {}
    }
    let lead = coeffs[n];
    // Cauchy bound on the root moduli
    let bound = 1.0 + coeffs[..n].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let derivative: Vec<f64> = (1..=n).map(|k| k as f64 * coeffs[k]).collect();
    let mut breaks = Vec::with_capacity(n + 1);
    breaks.push(-bound);
    breaks.extend(real_roots(&derivative).into_iter().filter(|c| c.abs() < bound));
    breaks.push(bound);
    breaks.sort_by(f64::total_cmp);

    let mut roots = Vec::with_capacity(n);
    let eval = |c: f64| horner(coeffs, c);
    for (i, w) in breaks.windows(2).enumerate() {
        let (l, r) = (w[0], w[1]);
        let (pl, _, sl) = eval(l);
        let (pr, _, _) = eval(r);
        if i > 0 && rel(pl, sl) <= POLISH_TOL {
            roots.push(l);
            continue;
        }
        if pl == 0.0 {
            roots.push(l);
        } else if pl.signum() != pr.signum() && pr != 0.0 {
            roots.push(bracketed_root(coeffs, l, r, pl));
        }
    }
    let last = *breaks.last().expect("non-empty");
    if eval(last).0 == 0.0 {
        roots.push(last);
    }
    roots
}

/// Root of a polynomial that is monotone on `[lo, hi]` and changes sign
/// there (`p(lo) = p_lo`): Newton steps, falling back to bisection whenever
/// a step leaves the bracket.
fn bracketed_root(coeffs: &[f64], mut lo: f64, mut hi: f64, p_lo: f64) -> f64 {
    let lo_sign = p_lo.signum();
    let mut c = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (p, dp, scale) = horner(coeffs, c);
        if p == 0.0 || rel(p, scale) <= f64::EPSILON {
            return c;
        }
        if p.signum() == lo_sign {
            lo = c;
        } else {
            hi = c;
        }
        let newton = c - p / dp;
        let next = if dp != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if next == c || next <= lo || next >= hi {
            return c;
        }
        c = next;
    }
    c
}

/// Roots of monic `c² + b c + c0`.
fn quadratic_roots(b: f64, c0: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * c0;
    let slack = 1e-12 * (b * b + 4.0 * c0.abs());
    if disc < -slack {
        return Vec::new();
    }
    if disc <= slack {
        return alloc::vec![-b / 2.0];
    }
    let sq = libm::sqrt(disc);
    let q = -0.5 * (b + if b >= 0.0 { sq } else { -sq });
    if q == 0.0 {
        let r = libm::sqrt(-c0);
        return alloc::vec![-r, r];
    }
    alloc::vec![q, c0 / q]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn biquadratic_with_four_roots() {
        let r = solve_quartic(1.0, 0.0, -4.25, 0.0, 1.0).unwrap();
        assert!(close(&r, &[-2.0, -0.5, 0.5, 2.0], 1e-12), "{r:?}");
    }

    #[test]
    fn quadruple_root_reported_once() {
        assert_eq!(solve_quartic(1.0, 0.0, 0.0, 0.0, 0.0).unwrap(), alloc::vec![0.0]);
    }

    #[test]
    fn no_real_roots() {
        assert!(solve_quartic(1.0, 0.0, 0.0, 0.0, 1.0).unwrap().is_empty());
    }

    #[test]
    fn all_zero_is_an_error() {
        assert_eq!(solve_quartic(0.0, 0.0, 0.0, 0.0, 0.0), Err(Error::DegenerateAllZero));
    }

    #[test]
    fn degrades_to_lower_degrees() {
        assert!(close(&solve_quartic(0.0, 1.0, -6.0, 11.0, -6.0).unwrap(), &[1.0, 2.0, 3.0], 1e-12));
        assert!(close(&solve_quartic(0.0, 0.0, 1.0, 0.0, -4.0).unwrap(), &[-2.0, 2.0], 1e-14));
        assert!(close(&solve_quartic(0.0, 0.0, 0.0, 2.0, -1.0).unwrap(), &[0.5], 1e-15));
        assert!(solve_quartic(0.0, 0.0, 0.0, 0.0, 3.0).unwrap().is_empty());
    }

    #[test]
    fn asymmetric_quartic() {
        // (c - 0.3)(c + 0.7)(c - 1.9)(c + 4)
        let roots = [-4.0, -0.7, 0.3, 1.9];
        let mut co = [1.0, 0.0, 0.0, 0.0, 0.0];
        for z in roots {
            let mut next = [0.0; 5];
            for k in 0..5 {
                if k > 0 {
                    next[k] += co[k - 1];
                }
                next[k] -= z * co[k];
            }
            co = next;
        }
        let r = solve_quartic(co[4], co[3], co[2], co[1], co[0]).unwrap();
        assert!(close(&r, &roots, 1e-10), "{r:?}");
    }

    #[test]
    fn clustered_roots_near_one_are_all_found() {
        // (c² - 0.9958)(c² - 0.9820) scaled, the shape produced by a nearly
        // centred quadratic constraint
        let (a, b) = (0.9958, 0.9820);
        let r = solve_quartic(1356.0, 0.0, -1356.0 * (a + b), 0.0, 1356.0 * a * b).unwrap();
        let want = [-f64::sqrt(a), -f64::sqrt(b), f64::sqrt(b), f64::sqrt(a)];
        assert!(close(&r, &want, 1e-12), "{r:?}");
        let r = solve_quartic(1356.3540582047215, -0.16575705273455554, -2682.695388520023, 0.24758736154038452, 1326.424159665228).unwrap();
        assert_eq!(r.len(), 4, "{r:?}");
    }

    #[test]
    fn double_roots_are_found() {
        // (c - 0.5)² (c + 1)²
        let r = solve_quartic(1.0, 1.0, -0.75, -0.5, 0.25).unwrap();
        assert!(close(&r, &[-1.0, 0.5], 1e-6), "{r:?}");
    }
}
