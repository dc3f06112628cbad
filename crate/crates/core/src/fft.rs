//! Complex discrete Fourier transform of arbitrary length.
//!
//! Lengths whose prime factors are all small use a recursive mixed-radix
//! Cooley-Tukey decomposition with dedicated radix-2/3/4 butterflies. Lengths
//! containing a larger prime factor go through Bluestein's chirp-z transform on
//! a power-of-two grid. The transform computed is the unnormalized forward DFT
//! `X[k] = sum_j x[j] exp(-2 pi i j k / n)`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, AddAssign, Mul, MulAssign, Sub};

/// Largest prime factor handled by the mixed-radix path.
const MAX_DIRECT_RADIX: usize = 31;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Self = Self { re: 0.0, im: 0.0 };

    #[inline]
    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    #[inline]
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = (libm::sin(theta), libm::cos(theta));
        Self { re: c, im: s }
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self { re: self.re, im: -self.im }
    }

    #[inline]
    pub fn scale(self, k: f64) -> Self {
        Self { re: self.re * k, im: self.im * k }
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

impl Add for Complex {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl AddAssign for Complex {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        self.re += o.re;
        self.im += o.im;
    }
}

impl Sub for Complex {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Complex {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl MulAssign for Complex {
    #[inline]
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

/// A precomputed transform plan for one length.
#[derive(Debug, Clone)]
pub struct Fft {
    len: usize,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    MixedRadix(MixedRadix),
    Bluestein(Box<Bluestein>),
}

impl Fft {
    /// Plans a forward transform of length `len` (must be at least 1).
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "fft length must be positive");
        let factors = factorize(len);
        let kind = if factors.iter().all(|&(p, _)| p <= MAX_DIRECT_RADIX) {
            Kind::MixedRadix(MixedRadix::new(len))
        } else {
            Kind::Bluestein(Box::new(Bluestein::new(len)))
        };
        Self { len, kind }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Forward transform of `input` into a fresh vector.
    pub fn forward(&self, input: &[Complex]) -> Vec<Complex> {
        assert_eq!(input.len(), self.len, "fft input length mismatch");
        match &self.kind {
            Kind::MixedRadix(plan) => {
                let mut out = vec![Complex::ZERO; self.len];
                plan.run(input, &mut out);
                out
            }
            Kind::Bluestein(plan) => plan.run(input),
        }
    }

    /// Unnormalized inverse transform: `x[j] = sum_k X[k] exp(+2 pi i j k / n)`.
    pub fn inverse_unnormalized(&self, input: &[Complex]) -> Vec<Complex> {
        let conj: Vec<Complex> = input.iter().map(|c| c.conj()).collect();
        let mut out = self.forward(&conj);
        for c in &mut out {
            *c = c.conj();
        }
        out
    }
}

/// Prime factorization as (prime, multiplicity), ascending.
fn factorize(mut n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut k = 0;
        while n.is_multiple_of(p) {
            n /= p;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[derive(Debug, Clone)]
struct MixedRadix {
    len: usize,
    twiddles: Vec<Complex>,
    /// Stage radices, outermost first.
    radices: Vec<usize>,
    max_radix: usize,
}

impl MixedRadix {
    fn new(len: usize) -> Self {
        let twiddles = (0..len)
            .map(|k| Complex::from_angle(-2.0 * PI * k as f64 / len as f64))
            .collect();
        let mut radices = Vec::new();
        let mut n = len;
        while n.is_multiple_of(4) && n > 4 {
            radices.push(4);
            n /= 4;
        }
        for (p, k) in factorize(n) {
            for _ in 0..k {
                radices.push(p);
            }
        }
        let max_radix = radices.iter().copied().max().unwrap_or(1);
        Self { len, twiddles, radices, max_radix }
    }

    fn run(&self, input: &[Complex], out: &mut [Complex]) {
        if self.len == 1 {
            out[0] = input[0];
            return;
        }
        let mut scratch = vec![Complex::ZERO; 2 * self.max_radix];
        self.work(out, input, 0, 1, 0, &mut scratch);
    }

    /// Transforms the decimated subsequence `input[offset + j * stride]` into
    /// `out` (whose length is the subsequence length).
    fn work(
        &self,
        out: &mut [Complex],
        input: &[Complex],
        offset: usize,
        stride: usize,
        stage: usize,
        scratch: &mut [Complex],
    ) {
        let p = self.radices[stage];
        let m = out.len() / p;
        if m == 1 {
            for (q, o) in out.iter_mut().enumerate() {
                *o = input[offset + q * stride];
            }
        } else {
            for q in 0..p {
                self.work(
                    &mut out[q * m..(q + 1) * m],
                    input,
                    offset + q * stride,
                    stride * p,
                    stage + 1,
                    scratch,
                );
            }
        }
        match p {
            2 => self.butterfly2(out, stride, m),
            3 => self.butterfly3(out, stride, m),
            4 => self.butterfly4(out, stride, m),
            _ => self.butterfly_odd(out, stride, m, p, scratch),
        }
    }

    fn butterfly2(&self, out: &mut [Complex], fstride: usize, m: usize) {
        let (lo, hi) = out.split_at_mut(m);
        for k in 0..m {
            let t = hi[k] * self.twiddles[k * fstride];
            hi[k] = lo[k] - t;
            lo[k] += t;
        }
    }

    fn butterfly3(&self, out: &mut [Complex], fstride: usize, m: usize) {
        let epi3 = self.twiddles[fstride * m];
        for k in 0..m {
            let s1 = out[k + m] * self.twiddles[k * fstride];
            let s2 = out[k + 2 * m] * self.twiddles[2 * k * fstride];
            let s3 = s1 + s2;
            let s0 = (s1 - s2).scale(epi3.im);
            let base = out[k];
            let mid = base - s3.scale(0.5);
            out[k] = base + s3;
            out[k + 2 * m] = Complex::new(mid.re + s0.im, mid.im - s0.re);
            out[k + m] = Complex::new(mid.re - s0.im, mid.im + s0.re);
        }
    }

    fn butterfly4(&self, out: &mut [Complex], fstride: usize, m: usize) {
        for k in 0..m {
            let s0 = out[k + m] * self.twiddles[k * fstride];
            let s1 = out[k + 2 * m] * self.twiddles[2 * k * fstride];
            let s2 = out[k + 3 * m] * self.twiddles[3 * k * fstride];
            let s5 = out[k] - s1;
            let f0 = out[k] + s1;
            let s3 = s0 + s2;
            let s4 = s0 - s2;
            out[k + 2 * m] = f0 - s3;
            out[k] = f0 + s3;
            out[k + m] = Complex::new(s5.re + s4.im, s5.im - s4.re);
            out[k + 3 * m] = Complex::new(s5.re - s4.im, s5.im + s4.re);
        }
    }

    /// Odd prime radix. Inputs are twiddled once, then the length-p DFT is
    /// evaluated on the symmetric and antisymmetric pair sums, which yields
    /// outputs `q` and `p - q` together.
    fn butterfly_odd(&self, out: &mut [Complex], fstride: usize, m: usize, p: usize, scratch: &mut [Complex]) {
        let root = self.len / p;
        let h = (p - 1) / 2;
        let (sum, diff) = scratch.split_at_mut(p);
        for u in 0..m {
            let x0 = out[u];
            let mut total = x0;
            for s in 1..=h {
                let a = out[u + s * m] * self.twiddles[s * u * fstride];
                let b = out[u + (p - s) * m] * self.twiddles[(p - s) * u * fstride];
                sum[s] = a + b;
                diff[s] = a - b;
                total += sum[s];
            }
            out[u] = total;
            for q in 1..=h {
                let mut re = x0;
                let mut im = Complex::ZERO;
                let mut idx = 0usize;
                for s in 1..=h {
                    idx += q;
                    if idx >= p {
                        idx -= p;
                    }
                    let w = self.twiddles[idx * root];
                    re += sum[s].scale(w.re);
                    im += diff[s].scale(w.im);
                }
                // w.im = -sin, so `im` already carries the minus sign
                out[u + q * m] = Complex::new(re.re - im.im, re.im + im.re);
                out[u + (p - q) * m] = Complex::new(re.re + im.im, re.im - im.re);
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Bluestein {
    len: usize,
    inner: MixedRadix,
    /// exp(-i pi j^2 / n)
    chirp: Vec<Complex>,
    /// Forward transform of the padded conjugate chirp, divided by the grid size.
    kernel_hat: Vec<Complex>,
}

impl Bluestein {
    fn new(len: usize) -> Self {
        let grid = (2 * len - 1).next_power_of_two();
        let inner = MixedRadix::new(grid);
        let two_n = 2 * len as u128;
        let chirp: Vec<Complex> = (0..len)
            .map(|j| {
                let jj = ((j as u128 * j as u128) % two_n) as f64;
                Complex::from_angle(-PI * jj / len as f64)
            })
            .collect();
        let mut kernel = vec![Complex::ZERO; grid];
        kernel[0] = chirp[0].conj();
        for j in 1..len {
            kernel[j] = chirp[j].conj();
            kernel[grid - j] = chirp[j].conj();
        }
        let mut kernel_hat = vec![Complex::ZERO; grid];
        inner.run(&kernel, &mut kernel_hat);
        let inv = 1.0 / grid as f64;
        for c in &mut kernel_hat {
            *c = c.scale(inv);
        }
        Self { len, inner, chirp, kernel_hat }
    }

    fn run(&self, input: &[Complex]) -> Vec<Complex> {
        let grid = self.kernel_hat.len();
        let mut a = vec![Complex::ZERO; grid];
        for j in 0..self.len {
            a[j] = input[j] * self.chirp[j];
        }
        let mut a_hat = vec![Complex::ZERO; grid];
        self.inner.run(&a, &mut a_hat);
        // inverse transform via conjugation
        for (x, k) in a_hat.iter_mut().zip(&self.kernel_hat) {
            *x = (*x * *k).conj();
        }
        self.inner.run(&a_hat, &mut a);
        (0..self.len).map(|k| a[k].conj() * self.chirp[k]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[Complex]) -> Vec<Complex> {
        let n = x.len();
        (0..n)
            .map(|k| {
                let mut acc = Complex::ZERO;
                for (j, xj) in x.iter().enumerate() {
                    let ang = -2.0 * PI * ((j * k) % n) as f64 / n as f64;
                    acc += *xj * Complex::from_angle(ang);
                }
                acc
            })
            .collect()
    }

    fn signal(n: usize) -> Vec<Complex> {
        (0..n)
            .map(|j| Complex::new(libm::sin(j as f64 * 0.37) + 0.1 * j as f64, libm::cos(j as f64 * 1.3)))
            .collect()
    }

    #[test]
    fn matches_naive_dft_for_many_lengths() {
        for n in [1usize, 2, 3, 4, 5, 6, 7, 8, 12, 16, 30, 37, 64, 97, 126, 210, 398, 1024] {
            let x = signal(n);
            let fast = Fft::new(n).forward(&x);
            let slow = naive_dft(&x);
            let scale = slow.iter().map(|c| c.norm_sqr().sqrt()).fold(1.0, f64::max);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((*a - *b).norm_sqr().sqrt() < 1e-11 * scale, "n = {n}");
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let n = 8190;
        let x = signal(n);
        let plan = Fft::new(n);
        let back = plan.inverse_unnormalized(&plan.forward(&x));
        for (a, b) in back.iter().zip(&x) {
            assert!((a.scale(1.0 / n as f64) - *b).norm_sqr().sqrt() < 1e-9);
        }
    }
}
