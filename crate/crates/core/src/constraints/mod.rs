//! Constraint types, exact hit times along sinusoidal trajectories, and
//! elastic reflections.

pub(crate) mod hit;
mod quartic;

use alloc::vec::Vec;

use crate::linalg::{dot, CholeskyFactor, DenseMatrix, SYMMETRY_TOL};
use crate::{Error, Result};

pub use hit::{linear_hit_time, product_hit_time, quadratic_hit_time, HitEvent, Trajectory};
pub use quartic::solve_quartic;

/// Supports at most this fraction of the dimension are stored sparsely.
const SPARSE_FRACTION: usize = 4;

/// `F · x + g ≥ 0`
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    f: Vec<f64>,
    g: f64,
    /// Indices of the nonzero entries of `f`, kept when `f` is sparse.
    support: Option<Vec<usize>>,
}

impl LinearConstraint {
    pub fn new(f: Vec<f64>, g: f64) -> Result<Self> {
        if f.iter().chain(core::iter::once(&g)).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("constraint coefficients must be finite"));
        }
        let nz: Vec<usize> = f.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, _)| i).collect();
        if nz.is_empty() {
            return Err(Error::ZeroNormal);
        }
        let support = (nz.len() * SPARSE_FRACTION <= f.len()).then_some(nz);
        Ok(Self { f, g, support })
    }

    /// `x_i ≥ lower`
    pub fn lower_bound(d: usize, i: usize, lower: f64) -> Result<Self> {
        let mut f = alloc::vec![0.0; d];
        f[i] = 1.0;
        Self::new(f, -lower)
    }

    /// `x_i ≤ upper`
    pub fn upper_bound(d: usize, i: usize, upper: f64) -> Result<Self> {
        let mut f = alloc::vec![0.0; d];
        f[i] = -1.0;
        Self::new(f, upper)
    }

    pub fn dim(&self) -> usize {
        self.f.len()
    }

    pub fn normal(&self) -> &[f64] {
        &self.f
    }

    pub fn offset(&self) -> f64 {
        self.g
    }

    /// Nonzero indices of `F` (all indices for dense normals).
    pub fn support(&self) -> Vec<usize> {
        match &self.support {
            Some(s) => s.clone(),
            None => (0..self.f.len()).collect(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        self.support.is_some()
    }

    /// `F · x`
    #[inline]
    pub fn dot(&self, x: &[f64]) -> f64 {
        match &self.support {
            Some(s) => s.iter().map(|&i| self.f[i] * x[i]).sum(),
            None => dot(&self.f, x),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.dot(x) + self.g
    }
}

/// `xᵀ A x + B · x + C ≥ 0`
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticConstraint {
    a: DenseMatrix,
    b: Vec<f64>,
    c: f64,
}

impl QuadraticConstraint {
    pub fn new(a: DenseMatrix, b: Vec<f64>, c: f64) -> Result<Self> {
        if b.len() != a.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), got: b.len() });
        }
        if a.as_slice().iter().chain(&b).chain(core::iter::once(&c)).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("constraint coefficients must be finite"));
        }
        a.check_symmetric(SYMMETRY_TOL)?;
        if a.is_zero() && b.iter().all(|v| *v == 0.0) {
            return Err(Error::InvalidArgument("quadratic constraint needs a nonzero A or B"));
        }
        Ok(Self { a, b, c })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.a.bilinear(x, x) + dot(&self.b, x) + self.c
    }

    /// `2 A x + B`
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.a.mul_vec(x);
        for (gi, bi) in g.iter_mut().zip(&self.b) {
            *gi = 2.0 * *gi + bi;
        }
        g
    }

    /// The same constraint in the variable `y = x - shift`.
    pub fn recentered(&self, shift: &[f64]) -> Self {
        let a_shift = self.a.mul_vec(shift);
        let b: Vec<f64> = self.b.iter().zip(&a_shift).map(|(b, s)| b + 2.0 * s).collect();
        let c = self.c + dot(shift, &a_shift) + dot(&self.b, shift);
        Self { a: self.a.clone(), b, c }
    }
}

/// One factor of a [`ProductConstraint`].
#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    Linear(LinearConstraint),
    Quadratic(QuadraticConstraint),
}

impl Factor {
    pub fn dim(&self) -> usize {
        match self {
            Factor::Linear(c) => c.dim(),
            Factor::Quadratic(c) => c.dim(),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Factor::Linear(c) => c.value(x),
            Factor::Quadratic(c) => c.value(x),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Factor::Linear(c) => c.normal().to_vec(),
            Factor::Quadratic(c) => c.gradient(x),
        }
    }
}

/// `∏_k Q_k(x) ≥ 0`; the trajectory stops at the first factor that vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductConstraint {
    factors: Vec<Factor>,
}

impl ProductConstraint {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        let first = factors.first().ok_or(Error::InvalidArgument("product constraint needs a factor"))?;
        let d = first.dim();
        if let Some(bad) = factors.iter().find(|f| f.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: bad.dim() });
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors[0].dim()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.factors.iter().map(|f| f.value(x)).product()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let values: Vec<f64> = self.factors.iter().map(|f| f.value(x)).collect();
        let mut out = alloc::vec![0.0; self.dim()];
        for (k, f) in self.factors.iter().enumerate() {
            let others: f64 = values.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, v)| v).product();
            for (o, g) in out.iter_mut().zip(f.gradient(x)) {
                *o += others * g;
            }
        }
        out
    }
}

/// Any supported inequality.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    Linear(LinearConstraint),
    Quadratic(QuadraticConstraint),
    Product(ProductConstraint),
}

impl From<LinearConstraint> for Constraint {
    fn from(c: LinearConstraint) -> Self {
        Constraint::Linear(c)
    }
}

impl From<QuadraticConstraint> for Constraint {
    fn from(c: QuadraticConstraint) -> Self {
        Constraint::Quadratic(c)
    }
}

impl From<ProductConstraint> for Constraint {
    fn from(c: ProductConstraint) -> Self {
        Constraint::Product(c)
    }
}

impl Constraint {
    pub fn linear(f: Vec<f64>, g: f64) -> Result<Self> {
        LinearConstraint::new(f, g).map(Self::Linear)
    }

    pub fn quadratic(a: DenseMatrix, b: Vec<f64>, c: f64) -> Result<Self> {
        QuadraticConstraint::new(a, b, c).map(Self::Quadratic)
    }

    pub fn dim(&self) -> usize {
        match self {
            Constraint::Linear(c) => c.dim(),
            Constraint::Quadratic(c) => c.dim(),
            Constraint::Product(c) => c.dim(),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Constraint::Linear(c) => c.value(x),
            Constraint::Quadratic(c) => c.value(x),
            Constraint::Product(c) => c.value(x),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Constraint::Linear(c) => c.normal().to_vec(),
            Constraint::Quadratic(c) => c.gradient(x),
            Constraint::Product(c) => c.gradient(x),
        }
    }

    /// Rewrites the constraint for the variable `z` with `x = W z + shift`,
    /// where `W` is the factor's whitening map. Quadratic pieces need the
    /// dense `W`, built column by column (O(d) unwhitens).
    pub fn transformed(&self, factor: Option<&CholeskyFactor>, shift: &[f64]) -> Result<Self> {
        let mut dense_w: Option<Vec<Vec<f64>>> = None;
        self.transform_with(factor, shift, &mut dense_w)
    }

    fn transform_with(
        &self,
        factor: Option<&CholeskyFactor>,
        shift: &[f64],
        dense_w: &mut Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        Ok(match self {
            Constraint::Linear(c) => Constraint::Linear(transform_linear(c, factor, shift)?),
            Constraint::Quadratic(c) => Constraint::Quadratic(transform_quadratic(c, factor, shift, dense_w)?),
            Constraint::Product(p) => {
                let mut factors = Vec::with_capacity(p.factors.len());
                for f in &p.factors {
                    factors.push(match f {
                        Factor::Linear(c) => Factor::Linear(transform_linear(c, factor, shift)?),
                        Factor::Quadratic(c) => Factor::Quadratic(transform_quadratic(c, factor, shift, dense_w)?),
                    });
                }
                Constraint::Product(ProductConstraint { factors })
            }
        })
    }
}

/// Transforms a whole constraint list, sharing the dense `W` between
/// quadratic pieces.
pub fn transform_all(constraints: &[Constraint], factor: Option<&CholeskyFactor>, shift: &[f64]) -> Result<Vec<Constraint>> {
    let mut dense_w = None;
    constraints.iter().map(|c| c.transform_with(factor, shift, &mut dense_w)).collect()
}

fn transform_linear(c: &LinearConstraint, factor: Option<&CholeskyFactor>, shift: &[f64]) -> Result<LinearConstraint> {
    let g = c.value(shift);
    match factor {
        None => Ok(LinearConstraint { f: c.f.clone(), g, support: c.support.clone() }),
        Some(w) => {
            let f = w.unwhiten_transpose(&c.f)?;
            LinearConstraint::new(f, g)
        }
    }
}

fn transform_quadratic(
    c: &QuadraticConstraint,
    factor: Option<&CholeskyFactor>,
    shift: &[f64],
    dense_w: &mut Option<Vec<Vec<f64>>>,
) -> Result<QuadraticConstraint> {
    let centered = c.recentered(shift);
    let Some(w) = factor else {
        return Ok(centered);
    };
    let d = c.dim();
    if dense_w.is_none() {
        let mut cols = Vec::with_capacity(d);
        for j in 0..d {
            let mut e = alloc::vec![0.0; d];
            e[j] = 1.0;
            cols.push(w.unwhiten(&e)?);
        }
        *dense_w = Some(cols);
    }
    let cols = dense_w.as_ref().expect("filled above");
    let a_cols: Vec<Vec<f64>> = cols.iter().map(|col| centered.a.mul_vec(col)).collect();
    let mut a = DenseMatrix::from_fn(d, |i, j| dot(&cols[i], &a_cols[j]));
    // symmetrize away rounding
    for i in 0..d {
        for j in 0..i {
            let v = 0.5 * (a.get(i, j) + a.get(j, i));
            a.set(i, j, v);
            a.set(j, i, v);
        }
    }
    let b = w.unwhiten_transpose(&centered.b)?;
    Ok(QuadraticConstraint { a, b, c: centered.c })
}

/// Constraint value at `x`.
pub fn evaluate(c: &Constraint, x: &[f64]) -> Result<f64> {
    check_dim(c.dim(), x.len())?;
    Ok(c.value(x))
}

/// Constraint gradient at `x` (product rule for products).
pub fn gradient(c: &Constraint, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(c.dim(), x.len())?;
    Ok(c.gradient(x))
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Euclidean reflection: negates the component of `velocity` along `normal`.
pub fn reflect(velocity: &[f64], normal: &[f64]) -> Result<Vec<f64>> {
    check_dim(velocity.len(), normal.len())?;
    let nn = dot(normal, normal);
    if nn == 0.0 || !nn.is_finite() {
        return Err(Error::ZeroNormal);
    }
    let alpha = dot(normal, velocity) / nn;
    Ok(velocity.iter().zip(normal).map(|(v, n)| v - 2.0 * alpha * n).collect())
}

/// Reflection that preserves `vᵀ M v`: `v - 2 (n·v) / (nᵀ Σ n) Σ n`, where
/// `sigma_normal = Σ n` and `Σ = M⁻¹`.
pub fn reflect_metric(velocity: &[f64], normal: &[f64], sigma_normal: &[f64]) -> Result<Vec<f64>> {
    check_dim(velocity.len(), normal.len())?;
    check_dim(velocity.len(), sigma_normal.len())?;
    let denom = dot(normal, sigma_normal);
    if !(denom > 0.0) || !denom.is_finite() {
        return Err(Error::ZeroNormal);
    }
    let alpha = dot(normal, velocity) / denom;
    Ok(velocity.iter().zip(sigma_normal).map(|(v, s)| v - 2.0 * alpha * s).collect())
}
