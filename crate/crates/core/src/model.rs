//! Matrices, operator tuples and the basic operator calculus.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, ZERO};

/// Default tolerance for commutation and Hermitian checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Tolerance on `|q| ≤ 1`.
pub const Q_SLACK: f64 = 1e-12;

/// A finite, square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(CMatrix);

impl ComplexMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be at least 1".into()));
        }
        if m.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    /// Builds a matrix from row-major rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: r.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Real-valued convenience constructor (row-major).
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| Complex64::new(v, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n, n))
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        Self(CMatrix::from_fn(n, n, |i, j| if i == j { entries[i] } else { ZERO }))
    }

    pub fn real_diag(entries: &[f64]) -> Self {
        let e: Vec<Complex64> = entries.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::diag(&e)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self(&self.0 * alpha)
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        &self.0 * x
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn spectral_norm(&self) -> f64 {
        linalg::spectral_norm(&self.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        linalg::frobenius(&self.0)
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|c| c.im == 0.0)
    }

    /// Frobenius distance to the adjoint.
    pub fn hermitian_residual(&self) -> f64 {
        linalg::frobenius(&(&self.0 - self.0.adjoint()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_residual() <= tol
    }

    /// Complex eigenvalues (via the Schur form).
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        match self.0.clone().schur().eigenvalues() {
            Some(ev) => ev.iter().copied().collect(),
            None => {
                let (_, t) = self.0.clone().schur().unpack();
                (0..t.nrows()).map(|i| t[(i, i)]).collect()
            }
        }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

/// A d-tuple `(T_1, …, T_d)` of n×n matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTuple {
    parts: Vec<ComplexMatrix>,
}

impl OperatorTuple {
    pub fn new(parts: Vec<ComplexMatrix>) -> Result<Self> {
        let first = parts.first().ok_or(Error::EmptyTuple)?;
        let n = first.dim();
        if let Some(bad) = parts.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.dim(),
            });
        }
        Ok(Self { parts })
    }

    pub fn single(m: ComplexMatrix) -> Self {
        Self { parts: alloc::vec![m] }
    }

    pub fn d(&self) -> usize {
        self.parts.len()
    }

    pub fn n(&self) -> usize {
        self.parts[0].dim()
    }

    pub fn parts(&self) -> &[ComplexMatrix] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> &ComplexMatrix {
        &self.parts[i]
    }

    /// The value vector `(⟨T_1 x, y⟩, …, ⟨T_d x, y⟩)`.
    pub fn values(&self, x: &CVector, y: &CVector) -> Vec<Complex64> {
        self.parts
            .iter()
            .map(|t| linalg::inner(&t.apply(x), y))
            .collect()
    }

    /// The (dn)×n vertical stack of the parts.
    pub fn stacked(&self) -> CMatrix {
        let n = self.n();
        let d = self.d();
        CMatrix::from_fn(d * n, n, |r, c| self.parts[r / n].get(r % n, c))
    }

    pub fn map(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        Self {
            parts: self.parts.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        self.map(|t| t.scale(alpha))
    }

    /// Appends the identity as an extra coordinate, giving `(T, I)`.
    pub fn with_identity(&self) -> Self {
        let mut parts = self.parts.clone();
        parts.push(ComplexMatrix::identity(self.n()));
        Self { parts }
    }

    /// `(U* T_i U)_i`.
    pub fn unitary_conjugate(&self, u: &CMatrix) -> Self {
        let uh = u.adjoint();
        self.map(|t| ComplexMatrix(&uh * t.as_matrix() * u))
    }

    /// Componentwise sum with another tuple of the same shape.
    pub fn add(&self, other: &OperatorTuple) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            parts: self
                .parts
                .iter()
                .zip(&other.parts)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn check_same_shape(&self, other: &OperatorTuple) -> Result<()> {
        if self.d() != other.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                found: other.d(),
            });
        }
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        Ok(())
    }
}

/// The constraint parameter `q` with `|q| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QParam(Complex64);

impl QParam {
    pub fn new(q: Complex64) -> Result<Self> {
        let r = q.norm();
        if !r.is_finite() || r > 1.0 + Q_SLACK {
            return Err(Error::InvalidQ(r));
        }
        Ok(Self(q))
    }

    pub fn real(q: f64) -> Result<Self> {
        Self::new(Complex64::new(q, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    pub fn modulus(&self) -> f64 {
        self.0.norm()
    }

    /// `√(1 − |q|²)`, clamped at zero.
    pub fn complement(&self) -> f64 {
        (1.0 - self.0.norm_sqr()).max(0.0).sqrt()
    }

    pub fn is_unimodular(&self) -> bool {
        (self.modulus() - 1.0).abs() <= Q_SLACK
    }

    pub fn is_real(&self) -> bool {
        self.0.im == 0.0
    }

    pub fn conj(&self) -> Self {
        Self(self.0.conj())
    }

    /// `e^{iθ} q`.
    pub fn rotated(&self, theta: f64) -> Self {
        Self(self.0 * Complex64::from_polar(1.0, theta))
    }
}

/// Seed for every random stream in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Seed(pub u64);

/// Whether sampled vectors live in `ℂ^n` or `ℝ^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldMode {
    #[default]
    Complex,
    Real,
}

pub fn adjoint_tuple(t: &OperatorTuple) -> OperatorTuple {
    t.map(ComplexMatrix::adjoint)
}

/// `(ℜ(T_i))_i` and `(ℑ(T_i))_i` with `ℜ(T) = (T+T*)/2`, `ℑ(T) = (T−T*)/2i`.
pub fn real_imag_parts(t: &OperatorTuple) -> (OperatorTuple, OperatorTuple) {
    let half = Complex64::new(0.5, 0.0);
    let inv_2i = Complex64::new(0.0, -0.5);
    let re = t.map(|m| ComplexMatrix((m.as_matrix() + m.as_matrix().adjoint()) * half));
    let im = t.map(|m| ComplexMatrix((m.as_matrix() - m.as_matrix().adjoint()) * inv_2i));
    (re, im)
}

/// `‖T‖ = sup_{‖x‖=1} (Σ‖T_i x‖²)^{1/2}`, the top singular value of the stack.
pub fn tuple_norm(t: &OperatorTuple) -> f64 {
    linalg::spectral_norm(&t.stacked())
}

/// `(Σ_i ‖T_i x‖²)^{1/2}` for one vector.
pub fn tuple_norm_at(t: &OperatorTuple, x: &CVector) -> f64 {
    t.parts()
        .iter()
        .map(|m| linalg::norm(&m.apply(x)).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Classical numerical radius `ω(M) = max_θ λ_max(ℜ(e^{iθ}M))`, evaluated on
/// a uniform grid of `angles` points (at least 16) and polished by a
/// golden-section search in the cells around the best grid angle.
pub fn classical_radius(m: &ComplexMatrix, angles: usize) -> f64 {
    let angles = angles.max(16);
    let mat = m.as_matrix();
    let f = |theta: f64| linalg::largest_eigenvalue(&linalg::rotated_real_part(mat, theta));
    let h = 2.0 * PI / angles as f64;
    let (mut best_k, mut best) = (0usize, f64::NEG_INFINITY);
    for k in 0..angles {
        let v = f(k as f64 * h);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let centre = best_k as f64 * h;
    best.max(golden_max(&f, centre - h, centre + h, 60))
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let g = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = fc.max(fd);
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        best = best.max(fc).max(fd);
    }
    best
}

/// Largest Frobenius norm of a commutator `T_iT_j − T_jT_i`.
pub fn max_commutator(t: &OperatorTuple) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..t.d() {
        for j in (i + 1)..t.d() {
            let a = t.part(i).as_matrix();
            let b = t.part(j).as_matrix();
            worst = worst.max(linalg::frobenius(&(a * b - b * a)));
        }
    }
    worst
}

pub fn commutes(t: &OperatorTuple, tol: f64) -> bool {
    max_commutator(t) <= tol
}

/// `‖ξ‖_∞`, `‖ξ‖_2` of a value vector.
pub fn sup_and_euclidean(xi: &[Complex64]) -> (f64, f64) {
    let sup = xi.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let l2 = xi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    (sup, l2)
}

#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
