//! Thin helpers over `nalgebra` for the complex vector calculus used everywhere
//! else. Inner products are linear in the first slot and conjugate-linear in
//! the second: `inner(x, y) = Σ x_i conj(y_i)`.

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::model::FieldMode;

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `⟨x, y⟩ = Σ x_i conj(y_i)`.
#[inline]
pub fn inner(x: &CVector, y: &CVector) -> Complex64 {
    y.dotc(x)
}

#[inline]
pub fn norm(x: &CVector) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Returns `None` for (numerically) zero vectors.
pub fn normalized(x: &CVector) -> Option<CVector> {
    let n = norm(x);
    if n > 1e-300 && n.is_finite() {
        Some(x / Complex64::new(n, 0.0))
    } else {
        None
    }
}

/// Removes the component of `v` along the unit vector `u`.
pub fn project_out(v: &CVector, u: &CVector) -> CVector {
    v - u * inner(v, u)
}

/// `Re(e^{iθ}M)`, i.e. `(e^{iθ}M + e^{-iθ}M*)/2`.
pub fn rotated_real_part(m: &CMatrix, theta: f64) -> CMatrix {
    let phase = Complex64::from_polar(1.0, theta);
    let rotated = m * phase;
    (&rotated + rotated.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn hermitian_eigenvalues(h: &CMatrix) -> DVector<f64> {
    h.clone().symmetric_eigenvalues()
}

/// Eigenpairs of a Hermitian matrix, eigenvalues descending. Each
/// eigenvector is scaled so its largest-modulus entry (first on ties) is real
/// and positive.
pub fn hermitian_eigen_sorted(h: &CMatrix) -> (alloc::vec::Vec<f64>, CMatrix) {
    let eig = h.clone().symmetric_eigen();
    let n = h.nrows();
    let mut order: alloc::vec::Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (dst, &k) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(k);
        let pivot = (0..n).fold(0, |best, i| if col[i].norm() > col[best].norm() * (1.0 + 1e-12) { i } else { best });
        let phase = phase_of(col[pivot]).conj();
        for i in 0..n {
            vecs[(i, dst)] = col[i] * phase;
        }
    }
    (values, vecs)
}

pub fn largest_eigenvalue(h: &CMatrix) -> f64 {
    hermitian_eigenvalues(h)
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Largest singular value (spectral norm); works for rectangular input.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// A vector of independent standard Gaussians (complex: real and imaginary
/// parts drawn in that order per entry; real mode: imaginary parts are zero
/// and not drawn).
pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize, mode: FieldMode) -> CVector {
    CVector::from_iterator(
        n,
        (0..n).map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = match mode {
                FieldMode::Complex => StandardNormal.sample(rng),
                FieldMode::Real => 0.0,
            };
            Complex64::new(re, im)
        }),
    )
}

/// Uniform unit vector (normalized Gaussian; redraws on an exact zero draw).
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize, mode: FieldMode) -> CVector {
    loop {
        if let Some(v) = normalized(&gaussian_vector(rng, n, mode)) {
            return v;
        }
    }
}

/// A unit vector orthogonal to the unit vector `x`, chosen deterministically
/// from the standard basis (largest residual wins).
pub fn any_orthogonal_unit(x: &CVector) -> Option<CVector> {
    let n = x.len();
    let mut best: Option<(f64, CVector)> = None;
    for k in 0..n {
        let mut e = CVector::zeros(n);
        e[k] = ONE;
        let r = project_out(&e, x);
        let rn = norm(&r);
        if best.as_ref().is_none_or(|(b, _)| rn > *b) {
            best = Some((rn, r));
        }
    }
    best.and_then(|(_, r)| normalized(&r))
}

/// Phase factor `c/|c|`, or 1 for `c = 0`.
pub fn phase_of(c: Complex64) -> Complex64 {
    let r = c.norm();
    if r > 0.0 {
        c / r
    } else {
        ONE
    }
}
