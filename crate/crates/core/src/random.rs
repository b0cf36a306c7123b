//! Seeded random instances: Gaussian matrices and tuples, commuting
//! families, PSD weights and Haar unitaries.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{self, CMatrix, CVector};
use crate::model::{ComplexMatrix, FieldMode, OperatorTuple};
use crate::semi_hilbert::ASpace;

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

pub fn gaussian_cmatrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = gaussian_complex(rng);
        }
    }
    m
}

/// An n×n matrix with i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    ComplexMatrix::new(gaussian_cmatrix(rng, n, n)).expect("finite square matrix")
}

pub fn gaussian_tuple<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> OperatorTuple {
    OperatorTuple::new((0..d).map(|_| gaussian_matrix(rng, n)).collect()).expect("non-empty tuple")
}

pub fn hermitian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = gaussian_cmatrix(rng, n, n);
    ComplexMatrix::new((&g + g.adjoint()) * Complex64::new(0.5, 0.0)).expect("finite")
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// diagonal of R normalized to be positive. Columns are drawn left to right,
/// each entry real part first.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let cols: Vec<_> = (0..n)
        .map(|_| linalg::gaussian_vector(rng, n, FieldMode::Complex))
        .collect();
    let g = CMatrix::from_columns(&cols);
    let (q, r) = g.qr().unpack();
    let mut u = q;
    for k in 0..n {
        let phase = linalg::phase_of(r[(k, k)]);
        let mut col = u.column_mut(k);
        col *= phase;
    }
    u
}

/// `d` commuting matrices `p_k(B)` for a random `B` and random polynomials
/// of degree < n.
pub fn commuting_tuple<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> OperatorTuple {
    let b = gaussian_cmatrix(rng, n, n);
    let mut powers = Vec::with_capacity(n);
    powers.push(CMatrix::identity(n, n));
    for k in 1..n {
        let next = &powers[k - 1] * &b;
        powers.push(next);
    }
    let parts = (0..d)
        .map(|_| {
            let mut m = CMatrix::zeros(n, n);
            for p in &powers {
                m += p * gaussian_complex(rng);
            }
            ComplexMatrix::new(m).expect("finite")
        })
        .collect();
    OperatorTuple::new(parts).expect("non-empty tuple")
}

/// Upper-triangular commuting pair `(U, U²+cU)` style family: polynomials in
/// one random upper-triangular matrix.
pub fn triangular_commuting_tuple<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> OperatorTuple {
    let mut b = gaussian_cmatrix(rng, n, n);
    for i in 0..n {
        for j in 0..i {
            b[(i, j)] = linalg::ZERO;
        }
    }
    let mut parts = Vec::with_capacity(d);
    let mut acc = b.clone();
    for _ in 0..d {
        let shift = gaussian_complex(rng);
        parts.push(ComplexMatrix::new(&acc + CMatrix::identity(n, n) * shift).expect("finite"));
        acc = &acc * &b;
    }
    OperatorTuple::new(parts).expect("non-empty tuple")
}

/// A random positive semidefinite matrix of the given rank.
pub fn psd_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> ComplexMatrix {
    let g = gaussian_cmatrix(rng, n, rank);
    ComplexMatrix::new(&g * g.adjoint()).expect("finite")
}

/// A random `M` with `M(N(A)) ⊆ N(A)`: a Gaussian matrix in the eigenbasis
/// of `A` with the (range rows, kernel columns) block zeroed.
pub fn kernel_preserving_matrix<R: Rng + ?Sized>(rng: &mut R, s: &ASpace) -> ComplexMatrix {
    let n = s.n();
    let r = s.rank();
    let mut cols: Vec<CVector> = (0..r).map(|k| s.range_basis().column(k).into_owned()).collect();
    cols.extend(s.kernel_basis().iter().cloned());
    let w = CMatrix::from_columns(&cols);
    let mut b = gaussian_cmatrix(rng, n, n);
    for i in 0..r {
        for j in r..n {
            b[(i, j)] = linalg::ZERO;
        }
    }
    ComplexMatrix::new(&w * b * w.adjoint()).expect("finite")
}

