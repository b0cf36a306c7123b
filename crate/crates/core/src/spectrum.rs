//! Joint point spectrum of commuting tuples and the inclusion `qσ_p(T) ⊆ JtW_q(T)`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::model::{max_commutator, OperatorTuple, QParam, Seed};
use crate::range::point_norm;
use crate::report::{Report, Witness};
use crate::sampler::pair_from_xz;

/// Commutation threshold required before the spectrum is computed.
pub const COMMUTE_TOL: f64 = 1e-8;

/// Largest dimension accepted by [`joint_point_spectrum`].
pub const MAX_DIM: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPoint {
    pub xi: Vec<Complex64>,
    /// Unit common approximate eigenvector.
    pub witness: CVector,
    /// `max_i ‖(T_i − ξ_i)w‖`.
    pub residual: f64,
}

/// `1e-8·(1 + max_i ‖T_i‖)`.
pub fn default_tol(t: &OperatorTuple) -> f64 {
    let scale = t.parts().iter().map(|m| m.spectral_norm()).fold(0.0, f64::max);
    1e-8 * (1.0 + scale)
}

fn shifted_stack(t: &OperatorTuple, xi: &[Complex64]) -> CMatrix {
    let n = t.n();
    let k = xi.len();
    CMatrix::from_fn(k * n, n, |r, c| {
        let (i, row) = (r / n, r % n);
        let v = t.part(i).get(row, c);
        if row == c {
            v - xi[i]
        } else {
            v
        }
    })
}

/// Smallest singular value of the stack and its right singular vector.
fn smallest_singular(m: &CMatrix) -> (f64, CVector) {
    let svd = m.clone().svd(false, true);
    let (k, s) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let v_t = svd.v_t.expect("requested V^H");
    (s, v_t.row(k).adjoint())
}

fn residual_of(t: &OperatorTuple, xi: &[Complex64], w: &CVector) -> f64 {
    t.parts()
        .iter()
        .zip(xi)
        .map(|(m, &x)| linalg::norm(&(m.apply(w) - w * x)))
        .fold(0.0, f64::max)
}

/// Candidates are drawn from `σ(T_1) × … × σ(T_d)`; a prefix is extended
/// only while the stacked smallest singular value stays below `tol`.
pub fn joint_point_spectrum(t: &OperatorTuple, tol: f64) -> Result<Vec<SpectralPoint>> {
    let residual = max_commutator(t);
    if residual > COMMUTE_TOL {
        return Err(Error::NonCommuting { residual });
    }
    if t.n() > MAX_DIM {
        return Err(Error::InvalidArgument(format!("dimension {} exceeds {MAX_DIM}", t.n())));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    let spectra: Vec<Vec<Complex64>> = t.parts().iter().map(|m| m.eigenvalues()).collect();
    let mut prefixes: Vec<Vec<Complex64>> = alloc::vec![Vec::new()];
    for (i, spec) in spectra.iter().enumerate() {
        let mut next = Vec::new();
        for p in &prefixes {
            for &lam in spec {
                let mut cand = p.clone();
                cand.push(lam);
                let (s, _) = smallest_singular(&shifted_stack(&slice_tuple(t, i + 1), &cand));
                if s < tol {
                    next.push(cand);
                }
            }
        }
        prefixes = next;
    }

    let scale = t.parts().iter().map(|m| m.spectral_norm()).fold(0.0, f64::max);
    let merge = 1e-6 * (1.0 + scale);
    let mut out: Vec<SpectralPoint> = Vec::new();
    for cand in prefixes {
        let (_, w) = smallest_singular(&shifted_stack(t, &cand));
        let xi: Vec<Complex64> = t.parts().iter().map(|m| w.dotc(&m.apply(&w))).collect();
        let residual = residual_of(t, &xi, &w);
        if out.iter().any(|p| point_norm(&diff(&p.xi, &xi)) < merge) {
            continue;
        }
        out.push(SpectralPoint { xi, witness: w, residual });
    }
    Ok(out)
}

fn slice_tuple(t: &OperatorTuple, k: usize) -> OperatorTuple {
    OperatorTuple::new(t.parts()[..k].to_vec()).expect("k ≥ 1")
}

fn diff(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// For each `ξ ∈ σ_p(T)` with witness `x`, builds `y = q̄x + √(1−|q|²)z` and
/// measures `‖(⟨T_i x, y⟩)_i − qξ‖₂`. The margin is `tol − max residual`.
pub fn spectral_inclusion_check(t: &OperatorTuple, q: QParam, tol: f64) -> Result<Report> {
    let points = joint_point_spectrum(t, default_tol(t))?;
    if t.n() == 1 && !q.is_unimodular() {
        return Err(Error::Infeasible("S_q is empty for n = 1 and |q| < 1"));
    }
    let mut worst = 0.0;
    let mut witnesses = Vec::new();
    for p in &points {
        let z = if q.is_unimodular() {
            None
        } else {
            linalg::any_orthogonal_unit(&p.witness)
        };
        let pair = pair_from_xz(&p.witness, z.as_ref(), q)?;
        let target: Vec<Complex64> = p.xi.iter().map(|x| q.value() * x).collect();
        let r = point_norm(&diff(&pair.point(t), &target));
        if r >= worst || witnesses.is_empty() {
            worst = r;
            witnesses = alloc::vec![Witness::values("xi", &p.xi), Witness::vector("x", &pair.x), Witness::vector("y", &pair.y)];
        }
    }
    Ok(Report::at_most(
        "spectral_inclusion",
        worst,
        tol,
        0.0,
        Seed(0),
        points.len(),
        format!("qσ_p(T) ⊆ JtW_q(T): {} joint eigenvalues, max residual {worst:e}", points.len()),
        witnesses,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{c, ComplexMatrix};
    use crate::random;
    use alloc::vec;
    use rand::SeedableRng;

    fn sorted(mut v: Vec<Vec<Complex64>>) -> Vec<Vec<Complex64>> {
        v.sort_by(|a, b| a[0].re.partial_cmp(&b[0].re).unwrap());
        v
    }

    #[test]
    fn diagonal_pair() {
        let t = OperatorTuple::new(vec![
            ComplexMatrix::diag(&[c(1.0, 0.0), c(2.0, 1.0)]),
            ComplexMatrix::diag(&[c(3.0, 0.0), c(-1.0, 0.0)]),
        ])
        .unwrap();
        let pts = joint_point_spectrum(&t, default_tol(&t)).unwrap();
        let got = sorted(pts.iter().map(|p| p.xi.clone()).collect());
        let want = [[c(1.0, 0.0), c(3.0, 0.0)], [c(2.0, 1.0), c(-1.0, 0.0)]];
        assert_eq!(got.len(), 2);
        for (g, w) in got.iter().zip(&want) {
            assert!(point_norm(&diff(g, w)) < 1e-10);
        }
    }

    #[test]
    fn non_commuting_rejected() {
        let t = OperatorTuple::new(vec![
            ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap(),
            ComplexMatrix::real_diag(&[1.0, 0.0]),
        ])
        .unwrap();
        assert!(matches!(joint_point_spectrum(&t, 1e-8), Err(Error::NonCommuting { .. })));
    }

    #[test]
    fn matrix_and_square() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let m = random::gaussian_matrix(&mut rng, 3);
        let t = OperatorTuple::new(vec![m.clone(), &m * &m]).unwrap();
        let pts = joint_point_spectrum(&t, default_tol(&t)).unwrap();
        let ev = m.eigenvalues();
        assert_eq!(pts.len(), 3);
        for lam in ev {
            assert!(pts.iter().any(|p| (p.xi[0] - lam).norm() < 1e-9 && (p.xi[1] - lam * lam).norm() < 1e-8));
        }
        for p in &pts {
            assert!(p.residual <= 3.0 * default_tol(&t));
        }
    }

    #[test]
    fn inclusion_examples() {
        let t = OperatorTuple::new(vec![
            ComplexMatrix::diag(&[c(1.0, 0.0), c(2.0, 1.0)]),
            ComplexMatrix::diag(&[c(3.0, 0.0), c(-1.0, 0.0)]),
        ])
        .unwrap();
        for q in [0.5, 0.0, 1.0] {
            let r = spectral_inclusion_check(&t, QParam::real(q).unwrap(), 1e-10).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }
}
