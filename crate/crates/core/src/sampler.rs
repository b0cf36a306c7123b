//! Pairs `(x, y)` with `‖x‖ = ‖y‖ = 1` and `⟨x, y⟩ = q`, built as
//! `y = q̄x + √(1−|q|²) z` with `z ⊥ x`.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CVector};
use crate::model::{FieldMode, OperatorTuple, QParam, Seed};

/// Tolerance used when validating caller-supplied `x` and `z`.
pub const INPUT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SqPair {
    pub x: CVector,
    /// `None` exactly when `|q| = 1`.
    pub z: Option<CVector>,
    pub q: QParam,
    pub y: CVector,
}

impl SqPair {
    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Largest of `|‖x‖−1|`, `|‖y‖−1|`, `|⟨x,y⟩−q|` and, if present, `|⟨x,z⟩|`.
    pub fn residual(&self) -> f64 {
        let mut r = (linalg::norm(&self.x) - 1.0)
            .abs()
            .max((linalg::norm(&self.y) - 1.0).abs())
            .max((linalg::inner(&self.x, &self.y) - self.q.value()).norm());
        if let Some(z) = &self.z {
            r = r.max(linalg::inner(&self.x, z).norm());
        }
        r
    }

    /// The value vector `(⟨T_i x, y⟩)_i`.
    pub fn point(&self, t: &OperatorTuple) -> Vec<Complex64> {
        t.values(&self.x, &self.y)
    }

    /// `(y, x)`, which lies in `S_{q̄}`.
    pub fn swapped(&self) -> SqPair {
        let q = self.q.conj();
        let z = if q.is_unimodular() {
            None
        } else {
            let s = q.complement();
            Some((&self.x - &self.y * q.value().conj()) / Complex64::new(s, 0.0))
        };
        SqPair {
            x: self.y.clone(),
            z,
            q,
            y: self.x.clone(),
        }
    }

    /// `(Ux, Uy)` for a unitary `U`.
    pub fn transported(&self, u: &linalg::CMatrix) -> SqPair {
        SqPair {
            x: u * &self.x,
            z: self.z.as_ref().map(|z| u * z),
            q: self.q,
            y: u * &self.y,
        }
    }
}

/// `y = q̄x + √(1−|q|²) z`, without validation.
pub(crate) fn compose_y(x: &CVector, z: Option<&CVector>, q: QParam) -> CVector {
    let mut y = x * q.value().conj();
    if let Some(z) = z {
        y += z * Complex64::new(q.complement(), 0.0);
    }
    y
}

pub fn pair_from_xz(x: &CVector, z: Option<&CVector>, q: QParam) -> Result<SqPair> {
    let rx = (linalg::norm(x) - 1.0).abs();
    if rx > INPUT_TOL {
        return Err(Error::ConstraintViolation {
            constraint: "‖x‖ = 1",
            residual: rx,
        });
    }
    let z = match z {
        Some(z) if !q.is_unimodular() => {
            if z.len() != x.len() {
                return Err(Error::DimensionMismatch {
                    expected: x.len(),
                    found: z.len(),
                });
            }
            let rz = (linalg::norm(z) - 1.0).abs();
            if rz > INPUT_TOL {
                return Err(Error::ConstraintViolation {
                    constraint: "‖z‖ = 1",
                    residual: rz,
                });
            }
            let ro = linalg::inner(x, z).norm();
            if ro > INPUT_TOL {
                return Err(Error::ConstraintViolation {
                    constraint: "⟨x, z⟩ = 0",
                    residual: ro,
                });
            }
            Some(z.clone())
        }
        Some(_) => None,
        None if q.is_unimodular() => None,
        None => {
            return Err(Error::ConstraintViolation {
                constraint: "z required when |q| < 1",
                residual: 1.0 - q.modulus(),
            })
        }
    };
    let y = compose_y(x, z.as_ref(), q);
    Ok(SqPair {
        x: x.clone(),
        z,
        q,
        y,
    })
}

/// The random stream for sample `index` under `seed`.
pub fn pair_rng(seed: Seed, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    rng.set_stream(index);
    rng
}

pub(crate) fn check_feasible(n: usize, q: QParam, mode: FieldMode) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    if n == 1 && !q.is_unimodular() {
        return Err(Error::Infeasible("S_q is empty for n = 1 and |q| < 1"));
    }
    if mode == FieldMode::Real && !q.is_real() {
        return Err(Error::Infeasible("real mode needs a real q"));
    }
    Ok(())
}

/// Unit `x`, and (when `n ≥ 2`) a unit vector `z_raw ⊥ x`, drawn in that
/// order from `rng`.
pub(crate) fn draw_frame(rng: &mut ChaCha8Rng, n: usize, mode: FieldMode) -> (CVector, Option<CVector>) {
    let x = linalg::unit_vector(rng, n, mode);
    if n < 2 {
        return (x, None);
    }
    loop {
        let g = linalg::gaussian_vector(rng, n, mode);
        if let Some(z) = linalg::normalized(&linalg::project_out(&g, &x)) {
            return (x, Some(z));
        }
    }
}

/// The `index`-th pair of the stream for `(n, q, seed, mode)`.
///
/// `z` is `e^{−i arg q}` times a rotation-free draw, so the stream for
/// `e^{iθ}q` differs from the one for `q` only by `z ↦ e^{−iθ}z`.
pub fn sample_pair(n: usize, q: QParam, seed: Seed, index: u64, mode: FieldMode) -> SqPair {
    let mut rng = pair_rng(seed, index);
    let (x, z_raw) = draw_frame(&mut rng, n, mode);
    let z = if q.is_unimodular() {
        None
    } else {
        let phase = linalg::phase_of(q.value()).conj();
        z_raw.map(|z| z * phase)
    };
    let y = compose_y(&x, z.as_ref(), q);
    SqPair { x, z, q, y }
}

pub fn sample_sq(n: usize, q: QParam, count: usize, seed: Seed, mode: FieldMode) -> Result<Vec<SqPair>> {
    check_feasible(n, q, mode)?;
    Ok((0..count as u64)
        .map(|i| sample_pair(n, q, seed, i, mode))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;
    use crate::model::c;
    use alloc::vec;

    fn e(n: usize, k: usize) -> CVector {
        let mut v = CVector::zeros(n);
        v[k] = ONE;
        v
    }

    #[test]
    fn pair_from_basis_vectors() {
        let p = pair_from_xz(&e(2, 0), Some(&e(2, 1)), QParam::real(0.0).unwrap()).unwrap();
        assert_eq!(p.y, e(2, 1));

        let p = pair_from_xz(&e(2, 0), Some(&e(2, 1)), QParam::real(0.5).unwrap()).unwrap();
        let s = 0.75f64.sqrt();
        assert!((p.y[0] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((p.y[1] - c(s, 0.0)).norm() < 1e-15);
        assert!((linalg::inner(&p.x, &p.y) - c(0.5, 0.0)).norm() < 1e-15);

        let q = QParam::new(c(0.0, 0.5)).unwrap();
        let p = pair_from_xz(&e(2, 0), Some(&e(2, 1)), q).unwrap();
        assert!((p.y[0] - c(0.0, -0.5)).norm() < 1e-15);
        assert!((p.y[1] - c(s, 0.0)).norm() < 1e-15);
        // conj(-i/2) = i/2
        assert!((linalg::inner(&p.x, &p.y) - c(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn pair_from_xz_names_violation() {
        let q = QParam::real(0.5).unwrap();
        let bad = CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        match pair_from_xz(&e(2, 0), Some(&bad), q) {
            Err(Error::ConstraintViolation { constraint, residual }) => {
                assert_eq!(constraint, "‖z‖ = 1");
                assert!(residual > 0.4);
            }
            other => panic!("unexpected {other:?}"),
        }
        let skew = CVector::from_vec(vec![c(0.6, 0.0), c(0.8, 0.0)]);
        assert!(matches!(
            pair_from_xz(&e(2, 0), Some(&skew), q),
            Err(Error::ConstraintViolation { constraint: "⟨x, z⟩ = 0", .. })
        ));
        assert!(matches!(
            pair_from_xz(&e(2, 0), None, q),
            Err(Error::ConstraintViolation { .. })
        ));
    }

    #[test]
    fn unimodular_q_gives_y_equal_x() {
        for p in sample_sq(2, QParam::real(1.0).unwrap(), 20, Seed(5), FieldMode::Complex).unwrap() {
            assert!(p.z.is_none());
            assert_eq!(p.y, p.x);
        }
    }

    #[test]
    fn residuals_small() {
        let pairs = sample_sq(2, QParam::real(0.5).unwrap(), 1000, Seed(7), FieldMode::Complex).unwrap();
        assert_eq!(pairs.len(), 1000);
        assert!(pairs.iter().all(|p| p.residual() < 1e-12));
    }

    #[test]
    fn mean_of_x_near_zero() {
        let pairs = sample_sq(3, QParam::real(0.0).unwrap(), 10_000, Seed(1), FieldMode::Complex).unwrap();
        let mut mean = CVector::zeros(3);
        for p in &pairs {
            mean += &p.x;
        }
        mean /= c(pairs.len() as f64, 0.0);
        assert!(linalg::norm(&mean) < 0.05);
    }

    #[test]
    fn infeasible_and_real_mode() {
        assert!(matches!(
            sample_sq(1, QParam::real(0.5).unwrap(), 1, Seed(0), FieldMode::Complex),
            Err(Error::Infeasible(_))
        ));
        assert!(sample_sq(1, QParam::real(1.0).unwrap(), 3, Seed(0), FieldMode::Complex).is_ok());
        assert!(matches!(
            sample_sq(3, QParam::new(c(0.0, 0.5)).unwrap(), 1, Seed(0), FieldMode::Real),
            Err(Error::Infeasible(_))
        ));
        for p in sample_sq(3, QParam::real(-0.4).unwrap(), 50, Seed(2), FieldMode::Real).unwrap() {
            assert!(p.x.iter().chain(p.y.iter()).all(|v| v.im == 0.0));
            assert!(p.residual() < 1e-12);
        }
    }

    #[test]
    fn determinism_and_rotation_coupling() {
        let q = QParam::new(c(0.3, 0.4)).unwrap();
        let a = sample_sq(4, q, 30, Seed(11), FieldMode::Complex).unwrap();
        assert_eq!(a, sample_sq(4, q, 30, Seed(11), FieldMode::Complex).unwrap());
        let theta = 1.234;
        let b = sample_sq(4, q.rotated(theta), 30, Seed(11), FieldMode::Complex).unwrap();
        let rot = Complex64::from_polar(1.0, -theta);
        for (pa, pb) in a.iter().zip(&b) {
            assert_eq!(pa.x, pb.x);
            let za = pa.z.as_ref().unwrap() * rot;
            assert!((za - pb.z.as_ref().unwrap()).norm() < 1e-14);
        }
    }

    #[test]
    fn swap_lands_in_conjugate_set() {
        let q = QParam::new(c(-0.2, 0.6)).unwrap();
        for p in sample_sq(3, q, 100, Seed(3), FieldMode::Complex).unwrap() {
            let s = p.swapped();
            assert_eq!(s.q.value(), q.value().conj());
            assert!(s.residual() < 1e-12);
            assert!((compose_y(&s.x, s.z.as_ref(), s.q) - &s.y).norm() < 1e-12);
        }
    }
}
