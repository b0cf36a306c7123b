//! Point clouds of (joint) q-numerical ranges, Tsing disks and the norm
//! sandwich.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CVector};
use crate::model::{tuple_norm, ComplexMatrix, FieldMode, OperatorTuple, QParam, Seed};
use crate::sampler::{self, SqPair};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudMeta {
    pub n: usize,
    pub q: Complex64,
    pub seed: u64,
    pub sample_count: usize,
    pub generator: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub d: usize,
    pub points: Vec<Vec<Complex64>>,
    pub meta: CloudMeta,
}

impl PointCloud {
    pub fn new(d: usize, points: Vec<Vec<Complex64>>, meta: CloudMeta) -> Result<Self> {
        for p in &points {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.len(),
                });
            }
            if p.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        if meta.sample_count != points.len() {
            return Err(Error::InvalidArgument("meta.sample_count must equal the number of points".into()));
        }
        Ok(Self { d, points, meta })
    }

    /// A cloud with placeholder metadata, for ad-hoc point sets.
    pub fn from_points(d: usize, points: Vec<Vec<Complex64>>) -> Result<Self> {
        let meta = CloudMeta {
            n: 0,
            q: Complex64::new(0.0, 0.0),
            seed: 0,
            sample_count: points.len(),
            generator: "points".to_string(),
        };
        Self::new(d, points, meta)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Every point multiplied by `mu`.
    pub fn scaled(&self, mu: Complex64) -> Self {
        let mut out = self.clone();
        for p in &mut out.points {
            for c in p.iter_mut() {
                *c *= mu;
            }
        }
        out
    }

    /// Points as vectors in `ℝ^{2d}` (re, im interleaved).
    pub fn real_coords(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| to_real(p)).collect()
    }

    /// Largest `‖p‖₂`.
    pub fn max_norm(&self) -> f64 {
        self.points.iter().map(|p| point_norm(p)).fold(0.0, f64::max)
    }
}

pub(crate) fn to_real(p: &[Complex64]) -> Vec<f64> {
    p.iter().flat_map(|c| [c.re, c.im]).collect()
}

pub fn point_norm(p: &[Complex64]) -> f64 {
    p.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        (z - self.center).norm() <= self.radius + tol
    }
}

/// Value vectors of `t` over the given pairs.
pub fn cloud_from_pairs(t: &OperatorTuple, pairs: &[SqPair], meta: CloudMeta) -> Result<PointCloud> {
    if let Some(p) = pairs.iter().find(|p| p.n() != t.n()) {
        return Err(Error::DimensionMismatch {
            expected: t.n(),
            found: p.n(),
        });
    }
    let points = pairs.iter().map(|p| p.point(t)).collect();
    PointCloud::new(t.d(), points, meta)
}

pub fn cloud_joint(t: &OperatorTuple, q: QParam, count: usize, seed: Seed, mode: FieldMode) -> Result<PointCloud> {
    let pairs = sampler::sample_sq(t.n(), q, count, seed, mode)?;
    let meta = CloudMeta {
        n: t.n(),
        q: q.value(),
        seed: seed.0,
        sample_count: count,
        generator: "cloud_joint".to_string(),
    };
    cloud_from_pairs(t, &pairs, meta)
}

pub fn cloud_single(m: &ComplexMatrix, q: QParam, count: usize, seed: Seed, mode: FieldMode) -> Result<PointCloud> {
    let mut cloud = cloud_joint(&OperatorTuple::single(m.clone()), q, count, seed, mode)?;
    cloud.meta.generator = "cloud_single".to_string();
    Ok(cloud)
}

/// The Tsing disk for a fixed unit `x`: all `⟨Mx, y⟩` with `(x, y) ∈ S_q`.
pub fn tsing_disk(m: &ComplexMatrix, q: QParam, x: &CVector) -> Disk {
    let mx = m.apply(x);
    let nu = linalg::inner(&mx, x);
    // `‖Mx − νx‖` equals `√(‖Mx‖² − |ν|²)` without the cancellation.
    let spread = linalg::norm(&(&mx - x * nu));
    Disk {
        center: q.value() * nu,
        radius: q.complement() * spread,
    }
}

/// One Tsing disk per sampled unit `x` (stream `i` of `seed` gives the `i`-th `x`).
pub fn tsing_disks(m: &ComplexMatrix, q: QParam, x_count: usize, seed: Seed) -> Vec<Disk> {
    (0..x_count as u64)
        .map(|i| {
            let mut rng = sampler::pair_rng(seed, i);
            let x = linalg::unit_vector(&mut rng, m.dim(), FieldMode::Complex);
            tsing_disk(m, q, &x)
        })
        .collect()
}

/// Uniform samples from a union of disks, `per_disk` points each.
pub fn disk_union_cloud(disks: &[Disk], per_disk: usize, seed: Seed) -> Result<PointCloud> {
    let mut points = Vec::with_capacity(disks.len() * per_disk);
    for (i, disk) in disks.iter().enumerate() {
        let mut rng = sampler::pair_rng(seed, i as u64);
        for _ in 0..per_disk {
            let r = disk.radius * rng.random::<f64>().sqrt();
            let phi = core::f64::consts::TAU * rng.random::<f64>();
            points.push(alloc::vec![disk.center + Complex64::from_polar(r, phi)]);
        }
    }
    let meta = CloudMeta {
        n: 0,
        q: Complex64::new(0.0, 0.0),
        seed: seed.0,
        sample_count: points.len(),
        generator: "disk_union".to_string(),
    };
    PointCloud::new(1, points, meta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichBounds {
    /// `q/(2√d(2−q²))·‖T‖`, the lower bound as originally stated.
    pub paper_lower: f64,
    /// `q/(2√d)·‖T‖`.
    pub corrected_lower: f64,
    /// `‖T‖`.
    pub upper: f64,
}

pub fn sandwich_bounds(t: &OperatorTuple, q: f64) -> Result<SandwichBounds> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidQ(q));
    }
    let norm = tuple_norm(t);
    let sd = (t.d() as f64).sqrt();
    Ok(SandwichBounds {
        paper_lower: q / (2.0 * sd * (2.0 - q * q)) * norm,
        corrected_lower: q / (2.0 * sd) * norm,
        upper: norm,
    })
}

/// `(αT_i + βI)_i`.
pub fn apply_affine(t: &OperatorTuple, alpha: Complex64, beta: Complex64) -> OperatorTuple {
    let shift = ComplexMatrix::identity(t.n()).scale(beta);
    t.map(|m| &m.scale(alpha) + &shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};
    use crate::model::c;
    use alloc::vec;

    fn q(v: f64) -> QParam {
        QParam::real(v).unwrap()
    }

    #[test]
    fn identity_cloud_is_q() {
        let qs = [
            QParam::real(0.0).unwrap(),
            q(0.5),
            QParam::new(c(0.0, 1.0 / 2f64.sqrt())).unwrap(),
            q(1.0),
        ];
        for qq in qs {
            let cl = cloud_single(&ComplexMatrix::identity(3), qq, 200, Seed(4), FieldMode::Complex).unwrap();
            assert!(cl.points.iter().all(|p| (p[0] - qq.value()).norm() < 1e-12));
        }
        let zero = cloud_single(&ComplexMatrix::zeros(2), q(0.3), 50, Seed(1), FieldMode::Complex).unwrap();
        assert!(zero.points.iter().all(|p| p[0] == ZERO));
    }

    #[test]
    fn diag_cloud_bounded_by_disk_formula() {
        let m = ComplexMatrix::real_diag(&[1.0, 0.0]);
        let cl = cloud_single(&m, q(0.5), 100_000, Seed(9), FieldMode::Complex).unwrap();
        assert!(cl.max_norm() <= 0.75 + 1e-12);
        let cl0 = cloud_single(&m, q(0.0), 10_000, Seed(9), FieldMode::Complex).unwrap();
        assert!(cl0.max_norm() <= 0.5 + 1e-12);
    }

    #[test]
    fn tsing_disk_examples() {
        for d in tsing_disks(&ComplexMatrix::identity(3), q(0.4), 20, Seed(2)) {
            assert!((d.center - c(0.4, 0.0)).norm() < 1e-12);
            assert!(d.radius < 1e-7);
        }
        let m = ComplexMatrix::real_diag(&[1.0, 0.0]);
        let qq = 0.5;
        let theta: f64 = 0.7;
        let x = CVector::from_vec(vec![c(theta.cos(), 0.0), c(theta.sin(), 0.0)]);
        let d = tsing_disk(&m, q(qq), &x);
        assert!((d.center - c(qq * theta.cos().powi(2), 0.0)).norm() < 1e-14);
        let r = (1.0 - qq * qq).sqrt() * theta.cos() * theta.sin().abs();
        assert!((d.radius - r).abs() < 1e-14);
        for d in tsing_disks(&ComplexMatrix::real_diag(&[2.0, -1.0, 0.5]), q(1.0), 10, Seed(3)) {
            assert_eq!(d.radius, 0.0);
        }
    }

    #[test]
    fn tsing_family_max_modulus() {
        // max over θ of q cos²θ + √(1−q²) cosθ sinθ, sampled densely.
        let m = ComplexMatrix::real_diag(&[1.0, 0.0]);
        let qq = 0.5;
        let mut best: f64 = 0.0;
        for k in 0..20_000 {
            let t = core::f64::consts::FRAC_PI_2 * k as f64 / 20_000.0;
            let x = CVector::from_vec(vec![c(t.cos(), 0.0), c(t.sin(), 0.0)]);
            let d = tsing_disk(&m, q(qq), &x);
            best = best.max(d.center.norm() + d.radius);
        }
        assert!((best - 0.75).abs() < 1e-6);
    }

    #[test]
    fn sandwich_examples() {
        let b = sandwich_bounds(&OperatorTuple::single(ComplexMatrix::identity(2)), 0.5).unwrap();
        assert!((b.paper_lower - 1.0 / 7.0).abs() < 1e-15);
        assert!((b.corrected_lower - 0.25).abs() < 1e-15);
        assert!((b.upper - 1.0).abs() < 1e-14);
        let z = sandwich_bounds(&OperatorTuple::single(ComplexMatrix::zeros(2)), 0.5).unwrap();
        assert_eq!((z.paper_lower, z.corrected_lower, z.upper), (0.0, 0.0, 0.0));
        let two = ComplexMatrix::identity(2).scale(c(2.0, 0.0));
        let zero = ComplexMatrix::zeros(2);
        let t = OperatorTuple::new(vec![two, zero.clone(), zero.clone(), zero]).unwrap();
        let b = sandwich_bounds(&t, 1.0 - 1e-12).unwrap();
        assert!((b.corrected_lower - 0.5).abs() < 1e-9);
        assert!(b.paper_lower <= b.corrected_lower && b.corrected_lower <= b.upper);
        assert!(sandwich_bounds(&t, 1.0).is_err());
        assert!(sandwich_bounds(&t, 0.0).is_err());
    }

    #[test]
    fn affine_examples() {
        let t = OperatorTuple::single(ComplexMatrix::real_diag(&[1.0, 0.0]));
        assert_eq!(apply_affine(&t, ONE, ZERO), t);
        let ones = apply_affine(&t, ZERO, ONE);
        assert_eq!(ones.part(0), &ComplexMatrix::identity(2));
        let qq = q(0.5);
        let a = c(2.0, 0.0);
        let b = c(0.0, 1.0);
        let shifted = apply_affine(&t, a, b);
        for p in sampler::sample_sq(2, qq, 100, Seed(8), FieldMode::Complex).unwrap() {
            let lhs = p.point(&shifted)[0];
            let rhs = a * p.point(&t)[0] + b * qq.value();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn cloud_rejects_mismatched_pairs() {
        let t = OperatorTuple::single(ComplexMatrix::identity(3));
        let pairs = sampler::sample_sq(2, q(0.5), 3, Seed(0), FieldMode::Complex).unwrap();
        let meta = CloudMeta {
            n: 3,
            q: c(0.5, 0.0),
            seed: 0,
            sample_count: 3,
            generator: "test".to_string(),
        };
        assert!(matches!(cloud_from_pairs(&t, &pairs, meta), Err(Error::DimensionMismatch { .. })));
    }
}
