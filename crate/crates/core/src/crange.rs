//! The joint C-numerical range and the 2×2 block-operator bounds.

use alloc::string::ToString;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, ZERO};
use crate::model::{classical_radius, ComplexMatrix, OperatorTuple, QParam, Seed};
use crate::optimize::{radius_joint, radius_joint_with_starts, RadiusEstimate, RadiusOptions};
use crate::random::haar_unitary;
use crate::range::{CloudMeta, PointCloud};
use crate::sampler::{pair_rng, SqPair};

/// Grid size used for `ω(·)` inside the block bounds.
pub const OMEGA_ANGLES: usize = 2048;

/// `[[q, √(1−|q|²)], [0, 0]] ⊕ 0_{n−2}`.
pub fn q_to_c_matrix(q: QParam, n: usize) -> Result<ComplexMatrix> {
    if n < 2 {
        return Err(Error::InvalidArgument("C needs n ≥ 2".into()));
    }
    let mut m = CMatrix::zeros(n, n);
    m[(0, 0)] = q.value();
    m[(0, 1)] = Complex64::new(q.complement(), 0.0);
    ComplexMatrix::new(m)
}

/// For rank-one `C`, the pair `(μ, q)` with `q ∈ [0, 1]` and
/// `JtW_C(T) = μ·JtW_q(T)`: `μ = ‖C‖_F·tr(C)/|tr(C)|`, `q = |tr(C)|/‖C‖_F`.
pub fn rank_one_parameters(c: &ComplexMatrix) -> Result<(Complex64, QParam)> {
    let sv = c.as_matrix().clone().singular_values();
    let mut s: Vec<f64> = sv.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    let top = s.first().copied().unwrap_or(0.0);
    let second = s.get(1).copied().unwrap_or(0.0);
    if !(top > 0.0) || second > 1e-10 * top {
        return Err(Error::InvalidArgument("C is not rank one".into()));
    }
    let fro = c.frobenius_norm();
    let tr = c.trace();
    let phase = if tr.norm() > 0.0 { tr / tr.norm() } else { Complex64::new(1.0, 0.0) };
    let q = QParam::real((tr.norm() / fro).min(1.0))?;
    Ok((phase * fro, q))
}

/// Points `(tr(C U* T_i U))_i` over Haar unitaries; sample `k` uses stream `k`
/// of `seed`, the same stream [`crate::sampler::sample_pair`] uses, so the
/// first two columns of `U` are that sampler's `x` and unrotated `z`.
pub fn c_range_cloud(t: &OperatorTuple, c: &ComplexMatrix, count: usize, seed: Seed) -> Result<PointCloud> {
    let n = t.n();
    if c.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.dim(),
        });
    }
    let cm = c.as_matrix();
    let mut points = Vec::with_capacity(count);
    for k in 0..count as u64 {
        let mut rng = pair_rng(seed, k);
        let u = haar_unitary(&mut rng, n);
        let uh = u.adjoint();
        let p: Vec<Complex64> = t
            .parts()
            .iter()
            .map(|m| {
                let rot = &uh * m.as_matrix() * &u;
                let mut acc = ZERO;
                for i in 0..n {
                    for j in 0..n {
                        acc += cm[(i, j)] * rot[(j, i)];
                    }
                }
                acc
            })
            .collect();
        points.push(p);
    }
    let meta = CloudMeta {
        n,
        q: c.trace(),
        seed: seed.0,
        sample_count: count,
        generator: "c_range_cloud".to_string(),
    };
    PointCloud::new(t.d(), points, meta)
}

fn check_block_shapes(blocks: [&OperatorTuple; 4]) -> Result<()> {
    for b in &blocks[1..] {
        blocks[0].check_same_shape(b)?;
    }
    Ok(())
}

/// `T_i = [[P_i, Q_i], [R_i, S_i]]`.
pub fn assemble_blocks(p: &OperatorTuple, q: &OperatorTuple, r: &OperatorTuple, s: &OperatorTuple) -> Result<OperatorTuple> {
    check_block_shapes([p, q, r, s])?;
    let n = p.n();
    let parts = (0..p.d())
        .map(|i| {
            let blocks = [p.part(i), q.part(i), r.part(i), s.part(i)];
            let m = CMatrix::from_fn(2 * n, 2 * n, |a, b| {
                let k = 2 * (a / n) + b / n;
                blocks[k].get(a % n, b % n)
            });
            ComplexMatrix::new(m)
        })
        .collect::<Result<Vec<_>>>()?;
    OperatorTuple::new(parts)
}

/// Embeds a pair for an n-dimensional block into the first (`lower = false`)
/// or second (`lower = true`) half of `ℂ^{2n}`.
pub fn embed_pair(pair: &SqPair, lower: bool) -> SqPair {
    let n = pair.n();
    let off = if lower { n } else { 0 };
    let lift = |v: &crate::linalg::CVector| {
        let mut out = crate::linalg::CVector::zeros(2 * n);
        out.rows_mut(off, n).copy_from(v);
        out
    };
    SqPair {
        x: lift(&pair.x),
        z: pair.z.as_ref().map(lift),
        q: pair.q,
        y: lift(&pair.y),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockBounds {
    /// `max{Jtω_q(P), Jtω_q(S)}`.
    pub lower: f64,
    pub lower_sq: f64,
    /// Square root of `upper_sq`.
    pub upper: f64,
    pub upper_sq: f64,
    pub p_estimate: RadiusEstimate,
    pub s_estimate: RadiusEstimate,
}

/// One summand of the upper bound before squaring.
pub fn block_term(omega_p: f64, omega_s: f64, np: f64, nq: f64, nr: f64, ns: f64, q: QParam) -> f64 {
    let a = q.modulus() / 2.0 * (omega_p + omega_s + ((omega_p - omega_s).powi(2) + (nr + nq).powi(2)).sqrt());
    let b = q.complement() * (np * np + nq * nq + nr * nr + ns * ns).sqrt();
    a + b
}

pub fn block_bounds(p: &OperatorTuple, q_: &OperatorTuple, r: &OperatorTuple, s: &OperatorTuple, q: QParam, opts: &RadiusOptions) -> Result<BlockBounds> {
    check_block_shapes([p, q_, r, s])?;
    let mut upper_sq = 0.0;
    for i in 0..p.d() {
        let term = block_term(
            classical_radius(p.part(i), OMEGA_ANGLES),
            classical_radius(s.part(i), OMEGA_ANGLES),
            p.part(i).spectral_norm(),
            q_.part(i).spectral_norm(),
            r.part(i).spectral_norm(),
            s.part(i).spectral_norm(),
            q,
        );
        upper_sq += term * term;
    }
    let p_estimate = radius_joint(p, q, opts)?;
    let s_estimate = radius_joint(s, q, opts)?;
    let lower_sq = p_estimate.value.powi(2).max(s_estimate.value.powi(2));
    Ok(BlockBounds {
        lower: lower_sq.sqrt(),
        lower_sq,
        upper: upper_sq.sqrt(),
        upper_sq,
        p_estimate,
        s_estimate,
    })
}

/// Radius of the assembled tuple, warm-started from the embedded `P` and `S`
/// witnesses so the estimate can never fall below the lower bound.
pub fn assembled_radius(t: &OperatorTuple, bounds: &BlockBounds, q: QParam, opts: &RadiusOptions) -> Result<RadiusEstimate> {
    let starts = [
        embed_pair(&bounds.p_estimate.witness, false),
        embed_pair(&bounds.s_estimate.witness, true),
    ];
    radius_joint_with_starts(t, q, opts, &starts)
}

/// The special block shapes with their own stated bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockShape {
    /// `[[P, Q], [0, 0]]`
    UpperRow,
    /// `[[P, 0], [0, S]]`
    Diagonal,
    /// `[[0, Q], [R, 0]]`
    OffDiagonal,
    /// `[[P, Q], [Q, P]]`
    Symmetric,
}

/// Squared upper bound for a special shape, summed over the tuple, using
/// the per-shape closed forms (`ω(S_i)` in the diagonal case).
pub fn shape_upper_sq(shape: BlockShape, p: &OperatorTuple, q_: &OperatorTuple, r: &OperatorTuple, s: &OperatorTuple, q: QParam) -> f64 {
    let (qa, qs) = (q.modulus(), q.complement());
    (0..p.d())
        .map(|i| {
            let w = |m: &ComplexMatrix| classical_radius(m, OMEGA_ANGLES);
            let nm = |m: &ComplexMatrix| m.spectral_norm();
            let term = match shape {
                BlockShape::UpperRow => {
                    let (wp, np, nq) = (w(p.part(i)), nm(p.part(i)), nm(q_.part(i)));
                    qa / 2.0 * (wp + (wp * wp + nq * nq).sqrt()) + qs * (np * np + nq * nq).sqrt()
                }
                BlockShape::Diagonal => {
                    let (wp, ws) = (w(p.part(i)), w(s.part(i)));
                    let (np, ns) = (nm(p.part(i)), nm(s.part(i)));
                    qa * wp.max(ws) + qs * (np * np + ns * ns).sqrt()
                }
                BlockShape::OffDiagonal => {
                    let (nq, nr) = (nm(q_.part(i)), nm(r.part(i)));
                    qa / 2.0 * (nr + nq) + qs * (nq * nq + nr * nr).sqrt()
                }
                BlockShape::Symmetric => {
                    let (wp, np, nq) = (w(p.part(i)), nm(p.part(i)), nm(q_.part(i)));
                    qa * (wp + nq) + 2.0 * qs * (np * np + nq * nq).sqrt()
                }
            };
            term * term
        })
        .sum()
}
