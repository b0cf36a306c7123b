//! The semi-inner product `⟨x, y⟩_A = ⟨Ax, y⟩` of a positive semidefinite
//! `A`, A-adjoints, and q-A-numerical ranges and radii.

use alloc::string::ToString;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::model::{ComplexMatrix, FieldMode, OperatorTuple, QParam, Seed};
use crate::optimize::{self, radius_joint_with_starts, RadiusEstimate, RadiusOptions};
use crate::range::{CloudMeta, PointCloud};
use crate::sampler::{self, pair_rng, SqPair};

/// Default relative rank threshold.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Default kernel amplitudes for the full-plane certificate.
pub const DEFAULT_KAPPA_SCHEDULE: [f64; 7] = [1.0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6];

#[derive(Debug, Clone, PartialEq)]
pub struct ASpace {
    a: ComplexMatrix,
    sqrt_a: CMatrix,
    pinv_a: CMatrix,
    /// `A^{†/2}`, the pseudo-inverse square root.
    pinv_sqrt_a: CMatrix,
    proj: CMatrix,
    rank: usize,
    /// Orthonormal eigenbasis of `range(A)` (n×rank), eigenvalues descending.
    range_basis: CMatrix,
    kernel_basis: Vec<CVector>,
    eigenvalues: Vec<f64>,
    tol: f64,
}

pub fn build_aspace(a: &ComplexMatrix, tol: f64) -> Result<ASpace> {
    let n = a.dim();
    let residual = a.hermitian_residual();
    if residual > 1e-10 * (1.0 + a.frobenius_norm()) {
        return Err(Error::NotHermitian { residual });
    }
    let herm = (a.as_matrix() + a.as_matrix().adjoint()) * Complex64::new(0.5, 0.0);
    let (values, vecs) = linalg::hermitian_eigen_sorted(&herm);
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = tol * scale;
    if let Some(&neg) = values.iter().find(|&&v| v < -cut) {
        return Err(Error::Indefinite { eigenvalue: neg });
    }
    let rank = values.iter().filter(|&&v| v > cut).count();
    let diag = |f: &dyn Fn(f64) -> f64| {
        let mut d = CMatrix::zeros(n, n);
        for (k, &v) in values.iter().enumerate() {
            let col = vecs.column(k);
            d += col * col.adjoint() * Complex64::new(f(v), 0.0);
        }
        d
    };
    let pos = |v: f64| v > cut;
    let sqrt_a = diag(&|v| if pos(v) { v.sqrt() } else { 0.0 });
    let pinv_a = diag(&|v| if pos(v) { 1.0 / v } else { 0.0 });
    let pinv_sqrt_a = diag(&|v| if pos(v) { 1.0 / v.sqrt() } else { 0.0 });
    let proj = diag(&|v| if pos(v) { 1.0 } else { 0.0 });
    let range_basis = vecs.columns(0, rank).into_owned();
    let kernel_basis = (rank..n).map(|k| vecs.column(k).into_owned()).collect();
    Ok(ASpace {
        a: a.clone(),
        sqrt_a,
        pinv_a,
        pinv_sqrt_a,
        proj,
        rank,
        range_basis,
        kernel_basis,
        eigenvalues: values,
        tol,
    })
}

impl ASpace {
    pub fn n(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn sqrt_a(&self) -> &CMatrix {
        &self.sqrt_a
    }

    pub fn pinv_a(&self) -> &CMatrix {
        &self.pinv_a
    }

    pub fn pinv_sqrt_a(&self) -> &CMatrix {
        &self.pinv_sqrt_a
    }

    pub fn proj(&self) -> &CMatrix {
        &self.proj
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn range_basis(&self) -> &CMatrix {
        &self.range_basis
    }

    pub fn kernel_basis(&self) -> &[CVector] {
        &self.kernel_basis
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Largest residual among `sqrtA² = A`, `A A† A = A`, `P² = P = P*`.
    pub fn invariant_residual(&self) -> f64 {
        let a = self.a.as_matrix();
        let p = &self.proj;
        [
            linalg::frobenius(&(&self.sqrt_a * &self.sqrt_a - a)),
            linalg::frobenius(&(a * &self.pinv_a * a - a)),
            linalg::frobenius(&(p * p - p)),
            linalg::frobenius(&(p - p.adjoint())),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    fn check_q(&self, q: QParam) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::Infeasible("A = 0 has no A-unit vectors"));
        }
        if self.rank < 2 && !q.is_unimodular() {
            return Err(Error::Infeasible("S_{q,A} is empty for rank(A) ≤ 1 and |q| < 1"));
        }
        Ok(())
    }

    fn check_dim(&self, m: &ComplexMatrix) -> Result<()> {
        if m.dim() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: m.dim(),
            });
        }
        Ok(())
    }
}

/// `⟨Ax, y⟩`.
pub fn a_inner(s: &ASpace, x: &CVector, y: &CVector) -> Complex64 {
    linalg::inner(&s.a.apply(x), y)
}

pub fn a_norm(s: &ASpace, x: &CVector) -> f64 {
    a_inner(s, x, x).re.max(0.0).sqrt()
}

fn douglas_residual(m: &ComplexMatrix, s: &ASpace) -> (f64, f64) {
    let ma = m.as_matrix().adjoint() * s.a.as_matrix();
    let n = s.n();
    let outside = (CMatrix::identity(n, n) - &s.proj) * &ma;
    (linalg::frobenius(&outside), linalg::frobenius(&ma))
}

/// `range(M*A) ⊆ range(A)`, tested as `‖(I−P)M*A‖_F ≤ tol·(1 + ‖M*A‖_F)`.
pub fn is_a_adjointable(m: &ComplexMatrix, s: &ASpace, tol: f64) -> bool {
    let (r, scale) = douglas_residual(m, s);
    r <= tol * (1.0 + scale)
}

/// `A† M* A`.
pub fn a_adjoint(m: &ComplexMatrix, s: &ASpace) -> Result<ComplexMatrix> {
    s.check_dim(m)?;
    let (r, scale) = douglas_residual(m, s);
    if r > 1e-10 * (1.0 + scale) {
        return Err(Error::NotAdjointable { residual: r });
    }
    ComplexMatrix::new(&s.pinv_a * m.as_matrix().adjoint() * s.a.as_matrix())
}

/// `max_k ‖P M k‖` over the kernel basis.
pub fn kernel_leak(m: &ComplexMatrix, s: &ASpace) -> f64 {
    s.kernel_basis
        .iter()
        .map(|k| linalg::norm(&(&s.proj * m.apply(k))))
        .fold(0.0, f64::max)
}

/// Whether `M` maps some kernel vector of `A` outside the kernel.
pub fn kernel_escape(m: &ComplexMatrix, s: &ASpace, tol: f64) -> bool {
    kernel_leak(m, s) > tol
}

fn default_escape_tol(m: &ComplexMatrix) -> f64 {
    1e-10 * (1.0 + m.spectral_norm())
}

/// A pair with `‖x‖_A = ‖y‖_A = 1` and `⟨x, y⟩_A = q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SqAPair {
    pub x: CVector,
    pub y: CVector,
    /// A-orthogonal companion of `x` (absent when `|q| = 1`).
    pub z: Option<CVector>,
    pub q: QParam,
}

impl SqAPair {
    /// Largest of the A-constraint residuals.
    pub fn residual(&self, s: &ASpace) -> f64 {
        let mut r = (a_norm(s, &self.x) - 1.0)
            .abs()
            .max((a_norm(s, &self.y) - 1.0).abs())
            .max((a_inner(s, &self.x, &self.y) - self.q.value()).norm());
        if let Some(z) = &self.z {
            r = r.max(a_inner(s, &self.x, z).norm());
        }
        r
    }

    pub fn value(&self, s: &ASpace, m: &ComplexMatrix) -> Complex64 {
        a_inner(s, &m.apply(&self.x), &self.y)
    }
}

/// Draws `u` uniform on the unit sphere of `range(A)` (coordinates in the
/// range eigenbasis), `w ⊥ u` likewise, and returns
/// `x = A^{†/2}u + κk`, `y = A^{†/2}(q̄u + √(1−|q|²)w)` with a random unit
/// kernel vector `k`.
pub fn sample_sq_a(s: &ASpace, q: QParam, count: usize, seed: Seed, kappa: f64) -> Result<Vec<SqAPair>> {
    s.check_q(q)?;
    Ok((0..count as u64).map(|i| sample_a_pair(s, q, seed, i, kappa)).collect())
}

fn sample_a_pair(s: &ASpace, q: QParam, seed: Seed, index: u64, kappa: f64) -> SqAPair {
    let mut rng = pair_rng(seed, index);
    let (u_r, w_r) = sampler::draw_frame(&mut rng, s.rank, FieldMode::Complex);
    let u = &s.range_basis * &u_r;
    let w = if q.is_unimodular() {
        None
    } else {
        let phase = linalg::phase_of(q.value()).conj();
        w_r.map(|w| &s.range_basis * (w * phase))
    };
    let mut x = &s.pinv_sqrt_a * &u;
    if kappa != 0.0 && !s.kernel_basis.is_empty() {
        let coeffs = linalg::unit_vector(&mut rng, s.kernel_basis.len(), FieldMode::Complex);
        for (k, c) in s.kernel_basis.iter().zip(coeffs.iter()) {
            x += k * (c * kappa);
        }
    }
    let y = &s.pinv_sqrt_a * sampler::compose_y(&u, w.as_ref(), q);
    let z = w.map(|w| &s.pinv_sqrt_a * w);
    SqAPair { x, y, z, q }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub kappa: f64,
    pub value: Complex64,
    pub modulus: f64,
    /// A-constraint residual of the pair realizing `value`.
    pub residual: f64,
}

/// Evidence that `W_{q,A}(M)` is unbounded: along `x = x₂ + ξk₁`, `y = y₂`
/// the value is `c + ξ·slope` with `ξ = κ·c/|c|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullPlaneCertificate {
    pub kernel_vector: Vec<Complex64>,
    pub x_base: Vec<Complex64>,
    pub y: Vec<Complex64>,
    /// `‖P M k₁‖_A`.
    pub slope: f64,
    /// `⟨M x₂, y₂⟩_A`.
    pub offset: Complex64,
    pub entries: Vec<CertificateEntry>,
}

impl FullPlaneCertificate {
    pub fn is_strictly_increasing(&self) -> bool {
        self.entries.windows(2).all(|w| w[1].modulus > w[0].modulus)
    }

    pub fn max_modulus(&self) -> f64 {
        self.entries.iter().map(|e| e.modulus).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QARangeResult {
    Cloud(PointCloud),
    FullPlane(FullPlaneCertificate),
}

fn full_plane_certificate(m: &ComplexMatrix, s: &ASpace, q: QParam, kappas: &[f64]) -> Result<FullPlaneCertificate> {
    let kb = CMatrix::from_columns(&s.kernel_basis);
    let pmk = &s.proj * m.as_matrix() * &kb;
    let svd = pmk.svd(false, true);
    let top = (0..svd.singular_values.len())
        .fold(0, |b, i| if svd.singular_values[i] > svd.singular_values[b] { i } else { b });
    let v: CVector = svd.v_t.expect("requested V^H").row(top).adjoint();
    let k1 = linalg::normalized(&(&kb * v)).expect("unit kernel vector");
    let leak = &s.proj * m.apply(&k1);
    let slope = a_norm(s, &leak);
    let y2 = &leak / Complex64::new(slope, 0.0);

    let x2 = if q.is_unimodular() {
        &y2 * q.value()
    } else {
        let mut best: Option<(f64, CVector)> = None;
        for k in 0..s.rank {
            let e = s.range_basis.column(k).into_owned();
            let r = &e - &y2 * a_inner(s, &e, &y2);
            let rn = a_norm(s, &r);
            if best.as_ref().is_none_or(|(b, _)| rn > *b) {
                best = Some((rn, r));
            }
        }
        let (rn, r) = best.ok_or(Error::Infeasible("rank(A) ≥ 2 needed"))?;
        let w = r / Complex64::new(rn, 0.0);
        &y2 * q.value() + w * Complex64::new(q.complement(), 0.0)
    };
    let offset = a_inner(s, &m.apply(&x2), &y2);
    let dir = linalg::phase_of(offset);
    let entries = kappas
        .iter()
        .map(|&kappa| {
            let pair = SqAPair {
                x: &x2 + &k1 * (dir * kappa),
                y: y2.clone(),
                z: None,
                q,
            };
            let value = pair.value(s, m);
            CertificateEntry {
                kappa,
                value,
                modulus: value.norm(),
                residual: pair.residual(s),
            }
        })
        .collect();
    Ok(FullPlaneCertificate {
        kernel_vector: k1.iter().copied().collect(),
        x_base: x2.iter().copied().collect(),
        y: y2.iter().copied().collect(),
        slope,
        offset,
        entries,
    })
}

/// `W_{q,A}(M)`: a full-plane certificate when `M` leaks the kernel of `A`,
/// otherwise a cloud of `⟨Mx, y⟩_A` over [`sample_sq_a`] with `κ = 0`.
/// An empty `kappa_schedule` selects [`DEFAULT_KAPPA_SCHEDULE`].
pub fn cloud_qa(m: &ComplexMatrix, s: &ASpace, q: QParam, count: usize, seed: Seed, kappa_schedule: &[f64]) -> Result<QARangeResult> {
    s.check_dim(m)?;
    s.check_q(q)?;
    if kernel_escape(m, s, default_escape_tol(m)) {
        let kappas = if kappa_schedule.is_empty() { &DEFAULT_KAPPA_SCHEDULE[..] } else { kappa_schedule };
        return Ok(QARangeResult::FullPlane(full_plane_certificate(m, s, q, kappas)?));
    }
    let pairs = sample_sq_a(s, q, count, seed, 0.0)?;
    let points = pairs.iter().map(|p| alloc::vec![p.value(s, m)]).collect();
    let meta = CloudMeta {
        n: s.n(),
        q: q.value(),
        seed: seed.0,
        sample_count: count,
        generator: "cloud_qa".to_string(),
    };
    Ok(QARangeResult::Cloud(PointCloud::new(1, points, meta)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Compression {
    /// `V* A V` for the range eigenbasis `V` (positive definite).
    pub a_prime: ComplexMatrix,
    /// `V* M V`.
    pub t_prime: ComplexMatrix,
    /// `V`, an isometry onto `range(A)`.
    pub basis: CMatrix,
}

pub fn compress_to_range(m: &ComplexMatrix, s: &ASpace) -> Result<Compression> {
    s.check_dim(m)?;
    if s.rank == 0 {
        return Err(Error::Infeasible("A = 0 has an empty range"));
    }
    let v = &s.range_basis;
    let vh = v.adjoint();
    Ok(Compression {
        a_prime: ComplexMatrix::new(&vh * s.a.as_matrix() * v)?,
        t_prime: ComplexMatrix::new(&vh * m.as_matrix() * v)?,
        basis: v.clone(),
    })
}

/// `L T' L⁻¹` with `L = A'^{1/2}`: the compressed operator in coordinates
/// where the A-inner product is the ambient one.
struct Whitened {
    op: ComplexMatrix,
    /// Maps whitened coordinates back to `ℂ^n`: `V L⁻¹`.
    back: CMatrix,
    /// Maps `ℂ^n` to whitened coordinates: `L V*`.
    forth: CMatrix,
}

fn whiten(m: &ComplexMatrix, s: &ASpace) -> Result<Whitened> {
    let c = compress_to_range(m, s)?;
    let (vals, vecs) = linalg::hermitian_eigen_sorted(c.a_prime.as_matrix());
    let r = vals.len();
    let mut l = CMatrix::zeros(r, r);
    let mut l_inv = CMatrix::zeros(r, r);
    for (k, &v) in vals.iter().enumerate() {
        let col = vecs.column(k);
        let outer = col * col.adjoint();
        l += &outer * Complex64::new(v.sqrt(), 0.0);
        l_inv += outer * Complex64::new(1.0 / v.sqrt(), 0.0);
    }
    Ok(Whitened {
        op: ComplexMatrix::new(&l * c.t_prime.as_matrix() * &l_inv)?,
        back: &c.basis * &l_inv,
        forth: l * c.basis.adjoint(),
    })
}

/// `sup ‖M x‖_A` over `‖x‖_A = 1` for kernel-preserving `M`.
pub fn a_operator_norm(m: &ComplexMatrix, s: &ASpace) -> Result<f64> {
    if kernel_escape(m, s, default_escape_tol(m)) {
        return Err(Error::KernelEscape);
    }
    Ok(whiten(m, s)?.op.spectral_norm())
}

#[derive(Debug, Clone, PartialEq)]
pub enum QARadius {
    Finite {
        /// Estimate on the whitened compressed problem.
        estimate: RadiusEstimate,
        /// The witness mapped back to `ℂ^n`.
        pair: SqAPair,
    },
    Infinite,
}

impl QARadius {
    pub fn value(&self) -> f64 {
        match self {
            QARadius::Finite { estimate, .. } => estimate.value,
            QARadius::Infinite => f64::INFINITY,
        }
    }
}

fn lift_pair(w: &Whitened, pair: &SqPair) -> SqAPair {
    SqAPair {
        x: &w.back * &pair.x,
        y: &w.back * &pair.y,
        z: pair.z.as_ref().map(|z| &w.back * z),
        q: pair.q,
    }
}

fn lower_pair(w: &Whitened, pair: &SqAPair) -> Option<SqPair> {
    let x = linalg::normalized(&(&w.forth * &pair.x))?;
    let y = &w.forth * &pair.y;
    let z = if pair.q.is_unimodular() {
        None
    } else {
        let s = pair.q.complement();
        linalg::normalized(&linalg::project_out(&((&y - &x * pair.q.value().conj()) / Complex64::new(s, 0.0)), &x))
    };
    Some(SqPair {
        y: sampler::compose_y(&x, z.as_ref(), pair.q),
        x,
        z,
        q: pair.q,
    })
}

pub fn radius_qa(m: &ComplexMatrix, s: &ASpace, q: QParam, opts: &RadiusOptions) -> Result<QARadius> {
    radius_qa_with_starts(m, s, q, opts, &[])
}

/// As [`radius_qa`], with warm starts given in `ℂ^n`.
pub fn radius_qa_with_starts(m: &ComplexMatrix, s: &ASpace, q: QParam, opts: &RadiusOptions, starts: &[SqAPair]) -> Result<QARadius> {
    s.check_dim(m)?;
    s.check_q(q)?;
    if kernel_escape(m, s, default_escape_tol(m)) {
        return Ok(QARadius::Infinite);
    }
    let w = whiten(m, s)?;
    let lowered: Vec<SqPair> = starts.iter().filter_map(|p| lower_pair(&w, p)).collect();
    let estimate = radius_joint_with_starts(&OperatorTuple::single(w.op.clone()), q, opts, &lowered)?;
    let pair = lift_pair(&w, &estimate.witness);
    Ok(QARadius::Finite { estimate, pair })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleGap {
    /// `w_T + w_S − w_{T+S}`.
    pub gap: f64,
    /// Largest `ℜ(⟨y, Tx⟩_A ⟨Sx, y⟩_A)` found.
    pub cross_sup: f64,
    pub w_t: f64,
    pub w_s: f64,
    pub w_sum: f64,
}

impl TriangleGap {
    /// `|cross_sup − w_T w_S| ≤ rel·w_T w_S`.
    pub fn cross_matches(&self, rel: f64) -> bool {
        (self.cross_sup - self.w_t * self.w_s).abs() <= rel * self.w_t * self.w_s
    }
}

pub fn triangle_equality_gap(mt: &ComplexMatrix, ms: &ComplexMatrix, s: &ASpace, q: QParam, opts: &RadiusOptions) -> Result<TriangleGap> {
    s.check_dim(mt)?;
    s.check_dim(ms)?;
    s.check_q(q)?;
    if kernel_escape(mt, s, default_escape_tol(mt)) || kernel_escape(ms, s, default_escape_tol(ms)) {
        return Err(Error::KernelEscape);
    }
    let sum = mt + ms;
    let (wt_op, ws_op, sum_op) = (whiten(mt, s)?, whiten(ms, s)?, whiten(&sum, s)?);
    let t1 = OperatorTuple::single(wt_op.op);
    let s1 = OperatorTuple::single(ws_op.op);
    let sum1 = OperatorTuple::single(sum_op.op);

    let e_sum = radius_joint_with_starts(&sum1, q, opts, &[])?;
    let seed_pair = [e_sum.witness.clone()];
    let e_t = radius_joint_with_starts(&t1, q, opts, &seed_pair)?;
    let e_s = radius_joint_with_starts(&s1, q, opts, &seed_pair)?;
    let candidates = [e_sum.witness.clone(), e_t.witness.clone(), e_s.witness.clone()];
    let (cross_opt, cross_pair) = optimize::maximize_cross(&t1, &s1, q, opts, &candidates)?;

    let mut w_t = e_t.value;
    let mut w_s = e_s.value;
    let mut cross_sup = cross_opt;
    for p in candidates.iter().chain(core::iter::once(&cross_pair)) {
        let a = p.point(&t1)[0];
        let b = p.point(&s1)[0];
        w_t = w_t.max(a.norm());
        w_s = w_s.max(b.norm());
        cross_sup = cross_sup.max((a.conj() * b).re);
    }
    Ok(TriangleGap {
        gap: w_t + w_s - e_sum.value,
        cross_sup,
        w_t,
        w_s,
        w_sum: e_sum.value,
    })
}
