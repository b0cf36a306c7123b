//! Multi-start ascent for the joint q-numerical radius and related
//! objectives over `S_q`.
//!
//! A pair is held as the orthonormal frame `[x z]` (just `[x]` when `|q| = 1`).
//! Each iteration takes a Riemannian gradient step on that frame, retracts by
//! Gram–Schmidt, and then re-solves the `z` subproblem for fixed `x`.

use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{self, CMatrix, CVector};
use crate::model::{tuple_norm, FieldMode, OperatorTuple, QParam, Seed};
use crate::range::point_norm;
use crate::sampler::{self, compose_y, SqPair};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: Seed,
}

impl Default for RadiusOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iters: 500,
            tol: 1e-9,
            seed: Seed(0),
        }
    }
}

impl RadiusOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed: Seed(seed),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusEstimate {
    pub value: f64,
    pub witness: SqPair,
    pub iterations: usize,
    pub converged: bool,
}

/// What is being maximized over `S_q`.
#[derive(Debug, Clone, Copy)]
enum Target<'a> {
    /// `‖(⟨T_i x, y⟩)_i‖₂²`.
    Norm(&'a OperatorTuple),
    /// `Σ_i ℜ(conj(⟨T_i x, y⟩)·⟨S_i x, y⟩)`.
    Cross(&'a OperatorTuple, &'a OperatorTuple),
}

impl<'a> Target<'a> {
    fn mats(self) -> Vec<&'a CMatrix> {
        match self {
            Target::Norm(t) => t.parts().iter().map(|m| m.as_matrix()).collect(),
            Target::Cross(t, s) => t
                .parts()
                .iter()
                .chain(s.parts())
                .map(|m| m.as_matrix())
                .collect(),
        }
    }

    /// Objective value and the weights `h_k = ∂φ/∂p̄_k` at the values `p`.
    fn eval(&self, p: &[Complex64]) -> (f64, Vec<Complex64>) {
        match self {
            Target::Norm(_) => (p.iter().map(|c| c.norm_sqr()).sum(), p.to_vec()),
            Target::Cross(t, _) => {
                let d = t.d();
                let (a, b) = p.split_at(d);
                let v = a.iter().zip(b).map(|(a, b)| (a.conj() * b).re).sum();
                let h = b.iter().chain(a).map(|c| c * 0.5).collect();
                (v, h)
            }
        }
    }
}

struct State {
    x: CVector,
    z: Option<CVector>,
    value: f64,
}

struct Problem<'a> {
    target: Target<'a>,
    mats: Vec<&'a CMatrix>,
    q: QParam,
    s: f64,
}

impl<'a> Problem<'a> {
    fn new(target: Target<'a>, q: QParam) -> Self {
        Self {
            target,
            mats: target.mats(),
            q,
            s: if q.is_unimodular() { 0.0 } else { q.complement() },
        }
    }

    fn y(&self, x: &CVector, z: Option<&CVector>) -> CVector {
        compose_y(x, z, self.q)
    }

    fn values(&self, x: &CVector, y: &CVector) -> Vec<Complex64> {
        self.mats.iter().map(|w| y.dotc(&(*w * x))).collect()
    }

    fn value(&self, x: &CVector, z: Option<&CVector>) -> f64 {
        let y = self.y(x, z);
        self.target.eval(&self.values(x, &y)).0
    }

    fn state(&self, x: CVector, z: Option<CVector>) -> State {
        let value = self.value(&x, z.as_ref());
        State { x, z, value }
    }

    /// Euclidean gradients `(∂φ/∂x̄, ∂φ/∂z̄)`.
    fn gradient(&self, st: &State) -> (CVector, Option<CVector>) {
        let y = self.y(&st.x, st.z.as_ref());
        let wx: Vec<CVector> = self.mats.iter().map(|w| *w * &st.x).collect();
        let p: Vec<Complex64> = wx.iter().map(|v| y.dotc(v)).collect();
        let (_, h) = self.target.eval(&p);
        let n = st.x.len();
        let mut gx = CVector::zeros(n);
        let mut gz = CVector::zeros(n);
        let q = self.q.value();
        for ((w, v), hk) in self.mats.iter().zip(&wx).zip(&h) {
            gx += v * (hk.conj() * q) + w.ad_mul(&y) * *hk;
            gz += v * hk.conj();
        }
        let gz = st.z.as_ref().map(|_| gz * Complex64::new(self.s, 0.0));
        (gx, gz)
    }

    /// Best `z ⊥ x` for the norm objective (exact for `d = 1`).
    fn solve_z(&self, x: &CVector, z0: &CVector) -> CVector {
        let q = self.q.value();
        let mut cs = Vec::with_capacity(self.mats.len());
        let mut ws = Vec::with_capacity(self.mats.len());
        for w in &self.mats {
            let mx = *w * x;
            let nu = x.dotc(&mx);
            cs.push(q * nu);
            ws.push(&mx - x * nu);
        }
        if ws.len() == 1 {
            let scale = linalg::norm(&(self.mats[0] * x));
            if linalg::norm(&ws[0]) <= 1e-13 * scale {
                return z0.clone();
            }
            return match linalg::normalized(&linalg::project_out(&ws[0], x)) {
                Some(u) => u * linalg::phase_of(cs[0]).conj(),
                None => z0.clone(),
            };
        }
        let s = Complex64::new(self.s, 0.0);
        let b = CVector::from_iterator(cs.len(), cs.iter().map(|c| c.conj()));
        let bm = DMatrix::from_fn(ws.len(), x.len(), |i, j| ws[i][j].conj() * s);
        let f = |z: &CVector| (&b + &bm * z).norm_squared();

        let mut candidates: Vec<CVector> = alloc::vec![z0.clone()];
        if let Some(v) = linalg::normalized(&bm.ad_mul(&b)) {
            candidates.push(v);
        }
        let svd = bm.clone().svd(false, true);
        if let Some(vt) = svd.v_t {
            let k = svd
                .singular_values
                .iter()
                .enumerate()
                .fold((0, -1.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc })
                .0;
            let v: CVector = vt.row(k).adjoint();
            let bv = b.dotc(&(&bm * &v));
            candidates.push(v * linalg::phase_of(bv).conj());
        }

        let mut best = (f64::NEG_INFINITY, z0.clone());
        for mut z in candidates {
            z = match linalg::normalized(&linalg::project_out(&z, x)) {
                Some(z) => z,
                None => continue,
            };
            let mut fz = f(&z);
            for _ in 0..200 {
                let g = bm.ad_mul(&(&b + &bm * &z));
                let Some(next) = linalg::normalized(&linalg::project_out(&g, x)) else {
                    break;
                };
                let fn_ = f(&next);
                if fn_ <= fz * (1.0 + 1e-15) {
                    if fn_ > fz {
                        z = next;
                        fz = fn_;
                    }
                    break;
                }
                z = next;
                fz = fn_;
            }
            if fz > best.0 {
                best = (fz, z);
            }
        }
        best.1
    }

    fn polish_z(&self, st: State) -> State {
        let (Target::Norm(_), Some(z)) = (self.target, st.z.as_ref()) else {
            return st;
        };
        let z_new = self.solve_z(&st.x, z);
        let cand = self.state(st.x.clone(), Some(z_new));
        if cand.value >= st.value {
            cand
        } else {
            st
        }
    }

    fn retract(&self, st: &State, dx: &CVector, dz: Option<&CVector>, t: f64) -> Option<State> {
        let tc = Complex64::new(t, 0.0);
        let x = linalg::normalized(&(&st.x + dx * tc))?;
        let z = match (&st.z, dz) {
            (Some(z), Some(dz)) => Some(linalg::normalized(&linalg::project_out(&(z + dz * tc), &x))?),
            (Some(z), None) => Some(linalg::normalized(&linalg::project_out(z, &x))?),
            _ => None,
        };
        Some(self.state(x, z))
    }

    /// Riemannian gradient on the frame: `G − X·sym(Xᴴ G)`.
    fn tangent(&self, st: &State, gx: CVector, gz: Option<CVector>) -> (CVector, Option<CVector>) {
        match (&st.z, gz) {
            (Some(z), Some(gz)) => {
                let a11 = st.x.dotc(&gx).re;
                let a22 = z.dotc(&gz).re;
                let a12 = (st.x.dotc(&gz) + gx.dotc(z)) * 0.5;
                let a21 = a12.conj();
                let tx = &gx - &st.x * Complex64::new(a11, 0.0) - z * a21;
                let tz = &gz - &st.x * a12 - z * Complex64::new(a22, 0.0);
                (tx, Some(tz))
            }
            _ => {
                let a = st.x.dotc(&gx).re;
                (&gx - &st.x * Complex64::new(a, 0.0), None)
            }
        }
    }

    /// Runs until the value stops moving at machine precision (or the
    /// iteration cap); `converged` records whether a gain below `tol` was seen.
    fn ascend(&self, start: State, opts: &RadiusOptions) -> (State, usize, bool) {
        let mut st = self.polish_z(start);
        let mut step = 0.5;
        let mut iters = 0;
        let mut converged = false;
        while iters < opts.max_iters {
            iters += 1;
            let (gx, gz) = self.gradient(&st);
            let (tx, tz) = self.tangent(&st, gx, gz);
            let gnorm = (tx.norm_squared() + tz.as_ref().map_or(0.0, |v| v.norm_squared())).sqrt();
            if !(gnorm > 1e-14) {
                return (st, iters, true);
            }
            let inv = Complex64::new(1.0 / gnorm, 0.0);
            let dx = tx * inv;
            let dz = tz.map(|v| v * inv);
            let mut accepted = None;
            while step > 1e-14 {
                match self.retract(&st, &dx, dz.as_ref(), step) {
                    Some(cand) if cand.value > st.value => {
                        accepted = Some(cand);
                        break;
                    }
                    _ => step *= 0.5,
                }
            }
            let Some(cand) = accepted else {
                return (st, iters, true);
            };
            let cand = self.polish_z(cand);
            let before = self.report(&st);
            let gain = self.report(&cand) - before;
            st = cand;
            step = (step * 2.0).min(1.0);
            converged |= gain < opts.tol;
            if gain <= 1e-15 * (1.0 + before.abs()) {
                return (st, iters, true);
            }
        }
        (st, iters, converged)
    }

    /// The reported quantity (`‖p‖₂` for the norm target).
    fn report(&self, st: &State) -> f64 {
        match self.target {
            Target::Norm(_) => st.value.max(0.0).sqrt(),
            Target::Cross(..) => st.value,
        }
    }

    fn random_start(&self, n: usize, seed: Seed, index: u64) -> State {
        let mut rng = sampler::pair_rng(seed, index);
        let (x, z) = sampler::draw_frame(&mut rng, n, FieldMode::Complex);
        let z = if self.q.is_unimodular() { None } else { z };
        self.state(x, z)
    }

    fn start_from(&self, pair: &SqPair) -> Option<State> {
        let x = linalg::normalized(&pair.x)?;
        let z = if self.q.is_unimodular() {
            None
        } else {
            let z = pair
                .z
                .clone()
                .or_else(|| linalg::any_orthogonal_unit(&x))?;
            Some(linalg::normalized(&linalg::project_out(&z, &x))?)
        };
        Some(self.state(x, z))
    }

    fn run(&self, n: usize, opts: &RadiusOptions, starts: &[SqPair]) -> (State, usize, bool) {
        let mut states: Vec<State> = starts.iter().filter_map(|p| self.start_from(p)).collect();
        for r in 0..opts.restarts.max(1) {
            states.push(self.random_start(n, opts.seed, r as u64));
        }
        let mut best: Option<(State, bool)> = None;
        let mut total = 0;
        for s in states {
            let (st, it, conv) = self.ascend(s, opts);
            total += it;
            if best.as_ref().is_none_or(|(b, _)| st.value > b.value) {
                best = Some((st, conv));
            }
        }
        let (st, conv) = best.expect("at least one start");
        (st, total, conv)
    }
}

fn witness_of(q: QParam, st: &State) -> SqPair {
    let y = compose_y(&st.x, st.z.as_ref(), q);
    SqPair {
        x: st.x.clone(),
        z: st.z.clone(),
        q,
        y,
    }
}

pub fn radius_joint(t: &OperatorTuple, q: QParam, opts: &RadiusOptions) -> Result<RadiusEstimate> {
    radius_joint_with_starts(t, q, opts, &[])
}

/// As [`radius_joint`], with extra warm starts tried alongside the random ones.
pub fn radius_joint_with_starts(t: &OperatorTuple, q: QParam, opts: &RadiusOptions, starts: &[SqPair]) -> Result<RadiusEstimate> {
    sampler::check_feasible(t.n(), q, FieldMode::Complex)?;
    let norm = tuple_norm(t);
    let scaled;
    let work = if norm > 0.0 {
        scaled = t.scale(Complex64::new(1.0 / norm, 0.0));
        &scaled
    } else {
        t
    };
    let problem = Problem::new(Target::Norm(work), q);
    let (st, iterations, converged) = problem.run(t.n(), opts, starts);
    let witness = witness_of(q, &st);
    let value = point_norm(&witness.point(t));
    Ok(RadiusEstimate {
        value,
        witness,
        iterations,
        converged,
    })
}

/// Maximizes `Σ_i ℜ(conj(⟨T_i x, y⟩)·⟨S_i x, y⟩)` over `S_q`; returns the value
/// and its pair.
pub fn maximize_cross(t: &OperatorTuple, s: &OperatorTuple, q: QParam, opts: &RadiusOptions, starts: &[SqPair]) -> Result<(f64, SqPair)> {
    t.check_same_shape(s)?;
    sampler::check_feasible(t.n(), q, FieldMode::Complex)?;
    let problem = Problem::new(Target::Cross(t, s), q);
    let (st, _, _) = problem.run(t.n(), opts, starts);
    let witness = witness_of(q, &st);
    Ok((cross_value(t, s, &witness), witness))
}

pub fn cross_value(t: &OperatorTuple, s: &OperatorTuple, pair: &SqPair) -> f64 {
    let a = pair.point(t);
    let b = pair.point(s);
    a.iter().zip(&b).map(|(a, b)| (a.conj() * b).re).sum()
}
