//! Seeded property checks with signed margins, the non-convexity
//! counterexamples, and the Tsing disk-center comparison.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::crange::{self, BlockShape};
use crate::error::{Error, Result};
use crate::geometry::{self, convexity_defect, convexity_defect_with_pairs, hausdorff, min_distance};
use crate::linalg::{self, CVector};
use crate::model::{adjoint_tuple, tuple_norm, ComplexMatrix, FieldMode, OperatorTuple, QParam, Seed};
use crate::optimize::{radius_joint, RadiusOptions};
use crate::random;
use crate::range::{self, apply_affine, cloud_joint, cloud_single, point_norm, sandwich_bounds, PointCloud};
use crate::report::{Report, Witness};
use crate::sampler::{pair_from_xz, pair_rng, sample_sq, SqPair};
use crate::semi_hilbert::{self as sh, build_aspace, QARangeResult, DEFAULT_RANK_TOL};
use crate::spectrum::spectral_inclusion_check;

/// Built-in slack of the seed-coupled identity checks.
pub const EXACT_SLACK: f64 = 1e-12;

/// Distance from `(1/4, 0)` to the example range at `q = 1/2`.
pub const DELTA_EXAMPLE_Q_HALF: f64 = 0.066;
/// Distance from `(√3/4, 0)` to the example range at `q = 0`.
pub const DELTA_EXAMPLE_Q_ZERO: f64 = 0.16;
/// Distance from `(0, 1/4)` to the real self-adjoint range (`m = 1`, `q = 1/2`).
pub const DELTA_REMARK_REAL: f64 = 0.49;

/// Samples per counterexample cloud.
pub const COUNTEREXAMPLE_SAMPLES: usize = 20_000;

const TSING_SAMPLES: usize = 10_000;
const TSING_DISKS: usize = 2_000;
const TSING_PER_DISK: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Seed-coupled pointwise identities.
    pub identity: f64,
    /// Hausdorff distance between sampled sets.
    pub monte_carlo: f64,
    /// Relative slack for optimizer-based bounds.
    pub optimizer: f64,
    /// Normalized convexity defect.
    pub convexity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-10,
            monte_carlo: 0.05,
            optimizer: 1e-3,
            convexity: 0.02,
        }
    }
}

/// Which disk center the Tsing report is judged on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TsingCenter {
    /// `q⟨Mx, x⟩`.
    #[default]
    Corrected,
    /// `⟨Mx, x⟩`, a negative control.
    Printed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub seed: u64,
    pub dimensions: Vec<usize>,
    pub tuple_lengths: Vec<usize>,
    pub q_values: Vec<Complex64>,
    /// Random instances per identity or bound check.
    pub instances: usize,
    /// Random instances per sampled-set check.
    pub set_instances: usize,
    /// Points per cloud in pointwise checks.
    pub samples: usize,
    /// Points per cloud in set comparisons and convexity checks.
    pub set_samples: usize,
    pub defect_pairs: usize,
    pub restarts: usize,
    pub tolerances: Tolerances,
    pub tsing_center: TsingCenter,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            dimensions: vec![2, 3, 4],
            tuple_lengths: vec![1, 2, 3],
            q_values: vec![Complex64::new(0.2, 0.0), Complex64::new(0.5, 0.0), Complex64::new(0.9, 0.0), Complex64::new(0.3, 0.4)],
            instances: 20,
            set_instances: 3,
            samples: 2_000,
            set_samples: 10_000,
            defect_pairs: 1_000,
            restarts: 8,
            tolerances: Tolerances::default(),
            tsing_center: TsingCenter::Corrected,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if self.dimensions.is_empty() || self.dimensions.iter().any(|&n| !(2..=crate::spectrum::MAX_DIM).contains(&n)) {
            return bad("dimensions must be non-empty and within 2..=64");
        }
        if self.tuple_lengths.is_empty() || self.tuple_lengths.contains(&0) {
            return bad("tuple lengths must be non-empty and positive");
        }
        if self.q_values.is_empty() {
            return bad("q values must be non-empty");
        }
        for q in &self.q_values {
            QParam::new(*q)?;
        }
        if [self.instances, self.set_instances, self.samples, self.set_samples, self.defect_pairs, self.restarts].contains(&0) {
            return bad("counts must be positive");
        }
        if self.set_samples < 20 {
            return bad("set_samples must be at least 20");
        }
        let t = &self.tolerances;
        if [t.identity, t.monte_carlo, t.optimizer, t.convexity].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return bad("tolerances must be finite and non-negative");
        }
        Ok(())
    }

    fn qs(&self) -> Vec<QParam> {
        self.q_values.iter().map(|q| QParam::new(*q).expect("validated")).collect()
    }

    fn opts(&self, seed: u64) -> RadiusOptions {
        RadiusOptions {
            restarts: self.restarts,
            seed: Seed(seed),
            ..RadiusOptions::default()
        }
    }
}

/// Tracks the worst observation of a check together with its witnesses.
struct Worst {
    value: f64,
    witnesses: Vec<Witness>,
    count: usize,
    /// `true`: larger observations are worse.
    upper: bool,
}

impl Worst {
    fn max() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            witnesses: Vec::new(),
            count: 0,
            upper: true,
        }
    }

    fn min() -> Self {
        Self {
            value: f64::INFINITY,
            witnesses: Vec::new(),
            count: 0,
            upper: false,
        }
    }

    fn see(&mut self, v: f64, witnesses: impl FnOnce() -> Vec<Witness>) {
        self.count += 1;
        let worse = if self.upper { v > self.value } else { v < self.value };
        if worse || v.is_nan() {
            self.value = v;
            self.witnesses = witnesses();
        }
    }

    fn at_most(self, id: &str, bound: f64, tol: f64, seed: u64, details: String) -> Report {
        Report::at_most(id, self.value, bound, tol, Seed(seed), self.count, details, self.witnesses)
    }

    fn at_least(self, id: &str, bound: f64, tol: f64, seed: u64, details: String) -> Report {
        Report::at_least(id, self.value, bound, tol, Seed(seed), self.count, details, self.witnesses)
    }
}

fn tuple_witness(t: &OperatorTuple) -> Vec<Witness> {
    t.parts().iter().enumerate().map(|(i, m)| Witness::matrix(&format!("T{}", i + 1), m.as_matrix())).collect()
}

fn pair_witness(p: &SqPair) -> Vec<Witness> {
    vec![Witness::vector("x", &p.x), Witness::vector("y", &p.y)]
}

fn diff_norm(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn max_pointwise(a: &PointCloud, b: &PointCloud) -> f64 {
    a.points.iter().zip(&b.points).map(|(p, q)| diff_norm(p, q)).fold(0.0, f64::max)
}

struct Instance {
    n: usize,
    d: usize,
    q: QParam,
    seed: u64,
    rng: ChaCha8Rng,
}

/// Independent streams per check, keyed by a fixed check number.
struct Streams<'a> {
    cfg: &'a SuiteConfig,
    qs: Vec<QParam>,
}

impl<'a> Streams<'a> {
    fn new(cfg: &'a SuiteConfig) -> Self {
        Self { cfg, qs: cfg.qs() }
    }

    /// Instance `k` of `check`: cycles through the configured dimensions,
    /// tuple lengths and q values.
    fn instance(&self, check: u64, k: usize, qs: &[QParam]) -> Instance {
        let dims = &self.cfg.dimensions;
        let lens = &self.cfg.tuple_lengths;
        let mut rng = pair_rng(Seed(self.cfg.seed), (check << 32) | k as u64);
        let seed = rng.random();
        Instance {
            n: dims[k % dims.len()],
            d: lens[(k / dims.len()) % lens.len()],
            q: qs[k % qs.len()],
            seed,
            rng,
        }
    }

    fn nonzero_qs(&self) -> Vec<QParam> {
        self.qs.iter().copied().filter(|q| q.modulus() > 0.0).collect()
    }

    fn moduli(&self) -> Vec<QParam> {
        let mut out: Vec<QParam> = Vec::new();
        for q in &self.qs {
            let m = QParam::real(q.modulus()).expect("|q| ≤ 1");
            if !out.contains(&m) {
                out.push(m);
            }
        }
        out
    }
}

type Group = fn(&Streams) -> Result<Vec<Report>>;

fn one(r: Result<Report>) -> Result<Vec<Report>> {
    r.map(|r| vec![r])
}

/// Check groups with the ids each one reports.
const GROUPS: &[(&[&str], Group)] = &[
    (&["rotation_identity"], |st| one(rotation_identity(st))),
    (&["adjoint_identity"], |st| one(adjoint_identity(st))),
    (&["affine_identity"], |st| one(affine_identity(st))),
    (&["unitary_invariance"], |st| one(unitary_invariance(st))),
    (&["product_structure"], |st| one(product_structure(st))),
    (&["norm_dominance"], |st| one(norm_dominance(st))),
    (&["radius_homogeneity"], |st| one(radius_homogeneity(st))),
    (&["subadditivity"], |st| one(subadditivity(st))),
    (&["definiteness"], |st| one(definiteness(st))),
    (&["spectral_inclusion"], |st| one(spectral_inclusion(st))),
    (&["sandwich_corrected_lower", "sandwich_paper_lower", "sandwich_upper"], sandwich),
    (&["c_range_padded", "c_range_rank_one", "c_range_two_by_two"], c_range),
    (
        &[
            "block_bounds_lower",
            "block_bounds_upper",
            "block_remark_diagonal",
            "block_remark_off_diagonal",
            "block_remark_symmetric",
            "block_remark_upper_row",
        ],
        block_bounds,
    ),
    (
        &["convexity_commuting_2x2", "convexity_decreases", "convexity_semi_hilbert", "convexity_single", "convexity_span"],
        convexity,
    ),
    (&["a_adjoint_calculus", "compression_equality", "kernel_escape_full_plane", "semi_hilbert_reduction"], semi_hilbert),
    (&["triangle_equality_implication", "triangle_equality_self"], triangle),
];

/// Ids of every check run by [`run_suite`].
pub fn suite_check_ids() -> Vec<&'static str> {
    let mut ids: Vec<&str> = GROUPS.iter().flat_map(|(ids, _)| ids.iter().copied()).collect();
    ids.sort_unstable();
    ids
}

/// Runs every property check. Individual failures are reported, never
/// raised; only an invalid configuration is an error.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<Report>> {
    run_selected(cfg, |_| true)
}

/// Runs the checks whose id satisfies `keep`, ordered by check id.
pub fn run_selected(cfg: &SuiteConfig, keep: impl Fn(&str) -> bool) -> Result<Vec<Report>> {
    cfg.validate()?;
    let st = Streams::new(cfg);
    let mut out = Vec::new();
    for (ids, run) in GROUPS {
        if ids.iter().any(|id| keep(id)) {
            out.extend(run(&st)?.into_iter().filter(|r| keep(&r.check_id)));
        }
    }
    out.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    Ok(out)
}

/// The suite, the counterexamples and the Tsing report, ordered by check id.
pub fn verify_all(cfg: &SuiteConfig) -> Result<Vec<Report>> {
    let mut out = run_suite(cfg)?;
    out.extend(reproduce_counterexamples(Seed(cfg.seed))?);
    let m = ComplexMatrix::real_diag(&[1.0, 0.0]);
    out.push(tsing_center_report(&m, QParam::real(0.5)?, Seed(cfg.seed), cfg.tsing_center)?);
    out.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    Ok(out)
}

fn rotation_identity(st: &Streams) -> Result<Report> {
    let cfg = st.cfg;
    let qs = st.nonzero_qs();
    if qs.is_empty() {
        return Ok(Report::skip("rotation_identity", Seed(cfg.seed), "JtW_{e^{iθ}q}(T) = e^{iθ}JtW_q(T): the seed coupling needs q ≠ 0".into()));
    }
    let mut worst = Worst::max();
    for k in 0..cfg.instances {
        let mut inst = st.instance(1, k, &qs);
        let t = random::gaussian_tuple(&mut inst.rng, inst.n, inst.d);
        let theta = core::f64::consts::TAU * inst.rng.random::<f64>();
        let a = cloud_joint(&t, inst.q, cfg.samples, Seed(inst.seed), FieldMode::Complex)?;
        let b = cloud_joint(&t, inst.q.rotated(theta), cfg.samples, Seed(inst.seed), FieldMode::Complex)?;
        let rot = a.scaled(Complex64::from_polar(1.0, theta));
        let r = max_pointwise(&rot, &b) / (1.0 + tuple_norm(&t));
        worst.see(r, || {
            let mut w = tuple_witness(&t);
            w.push(Witness::scalar("theta", theta));
            w.push(Witness::values("q", &[inst.q.value()]));
            w
        });
    }
    Ok(worst.at_most(
        "rotation_identity",
        EXACT_SLACK,
        cfg.tolerances.identity,
        cfg.seed,
        format!("JtW_{{e^{{iθ}}q}}(T) = e^{{iθ}}JtW_q(T), seed-coupled, {} points per instance", cfg.samples),
    ))
}

fn adjoint_identity(st: &Streams) -> Result<Report> {
    let cfg = st.cfg;
    let mut worst = Worst::max();
    for k in 0..cfg.instances {
        let mut inst = st.instance(2, k, &st.qs);
        let t = random::gaussian_tuple(&mut inst.rng, inst.n, inst.d);
        let ta = adjoint_tuple(&t);
        let scale = 1.0 + tuple_norm(&t);
        for p in sample_sq(inst.n, inst.q, cfg.samples, Seed(inst.seed), FieldMode::Complex)? {
            let sw = p.swapped();
            let lhs = sw.point(&ta);
            let rhs: Vec<Complex64> = p.point(&t).iter().map(|c| c.conj()).collect();
            let r = (diff_norm(&lhs, &rhs) / scale).max(sw.residual());
            worst.see(r, || {
                let mut w = tuple_witness(&t);
                w.extend(pair_witness(&p));
                w
            });
        }
    }
    Ok(worst.at_most(
        "adjoint_identity",
        EXACT_SLACK,
        cfg.tolerances.identity,
        cfg.seed,
        "JtW_{q̄}(T*) = conj(JtW_q(T)): T* at (y, x) against T at (x, y)".into(),
    ))
}

fn affine_identity(st: &Streams) -> Result<Report> {
    let cfg = st.cfg;
    let mut worst = Worst::max();
    for k in 0..cfg.instances {
        let mut inst = st.instance(3, k, &st.qs);
        let t = random::gaussian_tuple(&mut inst.rng, inst.n, inst.d);
        let alpha = random::gaussian_complex(&mut inst.rng);
        let beta = random::gaussian_complex(&mut inst.rng);
        let ta = apply_affine(&t, alpha, beta);
        let scale = 1.0 + tuple_norm(&ta);
        let shift = beta * inst.q.value();
        for p in sample_sq(inst.n, inst.q, cfg.samples, Seed(inst.seed), FieldMode::Complex)? {
            let expect: Vec<Complex64> = p.point(&t).iter().map(|c| alpha * c + shift).collect();
            let r = diff_norm(&p.point(&ta), &expect) / scale;
            worst.see(r, || vec![Witness::values("alpha_beta", &[alpha, beta]), Witness::vector("x", &p.x), Witness::vector("y", &p.y)]);
        }
    }
    Ok(worst.at_most(
        "affine_identity",
        EXACT_SLACK,
        cfg.tolerances.identity,
        cfg.seed,
        "JtW_q(αT + βI) = αJtW_q(T) + (βq, …, βq), pointwise".into(),
    ))
}

fn unitary_invariance(st: &Streams) -> Result<Report> {
    let cfg = st.cfg;
    let mut worst = Worst::max();
    for k in 0..cfg.instances {
        let mut inst = st.instance(4, k, &st.qs);
        let t = random::gaussian_tuple(&mut inst.rng, inst.n, inst.d);
        let u = random::haar_unitary(&mut inst.rng, inst.n);
        let tu = t.unitary_conjugate(&u);
        let scale = 1.0 + tuple_norm(&t);
        let (mut est_t, mut est_tu) = (0.0f64, 0.0f64);
        for p in sample_sq(inst.n, inst.q, cfg.samples, Seed(inst.seed), FieldMode::Complex)? {
            let moved = p.transported(&u);
            let a = p.point(&tu);
            let b = moved.point(&t);
            est_tu = est_tu.max(point_norm(&a));
            est_t = est_t.max(point_norm(&b));
            let r = (diff_norm(&a, &b) / scale).max(moved.residual());
            worst.see(r, || vec![Witness::matrix("U", &u), Witness::vector("x", &p.x), Witness::vector("y", &p.y)]);
        }
        worst.see((est_t - est_tu).abs() / scale, || vec![Witness::matrix("U", &u), Witness::scalar("radius_gap", est_t - est_tu)]);
    }
    Ok(worst.at_most(
        "unitary_invariance",
        EXACT_SLACK,
        cfg.tolerances.identity,
        cfg.seed,
        "JtW_q(U*TU) = JtW_q(T): U*TU at (x, y) against T at (Ux, Uy), and matched radius estimates".into(),
    ))
}

fn product_structure(st: &Streams) -> Result<Report> {
    let cfg = st.cfg;
    let mut worst = Worst::max();
    for k in 0..cfg.instances {
        let mut inst = st.instance(5, k, &st.qs);
        let t = random::gaussian_tuple(&mut inst.rng, inst.n, inst.d);
        let a = cloud_joint(&t.with_identity(), inst.q, cfg.samples, Seed(inst.seed), FieldMode::Complex)?;
        let b = cloud_joint(&t, inst.q, cfg.samples, Seed(inst.seed), FieldMode::Complex)?;
        let scale = 1.0 + tuple_norm(&t);
        for (pa, pb) in a.points.iter().zip(&b.points) {
            let mut expect = pb.clone();
            expect.push(inst.q.value());
            let r = diff_norm(pa, &expect) / scale;
            worst.see(r, || vec![Witness::values("point", pa), Witness::values("expected", &expect)]);
        }
    }
    Ok(worst.at_most(
        "product_structure",
        EXACT_SLACK,
        cfg.tolerances.identity,
        cfg.seed,
        "JtW_q(T, I) = JtW_q(T) × {q}, pointwise".into(),
    ))
}

fn norm_dominance(st: &Streams) -> Result<Report> {
    let cfg = st.cfg;
    let mut worst = Worst::max();
    for k in 0..cfg.instances {
        let mut inst = st.instance(6, k, &st.qs);
        let t = random::gaussian_tuple(&mut inst.rng, inst.n, inst.d);
        let norm = tuple_norm(&t);
        let cl = cloud_joint(&t, inst.q, cfg.samples, Seed(inst.seed), FieldMode::Complex)?;
        worst.see((cl.max_norm() - norm) / (1.0 + norm), || {
            let mut w = tuple_witness(&t);
            w.push(Witness::scalar("max_norm", cl.max_norm()));
            w
        });
    }
    Ok(worst.at_most(
        "norm_dominance",
        0.0,
        cfg.tolerances.identity,
        cfg.seed,
        "‖p‖₂ ≤ ‖T‖ for every sampled p ∈ JtW_q(T), relative to 1 + ‖T‖".into(),
    ))
}

fn sandwich(st: &Streams) -> Result<Vec<Report>> {
    let cfg = st.cfg;
    let qs: Vec<QParam> = st.moduli().into_iter().filter(|q| q.modulus() > 0.0 && q.modulus() < 1.0).collect();
    if qs.is_empty() {
        return Ok(["sandwich_corrected_lower", "sandwich_paper_lower", "sandwich_upper"]
            .iter()
            .map(|id| Report::skip(id, Seed(cfg.seed), "the norm sandwich needs 0 < |q| < 1".into()))
            .collect());
    }
    let mut printed = Worst::min();
    let mut corrected = Worst::min();
    let mut upper = Worst::max();
    for k in 0..cfg.instances {
        let mut inst = st.instance(7, k, &qs);
        let t = random::gaussian_tuple(&mut inst.rng, inst.n, inst.d);
        let est = radius_joint(&t, inst.q, &cfg.opts(inst.seed))?;
        let b = sandwich_bounds(&t, inst.q.modulus())?;
        let wit = |label: &str, v: f64| {
            let mut w = tuple_witness(&t);
            w.push(Witness::scalar(label, v));
            w.extend(pair_witness(&est.witness));
            w
        };
        printed.see(est.value / b.paper_lower, || wit("paper_lower", b.paper_lower));
        corrected.see(est.value / b.corrected_lower, || wit("corrected_lower", b.corrected_lower));
        upper.see((est.value - b.upper) / (1.0 + b.upper), || wit("upper", b.upper));
    }
    let tol = cfg.tolerances.optimizer;
    Ok(vec![
        printed.at_least("sandwich_paper_lower", 1.0, tol, cfg.seed, "Jtω_q(T) ≥ q/(2√d(2−q²))·‖T‖; observed is the worst ratio".into()),
        corrected.at_least("sandwich_corrected_lower", 1.0, tol, cfg.seed, "Jtω_q(T) ≥ q/(2√d)·‖T‖; observed is the worst ratio".into()),
        upper.at_most("sandwich_upper", 0.0, cfg.tolerances.identity, cfg.seed, "Jtω_q(T) ≤ ‖T‖, relative to 1 + ‖T‖".into()),
    ])
}

fn radius_homogeneity(st: &Streams) -> Result<Report> {
    let cfg = st.cfg;
    let mut worst = Worst::max();
    for k in 0..cfg.instances {
        let mut inst = st.instance(8, k, &st.qs);
        let t = random::gaussian_tuple(&mut inst.rng, inst.n, inst.d);
        let xi = random::gaussian_complex(&mut inst.rng);
        let opts = cfg.opts(inst.seed);
        let a = radius_joint(&t.scale(xi), inst.q, &opts)?.value;
        let b = radius_joint(&t, inst.q, &opts)?.value;
        let r = (a - xi.norm() * b).abs() / (1.0 + xi.norm() * b);
        worst.see(r, || vec![Witness::values("xi", &[xi]), Witness::scalar("radius_scaled", a), Witness::scalar("radius", b)]);
    }
    Ok(worst.at_most(
        "radius_homogeneity",
        EXACT_SLACK,
        cfg.tolerances.identity,
        cfg.seed,
        "Jtω_q(ξT) = |ξ|·Jtω_q(T) under identical seeds and options".into(),
    ))
}

fn subadditivity(st: &Streams) -> Result<Report> {
    let cfg = st.cfg;
    let mut worst = Worst::max();
    for k in 0..cfg.instances {
        let mut inst = st.instance(9, k, &st.qs);
        let t = random::gaussian_tuple(&mut inst.rng, inst.n, inst.d);
        let s = random::gaussian_tuple(&mut inst.rng, inst.n, inst.d);
        let sum = t.add(&s)?;
        let scale = 1.0 + tuple_norm(&t) + tuple_norm(&s);
        let (mut et, mut es, mut esum) = (0.0f64, 0.0f64, 0.0f64);
        for p in sample_sq(inst.n, inst.q, cfg.samples, Seed(inst.seed), FieldMode::Complex)? {
            let (a, b, c) = (point_norm(&p.point(&t)), point_norm(&p.point(&s)), point_norm(&p.point(&sum)));
            et = et.max(a);
            es = es.max(b);
            esum = esum.max(c);
            worst.see((c - a - b) / scale, || pair_witness(&p));
        }
        worst.see((esum - et - es) / scale, || vec![Witness::values("estimates", &[Complex64::new(esum, 0.0), Complex64::new(et, 0.0), Complex64::new(es, 0.0)])]);
    }
    Ok(worst.at_most(
        "subadditivity",
        0.0,
        cfg.tolerances.identity,
        cfg.seed,
        "Jtω_q(T + S) ≤ Jtω_q(T) + Jtω_q(S) over a shared sample set".into(),
    ))
}

fn definiteness(st: &Streams) -> Result<Report> {
    let cfg = st.cfg;
    let qs = st.nonzero_qs();
    if qs.is_empty() {
        return Ok(Report::skip("definiteness", Seed(cfg.seed), "Jtω_q(T) = 0 ⟹ T = 0 is only claimed for q ≠ 0".into()));
    }
    let mut worst = Worst::min();
    for k in 0..cfg.instances {
        let mut inst = st.instance(10, k, &qs);
        let t = random::gaussian_tuple(&mut inst.rng, inst.n, inst.d);
        let est = radius_joint(&t, inst.q, &cfg.opts(inst.seed))?;
        let floor = inst.q.modulus() / (2.0 * (inst.d as f64).sqrt()) * tuple_norm(&t);
        worst.see(est.value / floor, || {
            let mut w = tuple_witness(&t);
            w.push(Witness::scalar("radius", est.value));
            w.push(Witness::scalar("floor", floor));
            w
        });
    }
    Ok(worst.at_least(
        "definiteness",
        1.0,
        cfg.tolerances.optimizer,
        cfg.seed,
        "q ≠ 0, T ≠ 0 ⟹ Jtω_q(T) ≥ |q|/(2√d)·‖T‖ > 0; observed is the worst ratio".into(),
    ))
}

fn spectral_inclusion(st: &Streams) -> Result<Report> {
    let cfg = st.cfg;
    let mut worst = Worst::max();
    for k in 0..cfg.instances {
        let mut inst = st.instance(11, k, &st.qs);
        let t = random::triangular_commuting_tuple(&mut inst.rng, inst.n, inst.d);
        let r = spectral_inclusion_check(&t, inst.q, 1e-8)?;
        let observed = 1e-8 - r.margin;
        worst.see(observed, || r.witnesses.clone().unwrap_or_default());
    }
    Ok(worst.at_most(
        "spectral_inclusion",
        1e-8,
        cfg.tolerances.identity,
        cfg.seed,
        "qσ_p(T) ⊆ JtW_q(T) for commuting T: worst witness residual".into(),
    ))
}

fn c_range(st: &Streams) -> Result<Vec<Report>> {
    let cfg = st.cfg;
    let qs = st.moduli();
    let tol = cfg.tolerances.monte_carlo;
    let n_big = cfg.dimensions.iter().copied().max().unwrap_or(3).max(3);
    let mut two = Worst::max();
    let mut padded = Worst::max();
    let mut rank_one = Worst::max();
    let mut independent = Vec::new();
    for k in 0..cfg.set_instances {
        for (n, w) in [(2usize, &mut two), (n_big, &mut padded)] {
            let mut inst = st.instance(12 + n as u64, k, &qs);
            let t = random::gaussian_tuple(&mut inst.rng, n, inst.d);
            let c = crange::q_to_c_matrix(inst.q, n)?;
            let a = crange::c_range_cloud(&t, &c, cfg.set_samples, Seed(inst.seed))?;
            let b = cloud_joint(&t, inst.q, cfg.set_samples, Seed(inst.seed), FieldMode::Complex)?;
            let h = hausdorff(&a, &b)?;
            if k == 0 {
                let other = cloud_joint(&t, inst.q, cfg.set_samples, Seed(inst.seed ^ 1), FieldMode::Complex)?;
                independent.push(hausdorff(&a, &other)?);
            }
            w.see(h, || {
                let mut wit = tuple_witness(&t);
                wit.push(Witness::values("q", &[inst.q.value()]));
                wit
            });
        }
        let mut inst = st.instance(30, k, &qs);
        let n = cfg.dimensions[k % cfg.dimensions.len()];
        let t = random::gaussian_tuple(&mut inst.rng, n, inst.d);
        let mu = random::gaussian_complex(&mut inst.rng);
        let c = crange::q_to_c_matrix(inst.q, n)?.scale(mu);
        let (mu_hat, q_hat) = crange::rank_one_parameters(&c)?;
        let a = crange::c_range_cloud(&t, &c, cfg.set_samples, Seed(inst.seed))?;
        // JtW_0(T) is invariant under joint rotation, so tr(C) = 0 leaves the
        // phase of μ free; the seed coupling needs the phase C was built with.
        let scale = if q_hat.modulus() == 0.0 { mu / mu.norm() * mu_hat.norm() } else { mu_hat };
        let b = cloud_joint(&t, q_hat, cfg.set_samples, Seed(inst.seed), FieldMode::Complex)?.scaled(scale);
        let h = hausdorff(&a, &b)?;
        rank_one.see(h, || vec![Witness::matrix("C", c.as_matrix()), Witness::values("mu_q", &[mu_hat, q_hat.value()])]);
    }
    let note = format!("independent-seed Hausdorff for reference: {independent:?}");
    Ok(vec![
        two.at_most("c_range_two_by_two", tol, 0.0, cfg.seed, format!("JtW_C(T) = JtW_q(T) for 2×2 C built from q; {note}")),
        padded.at_most("c_range_padded", tol, 0.0, cfg.seed, format!("JtW_C(T) = JtW_q(T) with C padded to n = {n_big}")),
        rank_one.at_most("c_range_rank_one", tol, 0.0, cfg.seed, "rank-one C: JtW_C(T) = μ·JtW_q(T) with (μ, q) recovered from C".into()),
    ])
}

fn random_blocks(rng: &mut ChaCha8Rng, d: usize, shape: Option<BlockShape>) -> [OperatorTuple; 4] {
    let b = 2;
    let zero = OperatorTuple::new(vec![ComplexMatrix::zeros(b); d]).expect("d ≥ 1");
    let mut g = || random::gaussian_tuple(rng, b, d);
    let (p, q, r, s) = (g(), g(), g(), g());
    match shape {
        None => [p, q, r, s],
        Some(BlockShape::UpperRow) => [p, q, zero.clone(), zero],
        Some(BlockShape::Diagonal) => [p, zero.clone(), zero, s],
        Some(BlockShape::OffDiagonal) => [zero.clone(), q, r, zero],
        Some(BlockShape::Symmetric) => [p.clone(), q.clone(), q, p],
    }
}

fn block_bounds(st: &Streams) -> Result<Vec<Report>> {
    let cfg = st.cfg;
    let mut lower = Worst::min();
    let mut upper = Worst::max();
    for k in 0..cfg.instances {
        let mut inst = st.instance(40, k, &st.qs);
        let [p, q_, r, s] = random_blocks(&mut inst.rng, inst.d, None);
        let opts = cfg.opts(inst.seed);
        let bounds = crange::block_bounds(&p, &q_, &r, &s, inst.q, &opts)?;
        let t = crange::assemble_blocks(&p, &q_, &r, &s)?;
        let est = crange::assembled_radius(&t, &bounds, inst.q, &opts)?;
        let wit = || {
            let mut w = tuple_witness(&t);
            w.push(Witness::values("lower_est_upper", &[bounds.lower, est.value, bounds.upper].map(|v| Complex64::new(v, 0.0))));
            w
        };
        lower.see((est.value - bounds.lower) / (1.0 + bounds.lower), wit);
        upper.see((est.value - bounds.upper) / (1.0 + bounds.upper), wit);
    }
    let mut out = vec![
        lower.at_least("block_bounds_lower", 0.0, cfg.tolerances.optimizer, cfg.seed, "max{Jtω_q(P), Jtω_q(S)} ≤ Jtω_q(T) for T = [[P, Q], [R, S]]".into()),
        upper.at_most("block_bounds_upper", 0.0, cfg.tolerances.identity, cfg.seed, "Jtω_q(T)² ≤ Σ_i (|q|/2·(ω(P_i) + ω(S_i) + √((ω(P_i) − ω(S_i))² + (‖R_i‖ + ‖Q_i‖)²)) + √(1−|q|²)·‖(P_i, Q_i, R_i, S_i)‖)²".into()),
    ];
    let shapes = [
        (BlockShape::UpperRow, "block_remark_upper_row", "T = [[P, Q], [0, 0]]"),
        (BlockShape::Diagonal, "block_remark_diagonal", "T = [[P, 0], [0, S]]: max{ω_q(P), ω_q(S)} ≤ ω_q(T) ≤ |q|max{ω(P), ω(S)} + √(1−|q|²)·√(‖P‖² + ‖S‖²)"),
        (BlockShape::OffDiagonal, "block_remark_off_diagonal", "T = [[0, Q], [R, 0]]"),
        (BlockShape::Symmetric, "block_remark_symmetric", "T = [[P, Q], [Q, P]]: ω_q(P) ≤ ω_q(T)"),
    ];
    for (i, (shape, id, claim)) in shapes.into_iter().enumerate() {
        let mut worst = Worst::min();
        for k in 0..cfg.instances {
            let mut inst = st.instance(41 + i as u64, k, &st.qs);
            let [p, q_, r, s] = random_blocks(&mut inst.rng, inst.d, Some(shape));
            let opts = cfg.opts(inst.seed);
            let bounds = crange::block_bounds(&p, &q_, &r, &s, inst.q, &opts)?;
            let t = crange::assemble_blocks(&p, &q_, &r, &s)?;
            let est = crange::assembled_radius(&t, &bounds, inst.q, &opts)?;
            let up = crange::shape_upper_sq(shape, &p, &q_, &r, &s, inst.q).sqrt();
            let mut margin = (up - est.value) / (1.0 + up);
            if shape != BlockShape::OffDiagonal {
                margin = margin.min((est.value - bounds.lower) / (1.0 + bounds.lower));
            }
            worst.see(margin, || {
                let mut w = tuple_witness(&t);
                w.push(Witness::values("lower_est_upper", &[bounds.lower, est.value, up].map(|v| Complex64::new(v, 0.0))));
                w
            });
        }
        out.push(worst.at_least(id, 0.0, cfg.tolerances.optimizer, cfg.seed, format!("{claim}; observed is the smallest relative slack")));
    }
    Ok(out)
}

/// One sampled cloud per convexity family, instance `k`, `count` points.
fn family_cloud(st: &Streams, family: usize, k: usize, count: usize) -> Result<(PointCloud, u64)> {
    let cfg = st.cfg;
    let mut inst = st.instance(50 + family as u64, k, &st.qs);
    let seed = Seed(inst.seed);
    let cloud = match family {
        0 => {
            let n = cfg.dimensions.iter().copied().max().unwrap_or(4);
            cloud_single(&random::gaussian_matrix(&mut inst.rng, n), inst.q, count, seed, FieldMode::Complex)?
        }
        1 => cloud_joint(&random::commuting_tuple(&mut inst.rng, 2, inst.d.max(2)), inst.q, count, seed, FieldMode::Complex)?,
        2 => {
            let t = random::gaussian_matrix(&mut inst.rng, inst.n);
            let parts = (0..inst.d.max(2))
                .map(|_| {
                    let a = random::gaussian_complex(&mut inst.rng);
                    let b = random::gaussian_complex(&mut inst.rng);
                    &t.scale(a) + &ComplexMatrix::identity(inst.n).scale(b)
                })
                .collect();
            cloud_joint(&OperatorTuple::new(parts)?, inst.q, count, seed, FieldMode::Complex)?
        }
        _ => {
            let n = inst.n + 1;
            let s = build_aspace(&random::psd_matrix(&mut inst.rng, n, n - 1), DEFAULT_RANK_TOL)?;
            let m = random::kernel_preserving_matrix(&mut inst.rng, &s);
            match sh::cloud_qa(&m, &s, inst.q, count, seed, &[])? {
                QARangeResult::Cloud(c) => c,
                QARangeResult::FullPlane(_) => return Err(Error::Infeasible("kernel-preserving operator reported as full plane")),
            }
        }
    };
    Ok((cloud, inst.seed))
}

const FAMILIES: [(&str, &str); 4] = [
    ("convexity_single", "W_q(T) is convex (single operator)"),
    ("convexity_commuting_2x2", "JtW_q(T) is convex for commuting 2×2 tuples"),
    ("convexity_span", "JtW_q(a_1T + b_1I, …, a_dT + b_dI) is convex"),
    ("convexity_semi_hilbert", "W_{q,A}(T) is convex when T(N(A)) ⊆ N(A)"),
];

fn convexity(st: &Streams) -> Result<Vec<Report>> {
    let cfg = st.cfg;
    let mut out = Vec::new();
    let mut decrease = Worst::max();
    let small = (cfg.set_samples / 10).max(10);
    for (family, (id, claim)) in FAMILIES.iter().enumerate() {
        let mut worst = Worst::max();
        for k in 0..cfg.set_instances {
            let (cloud, seed) = family_cloud(st, family, k, cfg.set_samples)?;
            let defect = convexity_defect(&cloud, cfg.defect_pairs, Seed(seed))?;
            if k == 0 {
                let (coarse, _) = family_cloud(st, family, k, small)?;
                let coarse_defect = convexity_defect(&coarse, cfg.defect_pairs, Seed(seed))?;
                decrease.see(defect - coarse_defect, || vec![Witness::scalar(&format!("{id}_coarse"), coarse_defect), Witness::scalar(&format!("{id}_fine"), defect)]);
            }
            worst.see(defect, || vec![Witness::scalar("defect", defect)]);
        }
        out.push(worst.at_most(id, cfg.tolerances.convexity, 0.0, cfg.seed, format!("{claim}; {} points, {} midpoint pairs", cfg.set_samples, cfg.defect_pairs)));
    }
    out.push(decrease.at_most(
        "convexity_decreases",
        0.0,
        0.0,
        cfg.seed,
        format!("convexity defect at {} points ≤ defect at {small} points, every family", cfg.set_samples),
    ));
    Ok(out)
}

fn semi_hilbert(st: &Streams) -> Result<Vec<Report>> {
    let cfg = st.cfg;
    let tol = cfg.tolerances.identity;
    let mut reduction = Worst::max();
    let mut calculus = Worst::max();
    let mut escape = Worst::min();
    let mut compression = Worst::max();
    for k in 0..cfg.instances {
        let mut inst = st.instance(60, k, &st.qs);
        let n = inst.n;
        let ident = build_aspace(&ComplexMatrix::identity(n), DEFAULT_RANK_TOL)?;
        let m = random::gaussian_matrix(&mut inst.rng, n);
        let a = match sh::cloud_qa(&m, &ident, inst.q, cfg.samples, Seed(inst.seed), &[])? {
            QARangeResult::Cloud(c) => c,
            QARangeResult::FullPlane(_) => return Err(Error::Infeasible("A = I reported a kernel escape")),
        };
        let b = cloud_single(&m, inst.q, cfg.samples, Seed(inst.seed), FieldMode::Complex)?;
        let scale = 1.0 + m.spectral_norm();
        let opts = cfg.opts(inst.seed);
        let ra = sh::radius_qa(&m, &ident, inst.q, &opts)?.value();
        let rb = radius_joint(&OperatorTuple::single(m.clone()), inst.q, &opts)?.value;
        reduction.see((max_pointwise(&a, &b) / scale).max((ra - rb).abs() / scale), || vec![Witness::matrix("M", m.as_matrix())]);

        let big = n + 1;
        let rank = big - 1 - k % 2;
        let s = build_aspace(&random::psd_matrix(&mut inst.rng, big, rank.max(2)), DEFAULT_RANK_TOL)?;
        let m1 = random::kernel_preserving_matrix(&mut inst.rng, &s);
        let m2 = random::kernel_preserving_matrix(&mut inst.rng, &s);
        let alpha = random::gaussian_complex(&mut inst.rng);
        let s1 = sh::a_adjoint(&m1, &s)?;
        let s2 = sh::a_adjoint(&m2, &s)?;
        let am = s.a().as_matrix();
        let nrm = 1.0 + m1.frobenius_norm() * (1.0 + am.norm()) + m2.frobenius_norm() * (1.0 + alpha.norm());
        let defining = linalg::frobenius(&(am * s1.as_matrix() - m1.adjoint().as_matrix() * am));
        let lin = sh::a_adjoint(&(&m1 + &m2.scale(alpha)), &s)?;
        let linear = (&lin - &(&s1 + &s2.scale(alpha.conj()))).frobenius_norm();
        let prod = sh::a_adjoint(&(&m1 * &m2), &s)?;
        let product = (&prod - &(&s2 * &s1)).frobenius_norm() / (1.0 + s1.frobenius_norm() * s2.frobenius_norm());
        calculus.see((defining / nrm).max(linear / nrm).max(product), || vec![Witness::matrix("A", am), Witness::matrix("M", m1.as_matrix()), Witness::matrix("N", m2.as_matrix())]);

        let leaky = random::gaussian_matrix(&mut inst.rng, big);
        match sh::cloud_qa(&leaky, &s, inst.q, 10, Seed(inst.seed), &[])? {
            QARangeResult::FullPlane(cert) => {
                let ok = if cert.is_strictly_increasing() { cert.max_modulus() } else { 0.0 };
                escape.see(ok, || vec![Witness::matrix("M", leaky.as_matrix()), Witness::scalar("max_modulus", cert.max_modulus())]);
            }
            QARangeResult::Cloud(_) => escape.see(0.0, || vec![Witness::matrix("M", leaky.as_matrix())]),
        }

        if k < cfg.set_instances {
            let c = sh::compress_to_range(&m1, &s)?;
            let s_prime = build_aspace(&c.a_prime, DEFAULT_RANK_TOL)?;
            let full = sh::cloud_qa(&m1, &s, inst.q, cfg.set_samples, Seed(inst.seed), &[])?;
            let comp = sh::cloud_qa(&c.t_prime, &s_prime, inst.q, cfg.set_samples, Seed(inst.seed), &[])?;
            if let (QARangeResult::Cloud(f), QARangeResult::Cloud(g)) = (full, comp) {
                let h = hausdorff(&f, &g)?;
                compression.see(h, || vec![Witness::matrix("A", am), Witness::matrix("M", m1.as_matrix())]);
            } else {
                compression.see(f64::INFINITY, || vec![Witness::matrix("M", m1.as_matrix())]);
            }
        }
    }
    Ok(vec![
        reduction.at_most("semi_hilbert_reduction", EXACT_SLACK, tol, cfg.seed, "A = I: W_{q,A} and w_{q,A} coincide with W_q and ω_q under matched seeds".into()),
        calculus.at_most("a_adjoint_calculus", EXACT_SLACK, tol, cfg.seed, "A·T♯ = T*·A, (T + αS)♯ = T♯ + ᾱS♯, (TS)♯ = S♯T♯ on kernel-preserving inputs".into()),
        escape.at_least("kernel_escape_full_plane", 1e3, 0.0, cfg.seed, "T(N(A)) ⊄ N(A) ⟹ W_{q,A}(T) = ℂ: certificate strictly increasing in κ, largest modulus".into()),
        compression.at_most("compression_equality", cfg.tolerances.monte_carlo, 0.0, cfg.seed, "W_{q,A}(T) = W_{q,A'}(T') for the compression to range(A)".into()),
    ])
}

fn triangle(st: &Streams) -> Result<Vec<Report>> {
    let cfg = st.cfg;
    let qs: Vec<QParam> = st.qs.iter().copied().filter(|q| !q.is_unimodular()).collect();
    let qs = if qs.is_empty() { vec![QParam::real(0.6)?] } else { qs };
    let s = build_aspace(&ComplexMatrix::real_diag(&[2.0, 1.0, 1.0]), DEFAULT_RANK_TOL)?;
    let mut same = Worst::max();
    let mut implication = Worst::max();
    let mut pairs = Vec::new();
    for k in 0..cfg.instances {
        let mut inst = st.instance(70, k, &qs);
        let opts = cfg.opts(inst.seed);
        let mt = random::gaussian_matrix(&mut inst.rng, 3);
        let g = sh::triangle_equality_gap(&mt, &mt, &s, inst.q, &opts)?;
        same.see(g.gap.abs().max((g.cross_sup - g.w_t * g.w_t).abs()), || vec![Witness::matrix("T", mt.as_matrix())]);

        let ms = if k % 3 == 0 {
            mt.scale(Complex64::new(0.5 + inst.rng.random::<f64>(), 0.0))
        } else {
            random::gaussian_matrix(&mut inst.rng, 3)
        };
        let g = sh::triangle_equality_gap(&mt, &ms, &s, inst.q, &opts)?;
        let product = g.w_t * g.w_s;
        let miss = (g.cross_sup - product).abs() - 1e-3 * product;
        let violation = if g.gap < 1e-4 { miss } else { f64::NEG_INFINITY };
        implication.see(violation.max(-g.gap - 1e-8), || vec![Witness::matrix("T", mt.as_matrix()), Witness::matrix("S", ms.as_matrix()), Witness::scalar("gap", g.gap), Witness::scalar("cross_minus_product", g.cross_sup - product)]);
        pairs.push((g.gap, (g.cross_sup - product).abs() / product.max(1e-300)));
    }
    let small = pairs.iter().filter(|p| p.0 < 1e-4).count();
    let corr = correlation(&pairs);
    if implication.value == f64::NEG_INFINITY {
        implication.value = -1.0;
    }
    Ok(vec![
        same.at_most("triangle_equality_self", 1e-6, 0.0, cfg.seed, "S = T: w_{q,A}(2T) = 2w_{q,A}(T) and sup ℜ(⟨y,Tx⟩_A⟨Tx,y⟩_A) = w_{q,A}(T)²".into()),
        implication.at_most(
            "triangle_equality_implication",
            0.0,
            0.0,
            cfg.seed,
            format!("gap < 1e-4 ⟹ |cross_sup − w_T·w_S| < 1e-3·w_T·w_S, and gap ≥ −1e-8; {small} of {} pairs had a small gap; corr(gap, relative cross deficit) = {corr:.4}", pairs.len()),
        ),
    ])
}

fn correlation(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let (mx, my) = pairs.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 / n, b + p.1 / n));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// `T₁ = diag(z₁, 0)`, `T₂ = [[0, 0], [z₂, 0]]` with `z₁ = z₂ = 1`.
pub fn example_tuple() -> OperatorTuple {
    OperatorTuple::new(vec![
        ComplexMatrix::real_diag(&[1.0, 0.0]),
        ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).expect("square"),
    ])
    .expect("two parts")
}

/// `T₁ = [[0, m], [m, 0]]`, `T₂ = diag(m, 0)`.
pub fn self_adjoint_tuple(m: f64) -> OperatorTuple {
    OperatorTuple::new(vec![
        ComplexMatrix::from_real_rows(&[&[0.0, m], &[m, 0.0]]).expect("square"),
        ComplexMatrix::real_diag(&[m, 0.0]),
    ])
    .expect("two parts")
}

fn cvec(v: &[f64]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|&x| Complex64::new(x, 0.0)))
}

fn pair_xy(x: CVector, y: CVector, q: QParam) -> Result<SqPair> {
    let z = if q.is_unimodular() {
        None
    } else {
        Some((&y - &x * q.value().conj()) / Complex64::new(q.complement(), 0.0))
    };
    pair_from_xz(&x, z.as_ref(), q)
}

fn re(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

/// Checks that each `(pair, target)` reaches its target and returns the
/// cloud with the witness points appended.
fn attained(
    id: &str,
    t: &OperatorTuple,
    mut cloud: PointCloud,
    witnesses: &[(SqPair, Vec<Complex64>)],
    seed: Seed,
    claim: &str,
) -> (Report, PointCloud) {
    let mut worst = 0.0f64;
    let mut wit = Vec::new();
    for (p, target) in witnesses {
        let point = p.point(t);
        cloud.points.push(point.clone());
        cloud.meta.sample_count += 1;
        worst = worst.max(diff_norm(&point, target)).max(p.residual());
        wit.extend(pair_witness(p));
        wit.push(Witness::values("point", &point));
    }
    let with_witnesses = cloud.clone();
    for (_, target) in witnesses {
        let d = min_distance(&with_witnesses, target).unwrap_or(f64::INFINITY);
        worst = worst.max(d);
    }
    let rep = Report::at_most(id, worst, 1e-8, 0.0, seed, witnesses.len(), claim.into(), wit);
    (rep, cloud)
}

fn gap_report(id: &str, cloud: &PointCloud, target: &[Complex64], delta: f64, seed: Seed, claim: &str) -> Result<Report> {
    let d = min_distance(cloud, target)?;
    Ok(Report::at_least(
        id,
        d,
        delta,
        0.0,
        seed,
        cloud.len(),
        format!("{claim}: distance {d:.6} ≥ δ = {delta}"),
        vec![Witness::values("target", target), Witness::scalar("distance", d)],
    ))
}

/// The non-convexity examples: attained points, certified gaps at their
/// midpoints, and the complex-mode rerun of the real example.
pub fn reproduce_counterexamples(seed: Seed) -> Result<Vec<Report>> {
    let mut out = Vec::new();
    let t = example_tuple();
    let s3 = 3f64.sqrt();

    let q = QParam::real(0.5)?;
    let cloud = cloud_joint(&t, q, COUNTEREXAMPLE_SAMPLES, seed, FieldMode::Complex)?;
    let e1 = cvec(&[1.0, 0.0]);
    let e2 = cvec(&[0.0, 1.0]);
    let witnesses = [
        (pair_xy(cvec(&[0.5, s3 / 2.0]), e1.clone(), q)?, re(&[0.5, 0.0])),
        (pair_xy(e2.clone(), &e2 * Complex64::new(0.5, 0.0) + &e1 * Complex64::new(0.75f64.sqrt(), 0.0), q)?, re(&[0.0, 0.0])),
    ];
    let (rep, cloud) = attained("example_q_half_attained", &t, cloud, &witnesses, seed, "(q, 0) and (0, 0) ∈ JtW_q(T₁, T₂) for q = 1/2");
    out.push(rep);
    let mid = re(&[0.25, 0.0]);
    out.push(gap_report("example_q_half_gap", &cloud, &mid, DELTA_EXAMPLE_Q_HALF, seed, "(q/2, 0) ∉ JtW_q(T₁, T₂)")?);
    let diam = geometry::diameter(&cloud.real_coords());
    let defect = convexity_defect_with_pairs(&cloud, &[(witnesses[0].1.clone(), witnesses[1].1.clone())])?;
    out.push(Report::at_least(
        "example_q_half_defect",
        defect,
        DELTA_EXAMPLE_Q_HALF / diam,
        0.0,
        seed,
        cloud.len(),
        format!("convexity defect at the pair (q, 0), (0, 0) ≥ δ/diameter = {:.6}", DELTA_EXAMPLE_Q_HALF / diam),
        vec![Witness::scalar("defect", defect), Witness::scalar("diameter", diam)],
    ));

    let q0 = QParam::real(0.0)?;
    let cloud = cloud_joint(&t, q0, COUNTEREXAMPLE_SAMPLES, seed, FieldMode::Complex)?;
    let perp = |x: &CVector, phase: f64| CVector::from_vec(vec![-x[1].conj() * phase, x[0].conj() * phase]);
    let xa = cvec(&[0.5, s3 / 2.0]);
    let xb = cvec(&[s3 / 2.0, -0.5]);
    let witnesses = [
        (pair_xy(xa.clone(), perp(&xa, -1.0), q0)?, re(&[s3 / 4.0, -0.25])),
        (pair_xy(xb.clone(), perp(&xb, 1.0), q0)?, re(&[s3 / 4.0, 0.75])),
    ];
    let (rep, cloud) = attained("example_q_zero_attained", &t, cloud, &witnesses, seed, "(√3/4, −1/4) and (√3/4, 3/4) ∈ JtW_0(T₁, T₂)");
    out.push(rep);
    out.push(gap_report("example_q_zero_gap", &cloud, &re(&[s3 / 4.0, 0.0]), DELTA_EXAMPLE_Q_ZERO, seed, "(√3/4, 0) ∉ JtW_0(T₁, T₂)")?);

    let t = self_adjoint_tuple(1.0);
    let q = QParam::real(0.5)?;
    let cloud = cloud_joint(&t, q, COUNTEREXAMPLE_SAMPLES, seed, FieldMode::Real)?;
    let real_pair = |sum: f64| {
        let delta = core::f64::consts::FRAC_PI_3;
        let (a, b) = ((sum + delta) / 2.0, (sum - delta) / 2.0);
        pair_xy(cvec(&[a.cos(), a.sin()]), cvec(&[b.cos(), b.sin()]), q)
    };
    let witnesses = [
        (real_pair(2.0 * core::f64::consts::FRAC_PI_3)?, re(&[s3 / 2.0, 0.0])),
        (real_pair(-core::f64::consts::FRAC_PI_3)?, re(&[-s3 / 2.0, 0.5])),
    ];
    let (rep, cloud) = attained("remark_real_attained", &t, cloud, &witnesses, seed, "(m√(1−q²), 0) and (−m√(1−q²), mq) ∈ JtW_q(T₁, T₂) over ℝ², m = 1, q = 1/2");
    out.push(rep);
    let mid = re(&[0.0, 0.25]);
    out.push(gap_report("remark_real_gap", &cloud, &mid, DELTA_REMARK_REAL, seed, "(0, mq/2) ∉ JtW_q(T₁, T₂) over ℝ²")?);

    let complex = cloud_joint(&t, q, COUNTEREXAMPLE_SAMPLES, seed, FieldMode::Complex)?;
    let d = min_distance(&complex, &mid)?;
    let mut info = Report::skip(
        "remark_complex_distance",
        seed,
        format!("over ℂ² the distance from (0, mq/2) to the sampled range is {d:.6}; no verdict, the claim concerns ℝ²"),
    );
    info.samples = complex.len();
    info.witnesses = Some(vec![Witness::scalar("distance", d)]);
    out.push(info);
    Ok(out)
}

fn tsing_hausdorff(direct: &PointCloud, disks: &[range::Disk], seed: Seed) -> Result<f64> {
    let union = range::disk_union_cloud(disks, TSING_PER_DISK, seed)?;
    hausdorff(direct, &union)
}

/// Compares the sampled `W_q(M)` with the union of Tsing disks centered at
/// `q⟨Mx, x⟩` and at `⟨Mx, x⟩`; passes iff the corrected union is close.
pub fn tsing_typo_report(m: &ComplexMatrix, q: QParam, seed: Seed) -> Result<Report> {
    tsing_center_report(m, q, seed, TsingCenter::Corrected)
}

/// As [`tsing_typo_report`], judged on the chosen center.
pub fn tsing_center_report(m: &ComplexMatrix, q: QParam, seed: Seed, judged: TsingCenter) -> Result<Report> {
    if q.modulus() == 0.0 {
        return Err(Error::InvalidQ(0.0));
    }
    let direct = cloud_single(m, q, TSING_SAMPLES, seed, FieldMode::Complex)?;
    let corrected = range::tsing_disks(m, q, TSING_DISKS, Seed(seed.0 ^ 0x5151));
    let printed: Vec<range::Disk> = corrected
        .iter()
        .map(|d| range::Disk {
            center: d.center / q.value(),
            radius: d.radius,
        })
        .collect();
    let h_corr = tsing_hausdorff(&direct, &corrected, seed)?;
    let h_print = tsing_hausdorff(&direct, &printed, seed)?;
    let observed = match judged {
        TsingCenter::Corrected => h_corr,
        TsingCenter::Printed => h_print,
    };
    let which = match judged {
        TsingCenter::Corrected => "q⟨Mx,x⟩",
        TsingCenter::Printed => "⟨Mx,x⟩",
    };
    Ok(Report::at_most(
        "tsing_center",
        observed,
        0.05,
        0.0,
        seed,
        direct.len(),
        format!("W_q(M) against the union of Tsing disks; judged on center {which}; Hausdorff with center q⟨Mx,x⟩ = {h_corr:.6}, with center ⟨Mx,x⟩ = {h_print:.6}"),
        vec![Witness::scalar("hausdorff_corrected", h_corr), Witness::scalar("hausdorff_printed", h_print), Witness::values("q", &[q.value()])],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counterexamples_pass() {
        let reps = reproduce_counterexamples(Seed(7)).unwrap();
        for r in &reps {
            assert!(!r.failed(), "{r:?}");
        }
        assert_eq!(reps.len(), 8);
    }

    #[test]
    fn tsing_identity_case() {
        let q = QParam::real(0.3).unwrap();
        let r = tsing_typo_report(&ComplexMatrix::identity(2), q, Seed(1)).unwrap();
        let w = r.witnesses.unwrap();
        assert!(w[0].rows[0][0].re < 1e-12);
        assert!((w[1].rows[0][0].re - 0.7).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(SuiteConfig::default().validate().is_ok());
        let mut c = SuiteConfig::default();
        c.q_values = vec![Complex64::new(1.5, 0.0)];
        assert!(c.validate().is_err());
        let mut c = SuiteConfig::default();
        c.dimensions = vec![1];
        assert!(c.validate().is_err());
    }
}
