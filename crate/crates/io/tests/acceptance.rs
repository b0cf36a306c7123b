//! Acceptance run: one PASS/FAIL line per criterion, pinned tolerances.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::panic;
use std::time::Instant;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use qrange_core::crange::{assemble_blocks, assembled_radius, block_bounds, c_range_cloud, q_to_c_matrix, rank_one_parameters};
use qrange_core::geometry::hausdorff;
use qrange_core::model::tuple_norm;
use qrange_core::optimize::{radius_joint, RadiusOptions};
use qrange_core::random;
use qrange_core::range::{cloud_joint, cloud_single, point_norm, sandwich_bounds};
use qrange_core::report::{Report, Status, Witness};
use qrange_core::sampler::pair_rng;
use qrange_core::spectrum::{default_tol, joint_point_spectrum, spectral_inclusion_check};
use qrange_core::verify::{reproduce_counterexamples, run_selected, tsing_center_report, SuiteConfig, TsingCenter, EXACT_SLACK};
use qrange_core::{ComplexMatrix, FieldMode, OperatorTuple, QParam, Seed};

const SEED: u64 = 42;

const EXACT_TOL: f64 = 1e-12;
const RADIUS_TOL: f64 = 1e-3;
const MEMBERSHIP_TOL: f64 = 1e-8;
const NORM_SLACK: f64 = 1e-10;
const IDENTITY_TOL: f64 = 1e-10;
const SPECTRAL_TOL: f64 = 1e-8;
const HAUSDORFF_TOL: f64 = 0.05;
const REMARK_TOL: f64 = 1e-3;
const CONVEXITY_TOL: f64 = 0.02;
const ESCAPE_MODULUS: f64 = 1e3;
const TRIANGLE_TOL: f64 = 1e-6;
const TSING_CORRECTED: f64 = 0.05;
const TSING_PRINTED: f64 = 0.2;

type Outcome = Result<(bool, String), String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn q(re: f64, im: f64) -> QParam {
    QParam::new(Complex64::new(re, im)).expect("|q| ≤ 1")
}

fn rng(criterion: u64, k: u64) -> ChaCha8Rng {
    pair_rng(Seed(SEED), (criterion << 32) | k)
}

/// Observed value of an upper-bound report whose bound is `bound`.
fn observed_at_most(r: &Report, bound: f64) -> f64 {
    bound - r.margin
}

fn scalar(r: &Report, label: &str) -> Option<f64> {
    r.witnesses.as_ref()?.iter().find(|w: &&Witness| w.label == label).map(|w| w.rows[0][0].re)
}

fn c1_degenerate() -> Outcome {
    let mut worst = 0.0f64;
    for n in [2usize, 3, 5] {
        for qv in [q(0.0, 0.0), q(0.5, 0.0), q(0.0, FRAC_1_SQRT_2), q(1.0, 0.0)] {
            let cloud = cloud_single(&ComplexMatrix::identity(n), qv, 2_000, Seed(SEED), FieldMode::Complex).map_err(err)?;
            for p in &cloud.points {
                worst = worst.max((p[0] - qv.value()).norm());
            }
        }
    }
    Ok((worst < EXACT_TOL, format!("max |w − q| = {worst:.2e} (< {EXACT_TOL:.0e})")))
}

/// `max |q cos²θ + √(1−q²) cosθ sinθ e^{iφ}|` over a dense grid: the Tsing
/// disks of diag(1,0) swept over unit x = (cosθ, sinθ).
fn grid_radius_diag10(qv: f64) -> f64 {
    let s = (1.0 - qv * qv).max(0.0).sqrt();
    let (nt, np) = (2_001, 720);
    let mut best = 0.0f64;
    for i in 0..nt {
        let th = 0.5 * PI * i as f64 / (nt - 1) as f64;
        let (c, sn) = (th.cos(), th.sin());
        for j in 0..np {
            let ph = 2.0 * PI * j as f64 / np as f64;
            let v = Complex64::new(qv * c * c, 0.0) + Complex64::from_polar(s * c * sn, ph);
            best = best.max(v.norm());
        }
    }
    best
}

fn c2_radius_oracle() -> Outcome {
    let t = OperatorTuple::single(ComplexMatrix::real_diag(&[1.0, 0.0]));
    let mut ok = true;
    let mut parts = Vec::new();
    for qv in [0.0, 0.3, 0.7, 1.0] {
        let exact = (1.0 + qv) / 2.0;
        let est = radius_joint(&t, q(qv, 0.0), &RadiusOptions::with_seed(SEED)).map_err(err)?;
        let grid = grid_radius_diag10(qv);
        ok &= (est.value - exact).abs() < RADIUS_TOL && (grid - exact).abs() < RADIUS_TOL;
        parts.push(format!("q={qv}: est {:.6} grid {:.6} exact {exact:.6}", est.value, grid));
    }
    Ok((ok, parts.join("; ")))
}

fn c3_counterexamples() -> Outcome {
    let reps = reproduce_counterexamples(Seed(SEED)).map_err(err)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for r in &reps {
        let expected_skip = r.check_id == "remark_complex_distance";
        let good = if expected_skip { r.status == Status::Skip } else { r.status == Status::Pass };
        ok &= good;
        if r.check_id.ends_with("_attained") {
            let resid = observed_at_most(r, MEMBERSHIP_TOL);
            ok &= resid < MEMBERSHIP_TOL;
            parts.push(format!("{} residual {resid:.1e}", r.check_id));
        } else {
            parts.push(format!("{} {:?} margin {:+.4}", r.check_id, r.status, r.margin));
        }
    }
    ok &= reps.len() == 8;
    Ok((ok, parts.join("; ")))
}

fn c4_sandwich() -> Outcome {
    let (ns, qs) = ([2usize, 3, 4], [0.2, 0.5, 0.9]);
    let (mut norm_slack, mut printed_ratio, mut corrected_ratio) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for k in 0..100u64 {
        let mut r = rng(4, k);
        let n = ns[k as usize % 3];
        let d = 1 + (k as usize / 3) % 4;
        let qv = qs[(k as usize / 12) % 3];
        let t = random::gaussian_tuple(&mut r, n, d);
        let norm = tuple_norm(&t);
        let cloud = cloud_joint(&t, q(qv, 0.0), 2_000, Seed(SEED + k), FieldMode::Complex).map_err(err)?;
        norm_slack = norm_slack.min(norm + NORM_SLACK - cloud.points.iter().map(|p| point_norm(p)).fold(0.0, f64::max));
        let est = radius_joint(&t, q(qv, 0.0), &RadiusOptions { restarts: 8, ..RadiusOptions::with_seed(SEED + k) }).map_err(err)?;
        let b = sandwich_bounds(&t, qv).map_err(err)?;
        printed_ratio = printed_ratio.min(est.value / b.paper_lower);
        corrected_ratio = corrected_ratio.min(est.value / b.corrected_lower);
    }
    let ok = norm_slack >= 0.0 && printed_ratio >= 1.0 && corrected_ratio >= 1.0;
    Ok((
        ok,
        format!("min (‖T‖ + 1e-10 − max point norm) = {norm_slack:.3e}; min est/paper_lower = {printed_ratio:.3}; min est/corrected_lower = {corrected_ratio:.3}"),
    ))
}

fn c5_identities() -> Outcome {
    let cfg = SuiteConfig { instances: 50, ..SuiteConfig::default() };
    let ids = ["rotation_identity", "adjoint_identity", "affine_identity", "unitary_invariance", "product_structure"];
    let reps = run_selected(&cfg, |id| ids.contains(&id)).map_err(err)?;
    let mut ok = reps.len() == ids.len();
    let mut parts = Vec::new();
    for r in &reps {
        let resid = observed_at_most(r, EXACT_SLACK);
        ok &= r.status == Status::Pass && resid < IDENTITY_TOL;
        parts.push(format!("{} {resid:.1e}", r.check_id));
    }
    Ok((ok, parts.join("; ")))
}

fn c6_spectral() -> Outcome {
    let qs = [0.2, 0.5, 0.9, 1.0, 0.0];
    let (mut max_resid, mut all_pass, mut points) = (0.0f64, true, 0usize);
    for k in 0..25u64 {
        let mut r = rng(6, k);
        let n = 2 + k as usize % 4;
        let d = 1 + (k as usize / 4) % 3;
        let t = random::triangular_commuting_tuple(&mut r, n, d);
        let tol = default_tol(&t);
        for p in joint_point_spectrum(&t, tol).map_err(err)? {
            max_resid = max_resid.max(p.residual);
            points += 1;
        }
        let rep = spectral_inclusion_check(&t, q(qs[k as usize % qs.len()], 0.0), tol).map_err(err)?;
        all_pass &= rep.status == Status::Pass;
    }
    Ok((all_pass && max_resid < SPECTRAL_TOL, format!("{points} joint eigenvalues, max witness residual {max_resid:.2e}; inclusion reports all pass: {all_pass}")))
}

fn c7_c_range() -> Outcome {
    let count = 10_000;
    let (mut worst, mut worst_rank_one, mut worst_indep) = (0.0f64, 0.0f64, 0.0f64);
    let mut k = 0u64;
    for n in [2usize, 3] {
        for d in [1usize, 2] {
            for qv in [0.4, 0.8] {
                k += 1;
                let mut r = rng(7, k);
                let t = random::gaussian_tuple(&mut r, n, d);
                let qp = q(qv, 0.0);
                let seed = Seed(SEED + k);
                let c = q_to_c_matrix(qp, n).map_err(err)?;
                let a = c_range_cloud(&t, &c, count, seed).map_err(err)?;
                let b = cloud_joint(&t, qp, count, seed, FieldMode::Complex).map_err(err)?;
                worst = worst.max(hausdorff(&a, &b).map_err(err)?);
                let other = cloud_joint(&t, qp, count, Seed(seed.0 ^ 1), FieldMode::Complex).map_err(err)?;
                worst_indep = worst_indep.max(hausdorff(&a, &other).map_err(err)?);
                let mu = random::gaussian_complex(&mut r);
                let c1 = c.scale(mu);
                let (mu_hat, q_hat) = rank_one_parameters(&c1).map_err(err)?;
                let a1 = c_range_cloud(&t, &c1, count, seed).map_err(err)?;
                let b1 = cloud_joint(&t, q_hat, count, seed, FieldMode::Complex).map_err(err)?.scaled(mu_hat);
                worst_rank_one = worst_rank_one.max(hausdorff(&a1, &b1).map_err(err)?);
            }
        }
    }
    let ok = worst <= HAUSDORFF_TOL && worst_rank_one <= HAUSDORFF_TOL;
    Ok((
        ok,
        format!("matched-seed Hausdorff max {worst:.2e}, rank-one max {worst_rank_one:.2e} (≤ {HAUSDORFF_TOL}); independent-seed max {worst_indep:.3} for reference"),
    ))
}

fn c8_blocks() -> Outcome {
    let qs = [0.3, 0.6, 0.9];
    let (mut lower_margin, mut upper_margin, mut diag_gap) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for k in 0..50u64 {
        let mut r = rng(8, k);
        let d = 1 + k as usize % 2;
        let qp = q(qs[(k as usize / 2) % 3], 0.0);
        let opts = RadiusOptions { restarts: 8, ..RadiusOptions::with_seed(SEED + k) };
        let [p, q_, rr, s] = [0; 4].map(|_| random::gaussian_tuple(&mut r, 2, d));
        let bounds = block_bounds(&p, &q_, &rr, &s, qp, &opts).map_err(err)?;
        let t = assemble_blocks(&p, &q_, &rr, &s).map_err(err)?;
        let est = assembled_radius(&t, &bounds, qp, &opts).map_err(err)?;
        lower_margin = lower_margin.min(est.value - bounds.lower);
        upper_margin = upper_margin.min(bounds.upper - est.value);

        let (p1, s1) = (random::gaussian_tuple(&mut r, 2, 1), random::gaussian_tuple(&mut r, 2, 1));
        let zero = OperatorTuple::single(ComplexMatrix::zeros(2));
        let bd = block_bounds(&p1, &zero, &zero, &s1, qp, &opts).map_err(err)?;
        let td = assemble_blocks(&p1, &zero, &zero, &s1).map_err(err)?;
        let ed = assembled_radius(&td, &bd, qp, &opts).map_err(err)?;
        diag_gap = diag_gap.min(ed.value - bd.lower);
    }
    let ok = lower_margin >= 0.0 && upper_margin >= 0.0 && diag_gap >= -REMARK_TOL;
    Ok((ok, format!("min(est − lower) = {lower_margin:.3e}, min(upper − est) = {upper_margin:.3e}, diagonal min(ω_q(T) − max{{ω_q(P), ω_q(S)}}) = {diag_gap:.3e}")))
}

fn c9_convexity() -> Outcome {
    let reps = run_selected(&SuiteConfig::default(), |id| id.starts_with("convexity_")).map_err(err)?;
    let mut ok = reps.len() == 5;
    let mut parts = Vec::new();
    for r in &reps {
        ok &= r.status == Status::Pass;
        if r.check_id == "convexity_decreases" {
            parts.push(format!("{} {:?} (worst fine − coarse {:+.4})", r.check_id, r.status, -r.margin));
        } else {
            parts.push(format!("{} {:?} defect {:.4}", r.check_id, r.status, observed_at_most(r, CONVEXITY_TOL)));
        }
    }
    Ok((ok, parts.join("; ")))
}

fn c10_semi_hilbert() -> Outcome {
    let cfg = SuiteConfig { instances: 50, ..SuiteConfig::default() };
    let ids = ["a_adjoint_calculus", "semi_hilbert_reduction", "kernel_escape_full_plane", "compression_equality"];
    let reps = run_selected(&cfg, |id| ids.contains(&id)).map_err(err)?;
    let mut ok = reps.len() == ids.len();
    let mut parts = Vec::new();
    for r in &reps {
        ok &= r.status == Status::Pass;
        let v = match r.check_id.as_str() {
            "a_adjoint_calculus" | "semi_hilbert_reduction" => {
                let v = observed_at_most(r, EXACT_SLACK);
                ok &= v < IDENTITY_TOL;
                v
            }
            "kernel_escape_full_plane" => {
                let v = ESCAPE_MODULUS + r.margin;
                ok &= v > ESCAPE_MODULUS;
                v
            }
            _ => {
                let v = observed_at_most(r, HAUSDORFF_TOL);
                ok &= v <= HAUSDORFF_TOL;
                v
            }
        };
        parts.push(format!("{} {v:.3e}", r.check_id));
    }
    Ok((ok, parts.join("; ")))
}

fn c11_triangle() -> Outcome {
    let cfg = SuiteConfig { instances: 25, ..SuiteConfig::default() };
    let reps = run_selected(&cfg, |id| id.starts_with("triangle_equality")).map_err(err)?;
    let mut ok = reps.len() == 2;
    let mut parts = Vec::new();
    for r in &reps {
        ok &= r.status == Status::Pass;
        if r.check_id == "triangle_equality_self" {
            let v = observed_at_most(r, TRIANGLE_TOL);
            ok &= v <= TRIANGLE_TOL;
            parts.push(format!("{} {v:.2e}", r.check_id));
        } else {
            parts.push(format!("{} {:?}: {}", r.check_id, r.status, r.details));
        }
    }
    Ok((ok, parts.join("; ")))
}

fn c12_tsing() -> Outcome {
    let m = ComplexMatrix::real_diag(&[1.0, 0.0]);
    let rep = tsing_center_report(&m, q(0.5, 0.0), Seed(SEED), TsingCenter::Corrected).map_err(err)?;
    let corrected = scalar(&rep, "hausdorff_corrected").ok_or("missing corrected witness")?;
    let printed = scalar(&rep, "hausdorff_printed").ok_or("missing printed witness")?;
    let mut ok = rep.status == Status::Pass && corrected <= TSING_CORRECTED && printed >= TSING_PRINTED;
    let mut worst_identity = 0.0f64;
    for qv in [0.3, 0.5, 0.8] {
        let r = tsing_center_report(&ComplexMatrix::identity(3), q(qv, 0.0), Seed(SEED), TsingCenter::Corrected).map_err(err)?;
        let pe = scalar(&r, "hausdorff_printed").ok_or("missing printed witness")?;
        worst_identity = worst_identity.max((pe - (1.0 - qv)).abs());
    }
    ok &= worst_identity < EXACT_TOL;
    Ok((ok, format!("diag(1,0), q=1/2: corrected {corrected:.4}, printed {printed:.4}; M=I: max |printed − (1−q)| = {worst_identity:.1e}")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("degenerate exactness", c1_degenerate),
        ("radius oracle", c2_radius_oracle),
        ("counterexample reproduction", c3_counterexamples),
        ("sandwich bounds", c4_sandwich),
        ("identity suite", c5_identities),
        ("spectral inclusion", c6_spectral),
        ("C-range equivalence", c7_c_range),
        ("block bounds", c8_blocks),
        ("convexity properties", c9_convexity),
        ("semi-Hilbert structure", c10_semi_hilbert),
        ("triangle-equality diagnostic", c11_triangle),
        ("Tsing center", c12_tsing),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let (pass, detail) = match outcome {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        println!("{} {:>2} {name} [{secs:.1}s]: {detail}", if pass { "PASS" } else { "FAIL" }, i + 1);
        if !pass {
            failed.push(i + 1);
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
