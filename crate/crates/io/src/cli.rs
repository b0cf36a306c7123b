//! The `qrange` command line.
//!
//! Exit codes: 0 success, 1 failed verification checks, 2 malformed input or
//! configuration, 3 infeasible constraints, 4 full-plane result requested in
//! a cloud-only format.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qrange_core::optimize::{radius_joint, RadiusOptions};
use qrange_core::range::{cloud_joint, cloud_single, sandwich_bounds, PointCloud};
use qrange_core::report::{Report, Status};
use qrange_core::semi_hilbert::{build_aspace, cloud_qa, radius_qa, QARadius, QARangeResult, DEFAULT_RANK_TOL};
use qrange_core::spectrum::{default_tol, joint_point_spectrum, spectral_inclusion_check};
use qrange_core::verify::{verify_all, SuiteConfig, TsingCenter};
use qrange_core::{FieldMode, QParam, Seed};
use serde_json::{json, Value};

use crate::io::{cloud_csv, cloud_svg, parse_axis, read_matrix, read_tuple, sidecar_path, write_atomic, Sidecar};

#[derive(Debug, Parser)]
#[command(name = "qrange", version, about = "Joint q-numerical ranges and radii of matrix tuples")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the joint q-numerical range of a tuple.
    Cloud(CloudArgs),
    /// Estimate the joint q-numerical radius, or the q-A-radius with --a.
    Radius(RadiusArgs),
    /// Joint point spectrum of a commuting tuple.
    Spectra(SpectraArgs),
    /// Sample the q-numerical range of an operator relative to a semi-inner product.
    Semihilbert(SemiArgs),
    /// Run the property suite, the counterexamples and the Tsing report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Real,
    Complex,
}

impl From<Mode> for FieldMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Real => FieldMode::Real,
            Mode::Complex => FieldMode::Complex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output path; stdout when absent. CSV output gets a `.meta.json` sidecar.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Additional SVG scatter with hull overlay.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Coordinates plotted in SVG output, e.g. `re_1,re_2`; defaults to `re_1,im_1` for d = 1.
    #[arg(long)]
    pub axes: Option<String>,
}

#[derive(Debug, Args)]
pub struct CloudArgs {
    /// Tuple JSON.
    #[arg(long)]
    pub input: PathBuf,
    /// `re` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "complex")]
    pub mode: Mode,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct RadiusArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Positive semidefinite A as a single-matrix JSON.
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectraArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Also check that q·σ_p(T) lies in the sampled joint q-range.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SemiArgs {
    /// Single-matrix JSON for the operator.
    #[arg(long)]
    pub input: PathBuf,
    /// Positive semidefinite A as a single-matrix JSON.
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest kernel amplitude of the full-plane certificate; the schedule
    /// spans six decades below it.
    #[arg(long)]
    pub kappa: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite configuration JSON; missing fields take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed (42 by default).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Replaces the configured q values; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Vec<String>,
    /// Judge the Tsing report on the uncorrected disk center (negative control).
    #[arg(long)]
    pub printed_center: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Input(anyhow::Error),
    Infeasible(anyhow::Error),
    FullPlaneFormat,
    ChecksFailed(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Input(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::FullPlaneFormat => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(e) => write!(f, "{e:#}"),
            CliError::Infeasible(e) => write!(f, "infeasible: {e:#}"),
            CliError::FullPlaneFormat => write!(f, "the range is the whole plane; only --format json can carry its certificate"),
            CliError::ChecksFailed(ids) => write!(f, "{} check(s) failed: {}", ids.len(), ids.join(", ")),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<qrange_core::Error>() {
            Some(qrange_core::Error::Infeasible(_)) => CliError::Infeasible(e),
            _ => CliError::Input(e),
        }
    }
}

impl From<qrange_core::Error> for CliError {
    fn from(e: qrange_core::Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.into())
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses arguments, runs the subcommand and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Cloud(a) => cmd_cloud(a),
        Command::Radius(a) => cmd_radius(a),
        Command::Spectra(a) => cmd_spectra(a),
        Command::Semihilbert(a) => cmd_semihilbert(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

/// `re` or `re,im`.
pub fn parse_q(s: &str) -> CliResult<QParam> {
    let num = |t: &str| t.trim().parse::<f64>().with_context(|| format!("bad number {t:?} in q"));
    let c = match s.split_once(',') {
        Some((re, im)) => Complex64::new(num(re)?, num(im)?),
        None => Complex64::new(num(s)?, 0.0),
    };
    Ok(QParam::new(c)?)
}

fn check_count(count: usize) -> CliResult<()> {
    if count == 0 {
        return Err(anyhow!("--count must be at least 1").into());
    }
    Ok(())
}

fn to_json(v: &impl serde::Serialize) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(v)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes `main` to `out` (stdout when absent) together with any extra files.
fn emit(out: Option<&Path>, main: Vec<u8>, mut extra: Vec<(PathBuf, Vec<u8>)>) -> CliResult<()> {
    match out {
        Some(p) => {
            extra.insert(0, (p.to_path_buf(), main));
            write_atomic(&extra)?;
        }
        None => {
            write_atomic(&extra)?;
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&main).and_then(|_| stdout.flush()).context("writing to stdout")?;
        }
    }
    Ok(())
}

fn svg_axes(o: &Output, d: usize) -> CliResult<(usize, usize)> {
    match &o.axes {
        Some(s) => {
            let (a, b) = s.split_once(',').ok_or_else(|| anyhow!("--axes expects two names, e.g. re_1,re_2"))?;
            Ok((parse_axis(a, d)?, parse_axis(b, d)?))
        }
        None if d == 1 => Ok((0, 1)),
        None => Err(anyhow!("SVG output of a d = {d} cloud needs --axes").into()),
    }
}

fn write_cloud(cloud: &PointCloud, o: &Output) -> CliResult<()> {
    let wants_svg = o.format == Format::Svg || o.svg.is_some();
    let axes = if wants_svg { Some(svg_axes(o, cloud.d)?) } else { None };
    let mut extra = Vec::new();
    let main = match o.format {
        Format::Csv => {
            if let Some(p) = &o.out {
                let side = sidecar_path(p);
                if &side == p {
                    return Err(anyhow!("--out {} collides with its sidecar", p.display()).into());
                }
                extra.push((side, to_json(&Sidecar::of(cloud))?));
            }
            cloud_csv(cloud)?
        }
        Format::Json => to_json(cloud)?,
        Format::Svg => cloud_svg(cloud, axes.expect("svg axes"))?.into_bytes(),
    };
    if let Some(p) = &o.svg {
        extra.push((p.clone(), cloud_svg(cloud, axes.expect("svg axes"))?.into_bytes()));
    }
    emit(o.out.as_deref(), main, extra)
}

fn cmd_cloud(a: CloudArgs) -> CliResult<()> {
    let t = read_tuple(&a.input)?;
    let q = parse_q(&a.q)?;
    check_count(a.count)?;
    let (seed, mode) = (Seed(a.seed), FieldMode::from(a.mode));
    let cloud = if t.d() == 1 {
        cloud_single(t.part(0), q, a.count, seed, mode)?
    } else {
        cloud_joint(&t, q, a.count, seed, mode)?
    };
    write_cloud(&cloud, &a.output)
}

fn complex_vec(v: impl IntoIterator<Item = Complex64>) -> Vec<Complex64> {
    v.into_iter().collect()
}

fn cmd_radius(a: RadiusArgs) -> CliResult<()> {
    let t = read_tuple(&a.input)?;
    let q = parse_q(&a.q)?;
    let opts = RadiusOptions {
        restarts: a.restarts.max(1),
        seed: Seed(a.seed),
        ..RadiusOptions::default()
    };
    let doc = match &a.a {
        None => {
            let est = radius_joint(&t, q, &opts)?;
            let qv = q.value();
            let bounds = if q.is_real() && qv.re > 0.0 && qv.re < 1.0 {
                let b = sandwich_bounds(&t, qv.re)?;
                json!({ "paper_lower": b.paper_lower, "corrected_lower": b.corrected_lower, "upper": b.upper })
            } else {
                Value::Null
            };
            json!({
                "kind": "Finite",
                "value": est.value,
                "converged": est.converged,
                "iterations": est.iterations,
                "q": qv,
                "witness": { "x": complex_vec(est.witness.x.iter().copied()), "y": complex_vec(est.witness.y.iter().copied()) },
                "bounds": bounds,
            })
        }
        Some(path) => {
            if t.d() != 1 {
                return Err(anyhow!("--a needs a single operator (d = 1), found d = {}", t.d()).into());
            }
            let s = build_aspace(&read_matrix(path)?, DEFAULT_RANK_TOL)?;
            match radius_qa(t.part(0), &s, q, &opts)? {
                QARadius::Finite { estimate, pair } => json!({
                    "kind": "Finite",
                    "value": estimate.value,
                    "converged": estimate.converged,
                    "iterations": estimate.iterations,
                    "q": q.value(),
                    "witness": { "x": complex_vec(pair.x.iter().copied()), "y": complex_vec(pair.y.iter().copied()) },
                    "bounds": Value::Null,
                }),
                QARadius::Infinite => json!({
                    "kind": "Infinite",
                    "value": Value::Null,
                    "converged": true,
                    "q": q.value(),
                    "witness": Value::Null,
                    "bounds": Value::Null,
                }),
            }
        }
    };
    emit(a.out.as_deref(), to_json(&doc)?, Vec::new())
}

fn cmd_spectra(a: SpectraArgs) -> CliResult<()> {
    let t = read_tuple(&a.input)?;
    let tol = default_tol(&t);
    let points = joint_point_spectrum(&t, tol)?;
    let inclusion = match &a.q {
        Some(q) => Some(spectral_inclusion_check(&t, parse_q(q)?, tol)?),
        None => None,
    };
    let doc = json!({
        "points": points
            .iter()
            .map(|p| json!({ "xi": p.xi, "witness": complex_vec(p.witness.iter().copied()), "residual": p.residual }))
            .collect::<Vec<_>>(),
        "inclusion": inclusion,
    });
    emit(a.out.as_deref(), to_json(&doc)?, Vec::new())
}

/// Six decades ending at `top`.
fn kappa_schedule(top: Option<f64>) -> CliResult<Vec<f64>> {
    match top {
        None => Ok(Vec::new()),
        Some(k) if k.is_finite() && k > 0.0 => Ok((0..=6).rev().map(|e| k / 10f64.powi(e)).collect()),
        Some(k) => Err(anyhow!("--kappa must be positive and finite, got {k}").into()),
    }
}

fn cmd_semihilbert(a: SemiArgs) -> CliResult<()> {
    let m = read_matrix(&a.input)?;
    let s = build_aspace(&read_matrix(&a.a)?, DEFAULT_RANK_TOL)?;
    let q = parse_q(&a.q)?;
    check_count(a.count)?;
    let kappas = kappa_schedule(a.kappa)?;
    match cloud_qa(&m, &s, q, a.count, Seed(a.seed), &kappas)? {
        QARangeResult::Cloud(cloud) => {
            if a.output.format == Format::Json {
                let wants_svg = a.output.svg.is_some();
                let axes = if wants_svg { Some(svg_axes(&a.output, cloud.d)?) } else { None };
                let extra = match (&a.output.svg, axes) {
                    (Some(p), Some(ax)) => vec![(p.clone(), cloud_svg(&cloud, ax)?.into_bytes())],
                    _ => Vec::new(),
                };
                emit(a.output.out.as_deref(), to_json(&json!({ "kind": "Cloud", "cloud": cloud }))?, extra)
            } else {
                write_cloud(&cloud, &a.output)
            }
        }
        QARangeResult::FullPlane(cert) => {
            if a.output.format != Format::Json || a.output.svg.is_some() {
                return Err(CliError::FullPlaneFormat);
            }
            eprintln!(
                "warning: the operator maps N(A) outside N(A); its q-A-range is the whole plane (certificate modulus {:.3e})",
                cert.max_modulus()
            );
            emit(a.output.out.as_deref(), to_json(&json!({ "kind": "FullPlane", "certificate": cert }))?, Vec::new())
        }
    }
}

fn load_config(a: &VerifyArgs) -> CliResult<SuiteConfig> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("malformed suite config {}", p.display()))?
        }
        None => SuiteConfig::default(),
    };
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(r) = a.restarts {
        cfg.restarts = r;
    }
    if !a.q.is_empty() {
        cfg.q_values = a.q.iter().map(|q| parse_q(q).map(|q| q.value())).collect::<CliResult<_>>()?;
    }
    if a.printed_center {
        cfg.tsing_center = TsingCenter::Printed;
    }
    cfg.validate().map_err(|e| CliError::Input(anyhow!("invalid suite config: {e}")))?;
    Ok(cfg)
}

fn status_word(r: &Report) -> &'static str {
    match r.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Skip => "SKIP",
    }
}

fn cmd_verify(a: VerifyArgs) -> CliResult<()> {
    let cfg = load_config(&a)?;
    let reports = verify_all(&cfg)?;
    for r in &reports {
        eprintln!("{} {:<32} margin={:+.3e} tol={:.1e}", status_word(r), r.check_id, r.margin, r.tolerance);
    }
    emit(a.out.as_deref(), to_json(&reports)?, Vec::new())?;
    let failed: Vec<String> = reports.iter().filter(|r| r.failed()).map(|r| r.check_id.clone()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(failed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_parsing() {
        assert_eq!(parse_q("0.5").unwrap().value(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_q("0.3,-0.4").unwrap().value(), Complex64::new(0.3, -0.4));
        assert_eq!(parse_q("1.5").unwrap_err().exit_code(), 2);
        assert_eq!(parse_q("a,b").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn kappa_schedule_ends_at_top() {
        let k = kappa_schedule(Some(1e4)).unwrap();
        assert_eq!(k.len(), 7);
        assert_eq!(*k.last().unwrap(), 1e4);
        assert!(k.windows(2).all(|w| w[0] < w[1]));
        assert!(kappa_schedule(Some(-1.0)).is_err());
    }

    #[test]
    fn infeasible_maps_to_three() {
        let e: CliError = qrange_core::Error::Infeasible("n = 1").into();
        assert_eq!(e.exit_code(), 3);
        let e: CliError = qrange_core::Error::NonFinite.into();
        assert_eq!(e.exit_code(), 2);
    }
}
