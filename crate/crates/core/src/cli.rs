//! Workflows behind the `fsi-cert` binary: load a problem, run one of the
//! subcommands and write its documents.
//!
//! Documents are JSON with a `schema` field; numbers use the shortest decimal
//! that reads back to the same `f64`. Traces and tabulated measures are CSV.
//! Each subcommand writes its primary output to stdout unless a path is
//! given. Secondary human-readable output goes to stderr.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::certificate::{certify, ConvergenceCertificate, HoelderParams, SCHEMA_VERSION};
use crate::comparison::{compare_report_with_delta, ConditionReport, KantorovichOutcome};
use crate::error::{Error, Result};
use crate::majorant::{Knot, MajorantModel, MaximalRoot, OmegaMeasure};
use crate::norm::Norm;
use crate::problems::{build_fixture, fixture_catalog, Fixture, FixtureSpec, ParamValue};
use crate::solver::{
    estimate_centered_with_nu, estimate_omega, fmt_f64, fsi_solve, uniform_radii,
    uniqueness_probe_with, verify_majorization, EstimateMode, MajorizationReport, StopCriteria,
    StopReason, UniquenessReport,
};

pub const DEFAULT_SEED: u64 = 1729;

/// Agreement required between limits of the uniqueness probe.
pub const PROBE_AGREEMENT: f64 = 1e-8;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_CERTIFIED: u8 = 1;
pub const EXIT_INVALID_INPUT: u8 = 2;
pub const EXIT_EVALUATION: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Certify,
    Solve,
    Compare,
    EstimateOmega,
    ListProblems,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSource {
    Fixture(FixtureSpec),
    File(PathBuf),
    /// Bare `key=value` parameters, used by `compare`.
    Params(BTreeMap<String, ParamValue>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub tol_step: f64,
    pub tol_residual: f64,
    pub root_tol: f64,
    pub slack_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let stop = StopCriteria::default();
        Tolerances {
            tol_step: stop.tol_step,
            tol_residual: stop.tol_residual,
            root_tol: crate::solver::DEFAULT_ROOT_TOL,
            slack_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputPaths {
    pub certificate: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub problem: Option<ProblemSource>,
    pub tolerances: Tolerances,
    pub max_iter: usize,
    /// Overrides the norm of the problem spec.
    pub norm: Option<Norm>,
    pub seed: u64,
    pub num_starts: usize,
    pub estimate_mode: EstimateMode,
    pub estimate_radii: usize,
    pub estimate_samples: usize,
    pub outputs: OutputPaths,
}

impl RunConfig {
    pub fn new(subcommand: Subcommand) -> Self {
        RunConfig {
            subcommand,
            problem: None,
            tolerances: Tolerances::default(),
            max_iter: StopCriteria::default().max_iter,
            norm: None,
            seed: DEFAULT_SEED,
            num_starts: 0,
            estimate_mode: EstimateMode::Direct,
            estimate_radii: 64,
            estimate_samples: 64,
            outputs: OutputPaths::default(),
        }
    }

    pub fn with_problem(mut self, problem: ProblemSource) -> Self {
        self.problem = Some(problem);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, v) in [
            ("tol_step", t.tol_step),
            ("tol_residual", t.tol_residual),
            ("root_tol", t.root_tol),
            ("slack_tol", t.slack_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_iter == 0 || self.estimate_radii == 0 {
            return Err(Error::InvalidInput("max_iter and estimate_radii must be positive".into()));
        }
        Ok(())
    }

    fn stop(&self) -> StopCriteria {
        StopCriteria {
            tol_step: self.tolerances.tol_step,
            tol_residual: self.tolerances.tol_residual,
            max_iter: self.max_iter,
        }
    }
}

/// Parsed `key=value` arguments.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Assignments {
    pub params: BTreeMap<String, ParamValue>,
    pub norm: Option<Norm>,
    pub radius: Option<f64>,
}

/// Splits `key=value` arguments. Values are read as JSON (numbers, vectors
/// or matrices); `norm` and `R` go to the spec itself.
pub fn parse_assignments(args: &[String]) -> Result<Assignments> {
    let mut params = BTreeMap::new();
    let mut norm = None;
    let mut radius = None;
    for arg in args {
        let (key, value) = arg
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("expected key=value, got `{arg}`")))?;
        match key {
            "norm" => norm = Some(value.parse()?),
            "R" => {
                radius = Some(
                    value
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidInput(format!("R = `{value}` is not a number")))?,
                )
            }
            _ => {
                let parsed: ParamValue = serde_json::from_str(value)
                    .map_err(|_| Error::InvalidInput(format!("cannot parse value of `{key}`: `{value}`")))?;
                params.insert(key.to_string(), parsed);
            }
        }
    }
    Ok(Assignments { params, norm, radius })
}

/// Interprets positional arguments: a fixture name or a `.json` spec file,
/// followed by assignments. Without a leading name the assignments stand
/// alone.
pub fn problem_from_args(args: &[String]) -> Result<Option<ProblemSource>> {
    let Some(first) = args.first() else {
        return Ok(None);
    };
    if first.contains('=') {
        let Assignments { mut params, norm, radius } = parse_assignments(args)?;
        if let Some(r) = radius {
            params.insert("R".into(), ParamValue::Scalar(r));
        }
        if norm.is_some() {
            return Err(Error::InvalidInput("`norm` needs a fixture".into()));
        }
        return Ok(Some(ProblemSource::Params(params)));
    }
    if first.ends_with(".json") || Path::new(first).is_file() {
        if args.len() > 1 {
            return Err(Error::InvalidInput("a spec file takes no extra parameters".into()));
        }
        return Ok(Some(ProblemSource::File(PathBuf::from(first))));
    }
    let Assignments { params, norm, radius } = parse_assignments(&args[1..])?;
    Ok(Some(ProblemSource::Fixture(FixtureSpec {
        fixture: first.clone(),
        params,
        norm,
        radius,
    })))
}

/// Reads a problem-spec document: `{"schema": 1, "fixture": ..., "params":
/// {...}, "norm": ..., "R": ...}`.
pub fn read_problem_spec(path: &Path) -> Result<FixtureSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_problem_spec(&text)
}

pub fn parse_problem_spec(text: &str) -> Result<FixtureSpec> {
    let mut value: serde_json::Value = serde_json::from_str(text)?;
    if let Some(obj) = value.as_object_mut() {
        if let Some(schema) = obj.remove("schema") {
            if schema.as_u64() != Some(SCHEMA_VERSION as u64) {
                return Err(Error::InvalidInput(format!("unsupported schema {schema}")));
            }
        }
    }
    Ok(serde_json::from_value(value)?)
}

pub fn write_problem_spec<W: Write>(spec: &FixtureSpec, out: W) -> Result<()> {
    #[derive(Serialize)]
    struct Doc<'a> {
        schema: u32,
        #[serde(flatten)]
        spec: &'a FixtureSpec,
    }
    write_json(&Doc { schema: SCHEMA_VERSION, spec }, out)
}

fn write_json<T: Serialize, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn fixture_spec(config: &RunConfig) -> Result<FixtureSpec> {
    let mut spec = match &config.problem {
        Some(ProblemSource::Fixture(spec)) => spec.clone(),
        Some(ProblemSource::File(path)) => read_problem_spec(path)?,
        Some(ProblemSource::Params(_)) => {
            return Err(Error::InvalidInput("this subcommand needs a fixture name or spec file".into()))
        }
        None => return Err(Error::InvalidInput("no problem given".into())),
    };
    if config.norm.is_some() {
        spec.norm = config.norm;
    }
    Ok(spec)
}

/// Where the measure behind a certificate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaSource {
    Analytic,
    Estimated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub fixture: FixtureSpec,
    pub norm: Norm,
    pub omega_source: OmegaSource,
    #[serde(flatten)]
    pub certificate: ConvergenceCertificate,
}

/// The model a certificate is computed from: the fixture's closed form if it
/// has one, else the centered estimate shifted by `nu`.
pub fn fixture_model(fixture: &Fixture, config: &RunConfig) -> Result<(MajorantModel, OmegaSource)> {
    let p = &fixture.problem;
    let radius = p.radius();
    if let Some(a) = &fixture.analytic {
        return Ok((a.model(radius)?, OmegaSource::Analytic));
    }
    let radii = uniform_radii(radius, config.estimate_radii);
    let omega = match estimate_centered_with_nu(p, &radii, config.estimate_samples, config.seed) {
        Ok(omega) => omega,
        // A flat measure at nu still yields a diagnostic certificate.
        Err(Error::NuNotContractive { nu }) => {
            OmegaMeasure::tabulated(vec![Knot::new(0.0, nu), Knot::new(radius, nu)])?
        }
        Err(e) => return Err(e),
    };
    Ok((MajorantModel::new(p.initial_step_norm()?, radius, omega)?, OmegaSource::Estimated))
}

pub fn certify_fixture(spec: &FixtureSpec, config: &RunConfig) -> Result<CertificateDocument> {
    let fixture = build_fixture(spec)?;
    let (model, source) = fixture_model(&fixture, config)?;
    let certificate = certify(&model, config.tolerances.root_tol)?;
    Ok(CertificateDocument {
        fixture: spec.clone(),
        norm: fixture.problem.norm(),
        omega_source: source,
        certificate,
    })
}

pub fn read_certificate(text: &str) -> Result<CertificateDocument> {
    Ok(serde_json::from_str(text)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub schema: u32,
    pub fixture: FixtureSpec,
    pub norm: Norm,
    pub certified: bool,
    pub omega_source: Option<OmegaSource>,
    /// Why no certificate is attached, if none is.
    pub certificate_note: Option<String>,
    pub certificate: Option<ConvergenceCertificate>,
    pub steps: usize,
    pub stop_reason: StopReason,
    pub converged: bool,
    pub solution: Vec<f64>,
    pub residual_norm: f64,
    pub distance_from_x0: f64,
    pub known_solution_error: Option<f64>,
    pub majorization: Option<MajorizationReport>,
    pub uniqueness: Option<UniquenessReport>,
}

/// Solves a fixture and returns the trace CSV together with the report.
pub fn solve_fixture(spec: &FixtureSpec, config: &RunConfig) -> Result<(String, SolveReport)> {
    let fixture = build_fixture(spec)?;
    let p = &fixture.problem;
    let attempt = fixture_model(&fixture, config)
        .and_then(|(m, source)| Ok((certify(&m, config.tolerances.root_tol)?, source)));
    let (cert, omega_source, note) = match attempt {
        Ok((c, source)) if c.is_certified() => (Some(c), Some(source), None),
        Ok((c, _)) => (None, None, Some(format!("not certified: {:?}", c.status))),
        Err(e) => (None, None, Some(e.to_string())),
    };
    let stop = config.stop();
    let (x, trace) = fsi_solve(p, &stop, cert.as_ref())?;

    let majorization = match &cert {
        Some(c) if trace.steps() > 0 => Some(verify_majorization(&trace, &c.model, config.tolerances.slack_tol)?),
        _ => None,
    };
    let uniqueness = match &cert {
        Some(c) if config.num_starts > 0 => Some(uniqueness_probe_with(
            p,
            c,
            config.num_starts,
            config.seed,
            PROBE_AGREEMENT,
            &stop,
        )?),
        _ => None,
    };
    let known_solution_error = fixture
        .analytic
        .as_ref()
        .and_then(|a| a.known_solution.as_ref())
        .map(|s| p.norm().distance(&x, s));

    let mut csv = Vec::new();
    trace.write_csv(&mut csv)?;
    let report = SolveReport {
        schema: SCHEMA_VERSION,
        fixture: spec.clone(),
        norm: p.norm(),
        certified: cert.is_some(),
        omega_source,
        certificate_note: note,
        certificate: cert,
        steps: trace.steps(),
        stop_reason: trace.stop_reason,
        converged: trace.converged(),
        solution: x.as_slice().to_vec(),
        residual_norm: *trace.residual_norms.last().expect("one residual per iterate"),
        distance_from_x0: p.distance_from_x0(&x),
        known_solution_error,
        majorization,
        uniqueness,
    };
    Ok((String::from_utf8(csv).expect("CSV output is UTF-8"), report))
}

fn param_scalar(params: &BTreeMap<String, ParamValue>, key: &str, default: Option<f64>) -> Result<f64> {
    match (params.get(key), default) {
        (Some(ParamValue::Scalar(v)), _) => Ok(*v),
        (Some(_), _) => Err(Error::BadParameters(format!("`{key}` must be a number"))),
        (None, Some(d)) => Ok(d),
        (None, None) => Err(Error::BadParameters(format!("missing `{key}`"))),
    }
}

/// Builds the comparison inputs: bare `l0, alpha, nu, eta, R[, delta]`, or a
/// fixture with closed-form constants.
pub fn compare_inputs(config: &RunConfig) -> Result<(HoelderParams, f64, f64)> {
    match &config.problem {
        Some(ProblemSource::Params(params)) => {
            const KEYS: [&str; 6] = ["l0", "alpha", "nu", "eta", "R", "delta"];
            if let Some(k) = params.keys().find(|k| !KEYS.contains(&k.as_str())) {
                return Err(Error::BadParameters(format!("unknown parameter `{k}` (expected {KEYS:?})")));
            }
            let p = HoelderParams::new(
                param_scalar(params, "l0", None)?,
                param_scalar(params, "alpha", Some(1.0))?,
                param_scalar(params, "nu", Some(0.0))?,
                param_scalar(params, "eta", None)?,
            )?;
            let delta = param_scalar(params, "delta", Some(p.nu))?;
            Ok((p, delta, param_scalar(params, "R", None)?))
        }
        _ => {
            let spec = fixture_spec(config)?;
            let fixture = build_fixture(&spec)?;
            let a = fixture.analytic.as_ref().ok_or_else(|| {
                Error::BadParameters(format!("`{}` has no closed-form constants to compare", spec.fixture))
            })?;
            let p = HoelderParams::new(a.l0, a.alpha, a.nu, a.eta)?;
            Ok((p, p.nu, fixture.problem.radius()))
        }
    }
}

fn cell_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_else(|| "-".into())
}

fn cell_root(r: &Option<MaximalRoot>) -> String {
    match r {
        Some(MaximalRoot::Root(v)) => fmt_f64(*v),
        Some(MaximalRoot::AtBoundary) => "beyond R".into(),
        None => "-".into(),
    }
}

/// Renders a report as an aligned three-column table.
pub fn render_comparison_table(r: &ConditionReport) -> String {
    let kantorovich = match r.kantorovich_condition {
        KantorovichOutcome::Holds => "true",
        KantorovichOutcome::Fails => "false",
        KantorovichOutcome::NotApplicable => "n/a",
    };
    let rows: Vec<[String; 3]> = vec![
        ["".into(), "new".into(), "f-based".into()],
        [
            "condition".into(),
            r.new_condition.holds.to_string(),
            r.ahues_condition.holds.to_string(),
        ],
        [
            "eta_max".into(),
            fmt_f64(r.new_condition.eta_max.value()),
            fmt_f64(r.ahues_condition.eta_max.value()),
        ],
        [
            "minimal root".into(),
            cell_opt(r.radii.nu_star),
            cell_opt(r.radii.r_star),
        ],
        [
            "maximal root".into(),
            cell_root(&r.radii.nu_star_star),
            cell_root(&r.radii.r_star_star),
        ],
        ["uniqueness radius".into(), cell_opt(r.radii.lambda_star), "-".into()],
        ["kantorovich".into(), kantorovich.into(), "".into()],
        ["eta_max ratio".into(), cell_opt(r.eta_max_ratio), "".into()],
        ["claimed ordering".into(), r.claimed_ordering.clone(), "".into()],
        [
            "observed ordering".into(),
            r.observed_ordering.clone().unwrap_or_else(|| "-".into()),
            "".into(),
        ],
    ];
    let width = |i: usize| rows.iter().map(|r| r[i].len()).max().unwrap_or(0) + 2;
    let (w0, w1) = (width(0), width(1));
    rows.iter()
        .map(|[a, b, c]| format!("{a:<w0$}{b:<w1$}{c}").trim_end().to_string() + "\n")
        .collect()
}

pub fn render_catalog() -> String {
    let mut s = String::new();
    for info in fixture_catalog() {
        s += &format!("{}\n  {}\n  norm: {}, R: {}\n", info.name, info.summary, info.default_norm, info.default_radius);
        let w = info.params.iter().map(|p| p.name.len()).max().unwrap_or(0);
        for p in &info.params {
            s += &format!(
                "    {:<w$}  {:<8} default {:<18} {}\n",
                p.name, p.kind, p.default, p.description
            );
        }
    }
    s
}

pub fn estimate_fixture(spec: &FixtureSpec, config: &RunConfig) -> Result<OmegaMeasure> {
    let fixture = build_fixture(spec)?;
    let radii = uniform_radii(fixture.problem.radius(), config.estimate_radii);
    estimate_omega(&fixture.problem, config.estimate_mode, &radii, config.estimate_samples, config.seed)
}

pub fn write_measure_csv<W: Write>(omega: &OmegaMeasure, out: W) -> Result<()> {
    let knots = omega
        .knots()
        .ok_or_else(|| Error::InvalidMeasure("only tabulated measures are written as CSV".into()))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["radius", "value"])?;
    for k in knots {
        w.write_record([fmt_f64(k.radius), fmt_f64(k.value)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_measure_csv<R: std::io::Read>(input: R) -> Result<OmegaMeasure> {
    let mut r = csv::Reader::from_reader(input);
    let mut knots = Vec::new();
    for row in r.deserialize::<(f64, f64)>() {
        let (radius, value) = row.map_err(|e| Error::InvalidInput(e.to_string()))?;
        knots.push(Knot::new(radius, value));
    }
    OmegaMeasure::tabulated(knots)
}

/// Exit status for an error: 2 for bad input, 3 for failures while
/// evaluating the problem.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::EvaluationFailed(_)
        | Error::MaxIterExceeded { .. }
        | Error::OutsideBall { .. }
        | Error::DimensionMismatch(_)
        | Error::JacobianMissing => EXIT_EVALUATION,
        _ => EXIT_INVALID_INPUT,
    }
}

enum Sink<'a> {
    File(BufWriter<File>),
    Borrowed(&'a mut dyn Write),
}

impl Write for Sink<'_> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        match self {
            Sink::File(f) => f.write(buf),
            Sink::Borrowed(w) => w.write(buf),
        }
    }

    fn flush(&mut self) -> std::io::Result<()> {
        match self {
            Sink::File(f) => f.flush(),
            Sink::Borrowed(w) => w.flush(),
        }
    }
}

fn sink<'a>(path: &Option<PathBuf>, fallback: &'a mut dyn Write) -> Result<Sink<'a>> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            Ok(Sink::File(BufWriter::new(f)))
        }
        None => Ok(Sink::Borrowed(fallback)),
    }
}

/// Runs one subcommand and returns its exit status. Errors are reported on
/// `err`.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    match execute(config, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    config.validate()?;
    match config.subcommand {
        Subcommand::Certify => {
            let doc = certify_fixture(&fixture_spec(config)?, config)?;
            write_json(&doc, sink(&config.outputs.certificate, out)?)?;
            Ok(if doc.certificate.is_certified() {
                EXIT_OK
            } else {
                EXIT_NOT_CERTIFIED
            })
        }
        Subcommand::Solve => {
            let (csv, report) = solve_fixture(&fixture_spec(config)?, config)?;
            let trace_to_stdout = config.outputs.trace.is_none();
            sink(&config.outputs.trace, out)?.write_all(csv.as_bytes())?;
            if let (Some(path), Some(cert), Some(source)) =
                (&config.outputs.certificate, &report.certificate, report.omega_source)
            {
                let doc = CertificateDocument {
                    fixture: report.fixture.clone(),
                    norm: report.norm,
                    omega_source: source,
                    certificate: cert.clone(),
                };
                write_json(&doc, sink(&Some(path.clone()), out)?)?;
            }
            let fallback: &mut dyn Write = if trace_to_stdout { err } else { out };
            write_json(&report, sink(&config.outputs.report, fallback)?)?;
            Ok(EXIT_OK)
        }
        Subcommand::Compare => {
            let (p, delta, radius) = compare_inputs(config)?;
            let report = compare_report_with_delta(&p, delta, radius, config.tolerances.root_tol)?;
            write_json(&report, sink(&config.outputs.report, out)?)?;
            err.write_all(render_comparison_table(&report).as_bytes())?;
            Ok(EXIT_OK)
        }
        Subcommand::EstimateOmega => {
            let omega = estimate_fixture(&fixture_spec(config)?, config)?;
            write_measure_csv(&omega, sink(&config.outputs.report, out)?)?;
            Ok(EXIT_OK)
        }
        Subcommand::ListProblems => {
            out.write_all(render_catalog().as_bytes())?;
            Ok(EXIT_OK)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::BallBoundary;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn run_capture(config: &RunConfig) -> (u8, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(config, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn certify_quadratic_from_args() {
        let problem = problem_from_args(&args("scalar_quadratic c=2 x0=2 b=0.25 R=10")).unwrap();
        let config = RunConfig::new(Subcommand::Certify).with_problem(problem.unwrap());
        let (code, out, _) = run_capture(&config);
        assert_eq!(code, EXIT_OK);
        let doc = read_certificate(&out).unwrap();
        assert!(doc.certificate.is_certified());
        assert!((doc.certificate.nu_star.unwrap() - 0.585786).abs() < 1e-6);
        assert_eq!(doc.certificate.uniqueness_boundary, Some(BallBoundary::Open));
        assert_eq!(doc.omega_source, OmegaSource::Analytic);
        let json: serde_json::Value = serde_json::from_str(&out).unwrap();
        for key in [
            "status",
            "nu",
            "eta",
            "R",
            "nu_star",
            "nu_star_star",
            "gamma_star",
            "lambda_star",
            "uniqueness_boundary",
            "scalar_sequence",
        ] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn not_certified_exits_one_with_document() {
        let problem = problem_from_args(&args("scalar_quadratic x0=2 b=0.25 c=-5")).unwrap();
        let config = RunConfig::new(Subcommand::Certify).with_problem(problem.unwrap());
        let (code, out, _) = run_capture(&config);
        assert_eq!(code, EXIT_NOT_CERTIFIED);
        assert!(!read_certificate(&out).unwrap().certificate.is_certified());
    }

    #[test]
    fn compare_example() {
        let problem = problem_from_args(&args("l0=1 alpha=1 nu=0 eta=0.3 R=10")).unwrap();
        let config = RunConfig::new(Subcommand::Compare).with_problem(problem.unwrap());
        let (code, out, table) = run_capture(&config);
        assert_eq!(code, EXIT_OK);
        let report: ConditionReport = serde_json::from_str(&out).unwrap();
        assert!(report.new_condition.holds);
        assert!(!report.ahues_condition.holds);
        assert_eq!(report.kantorovich_condition, KantorovichOutcome::Holds);
        assert_eq!(report.eta_max_ratio, Some(2.0));
        assert!(table.lines().any(|l| l.starts_with("condition") && l.contains("true") && l.contains("false")));
    }

    #[test]
    fn solve_linear_takes_one_step() {
        let problem = problem_from_args(&args("linear")).unwrap();
        let config = RunConfig::new(Subcommand::Solve).with_problem(problem.unwrap());
        let (code, trace, report) = run_capture(&config);
        assert_eq!(code, EXIT_OK);
        let lines: Vec<&str> = trace.lines().collect();
        assert_eq!(lines[0], "k,step_norm,residual_norm,v_step,bound_slack,error_bound");
        assert_eq!(lines.len(), 3);
        let report: SolveReport = serde_json::from_str(&report).unwrap();
        assert_eq!(report.steps, 1);
        assert_eq!(report.residual_norm, 0.0);
        assert!(report.majorization.unwrap().passed);
    }

    #[test]
    fn estimate_quadratic_rows() {
        let problem = problem_from_args(&args("scalar_quadratic")).unwrap();
        let mut config = RunConfig::new(Subcommand::EstimateOmega).with_problem(problem.unwrap());
        config.estimate_radii = 4;
        let (code, out, _) = run_capture(&config);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "radius,value\n0.0,0.0\n2.5,1.25\n5.0,2.5\n7.5,3.75\n10.0,5.0\n");
        let omega = read_measure_csv(out.as_bytes()).unwrap();
        assert_eq!(omega.eval(5.0).unwrap(), 2.5);
    }

    #[test]
    fn exit_codes_for_bad_input() {
        let config = RunConfig::new(Subcommand::Certify)
            .with_problem(problem_from_args(&args("nope")).unwrap().unwrap());
        assert_eq!(run_capture(&config).0, EXIT_INVALID_INPUT);
        let mut config = RunConfig::new(Subcommand::Certify)
            .with_problem(problem_from_args(&args("linear")).unwrap().unwrap());
        config.tolerances.root_tol = 0.0;
        assert_eq!(run_capture(&config).0, EXIT_INVALID_INPUT);
        assert!(problem_from_args(&args("linear c")).is_err());
        assert!(problem_from_args(&args("linear c=[1,")).is_err());
    }

    #[test]
    fn problem_spec_document() {
        let text = r#"{"schema":1,"fixture":"poly2d","params":{"s":0.5},"norm":"one","R":4}"#;
        let spec = parse_problem_spec(text).unwrap();
        assert_eq!(spec.norm, Some(Norm::One));
        assert_eq!(spec.radius, Some(4.0));
        let mut buf = Vec::new();
        write_problem_spec(&spec, &mut buf).unwrap();
        assert_eq!(parse_problem_spec(std::str::from_utf8(&buf).unwrap()).unwrap(), spec);
        assert!(parse_problem_spec(r#"{"schema":2,"fixture":"linear"}"#).is_err());
    }

    #[test]
    fn catalog_mentions_every_fixture() {
        let text = render_catalog();
        for name in ["scalar_quadratic", "scalar_holder", "poly2d", "chandrasekhar", "linear"] {
            assert!(text.contains(name));
        }
    }
}
