//! The fixed slope iteration `x_{k+1} = x_k - B F(x_k)` on R^n.
//!
//! `B` is applied, never factored or inverted. Besides the solve itself this
//! module checks recorded traces against a certificate's majorizing sequence,
//! estimates continuity measures from Jacobian samples, and probes the
//! uniqueness ball with extra starting points.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificate::{certify, ConvergenceCertificate};
use crate::error::{Error, Result};
use crate::majorant::{Knot, MajorantModel, OmegaMeasure};
use crate::norm::Norm;

pub type ResidualFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;

/// Absolute allowance on ball-membership tests, absorbing rounding in the
/// distance computation.
pub const CONTAINMENT_SLACK: f64 = 1e-9;

/// Root tolerance used when a certificate has to be derived internally.
pub const DEFAULT_ROOT_TOL: f64 = 1e-13;

/// Uniqueness-probe starts are drawn from the ball of radius
/// `lambda_star * (1 - PROBE_SHRINK)`.
pub const PROBE_SHRINK: f64 = 1e-6;

/// A finite-dimensional instance of `F(x) = 0` with a fixed slope `B`.
///
/// `residual` and `jacobian` must be pure; they may be called concurrently.
#[derive(Clone)]
pub struct Problem {
    residual: ResidualFn,
    jacobian: Option<JacobianFn>,
    slope: DMatrix<f64>,
    x0: DVector<f64>,
    radius: f64,
    norm: Norm,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("dim", &self.dim())
            .field("x0", &self.x0.as_slice())
            .field("radius", &self.radius)
            .field("norm", &self.norm)
            .field("has_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl Problem {
    pub fn new<F>(x0: DVector<f64>, slope: DMatrix<f64>, radius: f64, residual: F) -> Result<Self>
    where
        F: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    {
        let n = x0.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("x0 is empty".into()));
        }
        if slope.nrows() != n || slope.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "slope is {}x{} but x0 has length {n}",
                slope.nrows(),
                slope.ncols()
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::BadParameters(format!("R = {radius} must be finite and positive")));
        }
        Ok(Problem {
            residual: Arc::new(residual),
            jacobian: None,
            slope,
            x0,
            radius,
            norm: Norm::default(),
        })
    }

    pub fn with_jacobian<J>(mut self, jacobian: J) -> Self
    where
        J: Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
    {
        self.jacobian = Some(Arc::new(jacobian));
        self
    }

    pub fn with_norm(mut self, norm: Norm) -> Self {
        self.norm = norm;
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::BadParameters(format!("R = {radius} must be finite and positive")));
        }
        self.radius = radius;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn x0(&self) -> &DVector<f64> {
        &self.x0
    }

    pub fn slope(&self) -> &DMatrix<f64> {
        &self.slope
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn has_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    pub fn residual(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let fx = (self.residual)(x);
        if fx.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "F returned {} components, expected {}",
                fx.len(),
                self.dim()
            )));
        }
        if fx.iter().any(|v| !v.is_finite()) {
            return Err(Error::EvaluationFailed("F returned a non-finite value".into()));
        }
        Ok(fx)
    }

    pub fn jacobian(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        let jac = self.jacobian.as_ref().ok_or(Error::JacobianMissing)?;
        let m = jac(x);
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(Error::DimensionMismatch("Jacobian has the wrong shape".into()));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::EvaluationFailed("Jacobian has a non-finite entry".into()));
        }
        Ok(m)
    }

    /// `||B F(x0)||`, the tightest admissible `eta`.
    pub fn initial_step_norm(&self) -> Result<f64> {
        let fx = self.residual(&self.x0)?;
        Ok(self.norm.vector(&(&self.slope * fx)))
    }

    pub fn distance_from_x0(&self, x: &DVector<f64>) -> f64 {
        self.norm.distance(x, &self.x0)
    }

    fn require_inside(&self, x: &DVector<f64>, radius: f64) -> Result<()> {
        let distance = self.distance_from_x0(x);
        if distance > radius + CONTAINMENT_SLACK {
            return Err(Error::OutsideBall { distance, radius });
        }
        Ok(())
    }
}

/// `x - B F(x)`: one residual evaluation and one matrix-vector product.
pub fn fsi_step(p: &Problem, x: &DVector<f64>) -> Result<DVector<f64>> {
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch(format!("x has length {}, expected {}", x.len(), p.dim())));
    }
    p.require_inside(x, p.radius)?;
    let fx = p.residual(x)?;
    Ok(x - &p.slope * fx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopCriteria {
    pub tol_step: f64,
    pub tol_residual: f64,
    pub max_iter: usize,
}

impl Default for StopCriteria {
    fn default() -> Self {
        StopCriteria {
            tol_step: 1e-12,
            tol_residual: 1e-12,
            max_iter: 10_000,
        }
    }
}

impl StopCriteria {
    fn validate(&self) -> Result<()> {
        let ok = |t: f64| t.is_finite() && t > 0.0;
        if !ok(self.tol_step) || !ok(self.tol_residual) || self.max_iter == 0 {
            return Err(Error::InvalidInput("stopping tolerances and max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    StepTol,
    ResidualTol,
    MaxIter,
    /// The next iterate would have left the trust ball; it was not recorded.
    LeftBall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub iterates: Vec<DVector<f64>>,
    /// `||x_{k+1} - x_k||`, one per step.
    pub step_norms: Vec<f64>,
    /// `||F(x_k)||`, one per iterate.
    pub residual_norms: Vec<f64>,
    /// `v_{k+1} - v_k`, one per step, when a certificate was attached.
    pub scalar_steps: Option<Vec<f64>>,
    /// `(v_{k+1} - v_k) - ||x_{k+1} - x_k||`.
    pub bound_slacks: Option<Vec<f64>>,
    /// `nu_star - v_k`, one per iterate.
    pub error_bounds: Option<Vec<f64>>,
    pub stop_reason: StopReason,
    /// Norm in which all distances above were measured.
    pub norm: Norm,
}

impl IterationTrace {
    pub fn steps(&self) -> usize {
        self.step_norms.len()
    }

    pub fn last(&self) -> &DVector<f64> {
        self.iterates.last().expect("a trace always holds x0")
    }

    pub fn converged(&self) -> bool {
        matches!(self.stop_reason, StopReason::StepTol | StopReason::ResidualTol)
    }

    /// Writes `k,step_norm,residual_norm,v_step,bound_slack,error_bound`
    /// rows; per-step columns are empty on the final row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "step_norm", "residual_norm", "v_step", "bound_slack", "error_bound"])?;
        let pick = |col: &Option<Vec<f64>>, k: usize| -> String {
            col.as_ref()
                .and_then(|c| c.get(k))
                .map(|v| fmt_f64(*v))
                .unwrap_or_default()
        };
        for k in 0..self.iterates.len() {
            w.write_record([
                k.to_string(),
                self.step_norms.get(k).map(|v| fmt_f64(*v)).unwrap_or_default(),
                self.residual_norms.get(k).map(|v| fmt_f64(*v)).unwrap_or_default(),
                pick(&self.scalar_steps, k),
                pick(&self.bound_slacks, k),
                pick(&self.error_bounds, k),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest decimal string that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        ryu::Buffer::new().format_finite(v).to_string()
    } else if v.is_nan() {
        "NaN".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn run_iteration(
    p: &Problem,
    start: DVector<f64>,
    stop: &StopCriteria,
    limit: f64,
) -> Result<IterationTrace> {
    let mut fx = p.residual(&start)?;
    let mut residual_norms = vec![p.norm.vector(&fx)];
    let mut iterates = vec![start];
    let mut step_norms = Vec::new();

    let stop_reason = loop {
        if residual_norms[residual_norms.len() - 1] <= stop.tol_residual {
            break StopReason::ResidualTol;
        }
        if step_norms.len() >= stop.max_iter {
            break StopReason::MaxIter;
        }
        let x = &iterates[iterates.len() - 1];
        let next = x - &p.slope * &fx;
        if p.distance_from_x0(&next) > limit + CONTAINMENT_SLACK {
            break StopReason::LeftBall;
        }
        let step = p.norm.distance(&next, x);
        fx = p.residual(&next)?;
        step_norms.push(step);
        residual_norms.push(p.norm.vector(&fx));
        iterates.push(next);
        if step <= stop.tol_step {
            break StopReason::StepTol;
        }
    };

    Ok(IterationTrace {
        iterates,
        step_norms,
        residual_norms,
        scalar_steps: None,
        bound_slacks: None,
        error_bounds: None,
        stop_reason,
        norm: p.norm,
    })
}

/// Runs the iteration from `x0`. With a certified certificate attached, the
/// trust region shrinks to `min(R, nu_star)` and every step is paired with
/// the majorizing sequence.
pub fn fsi_solve(
    p: &Problem,
    stop: &StopCriteria,
    cert: Option<&ConvergenceCertificate>,
) -> Result<(DVector<f64>, IterationTrace)> {
    stop.validate()?;
    let cert = cert.filter(|c| c.is_certified());
    let limit = match cert.and_then(|c| c.nu_star) {
        Some(nu_star) => p.radius.min(nu_star),
        None => p.radius,
    };
    let mut trace = run_iteration(p, p.x0.clone(), stop, limit)?;

    if let Some(c) = cert {
        let nu_star = c.nu_star.ok_or(Error::CertificateMissing)?;
        let terms = c.scalar_terms(trace.iterates.len())?;
        let scalar_steps: Vec<f64> = terms.windows(2).map(|w| w[1] - w[0]).collect();
        let slacks = scalar_steps
            .iter()
            .zip(&trace.step_norms)
            .map(|(v, s)| v - s)
            .collect();
        trace.error_bounds = Some(terms.iter().map(|v| nu_star - v).collect());
        trace.scalar_steps = Some(scalar_steps);
        trace.bound_slacks = Some(slacks);
    }
    Ok((trace.last().clone(), trace))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorizationEntry {
    pub k: usize,
    pub step_norm: f64,
    pub scalar_step: f64,
    pub step_slack: f64,
    pub tail_distance: Option<f64>,
    pub tail_bound: f64,
    pub tail_slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorizationReport {
    pub entries: Vec<MajorizationEntry>,
    /// Whether the tail bounds were checked (only for converged traces).
    pub tail_checked: bool,
    pub worst_slack: f64,
    pub passed: bool,
}

/// Checks `||x_{k+1} - x_k|| <= v_{k+1} - v_k` and, for converged traces,
/// `||x_final - x_k|| <= nu_star - v_k`, each up to `slack_tol`. Violations
/// are reported, not raised.
pub fn verify_majorization(
    trace: &IterationTrace,
    model: &MajorantModel,
    slack_tol: f64,
) -> Result<MajorizationReport> {
    let cert = certify(model, DEFAULT_ROOT_TOL)?;
    if !cert.is_certified() {
        return Err(Error::CertificateMissing);
    }
    if trace.steps() == 0 {
        return Err(Error::InvalidInput("trace has no steps".into()));
    }
    let nu_star = cert.nu_star.ok_or(Error::CertificateMissing)?;
    let terms = cert.scalar_terms(trace.iterates.len())?;
    let last = trace.last();
    let tail_checked = trace.converged();

    let mut worst = f64::INFINITY;
    let mut passed = true;
    let mut entries = Vec::with_capacity(trace.steps());
    for k in 0..trace.steps() {
        let scalar_step = terms[k + 1] - terms[k];
        let step_slack = scalar_step - trace.step_norms[k];
        let tail_bound = nu_star - terms[k];
        let tail_distance = tail_checked.then(|| trace.norm.distance(last, &trace.iterates[k]));
        let tail_slack = tail_distance.map(|d| tail_bound - d);

        worst = worst.min(step_slack);
        passed &= step_slack >= -slack_tol;
        if let Some(s) = tail_slack {
            worst = worst.min(s);
            passed &= s >= -slack_tol;
        }
        entries.push(MajorizationEntry {
            k,
            step_norm: trace.step_norms[k],
            scalar_step,
            step_slack,
            tail_distance,
            tail_bound,
            tail_slack,
        });
    }
    Ok(MajorizationReport {
        entries,
        tail_checked,
        worst_slack: worst,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateMode {
    /// Bounds `||B F'(x) - I||`.
    Direct,
    /// Bounds `||B (F'(x) - F'(x0))||`.
    Centered,
}

/// Points on the sphere `||x - center|| = radius`.
///
/// In one dimension the sphere is `{center - radius, center + radius}`. In
/// higher dimensions the `2n` axis points are always included, followed by
/// `samples` seeded pseudorandom points; for the max norm every other random
/// point is a vertex of the cube.
pub fn sphere_points<R: Rng>(
    center: &DVector<f64>,
    radius: f64,
    norm: Norm,
    samples: usize,
    rng: &mut R,
) -> Vec<DVector<f64>> {
    let n = center.len();
    let mut points = Vec::with_capacity(2 * n + samples);
    for i in 0..n {
        for sign in [-1.0, 1.0] {
            let mut x = center.clone();
            x[i] += sign * radius;
            points.push(x);
        }
    }
    if n == 1 {
        return points;
    }
    for s in 0..samples {
        let dir: DVector<f64> = if norm == Norm::Max && s % 2 == 0 {
            DVector::from_fn(n, |_, _| if rng.random::<bool>() { 1.0 } else { -1.0 })
        } else {
            DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
        };
        let len = norm.vector(&dir);
        if len > 0.0 {
            points.push(center + dir * (radius / len));
        }
    }
    points
}

/// Empirical tabulated measure from Jacobian samples on spheres around `x0`.
///
/// Knot values are the sample maxima, made non-decreasing by a running
/// maximum. The result is a lower envelope of the exact measure: it can only
/// miss the supremum, never overshoot it.
pub fn estimate_omega(
    p: &Problem,
    mode: EstimateMode,
    radii: &[f64],
    samples_per_radius: usize,
    seed: u64,
) -> Result<OmegaMeasure> {
    let j0 = p.jacobian(&p.x0)?;
    check_radii(p, radii)?;
    let n = p.dim();
    let identity = DMatrix::<f64>::identity(n, n);
    let deviation = |x: &DVector<f64>| -> Result<f64> {
        let jx = p.jacobian(x)?;
        let m = match mode {
            EstimateMode::Direct => &p.slope * jx - &identity,
            EstimateMode::Centered => &p.slope * (jx - &j0),
        };
        Ok(p.norm.matrix(&m))
    };

    let knot0 = match mode {
        EstimateMode::Direct => deviation(&p.x0)?,
        EstimateMode::Centered => 0.0,
    };
    if mode == EstimateMode::Direct && knot0 >= 1.0 {
        return Err(Error::NuNotContractive { nu: knot0 });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut knots = vec![Knot::new(0.0, knot0)];
    let mut running = knot0;
    for &r in radii {
        let points = sphere_points(&p.x0, r, p.norm, samples_per_radius, &mut rng);
        let values = points
            .par_iter()
            .map(deviation)
            .collect::<Result<Vec<f64>>>()?;
        running = values.into_iter().fold(running, f64::max);
        knots.push(Knot::new(r, running));
    }
    OmegaMeasure::tabulated(knots)
}

/// `nu + omega0(v)`: the centered estimate shifted by the radius-0 value of
/// the direct one. Dominates the direct measure whenever the centered
/// estimate attains its supremum.
pub fn estimate_centered_with_nu(
    p: &Problem,
    radii: &[f64],
    samples_per_radius: usize,
    seed: u64,
) -> Result<OmegaMeasure> {
    let j0 = p.jacobian(&p.x0)?;
    let n = p.dim();
    let nu = p.norm.matrix(&(&p.slope * j0 - DMatrix::<f64>::identity(n, n)));
    if nu >= 1.0 {
        return Err(Error::NuNotContractive { nu });
    }
    let centered = estimate_omega(p, EstimateMode::Centered, radii, samples_per_radius, seed)?;
    let knots = centered
        .knots()
        .expect("estimate_omega returns a tabulated measure")
        .iter()
        .map(|k| Knot::new(k.radius, k.value + nu))
        .collect();
    OmegaMeasure::tabulated(knots)
}

/// `count` equally spaced radii on `(0, R]`.
pub fn uniform_radii(radius: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|i| radius * i as f64 / count as f64).collect()
}

fn check_radii(p: &Problem, radii: &[f64]) -> Result<()> {
    let mut prev = 0.0;
    for &r in radii {
        if !(r.is_finite() && r > prev) {
            return Err(Error::InvalidInput("radii must be positive and strictly increasing".into()));
        }
        if r > p.radius {
            return Err(Error::RadiusOutOfRange { v: r, limit: p.radius });
        }
        prev = r;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    pub start: Vec<f64>,
    pub limit: Option<Vec<f64>>,
    pub stop_reason: Option<StopReason>,
    pub steps: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub probe_radius: f64,
    pub outcomes: Vec<ProbeOutcome>,
    /// Largest distance between two limits; `None` if no start converged.
    pub max_pairwise_distance: Option<f64>,
    pub passed: bool,
}

/// Starts the iteration from `num_starts` points strictly inside the
/// uniqueness ball (the first one is `x0` itself) and checks that every run
/// converges to the same limit within `tol`.
pub fn uniqueness_probe(
    p: &Problem,
    cert: &ConvergenceCertificate,
    num_starts: usize,
    seed: u64,
    tol: f64,
) -> Result<UniquenessReport> {
    uniqueness_probe_with(p, cert, num_starts, seed, tol, &StopCriteria::default())
}

pub fn uniqueness_probe_with(
    p: &Problem,
    cert: &ConvergenceCertificate,
    num_starts: usize,
    seed: u64,
    tol: f64,
    stop: &StopCriteria,
) -> Result<UniquenessReport> {
    stop.validate()?;
    let lambda_star = cert
        .lambda_star
        .filter(|_| cert.is_certified())
        .ok_or(Error::CertificateMissing)?;
    if lambda_star > p.radius + CONTAINMENT_SLACK {
        return Err(Error::RadiusOutOfRange { v: lambda_star, limit: p.radius });
    }
    let probe_radius = lambda_star * (1.0 - PROBE_SHRINK);
    let n = p.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = Vec::with_capacity(num_starts);
    if num_starts > 0 {
        starts.push(p.x0.clone());
    }
    while starts.len() < num_starts {
        let offset = if n == 1 {
            DVector::from_element(1, rng.random_range(-probe_radius..probe_radius))
        } else {
            let dir = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let len = p.norm.vector(&dir);
            if len == 0.0 {
                continue;
            }
            let scale = probe_radius * rng.random::<f64>().powf(1.0 / n as f64);
            dir * (scale / len)
        };
        starts.push(&p.x0 + offset);
    }

    let outcomes: Vec<ProbeOutcome> = starts
        .into_par_iter()
        .map(|start| {
            let start_vec = start.as_slice().to_vec();
            match run_iteration(p, start, stop, p.radius) {
                Ok(trace) => ProbeOutcome {
                    start: start_vec,
                    limit: trace.converged().then(|| trace.last().as_slice().to_vec()),
                    stop_reason: Some(trace.stop_reason),
                    steps: trace.steps(),
                    error: None,
                },
                Err(e) => ProbeOutcome {
                    start: start_vec,
                    limit: None,
                    stop_reason: None,
                    steps: 0,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let limits: Vec<DVector<f64>> = outcomes
        .iter()
        .filter_map(|o| o.limit.as_ref().map(|l| DVector::from_column_slice(l)))
        .collect();
    let mut max_dist: Option<f64> = None;
    for (i, a) in limits.iter().enumerate() {
        max_dist.get_or_insert(0.0);
        for b in &limits[i + 1..] {
            let d = p.norm.distance(a, b);
            max_dist = Some(max_dist.map_or(d, |m| m.max(d)));
        }
    }
    let passed = !outcomes.is_empty()
        && limits.len() == outcomes.len()
        && max_dist.is_some_and(|d| d <= tol);
    Ok(UniquenessReport {
        probe_radius,
        outcomes,
        max_pairwise_distance: max_dist,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::HoelderParams;
    use approx::assert_abs_diff_eq;

    fn quadratic(x0: f64, b: f64, radius: f64) -> Problem {
        Problem::new(
            DVector::from_element(1, x0),
            DMatrix::from_element(1, 1, b),
            radius,
            |x: &DVector<f64>| DVector::from_element(1, x[0] * x[0] - 2.0),
        )
        .unwrap()
        .with_jacobian(|x: &DVector<f64>| DMatrix::from_element(1, 1, 2.0 * x[0]))
    }

    fn linear() -> (Problem, DVector<f64>) {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let b = DVector::from_vec(vec![1.0, 2.0]);
        let inv = a.clone().try_inverse().unwrap();
        let sol = &inv * &b;
        let (a2, b2) = (a.clone(), b.clone());
        let p = Problem::new(DVector::zeros(2), inv, 10.0, move |x: &DVector<f64>| &a2 * x - &b2)
            .unwrap()
            .with_jacobian(move |_: &DVector<f64>| a.clone());
        (p, sol)
    }

    #[test]
    fn step_examples() {
        let p = quadratic(2.0, 0.25, 10.0);
        let x = fsi_step(&p, &DVector::from_element(1, 2.0)).unwrap();
        assert_eq!(x[0], 1.5);

        let (p, sol) = linear();
        let x = fsi_step(&p, &DVector::from_vec(vec![0.3, -0.7])).unwrap();
        assert_abs_diff_eq!((x - &sol).amax(), 0.0, epsilon = 1e-14);

        let p = quadratic(2f64.sqrt(), 0.25, 1.0);
        let root = p.x0().clone();
        assert_abs_diff_eq!(fsi_step(&p, &root).unwrap()[0], root[0], epsilon = 1e-15);
    }

    #[test]
    fn step_rejects_points_outside_ball() {
        let p = quadratic(2.0, 0.25, 1.0);
        assert!(matches!(
            fsi_step(&p, &DVector::from_element(1, 3.5)),
            Err(Error::OutsideBall { .. })
        ));
    }

    #[test]
    fn singular_slope_is_applied_not_inverted() {
        let p = Problem::new(
            DVector::from_vec(vec![1.0, 1.0]),
            DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]),
            5.0,
            |x: &DVector<f64>| x.map(|v| v - 0.5),
        )
        .unwrap();
        let x = fsi_step(&p, p.x0()).unwrap();
        assert_eq!(x.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn evaluation_failure_propagates() {
        let p = Problem::new(
            DVector::from_element(1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            5.0,
            |_: &DVector<f64>| DVector::from_element(1, f64::NAN),
        )
        .unwrap();
        assert!(matches!(fsi_solve(&p, &StopCriteria::default(), None), Err(Error::EvaluationFailed(_))));
    }

    #[test]
    fn solve_quadratic_to_sqrt2() {
        let p = quadratic(2.0, 0.25, 10.0);
        let (x, trace) = fsi_solve(&p, &StopCriteria::default(), None).unwrap();
        assert_abs_diff_eq!(x[0], 2f64.sqrt(), epsilon = 1e-10);
        assert!(trace.converged());
        assert_eq!(trace.step_norms.len() + 1, trace.iterates.len());
        assert_eq!(trace.residual_norms.len(), trace.iterates.len());
    }

    #[test]
    fn solve_linear_takes_one_step() {
        let (p, sol) = linear();
        let (x, trace) = fsi_solve(&p, &StopCriteria::default(), None).unwrap();
        assert_eq!(trace.steps(), 1);
        assert_eq!(trace.stop_reason, StopReason::ResidualTol);
        assert_abs_diff_eq!((x - sol).amax(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn solve_with_certificate_records_bounds() {
        let p = quadratic(2.0, 0.25, 10.0);
        let model = HoelderParams::new(0.5, 1.0, 0.0, 0.5).unwrap().model(10.0).unwrap();
        let cert = certify(&model, DEFAULT_ROOT_TOL).unwrap();
        let (_, trace) = fsi_solve(&p, &StopCriteria::default(), Some(&cert)).unwrap();
        let slacks = trace.bound_slacks.as_ref().unwrap();
        assert_eq!(slacks.len(), trace.steps());
        assert!(slacks.iter().all(|s| *s >= -1e-9));
        assert_eq!(trace.error_bounds.as_ref().unwrap().len(), trace.iterates.len());
        assert!(trace.steps() > crate::certificate::PREVIEW_LEN);
    }

    #[test]
    fn wrong_model_leaves_ball() {
        // claims eta = 0.1 although the first step has length 0.5
        let p = quadratic(2.0, 0.25, 10.0);
        let model = HoelderParams::new(0.5, 1.0, 0.0, 0.1).unwrap().model(10.0).unwrap();
        let cert = certify(&model, DEFAULT_ROOT_TOL).unwrap();
        let (_, trace) = fsi_solve(&p, &StopCriteria::default(), Some(&cert)).unwrap();
        assert_eq!(trace.stop_reason, StopReason::LeftBall);
        assert_eq!(trace.steps(), 0);
    }

    #[test]
    fn verify_reports_violation_without_failing() {
        let p = quadratic(2.0, 0.25, 10.0);
        let (_, trace) = fsi_solve(&p, &StopCriteria::default(), None).unwrap();
        let model = HoelderParams::new(0.5, 1.0, 0.0, 0.1).unwrap().model(10.0).unwrap();
        let report = verify_majorization(&trace, &model, 1e-9).unwrap();
        assert!(!report.passed);
        assert!(report.worst_slack < 0.0);
    }

    #[test]
    fn verify_requires_certified_model() {
        let p = quadratic(2.0, 0.25, 10.0);
        let (_, trace) = fsi_solve(&p, &StopCriteria::default(), None).unwrap();
        let model = HoelderParams::new(1.0, 1.0, 0.0, 1.0).unwrap().model(10.0).unwrap();
        assert_eq!(
            verify_majorization(&trace, &model, 1e-9),
            Err(Error::CertificateMissing)
        );
    }

    #[test]
    fn verify_single_step_linear() {
        let (p, _) = linear();
        let (_, trace) = fsi_solve(&p, &StopCriteria::default(), None).unwrap();
        let eta = p.initial_step_norm().unwrap();
        let model = MajorantModel::new(eta, 10.0, OmegaMeasure::hoelder(0.0, 1.0, 0.0).unwrap()).unwrap();
        let report = verify_majorization(&trace, &model, 1e-12).unwrap();
        assert!(report.passed);
        assert_eq!(report.entries[0].scalar_step, eta);
    }

    #[test]
    fn estimate_quadratic_is_exact() {
        let p = quadratic(2.0, 0.25, 10.0);
        let radii = uniform_radii(1.0, 8);
        for mode in [EstimateMode::Direct, EstimateMode::Centered] {
            let m = estimate_omega(&p, mode, &radii, 16, 7).unwrap();
            let knots = m.knots().unwrap();
            assert_eq!(knots[0], Knot::new(0.0, 0.0));
            for k in &knots[1..] {
                assert_eq!(k.value, k.radius / 2.0);
            }
        }
    }

    #[test]
    fn estimate_linear_is_zero() {
        let (p, _) = linear();
        let m = estimate_omega(&p, EstimateMode::Direct, &uniform_radii(2.0, 4), 32, 1).unwrap();
        assert!(m.knots().unwrap().iter().all(|k| k.value < 1e-15));
    }

    #[test]
    fn estimate_errors() {
        let p = Problem::new(
            DVector::from_element(1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            5.0,
            |x: &DVector<f64>| x.clone(),
        )
        .unwrap();
        assert_eq!(
            estimate_omega(&p, EstimateMode::Direct, &[1.0], 4, 0),
            Err(Error::JacobianMissing)
        );
        let p = quadratic(2.0, 1.0, 10.0);
        assert!(matches!(
            estimate_omega(&p, EstimateMode::Direct, &[1.0], 4, 0),
            Err(Error::NuNotContractive { .. })
        ));
        let p = quadratic(2.0, 0.25, 1.0);
        assert!(estimate_omega(&p, EstimateMode::Centered, &[0.5, 0.4], 4, 0).is_err());
        assert!(estimate_omega(&p, EstimateMode::Centered, &[2.0], 4, 0).is_err());
    }

    #[test]
    fn sphere_points_lie_on_sphere() {
        let c = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for norm in [Norm::Max, Norm::One, Norm::Two] {
            let pts = sphere_points(&c, 0.7, norm, 20, &mut rng);
            assert_eq!(pts.len(), 26);
            for x in pts {
                assert_abs_diff_eq!(norm.distance(&x, &c), 0.7, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn probe_single_start_matches_main_solve() {
        let p = quadratic(2.0, 0.25, 10.0);
        let model = HoelderParams::new(0.5, 1.0, 0.0, 0.5).unwrap().model(10.0).unwrap();
        let cert = certify(&model, DEFAULT_ROOT_TOL).unwrap();
        let report = uniqueness_probe(&p, &cert, 1, 0, 1e-8).unwrap();
        assert!(report.passed);
        let (x, _) = fsi_solve(&p, &StopCriteria::default(), None).unwrap();
        assert_eq!(report.outcomes[0].limit.as_ref().unwrap()[0], x[0]);
    }

    #[test]
    fn probe_requires_certificate() {
        let p = quadratic(2.0, 0.25, 10.0);
        let model = HoelderParams::new(1.0, 1.0, 0.0, 1.0).unwrap().model(10.0).unwrap();
        let cert = certify(&model, DEFAULT_ROOT_TOL).unwrap();
        assert_eq!(uniqueness_probe(&p, &cert, 4, 0, 1e-8), Err(Error::CertificateMissing));
    }

    #[test]
    fn trace_csv_layout() {
        let p = quadratic(2.0, 0.25, 10.0);
        let model = HoelderParams::new(0.5, 1.0, 0.0, 0.5).unwrap().model(10.0).unwrap();
        let cert = certify(&model, DEFAULT_ROOT_TOL).unwrap();
        let (_, trace) = fsi_solve(&p, &StopCriteria::default(), Some(&cert)).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,step_norm,residual_norm,v_step,bound_slack,error_bound");
        assert_eq!(lines.len(), trace.iterates.len() + 1);
        assert!(lines[1].starts_with("0,0.5,2.0,0.5,"));
        assert!(lines.last().unwrap().contains(",,"));
    }
}
