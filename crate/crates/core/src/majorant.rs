//! Continuity measures, the scalar majorant and its fixed-point problem.
//!
//! A continuity measure `omega` bounds `||B F'(x) - I||` as a function of the
//! distance `||x - x0||`. Integrating it gives the majorant
//!
//! ```text
//! phi(v) = eta + integral_0^v omega(l) dl,      g(v) = phi(v) - v
//! ```
//!
//! whose smallest fixed point `nu_star` is the existence radius and whose
//! fixed-point iterates `v_{k+1} = phi(v_k)` dominate the vector iteration.
//! Every scalar subproblem here is solved by bisection on a bracket that the
//! convexity of `g` makes available.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on bisection steps for every bracketed root search.
pub const BISECTION_MAX_ITER: usize = 200;

/// Relative band (on eta) inside which a minimum `g(gamma_star) <= 0` is
/// treated as a tangency, so that the minimal and maximal roots merge.
pub const TANGENCY_REL: f64 = 1e-9;

/// Roots closer than this multiple of the root tolerance are merged.
pub const ROOT_MERGE_FACTOR: f64 = 10.0;

/// A tabulation point of a piecewise-linear measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub radius: f64,
    pub value: f64,
}

impl Knot {
    pub fn new(radius: f64, value: f64) -> Self {
        Knot { radius, value }
    }
}

/// A non-decreasing continuity measure `omega(v)`, with `omega(0) = nu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OmegaMeasure {
    /// `omega(v) = nu + l0 * v^alpha`.
    Hoelder { l0: f64, alpha: f64, nu: f64 },
    /// Piecewise-linear interpolant through the knots. The first knot sits at
    /// radius 0; evaluation past the last knot is an error.
    Tabulated { knots: Vec<Knot> },
}

impl OmegaMeasure {
    pub fn hoelder(l0: f64, alpha: f64, nu: f64) -> Result<Self> {
        let m = OmegaMeasure::Hoelder { l0, alpha, nu };
        m.validate()?;
        Ok(m)
    }

    pub fn tabulated(knots: Vec<Knot>) -> Result<Self> {
        let m = OmegaMeasure::Tabulated { knots };
        m.validate()?;
        Ok(m)
    }

    /// Checks the field invariants. `nu >= 1` is accepted here; it is
    /// rejected later, when a certificate is requested.
    pub fn validate(&self) -> Result<()> {
        match self {
            OmegaMeasure::Hoelder { l0, alpha, nu } => {
                if !(l0.is_finite() && *l0 >= 0.0) {
                    return Err(Error::InvalidMeasure(format!("l0 = {l0} must be finite and >= 0")));
                }
                if !(*alpha > 0.0 && *alpha <= 1.0) {
                    return Err(Error::InvalidMeasure(format!("alpha = {alpha} must lie in (0, 1]")));
                }
                if !(nu.is_finite() && *nu >= 0.0) {
                    return Err(Error::InvalidMeasure(format!("nu = {nu} must be finite and >= 0")));
                }
                Ok(())
            }
            OmegaMeasure::Tabulated { knots } => {
                if knots.len() < 2 {
                    return Err(Error::InvalidMeasure("at least two knots are required".into()));
                }
                if knots[0].radius != 0.0 {
                    return Err(Error::InvalidMeasure("the first knot must sit at radius 0".into()));
                }
                for k in knots {
                    if !(k.radius.is_finite() && k.value.is_finite() && k.value >= 0.0) {
                        return Err(Error::InvalidMeasure(format!(
                            "knot ({}, {}) must be finite with a non-negative value",
                            k.radius, k.value
                        )));
                    }
                }
                for w in knots.windows(2) {
                    if w[1].radius <= w[0].radius {
                        return Err(Error::InvalidMeasure("knot radii must be strictly increasing".into()));
                    }
                    if w[1].value < w[0].value {
                        return Err(Error::InvalidMeasure(format!(
                            "measure decreases between radii {} and {}",
                            w[0].radius, w[1].radius
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// `omega(0)`.
    pub fn nu(&self) -> f64 {
        match self {
            OmegaMeasure::Hoelder { nu, .. } => *nu,
            OmegaMeasure::Tabulated { knots } => knots[0].value,
        }
    }

    /// Largest radius at which the measure is defined.
    pub fn domain_end(&self) -> f64 {
        match self {
            OmegaMeasure::Hoelder { .. } => f64::INFINITY,
            OmegaMeasure::Tabulated { knots } => knots[knots.len() - 1].radius,
        }
    }

    pub fn eval(&self, v: f64) -> Result<f64> {
        self.check_domain(v)?;
        Ok(match self {
            OmegaMeasure::Hoelder { l0, alpha, nu } => nu + l0 * v.powf(*alpha),
            OmegaMeasure::Tabulated { knots } => {
                let idx = knots.partition_point(|k| k.radius <= v);
                if idx >= knots.len() {
                    knots[knots.len() - 1].value
                } else {
                    let (a, b) = (knots[idx - 1], knots[idx]);
                    let t = (v - a.radius) / (b.radius - a.radius);
                    a.value + t * (b.value - a.value)
                }
            }
        })
    }

    /// `integral_0^v omega(l) dl`, exact for both representations.
    pub fn integral(&self, v: f64) -> Result<f64> {
        self.check_domain(v)?;
        Ok(match self {
            OmegaMeasure::Hoelder { l0, alpha, nu } => {
                nu * v + l0 * v.powf(1.0 + alpha) / (1.0 + alpha)
            }
            OmegaMeasure::Tabulated { knots } => {
                let mut acc = 0.0;
                for w in knots.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    if v <= a.radius {
                        break;
                    }
                    let end = v.min(b.radius);
                    let slope = (b.value - a.value) / (b.radius - a.radius);
                    let at_end = a.value + slope * (end - a.radius);
                    acc += 0.5 * (a.value + at_end) * (end - a.radius);
                }
                acc
            }
        })
    }

    pub fn knots(&self) -> Option<&[Knot]> {
        match self {
            OmegaMeasure::Tabulated { knots } => Some(knots),
            OmegaMeasure::Hoelder { .. } => None,
        }
    }

    fn check_domain(&self, v: f64) -> Result<()> {
        let end = self.domain_end();
        if !(v >= 0.0 && v <= end) {
            return Err(Error::RadiusOutOfRange { v, limit: end });
        }
        Ok(())
    }
}

/// Classification of the uniqueness radius.
///
/// `B1`: uniqueness holds in the closed ball of radius `lambda_star`.
/// `B2`: `lambda_star` is itself a fixed point of `phi`; uniqueness holds in
/// the open ball only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryCase {
    B1,
    B2,
}

/// The maximal root of `g` on `[nu_star, R]`, or a marker that `g` is still
/// negative at `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MaximalRoot {
    Root(f64),
    AtBoundary,
}

impl MaximalRoot {
    pub fn value(&self) -> Option<f64> {
        match self {
            MaximalRoot::Root(v) => Some(*v),
            MaximalRoot::AtBoundary => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarRoots {
    pub nu_star: f64,
    pub nu_star_star: MaximalRoot,
    pub gamma_star: f64,
    pub lambda_star: f64,
    pub boundary_case: BoundaryCase,
}

/// The bundle `(eta, R, omega)` that defines `phi` and `g` on `[0, R]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel")]
pub struct MajorantModel {
    eta: f64,
    #[serde(rename = "R")]
    radius: f64,
    omega: OmegaMeasure,
}

#[derive(Deserialize)]
struct RawModel {
    eta: f64,
    #[serde(rename = "R")]
    radius: f64,
    omega: OmegaMeasure,
}

impl TryFrom<RawModel> for MajorantModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        MajorantModel::new(raw.eta, raw.radius, raw.omega)
    }
}

impl MajorantModel {
    pub fn new(eta: f64, radius: f64, omega: OmegaMeasure) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidModel(format!("eta = {eta} must be finite and positive")));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidModel(format!("R = {radius} must be finite and positive")));
        }
        omega.validate()?;
        if omega.domain_end() < radius {
            return Err(Error::InvalidModel(format!(
                "tabulated measure ends at {} but R = {radius}",
                omega.domain_end()
            )));
        }
        Ok(MajorantModel { eta, radius, omega })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn omega(&self) -> &OmegaMeasure {
        &self.omega
    }

    pub fn nu(&self) -> f64 {
        self.omega.nu()
    }

    /// Same majorant on a different ball.
    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        MajorantModel::new(self.eta, radius, self.omega.clone())
    }

    fn check_radius(&self, v: f64) -> Result<()> {
        if !(v >= 0.0 && v <= self.radius) {
            return Err(Error::RadiusOutOfRange { v, limit: self.radius });
        }
        Ok(())
    }

    pub fn omega_at(&self, v: f64) -> Result<f64> {
        self.check_radius(v)?;
        self.omega.eval(v)
    }

    pub fn phi(&self, v: f64) -> Result<f64> {
        self.check_radius(v)?;
        Ok(self.eta + self.omega.integral(v)?)
    }

    pub fn g(&self, v: f64) -> Result<f64> {
        self.check_radius(v)?;
        match &self.omega {
            // Grouped so that cancellation near a root stays small.
            OmegaMeasure::Hoelder { l0, alpha, nu } => {
                Ok(self.eta - (1.0 - nu) * v + l0 * v.powf(1.0 + alpha) / (1.0 + alpha))
            }
            OmegaMeasure::Tabulated { .. } => Ok(self.phi(v)? - v),
        }
    }

    /// `sup { gamma in (0, R] : omega(gamma) < 1 }`.
    pub fn gamma_star(&self) -> Result<f64> {
        let nu = self.nu();
        if nu >= 1.0 {
            return Err(Error::NuNotContractive { nu });
        }
        match &self.omega {
            OmegaMeasure::Hoelder { l0, alpha, nu } => {
                if *l0 == 0.0 {
                    Ok(self.radius)
                } else {
                    Ok(((1.0 - nu) / l0).powf(1.0 / alpha).min(self.radius))
                }
            }
            OmegaMeasure::Tabulated { knots } => {
                for w in knots.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    if a.radius >= self.radius {
                        break;
                    }
                    if b.value >= 1.0 {
                        let t = (1.0 - a.value) / (b.value - a.value);
                        let crossing = a.radius + t * (b.radius - a.radius);
                        return Ok(crossing.min(self.radius));
                    }
                }
                Ok(self.radius)
            }
        }
    }

    /// Size of the floating-point noise in an evaluation of `g(v)`.
    fn rounding_floor(&self, v: f64) -> Result<f64> {
        Ok(16.0 * f64::EPSILON * (self.eta + v + self.phi(v)?.abs()))
    }

    /// Constraint A: `phi(gamma_star) <= gamma_star`, up to rounding in `g`.
    pub fn constraint_a_holds(&self) -> Result<bool> {
        let gamma = self.gamma_star()?;
        Ok(self.g(gamma)? <= self.rounding_floor(gamma)?)
    }

    /// Minimal fixed point of `phi` on `[0, R]`, or `None` when constraint A
    /// fails. The returned value never lies below the exact root.
    pub fn minimal_root(&self, tol: f64) -> Result<Option<f64>> {
        check_tol(tol)?;
        let gamma = self.gamma_star()?;
        let g_gamma = self.g(gamma)?;
        if g_gamma > self.rounding_floor(gamma)? {
            return Ok(None);
        }
        if g_gamma >= 0.0 {
            return Ok(Some(gamma));
        }
        if let OmegaMeasure::Hoelder { l0, nu, .. } = self.omega {
            if l0 == 0.0 {
                return Ok(Some(self.eta / (1.0 - nu)));
            }
        }
        let g_tol = tol * self.eta.max(1.0);
        bisect(|v| self.g(v), 0.0, gamma, tol, g_tol).map(Some)
    }

    /// All roots and radii of the scalar problem, or `None` when no minimal
    /// root exists.
    pub fn roots(&self, tol: f64) -> Result<Option<ScalarRoots>> {
        let Some(nu_star) = self.minimal_root(tol)? else {
            return Ok(None);
        };
        let gamma_star = self.gamma_star()?;
        let tangent =
            gamma_star < self.radius && self.g(gamma_star)? >= -TANGENCY_REL * self.eta;

        let nu_star_star = if tangent {
            MaximalRoot::Root(nu_star)
        } else {
            let g_end = self.g(self.radius)?;
            if g_end < 0.0 {
                MaximalRoot::AtBoundary
            } else if g_end == 0.0 {
                MaximalRoot::Root(self.radius)
            } else {
                let g_tol = tol * self.eta.max(1.0);
                let r = bisect(|v| self.g(v), self.radius, gamma_star, tol, g_tol)?;
                if r - nu_star < ROOT_MERGE_FACTOR * tol {
                    MaximalRoot::Root(nu_star)
                } else {
                    MaximalRoot::Root(r)
                }
            }
        };

        let (lambda_star, boundary_case) = match nu_star_star {
            MaximalRoot::AtBoundary => (self.radius, BoundaryCase::B1),
            MaximalRoot::Root(r) if r <= nu_star => (nu_star, BoundaryCase::B1),
            MaximalRoot::Root(r) => (r, BoundaryCase::B2),
        };

        Ok(Some(ScalarRoots {
            nu_star,
            nu_star_star,
            gamma_star,
            lambda_star,
            boundary_case,
        }))
    }

    pub fn maximal_root(&self, tol: f64) -> Result<MaximalRoot> {
        self.roots(tol)?
            .map(|r| r.nu_star_star)
            .ok_or(Error::NotCertified)
    }

    pub fn lambda_star(&self, tol: f64) -> Result<(f64, BoundaryCase)> {
        self.roots(tol)?
            .map(|r| (r.lambda_star, r.boundary_case))
            .ok_or(Error::NotCertified)
    }

    /// The first `count` terms `v_0 = 0, v_{k+1} = phi(v_k)`, without any
    /// stopping test.
    pub fn majorizing_terms(&self, count: usize) -> Result<Vec<f64>> {
        let mut terms = Vec::with_capacity(count);
        let mut v = 0.0;
        for _ in 0..count {
            terms.push(v);
            v = self.phi(v)?.min(self.radius);
        }
        Ok(terms)
    }

    /// The majorizing sequence, truncated once an increment drops to `tol`.
    pub fn scalar_sequence(&self, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        if self.minimal_root(tol)?.is_none() {
            return Err(Error::NotCertified);
        }
        let mut seq = vec![0.0];
        let mut v = 0.0;
        for _ in 0..max_iter {
            let next = self.phi(v)?.min(self.radius);
            seq.push(next);
            if next - v <= tol {
                return Ok(seq);
            }
            v = next;
        }
        Err(Error::MaxIterExceeded { partial: seq })
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance {tol} must be finite and positive")));
    }
    Ok(())
}

/// Bisection on a bracket with `f(outer) > 0 >= f(inner)`. Returns the end
/// that keeps `f <= 0`.
pub(crate) fn bisect<F>(f: F, mut outer: f64, mut inner: f64, tol: f64, f_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut f_inner = f(inner)?;
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (outer + inner);
        if mid == outer || mid == inner {
            break;
        }
        let fm = f(mid)?;
        if fm > 0.0 {
            outer = mid;
        } else {
            inner = mid;
            f_inner = fm;
        }
        if (outer - inner).abs() <= tol && f_inner.abs() <= f_tol {
            break;
        }
    }
    Ok(inner)
}
