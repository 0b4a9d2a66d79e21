//! Bundled problems with known constants, used as oracles for certificates,
//! traces and the measure estimator.
//!
//! Builders may invert matrices to construct a slope; the solver never does.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorant::{MajorantModel, OmegaMeasure};
use crate::norm::Norm;
use crate::solver::Problem;

/// A fixture parameter: a number, a vector or a row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Scalar(f64),
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FixtureSpec {
    #[serde(alias = "name")]
    pub fixture: String,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
    #[serde(default)]
    pub norm: Option<Norm>,
    #[serde(rename = "R", default)]
    pub radius: Option<f64>,
}

impl FixtureSpec {
    pub fn new(name: &str) -> Self {
        FixtureSpec {
            fixture: name.to_string(),
            ..Default::default()
        }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), ParamValue::Scalar(value));
        self
    }

    pub fn vector(mut self, key: &str, value: &[f64]) -> Self {
        self.params.insert(key.to_string(), ParamValue::Vector(value.to_vec()));
        self
    }

    pub fn with_norm(mut self, norm: Norm) -> Self {
        self.norm = Some(norm);
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = Some(radius);
        self
    }
}

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Closed-form constants of a fixture.
#[derive(Clone)]
pub struct Analytic {
    /// Hoelder majorant `nu + l0 v^alpha` of `||B F'(x) - I||`.
    pub l0: f64,
    pub alpha: f64,
    pub nu: f64,
    pub eta: f64,
    pub known_solution: Option<DVector<f64>>,
    /// The exact supremum of `||B F'(x) - I||` over the ball of radius `v`,
    /// when it has a closed form.
    pub exact_omega: Option<ScalarFn>,
}

impl fmt::Debug for Analytic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Analytic")
            .field("l0", &self.l0)
            .field("alpha", &self.alpha)
            .field("nu", &self.nu)
            .field("eta", &self.eta)
            .field("known_solution", &self.known_solution.as_ref().map(|s| s.as_slice().to_vec()))
            .field("exact_omega", &self.exact_omega.is_some())
            .finish()
    }
}

impl Analytic {
    pub fn omega(&self) -> Result<OmegaMeasure> {
        OmegaMeasure::hoelder(self.l0, self.alpha, self.nu)
    }

    pub fn model(&self, radius: f64) -> Result<MajorantModel> {
        MajorantModel::new(self.eta, radius, self.omega()?)
    }
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub problem: Problem,
    pub analytic: Option<Analytic>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamInfo {
    pub name: &'static str,
    pub kind: &'static str,
    pub default: &'static str,
    pub description: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub default_norm: Norm,
    pub default_radius: &'static str,
    pub params: Vec<ParamInfo>,
}

const fn param(
    name: &'static str,
    kind: &'static str,
    default: &'static str,
    description: &'static str,
) -> ParamInfo {
    ParamInfo {
        name,
        kind,
        default,
        description,
    }
}

pub fn fixture_catalog() -> Vec<FixtureInfo> {
    vec![
        FixtureInfo {
            name: "scalar_quadratic",
            summary: "F(x) = x^2 - c with slope b; omega(v) = |2 b x0 - 1| + 2|b| v exactly",
            default_norm: Norm::Max,
            default_radius: "10",
            params: vec![
                param("c", "scalar", "2", "constant term"),
                param("x0", "scalar", "2", "starting point"),
                param("b", "scalar", "0.25", "fixed slope"),
            ],
        },
        FixtureInfo {
            name: "scalar_holder",
            summary: "F(x) = sign(x-a)|x-a|^(1+alpha)/(1+alpha) + c; F' is alpha-Hoelder, not Lipschitz at a",
            default_norm: Norm::Max,
            default_radius: "0.5",
            params: vec![
                param("a", "scalar", "0", "location of the Hoelder singularity"),
                param("alpha", "scalar", "0.5", "Hoelder exponent in (0, 1]"),
                param("c", "scalar", "-0.6", "constant term"),
                param("x0", "scalar", "1", "starting point"),
                param("b", "scalar", "|x0 - a|^-alpha", "fixed slope"),
            ],
        },
        FixtureInfo {
            name: "poly2d",
            summary: "F(x) = A x + (s/2)(x1^2, x2^2) - b with B = F'(x0)^-1; omega(v) = |s| ||B|| v",
            default_norm: Norm::Max,
            default_radius: "10",
            params: vec![
                param("s", "scalar", "1", "strength of the quadratic term"),
                param("b", "vector", "[2, 1]", "right-hand side"),
                param("x0", "vector", "[0, 0]", "starting point"),
                param("A", "matrix", "[[4, 1], [-1, 3]]", "linear part"),
            ],
        },
        FixtureInfo {
            name: "chandrasekhar",
            summary: "midpoint-rule H-equation H_i = 1 + (c/2) H_i sum_j w_j mu_i H_j / (mu_i + mu_j), x0 = 1, B = F'(x0)^-1",
            default_norm: Norm::One,
            default_radius: "1.25 n",
            params: vec![
                param("c", "scalar", "0.9", "albedo in (0, 1]"),
                param("n", "integer", "16", "number of quadrature nodes"),
            ],
        },
        FixtureInfo {
            name: "linear",
            summary: "F(x) = A x - b with B = A^-1; omega = 0 and one-step convergence",
            default_norm: Norm::Max,
            default_radius: "10",
            params: vec![
                param("A", "matrix", "[[2, 1], [1, 3]]", "system matrix"),
                param("b_vec", "vector", "[1, 2]", "right-hand side"),
                param("x0", "vector", "zeros", "starting point"),
            ],
        },
    ]
}

struct Params<'a> {
    fixture: &'a str,
    map: &'a BTreeMap<String, ParamValue>,
}

impl<'a> Params<'a> {
    fn new(spec: &'a FixtureSpec, allowed: &[&str]) -> Result<Self> {
        if let Some(key) = spec.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::BadParameters(format!(
                "`{}` does not take parameter `{key}` (expected one of {allowed:?})",
                spec.fixture
            )));
        }
        Ok(Params {
            fixture: &spec.fixture,
            map: &spec.params,
        })
    }

    fn bad(&self, key: &str, what: &str) -> Error {
        Error::BadParameters(format!("{}: `{key}` {what}", self.fixture))
    }

    fn scalar(&self, key: &str, default: f64) -> Result<f64> {
        match self.map.get(key) {
            None => Ok(default),
            Some(ParamValue::Scalar(v)) if v.is_finite() => Ok(*v),
            Some(_) => Err(self.bad(key, "must be a finite number")),
        }
    }

    fn opt_scalar(&self, key: &str) -> Result<Option<f64>> {
        self.map.get(key).map(|_| self.scalar(key, 0.0)).transpose()
    }

    fn vector(&self, key: &str, default: &[f64]) -> Result<DVector<f64>> {
        match self.map.get(key) {
            None => Ok(DVector::from_column_slice(default)),
            Some(ParamValue::Vector(v)) if v.iter().all(|x| x.is_finite()) => {
                Ok(DVector::from_column_slice(v))
            }
            Some(ParamValue::Scalar(v)) if v.is_finite() => Ok(DVector::from_element(1, *v)),
            Some(_) => Err(self.bad(key, "must be a vector of finite numbers")),
        }
    }

    fn matrix(&self, key: &str, default: &[&[f64]]) -> Result<DMatrix<f64>> {
        let rows: Vec<Vec<f64>> = match self.map.get(key) {
            None => default.iter().map(|r| r.to_vec()).collect(),
            Some(ParamValue::Matrix(m)) => m.clone(),
            Some(ParamValue::Scalar(v)) => vec![vec![*v]],
            Some(ParamValue::Vector(_)) => return Err(self.bad(key, "must be a list of rows")),
        };
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(self.bad(key, "must be a non-empty square matrix"));
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        if flat.iter().any(|v| !v.is_finite()) {
            return Err(self.bad(key, "must contain finite numbers"));
        }
        Ok(DMatrix::from_row_slice(n, n, &flat))
    }
}

fn invert(m: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    m.clone()
        .try_inverse()
        .filter(|inv| inv.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::BadParameters(format!("{what} is singular")))
}

pub fn build_fixture(spec: &FixtureSpec) -> Result<Fixture> {
    match spec.fixture.as_str() {
        "scalar_quadratic" => scalar_quadratic(spec),
        "scalar_holder" => scalar_holder(spec),
        "poly2d" => poly2d(spec),
        "chandrasekhar" => chandrasekhar(spec),
        "linear" => linear(spec),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

fn finish(
    spec: &FixtureSpec,
    problem: Problem,
    default_norm: Norm,
    analytic: Option<Analytic>,
) -> Result<Fixture> {
    let problem = problem.with_norm(spec.norm.unwrap_or(default_norm));
    let problem = match spec.radius {
        Some(r) => problem.with_radius(r)?,
        None => problem,
    };
    Ok(Fixture {
        name: spec.fixture.clone(),
        problem,
        analytic,
    })
}

fn scalar_quadratic(spec: &FixtureSpec) -> Result<Fixture> {
    let p = Params::new(spec, &["c", "x0", "b"])?;
    let c = p.scalar("c", 2.0)?;
    let x0 = p.scalar("x0", 2.0)?;
    let b = p.scalar("b", 0.25)?;

    let problem = Problem::new(
        DVector::from_element(1, x0),
        DMatrix::from_element(1, 1, b),
        10.0,
        move |x: &DVector<f64>| DVector::from_element(1, x[0] * x[0] - c),
    )?
    .with_jacobian(|x: &DVector<f64>| DMatrix::from_element(1, 1, 2.0 * x[0]));

    // |B F'(x) - 1| = |2 b x - 1| is affine in x, so its max over
    // [x0 - v, x0 + v] is |2 b x0 - 1| + 2|b| v.
    let l0 = 2.0 * b.abs();
    let nu = (2.0 * b * x0 - 1.0).abs();
    let known = (c >= 0.0).then(|| {
        let root = c.sqrt();
        DVector::from_element(1, if x0 < 0.0 { -root } else { root })
    });
    let analytic = Analytic {
        l0,
        alpha: 1.0,
        nu,
        eta: (b * (x0 * x0 - c)).abs(),
        known_solution: known,
        exact_omega: Some(Arc::new(move |v| nu + l0 * v)),
    };
    finish(spec, problem, Norm::Max, Some(analytic))
}

fn scalar_holder(spec: &FixtureSpec) -> Result<Fixture> {
    let p = Params::new(spec, &["a", "alpha", "c", "x0", "b"])?;
    let a = p.scalar("a", 0.0)?;
    let alpha = p.scalar("alpha", 0.5)?;
    let c = p.scalar("c", -0.6)?;
    let x0 = p.scalar("x0", 1.0)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(p.bad("alpha", "must lie in (0, 1]"));
    }
    let dist = (x0 - a).abs();
    let b = match p.opt_scalar("b")? {
        Some(b) => b,
        None if dist > 0.0 => dist.powf(-alpha),
        None => return Err(p.bad("b", "has no default when x0 = a")),
    };

    let residual = move |x: &DVector<f64>| {
        let d = x[0] - a;
        DVector::from_element(1, d.signum() * d.abs().powf(1.0 + alpha) / (1.0 + alpha) + c)
    };
    let f0 = residual(&DVector::from_element(1, x0))[0];
    let problem = Problem::new(
        DVector::from_element(1, x0),
        DMatrix::from_element(1, 1, b),
        0.5,
        residual,
    )?
    .with_jacobian(move |x: &DVector<f64>| DMatrix::from_element(1, 1, (x[0] - a).abs().powf(alpha)));

    // ||x - a|^alpha - |x0 - a|^alpha| <= |x - x0|^alpha, hence
    // |b F'(x) - 1| <= |b dist^alpha - 1| + |b| v^alpha.
    let nu = (b * dist.powf(alpha) - 1.0).abs();
    // Exact: b |x - a|^alpha sweeps the values at both ends of the interval,
    // and 0 when the interval contains a.
    let exact = move |v: f64| {
        let (lo, hi) = (x0 - v - a, x0 + v - a);
        let mut m = (b * lo.abs().powf(alpha) - 1.0)
            .abs()
            .max((b * hi.abs().powf(alpha) - 1.0).abs());
        if lo <= 0.0 && hi >= 0.0 {
            m = m.max(1.0);
        }
        m
    };
    let known = if c == 0.0 {
        a
    } else {
        a + (-c).signum() * (c.abs() * (1.0 + alpha)).powf(1.0 / (1.0 + alpha))
    };
    let analytic = Analytic {
        l0: b.abs(),
        alpha,
        nu,
        eta: (b * f0).abs(),
        known_solution: Some(DVector::from_element(1, known)),
        exact_omega: Some(Arc::new(exact)),
    };
    finish(spec, problem, Norm::Max, Some(analytic))
}

fn poly2d(spec: &FixtureSpec) -> Result<Fixture> {
    let p = Params::new(spec, &["s", "b", "x0", "A"])?;
    let s = p.scalar("s", 1.0)?;
    let rhs = p.vector("b", &[2.0, 1.0])?;
    let x0 = p.vector("x0", &[0.0, 0.0])?;
    let a = p.matrix("A", &[&[4.0, 1.0], &[-1.0, 3.0]])?;
    if rhs.len() != 2 || x0.len() != 2 || a.nrows() != 2 {
        return Err(Error::BadParameters("poly2d: b, x0 and A must be 2-dimensional".into()));
    }

    let jac = {
        let a = a.clone();
        move |x: &DVector<f64>| &a + DMatrix::from_diagonal(&(x * s))
    };
    let slope = invert(&jac(&x0), "poly2d: F'(x0)")?;
    let problem = Problem::new(x0.clone(), slope.clone(), 10.0, move |x: &DVector<f64>| {
        &a * x + x.component_mul(x) * (0.5 * s) - &rhs
    })?
    .with_jacobian(jac);
    let norm = spec.norm.unwrap_or(Norm::Max);
    let problem = problem.with_norm(norm);

    // B F'(x) - I = s B diag(x - x0). Its norm is at most |s| ||B|| v, with
    // equality at cube vertices (max norm) or on the axes (one norm).
    let l0 = s.abs() * norm.matrix(&slope);
    let exact_omega: Option<ScalarFn> = match norm {
        Norm::Max | Norm::One => Some(Arc::new(move |v| l0 * v)),
        Norm::Two => None,
    };
    let analytic = Analytic {
        l0,
        alpha: 1.0,
        nu: 0.0,
        eta: problem.initial_step_norm()?,
        known_solution: None,
        exact_omega,
    };
    finish(spec, problem, Norm::Max, Some(analytic))
}

/// Midpoint nodes `mu_i = (i - 1/2) / n` and the kernel
/// `A_ij = w_j mu_i / (mu_i + mu_j)` with `w_j = 1 / n`.
fn chandrasekhar_kernel(n: usize) -> DMatrix<f64> {
    let mu: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    let w = 1.0 / n as f64;
    DMatrix::from_fn(n, n, |i, j| w * mu[i] / (mu[i] + mu[j]))
}

fn chandrasekhar(spec: &FixtureSpec) -> Result<Fixture> {
    let p = Params::new(spec, &["c", "n"])?;
    let c = p.scalar("c", 0.9)?;
    let n_raw = p.scalar("n", 16.0)?;
    if !(c > 0.0 && c <= 1.0) {
        return Err(p.bad("c", "must lie in (0, 1]"));
    }
    if n_raw.fract() != 0.0 || !(1.0..=256.0).contains(&n_raw) {
        return Err(p.bad("n", "must be an integer in [1, 256]"));
    }
    let n = n_raw as usize;
    let kernel = chandrasekhar_kernel(n);
    let half_c = 0.5 * c;

    let residual = {
        let kernel = kernel.clone();
        move |h: &DVector<f64>| {
            let integral = &kernel * h;
            h - DVector::from_element(h.len(), 1.0) - h.component_mul(&integral) * half_c
        }
    };
    // d/dH_k of H_i (K H)_i = delta_ik (K H)_i + H_i K_ik
    let jac = move |h: &DVector<f64>| {
        let integral = &kernel * h;
        let mut m = DMatrix::from_fn(h.len(), h.len(), |i, k| -half_c * h[i] * kernel[(i, k)]);
        for i in 0..h.len() {
            m[(i, i)] += 1.0 - half_c * integral[i];
        }
        m
    };
    let x0 = DVector::from_element(n, 1.0);
    let slope = invert(&jac(&x0), "chandrasekhar: F'(x0)")?;
    let problem = Problem::new(x0, slope, 1.25 * n as f64, residual)?.with_jacobian(jac);
    finish(spec, problem, Norm::One, None)
}

fn linear(spec: &FixtureSpec) -> Result<Fixture> {
    let p = Params::new(spec, &["A", "b_vec", "x0"])?;
    let a = p.matrix("A", &[&[2.0, 1.0], &[1.0, 3.0]])?;
    let n = a.nrows();
    let rhs = p.vector("b_vec", &[1.0, 2.0][..n.min(2)])?;
    let x0 = p.vector("x0", &vec![0.0; n])?;
    if rhs.len() != n || x0.len() != n {
        return Err(Error::BadParameters(format!("linear: b_vec and x0 must have length {n}")));
    }
    let inv = invert(&a, "linear: A")?;
    let solution = &inv * &rhs;
    let problem = {
        let a = a.clone();
        Problem::new(x0, inv, 10.0, move |x: &DVector<f64>| &a * x - &rhs)?
    }
    .with_jacobian(move |_: &DVector<f64>| a.clone())
    .with_norm(spec.norm.unwrap_or(Norm::Max));
    let analytic = Analytic {
        l0: 0.0,
        alpha: 1.0,
        nu: 0.0,
        eta: problem.initial_step_norm()?,
        known_solution: Some(solution),
        exact_omega: Some(Arc::new(|_| 0.0)),
    };
    finish(spec, problem, Norm::Max, Some(analytic))
}
