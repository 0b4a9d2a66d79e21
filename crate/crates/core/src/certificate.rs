//! Existence and uniqueness certificates for the fixed slope iteration, and
//! the closed forms available when `omega(v) = nu + l0 * v^alpha`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorant::{BoundaryCase, MajorantModel, MaximalRoot, OmegaMeasure};

/// Number of majorizing-sequence terms stored with a certificate.
pub const PREVIEW_LEN: usize = 16;

/// Current version of the serialized certificate layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NotCertifiedReason {
    /// `omega(0) >= 1`.
    NuTooLarge,
    /// `phi(gamma_star) > gamma_star`: the majorant has no fixed point.
    ConstraintAFails,
    /// A fixed point exists, but beyond `R`; see `needed_radius`.
    RadiusTooSmall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateStatus {
    Certified,
    NotCertified(NotCertifiedReason),
}

/// Whether uniqueness is claimed in the closed or in the open ball of radius
/// `lambda_star`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BallBoundary {
    Closed,
    Open,
}

impl From<BoundaryCase> for BallBoundary {
    fn from(case: BoundaryCase) -> Self {
        match case {
            BoundaryCase::B1 => BallBoundary::Closed,
            BoundaryCase::B2 => BallBoundary::Open,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCertificate {
    pub schema: u32,
    pub status: CertificateStatus,
    pub nu: f64,
    pub eta: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub nu_star: Option<f64>,
    pub nu_star_star: Option<MaximalRoot>,
    pub gamma_star: Option<f64>,
    pub lambda_star: Option<f64>,
    pub uniqueness_boundary: Option<BallBoundary>,
    /// Smallest admissible `R`, reported with `RadiusTooSmall`.
    pub needed_radius: Option<f64>,
    pub scalar_sequence: Vec<f64>,
    pub model: MajorantModel,
}

impl ConvergenceCertificate {
    pub fn is_certified(&self) -> bool {
        self.status == CertificateStatus::Certified
    }

    /// `v_0, ..., v_{count-1}`, continuing the stored preview through `phi`
    /// when more terms are needed.
    pub fn scalar_terms(&self, count: usize) -> Result<Vec<f64>> {
        if !self.is_certified() {
            return Err(Error::CertificateMissing);
        }
        let mut terms: Vec<f64> = self.scalar_sequence.iter().copied().take(count).collect();
        while terms.len() < count {
            let next = match terms.last() {
                None => 0.0,
                Some(&v) => self.model.phi(v)?.min(self.radius),
            };
            terms.push(next);
        }
        Ok(terms)
    }
}

/// Checks the hypotheses on `model` and assembles the certificate.
pub fn certify(model: &MajorantModel, tol: f64) -> Result<ConvergenceCertificate> {
    let mut cert = ConvergenceCertificate {
        schema: SCHEMA_VERSION,
        status: CertificateStatus::NotCertified(NotCertifiedReason::NuTooLarge),
        nu: model.nu(),
        eta: model.eta(),
        radius: model.radius(),
        nu_star: None,
        nu_star_star: None,
        gamma_star: None,
        lambda_star: None,
        uniqueness_boundary: None,
        needed_radius: None,
        scalar_sequence: Vec::new(),
        model: model.clone(),
    };
    if model.nu() >= 1.0 {
        return Ok(cert);
    }
    cert.gamma_star = Some(model.gamma_star()?);

    let Some(roots) = model.roots(tol)? else {
        cert.needed_radius = needed_radius(model, tol)?;
        cert.status = CertificateStatus::NotCertified(match cert.needed_radius {
            Some(_) => NotCertifiedReason::RadiusTooSmall,
            None => NotCertifiedReason::ConstraintAFails,
        });
        return Ok(cert);
    };

    cert.status = CertificateStatus::Certified;
    cert.nu_star = Some(roots.nu_star);
    cert.nu_star_star = Some(roots.nu_star_star);
    cert.lambda_star = Some(roots.lambda_star);
    cert.uniqueness_boundary = Some(roots.boundary_case.into());
    cert.scalar_sequence = model.majorizing_terms(PREVIEW_LEN)?;
    Ok(cert)
}

/// For a Hoelder measure whose minimum of `g` lies past `R`, the minimal root
/// on the enlarged ball, if there is one.
fn needed_radius(model: &MajorantModel, tol: f64) -> Result<Option<f64>> {
    let OmegaMeasure::Hoelder { l0, alpha, nu } = *model.omega() else {
        return Ok(None);
    };
    if l0 == 0.0 {
        let root = model.eta() / (1.0 - nu);
        return Ok((root > model.radius()).then_some(root));
    }
    let critical = ((1.0 - nu) / l0).powf(1.0 / alpha);
    if !(critical.is_finite() && critical > model.radius()) {
        return Ok(None);
    }
    model.with_radius(critical)?.minimal_root(tol)
}

/// Upper admissible `eta`, or `Unbounded` for a constant measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EtaMax {
    Finite(f64),
    Unbounded,
}

impl EtaMax {
    pub fn value(&self) -> f64 {
        match self {
            EtaMax::Finite(v) => *v,
            EtaMax::Unbounded => f64::INFINITY,
        }
    }
}

/// Parameters of the centered Hoelder case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoelderParams {
    pub l0: f64,
    pub alpha: f64,
    pub nu: f64,
    pub eta: f64,
}

impl HoelderParams {
    pub fn new(l0: f64, alpha: f64, nu: f64, eta: f64) -> Result<Self> {
        let p = HoelderParams { l0, alpha, nu, eta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        OmegaMeasure::hoelder(self.l0, self.alpha, self.nu)?;
        if self.nu >= 1.0 {
            return Err(Error::BadParameters(format!("nu = {} must be below 1", self.nu)));
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::BadParameters(format!("eta = {} must be positive", self.eta)));
        }
        Ok(())
    }

    pub fn omega(&self) -> OmegaMeasure {
        OmegaMeasure::Hoelder {
            l0: self.l0,
            alpha: self.alpha,
            nu: self.nu,
        }
    }

    pub fn model(&self, radius: f64) -> Result<MajorantModel> {
        MajorantModel::new(self.eta, radius, self.omega())
    }

    /// `[(1 - nu) / l0]^(1/alpha)`, the minimizer of `g`.
    pub fn critical_radius(&self) -> f64 {
        ((1.0 - self.nu) / self.l0).powf(1.0 / self.alpha)
    }

    pub fn eta_max(&self) -> EtaMax {
        holder_eta_max(self.l0, self.alpha, self.nu)
    }
}

/// Right-hand side `(1 - nu)^(alpha+1) * (alpha / (1 + alpha))^alpha` of the
/// Hoelder convergence condition.
pub(crate) fn holder_bound(alpha: f64, nu: f64) -> f64 {
    (1.0 - nu).powf(alpha + 1.0) * (alpha / (1.0 + alpha)).powf(alpha)
}

pub fn holder_eta_max(l0: f64, alpha: f64, nu: f64) -> EtaMax {
    if l0 == 0.0 {
        return EtaMax::Unbounded;
    }
    EtaMax::Finite((holder_bound(alpha, nu) / l0).powf(1.0 / alpha))
}

/// `l0 * eta^alpha <= (1 - nu)^(alpha+1) * (alpha / (1 + alpha))^alpha`.
pub fn check_holder_condition(p: &HoelderParams) -> bool {
    p.l0 * p.eta.powf(p.alpha) <= holder_bound(p.alpha, p.nu)
}

/// Minimal and maximal root of `g`. Exact quadratic roots for `alpha = 1`,
/// bisection otherwise.
pub fn holder_roots(p: &HoelderParams, radius: f64, tol: f64) -> Result<(f64, MaximalRoot)> {
    p.validate()?;
    if !check_holder_condition(p) {
        return Err(Error::ConditionFails);
    }
    if p.alpha == 1.0 {
        let slope = 1.0 - p.nu;
        let (nu_star, upper) = if p.l0 == 0.0 {
            (p.eta / slope, f64::INFINITY)
        } else {
            // l0/2 v^2 - slope v + eta = 0, written to avoid cancellation
            let disc = (slope * slope - 2.0 * p.l0 * p.eta).max(0.0);
            let q = slope + disc.sqrt();
            (2.0 * p.eta / q, q / p.l0)
        };
        if nu_star > radius {
            return Err(Error::RadiusTooSmall { radius, needed: nu_star });
        }
        let upper = if upper > radius {
            MaximalRoot::AtBoundary
        } else {
            MaximalRoot::Root(upper)
        };
        return Ok((nu_star, upper));
    }

    let model = p.model(radius)?;
    match model.roots(tol)? {
        Some(r) => Ok((r.nu_star, r.nu_star_star)),
        None => match needed_radius(&model, tol)? {
            Some(needed) => Err(Error::RadiusTooSmall { radius, needed }),
            None => Err(Error::ConditionFails),
        },
    }
}
