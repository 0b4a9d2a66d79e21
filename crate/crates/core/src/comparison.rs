//! Side-by-side evaluation of the new Hoelder condition against the earlier
//! fixed slope condition built on
//!
//! ```text
//! f(v) = l0 v^(alpha+1) - (1 - delta) v + eta
//! ```
//!
//! and against the centered Kantorovich condition `2 l0 eta <= 1`.
//!
//! Since `f(v) - g(v) = l0 v^(alpha+1) alpha / (1 + alpha) > 0`, the roots of
//! `f` sit inside those of `g`: `nu_star <= r_star <= r_star_star <= nu_star_star`.
//! The report records which ordering is actually observed.

use serde::{Deserialize, Serialize};

use crate::certificate::{check_holder_condition, holder_bound, EtaMax, HoelderParams};
use crate::error::{Error, Result};
use crate::majorant::{bisect, MajorantModel, MaximalRoot, ROOT_MERGE_FACTOR, TANGENCY_REL};

/// Parameters of the `f`-based condition. `delta` measures how far `B^{-1}`
/// is from `F'(x0)`; it equals `nu` when the two coincide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AhuesParams {
    pub l0: f64,
    pub alpha: f64,
    pub delta: f64,
    pub eta: f64,
}

impl From<&HoelderParams> for AhuesParams {
    fn from(p: &HoelderParams) -> Self {
        AhuesParams {
            l0: p.l0,
            alpha: p.alpha,
            delta: p.nu,
            eta: p.eta,
        }
    }
}

pub fn ahues_f(p: &AhuesParams, v: f64) -> f64 {
    p.l0 * v.powf(p.alpha + 1.0) - (1.0 - p.delta) * v + p.eta
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionOutcome {
    pub holds: bool,
    pub eta_max: EtaMax,
}

/// `l0 eta^alpha <= (1 - delta)^(alpha+1) (alpha / (1 + alpha))^alpha / (1 + alpha)`.
pub fn ahues_condition(p: &AhuesParams) -> ConditionOutcome {
    let bound = holder_bound(p.alpha, p.delta) / (1.0 + p.alpha);
    let eta_max = if p.l0 == 0.0 {
        EtaMax::Unbounded
    } else {
        EtaMax::Finite((bound / p.l0).powf(1.0 / p.alpha))
    };
    ConditionOutcome {
        holds: p.l0 * p.eta.powf(p.alpha) <= bound,
        eta_max,
    }
}

pub fn new_condition(p: &HoelderParams) -> ConditionOutcome {
    ConditionOutcome {
        holds: check_holder_condition(p),
        eta_max: p.eta_max(),
    }
}

/// Minimal and maximal roots of `f` on `[0, R]`, or `None` when the
/// condition fails or the minimal root lies past `R`.
pub fn ahues_roots(p: &AhuesParams, radius: f64, tol: f64) -> Result<Option<(f64, MaximalRoot)>> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance {tol} must be finite and positive")));
    }
    if !ahues_condition(p).holds {
        return Ok(None);
    }
    let f = |v: f64| -> Result<f64> { Ok(ahues_f(p, v)) };
    let argmin = if p.l0 == 0.0 {
        radius
    } else {
        ((1.0 - p.delta) / ((1.0 + p.alpha) * p.l0))
            .powf(1.0 / p.alpha)
            .min(radius)
    };
    let f_min = f(argmin)?;
    if f_min > 16.0 * f64::EPSILON * (p.eta + 2.0 * argmin) {
        return Ok(None);
    }
    let f_tol = tol * p.eta.max(1.0);
    let r_star = if f_min >= 0.0 {
        argmin
    } else {
        bisect(f, 0.0, argmin, tol, f_tol)?
    };
    let tangent = argmin < radius && f_min >= -TANGENCY_REL * p.eta;
    let f_end = f(radius)?;
    let r_star_star = if tangent {
        MaximalRoot::Root(r_star)
    } else if f_end < 0.0 {
        MaximalRoot::AtBoundary
    } else if argmin >= radius {
        MaximalRoot::Root(radius)
    } else {
        let r = bisect(f, radius, argmin, tol, f_tol)?;
        if r - r_star < ROOT_MERGE_FACTOR * tol {
            MaximalRoot::Root(r_star)
        } else {
            MaximalRoot::Root(r)
        }
    };
    Ok(Some((r_star, r_star_star)))
}

/// Centered Kantorovich condition `2 l0 eta <= 1`, Lipschitz case.
pub fn kantorovich_condition(l0: f64, eta: f64) -> bool {
    2.0 * l0 * eta <= 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KantorovichOutcome {
    Holds,
    Fails,
    /// Only defined for `alpha = 1`, `nu = 0`.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRadii {
    pub nu_star: Option<f64>,
    pub nu_star_star: Option<MaximalRoot>,
    pub lambda_star: Option<f64>,
    pub r_star: Option<f64>,
    pub r_star_star: Option<MaximalRoot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub schema: u32,
    pub params: HoelderParams,
    pub delta: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub new_condition: ConditionOutcome,
    pub ahues_condition: ConditionOutcome,
    pub kantorovich_condition: KantorovichOutcome,
    pub radii: ComparisonRadii,
    /// `eta_max(new) / eta_max(f-based)`; `None` when both are unbounded.
    pub eta_max_ratio: Option<f64>,
    /// `nu_star <= r_star <= r_star_star <= nu_star_star`, when all four exist.
    pub root_containment: Option<bool>,
    /// `r_star <= nu_star_star` and `r_star <= lambda_star`: the f-based
    /// uniqueness ball lies inside the new one.
    pub uniqueness_ball_nested: Option<bool>,
    pub claimed_ordering: String,
    pub observed_ordering: Option<String>,
}

const CLAIMED_ORDERING: &str = "r_star < nu_star <= nu_star_star";

fn order_symbol(a: f64, b: f64) -> &'static str {
    if a < b {
        "<"
    } else if a == b {
        "="
    } else {
        ">"
    }
}

pub fn compare_report(p: &HoelderParams, radius: f64, tol: f64) -> Result<ConditionReport> {
    compare_report_with_delta(p, p.nu, radius, tol)
}

pub fn compare_report_with_delta(
    p: &HoelderParams,
    delta: f64,
    radius: f64,
    tol: f64,
) -> Result<ConditionReport> {
    p.validate()?;
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::BadParameters(format!("delta = {delta} must lie in [0, 1)")));
    }
    let ahues = AhuesParams {
        delta,
        ..AhuesParams::from(p)
    };
    let new = new_condition(p);
    let old = ahues_condition(&ahues);
    let kantorovich = if p.alpha == 1.0 && p.nu == 0.0 {
        if kantorovich_condition(p.l0, p.eta) {
            KantorovichOutcome::Holds
        } else {
            KantorovichOutcome::Fails
        }
    } else {
        KantorovichOutcome::NotApplicable
    };

    let model = MajorantModel::new(p.eta, radius, p.omega())?;
    let roots = model.roots(tol)?;
    let f_roots = ahues_roots(&ahues, radius, tol)?;

    let radii = ComparisonRadii {
        nu_star: roots.map(|r| r.nu_star),
        nu_star_star: roots.map(|r| r.nu_star_star),
        lambda_star: roots.map(|r| r.lambda_star),
        r_star: f_roots.map(|r| r.0),
        r_star_star: f_roots.map(|r| r.1),
    };

    let eta_max_ratio = match (new.eta_max, old.eta_max) {
        (EtaMax::Finite(a), EtaMax::Finite(b)) => Some(a / b),
        _ => None,
    };

    let slack = ROOT_MERGE_FACTOR * tol;
    let (mut root_containment, mut nested, mut observed) = (None, None, None);
    if let (Some(r), Some((r_star, r_star_star))) = (roots, f_roots) {
        let nu_ss = r.nu_star_star.value().unwrap_or(f64::INFINITY);
        let r_ss = r_star_star.value().unwrap_or(f64::INFINITY);
        root_containment = Some(
            r.nu_star <= r_star + slack && r_star <= r_ss + slack && r_ss <= nu_ss + slack,
        );
        nested = Some(r_star <= nu_ss + slack && r_star <= r.lambda_star + slack);
        observed = Some(format!(
            "r_star {} nu_star {} nu_star_star",
            order_symbol(r_star, r.nu_star),
            order_symbol(r.nu_star, nu_ss),
        ));
    }

    Ok(ConditionReport {
        schema: crate::certificate::SCHEMA_VERSION,
        params: *p,
        delta,
        radius,
        new_condition: new,
        ahues_condition: old,
        kantorovich_condition: kantorovich,
        radii,
        eta_max_ratio,
        root_containment,
        uniqueness_ball_nested: nested,
        claimed_ordering: CLAIMED_ORDERING.to_string(),
        observed_ordering: observed,
    })
}
