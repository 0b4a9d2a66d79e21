//! Independent oracles shared by the integration tests. Nothing here calls
//! into the root finders under test.
#![allow(dead_code)]

/// `g(v) = eta - (1 - nu) v + l0 v^(1+alpha) / (1+alpha)`, written out again.
pub fn g_hoelder(eta: f64, l0: f64, alpha: f64, nu: f64, v: f64) -> f64 {
    eta - (1.0 - nu) * v + l0 * v.powf(1.0 + alpha) / (1.0 + alpha)
}

/// Brackets `[lo, hi]` of the first and last sign change of `g` from
/// positive to non-positive and back, found by scanning `points` grid
/// nodes on `[0, r]`.
#[derive(Debug, Clone, Copy)]
pub struct GridRoots {
    pub step: f64,
    pub minimal: Option<(f64, f64)>,
    pub maximal: Option<(f64, f64)>,
    /// `g(r) <= 0`: the maximal root lies beyond `r`.
    pub negative_at_end: bool,
}

pub fn grid_scan<G: Fn(f64) -> f64>(g: G, r: f64, points: usize) -> GridRoots {
    let step = r / (points - 1) as f64;
    let mut minimal = None;
    let mut maximal = None;
    let mut prev_v = 0.0;
    let mut prev_g = g(0.0);
    for i in 1..points {
        let v = if i == points - 1 { r } else { i as f64 * step };
        let gv = g(v);
        if minimal.is_none() && prev_g > 0.0 && gv <= 0.0 {
            minimal = Some((prev_v, v));
        }
        if prev_g <= 0.0 && gv > 0.0 {
            maximal = Some((prev_v, v));
        }
        prev_v = v;
        prev_g = gv;
    }
    GridRoots {
        step,
        minimal,
        maximal,
        negative_at_end: prev_g <= 0.0,
    }
}

/// Roots of `(l0/2) v^2 - (1 - nu) v + eta` by the quadratic formula, smaller
/// first.
pub fn quadratic_roots(eta: f64, l0: f64, nu: f64) -> Option<(f64, f64)> {
    let b = 1.0 - nu;
    let disc = b * b - 2.0 * l0 * eta;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    Some(((b - s) / l0, (b + s) / l0))
}

/// Closed-form admissible `eta` of the new condition, recomputed.
pub fn eta_max_new(l0: f64, alpha: f64, nu: f64) -> f64 {
    ((1.0 - nu).powf(alpha + 1.0) * (alpha / (1.0 + alpha)).powf(alpha) / l0).powf(1.0 / alpha)
}

/// The same for the f-based condition.
pub fn eta_max_f_based(l0: f64, alpha: f64, nu: f64) -> f64 {
    ((1.0 - nu).powf(alpha + 1.0) * (alpha / (1.0 + alpha)).powf(alpha) / ((1.0 + alpha) * l0))
        .powf(1.0 / alpha)
}

/// Composite trapezoid rule with `n` panels.
pub fn trapezoid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h)).sum();
    h * (0.5 * (f(a) + f(b)) + inner)
}
