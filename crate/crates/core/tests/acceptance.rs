//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use fsi_cert::certificate::{certify, check_holder_condition, HoelderParams};
use fsi_cert::comparison::{ahues_condition, compare_report, AhuesParams};
use fsi_cert::majorant::MajorantModel;
use fsi_cert::problems::{build_fixture, Fixture, FixtureSpec};
use fsi_cert::solver::{
    estimate_centered_with_nu, estimate_omega, fsi_solve, uniform_radii, uniqueness_probe,
    verify_majorization, EstimateMode, StopCriteria, DEFAULT_ROOT_TOL,
};
use fsi_cert::ConvergenceCertificate;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {{
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    }};
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| format!("{e:?}"))
}

fn thresholds() -> Outcome {
    let mut mismatches = 0;
    for i in 1..=1000 {
        // 0.25 and 0.5 are grid points
        let eta = i as f64 / 1000.0;
        let p = ok(HoelderParams::new(1.0, 1.0, 0.0, eta))?;
        if check_holder_condition(&p) != (2.0 * eta <= 1.0) {
            mismatches += 1;
        }
        if ahues_condition(&AhuesParams::from(&p)).holds != (4.0 * eta <= 1.0) {
            mismatches += 1;
        }
    }
    ensure!(mismatches == 0, "{mismatches} disagreements");
    Ok("1000 eta values, both thresholds exact".into())
}

fn ratio_law() -> Outcome {
    let mut worst: f64 = 0.0;
    for alpha in [0.25, 0.5, 0.75, 1.0] {
        for nu in [0.0, 0.3, 0.6, 0.9] {
            for l0 in [0.1, 1.0, 10.0] {
                let p = ok(HoelderParams::new(l0, alpha, nu, 0.01))?;
                let ratio = ok(compare_report(&p, 10.0, DEFAULT_ROOT_TOL))?
                    .eta_max_ratio
                    .ok_or("no ratio")?;
                worst = worst.max((ratio - (1.0 + alpha).powf(1.0 / alpha)).abs());
            }
        }
    }
    ensure!(worst <= 1e-12, "worst deviation {worst:e}");
    Ok(format!("48 parameter sets, worst deviation {worst:e}"))
}

fn root_oracles() -> Outcome {
    let model = ok(ok(HoelderParams::new(0.5, 1.0, 0.0, 0.5))?.model(10.0))?;
    let roots = ok(model.roots(DEFAULT_ROOT_TOL))?.ok_or("not certified")?;
    let upper = roots.nu_star_star.value().ok_or("no maximal root")?;
    ensure!((roots.nu_star - (2.0 - 2f64.sqrt())).abs() <= 1e-10, "nu_star {}", roots.nu_star);
    ensure!((upper - (2.0 + 2f64.sqrt())).abs() <= 1e-10, "nu_star_star {upper}");
    let seq = ok(model.scalar_sequence(1e-15, 500))?;
    let limit = *seq.last().unwrap();
    ensure!((limit - roots.nu_star).abs() <= 1e-8, "sequence limit {limit}");

    // 50 reproducible Hoelder models against a 10^6-point scan
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut uniform = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for k in 0..50 {
        let l0 = 0.1 + 4.9 * uniform();
        let alpha = 0.1 + 0.9 * uniform();
        let nu = 0.9 * uniform();
        let eta = (0.02 + 0.96 * uniform()) * common::eta_max_new(l0, alpha, nu);
        let p = ok(HoelderParams::new(l0, alpha, nu, eta))?;
        let r = (1.1 + 1.9 * uniform()) * p.critical_radius();
        let roots = ok(ok(p.model(r))?.roots(DEFAULT_ROOT_TOL))?.ok_or("not certified")?;
        let scan = common::grid_scan(|v| common::g_hoelder(eta, l0, alpha, nu, v), r, 1_000_000);
        let (lo, hi) = scan.minimal.ok_or("grid found no minimal root")?;
        let slack = 2.0 * DEFAULT_ROOT_TOL;
        ensure!(roots.nu_star >= lo - slack && roots.nu_star <= hi + slack, "model {k}: nu_star off grid");
        match (roots.nu_star_star.value(), scan.maximal) {
            (Some(v), Some((lo, hi))) => {
                ensure!(v >= lo - slack && v <= hi + slack, "model {k}: nu_star_star off grid")
            }
            (None, None) => ensure!(scan.negative_at_end, "model {k}: boundary case"),
            _ => return Err(format!("model {k}: maximal root disagrees")),
        }
    }
    Ok("quadratic closed form, sequence limit, 50 grid-scan models".into())
}

fn fixture_certificate(f: &Fixture) -> Result<ConvergenceCertificate, String> {
    let p = &f.problem;
    let model = match &f.analytic {
        Some(a) => ok(a.model(p.radius()))?,
        None => {
            let omega = ok(estimate_centered_with_nu(p, &uniform_radii(p.radius(), 64), 64, 1729))?;
            ok(MajorantModel::new(ok(p.initial_step_norm())?, p.radius(), omega))?
        }
    };
    ok(certify(&model, DEFAULT_ROOT_TOL))
}

fn bundled_specs() -> Vec<FixtureSpec> {
    vec![
        FixtureSpec::new("scalar_quadratic"),
        FixtureSpec::new("scalar_quadratic").param("x0", 1.0).param("b", 0.5),
        FixtureSpec::new("scalar_holder"),
        FixtureSpec::new("poly2d"),
        FixtureSpec::new("chandrasekhar"),
        FixtureSpec::new("linear"),
    ]
}

fn majorization() -> Outcome {
    let mut steps = 0;
    for spec in bundled_specs() {
        let f = ok(build_fixture(&spec))?;
        let cert = fixture_certificate(&f)?;
        ensure!(cert.is_certified(), "{} not certified", spec.fixture);
        let (_, trace) = ok(fsi_solve(&f.problem, &StopCriteria::default(), Some(&cert)))?;
        let report = ok(verify_majorization(&trace, &cert.model, 1e-9))?;
        ensure!(report.tail_checked, "{}: tail not checked", spec.fixture);
        ensure!(report.passed, "{}: worst slack {}", spec.fixture, report.worst_slack);
        steps += trace.steps();
    }
    Ok(format!("6 fixtures, {steps} steps"))
}

fn containment() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for spec in bundled_specs() {
        let f = ok(build_fixture(&spec))?;
        let cert = fixture_certificate(&f)?;
        let nu_star = cert.nu_star.ok_or("not certified")?;
        let (_, trace) = ok(fsi_solve(&f.problem, &StopCriteria::default(), Some(&cert)))?;
        for x in &trace.iterates {
            worst = worst.max(f.problem.distance_from_x0(x) - nu_star);
        }
    }
    ensure!(worst <= 1e-9, "excess {worst:e}");
    Ok(format!("max ||x_k - x0|| - nu_star = {worst:e}"))
}

fn accuracy() -> Outcome {
    let mut detail = Vec::new();
    for (spec, max_iter) in [
        (FixtureSpec::new("scalar_quadratic"), 10_000),
        (FixtureSpec::new("scalar_quadratic").param("x0", 1.0).param("b", 0.5), 10_000),
    ] {
        let f = ok(build_fixture(&spec))?;
        let cert = fixture_certificate(&f)?;
        ensure!(cert.is_certified(), "not certified");
        let stop = StopCriteria { max_iter, ..StopCriteria::default() };
        let (x, trace) = ok(fsi_solve(&f.problem, &stop, Some(&cert)))?;
        let err = (x[0] - 2f64.sqrt()).abs();
        ensure!(err <= 1e-10, "error {err:e} after {} steps", trace.steps());
        detail.push(format!("{} steps, error {err:e}", trace.steps()));
    }
    Ok(detail.join("; "))
}

fn uniqueness() -> Outcome {
    let f = ok(build_fixture(&FixtureSpec::new("scalar_quadratic")))?;
    let cert = fixture_certificate(&f)?;
    let report = ok(uniqueness_probe(&f.problem, &cert, 100, 1729, 1e-8))?;
    let spread = report.max_pairwise_distance.ok_or("nothing converged")?;
    ensure!(report.passed && report.outcomes.len() == 100, "spread {spread:e}");
    Ok(format!("100 starts, radius {}, spread {spread:e}", report.probe_radius))
}

fn estimator() -> Outcome {
    let f = ok(build_fixture(&FixtureSpec::new("scalar_quadratic")))?;
    let radii = uniform_radii(f.problem.radius(), 64);
    let omega = ok(estimate_omega(&f.problem, EstimateMode::Direct, &radii, 0, 1729))?;
    for &r in &radii {
        let v = ok(omega.eval(r))?;
        ensure!(v == r / 2.0, "omega({r}) = {v}");
    }

    let mut compared = 0;
    for i in 0..=60 {
        let s = 0.1 * i as f64;
        let f = ok(build_fixture(&FixtureSpec::new("poly2d").param("s", s)))?;
        let a = f.analytic.as_ref().unwrap();
        let margin = if a.l0 == 0.0 { f64::INFINITY } else { (1.0 - 2.0 * a.l0 * a.eta).abs() };
        if margin <= 0.02 {
            continue;
        }
        let p = &f.problem;
        let analytic = ok(certify(&ok(a.model(p.radius()))?, DEFAULT_ROOT_TOL))?;
        let table = ok(estimate_omega(p, EstimateMode::Direct, &uniform_radii(p.radius(), 64), 64, 1729))?;
        let tabulated = ok(certify(&ok(MajorantModel::new(a.eta, p.radius(), table))?, DEFAULT_ROOT_TOL))?;
        ensure!(
            analytic.is_certified() == tabulated.is_certified(),
            "s = {s}: analytic {:?}, tabulated {:?}",
            analytic.status,
            tabulated.status
        );
        compared += 1;
    }
    Ok(format!("64 exact radii; {compared} poly2d sweep points agree"))
}

fn chandrasekhar() -> Outcome {
    let start = Instant::now();
    let f = ok(build_fixture(&FixtureSpec::new("chandrasekhar").param("c", 0.9).param("n", 16.0)))?;
    ensure!(f.analytic.is_none(), "expected an estimated measure");
    let cert = fixture_certificate(&f)?;
    ensure!(cert.is_certified(), "{:?}", cert.status);
    let (_, trace) = ok(fsi_solve(&f.problem, &StopCriteria::default(), Some(&cert)))?;
    let residual = *trace.residual_norms.last().unwrap();
    ensure!(residual <= 1e-10, "residual {residual:e}");
    let report = ok(verify_majorization(&trace, &cert.model, 1e-9))?;
    ensure!(report.passed, "majorization worst slack {}", report.worst_slack);
    let elapsed = start.elapsed().as_secs_f64();
    ensure!(elapsed < 5.0, "took {elapsed:.2}s");
    Ok(format!(
        "{} norm, nu_star {:.6}, {} steps, residual {residual:e}, {elapsed:.3}s",
        f.problem.norm(),
        cert.nu_star.unwrap(),
        trace.steps()
    ))
}

fn dominance() -> Outcome {
    let mut detail = Vec::new();
    for alpha in [0.25, 0.5, 1.0] {
        let (mut witnesses, mut reverse) = (0, 0);
        for nu in [0.0, 0.3, 0.6] {
            for l0 in [0.5, 1.0, 4.0] {
                let cap = common::eta_max_new(l0, alpha, nu);
                for i in 1..=400 {
                    let eta = 1.5 * cap * i as f64 / 400.0;
                    let p = ok(HoelderParams::new(l0, alpha, nu, eta))?;
                    let new = check_holder_condition(&p);
                    let old = ahues_condition(&AhuesParams::from(&p)).holds;
                    witnesses += (new && !old) as usize;
                    reverse += (old && !new) as usize;
                }
            }
        }
        ensure!(witnesses > 0 && reverse == 0, "alpha {alpha}: {witnesses} witnesses, {reverse} reverse");
        detail.push(format!("alpha {alpha}: {witnesses} witnesses"));
    }
    Ok(detail.join(", "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("threshold reproduction", thresholds),
        ("eta_max ratio law", ratio_law),
        ("root oracle agreement", root_oracles),
        ("majorization bounds", majorization),
        ("containment", containment),
        ("solution accuracy", accuracy),
        ("uniqueness probe", uniqueness),
        ("estimator fidelity", estimator),
        ("chandrasekhar fixture", chandrasekhar),
        ("dominance witness", dominance),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS  {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
