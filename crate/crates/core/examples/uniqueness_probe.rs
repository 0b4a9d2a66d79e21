//! Start the iteration from many points inside the uniqueness ball and
//! check that they all find the same solution.
//!
//! cargo run --example uniqueness_probe

use fsi_cert::certificate::certify;
use fsi_cert::problems::{build_fixture, FixtureSpec};
use fsi_cert::solver::uniqueness_probe;

fn main() -> fsi_cert::Result<()> {
    let fixture = build_fixture(&FixtureSpec::new("scalar_quadratic"))?;
    let model = fixture.analytic.as_ref().unwrap().model(fixture.problem.radius())?;
    let cert = certify(&model, 1e-13)?;
    let report = uniqueness_probe(&fixture.problem, &cert, 100, 1729, 1e-8)?;
    println!("ball radius {} ({:?})", report.probe_radius, cert.uniqueness_boundary.unwrap());
    for o in report.outcomes.iter().take(5) {
        println!("  start {:>10.6} -> {:?} in {} steps", o.start[0], o.limit, o.steps);
    }
    println!("spread of limits {:?}, passed: {}", report.max_pairwise_distance, report.passed);
    Ok(())
}
