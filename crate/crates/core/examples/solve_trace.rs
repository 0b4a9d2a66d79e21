//! Iterate with a certificate attached, write the trace as CSV and check
//! that every step is majorized by the scalar sequence.
//!
//! cargo run --example solve_trace > trace.csv

use fsi_cert::certificate::certify;
use fsi_cert::problems::{build_fixture, FixtureSpec};
use fsi_cert::solver::{fsi_solve, verify_majorization, StopCriteria};

fn main() -> fsi_cert::Result<()> {
    let spec = FixtureSpec::new("scalar_quadratic").param("x0", 1.0).param("b", 0.5);
    let fixture = build_fixture(&spec)?;
    let model = fixture.analytic.as_ref().unwrap().model(fixture.problem.radius())?;
    let cert = certify(&model, 1e-13)?;

    let (x, trace) = fsi_solve(&fixture.problem, &StopCriteria::default(), Some(&cert))?;
    trace.write_csv(std::io::stdout().lock())?;

    let report = verify_majorization(&trace, &model, 1e-9)?;
    eprintln!("x = {}, {} steps, {:?}", x[0], trace.steps(), trace.stop_reason);
    eprintln!("majorized: {}, smallest slack {:e}", report.passed, report.worst_slack);
    Ok(())
}
