//! Estimate the continuity measure of a problem from Jacobian samples and
//! certify from the resulting table.
//!
//! cargo run --example estimate_omega

use fsi_cert::certificate::certify;
use fsi_cert::cli::write_measure_csv;
use fsi_cert::problems::{build_fixture, FixtureSpec};
use fsi_cert::solver::{estimate_omega, uniform_radii, EstimateMode};
use fsi_cert::MajorantModel;

fn main() -> fsi_cert::Result<()> {
    let fixture = build_fixture(&FixtureSpec::new("poly2d").param("s", 2.0).with_radius(2.0))?;
    let p = &fixture.problem;
    let radii = uniform_radii(p.radius(), 8);
    let table = estimate_omega(p, EstimateMode::Direct, &radii, 32, 1729)?;
    write_measure_csv(&table, std::io::stdout().lock())?;

    let analytic = fixture.analytic.as_ref().unwrap();
    let exact = analytic.exact_omega.as_ref().unwrap();
    for &r in &radii {
        println!("v = {r:<6} estimate {:<20} exact {}", table.eval(r)?, exact(r));
    }

    let from_table = certify(&MajorantModel::new(analytic.eta, p.radius(), table)?, 1e-13)?;
    let from_formula = certify(&analytic.model(p.radius())?, 1e-13)?;
    println!("nu_star from table {:?}, from formula {:?}", from_table.nu_star, from_formula.nu_star);
    Ok(())
}
