//! Certificates for a closed-form Hoelder model and for a bundled fixture.
//!
//! cargo run --example certify

use fsi_cert::certificate::{certify, HoelderParams};
use fsi_cert::problems::{build_fixture, FixtureSpec};

fn main() -> fsi_cert::Result<()> {
    // omega(v) = 0.1 + 2 v^0.5, eta = 0.05 on a ball of radius 1
    let p = HoelderParams::new(2.0, 0.5, 0.1, 0.05)?;
    println!("eta_max = {}", p.eta_max().value());
    let cert = certify(&p.model(1.0)?, 1e-13)?;
    println!("{:?}: nu_star = {:?}, lambda_star = {:?} ({:?})",
        cert.status, cert.nu_star, cert.lambda_star, cert.uniqueness_boundary);

    // past eta_max the certificate says why it fails
    let too_far = HoelderParams::new(2.0, 0.5, 0.1, 0.2)?;
    println!("{:?}", certify(&too_far.model(1.0)?, 1e-13)?.status);

    let fixture = build_fixture(&FixtureSpec::new("scalar_quadratic"))?;
    let analytic = fixture.analytic.expect("the quadratic has closed-form constants");
    let cert = certify(&analytic.model(fixture.problem.radius())?, 1e-13)?;
    println!("{}", serde_json::to_string_pretty(&cert).expect("certificates serialize"));
    Ok(())
}
