//! The discretized H-equation: no closed-form constants, so the measure is
//! estimated. The choice of norm decides whether a certificate exists.
//!
//! cargo run --release --example chandrasekhar

use fsi_cert::certificate::certify;
use fsi_cert::problems::{build_fixture, FixtureSpec};
use fsi_cert::solver::{estimate_centered_with_nu, fsi_solve, uniform_radii, verify_majorization, StopCriteria};
use fsi_cert::{MajorantModel, Norm};

fn main() -> fsi_cert::Result<()> {
    for norm in [Norm::Max, Norm::One] {
        let spec = FixtureSpec::new("chandrasekhar").param("c", 0.9).param("n", 16.0).with_norm(norm);
        let p = build_fixture(&spec)?.problem;
        let omega = estimate_centered_with_nu(&p, &uniform_radii(p.radius(), 64), 64, 1729)?;
        let model = MajorantModel::new(p.initial_step_norm()?, p.radius(), omega)?;
        let cert = certify(&model, 1e-13)?;
        println!("{norm} norm: eta = {:.4}, {:?}", model.eta(), cert.status);

        let (h, trace) = fsi_solve(&p, &StopCriteria::default(), cert.is_certified().then_some(&cert))?;
        println!("  {} steps, residual {:e}, H(mu = 1) ~ {:.6}",
            trace.steps(), trace.residual_norms.last().unwrap(), h[h.len() - 1]);
        if cert.is_certified() {
            let report = verify_majorization(&trace, &model, 1e-9)?;
            println!("  nu_star = {:.6}, travelled {:.6}, majorized: {}",
                cert.nu_star.unwrap(), p.distance_from_x0(&h), report.passed);
        }
    }
    Ok(())
}
