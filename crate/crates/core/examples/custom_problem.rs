//! A user-defined system: bring a residual, a Jacobian and a slope, then
//! estimate, certify and solve.
//!
//! cargo run --example custom_problem

use fsi_cert::certificate::certify;
use fsi_cert::solver::{estimate_centered_with_nu, fsi_solve, uniform_radii, StopCriteria};
use fsi_cert::{MajorantModel, Norm, Problem};
use nalgebra::{dmatrix, dvector, DVector};

fn main() -> fsi_cert::Result<()> {
    // F(x, y) = (x^2 + y^2 - 4, x - y + sin(y) / 4), started at (1.3, 1.5)
    let residual = |v: &DVector<f64>| dvector![v[0] * v[0] + v[1] * v[1] - 4.0, v[0] - v[1] + v[1].sin() / 4.0];
    let jacobian = |v: &DVector<f64>| dmatrix![2.0 * v[0], 2.0 * v[1]; 1.0, -1.0 + v[1].cos() / 4.0];

    let x0 = dvector![1.3, 1.5];
    // any fixed slope works; here a rough inverse of F'(x0)
    let slope = dmatrix![0.18, 0.54; 0.18, -0.47];
    let problem = Problem::new(x0, slope, 0.5, residual)?
        .with_jacobian(jacobian)
        .with_norm(Norm::Max);

    let omega = estimate_centered_with_nu(&problem, &uniform_radii(0.5, 32), 128, 1729)?;
    let model = MajorantModel::new(problem.initial_step_norm()?, 0.5, omega)?;
    let cert = certify(&model, 1e-13)?;
    println!("nu = {:.4}, eta = {:.4}: {:?}", model.nu(), model.eta(), cert.status);

    let (x, trace) = fsi_solve(&problem, &StopCriteria::default(), Some(&cert))?;
    println!("x = ({:.12}, {:.12}) after {} steps", x[0], x[1], trace.steps());
    if let Some(nu_star) = cert.nu_star {
        println!("distance travelled {:.6} <= nu_star {:.6}", problem.distance_from_x0(&x), nu_star);
    }
    Ok(())
}
