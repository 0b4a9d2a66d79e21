//! Sweep eta and tabulate where each sufficient condition holds.
//!
//! cargo run --example compare_conditions

use fsi_cert::certificate::HoelderParams;
use fsi_cert::comparison::{compare_report, ConditionReport};

fn main() -> fsi_cert::Result<()> {
    println!("{:>6} {:>10} {:>6} {:>8} {:>12} {:>12}", "alpha", "eta", "new", "f-based", "nu_star", "r_star");
    for alpha in [0.25, 0.5, 1.0] {
        let cap = HoelderParams::new(1.0, alpha, 0.0, 1.0)?.eta_max().value();
        for frac in [0.1, 0.3, 0.5, 0.9, 1.1] {
            let p = HoelderParams::new(1.0, alpha, 0.0, frac * cap)?;
            let r: ConditionReport = compare_report(&p, 10.0, 1e-13)?;
            println!(
                "{alpha:>6} {:>10.3e} {:>6} {:>8} {:>12} {:>12}",
                p.eta,
                r.new_condition.holds,
                r.ahues_condition.holds,
                r.radii.nu_star.map_or("-".into(), |v| format!("{v:.6}")),
                r.radii.r_star.map_or("-".into(), |v| format!("{v:.6}")),
            );
        }
        let r = compare_report(&HoelderParams::new(1.0, alpha, 0.0, 0.1 * cap)?, 10.0, 1e-13)?;
        println!("eta_max ratio at alpha = {alpha}: {}", r.eta_max_ratio.unwrap());
    }
    Ok(())
}
