//! Rotation bound for a cone-of-sight robot approaching a static one,
//! against the simulated number of sightings.

use swarmagg::cone::{gamma_exact_lb, gamma_linear_lb, rotation_bound, verify_bound_by_simulation};
use swarmagg::continuous::PhysicsParams;

fn main() -> swarmagg::Result<()> {
    let params = PhysicsParams::EPUCK;
    let r = params.robot_radius;
    println!("beta   gamma_lb  linear_lb");
    for beta in [0.2, 0.6, 1.0, 2.0] {
        println!(
            "{beta:4.1}   {:.5}   {:.5}",
            gamma_exact_lb(beta, r),
            gamma_linear_lb(beta)
        );
    }

    println!("\nbeta  d0   bound  measured  last distances");
    for beta in [0.2, 0.6, 1.0] {
        for d0 in [50.0, 100.0] {
            let c = verify_bound_by_simulation(d0, beta, &params)?;
            assert_eq!(c.bound_m, rotation_bound(d0, 14.45, r, r, beta)?);
            let tail: Vec<String> = c
                .distances
                .iter()
                .rev()
                .take(3)
                .map(|d| format!("{d:.2}"))
                .collect();
            println!(
                "{beta:4.1}  {d0:3}  {:5}  {:8}  {}",
                c.bound_m,
                c.measured_m,
                tail.join(" ")
            );
        }
    }
    Ok(())
}
