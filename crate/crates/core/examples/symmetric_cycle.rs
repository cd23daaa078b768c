//! Three robots on an equilateral triangle. The dynamics keep the 3-fold
//! symmetry, so the robots meet in the middle, bounce off and come back
//! instead of deadlocking.

use swarmagg::continuous::{gen_symmetric_cycle, Controller, NoiseModel, PhysicsParams, World};
use swarmagg::geometry::{dispersion, min_dispersion_baseline};

fn main() -> swarmagg::Result<()> {
    let params = PhysicsParams::EPUCK;
    let mut world = World::new(
        gen_symmetric_cycle(3, 30.0)?,
        params,
        NoiseModel::NONE,
        Controller::X_STAR,
        0,
    )?;
    let level = 1.15 * min_dispersion_baseline(3, 2.0 * params.robot_radius);
    println!("aggregation level {level:.2}");

    let mut lowest = f64::INFINITY;
    let mut visits = 0;
    let mut inside = false;
    while world.time < 60.0 {
        world.step();
        let d = dispersion(&world.positions())?;
        lowest = lowest.min(d);
        if d <= level && !inside {
            visits += 1;
            println!("  reached at t = {:6.2} s (dispersion {d:.2})", world.time);
        }
        inside = d <= level;
    }
    println!("{visits} visits in 60 s, lowest dispersion {lowest:.2}");
    Ok(())
}
