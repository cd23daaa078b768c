//! Deadlocked starts: blocking pairs, a pair-plus-triangle for odd n, and a
//! closed ring. None of them moves without noise; a little motion noise
//! frees the pairs.

use swarmagg::cli::deadlock_motion;
use swarmagg::continuous::{
    gen_deadlock_even, gen_deadlock_odd, gen_ring_deadlock, run, Controller, NoiseModel,
    PhysicsParams, World,
};

fn main() -> anyhow::Result<()> {
    let params = PhysicsParams::EPUCK;
    let r = params.robot_radius;
    let cases = [
        ("even n=6", gen_deadlock_even(6, r)?),
        ("odd n=7", gen_deadlock_odd(7, r)?),
        ("ring n=12", gen_ring_deadlock(12, &params)?),
    ];
    for (name, poses) in &cases {
        let report = deadlock_motion(poses.clone(), params, Controller::X_STAR, 60.0)?;
        println!(
            "{name:>9}: max displacement {:e} cm over 60 s",
            report.max_displacement
        );
    }

    let noise = NoiseModel::new(3.0, 0.0)?;
    let mut world = World::new(cases[0].1.clone(), params, noise, Controller::X_STAR, 7)?;
    let series = run(&mut world, 60.0, 10.0)?.series;
    println!("even n=6 with motion noise 3 N:");
    for s in series {
        println!("  t {:5.1}  dispersion {:7.2}", s.time, s.dispersion);
    }
    Ok(())
}
