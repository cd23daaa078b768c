//! The lattice model: without noise robots jam; sensor errors or deadlock
//! perturbation let them aggregate.

use swarmagg::discrete::{run_rounds_until, DiscreteNoise, LatticeWorld};
use swarmagg::geometry::min_dispersion_baseline;

fn main() -> swarmagg::Result<()> {
    let n = 50;
    let level = 1.15 * min_dispersion_baseline(n, 1.0);
    let settings = [
        ("noiseless", DiscreteNoise::NONE),
        ("p = 0.15", DiscreteNoise::new(0.15, None)?),
        ("d* = 4", DiscreteNoise::new(0.0, Some(4))?),
        ("d* = 16", DiscreteNoise::new(0.0, Some(16))?),
    ];
    for (name, noise) in settings {
        let mut world = LatticeWorld::random(n, noise, 3)?;
        let start = world.metrics().dispersion;
        let (series, hit) = run_rounds_until(&mut world, 5000, 1, |s| s.dispersion <= level)?;
        let last = series.last().expect("at least the initial sample");
        let outcome = if hit {
            format!("aggregated after {} rounds", last.time)
        } else {
            format!(
                "not aggregated, dispersion {:.1} (level {level:.1})",
                last.dispersion
            )
        };
        println!("{name:>10}: start {start:.1}, {outcome}");
    }
    Ok(())
}
