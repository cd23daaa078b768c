//! One zero-noise run of a random swarm, printed as the metrics CSV.
//!
//! `cargo run --release --example swarm_run -- [n] [seconds] [seed]`

use swarmagg::continuous::{run, NoiseModel, PhysicsParams};
use swarmagg::experiments::{continuous_world, detect_aggregation, CONTINUOUS_ARENA_SIDE};
use swarmagg::output::metrics_csv;

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(100), |s| s.parse())?;
    let seconds: f64 = args.get(1).map_or(Ok(300.0), |s| s.parse())?;
    let seed: u64 = args.get(2).map_or(Ok(1), |s| s.parse())?;

    let params = PhysicsParams::EPUCK;
    let mut world = continuous_world(n, CONTINUOUS_ARENA_SIDE, params, NoiseModel::NONE, seed)?;
    let out = run(&mut world, seconds, 5.0)?;
    print!("{}", metrics_csv(&out.series));
    let agg = detect_aggregation(&out.series, n, 0.15, 2.0 * params.robot_radius)?;
    eprintln!(
        "aggregated: {agg}; contact overflows: {}",
        out.contact_overflows
    );
    Ok(())
}
