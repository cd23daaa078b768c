//! Small sensor-error sweep on the worker pool, with the summary table
//! printed as CSV. Set `SWARMAGG_WORKERS` to cap the pool.

use swarmagg::experiments::{summary_csv, sweep, ExperimentSpec, SweepOptions};

const SPEC: &str = r#"{
    "mode": "continuous",
    "system_sizes": [10],
    "noise_grid": [[0, 0], [0, 0.05], [0, 0.2]],
    "repeats": 6,
    "horizon": 300,
    "seed": 100,
    "sample_cadence": 0.5
}"#;

fn main() -> anyhow::Result<()> {
    let spec = ExperimentSpec::from_json(SPEC)?;
    let records = sweep(
        &spec,
        &SweepOptions {
            early_stop: true,
            ..Default::default()
        },
    )?;
    for r in &records {
        eprintln!(
            "run {:2} seed {:3} -> {}",
            r.config.index, r.config.seed, r.aggregation
        );
    }
    print!("{}", summary_csv(&spec, &records));
    Ok(())
}
