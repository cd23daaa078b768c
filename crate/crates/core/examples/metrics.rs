//! The four aggregation metrics on a packed cluster and on a spread-out
//! ring of the same size.

use swarmagg::geometry::{hex_packing, min_dispersion_baseline, MetricsSample, Point2};

fn main() -> swarmagg::Result<()> {
    let n = 19;
    let spacing = 7.4;
    let packed = hex_packing(n, spacing);
    let ring: Vec<Point2> = (0..n)
        .map(|k| Point2::from_angle(std::f64::consts::TAU * k as f64 / n as f64) * 60.0)
        .collect();

    println!(
        "baseline dispersion for n = {n}: {:.3}",
        min_dispersion_baseline(n, spacing)
    );
    for (name, pts) in [("packed", &packed), ("ring", &ring)] {
        let m = MetricsSample::evaluate(0.0, pts, spacing / 2.0, 0.37)?;
        println!(
            "{name:>6}: sed {:8.3}  hull {:8.3}  dispersion {:8.3}  cluster {:.3}",
            m.sed_circumference, m.hull_perimeter, m.dispersion, m.cluster_fraction
        );
    }
    Ok(())
}
