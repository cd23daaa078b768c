//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use crate::cone::verify_bound_by_simulation;
use crate::continuous::{
    gen_deadlock_even, gen_deadlock_odd, gen_ring_deadlock, run, Controller, NoiseModel,
    PhysicsParams, RobotPose, World,
};
use crate::discrete::{run_rounds_until, DiscreteNoise, LatticeWorld};
use crate::experiments::{
    continuous_world, detect_aggregation, sweep, ExperimentSpec, Mode, SweepOptions,
    CONTINUOUS_ARENA_SIDE,
};
use crate::geometry::{MetricsSample, Point2};
use crate::output::{fmt_sig9, metrics_csv, write_sidecar};

#[derive(Debug, Parser)]
#[command(
    name = "swarmagg",
    version,
    about = "Binary-sensor swarm aggregation simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Continuous,
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    Even,
    Odd,
    Ring,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One random-start run; writes the metrics CSV and a sidecar record.
    Run {
        #[arg(long, value_enum, default_value = "continuous")]
        mode: ModeArg,
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Seconds (continuous) or rounds (discrete).
        #[arg(long, default_value_t = 300.0)]
        horizon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cone angle in radians (continuous).
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        /// Motion-noise force cap in newtons (continuous).
        #[arg(long, default_value_t = 0.0)]
        motion_noise: f64,
        #[arg(long, default_value_t = 0.0)]
        error_probability: f64,
        /// Deadlock perturbation threshold d* (discrete).
        #[arg(long)]
        perturbation: Option<u32>,
        /// Initial placement square side, cm (continuous).
        #[arg(long, default_value_t = CONTINUOUS_ARENA_SIDE)]
        arena: f64,
        /// Sampling interval: seconds or rounds.
        #[arg(long, default_value_t = 1.0)]
        cadence: f64,
        #[arg(long, default_value_t = 0.15)]
        threshold: f64,
        /// Metrics CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Execute an experiment spec (JSON) on a worker pool.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker cap (overrides SWARMAGG_WORKERS).
        #[arg(long)]
        workers: Option<usize>,
        /// Stop runs once they aggregate.
        #[arg(long)]
        early_stop: bool,
    },
    /// Build a deadlocked configuration and report how far it moves.
    DeadlockDemo {
        #[arg(long, value_enum, default_value = "even")]
        construction: Construction,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 60.0)]
        seconds: f64,
        /// Controller `v_l0,v_r0,v_l1,v_r1`.
        #[arg(long, value_delimiter = ',', num_args = 4)]
        controller: Option<Vec<f64>>,
    },
    /// Compare simulated revolutions with the cone rotation bound; prints
    /// `beta,d0,measured_m,bound_m,pass`.
    VerifyBounds {
        #[arg(long, value_delimiter = ',', required = true)]
        beta: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        d0: Vec<f64>,
    },
    /// Evaluate the four metrics on a CSV of `x,y` points.
    Metrics {
        #[arg(long)]
        input: PathBuf,
        /// Robot radius for the cluster fraction.
        #[arg(long, default_value_t = PhysicsParams::EPUCK.robot_radius)]
        radius: f64,
        /// Extra gap still counted as touching.
        #[arg(long, default_value_t = 0.1 * PhysicsParams::EPUCK.robot_radius)]
        tolerance: f64,
    },
}

/// Parses the process arguments and runs; errors go to stderr.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli, &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> anyhow::Result<()> {
    match cli.command {
        Command::Run {
            mode,
            n,
            horizon,
            seed,
            beta,
            motion_noise,
            error_probability,
            perturbation,
            arena,
            cadence,
            threshold,
            out: path,
        } => {
            let (series, mode, entries) = match mode {
                ModeArg::Continuous => {
                    let params = PhysicsParams::EPUCK.with_cone_angle(beta);
                    let noise = NoiseModel::new(motion_noise, error_probability)?;
                    let mut world = continuous_world(n, arena, params, noise, seed)?;
                    let run = run(&mut world, horizon, cadence)?;
                    let entries = vec![
                        ("mode", "continuous".to_string()),
                        ("n", n.to_string()),
                        ("seed", seed.to_string()),
                        ("controller", Controller::X_STAR.to_string()),
                        ("params", format!("{params:?}")),
                        ("noise", format!("{noise:?}")),
                        ("arena_side", fmt_sig9(arena)),
                        ("contact_overflows", run.contact_overflows.to_string()),
                    ];
                    (run.series, Mode::Continuous, entries)
                }
                ModeArg::Discrete => {
                    if horizon.fract() != 0.0 || cadence.fract() != 0.0 {
                        bail!("horizon and cadence must be whole rounds in discrete mode");
                    }
                    let noise = DiscreteNoise::new(error_probability, perturbation)?;
                    let mut world = LatticeWorld::random(n, noise, seed)?;
                    let (series, _) =
                        run_rounds_until(&mut world, horizon as u64, cadence as u64, |_| false)?;
                    let entries = vec![
                        ("mode", "discrete".to_string()),
                        ("n", n.to_string()),
                        ("seed", seed.to_string()),
                        ("noise", format!("{noise:?}")),
                    ];
                    (series, Mode::Discrete, entries)
                }
            };
            let agg = detect_aggregation(&series, n, threshold, mode.baseline_spacing())?;
            match path {
                Some(p) => {
                    std::fs::write(&p, metrics_csv(&series))
                        .with_context(|| format!("writing {}", p.display()))?;
                    write_sidecar(&p.with_extension("txt"), &entries)?;
                    writeln!(out, "aggregation_time {agg}")?;
                }
                None => write!(out, "{}", metrics_csv(&series))?,
            }
        }
        Command::Sweep {
            spec,
            out: dir,
            workers,
            early_stop,
        } => {
            let spec = ExperimentSpec::from_file(&spec)
                .with_context(|| format!("reading {}", spec.display()))?;
            let records = sweep(
                &spec,
                &SweepOptions {
                    early_stop,
                    out_dir: Some(dir.clone()),
                    workers,
                },
            )?;
            let failed = records.iter().filter(|r| r.error.is_some()).count();
            writeln!(
                out,
                "{} runs ({} failed); summary in {}",
                records.len(),
                failed,
                dir.join("summary.csv").display()
            )?;
        }
        Command::DeadlockDemo {
            construction,
            n,
            seconds,
            controller,
        } => {
            let params = PhysicsParams::EPUCK;
            let controller = match controller {
                Some(v) => Controller::new(v[0], v[1], v[2], v[3])?,
                None => Controller::X_STAR,
            };
            if !controller.is_clockwise_searching() {
                bail!("controller {controller} is not clockwise-searching");
            }
            let poses = match construction {
                Construction::Even => gen_deadlock_even(n, params.robot_radius)?,
                Construction::Odd => gen_deadlock_odd(n, params.robot_radius)?,
                Construction::Ring => gen_ring_deadlock(n, &params)?,
            };
            let report = deadlock_motion(poses, params, controller, seconds)?;
            writeln!(
                out,
                "construction {construction:?} n {n} controller {controller}"
            )?;
            writeln!(out, "max_displacement_cm {:e}", report.max_displacement)?;
            writeln!(out, "dispersion_change {:e}", report.dispersion_change)?;
        }
        Command::VerifyBounds { beta, d0 } => {
            writeln!(out, "beta,d0,measured_m,bound_m,pass")?;
            let mut all = true;
            for &b in &beta {
                for &d in &d0 {
                    let c = verify_bound_by_simulation(d, b, &PhysicsParams::EPUCK)
                        .with_context(|| format!("beta {b}, d0 {d}"))?;
                    all &= c.pass;
                    writeln!(
                        out,
                        "{},{},{},{},{}",
                        fmt_sig9(b),
                        fmt_sig9(d),
                        c.measured_m,
                        c.bound_m,
                        c.pass
                    )?;
                }
            }
            if !all {
                bail!("bound violated");
            }
        }
        Command::Metrics {
            input,
            radius,
            tolerance,
        } => {
            let points = read_points(&input)?;
            let m = MetricsSample::evaluate(0.0, &points, radius, tolerance)?;
            writeln!(out, "sed_circumference {}", fmt_sig9(m.sed_circumference))?;
            writeln!(out, "hull_perimeter {}", fmt_sig9(m.hull_perimeter))?;
            writeln!(out, "dispersion {}", fmt_sig9(m.dispersion))?;
            writeln!(out, "cluster_fraction {}", fmt_sig9(m.cluster_fraction))?;
        }
    }
    Ok(())
}

/// How far a configuration moved over a zero-noise run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeadlockReport {
    pub max_displacement: f64,
    pub dispersion_change: f64,
}

pub fn deadlock_motion(
    poses: Vec<RobotPose>,
    params: PhysicsParams,
    controller: Controller,
    seconds: f64,
) -> anyhow::Result<DeadlockReport> {
    let start: Vec<Point2> = poses.iter().map(|p| p.position).collect();
    let mut world = World::new(poses, params, NoiseModel::NONE, controller, 0)?;
    let series = run(&mut world, seconds, 1.0)?.series;
    let max_displacement = world
        .positions()
        .iter()
        .zip(&start)
        .map(|(a, b)| a.dist(*b))
        .fold(0.0, f64::max);
    let d0 = series[0].dispersion;
    let dispersion_change = series
        .iter()
        .map(|s| (s.dispersion - d0).abs())
        .fold(0.0, f64::max);
    Ok(DeadlockReport {
        max_displacement,
        dispersion_change,
    })
}

fn read_points(path: &std::path::Path) -> anyhow::Result<Vec<Point2>> {
    let mut rdr =
        csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .with_context(|| format!("{}: missing column `{name}`", path.display()))
    };
    let (xi, yi) = (col("x")?, col("y")?);
    let mut points = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row?;
        let get = |i: usize, name: &str| -> anyhow::Result<f64> {
            row.get(i)
                .and_then(|s| s.trim().parse().ok())
                .with_context(|| format!("row {}: bad `{name}`", line + 1))
        };
        points.push(Point2::new(get(xi, "x")?, get(yi, "y")?));
    }
    Ok(points)
}
