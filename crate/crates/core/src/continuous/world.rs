use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::contact::{resolve_contacts_weighted, resolve_velocities, ImpulseCache};
use super::sensing::cone_sees_disc;
use super::{body_twist, normalize_angle, Controller, NoiseModel, PhysicsParams, RobotPose};
use crate::error::{invalid, Result};
use crate::geometry::{MetricsSample, Point2};

/// Fraction of a blocked robot's commanded motion below which it is
/// treated as fully stopped.
const BLOCKED_FRACTION: f64 = 1e-9;

/// A swarm of equal disc robots sharing one controller.
#[derive(Debug, Clone)]
pub struct World {
    pub poses: Vec<RobotPose>,
    /// Robots that never sense or move and cannot be pushed.
    pub fixed: Vec<bool>,
    pub params: PhysicsParams,
    pub noise: NoiseModel,
    pub controller: Controller,
    pub time: f64,
    pub seed: u64,
    pub steps: u64,
    /// Number of steps whose contact projection failed to converge.
    pub contact_overflows: u64,
    rng: ChaCha8Rng,
    last: StepReport,
    impulses: ImpulseCache,
}

/// Per-robot record of the most recent step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepReport {
    /// Sensor reading after the error flip.
    pub seen: Vec<bool>,
    /// Share of the commanded motion each robot achieved, in `[0, 1]`.
    pub progress: Vec<f64>,
    pub overflow: bool,
}

impl World {
    pub fn new(
        poses: Vec<RobotPose>,
        params: PhysicsParams,
        noise: NoiseModel,
        controller: Controller,
        seed: u64,
    ) -> Result<Self> {
        params.validate()?;
        noise.validate()?;
        controller.validate()?;
        if poses
            .iter()
            .any(|p| !p.position.is_finite() || !p.heading.is_finite())
        {
            return Err(invalid("poses", "non-finite pose"));
        }
        let n = poses.len();
        Ok(Self {
            fixed: vec![false; n],
            poses,
            params,
            noise,
            controller,
            time: 0.0,
            seed,
            steps: 0,
            contact_overflows: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            last: StepReport::default(),
            impulses: ImpulseCache::default(),
        })
    }

    /// Marks robot `i` as immovable.
    pub fn with_fixed(mut self, i: usize) -> Self {
        self.fixed[i] = true;
        self
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    pub fn positions(&self) -> Vec<Point2> {
        self.poses.iter().map(|p| p.position).collect()
    }

    pub fn last_step(&self) -> &StepReport {
        &self.last
    }

    /// Noise-free sensor reading of robot `i`.
    pub fn sees_any(&self, i: usize) -> bool {
        let (s, c) = self.params.half_angle().sin_cos();
        let me = &self.poses[i];
        let axis = me.direction();
        let r = self.params.robot_radius;
        self.poses
            .iter()
            .enumerate()
            .any(|(j, other)| j != i && cone_sees_disc(me.position, axis, c, s, other.position, r))
    }

    /// Sensor reading of robot `i`, flipped with the error probability.
    pub fn sense(&mut self, i: usize) -> bool {
        let truth = self.sees_any(i);
        let p = self.noise.error_probability;
        if p > 0.0 && self.rng.gen::<f64>() < p {
            !truth
        } else {
            truth
        }
    }

    /// Center of rotation robot `i` would orbit with nothing in sight.
    pub fn search_center(&self, i: usize) -> Point2 {
        let t = body_twist(&self.controller, false, &self.params);
        self.poses[i].center_of_rotation(t.turning_radius())
    }

    pub fn metrics(&self) -> MetricsSample {
        MetricsSample::evaluate(
            self.time,
            &self.positions(),
            self.params.robot_radius,
            self.params.touch_tolerance(),
        )
        .expect("world has robots")
    }

    /// Advances the world by one time step.
    pub fn step(&mut self) {
        let n = self.len();
        let dt = self.params.dt;
        let current = self.positions();

        let mut seen = vec![false; n];
        for (i, s) in seen.iter_mut().enumerate() {
            if !self.fixed[i] {
                *s = self.sense(i);
            }
        }

        let twists: Vec<_> = seen
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                if self.fixed[i] {
                    None
                } else {
                    Some(body_twist(&self.controller, s, &self.params))
                }
            })
            .collect();
        let desired: Vec<Point2> = (0..n)
            .map(|i| match twists[i] {
                Some(t) => self.poses[i].direction() * t.linear,
                None => Point2::ORIGIN,
            })
            .collect();
        let mut allowed = desired.clone();
        resolve_velocities(
            &current,
            &mut allowed,
            self.params.robot_radius,
            dt,
            &self.fixed,
            &mut self.impulses,
        );

        let mut progress = vec![1.0; n];
        let mut proposed = current.clone();
        let mut headings: Vec<f64> = self.poses.iter().map(|p| p.heading).collect();
        for i in 0..n {
            let Some(twist) = twists[i] else {
                progress[i] = 0.0;
                continue;
            };
            let pose = self.poses[i];
            let want = desired[i];
            let mut got = allowed[i];
            let speed_sq = want.norm_sq();
            // solver residue on a blocked robot, not motion
            if got.norm_sq() <= BLOCKED_FRACTION * BLOCKED_FRACTION * speed_sq {
                got = Point2::ORIGIN;
            }
            if (got - want).norm_sq() <= 1e-24 * speed_sq.max(1.0) {
                let (p, h) = integrate_arc(pose, twist.linear, twist.angular, dt);
                proposed[i] = p;
                headings[i] = h;
            } else {
                // a robot spinning in place keeps spinning while pushed
                let mut s = if speed_sq > 0.0 {
                    (got.dot(want) / speed_sq).clamp(0.0, 1.0)
                } else {
                    1.0
                };
                if s < BLOCKED_FRACTION {
                    s = 0.0;
                }
                progress[i] = s;
                proposed[i] = pose.position + got * dt;
                headings[i] = normalize_angle(pose.heading + s * twist.angular * dt);
            }
        }

        let m_star = self.noise.motion_noise_max;
        if m_star > 0.0 {
            for i in 0..n {
                if self.fixed[i] {
                    continue;
                }
                let force = self.rng.gen::<f64>() * m_star;
                let angle = self.rng.gen::<f64>() * std::f64::consts::TAU;
                proposed[i] =
                    proposed[i] + Point2::from_angle(angle) * (force / self.params.damping * dt);
            }
        }

        let res =
            resolve_contacts_weighted(&current, &proposed, self.params.robot_radius, &self.fixed);
        if res.overflow {
            self.contact_overflows += 1;
        }
        for i in 0..n {
            self.poses[i].position = res.positions[i];
            self.poses[i].heading = headings[i];
        }
        self.time = (self.steps + 1) as f64 * dt;
        self.steps += 1;
        self.last = StepReport {
            seen,
            progress,
            overflow: res.overflow,
        };
    }
}

/// Exact rigid-body motion for a constant twist over `dt`: rotation about
/// the instantaneous center, or a straight line when `omega` is zero.
pub(crate) fn integrate_arc(pose: RobotPose, linear: f64, angular: f64, dt: f64) -> (Point2, f64) {
    if angular == 0.0 {
        return (
            pose.position + pose.direction() * (linear * dt),
            pose.heading,
        );
    }
    let center = pose.center_of_rotation(linear / angular);
    let turn = angular * dt;
    (
        pose.position.rotate_about(center, turn),
        normalize_angle(pose.heading + turn),
    )
}

/// Metrics series plus bookkeeping from [`run`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub series: Vec<MetricsSample>,
    pub contact_overflows: u64,
    /// Whether the run ended because the stop predicate fired.
    pub stopped_early: bool,
}

/// Steps the world for `duration` seconds, sampling metrics at `t = 0` and
/// every `sample_every` seconds.
pub fn run(world: &mut World, duration: f64, sample_every: f64) -> Result<RunOutput> {
    run_until(world, duration, sample_every, |_| false)
}

/// Like [`run`], stopping after the first sample for which `stop` returns
/// true.
pub fn run_until(
    world: &mut World,
    duration: f64,
    sample_every: f64,
    mut stop: impl FnMut(&MetricsSample) -> bool,
) -> Result<RunOutput> {
    if !(duration > 0.0) {
        return Err(invalid("duration", "must be positive"));
    }
    if !(sample_every > 0.0) {
        return Err(invalid("sample_every", "must be positive"));
    }
    let dt = world.params.dt;
    let total_steps = (duration / dt).round() as u64;
    let cadence = ((sample_every / dt).round() as u64).max(1);
    let overflow_start = world.contact_overflows;

    let mut series = Vec::with_capacity((total_steps / cadence + 2) as usize);
    let first = world.metrics();
    series.push(first);
    let mut stopped_early = stop(&first);
    let mut k = 0;
    while !stopped_early && k < total_steps {
        world.step();
        k += 1;
        if k % cadence == 0 || k == total_steps {
            let s = world.metrics();
            series.push(s);
            stopped_early = stop(&s);
        }
    }
    Ok(RunOutput {
        series,
        contact_overflows: world.contact_overflows - overflow_start,
        stopped_early,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn single(pose: RobotPose) -> World {
        World::new(
            vec![pose],
            PhysicsParams::EPUCK,
            NoiseModel::NONE,
            Controller::X_STAR,
            1,
        )
        .unwrap()
    }

    #[test]
    fn lone_robot_closes_its_orbit() {
        let start = RobotPose::new(Point2::new(3.0, -2.0), 0.4);
        let mut w = single(start);
        let omega = body_twist(&Controller::X_STAR, false, &w.params).angular;
        let period = TAU / omega.abs();
        let steps = (period / w.params.dt).floor() as usize;
        for _ in 0..steps {
            w.step();
        }
        // finish the fractional step exactly
        let rest = period - steps as f64 * w.params.dt;
        let t = body_twist(&Controller::X_STAR, false, &w.params);
        let (p, _) = integrate_arc(w.poses[0], t.linear, t.angular, rest);
        assert!(
            p.dist(start.position) < 1e-3,
            "drift {}",
            p.dist(start.position)
        );
        // orbit radius stays at 14.45 cm from the initial center
        let center = start.center_of_rotation(t.turning_radius());
        assert!((w.poses[0].position.dist(center) - 14.45).abs() < 1e-9);
    }

    #[test]
    fn lone_robot_orbit_center_is_left_of_sensor() {
        let w = single(RobotPose::new(Point2::ORIGIN, PI / 2.0));
        let c = w.search_center(0);
        assert!((c.x + 14.45).abs() < 1e-9 && c.y.abs() < 1e-9);
    }

    #[test]
    fn error_probability_one_inverts() {
        let poses = vec![
            RobotPose::new(Point2::ORIGIN, 0.0),
            RobotPose::new(Point2::new(100.0, 0.0), 0.0),
        ];
        let mut w = World::new(
            poses,
            PhysicsParams::EPUCK,
            NoiseModel::new(0.0, 1.0).unwrap(),
            Controller::X_STAR,
            3,
        )
        .unwrap();
        assert!(w.sees_any(0));
        assert!(!w.sense(0));
        assert!(!w.sees_any(1));
        assert!(w.sense(1));
    }

    #[test]
    fn run_rejects_bad_durations() {
        let mut w = single(RobotPose::new(Point2::ORIGIN, 0.0));
        assert!(run(&mut w, 0.0, 1.0).is_err());
        assert!(run(&mut w, 1.0, 0.0).is_err());
    }

    #[test]
    fn run_samples_on_cadence() {
        let mut w = single(RobotPose::new(Point2::ORIGIN, 0.0));
        let out = run(&mut w, 1.0, 0.25).unwrap();
        let times: Vec<f64> = out.series.iter().map(|s| s.time).collect();
        assert_eq!(times.len(), 5);
        for (k, t) in times.iter().enumerate() {
            assert!((t - 0.25 * k as f64).abs() < 1e-12);
        }
    }
}
