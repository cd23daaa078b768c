//! Continuous-plane simulation of disc robots driven by a binary sight
//! sensor.
//!
//! Robots are rigid discs of radius `r` with differential-drive kinematics.
//! The sensor axis is the robot's heading; a robot moving with linear speed
//! `v` and angular speed `omega` turns about the point `v / omega` to the left
//! of its heading. For the canonical controller [`Controller::X_STAR`] that
//! point sits 90 degrees counter-clockwise from the sensor, 14.45 cm away.

mod configs;
mod contact;
mod sensing;
mod world;

pub use configs::{
    gen_deadlock_even, gen_deadlock_odd, gen_random, gen_ring_deadlock, gen_symmetric_cycle,
    gen_symmetric_cycle_with_offset, ring_radius_for, CYCLE_HEADING_OFFSET,
};
pub use contact::{
    resolve_contacts, resolve_contacts_weighted, resolve_velocities, ContactResolution,
    ImpulseCache, CONTACT_FRICTION, CONTACT_ITERATIONS, CONTACT_SLOP, OVERLAP_TOLERANCE,
};
pub use sensing::{cone_sees_disc, ray_hits_disc};
pub use world::{run, run_until, RunOutput, StepReport, World};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::Point2;

/// Wheel commands `(v_l0, v_r0)` used when nothing is seen and
/// `(v_l1, v_r1)` used when a robot is seen, each in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Controller {
    pub v_l0: f64,
    pub v_r0: f64,
    pub v_l1: f64,
    pub v_r1: f64,
}

impl Controller {
    /// The aggregation controller: back up along a clockwise orbit when
    /// nothing is seen, spin clockwise in place otherwise.
    pub const X_STAR: Controller = Controller {
        v_l0: -0.7,
        v_r0: -1.0,
        v_l1: 1.0,
        v_r1: -1.0,
    };

    pub fn new(v_l0: f64, v_r0: f64, v_l1: f64, v_r1: f64) -> Result<Self> {
        let c = Self {
            v_l0,
            v_r0,
            v_l1,
            v_r1,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("v_l0", self.v_l0),
            ("v_r0", self.v_r0),
            ("v_l1", self.v_l1),
            ("v_r1", self.v_r1),
        ] {
            if !(-1.0..=1.0).contains(&v) {
                return Err(invalid(name, format!("{v} outside [-1, 1]")));
            }
        }
        Ok(())
    }

    /// `v_r0 < v_l0 < 0`: with nothing in sight the robot backs along a
    /// clockwise orbit.
    pub fn is_clockwise_searching(&self) -> bool {
        self.v_r0 < self.v_l0 && self.v_l0 < 0.0
    }

    pub fn wheels(&self, seen: bool) -> (f64, f64) {
        if seen {
            (self.v_l1, self.v_r1)
        } else {
            (self.v_l0, self.v_r0)
        }
    }
}

impl std::fmt::Display for Controller {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.v_l0, self.v_r0, self.v_l1, self.v_r1
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicsParams {
    /// cm
    pub robot_radius: f64,
    /// Distance between the wheels, cm.
    pub axle_length: f64,
    /// Wheel speed for a unit command, cm/s.
    pub max_wheel_speed: f64,
    /// Integration step, s.
    pub dt: f64,
    /// Full apex angle of the sight cone in radians; 0 is a line of sight.
    pub cone_angle: f64,
    /// Converts a noise force (N) into a velocity (cm/s): `v = f / damping`.
    pub damping: f64,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        Self::EPUCK
    }
}

impl PhysicsParams {
    /// e-puck scale constants. With [`Controller::X_STAR`] these give an
    /// orbit radius of 14.45 cm at -0.753 rad/s and an in-place spin of
    /// -5.02 rad/s.
    pub const EPUCK: PhysicsParams = PhysicsParams {
        robot_radius: 3.7,
        axle_length: 5.1,
        max_wheel_speed: 12.8,
        dt: 0.005,
        cone_angle: 0.0,
        damping: 1.0,
    };

    pub fn with_cone_angle(mut self, beta: f64) -> Self {
        self.cone_angle = beta;
        self
    }

    pub fn half_angle(&self) -> f64 {
        self.cone_angle / 2.0
    }

    /// Distance under which two robots count as touching for the cluster
    /// metric, beyond exact contact.
    pub fn touch_tolerance(&self) -> f64 {
        0.1 * self.robot_radius
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("robot_radius", self.robot_radius),
            ("axle_length", self.axle_length),
            ("max_wheel_speed", self.max_wheel_speed),
            ("dt", self.dt),
            ("damping", self.damping),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("{v} must be positive")));
            }
        }
        if !(0.0..std::f64::consts::PI).contains(&self.cone_angle) {
            return Err(invalid(
                "cone_angle",
                format!("{} outside [0, pi)", self.cone_angle),
            ));
        }
        Ok(())
    }
}

/// Motion noise cap (newtons) and sensor error probability.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    pub motion_noise_max: f64,
    pub error_probability: f64,
}

impl NoiseModel {
    pub const NONE: NoiseModel = NoiseModel {
        motion_noise_max: 0.0,
        error_probability: 0.0,
    };

    pub fn new(motion_noise_max: f64, error_probability: f64) -> Result<Self> {
        let n = Self {
            motion_noise_max,
            error_probability,
        };
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.motion_noise_max >= 0.0 && self.motion_noise_max.is_finite()) {
            return Err(invalid("motion_noise_max", "must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.error_probability) {
            return Err(invalid("error_probability", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotPose {
    pub position: Point2,
    /// Direction of the sensor axis, radians in `[0, 2*pi)`.
    pub heading: f64,
}

impl RobotPose {
    pub fn new(position: Point2, heading: f64) -> Self {
        Self {
            position,
            heading: normalize_angle(heading),
        }
    }

    pub fn direction(&self) -> Point2 {
        Point2::from_angle(self.heading)
    }

    /// Instantaneous center of rotation for a twist with signed turning
    /// radius `v / omega`.
    pub fn center_of_rotation(&self, turning_radius: f64) -> Point2 {
        self.position + self.direction().perp() * turning_radius
    }
}

pub fn normalize_angle(a: f64) -> f64 {
    let t = a.rem_euclid(std::f64::consts::TAU);
    // rem_euclid can round up to TAU itself
    if t >= std::f64::consts::TAU {
        0.0
    } else {
        t
    }
}

/// Wrap to `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let t = normalize_angle(a);
    if t > std::f64::consts::PI {
        t - std::f64::consts::TAU
    } else {
        t
    }
}

/// Linear (cm/s) and angular (rad/s) body velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist {
    pub linear: f64,
    pub angular: f64,
}

impl Twist {
    /// Signed distance from the robot to its center of rotation, measured to
    /// the left of the heading. Infinite for straight-line motion.
    pub fn turning_radius(&self) -> f64 {
        if self.angular == 0.0 {
            f64::INFINITY
        } else {
            self.linear / self.angular
        }
    }
}

pub fn body_twist(controller: &Controller, seen: bool, params: &PhysicsParams) -> Twist {
    let (vl, vr) = controller.wheels(seen);
    Twist {
        linear: params.max_wheel_speed * (vl + vr) / 2.0,
        angular: params.max_wheel_speed * (vr - vl) / params.axle_length,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn x_star_twists_match_calibration() {
        let p = PhysicsParams::EPUCK;
        let search = body_twist(&Controller::X_STAR, false, &p);
        assert_abs_diff_eq!(search.angular, -0.7529, epsilon = 5e-5);
        assert_abs_diff_eq!(search.turning_radius().abs(), 14.45, epsilon = 1e-9);
        // center lies to the left of the sensor axis
        assert!(search.turning_radius() > 0.0);
        let spin = body_twist(&Controller::X_STAR, true, &p);
        assert_eq!(spin.linear, 0.0);
        assert_abs_diff_eq!(spin.angular, -5.0196, epsilon = 5e-5);
    }

    #[test]
    fn straight_controller() {
        let c = Controller::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let t = body_twist(&c, false, &PhysicsParams::EPUCK);
        assert_eq!(t.angular, 0.0);
        assert_eq!(t.linear, 12.8);
        assert!(t.turning_radius().is_infinite());
    }

    #[test]
    fn controller_validation_and_predicate() {
        assert!(Controller::new(1.5, 0.0, 0.0, 0.0).is_err());
        assert!(Controller::X_STAR.is_clockwise_searching());
        assert!(!Controller::new(-1.0, -0.7, 1.0, -1.0)
            .unwrap()
            .is_clockwise_searching());
        assert!(!Controller::new(0.2, -0.7, 1.0, -1.0)
            .unwrap()
            .is_clockwise_searching());
    }

    #[test]
    fn param_and_noise_validation() {
        assert!(PhysicsParams::EPUCK.validate().is_ok());
        assert!(PhysicsParams::EPUCK
            .with_cone_angle(3.2)
            .validate()
            .is_err());
        let mut p = PhysicsParams::EPUCK;
        p.dt = 0.0;
        assert!(p.validate().is_err());
        assert!(NoiseModel::new(-1.0, 0.0).is_err());
        assert!(NoiseModel::new(0.0, 1.2).is_err());
        assert!(NoiseModel::new(5.0, 0.05).is_ok());
    }

    #[test]
    fn angle_helpers() {
        use std::f64::consts::{PI, TAU};
        assert_eq!(normalize_angle(-PI / 2.0), 1.5 * PI);
        assert_eq!(normalize_angle(TAU), 0.0);
        assert_abs_diff_eq!(wrap_angle(1.5 * PI), -PI / 2.0, epsilon = 1e-15);
        assert_eq!(wrap_angle(PI), PI);
    }
}
