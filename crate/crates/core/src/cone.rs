//! Cone-of-sight analysis for one moving robot and one static robot.
//!
//! Canonical frame: the mover's center of rotation `c_i` is the origin and,
//! at the moment the mover first sees robot `j`, its cone axis points along
//! +x with the mover at `(0, -R)`. While `j` stays in sight the mover spins
//! in place; it loses sight after turning `alpha + 2 gamma`, where `alpha` is
//! the angular width of `j` seen from the mover and `gamma` is the angle from
//! the axis to the first tangent of `j`. Its new center `c_i'` is then
//! closer to `j`, and repeating this bounds the number of revolutions until
//! contact.

use std::f64::consts::{PI, TAU};

use crate::continuous::{
    body_twist, cone_sees_disc, Controller, NoiseModel, PhysicsParams, RobotPose, World,
};
use crate::error::{invalid, Error, Result};
use crate::geometry::Point2;

const SIN_GUARD: f64 = 1e-12;
const BISECTION_TOLERANCE: f64 = 1e-10;
const SCAN_STEP: f64 = 1e-3;

/// Snapshot of the two-robot geometry at first sight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeGeometry {
    /// Orbit radius of the mover.
    pub orbit_radius: f64,
    pub r_i: f64,
    pub r_j: f64,
    /// Full cone angle.
    pub beta: f64,
    /// `|p_j - c_i|`.
    pub d: f64,
    pub alpha: f64,
    pub gamma: f64,
}

/// Constants of the rotation bound: `r = R / k1`, `k2 = 1 / (1 + 2 / k1)`,
/// and `m` the bound itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub d0: f64,
    pub k1: f64,
    pub k2: f64,
    pub m: u64,
}

impl BoundParams {
    pub fn new(d0: f64, orbit_radius: f64, r: f64, beta: f64) -> Result<Self> {
        let m = rotation_bound(d0, orbit_radius, r, r, beta)?;
        let k1 = orbit_radius / r;
        Ok(Self {
            d0,
            k1,
            k2: 1.0 / (1.0 + 2.0 / k1),
            m,
        })
    }
}

/// Position of robot `j` in the canonical frame.
pub fn p_j_position(alpha: f64, gamma: f64, orbit_radius: f64, r_j: f64) -> Result<Point2> {
    if !(alpha > 0.0 && alpha < PI) {
        return Err(invalid("alpha", format!("{alpha} outside (0, pi)")));
    }
    if !(0.0..PI / 2.0).contains(&gamma) {
        return Err(invalid("gamma", format!("{gamma} outside [0, pi/2)")));
    }
    let s = (alpha / 2.0).sin();
    if s < SIN_GUARD {
        return Err(Error::Singular("sin(alpha/2) vanishes"));
    }
    let t = alpha / 2.0 + gamma;
    Ok(Point2::new(
        r_j * t.cos() / s,
        -(orbit_radius + r_j * t.sin() / s),
    ))
}

/// The mover's center of rotation after it has turned `alpha + 2 gamma` in
/// place.
pub fn c_prime(alpha: f64, gamma: f64, orbit_radius: f64) -> Point2 {
    let turn = alpha + 2.0 * gamma;
    Point2::new(orbit_radius * turn.sin(), orbit_radius * (turn.cos() - 1.0))
}

/// `|p_j - c_i'|` after one sighting, given `d = |p_j - c_i|` before it.
pub fn d_prime(d: f64, alpha: f64, gamma: f64, orbit_radius: f64, r_j: f64) -> Result<f64> {
    let s = (alpha / 2.0).sin();
    if s.abs() < SIN_GUARD {
        return Err(Error::Singular("sin(alpha/2) vanishes"));
    }
    let radicand = d * d - 4.0 * orbit_radius * r_j * (alpha / 2.0 + gamma).sin() / s;
    if radicand < 0.0 {
        return Err(Error::AggregatesWithinRevolution(radicand));
    }
    Ok(radicand.sqrt())
}

/// Angular width of a disc of radius `r_j` seen from distance `dist`.
pub fn visibility_arc(dist: f64, r_j: f64) -> Result<f64> {
    if !(dist > r_j) {
        return Err(invalid("dist", "must exceed the disc radius"));
    }
    Ok(2.0 * (r_j / dist).asin())
}

/// Reconstructs `alpha` and `gamma` at first sight by sweeping the mover
/// along its clockwise orbit (center at the origin, `j` at distance `d`) and
/// bisecting on the orbit angle at which the cone first meets disc `j`.
pub fn solve_alpha_gamma(
    d: f64,
    orbit_radius: f64,
    r_i: f64,
    r_j: f64,
    beta: f64,
) -> Result<ConeGeometry> {
    if !(orbit_radius > 0.0 && r_i > 0.0 && r_j > 0.0) {
        return Err(invalid("radii", "must be positive"));
    }
    if !(0.0..PI).contains(&beta) {
        return Err(invalid("beta", format!("{beta} outside [0, pi)")));
    }
    if !(d > orbit_radius + r_j) {
        return Err(invalid("d", format!("{d} must exceed R + r_j")));
    }
    let target = Point2::new(0.0, d);
    let (sh, ch) = (beta / 2.0).sin_cos();
    let pose_at = |theta: f64| {
        let p = Point2::new(0.0, -orbit_radius).rotate(-theta);
        (p, Point2::from_angle(-theta))
    };
    let sees = |theta: f64| {
        let (p, axis) = pose_at(theta);
        cone_sees_disc(p, axis, ch, sh, target, r_j)
    };

    // start from a phase where j is out of sight, then walk clockwise
    let steps = (TAU / SCAN_STEP).ceil() as usize;
    let start = (0..steps)
        .map(|k| k as f64 * SCAN_STEP)
        .find(|&t| !sees(t))
        .ok_or_else(|| Error::NeverVisible("target is always in sight".into()))?;
    let mut lo = start;
    let mut hi = None;
    for k in 1..=steps {
        let t = start + k as f64 * SCAN_STEP;
        if sees(t) {
            hi = Some(t);
            break;
        }
        lo = t;
    }
    let mut hi = hi.ok_or_else(|| Error::NeverVisible(format!("d = {d}, beta = {beta}")))?;
    while hi - lo > BISECTION_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if sees(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    let (p, axis) = pose_at(hi);
    let rel = target - p;
    let dist = rel.norm();
    let alpha = visibility_arc(dist, r_j)?;
    let bearing = axis.cross(rel).atan2(axis.dot(rel)).abs();
    let gamma = (bearing - alpha / 2.0).max(0.0);
    Ok(ConeGeometry {
        orbit_radius,
        r_i,
        r_j,
        beta,
        d,
        alpha,
        gamma,
    })
}

/// `beta/2 - asin(sin(beta/2) / sqrt 3)`. The radius cancels out of the
/// derivation; it is accepted so callers can pass the full geometry.
pub fn gamma_exact_lb(beta: f64, _r_i: f64) -> f64 {
    beta / 2.0 - ((beta / 2.0).sin() / 3f64.sqrt()).asin()
}

/// `(1 - 1/sqrt 3) * beta / 2`, the linearized lower bound on `gamma`.
pub fn gamma_linear_lb(beta: f64) -> f64 {
    (1.0 - 1.0 / 3f64.sqrt()) * beta / 2.0
}

/// The expression inside the ceiling of [`rotation_bound`].
pub fn rotation_bound_raw(
    d0: f64,
    orbit_radius: f64,
    r_i: f64,
    r_j: f64,
    beta: f64,
) -> Result<f64> {
    if !(orbit_radius > 0.0 && r_i > 0.0) {
        return Err(invalid("radii", "must be positive"));
    }
    if (r_i - r_j).abs() > 1e-12 * r_i.max(r_j) {
        return Err(invalid("r_j", "the bound assumes equal radii"));
    }
    if !(r_i < orbit_radius) {
        return Err(invalid("r_i", "must be smaller than the orbit radius"));
    }
    if !(beta > 0.0 && beta < PI) {
        return Err(invalid("beta", format!("{beta} outside (0, pi)")));
    }
    let gap = d0 - (orbit_radius + (r_i + r_j));
    if !(gap >= 0.0) {
        return Err(invalid("d0", format!("{d0} below R + r_i + r_j")));
    }
    Ok(gap * (orbit_radius + 2.0 * r_i)
        / (2.0 * 3f64.sqrt() * orbit_radius * r_i * gamma_linear_lb(beta).sin()))
}

/// Upper bound on the number of sightings (one per revolution) before a
/// robot with cone angle `beta` reaches a static robot from initial
/// center distance `d0`.
pub fn rotation_bound(d0: f64, orbit_radius: f64, r_i: f64, r_j: f64, beta: f64) -> Result<u64> {
    Ok(rotation_bound_raw(d0, orbit_radius, r_i, r_j, beta)?.ceil() as u64)
}

/// Outcome of [`verify_bound_by_simulation`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub beta: f64,
    pub d0: f64,
    /// Sightings completed before the robots touched.
    pub measured_m: u64,
    pub bound_m: u64,
    /// Measured `|p_j - c_i|` each time the mover lost sight of `j`.
    pub distances: Vec<f64>,
    pub touched: bool,
    pub pass: bool,
}

/// Simulates the mover (controller [`Controller::X_STAR`], cone `beta`)
/// against a static robot with `|p_j - c_i| = d0` and counts sightings until
/// contact (within the touch tolerance). Gives up after twice the bound.
pub fn verify_bound_by_simulation(
    d0: f64,
    beta: f64,
    params: &PhysicsParams,
) -> Result<BoundCheck> {
    let params = params.with_cone_angle(beta);
    params.validate()?;
    let r = params.robot_radius;
    let search = body_twist(&Controller::X_STAR, false, &params);
    let orbit_radius = search.turning_radius().abs();
    let bound_m = rotation_bound(d0, orbit_radius, r, r, beta)?;

    // mover at the bottom of its orbit about the origin, j straight above
    let poses = vec![
        RobotPose::new(Point2::new(0.0, -orbit_radius), 0.0),
        RobotPose::new(Point2::new(0.0, d0), 0.0),
    ];
    let mut world =
        World::new(poses, params, NoiseModel::NONE, Controller::X_STAR, 0)?.with_fixed(1);
    let spin = body_twist(&Controller::X_STAR, true, &params).angular.abs();
    // a revolution plus a generous allowance for spinning in place
    let per_revolution = TAU / search.angular.abs() + TAU / spin;
    let cap_steps = ((2 * bound_m.max(1)) as f64 * per_revolution / params.dt).ceil() as u64;

    let target = world.poses[1].position;
    let mut distances = Vec::new();
    let mut seeing = false;
    let mut touched = false;
    for _ in 0..cap_steps {
        world.step();
        if world.poses[0].position.dist(target) <= 2.0 * r + params.touch_tolerance() {
            touched = true;
            break;
        }
        let now = world.last_step().seen[0];
        if seeing && !now {
            distances.push(target.dist(world.search_center(0)));
        }
        seeing = now;
    }
    let measured_m = distances.len() as u64;
    Ok(BoundCheck {
        beta,
        d0,
        measured_m,
        bound_m,
        distances,
        touched,
        pass: touched && measured_m <= bound_m,
    })
}

/// One simulated sighting against [`d_prime`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SightingStep {
    pub d: f64,
    /// `|p_j - c_i'|` in the simulation after the mover lost sight.
    pub simulated: f64,
    /// `d_prime` evaluated on the solved first-sight geometry.
    pub predicted: f64,
}

impl SightingStep {
    pub fn relative_error(&self) -> f64 {
        (self.simulated - self.predicted).abs() / self.predicted
    }
}

/// Runs the mover from the bottom of its orbit (cone axis +x, `j` straight
/// above its center at distance `d`) until it first loses sight of `j`.
pub fn simulate_one_sighting(d: f64, beta: f64, params: &PhysicsParams) -> Result<SightingStep> {
    let params = params.with_cone_angle(beta);
    params.validate()?;
    let r = params.robot_radius;
    let orbit_radius = body_twist(&Controller::X_STAR, false, &params)
        .turning_radius()
        .abs();
    let geometry = solve_alpha_gamma(d, orbit_radius, r, r, beta)?;
    let predicted = d_prime(d, geometry.alpha, geometry.gamma, orbit_radius, r)?;

    let poses = vec![
        RobotPose::new(Point2::new(0.0, -orbit_radius), 0.0),
        RobotPose::new(Point2::new(0.0, d), 0.0),
    ];
    let mut world =
        World::new(poses, params, NoiseModel::NONE, Controller::X_STAR, 0)?.with_fixed(1);
    if world.sees_any(0) {
        return Err(invalid("beta", "target already in sight at the start"));
    }
    let target = world.poses[1].position;
    let cap = (2.0 * TAU
        / body_twist(&Controller::X_STAR, false, &params)
            .angular
            .abs()
        / params.dt) as u64;
    let mut seeing = false;
    for _ in 0..cap {
        world.step();
        if world.poses[0].position.dist(target) <= 2.0 * r + params.touch_tolerance() {
            return Err(Error::AggregatesWithinRevolution(0.0));
        }
        let now = world.last_step().seen[0];
        if seeing && !now {
            return Ok(SightingStep {
                d,
                simulated: target.dist(world.search_center(0)),
                predicted,
            });
        }
        seeing = now;
    }
    Err(Error::NeverVisible(format!("d = {d}, beta = {beta}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    const R: f64 = 14.45;
    const RJ: f64 = 3.7;

    #[test]
    fn p_j_at_right_angle() {
        let p = p_j_position(FRAC_PI_2, 0.0, 10.0, 2.0).unwrap();
        assert_abs_diff_eq!(p.x, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.y, -12.0, epsilon = 1e-12);
        assert!(p_j_position(0.0, 0.0, 10.0, 2.0).is_err());
    }

    #[test]
    fn p_j_distance_identity() {
        for &(a, g) in &[(0.3, 0.1), (1.0, 0.4), (0.05, 0.0)] {
            let p = p_j_position(a, g, R, RJ).unwrap();
            let s = (a / 2.0).sin();
            let d2 = R * R + 2.0 * R * RJ * (a / 2.0 + g).sin() / s + RJ * RJ / (s * s);
            assert_abs_diff_eq!(p.norm_sq(), d2, epsilon = 1e-9 * d2);
        }
    }

    #[test]
    fn d_prime_line_of_sight() {
        let d = d_prime(20.0, 0.4, 0.0, R, RJ).unwrap();
        assert_abs_diff_eq!(d, 13.64331338055386, epsilon = 1e-12);
        // independent of alpha when gamma = 0
        assert_abs_diff_eq!(d, d_prime(20.0, 1.0, 0.0, R, RJ).unwrap(), epsilon = 1e-12);
        assert!(matches!(
            d_prime(R + 2.0 * RJ, 0.1, 0.4, R, RJ),
            Err(Error::AggregatesWithinRevolution(_))
        ));
    }

    #[test]
    fn d_prime_matches_explicit_center() {
        for &(a, g) in &[(0.3, 0.1), (0.9, 0.45), (0.1, 0.02)] {
            let pj = p_j_position(a, g, R, RJ).unwrap();
            let d = pj.norm();
            let direct = pj.dist(c_prime(a, g, R));
            assert_abs_diff_eq!(d_prime(d, a, g, R, RJ).unwrap(), direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn touching_discs_span_sixty_degrees() {
        assert_abs_diff_eq!(
            visibility_arc(2.0 * RJ, RJ).unwrap(),
            PI / 3.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn solved_geometry_round_trips() {
        for &(d, beta) in &[(30.0, 0.0), (50.0, 0.2), (80.0, 1.0), (25.0, 2.0)] {
            let g = solve_alpha_gamma(d, R, RJ, RJ, beta).unwrap();
            assert!(g.gamma <= beta / 2.0 + 1e-9);
            assert!(g.gamma >= gamma_linear_lb(beta) - 1e-9);
            assert!((g.alpha / 2.0).sin() < RJ / (d - R) + 1e-9);
            let p = p_j_position(g.alpha, g.gamma, R, RJ).unwrap();
            assert!(
                (p.norm() - d).abs() < 1e-8,
                "d {d} beta {beta}: {}",
                p.norm()
            );
        }
        assert!(solve_alpha_gamma(R, R, RJ, RJ, 0.5).is_err());
    }

    #[test]
    fn small_cone_gives_small_gamma() {
        let g = solve_alpha_gamma(40.0, R, RJ, RJ, 1e-6).unwrap();
        assert!(g.gamma < 1e-6);
    }

    #[test]
    fn gamma_bounds() {
        assert_abs_diff_eq!(
            gamma_exact_lb(FRAC_PI_2, RJ),
            0.36486382811348318,
            epsilon = 1e-14
        );
        let ratio = gamma_exact_lb(1e-3, RJ) / 1e-3;
        assert_abs_diff_eq!(ratio, 0.211324873423941, epsilon = 1e-12);
        assert_abs_diff_eq!(0.5 - 0.5 / 3f64.sqrt(), 0.2113248654051871, epsilon = 1e-16);
    }

    #[test]
    fn rotation_bound_regression() {
        let raw = rotation_bound_raw(100.0, R, RJ, RJ, 0.5).unwrap();
        assert_abs_diff_eq!(raw, 87.41944442703524, epsilon = 1e-9);
        assert_eq!(rotation_bound(100.0, R, RJ, RJ, 0.5).unwrap(), 88);
        assert_eq!(rotation_bound(R + 2.0 * RJ, R, RJ, RJ, 0.5).unwrap(), 0);
        let base = R + 2.0 * RJ;
        let a = rotation_bound_raw(base + 10.0, R, RJ, RJ, 0.7).unwrap();
        let b = rotation_bound_raw(base + 20.0, R, RJ, RJ, 0.7).unwrap();
        assert_abs_diff_eq!(b, 2.0 * a, epsilon = 1e-9);
    }

    #[test]
    fn rotation_bound_preconditions() {
        assert!(rotation_bound(10.0, R, RJ, RJ, 0.5).is_err());
        assert!(rotation_bound(50.0, R, RJ, 3.0, 0.5).is_err());
        assert!(rotation_bound(50.0, R, RJ, RJ, 0.0).is_err());
        assert!(rotation_bound(50.0, R, RJ, RJ, PI).is_err());
        assert!(rotation_bound(50.0, 3.0, RJ, RJ, 0.5).is_err());
    }

    #[test]
    fn bound_params_constants() {
        let b = BoundParams::new(100.0, R, RJ, 0.5).unwrap();
        assert_abs_diff_eq!(b.k1, R / RJ, epsilon = 1e-15);
        assert!(b.k1 > 1.0 && b.k2 < 1.0);
        assert_eq!(b.m, 88);
    }

    #[test]
    fn simulated_bound_holds() {
        let check = verify_bound_by_simulation(50.0, 0.6, &PhysicsParams::EPUCK).unwrap();
        assert!(check.touched);
        assert!(check.pass, "{check:?}");
        for w in check.distances.windows(2) {
            assert!(w[1] < w[0]);
        }
    }
}
