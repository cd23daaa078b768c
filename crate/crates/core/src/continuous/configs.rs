//! Starting configurations: deadlock constructions, symmetric cycles and
//! random placements.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;

use super::contact::CONTACT_SLOP;
use super::sensing::cone_sees_disc;
use super::{PhysicsParams, RobotPose};
use crate::error::{invalid, Error, Result};
use crate::geometry::Point2;

/// Heading offset from the radial direction used by
/// [`gen_symmetric_cycle`]: each robot's sensor points along the
/// counter-clockwise tangent.
pub const CYCLE_HEADING_OFFSET: f64 = FRAC_PI_2;

/// Pairs at `(3r*i, r)` facing +y and `(3r*i, -r)` facing -y. Each pair
/// blocks itself and no robot sees another.
pub fn gen_deadlock_even(n: usize, r: f64) -> Result<Vec<RobotPose>> {
    if !n.is_multiple_of(2) || n <= 3 {
        return Err(invalid(
            "n",
            format!("{n}: even construction needs even n > 3"),
        ));
    }
    Ok(deadlock_pairs(n / 2, r))
}

fn deadlock_pairs(pairs: usize, r: f64) -> Vec<RobotPose> {
    let mut out = Vec::with_capacity(2 * pairs);
    for i in 0..pairs {
        let x = 3.0 * r * i as f64;
        out.push(RobotPose::new(Point2::new(x, r), FRAC_PI_2));
        out.push(RobotPose::new(Point2::new(x, -r), 3.0 * FRAC_PI_2));
    }
    out
}

/// `n - 3` robots in blocking pairs followed by a mutually blocking
/// triangle whose sensors face 120, 240 and 0 degrees.
///
/// The triangle occupies the next pair slot, `x = 3r * floor(n / 2 - 1)`.
pub fn gen_deadlock_odd(n: usize, r: f64) -> Result<Vec<RobotPose>> {
    if n.is_multiple_of(2) || n <= 3 {
        return Err(invalid(
            "n",
            format!("{n}: odd construction needs odd n > 3"),
        ));
    }
    let pairs = (n - 3) / 2;
    let mut out = deadlock_pairs(pairs, r);
    let x = 3.0 * r * pairs as f64;
    out.push(RobotPose::new(Point2::new(x, r), 2.0 * PI / 3.0));
    out.push(RobotPose::new(Point2::new(x, -r), 4.0 * PI / 3.0));
    out.push(RobotPose::new(Point2::new(x + 3f64.sqrt() * r, 0.0), 0.0));
    Ok(out)
}

/// Radius of the circle on which `n` robots of radius `r` touch their
/// neighbors.
pub fn ring_radius_for(n: usize, r: f64) -> f64 {
    r / (PI / n as f64).sin()
}

/// A closed ring of touching robots, each facing radially outward. Nothing
/// is in sight and every robot's backward orbit motion drives it into its
/// neighbors, so the ring cannot move although it is connected.
///
/// The construction is checked against `params` (radius and cone angle)
/// before it is returned.
pub fn gen_ring_deadlock(n: usize, params: &PhysicsParams) -> Result<Vec<RobotPose>> {
    if n < 6 {
        return Err(invalid("n", format!("{n}: ring needs at least 6 robots")));
    }
    let r = params.robot_radius;
    let rho = ring_radius_for(n, r);
    let poses: Vec<RobotPose> = (0..n)
        .map(|k| {
            let phi = TAU * k as f64 / n as f64;
            RobotPose::new(Point2::from_angle(phi) * rho, phi)
        })
        .collect();
    verify_ring(&poses, params)?;
    Ok(poses)
}

fn verify_ring(poses: &[RobotPose], params: &PhysicsParams) -> Result<()> {
    let r = params.robot_radius;
    let (s, c) = params.half_angle().sin_cos();
    for (i, me) in poses.iter().enumerate() {
        let axis = me.direction();
        let mut blocked = false;
        for (j, other) in poses.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = other.position - me.position;
            if d.norm() < 2.0 * r - 1e-9 {
                return Err(Error::InvalidConfiguration(format!(
                    "robots {i} and {j} overlap"
                )));
            }
            if cone_sees_disc(me.position, axis, c, s, other.position, r) {
                return Err(Error::InvalidConfiguration(format!(
                    "robot {i} sees robot {j}"
                )));
            }
            // a clockwise-searching robot starts its orbit moving backwards
            if d.norm() <= 2.0 * r + CONTACT_SLOP && (-axis).dot(d) > 0.0 {
                blocked = true;
            }
        }
        if !blocked {
            return Err(Error::InvalidConfiguration(format!(
                "robot {i} is free to move"
            )));
        }
    }
    Ok(())
}

/// Regular `n`-gon of the given circumradius, every sensor rotated
/// [`CYCLE_HEADING_OFFSET`] from its radial direction.
pub fn gen_symmetric_cycle(n: usize, circumradius: f64) -> Result<Vec<RobotPose>> {
    gen_symmetric_cycle_with_offset(n, circumradius, CYCLE_HEADING_OFFSET)
}

pub fn gen_symmetric_cycle_with_offset(
    n: usize,
    circumradius: f64,
    heading_offset: f64,
) -> Result<Vec<RobotPose>> {
    if n < 2 {
        return Err(invalid("n", "cycle needs at least 2 robots"));
    }
    if !(circumradius > 0.0) {
        return Err(invalid("circumradius", "must be positive"));
    }
    Ok((0..n)
        .map(|k| {
            let phi = TAU * k as f64 / n as f64;
            RobotPose::new(Point2::from_angle(phi) * circumradius, phi + heading_offset)
        })
        .collect())
}

/// Uniform non-overlapping positions in `[0, arena_side]^2` with uniform
/// headings, by rejection sampling (at most `10^4 * n` attempts).
pub fn gen_random<R: Rng + ?Sized>(
    n: usize,
    arena_side: f64,
    r: f64,
    rng: &mut R,
) -> Result<Vec<RobotPose>> {
    if !(arena_side > 0.0) {
        return Err(invalid("arena_side", "must be positive"));
    }
    let min_sq = 4.0 * r * r;
    let mut out: Vec<RobotPose> = Vec::with_capacity(n);
    let mut attempts = 0usize;
    let cap = 10_000usize.saturating_mul(n.max(1));
    while out.len() < n {
        if attempts >= cap {
            return Err(Error::ArenaTooDense {
                n,
                side: arena_side,
            });
        }
        attempts += 1;
        let p = Point2::new(rng.gen::<f64>() * arena_side, rng.gen::<f64>() * arena_side);
        if out.iter().all(|q| q.position.dist_sq(p) >= min_sq) {
            out.push(RobotPose::new(p, rng.gen::<f64>() * TAU));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const R: f64 = 3.7;

    #[test]
    fn even_construction_coordinates() {
        let p = gen_deadlock_even(4, R).unwrap();
        assert_eq!(p[0].position, Point2::new(0.0, R));
        assert_eq!(p[1].position, Point2::new(0.0, -R));
        assert_eq!(p[2].position, Point2::new(3.0 * R, R));
        assert_eq!(p[3].position, Point2::new(3.0 * R, -R));
        assert_eq!(p[0].heading, FRAC_PI_2);
        assert_eq!(p[1].heading, 3.0 * FRAC_PI_2);
        assert!(gen_deadlock_even(5, R).is_err());
        assert!(gen_deadlock_even(2, R).is_err());
    }

    #[test]
    fn odd_construction_coordinates() {
        let p = gen_deadlock_odd(5, R).unwrap();
        assert_eq!(p.len(), 5);
        let x = 3.0 * R;
        assert_eq!(p[2].position, Point2::new(x, R));
        assert_eq!(p[3].position, Point2::new(x, -R));
        assert!((p[4].position.x - (x + 3f64.sqrt() * R)).abs() < 1e-12);
        // the triangle is mutually touching
        for (a, b) in [(2, 3), (2, 4), (3, 4)] {
            assert!((p[a].position.dist(p[b].position) - 2.0 * R).abs() < 1e-12);
        }
        assert!(gen_deadlock_odd(6, R).is_err());
        assert!(gen_deadlock_odd(3, R).is_err());
    }

    #[test]
    fn ring_is_verified() {
        let params = PhysicsParams::EPUCK;
        let ring = gen_ring_deadlock(12, &params).unwrap();
        assert_eq!(ring.len(), 12);
        assert!(gen_ring_deadlock(5, &params).is_err());
        // a wide cone sees the neighbors
        assert!(gen_ring_deadlock(12, &params.with_cone_angle(2.7)).is_err());
    }

    #[test]
    fn cycle_is_rotationally_symmetric() {
        let n = 5;
        let c = gen_symmetric_cycle(n, 30.0).unwrap();
        let step = TAU / n as f64;
        for k in 0..n {
            let rotated = c[k].position.rotate(step);
            let next = c[(k + 1) % n].position;
            assert!(rotated.dist(next) < 1e-12);
            let dh = super::super::wrap_angle(c[(k + 1) % n].heading - c[k].heading - step);
            assert!(dh.abs() < 1e-12);
        }
    }

    #[test]
    fn random_placement() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = gen_random(1, 50.0, R, &mut rng).unwrap();
        assert_eq!(p.len(), 1);
        let p = gen_random(30, 100.0, R, &mut rng).unwrap();
        for i in 0..p.len() {
            for j in (i + 1)..p.len() {
                assert!(p[i].position.dist(p[j].position) >= 2.0 * R);
            }
        }
        let a = gen_random(10, 80.0, R, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = gen_random(10, 80.0, R, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            gen_random(100, 20.0, R, &mut rng),
            Err(Error::ArenaTooDense { .. })
        ));
    }
}
