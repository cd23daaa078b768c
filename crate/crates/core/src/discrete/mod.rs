//! Discrete adaptation on the triangular lattice.
//!
//! Robots occupy lattice nodes and carry a 60 degree cone of sight. The
//! cone with orientation `k` covers bearings in `(60k, 60(k+1)]` degrees:
//! inclusive on its counter-clockwise edge, exclusive on its clockwise edge.
//! Its axis bisects the sector, so the center of rotation (90 degrees
//! counter-clockwise of the axis) is the neighbor in direction `k + 2`.
//!
//! One activation of robot `i`:
//! 1. nothing seen and the next node clockwise around the center is free:
//!    move there and turn the cone 60 degrees clockwise;
//! 2. a robot seen: turn the cone 60 degrees clockwise in place;
//! 3. otherwise the robot is blocked and waits, unless deadlock perturbation
//!    is on and it has now been blocked `d*` times in a row, in which case it
//!    turns in place as in rule 2.
//!
//! The sensor bit is flipped with the error probability before the rules
//! are applied. Activations pick a robot uniformly at random; a round ends
//! once every robot has been activated at least once since the last round.

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{largest_component_fraction, MetricsSample, Point2};

/// Node of the triangular lattice in axial coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AxialCoord {
    pub q: i64,
    pub r: i64,
}

/// Unit steps at 0, 60, ..., 300 degrees.
pub const DIRECTIONS: [AxialCoord; 6] = [
    AxialCoord { q: 1, r: 0 },
    AxialCoord { q: 0, r: 1 },
    AxialCoord { q: -1, r: 1 },
    AxialCoord { q: -1, r: 0 },
    AxialCoord { q: 0, r: -1 },
    AxialCoord { q: 1, r: -1 },
];

impl AxialCoord {
    pub const ORIGIN: AxialCoord = AxialCoord { q: 0, r: 0 };

    pub const fn new(q: i64, r: i64) -> Self {
        Self { q, r }
    }

    pub fn step(self, dir: usize) -> Self {
        self + DIRECTIONS[dir % 6]
    }

    pub fn neighbors(self) -> [AxialCoord; 6] {
        DIRECTIONS.map(|d| self + d)
    }

    /// Sign-exact orientation test: positive when `other` is
    /// counter-clockwise of `self`.
    pub fn cross(self, other: AxialCoord) -> i64 {
        self.q * other.r - self.r * other.q
    }

    pub fn is_adjacent(self, other: AxialCoord) -> bool {
        let d = other - self;
        DIRECTIONS.contains(&d)
    }
}

impl std::ops::Add for AxialCoord {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.q + o.q, self.r + o.r)
    }
}

impl std::ops::Sub for AxialCoord {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.q - o.q, self.r - o.r)
    }
}

/// Planar embedding with unit lattice constant.
pub fn axial_to_cartesian(node: AxialCoord) -> Point2 {
    Point2::new(
        node.q as f64 + node.r as f64 / 2.0,
        node.r as f64 * 3f64.sqrt() / 2.0,
    )
}

/// Whether `target` lies in the cone with orientation `k` at `origin`.
pub fn cone_contains(origin: AxialCoord, k: u8, target: AxialCoord) -> Result<bool> {
    if target == origin {
        return Err(invalid("target", "coincides with the cone apex"));
    }
    let t = target - origin;
    let k = k as usize % 6;
    Ok(DIRECTIONS[k].cross(t) > 0 && t.cross(DIRECTIONS[(k + 1) % 6]) >= 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeRobot {
    pub node: AxialCoord,
    /// Cone sector index in `0..6`.
    pub orientation: u8,
    /// Consecutive blocked activations.
    pub blocked: u32,
}

impl LatticeRobot {
    pub fn new(node: AxialCoord, orientation: u8) -> Self {
        Self {
            node,
            orientation: orientation % 6,
            blocked: 0,
        }
    }

    pub fn center_of_rotation(&self) -> AxialCoord {
        self.node.step(self.orientation as usize + 2)
    }

    /// Next node clockwise around the center of rotation.
    pub fn orbit_target(&self) -> AxialCoord {
        self.center_of_rotation()
            .step(self.orientation as usize + 4)
    }

    fn turn_clockwise(&mut self) {
        self.orientation = (self.orientation + 5) % 6;
    }
}

pub fn center_of_rotation(robot: &LatticeRobot) -> AxialCoord {
    robot.center_of_rotation()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DiscreteNoise {
    pub error_probability: f64,
    /// Blocked activations in a row before a robot turns in place; `None`
    /// disables deadlock perturbation.
    pub perturbation: Option<u32>,
}

impl DiscreteNoise {
    pub const NONE: DiscreteNoise = DiscreteNoise {
        error_probability: 0.0,
        perturbation: None,
    };

    pub fn new(error_probability: f64, perturbation: Option<u32>) -> Result<Self> {
        let n = Self {
            error_probability,
            perturbation,
        };
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.error_probability) {
            return Err(invalid("error_probability", "must lie in [0, 1]"));
        }
        if self.perturbation == Some(0) {
            return Err(invalid("perturbation", "d* must be positive"));
        }
        Ok(())
    }
}

/// What an activation did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    /// Rule 1: moved one node clockwise around the center.
    Orbit,
    /// Rule 2: turned in place after seeing a robot.
    Turn,
    /// Rule 3: blocked, stayed put.
    Blocked,
    /// Blocked for the `d*`-th time in a row and turned in place.
    Perturbed,
}

#[derive(Debug, Clone)]
pub struct LatticeWorld {
    robots: Vec<LatticeRobot>,
    occupancy: HashMap<AxialCoord, usize>,
    pub noise: DiscreteNoise,
    pub seed: u64,
    rng: ChaCha8Rng,
    pub activations: u64,
    pub rounds: u64,
    covered: Vec<bool>,
    uncovered: usize,
}

impl LatticeWorld {
    pub fn new(robots: Vec<LatticeRobot>, noise: DiscreteNoise, seed: u64) -> Result<Self> {
        noise.validate()?;
        let mut occupancy = HashMap::with_capacity(robots.len());
        for (i, rb) in robots.iter().enumerate() {
            if rb.orientation > 5 {
                return Err(invalid("orientation", "must be in 0..6"));
            }
            if occupancy.insert(rb.node, i).is_some() {
                return Err(Error::InvalidConfiguration(format!(
                    "two robots on node ({}, {})",
                    rb.node.q, rb.node.r
                )));
            }
        }
        let n = robots.len();
        Ok(Self {
            robots,
            occupancy,
            noise,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            activations: 0,
            rounds: 0,
            covered: vec![false; n],
            uncovered: n,
        })
    }

    /// `n` robots on distinct uniformly drawn nodes of a rhombus with side
    /// `ceil(sqrt(10 n))` (about 10% occupancy), uniform orientations.
    pub fn random(n: usize, noise: DiscreteNoise, seed: u64) -> Result<Self> {
        let side = ((10 * n) as f64).sqrt().ceil() as i64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut taken = std::collections::HashSet::with_capacity(n);
        let mut robots = Vec::with_capacity(n);
        while robots.len() < n {
            let node = AxialCoord::new(rng.gen_range(0..side), rng.gen_range(0..side));
            if taken.insert(node) {
                robots.push(LatticeRobot::new(node, rng.gen_range(0..6)));
            }
        }
        // the world's own stream is decorrelated from placement
        Self::new(robots, noise, seed ^ 0x9e37_79b9_7f4a_7c15)
    }

    pub fn robots(&self) -> &[LatticeRobot] {
        &self.robots
    }

    pub fn len(&self) -> usize {
        self.robots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.robots.is_empty()
    }

    pub fn occupant(&self, node: AxialCoord) -> Option<usize> {
        self.occupancy.get(&node).copied()
    }

    /// Noise-free cone reading of robot `i`.
    pub fn sees_any(&self, i: usize) -> bool {
        let me = self.robots[i];
        self.robots.iter().enumerate().any(|(j, other)| {
            j != i && cone_contains(me.node, me.orientation, other.node).unwrap_or(false)
        })
    }

    pub fn positions(&self) -> Vec<Point2> {
        self.robots
            .iter()
            .map(|r| axial_to_cartesian(r.node))
            .collect()
    }

    /// Largest connected component by lattice adjacency.
    pub fn lattice_cluster_fraction(&self) -> f64 {
        let n = self.len();
        if n == 0 {
            return 0.0;
        }
        let mut uf = UnionFind::<usize>::new(n);
        for (i, rb) in self.robots.iter().enumerate() {
            for nb in rb.node.neighbors() {
                if let Some(j) = self.occupant(nb) {
                    uf.union(i, j);
                }
            }
        }
        largest_component_fraction(&uf.into_labeling())
    }

    pub fn metrics(&self) -> MetricsSample {
        MetricsSample::evaluate(self.rounds as f64, &self.positions(), 0.5, 1e-6)
            .expect("world has robots")
    }

    fn check_occupancy(&self) {
        debug_assert_eq!(self.occupancy.len(), self.robots.len());
        debug_assert!(self
            .robots
            .iter()
            .enumerate()
            .all(|(i, r)| self.occupancy.get(&r.node) == Some(&i)));
    }

    fn mark_activated(&mut self, i: usize) {
        self.activations += 1;
        if !self.covered[i] {
            self.covered[i] = true;
            self.uncovered -= 1;
            if self.uncovered == 0 {
                self.rounds += 1;
                self.covered.iter_mut().for_each(|c| *c = false);
                self.uncovered = self.robots.len();
            }
        }
    }
}

/// Sensor reading of robot `i`, flipped with the error probability.
pub fn sense_discrete(world: &mut LatticeWorld, i: usize) -> bool {
    let truth = world.sees_any(i);
    let p = world.noise.error_probability;
    if p > 0.0 && world.rng.gen::<f64>() < p {
        !truth
    } else {
        truth
    }
}

/// Applies one activation of robot `i`.
pub fn activate(world: &mut LatticeWorld, i: usize) -> Activation {
    let seen = sense_discrete(world, i);
    let robot = world.robots[i];
    let outcome = if seen {
        Activation::Turn
    } else {
        let u = robot.orbit_target();
        if world.occupant(u).is_none() {
            world.occupancy.remove(&robot.node);
            world.occupancy.insert(u, i);
            world.robots[i].node = u;
            Activation::Orbit
        } else {
            match world.noise.perturbation {
                Some(limit) if robot.blocked + 1 >= limit => Activation::Perturbed,
                _ => Activation::Blocked,
            }
        }
    };
    let rb = &mut world.robots[i];
    match outcome {
        Activation::Orbit | Activation::Turn | Activation::Perturbed => {
            rb.turn_clockwise();
            rb.blocked = 0;
        }
        Activation::Blocked => {
            if world.noise.perturbation.is_some() {
                rb.blocked += 1;
            }
        }
    }
    world.mark_activated(i);
    world.check_occupancy();
    outcome
}

/// Activates uniformly chosen robots for `max_rounds` rounds, sampling
/// metrics at round 0 and after every round.
pub fn run_rounds(world: &mut LatticeWorld, max_rounds: u64) -> Result<Vec<MetricsSample>> {
    run_rounds_until(world, max_rounds, 1, |_| false).map(|(s, _)| s)
}

/// Like [`run_rounds`], sampling every `sample_every` rounds (and at the
/// last one) and stopping after the first sample for which `stop` returns
/// true. The flag reports whether it did.
pub fn run_rounds_until(
    world: &mut LatticeWorld,
    max_rounds: u64,
    sample_every: u64,
    mut stop: impl FnMut(&MetricsSample) -> bool,
) -> Result<(Vec<MetricsSample>, bool)> {
    if max_rounds == 0 {
        return Err(invalid("max_rounds", "must be positive"));
    }
    if sample_every == 0 {
        return Err(invalid("sample_every", "must be positive"));
    }
    if world.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let n = world.len();
    let mut series = vec![world.metrics()];
    if stop(&series[0]) {
        return Ok((series, true));
    }
    let start = world.rounds;
    let target = start + max_rounds;
    while world.rounds < target {
        let before = world.rounds;
        let i = world.rng.gen_range(0..n);
        activate(world, i);
        let done = world.rounds - start;
        if world.rounds != before && (done.is_multiple_of(sample_every) || world.rounds == target) {
            let s = world.metrics();
            series.push(s);
            if stop(&s) {
                return Ok((series, true));
            }
        }
    }
    Ok((series, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(q: i64, r: i64) -> AxialCoord {
        AxialCoord::new(q, r)
    }

    #[test]
    fn embedding_is_unit_lattice() {
        assert_eq!(axial_to_cartesian(AxialCoord::ORIGIN), Point2::ORIGIN);
        for nb in AxialCoord::ORIGIN.neighbors() {
            assert!((axial_to_cartesian(nb).norm() - 1.0).abs() < 1e-15);
        }
        let d = axial_to_cartesian(a(1, 0)).dist(axial_to_cartesian(a(0, 1)));
        assert!((d - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cone_boundaries() {
        let o = AxialCoord::ORIGIN;
        for k in 0..6u8 {
            let ccw = DIRECTIONS[(k as usize + 1) % 6];
            let cw = DIRECTIONS[k as usize];
            assert!(cone_contains(o, k, ccw).unwrap());
            assert!(cone_contains(o, k, ccw + ccw).unwrap());
            assert!(!cone_contains(o, k, cw).unwrap());
            assert!(!cone_contains(o, k, DIRECTIONS[(k as usize + 3) % 6]).unwrap());
            // interior of the sector
            assert!(cone_contains(o, k, cw + ccw).unwrap());
        }
        assert!(cone_contains(o, 0, o).is_err());
    }

    #[test]
    fn sectors_partition_directions() {
        for q in -6..=6 {
            for r in -6..=6 {
                if q == 0 && r == 0 {
                    continue;
                }
                let hits = (0..6u8)
                    .filter(|&k| cone_contains(AxialCoord::ORIGIN, k, a(q, r)).unwrap())
                    .count();
                assert_eq!(hits, 1, "({q}, {r})");
            }
        }
    }

    #[test]
    fn center_sits_ninety_degrees_ccw_of_axis() {
        let rb = LatticeRobot::new(AxialCoord::ORIGIN, 0);
        assert_eq!(rb.center_of_rotation(), DIRECTIONS[2]);
        for k in 0..6u8 {
            let rb = LatticeRobot::new(a(2, -1), k);
            let axis = 60.0 * k as f64 + 30.0;
            let c = axial_to_cartesian(rb.center_of_rotation()) - axial_to_cartesian(rb.node);
            let expected = Point2::from_angle((axis + 90.0).to_radians());
            assert!(c.dist(expected) < 1e-12);
        }
    }

    #[test]
    fn lone_robot_closes_orbit_in_six_moves() {
        let start = LatticeRobot::new(a(3, 1), 4);
        let mut w = LatticeWorld::new(vec![start], DiscreteNoise::NONE, 0).unwrap();
        let c = start.center_of_rotation();
        for step in 0..6 {
            assert_eq!(activate(&mut w, 0), Activation::Orbit);
            assert_eq!(w.robots()[0].center_of_rotation(), c);
            if step < 5 {
                assert_ne!(w.robots()[0].node, start.node);
            }
        }
        assert_eq!(w.robots()[0], start);
        // a single robot completes a round per activation
        assert_eq!(w.rounds, 6);
    }

    fn mutual_block() -> Vec<LatticeRobot> {
        vec![
            LatticeRobot::new(a(0, 0), 0),
            LatticeRobot::new(a(-1, 0), 3),
        ]
    }

    #[test]
    fn mutual_block_is_fixed_point() {
        let mut w = LatticeWorld::new(mutual_block(), DiscreteNoise::NONE, 1).unwrap();
        assert!(!w.sees_any(0) && !w.sees_any(1));
        for k in 0..1000 {
            assert_eq!(activate(&mut w, k % 2), Activation::Blocked);
        }
        assert_eq!(w.robots(), &mutual_block()[..]);
    }

    /// Two robots, no noise: (a) neither sees, both orbit; (b) p1 sees p2
    /// and turns in place while p2 orbits; (c) neither sees.
    #[test]
    fn two_robot_sequence() {
        let start = vec![LatticeRobot::new(a(0, 0), 0), LatticeRobot::new(a(3, 0), 0)];
        let mut w = LatticeWorld::new(start, DiscreteNoise::NONE, 0).unwrap();
        assert!(!w.sees_any(0) && !w.sees_any(1));
        assert_eq!(activate(&mut w, 0), Activation::Orbit);
        assert_eq!(activate(&mut w, 1), Activation::Orbit);
        assert_eq!(w.robots()[0], LatticeRobot::new(a(-1, 0), 5));
        assert_eq!(w.robots()[1], LatticeRobot::new(a(2, 0), 5));
        assert!(w.sees_any(0) && !w.sees_any(1));
        assert_eq!(activate(&mut w, 0), Activation::Turn);
        assert_eq!(activate(&mut w, 1), Activation::Orbit);
        assert_eq!(w.robots()[0], LatticeRobot::new(a(-1, 0), 4));
        assert_eq!(w.robots()[1], LatticeRobot::new(a(1, 1), 4));
        assert!(!w.sees_any(0) && !w.sees_any(1));
    }

    #[test]
    fn perturbation_threshold() {
        let noise = DiscreteNoise::new(0.0, Some(1)).unwrap();
        let mut w = LatticeWorld::new(mutual_block(), noise, 1).unwrap();
        assert_eq!(activate(&mut w, 0), Activation::Perturbed);
        assert_eq!(w.robots()[0].orientation, 5);
        assert_eq!(w.robots()[0].blocked, 0);

        let noise = DiscreteNoise::new(0.0, Some(3)).unwrap();
        let mut w = LatticeWorld::new(mutual_block(), noise, 1).unwrap();
        assert_eq!(activate(&mut w, 1), Activation::Blocked);
        assert_eq!(activate(&mut w, 1), Activation::Blocked);
        assert_eq!(w.robots()[1].blocked, 2);
        assert_eq!(activate(&mut w, 1), Activation::Perturbed);
        assert_eq!(w.robots()[1].blocked, 0);
        assert!(DiscreteNoise::new(0.0, Some(0)).is_err());
    }

    #[test]
    fn error_probability_one_inverts() {
        let noise = DiscreteNoise::new(1.0, None).unwrap();
        let mut w = LatticeWorld::new(vec![LatticeRobot::new(a(0, 0), 0)], noise, 2).unwrap();
        assert!(sense_discrete(&mut w, 0));
        assert_eq!(activate(&mut w, 0), Activation::Turn);
        assert_eq!(w.robots()[0].node, a(0, 0));
    }

    #[test]
    fn duplicate_nodes_rejected() {
        let robots = vec![LatticeRobot::new(a(0, 0), 0), LatticeRobot::new(a(0, 0), 1)];
        assert!(LatticeWorld::new(robots, DiscreteNoise::NONE, 0).is_err());
    }

    #[test]
    fn random_world_is_reproducible() {
        let a = LatticeWorld::random(30, DiscreteNoise::NONE, 9).unwrap();
        let b = LatticeWorld::random(30, DiscreteNoise::NONE, 9).unwrap();
        assert_eq!(a.robots(), b.robots());
        assert_eq!(a.occupancy.len(), 30);
    }

    #[test]
    fn single_robot_dispersion_stays_zero() {
        let mut w =
            LatticeWorld::new(vec![LatticeRobot::new(a(5, 5), 2)], DiscreteNoise::NONE, 0).unwrap();
        let series = run_rounds(&mut w, 50).unwrap();
        assert_eq!(series.len(), 51);
        assert!(series.iter().all(|s| s.dispersion == 0.0));
    }
}
