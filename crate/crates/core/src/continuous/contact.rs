//! Non-penetration for equal-radius discs.
//!
//! Velocities are limited first with a warm-started sequential impulse
//! solver; the resulting positions are then projected Jacobi style, every
//! pair's correction computed from the same iterate and applied together.
//! Immovable robots take no share of a correction.

use std::collections::HashMap;

use crate::geometry::Point2;

/// Iteration cap for position projection.
pub const CONTACT_ITERATIONS: usize = 256;
/// Largest overlap (cm) accepted as resolved.
pub const OVERLAP_TOLERANCE: f64 = 1e-9;
/// Pairs closer than `2r + CONTACT_SLOP` are treated as touching when
/// resolving velocities.
pub const CONTACT_SLOP: f64 = 1e-6;

/// Coulomb coefficient between robot bodies. A pushing contact whose
/// sliding velocity is within `CONTACT_FRICTION` times its approach speed
/// sticks.
pub const CONTACT_FRICTION: f64 = 0.5;

const VELOCITY_ITERATIONS: usize = 512;
const VELOCITY_TOLERANCE: f64 = 1e-9;
const CANDIDATE_MARGIN: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct ContactResolution {
    pub positions: Vec<Point2>,
    pub iterations: usize,
    /// Projection failed to converge; offending robots were returned to
    /// their current positions.
    pub overflow: bool,
}

/// Projects `proposed` positions onto the non-overlapping set by repeatedly
/// pushing each overlapping pair apart along its center line, half the
/// overlap each.
pub fn resolve_contacts(current: &[Point2], proposed: &[Point2], radius: f64) -> ContactResolution {
    let fixed = vec![false; proposed.len()];
    resolve_contacts_weighted(current, proposed, radius, &fixed)
}

/// As [`resolve_contacts`], but robots flagged in `fixed` never move; a
/// movable robot overlapping a fixed one takes the whole correction.
pub fn resolve_contacts_weighted(
    current: &[Point2],
    proposed: &[Point2],
    radius: f64,
    fixed: &[bool],
) -> ContactResolution {
    assert_eq!(current.len(), proposed.len());
    assert_eq!(fixed.len(), proposed.len());
    let n = proposed.len();
    let min_dist = 2.0 * radius;
    let mut pos = proposed.to_vec();
    let mut candidates = candidate_pairs(&pos, min_dist + CANDIDATE_MARGIN);
    let mut drift = vec![0.0f64; n];
    let mut corr = vec![Point2::ORIGIN; n];

    for iter in 0..=CONTACT_ITERATIONS {
        corr.iter_mut().for_each(|c| *c = Point2::ORIGIN);
        let mut worst = 0.0f64;
        for &(i, j) in &candidates {
            let Some((normal, overlap)) = overlap_of(pos[i], pos[j], min_dist, i, j) else {
                continue;
            };
            if overlap <= OVERLAP_TOLERANCE {
                continue;
            }
            let Some((wi, wj)) = shares(fixed[i], fixed[j]) else {
                continue;
            };
            worst = worst.max(overlap);
            corr[i] = corr[i] - normal * (wi * overlap);
            corr[j] = corr[j] + normal * (wj * overlap);
        }
        // out of iterations, residue within the slop is still accepted
        if worst == 0.0 || (iter == CONTACT_ITERATIONS && worst <= CONTACT_SLOP) {
            return ContactResolution {
                positions: pos,
                iterations: iter,
                overflow: false,
            };
        }
        if iter == CONTACT_ITERATIONS {
            break;
        }
        let mut refresh = false;
        for k in 0..n {
            pos[k] = pos[k] + corr[k];
            drift[k] += corr[k].norm();
            refresh |= drift[k] > CANDIDATE_MARGIN / 2.0;
        }
        if refresh {
            candidates = candidate_pairs(&pos, min_dist + CANDIDATE_MARGIN);
            drift.iter_mut().for_each(|d| *d = 0.0);
        }
    }

    // Fall back: send every robot still in an overlap back to where it was,
    // until nothing overlaps. Terminates because `current` is feasible.
    loop {
        let mut reverted = false;
        let all = candidate_pairs(&pos, min_dist);
        for (i, j) in all {
            let Some((_, overlap)) = overlap_of(pos[i], pos[j], min_dist, i, j) else {
                continue;
            };
            if overlap <= CONTACT_SLOP {
                continue;
            }
            for k in [i, j] {
                if pos[k] != current[k] {
                    pos[k] = current[k];
                    reverted = true;
                }
            }
        }
        if !reverted {
            break;
        }
    }
    ContactResolution {
        positions: pos,
        iterations: CONTACT_ITERATIONS,
        overflow: true,
    }
}

/// Contact impulses from the previous velocity solve, keyed by robot pair.
/// Seeding the next solve with them lets jammed clusters converge in a
/// few sweeps.
#[derive(Debug, Clone, Default)]
pub struct ImpulseCache {
    impulses: HashMap<(usize, usize), (f64, f64)>,
}

impl ImpulseCache {
    pub fn clear(&mut self) {
        self.impulses.clear();
    }
}

/// Limits approaching normal velocity between nearby robots so no pair
/// closes more than its gap within `dt` (touching pairs may not approach at
/// all), with Coulomb friction on the sliding component of touching pairs.
/// Fixed robots are treated as having zero velocity. Returns the number of
/// sweeps used.
pub fn resolve_velocities(
    positions: &[Point2],
    velocities: &mut [Point2],
    radius: f64,
    dt: f64,
    fixed: &[bool],
    cache: &mut ImpulseCache,
) -> usize {
    let min_dist = 2.0 * radius;
    let fastest = velocities.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let reach = min_dist + 2.0 * fastest * dt + CONTACT_SLOP;
    // (i, j, normal, allowed approach speed, touching)
    let contacts: Vec<(usize, usize, Point2, f64, bool)> = candidate_pairs(positions, reach)
        .into_iter()
        .filter(|&(i, j)| !(fixed[i] && fixed[j]))
        .filter_map(|(i, j)| {
            overlap_of(positions[i], positions[j], reach, i, j).map(|(normal, overlap)| {
                let gap = reach - overlap - min_dist;
                if gap <= CONTACT_SLOP {
                    (i, j, normal, 0.0, true)
                } else {
                    (i, j, normal, gap / dt, false)
                }
            })
        })
        .collect();
    for (k, v) in velocities.iter_mut().enumerate() {
        if fixed[k] {
            *v = Point2::ORIGIN;
        }
    }
    if contacts.is_empty() {
        cache.clear();
        return 0;
    }
    // accumulated normal and tangential impulse per contact, warm started
    let mut normal_sum = Vec::with_capacity(contacts.len());
    let mut tangent_sum = Vec::with_capacity(contacts.len());
    for &(i, j, normal, _, touching) in &contacts {
        let (n, t) = cache.impulses.get(&(i, j)).copied().unwrap_or((0.0, 0.0));
        let t = if touching { t } else { 0.0 };
        let (wi, wj) = shares(fixed[i], fixed[j]).expect("filtered");
        let push = normal * n + normal.perp() * t;
        velocities[i] = velocities[i] - push * wi;
        velocities[j] = velocities[j] + push * wj;
        normal_sum.push(n);
        tangent_sum.push(t);
    }
    let mut sweeps = VELOCITY_ITERATIONS;
    for iter in 0..VELOCITY_ITERATIONS {
        let mut worst = 0.0f64;
        for (c, &(i, j, normal, allowed, touching)) in contacts.iter().enumerate() {
            let (wi, wj) = shares(fixed[i], fixed[j]).expect("filtered");
            let excess = (velocities[i] - velocities[j]).dot(normal) - allowed;
            let total = (normal_sum[c] + excess).max(0.0);
            let delta = total - normal_sum[c];
            normal_sum[c] = total;
            velocities[i] = velocities[i] - normal * (delta * wi);
            velocities[j] = velocities[j] + normal * (delta * wj);
            worst = worst.max(delta.abs());
            if touching {
                let tangent = normal.perp();
                let slide = (velocities[i] - velocities[j]).dot(tangent);
                let limit = CONTACT_FRICTION * normal_sum[c];
                let total = (tangent_sum[c] + slide).clamp(-limit, limit);
                let delta = total - tangent_sum[c];
                tangent_sum[c] = total;
                velocities[i] = velocities[i] - tangent * (delta * wi);
                velocities[j] = velocities[j] + tangent * (delta * wj);
                worst = worst.max(delta.abs());
            }
        }
        if worst <= VELOCITY_TOLERANCE {
            sweeps = iter + 1;
            break;
        }
    }
    cache.impulses.clear();
    for (c, &(i, j, ..)) in contacts.iter().enumerate() {
        if normal_sum[c] > 0.0 {
            cache
                .impulses
                .insert((i, j), (normal_sum[c], tangent_sum[c]));
        }
    }
    sweeps
}

/// Correction shares for a pair, `None` when neither may move.
fn shares(fixed_i: bool, fixed_j: bool) -> Option<(f64, f64)> {
    match (fixed_i, fixed_j) {
        (false, false) => Some((0.5, 0.5)),
        (true, false) => Some((0.0, 1.0)),
        (false, true) => Some((1.0, 0.0)),
        (true, true) => None,
    }
}

/// Unit normal from `a` to `b` and the overlap against `min_dist`, or
/// `None` when they are apart. Coincident centers get a fixed normal.
fn overlap_of(a: Point2, b: Point2, min_dist: f64, i: usize, j: usize) -> Option<(Point2, f64)> {
    let d = b - a;
    let dist_sq = d.norm_sq();
    if dist_sq >= min_dist * min_dist {
        return None;
    }
    let dist = dist_sq.sqrt();
    let normal = if dist > 0.0 {
        Point2::new(d.x / dist, d.y / dist)
    } else if i < j {
        Point2::new(1.0, 0.0)
    } else {
        Point2::new(-1.0, 0.0)
    };
    Some((normal, min_dist - dist))
}

fn candidate_pairs(pos: &[Point2], reach: f64) -> Vec<(usize, usize)> {
    let reach_sq = reach * reach;
    let mut out = Vec::new();
    for i in 0..pos.len() {
        for j in (i + 1)..pos.len() {
            let dx = pos[j].x - pos[i].x;
            if dx.abs() > reach {
                continue;
            }
            let dy = pos[j].y - pos[i].y;
            if dx * dx + dy * dy < reach_sq {
                out.push((i, j));
            }
        }
    }
    out
}
