use crate::geometry::Point2;

/// Whether a closed cone with apex `apex`, unit axis `axis` and half-angle
/// `half_angle` intersects the disc `(center, radius)`. Range is unbounded.
///
/// The disc is visible when the angle between the axis and the direction to
/// its center is at most `half_angle` plus the disc's angular half-width.
/// Both sides are compared through cosines so no trigonometry is evaluated
/// per pair.
pub fn cone_sees_disc(
    apex: Point2,
    axis: Point2,
    cos_half: f64,
    sin_half: f64,
    center: Point2,
    radius: f64,
) -> bool {
    let rel = center - apex;
    let dist_sq = rel.norm_sq();
    let r_sq = radius * radius;
    if dist_sq <= r_sq {
        return true;
    }
    // dist * cos(half + w) with sin w = radius / dist
    let threshold = cos_half * (dist_sq - r_sq).sqrt() - sin_half * radius;
    rel.dot(axis) >= threshold
}

/// Line-of-sight special case: the ray from `apex` along `axis` meets the
/// disc.
pub fn ray_hits_disc(apex: Point2, axis: Point2, center: Point2, radius: f64) -> bool {
    cone_sees_disc(apex, axis, 1.0, 0.0, center, radius)
}
