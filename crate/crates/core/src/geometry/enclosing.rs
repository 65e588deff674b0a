use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Point;
use crate::{Error, Result};

/// Relative slack used by containment tests during the incremental build.
const CONTAIN_EPS: f64 = 1e-12;

/// Smallest circle enclosing a point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnclosingCircle {
    pub center: Point,
    pub radius: f64,
}

impl EnclosingCircle {
    fn contains(&self, p: Point) -> bool {
        self.center.distance(p) <= self.radius * (1.0 + CONTAIN_EPS) + CONTAIN_EPS
    }

    fn diameter(a: Point, b: Point) -> Self {
        let center = a.midpoint(b);
        Self { center, radius: center.distance(a).max(center.distance(b)) }
    }

    /// Circle through three points, `None` when they are collinear.
    fn circumscribed(a: Point, b: Point, c: Point) -> Option<Self> {
        // Translate to the bounding-box center for precision.
        let ox = (a.x.min(b.x).min(c.x) + a.x.max(b.x).max(c.x)) / 2.0;
        let oy = (a.y.min(b.y).min(c.y) + a.y.max(b.y).max(c.y)) / 2.0;
        let (ax, ay) = (a.x - ox, a.y - oy);
        let (bx, by) = (b.x - ox, b.y - oy);
        let (cx, cy) = (c.x - ox, c.y - oy);
        let d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2.0;
        if d == 0.0 {
            return None;
        }
        let (a2, b2, c2) = (ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy);
        let x = ox + (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
        let y = oy + (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
        let center = Point::new(x, y);
        let radius = center.distance(a).max(center.distance(b)).max(center.distance(c));
        Some(Self { center, radius })
    }
}

/// Minimum enclosing circle by randomized incremental construction.
///
/// The insertion order is a shuffle driven by `seed`, so the result is a
/// deterministic function of `(points, seed)`.
pub fn min_enclosing_circle(points: &[Point], seed: u64) -> Result<EnclosingCircle> {
    if points.is_empty() {
        return Err(Error::invalid("minimum enclosing circle of an empty set"));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid("points must be finite"));
    }
    let mut shuffled: Vec<Point> = points.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut circle: Option<EnclosingCircle> = None;
    for i in 0..shuffled.len() {
        let p = shuffled[i];
        if circle.is_none_or(|c| !c.contains(p)) {
            circle = Some(with_one_boundary_point(&shuffled[..=i], p));
        }
    }
    Ok(circle.expect("non-empty input"))
}

fn with_one_boundary_point(points: &[Point], p: Point) -> EnclosingCircle {
    let mut c = EnclosingCircle { center: p, radius: 0.0 };
    for (i, &q) in points.iter().enumerate() {
        if !c.contains(q) {
            c = if c.radius == 0.0 {
                EnclosingCircle::diameter(p, q)
            } else {
                with_two_boundary_points(&points[..=i], p, q)
            };
        }
    }
    c
}

fn with_two_boundary_points(points: &[Point], p: Point, q: Point) -> EnclosingCircle {
    let circ = EnclosingCircle::diameter(p, q);
    let pq = q - p;
    let mut left: Option<EnclosingCircle> = None;
    let mut right: Option<EnclosingCircle> = None;
    for &r in points {
        if circ.contains(r) {
            continue;
        }
        let side = pq.cross(r - p);
        let Some(c) = EnclosingCircle::circumscribed(p, q, r) else {
            continue;
        };
        let offset = pq.cross(c.center - p);
        if side > 0.0 && left.is_none_or(|l| offset > pq.cross(l.center - p)) {
            left = Some(c);
        } else if side < 0.0 && right.is_none_or(|rt| offset < pq.cross(rt.center - p)) {
            right = Some(c);
        }
    }
    match (left, right) {
        (None, None) => circ,
        (Some(l), None) => l,
        (None, Some(r)) => r,
        (Some(l), Some(r)) => {
            if l.radius <= r.radius {
                l
            } else {
                r
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point() {
        let p = Point::new(3.0, -4.0);
        let c = min_enclosing_circle(&[p], 7).unwrap();
        assert_eq!(c.center, p);
        assert_eq!(c.radius, 0.0);
    }

    #[test]
    fn empty_is_error() {
        assert!(min_enclosing_circle(&[], 0).is_err());
    }

    #[test]
    fn equilateral_triangle() {
        let s = 300.0;
        let h = s * libm::sqrt(3.0) / 2.0;
        let pts = [Point::new(0.0, 0.0), Point::new(s, 0.0), Point::new(s / 2.0, h)];
        let c = min_enclosing_circle(&pts, 1).unwrap();
        assert!((c.radius - s / libm::sqrt(3.0)).abs() < 1e-9);
    }

    #[test]
    fn obtuse_triangle_uses_longest_side() {
        let pts = [Point::new(0.0, 0.0), Point::new(10.0, 0.0), Point::new(5.0, 1.0)];
        let c = min_enclosing_circle(&pts, 3).unwrap();
        assert!((c.radius - 5.0).abs() < 1e-12);
        assert!((c.center.x - 5.0).abs() < 1e-12 && c.center.y.abs() < 1e-12);
    }

    #[test]
    fn collinear_and_duplicate_points() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(2.0, 2.0), Point::new(1.0, 1.0)];
        let c = min_enclosing_circle(&pts, 9).unwrap();
        assert!((c.radius - libm::sqrt(2.0)).abs() < 1e-12);
    }

    #[test]
    fn same_seed_same_answer() {
        let pts: Vec<Point> = (0..30).map(|i| Point::new((i * 37 % 11) as f64, (i * 53 % 17) as f64)).collect();
        let a = min_enclosing_circle(&pts, 42).unwrap();
        let b = min_enclosing_circle(&pts, 42).unwrap();
        assert_eq!(a, b);
    }
}
