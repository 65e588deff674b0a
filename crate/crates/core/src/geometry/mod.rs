//! Disk geometry: exact lens areas, the distance density between a fixed
//! point and a uniform point in a disk, the averaged lens integral, and
//! minimum enclosing circles.

mod enclosing;
pub mod quadrature;

use core::f64::consts::PI;
use core::ops::{Add, Mul, Sub};

use crate::{Error, Result};

pub use enclosing::{min_enclosing_circle, EnclosingCircle};
pub use quadrature::{adaptive_simpson, QuadratureConfig};

/// A point (or displacement) in the horizontal plane, in metres.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        libm::sqrt(self.x * self.x + self.y * self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Arithmetic mean of a non-empty set of points.
    pub fn centroid(points: &[Point]) -> Option<Point> {
        if points.is_empty() {
            return None;
        }
        let n = points.len() as f64;
        let (sx, sy) = points.iter().fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        Some(Point::new(sx / n, sy / n))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

/// A closed disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::invalid("disk center must be finite"));
        }
        check_non_negative("disk radius", radius)?;
        Ok(Self { center, radius })
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn contains(&self, p: Point) -> bool {
        self.center.distance(p) <= self.radius
    }
}

pub(crate) fn check_non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(alloc::format!("{name} must be finite and >= 0, got {v}")))
    }
}

pub(crate) fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(alloc::format!("{name} must be finite and > 0, got {v}")))
    }
}

/// Intersection area of two disks with radii `big_r`, `r` whose centers are
/// `d` apart.
pub fn lens_area(big_r: f64, r: f64, d: f64) -> Result<f64> {
    check_non_negative("R", big_r)?;
    check_non_negative("r", r)?;
    check_non_negative("d", d)?;
    Ok(lens_area_unchecked(big_r, r, d))
}

/// [`lens_area`] without argument validation. Radii are reordered first so
/// the result is bit-symmetric in them.
pub(crate) fn lens_area_unchecked(r1: f64, r2: f64, d: f64) -> f64 {
    let (big, small) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
    if d >= big + small {
        return 0.0;
    }
    let full = PI * small * small;
    if d <= big - small {
        return full;
    }
    // Sum of the two circular segments cut off by the common chord. Signed
    // chord distances and the half chord are formed from differences of
    // nearby lengths first so a thin lens on a huge circle keeps its digits.
    let c_big = (big * big + (d - small) * (d + small)) / (2.0 * d);
    let c_small = (small * small + (d - big) * (d + big)) / (2.0 * d);
    let diff = big - small;
    let kite = (big + small + d) * (d + diff) * (d - diff) * ((big + small) - d);
    let h = 0.5 * libm::sqrt(kite.max(0.0)) / d;
    let area = segment(big, c_big, h) + segment(small, c_small, h);
    area.clamp(0.0, full)
}

/// Area of the part of a disk of radius `rho` beyond a chord of half length
/// `h` whose signed distance from the center is `c`.
fn segment(rho: f64, c: f64, h: f64) -> f64 {
    let phi = 2.0 * libm::atan2(h, c);
    0.5 * rho * rho * phi_minus_sin(phi)
}

/// `phi - sin(phi)` without cancellation for small `phi`.
fn phi_minus_sin(phi: f64) -> f64 {
    if phi > 1.0 {
        return phi - libm::sin(phi);
    }
    let p2 = phi * phi;
    let mut term = phi * p2 / 6.0;
    let mut sum = term;
    let mut k = 2.0;
    while term.abs() > f64::EPSILON * 0.25 * sum.abs() {
        term *= -p2 / ((2.0 * k) * (2.0 * k + 1.0));
        sum += term;
        k += 1.0;
    }
    sum
}

/// Density of the distance `x` between a fixed point and a point drawn
/// uniformly from a disk of radius `r` whose center lies `d` away.
pub fn disk_distance_pdf(x: f64, d: f64, r: f64) -> Result<f64> {
    check_positive("r", r)?;
    check_non_negative("d", d)?;
    if !x.is_finite() {
        return Err(Error::invalid("x must be finite"));
    }
    Ok(disk_distance_pdf_unchecked(x, d, r))
}

pub(crate) fn disk_distance_pdf_unchecked(x: f64, d: f64, r: f64) -> f64 {
    if x <= 0.0 || x > d + r || x < d - r {
        return 0.0;
    }
    if d == 0.0 {
        return 2.0 * x / (r * r);
    }
    // acos of (x^2 - r^2 + d^2) / (2 d x) as a half-angle arctangent, which
    // stays accurate near the support ends.
    let u = (r - (x - d)) * (r + (x - d));
    let v = ((x + d) - r) * ((x + d) + r);
    let angle = 2.0 * libm::atan2(libm::sqrt(u.max(0.0)), libm::sqrt(v.max(0.0)));
    2.0 * x / (PI * r * r) * angle
}

/// Cumulative distribution of the same distance: the fraction of the disk
/// lying within `x` of the fixed point.
pub fn disk_distance_cdf(x: f64, d: f64, r: f64) -> Result<f64> {
    check_positive("r", r)?;
    check_non_negative("d", d)?;
    if !x.is_finite() {
        return Err(Error::invalid("x must be finite"));
    }
    Ok(disk_distance_cdf_unchecked(x.max(0.0), d, r))
}

pub(crate) fn disk_distance_cdf_unchecked(x: f64, d: f64, r: f64) -> f64 {
    (lens_area_unchecked(x, r, d) / (PI * r * r)).clamp(0.0, 1.0)
}

/// Expected intersection area between a communication disk of radius `rc`
/// centred on a point uniform in disk `j` (radius `r_j`, center `d_ij` away)
/// and the uncertainty disk `i` of radius `r_i`.
///
/// The integrand `lens_area(rc, r_i, x)` is constant for `x <= |rc - r_i|`
/// and zero for `x >= rc + r_i`; those pieces are integrated exactly through
/// the distance CDF and only the proper-lens piece goes to the adaptive
/// integrator.
pub fn average_lens_area(
    rc: f64,
    r_i: f64,
    d_ij: f64,
    r_j: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    check_positive("Rc", rc)?;
    check_positive("r_i", r_i)?;
    check_positive("r_j", r_j)?;
    check_non_negative("d_ij", d_ij)?;
    quad.validate()?;

    let lo = (d_ij - r_j).max(0.0);
    let hi = d_ij + r_j;
    let inner = (rc - r_i).abs();
    let outer = rc + r_i;
    let full = PI * rc.min(r_i) * rc.min(r_i);

    let mut total = 0.0;
    let contained_hi = hi.min(inner);
    if contained_hi > lo {
        let mass = disk_distance_cdf_unchecked(contained_hi, d_ij, r_j)
            - disk_distance_cdf_unchecked(lo, d_ij, r_j);
        total += full * mass.max(0.0);
    }
    let (a, b) = (lo.max(inner), hi.min(outer));
    if b > a {
        // x = mid - half*cos(t) absorbs the square-root behaviour of both the
        // density and the lens area at the segment ends.
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let integrand = |t: f64| {
            let x = mid - half * libm::cos(t);
            lens_area_unchecked(rc, r_i, x) * disk_distance_pdf_unchecked(x, d_ij, r_j) * half * libm::sin(t)
        };
        total += adaptive_simpson(integrand, 0.0, PI, quad)?;
    }
    Ok(total.clamp(0.0, full))
}
