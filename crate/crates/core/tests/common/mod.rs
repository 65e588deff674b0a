#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relay_core::Point;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Radical inverse of `i` in base `b`: the `i`-th Halton coordinate.
pub fn halton(mut i: u64, b: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// Uniform point in a disk from two unit-interval coordinates.
pub fn in_disk(center: Point, radius: f64, u: f64, v: f64) -> Point {
    let rho = radius * u.sqrt();
    let (s, c) = (2.0 * PI * v).sin_cos();
    Point::new(center.x + rho * c, center.y + rho * s)
}

pub fn random_disk_point(rng: &mut ChaCha8Rng, center: Point, radius: f64) -> Point {
    in_disk(center, radius, rng.random(), rng.random())
}

/// Connectivity of the graph on `points` with links of length at most
/// `range`, by breadth-first search.
pub fn bfs_connected(points: &[Point], range: f64) -> bool {
    let n = points.len();
    if n <= 1 {
        return true;
    }
    let adj = |a: usize, b: usize| points[a].distance(points[b]) <= range;
    bfs_with(n, adj)
}

/// Breadth-first connectivity for an arbitrary adjacency predicate.
pub fn bfs_with(n: usize, adj: impl Fn(usize, usize) -> bool) -> bool {
    let mut seen = vec![false; n];
    let mut queue = vec![0];
    seen[0] = true;
    while let Some(a) = queue.pop() {
        for b in 0..n {
            if !seen[b] && adj(a, b) {
                seen[b] = true;
                queue.push(b);
            }
        }
    }
    seen.into_iter().all(|s| s)
}
