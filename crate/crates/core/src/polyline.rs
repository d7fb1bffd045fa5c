//! Planar polyline predicates: segment intersection, self-intersection search
//! with a uniform spatial hash, and shoelace areas.

use std::collections::{HashMap, HashSet};

use num_complex::Complex64;

/// Twice the signed area of the triangle `abc`.
#[inline]
pub fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    let u = b - a;
    let v = c - a;
    u.re * v.im - u.im * v.re
}

/// Intersection of closed segments `[p0, p1]` and `[q0, q1]`.
///
/// Returns the parameters `(lambda, mu)` of the intersection point along each
/// segment. Collinear overlaps report the first overlapping endpoint.
pub fn segment_intersection(
    p0: Complex64,
    p1: Complex64,
    q0: Complex64,
    q1: Complex64,
) -> Option<(f64, f64)> {
    let d1 = orient(q0, q1, p0);
    let d2 = orient(q0, q1, p1);
    let d3 = orient(p0, p1, q0);
    let d4 = orient(p0, p1, q1);

    if d1 == 0.0 && d2 == 0.0 {
        return collinear_overlap(p0, p1, q0, q1);
    }
    if (d1 > 0.0 && d2 > 0.0) || (d1 < 0.0 && d2 < 0.0) {
        return None;
    }
    if (d3 > 0.0 && d4 > 0.0) || (d3 < 0.0 && d4 < 0.0) {
        return None;
    }
    let r = p1 - p0;
    let s = q1 - q0;
    let denom = r.re * s.im - r.im * s.re;
    if denom == 0.0 {
        return collinear_overlap(p0, p1, q0, q1);
    }
    let w = q0 - p0;
    let lambda = (w.re * s.im - w.im * s.re) / denom;
    let mu = (w.re * r.im - w.im * r.re) / denom;
    Some((lambda.clamp(0.0, 1.0), mu.clamp(0.0, 1.0)))
}

fn collinear_overlap(
    p0: Complex64,
    p1: Complex64,
    q0: Complex64,
    q1: Complex64,
) -> Option<(f64, f64)> {
    let r = p1 - p0;
    let len2 = r.norm_sqr();
    if len2 == 0.0 {
        return None;
    }
    let proj = |z: Complex64| ((z - p0) * r.conj()).re / len2;
    let (a, b) = (proj(q0), proj(q1));
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if hi < 0.0 || lo > 1.0 {
        return None;
    }
    let lambda = lo.max(0.0);
    let point = p0 + r * lambda;
    let s = q1 - q0;
    let mu = if s.norm_sqr() == 0.0 {
        0.0
    } else {
        ((point - q0) * s.conj()).re / s.norm_sqr()
    };
    Some((lambda, mu.clamp(0.0, 1.0)))
}

/// A crossing between two non-adjacent segments of a polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Index of the earlier segment (from vertex `i` to `i + 1`).
    pub i: usize,
    /// Index of the later segment.
    pub j: usize,
    /// Position along segment `i`, in `[0, 1]`.
    pub lambda: f64,
    /// Position along segment `j`, in `[0, 1]`.
    pub mu: f64,
    pub point: Complex64,
}

/// All crossings between non-adjacent segments of a polyline.
///
/// For a closed polyline the segment from the last vertex back to the first is
/// included, and it is adjacent to segment 0. Segments are bucketed into a
/// uniform grid so only segments sharing a cell are tested.
pub fn self_intersections(points: &[Complex64], closed: bool) -> Vec<Crossing> {
    let n = points.len();
    if n < 4 {
        return Vec::new();
    }
    let n_seg = if closed { n } else { n - 1 };
    let seg = |k: usize| (points[k], points[(k + 1) % n]);

    let mean_len = (0..n_seg).map(|k| (seg(k).1 - seg(k).0).norm()).sum::<f64>() / n_seg as f64;
    let cell = if mean_len > 0.0 { 2.0 * mean_len } else { 1.0 };

    let key = |z: Complex64| ((z.re / cell).floor() as i64, (z.im / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for k in 0..n_seg {
        let (a, b) = seg(k);
        let lo = key(Complex64::new(a.re.min(b.re), a.im.min(b.im)));
        let hi = key(Complex64::new(a.re.max(b.re), a.im.max(b.im)));
        for cx in lo.0..=hi.0 {
            for cy in lo.1..=hi.1 {
                grid.entry((cx, cy)).or_default().push(k);
            }
        }
    }

    let adjacent = |i: usize, j: usize| {
        j == i + 1 || (closed && i == 0 && j == n_seg - 1) || i == j
    };

    let mut tested: HashSet<(usize, usize)> = HashSet::new();
    let mut out = Vec::new();
    let mut cells: Vec<_> = grid.into_iter().collect();
    cells.sort_unstable_by_key(|(k, _)| *k);
    for (_, members) in cells {
        for (x, &i) in members.iter().enumerate() {
            for &j in &members[x + 1..] {
                let (i, j) = if i < j { (i, j) } else { (j, i) };
                if adjacent(i, j) || !tested.insert((i, j)) {
                    continue;
                }
                let (p0, p1) = seg(i);
                let (q0, q1) = seg(j);
                if let Some((lambda, mu)) = segment_intersection(p0, p1, q0, q1) {
                    out.push(Crossing {
                        i,
                        j,
                        lambda,
                        mu,
                        point: p0 + (p1 - p0) * lambda,
                    });
                }
            }
        }
    }
    out.sort_by_key(|c| (c.i, c.j));
    out
}

/// Signed area of the closed polygon through `points` (positive when
/// counter-clockwise).
pub fn shoelace_area(points: &[Complex64]) -> f64 {
    let n = points.len();
    if n < 3 {
        return 0.0;
    }
    let origin = points[0];
    let mut acc = 0.0;
    for k in 0..n {
        let a = points[k] - origin;
        let b = points[(k + 1) % n] - origin;
        acc += a.re * b.im - a.im * b.re;
    }
    0.5 * acc
}

/// Net number of turns of a sampled nonvanishing planar vector field over a
/// closed loop, accumulated from consecutive argument increments.
pub fn winding_of_samples(vectors: &[Complex64]) -> f64 {
    let n = vectors.len();
    let mut total = 0.0;
    for k in 0..n {
        let a = vectors[k];
        let b = vectors[(k + 1) % n];
        total += (b * a.conj()).arg();
    }
    total / std::f64::consts::TAU
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn crossing_segments() {
        let hit = segment_intersection(c(0.0, 0.0), c(2.0, 2.0), c(0.0, 2.0), c(2.0, 0.0)).unwrap();
        assert!((hit.0 - 0.5).abs() < 1e-15 && (hit.1 - 0.5).abs() < 1e-15);
        assert!(segment_intersection(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)).is_none());
    }

    #[test]
    fn touching_endpoint_counts() {
        assert!(segment_intersection(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)).is_some());
    }

    #[test]
    fn collinear_overlap_detected() {
        assert!(segment_intersection(c(0.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)).is_some());
        assert!(segment_intersection(c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)).is_none());
    }

    #[test]
    fn convex_polygon_is_simple() {
        let pts: Vec<_> = (0..200)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 200.0))
            .collect();
        assert!(self_intersections(&pts, true).is_empty());
        let area = shoelace_area(&pts);
        assert!((area - 100.0 * (std::f64::consts::TAU / 200.0).sin()).abs() < 1e-12);
    }

    #[test]
    fn figure_eight_has_one_crossing_at_origin() {
        // Gerono lemniscate, sampled at half-steps so the crossing falls
        // inside two point-symmetric chords.
        let n = 400;
        let pts: Vec<_> = (0..n)
            .map(|k| {
                let th = std::f64::consts::TAU * (k as f64 + 0.5) / n as f64;
                c(th.sin(), th.sin() * th.cos())
            })
            .collect();
        let hits = self_intersections(&pts, true);
        assert_eq!(hits.len(), 1, "{hits:?}");
        assert!(hits[0].point.norm() < 1e-8);
    }

    #[test]
    fn winding_of_circle_samples() {
        let pts: Vec<_> = (0..64)
            .map(|k| Complex64::from_polar(2.0, -std::f64::consts::TAU * k as f64 / 64.0))
            .collect();
        assert!((winding_of_samples(&pts) + 1.0).abs() < 1e-12);
    }
}
