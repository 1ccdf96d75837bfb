//! Small Euclidean helpers over flat coordinate slices.

use std::cmp::Ordering;

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Lexicographic order on coordinates using `total_cmp`.
pub fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// Sorts a flat array of `dim`-vectors lexicographically and removes exact duplicates.
pub fn sort_dedup_points(coords: &[f64], dim: usize) -> Vec<f64> {
    let mut pts: Vec<&[f64]> = coords.chunks_exact(dim).collect();
    pts.sort_by(|a, b| lex_cmp(a, b));
    pts.dedup_by(|a, b| lex_cmp(a, b) == Ordering::Equal);
    pts.concat()
}

/// Points per side above which `d ≥ 3` diameters fall back to a lower bound.
const BRUTE_FORCE_LIMIT: usize = 4096;

/// Diameter of a flat point array. Exact for `d ≤ 2` and for small sets in
/// higher dimension; otherwise a lower bound from axis-extreme points.
pub fn diameter(coords: &[f64], dim: usize) -> f64 {
    let n = coords.len() / dim;
    if n < 2 {
        return 0.0;
    }
    match dim {
        1 => {
            let (lo, hi) = coords
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(*v), hi.max(*v))
                });
            hi - lo
        }
        2 => {
            let hull = convex_hull(coords);
            brute_diameter(&hull, 2)
        }
        _ if n <= BRUTE_FORCE_LIMIT => brute_diameter(coords, dim),
        _ => {
            let mut extremes = Vec::new();
            for axis in 0..dim {
                let pick = |better: fn(f64, f64) -> bool| {
                    let mut best = 0;
                    for i in 1..n {
                        if better(coords[i * dim + axis], coords[best * dim + axis]) {
                            best = i;
                        }
                    }
                    best
                };
                extremes.push(pick(|a, b| a < b));
                extremes.push(pick(|a, b| a > b));
            }
            let mut best = 0.0f64;
            for &e in &extremes {
                let p = &coords[e * dim..(e + 1) * dim];
                for q in coords.chunks_exact(dim) {
                    best = best.max(dist2(p, q));
                }
            }
            best.sqrt()
        }
    }
}

fn brute_diameter(coords: &[f64], dim: usize) -> f64 {
    let pts: Vec<&[f64]> = coords.chunks_exact(dim).collect();
    let mut best = 0.0f64;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            best = best.max(dist2(p, q));
        }
    }
    best.sqrt()
}

/// Andrew's monotone chain; returns hull vertices as a flat `[x, y, …]` array.
fn convex_hull(coords: &[f64]) -> Vec<f64> {
    let mut pts: Vec<[f64; 2]> = coords.chunks_exact(2).map(|p| [p[0], p[1]]).collect();
    pts.sort_by(|a, b| lex_cmp(a, b));
    pts.dedup();
    if pts.len() < 3 {
        return pts.concat();
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull.concat()
}
