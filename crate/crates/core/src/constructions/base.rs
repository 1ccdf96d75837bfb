use crate::error::{Error, Result};
use crate::ifs::geometry::distance;
use crate::ifs::{AttractorCloud, IfsSystem, SpatialGrid};
use crate::words::Symbol;

/// Number of cloud points outside `B(x_*, δ)` standing in for "infinitely many".
pub const DEFAULT_MIN_OUTSIDE: usize = 8;

/// The base map `f_{i_*}` of the slow-driver construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseMapChoice {
    pub i_star: Symbol,
    pub x_star: Vec<f64>,
    pub delta: f64,
    /// Cloud points outside the closed ball `B(x_*, δ)`.
    pub outside_count: usize,
}

/// First map whose fixed point leaves at least `min_outside` cloud points
/// outside `B(x_*, δ)`, `δ = diam_lower/4`, with two of them closer than
/// `2·resolution` (a sign that the outside part accumulates).
pub fn choose_base_map(
    ifs: &IfsSystem,
    cloud: &AttractorCloud,
    min_outside: usize,
) -> Result<BaseMapChoice> {
    if cloud.len() < 2 * min_outside.max(1) {
        return Err(Error::NoBaseMap);
    }
    let dim = cloud.dim();
    let delta = cloud.diam_lower() / 4.0;
    for (i, map) in ifs.maps().iter().enumerate() {
        let x_star = map.fixed_point()?;
        let outside: Vec<f64> = cloud
            .points()
            .filter(|p| distance(p, &x_star) > delta)
            .flatten()
            .copied()
            .collect();
        let count = outside.len() / dim;
        if count < min_outside || !has_close_pair(&outside, dim, 2.0 * cloud.resolution()) {
            continue;
        }
        return Ok(BaseMapChoice {
            i_star: (i + 1) as Symbol,
            x_star,
            delta,
            outside_count: count,
        });
    }
    Err(Error::NoBaseMap)
}

fn has_close_pair(coords: &[f64], dim: usize, gap: f64) -> bool {
    if gap <= 0.0 {
        return false;
    }
    let mut grid = SpatialGrid::new(&[], dim, gap);
    let mut seen: Vec<f64> = Vec::with_capacity(coords.len());
    for p in coords.chunks_exact(dim) {
        let mut close = false;
        grid.for_each_within(&seen, p, gap, |j| {
            let q = &seen[j as usize * dim..(j as usize + 1) * dim];
            close |= distance(p, q) < gap;
        });
        if close {
            return true;
        }
        grid.insert(p, (seen.len() / dim) as u32);
        seen.extend_from_slice(p);
    }
    false
}
