use crate::error::{Error, Result};
use crate::ifs::geometry::lex_cmp;
use crate::ifs::SpatialGrid;

/// Relative slack keeping float rounding on the conservative side.
const SLACK: f64 = 1e-12;

/// Bounds on the covering number `N(ε)` of a finite point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverEstimate {
    pub eps: f64,
    /// Size of a maximal set with pairwise distances above `2ε`.
    pub lower: u64,
    /// Size of a greedy cover by closed `ε`-balls.
    pub upper: u64,
}

/// Packing and greedy-cover bounds for `N(ε)` of `coords` (flat, `dim` per
/// point). In one dimension both are computed by an exact sweep and coincide
/// with `N(ε)`; otherwise the cover is point-centred greedy in lexicographic
/// order.
pub fn covering_estimate(coords: &[f64], dim: usize, eps: f64) -> Result<CoverEstimate> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "eps must be positive, got {eps}"
        )));
    }
    if coords.is_empty() || dim == 0 {
        return Err(Error::InvalidInput(
            "covering estimate of an empty set".into(),
        ));
    }
    if dim == 1 {
        return Ok(sweep_1d(coords, eps));
    }
    let order = canonical_order(coords, dim);
    let upper = greedy_centres_in_order(coords, dim, eps, &order).len() as u64;
    let lower = packing_in_order(coords, dim, 2.0 * eps * (1.0 + SLACK), &order) as u64;
    Ok(CoverEstimate { eps, lower, upper })
}

fn sweep_1d(coords: &[f64], eps: f64) -> CoverEstimate {
    let mut xs = coords.to_vec();
    xs.sort_by(f64::total_cmp);
    let reach = 2.0 * eps * (1.0 - SLACK);
    let gap = 2.0 * eps * (1.0 + SLACK);
    let (mut upper, mut lower) = (0u64, 0u64);
    let mut cover_end = f64::NEG_INFINITY;
    let mut last_packed = f64::NEG_INFINITY;
    for &x in &xs {
        if x > cover_end {
            upper += 1;
            cover_end = x + reach;
        }
        if x - last_packed > gap {
            lower += 1;
            last_packed = x;
        }
    }
    CoverEstimate {
        eps,
        lower: lower.min(upper),
        upper,
    }
}

fn canonical_order(coords: &[f64], dim: usize) -> Vec<u32> {
    let n = coords.len() / dim;
    let mut order: Vec<u32> = (0..n as u32).collect();
    let pt = |i: u32| &coords[i as usize * dim..(i as usize + 1) * dim];
    if !order
        .windows(2)
        .all(|w| lex_cmp(pt(w[0]), pt(w[1])).is_le())
    {
        order.sort_by(|&a, &b| lex_cmp(pt(a), pt(b)).then(a.cmp(&b)));
    }
    order
}

/// Indices of greedy centres: scanning points in lexicographic order, each
/// point not yet within `radius` of a centre becomes one.
pub fn greedy_centres(coords: &[f64], dim: usize, radius: f64) -> Vec<usize> {
    let order = canonical_order(coords, dim);
    greedy_centres_in_order(coords, dim, radius, &order)
}

fn greedy_centres_in_order(coords: &[f64], dim: usize, radius: f64, order: &[u32]) -> Vec<usize> {
    let mut uncovered = SpatialGrid::new(coords, dim, radius);
    let mut covered = vec![false; order.len()];
    let mut centres = Vec::new();
    for &i in order {
        if covered[i as usize] {
            continue;
        }
        let p = &coords[i as usize * dim..(i as usize + 1) * dim];
        centres.push(i as usize);
        uncovered.remove_within_visit(coords, p, radius, |j| covered[j as usize] = true);
    }
    centres
}

/// Greedy subset with pairwise distances strictly above `sep`.
fn packing_in_order(coords: &[f64], dim: usize, sep: f64, order: &[u32]) -> usize {
    let mut chosen: Vec<f64> = Vec::new();
    let mut grid = SpatialGrid::new(&[], dim, sep);
    for &i in order {
        let p = &coords[i as usize * dim..(i as usize + 1) * dim];
        if !grid.any_within(&chosen, p, sep) {
            grid.insert(p, (chosen.len() / dim) as u32);
            chosen.extend_from_slice(p);
        }
    }
    chosen.len() / dim
}
