use super::geometry::dist2;
use super::grid::SpatialGrid;
use crate::error::{Error, Result};

/// Cell size giving roughly one point per cell over the bounding box of `coords`.
pub(crate) fn natural_cell(coords: &[f64], dim: usize) -> f64 {
    let n = (coords.len() / dim).max(1);
    let mut extent = 0.0f64;
    for axis in 0..dim {
        let (lo, hi) = coords
            .iter()
            .skip(axis)
            .step_by(dim)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(*v), hi.max(*v))
            });
        extent = extent.max(hi - lo);
    }
    let cell = extent / (n as f64).powf(1.0 / dim as f64);
    if cell > 0.0 && cell.is_finite() {
        cell
    } else {
        1.0
    }
}

/// `max_{a ∈ A} min_{b ∈ B} |a − b|` over flat arrays of `dim`-vectors. Pass a
/// prebuilt grid over `b` to reuse it across calls.
pub fn directed_hausdorff(
    a: &[f64],
    b: &[f64],
    dim: usize,
    grid: Option<&SpatialGrid>,
) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput(
            "Hausdorff distance of an empty set".into(),
        ));
    }
    let owned;
    let grid = match grid {
        Some(g) => g,
        None => {
            owned = SpatialGrid::new(b, dim, natural_cell(b, dim));
            &owned
        }
    };
    let mut worst = 0.0f64;
    for p in a.chunks_exact(dim) {
        let (_, d) = grid.nearest(b, p).expect("grid over a nonempty set");
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Symmetric Hausdorff distance.
pub fn hausdorff_distance(a: &[f64], b: &[f64], dim: usize) -> Result<f64> {
    Ok(directed_hausdorff(a, b, dim, None)?.max(directed_hausdorff(b, a, dim, None)?))
}

#[allow(dead_code)]
fn brute_directed(a: &[f64], b: &[f64], dim: usize) -> f64 {
    a.chunks_exact(dim)
        .map(|p| {
            b.chunks_exact(dim)
                .map(|q| dist2(p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
        .sqrt()
}
