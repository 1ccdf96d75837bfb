use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::geometry::{diameter, distance, lex_cmp, sort_dedup_points};
use super::grid::SpatialGrid;
use super::IfsSystem;
use crate::error::{Error, Result};

/// Default cap on the number of images generated per refinement level.
pub const DEFAULT_POINT_BUDGET: usize = 1 << 24;

const CACHE_MAGIC: &[u8; 4] = b"IFSC";
const CACHE_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 8 + 8 + 4;
const MAX_DEPTH: u32 = 4096;

/// A finite subset of the attractor with a certified density radius.
///
/// Every point is an exact image `f_w(x_s)` of the fixed point `x_s` of the
/// first map, so it lies in `A`. Every point of `A` lies within `resolution`
/// of some cloud point.
#[derive(Debug, Clone)]
pub struct AttractorCloud {
    dim: usize,
    coords: Vec<f64>,
    resolution: f64,
    depth: u32,
    diam_lower: f64,
    grid: SpatialGrid,
}

struct Level {
    coords: Vec<f64>,
    /// Every exact depth-m image lies within `drop` of a kept point.
    drop: f64,
}

impl AttractorCloud {
    /// Refines until the certified resolution is at most `target`.
    pub fn build(ifs: &IfsSystem, target: f64) -> Result<Self> {
        Self::build_with_budget(ifs, target, DEFAULT_POINT_BUDGET)
    }

    pub fn build_with_budget(ifs: &IfsSystem, target: f64, budget: usize) -> Result<Self> {
        if !(target > 0.0 && target.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "target resolution must be positive, got {target}"
            )));
        }
        let threshold = target * (1.0 - ifs.lip_max()) / 4.0;
        let dim = ifs.dim();
        let seed = ifs.maps()[0].fixed_point()?;
        let fallback = fallback_diameter(ifs, &seed);
        let mut level = Level {
            coords: seed,
            drop: 0.0,
        };
        let mut depth = 0u32;
        loop {
            let diam_lower = diameter(&level.coords, dim);
            let res = certified_resolution(ifs, depth, diam_lower, level.drop, fallback);
            if res <= target {
                return Ok(Self::assemble(dim, level.coords, res, depth, diam_lower));
            }
            if depth >= MAX_DEPTH {
                return Err(Error::ResolutionInfeasible(format!(
                    "resolution {target} not reached after {MAX_DEPTH} levels"
                )));
            }
            level = refine(ifs, &level, threshold, budget).map_err(|e| match e {
                Error::Budget(msg) => Error::ResolutionInfeasible(format!(
                    "resolution {target} needs depth > {depth}: {msg}"
                )),
                other => other,
            })?;
            depth += 1;
        }
    }

    /// All `K^depth` images of the seed, keeping only exact duplicates apart.
    pub fn at_depth(ifs: &IfsSystem, depth: u32, budget: usize) -> Result<Self> {
        let dim = ifs.dim();
        let seed = ifs.maps()[0].fixed_point()?;
        let fallback = fallback_diameter(ifs, &seed);
        let mut level = Level {
            coords: seed,
            drop: 0.0,
        };
        for _ in 0..depth {
            level = refine(ifs, &level, 0.0, budget)?;
        }
        let diam_lower = diameter(&level.coords, dim);
        let res = certified_resolution(ifs, depth, diam_lower, 0.0, fallback);
        Ok(Self::assemble(dim, level.coords, res, depth, diam_lower))
    }

    /// Wraps a point set known to lie in the attractor and to be
    /// `resolution`-dense in it.
    pub fn from_exact_points(dim: usize, coords: Vec<f64>, resolution: f64) -> Result<Self> {
        if dim == 0 || coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidInput(
                "exact point list is empty or ragged".into(),
            ));
        }
        if !(resolution >= 0.0) || coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "exact points and resolution must be finite".into(),
            ));
        }
        let coords = sort_dedup_points(&coords, dim);
        let diam_lower = diameter(&coords, dim);
        Ok(Self::assemble(dim, coords, resolution, 0, diam_lower))
    }

    fn assemble(
        dim: usize,
        coords: Vec<f64>,
        resolution: f64,
        depth: u32,
        diam_lower: f64,
    ) -> Self {
        let cell = if resolution > 0.0 {
            resolution
        } else {
            super::hausdorff::natural_cell(&coords, dim)
        };
        let grid = SpatialGrid::new(&coords, dim, cell);
        Self {
            dim,
            coords,
            resolution,
            depth,
            diam_lower,
            grid,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Flat coordinates, lexicographically sorted.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn diam_lower(&self) -> f64 {
        self.diam_lower
    }

    /// `diam A ≤ diam_lower + 2·resolution`.
    pub fn diam_upper(&self) -> f64 {
        self.diam_lower + 2.0 * self.resolution
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    /// Distance from `x` to the nearest cloud point; `d(x, A)` lies within
    /// `resolution` of this value.
    pub fn distance_to(&self, x: &[f64]) -> f64 {
        self.grid
            .nearest(&self.coords, x)
            .map(|(_, d)| d)
            .unwrap_or(f64::INFINITY)
    }

    /// Cache file contents; identical clouds give identical bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.coords.len() * 8);
        out.extend_from_slice(CACHE_MAGIC);
        out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        out.extend_from_slice(&(self.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.resolution.to_le_bytes());
        out.extend_from_slice(&self.depth.to_le_bytes());
        for v in &self.coords {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN || &bytes[..4] != CACHE_MAGIC {
            return Err(Error::CacheFormat("missing IFSC header".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let version = u32_at(4);
        if version != CACHE_VERSION {
            return Err(Error::CacheFormat(format!("unsupported version {version}")));
        }
        let dim = u32_at(8) as usize;
        let count = u64_at(12) as usize;
        let resolution = f64::from_bits(u64_at(20));
        let depth = u32_at(28);
        let expected = count
            .checked_mul(dim)
            .and_then(|n| n.checked_mul(8))
            .and_then(|n| n.checked_add(HEADER_LEN));
        if dim == 0 || count == 0 || expected != Some(bytes.len()) {
            return Err(Error::CacheFormat(format!(
                "length {} does not match {count} points of dimension {dim}",
                bytes.len()
            )));
        }
        let coords: Vec<f64> = bytes[HEADER_LEN..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if coords.iter().any(|v| !v.is_finite()) || !(resolution >= 0.0) {
            return Err(Error::CacheFormat("non-finite values".into()));
        }
        let sorted = coords
            .chunks_exact(dim)
            .zip(coords.chunks_exact(dim).skip(1))
            .all(|(a, b)| lex_cmp(a, b).is_lt());
        if !sorted {
            return Err(Error::CacheFormat(
                "points are not in canonical order".into(),
            ));
        }
        let diam_lower = diameter(&coords, dim);
        Ok(Self::assemble(dim, coords, resolution, depth, diam_lower))
    }

    pub fn write_cache(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let tmp = path.with_extension("tmp");
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&self.to_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read_cache(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }

    /// Hex digest identifying a build request.
    pub fn cache_key(ifs: &IfsSystem, target: f64, budget: usize) -> String {
        let mut h = Sha256::new();
        h.update((ifs.dim() as u64).to_le_bytes());
        for map in ifs.maps() {
            for v in map.matrix().iter().chain(map.offset()) {
                h.update(v.to_bits().to_le_bytes());
            }
        }
        h.update(target.to_bits().to_le_bytes());
        h.update((budget as u64).to_le_bytes());
        hex::encode(h.finalize())
    }

    pub fn cache_path(dir: &Path, ifs: &IfsSystem, target: f64, budget: usize) -> PathBuf {
        dir.join(format!("{}.ifsc", Self::cache_key(ifs, target, budget)))
    }

    /// Loads from `dir` when a valid cache entry exists, otherwise builds and
    /// stores one. The flag reports a cache hit.
    pub fn load_or_build(
        ifs: &IfsSystem,
        target: f64,
        budget: usize,
        dir: Option<&Path>,
    ) -> Result<(Self, bool)> {
        let Some(dir) = dir else {
            return Ok((Self::build_with_budget(ifs, target, budget)?, false));
        };
        let path = Self::cache_path(dir, ifs, target, budget);
        if path.exists() {
            if let Ok(cloud) = Self::read_cache(&path) {
                if cloud.dim == ifs.dim() {
                    return Ok((cloud, true));
                }
            }
        }
        let cloud = Self::build_with_budget(ifs, target, budget)?;
        cloud.write_cache(&path)?;
        Ok((cloud, false))
    }
}

/// `diam A ≤ 2·max_i |f_i(x_s) − x_s| / (1 − L)`.
fn fallback_diameter(ifs: &IfsSystem, seed: &[f64]) -> f64 {
    let reach = ifs
        .maps()
        .iter()
        .map(|f| distance(&f.image(seed), seed))
        .fold(0.0, f64::max);
    2.0 * reach / (1.0 - ifs.lip_max())
}

/// `L^m·D + drop`, where `D` bounds `diam A` either by the bootstrap
/// `D(1 − 2L^m) ≤ diam_lower + 2·drop` or by the seed-reach bound.
fn certified_resolution(
    ifs: &IfsSystem,
    depth: u32,
    diam_lower: f64,
    drop: f64,
    fallback: f64,
) -> f64 {
    let lm = ifs.lip_max().powi(depth as i32);
    let mut diam_bound = fallback;
    if 2.0 * lm < 1.0 {
        let boot = (diam_lower + 2.0 * drop) / (1.0 - 2.0 * lm);
        if boot.is_finite() && boot < diam_bound {
            diam_bound = boot;
        }
    }
    lm * diam_bound + drop
}

/// Applies every map to the level, sorts, and merges points closer than
/// `threshold` (exact duplicates only when it is zero).
fn refine(ifs: &IfsSystem, level: &Level, threshold: f64, budget: usize) -> Result<Level> {
    let dim = ifs.dim();
    let n = level.coords.len() / dim;
    let generated = n.saturating_mul(ifs.len());
    if generated > budget {
        return Err(Error::Budget(format!(
            "{generated} images exceed the point budget {budget}"
        )));
    }
    let mut images = vec![0.0; generated * dim];
    let mut slot = 0;
    for map in ifs.maps() {
        for p in level.coords.chunks_exact(dim) {
            map.apply(p, &mut images[slot * dim..(slot + 1) * dim]);
            slot += 1;
        }
    }
    let sorted = sort_dedup_points(&images, dim);
    if threshold <= 0.0 {
        return Ok(Level {
            coords: sorted,
            drop: ifs.lip_max() * level.drop,
        });
    }
    let mut kept: Vec<f64> = Vec::with_capacity(sorted.len());
    let mut grid = SpatialGrid::new(&[], dim, threshold);
    let mut worst = 0.0f64;
    for p in sorted.chunks_exact(dim) {
        let mut nearest = f64::INFINITY;
        grid.for_each_within(&kept, p, threshold, |idx| {
            let q = &kept[idx as usize * dim..(idx as usize + 1) * dim];
            nearest = nearest.min(distance(p, q));
        });
        if nearest.is_finite() {
            worst = worst.max(nearest);
        } else {
            grid.insert(p, (kept.len() / dim) as u32);
            kept.extend_from_slice(p);
        }
    }
    Ok(Level {
        coords: kept,
        drop: ifs.lip_max() * level.drop + worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{directed_hausdorff, AffineMap};

    fn xs(cloud: &AttractorCloud) -> Vec<f64> {
        cloud.coords().to_vec()
    }

    #[test]
    fn cantor_small_depths() {
        let cantor = IfsSystem::cantor();
        let d1 = AttractorCloud::at_depth(&cantor, 1, 1 << 20).unwrap();
        assert_eq!(xs(&d1), vec![0.0, 2.0 / 3.0]);
        let d2 = AttractorCloud::at_depth(&cantor, 2, 1 << 20).unwrap();
        let expect = [0.0, 2.0 / 9.0, 2.0 / 3.0, 8.0 / 9.0];
        for (a, b) in xs(&d2).iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((d1.resolution() - d1.diam_upper() / 3.0).abs() < 1e-12);
    }

    #[test]
    fn example4_depth_collapses_branches() {
        let ex4 = IfsSystem::example4();
        for m in 1..10u32 {
            let cloud = AttractorCloud::at_depth(&ex4, m, 1 << 20).unwrap();
            let mut expect: Vec<f64> = (0..m).map(|j| 0.5f64.powi(j as i32)).collect();
            expect.push(0.0);
            expect.sort_by(f64::total_cmp);
            assert_eq!(xs(&cloud), expect);
        }
    }

    #[test]
    fn target_resolution_is_met_and_sound() {
        let cantor = IfsSystem::cantor();
        for target in [1e-2, 1e-3, 1e-4] {
            let cloud = AttractorCloud::build(&cantor, target).unwrap();
            assert!(cloud.resolution() <= target);
            assert!(cloud.diam_lower() <= 1.0 && cloud.diam_upper() >= 1.0);
            // A deep exact cloud must stay within the certified radius.
            let fine = AttractorCloud::at_depth(&cantor, 14, 1 << 20).unwrap();
            let d = directed_hausdorff(fine.coords(), cloud.coords(), 1, None).unwrap();
            assert!(d <= cloud.resolution() + 1e-15);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let seg = IfsSystem::segment();
        assert!(matches!(
            AttractorCloud::build_with_budget(&seg, 1e-9, 1 << 10),
            Err(Error::ResolutionInfeasible(_))
        ));
        assert!(AttractorCloud::build(&seg, 0.0).is_err());
    }

    #[test]
    fn single_point_cloud() {
        let one = IfsSystem::single_point();
        let cloud = AttractorCloud::build(&one, 1e-6).unwrap();
        assert_eq!(cloud.len(), 1);
        assert_eq!(cloud.resolution(), 0.0);
        assert_eq!(cloud.diam_upper(), 0.0);
    }

    #[test]
    fn cache_round_trip_is_exact() {
        let tri = IfsSystem::sierpinski();
        let cloud = AttractorCloud::build(&tri, 0.02).unwrap();
        let bytes = cloud.to_bytes();
        assert_eq!(&bytes[..4], b"IFSC");
        let back = AttractorCloud::from_bytes(&bytes).unwrap();
        assert_eq!(back.coords(), cloud.coords());
        assert_eq!(back.resolution(), cloud.resolution());
        assert_eq!(back.depth(), cloud.depth());
        assert_eq!(back.diam_lower(), cloud.diam_lower());
        assert_eq!(back.to_bytes(), bytes);
        assert!(AttractorCloud::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(AttractorCloud::from_bytes(&bad).is_err());
    }

    #[test]
    fn cache_key_separates_requests() {
        let a = AttractorCloud::cache_key(&IfsSystem::cantor(), 1e-3, 100);
        assert_eq!(
            a,
            AttractorCloud::cache_key(&IfsSystem::cantor(), 1e-3, 100)
        );
        assert_ne!(
            a,
            AttractorCloud::cache_key(&IfsSystem::cantor(), 1e-4, 100)
        );
        assert_ne!(
            a,
            AttractorCloud::cache_key(&IfsSystem::segment(), 1e-3, 100)
        );
        let shifted = IfsSystem::new(vec![
            AffineMap::scalar(1.0 / 3.0, 0.0).unwrap(),
            AffineMap::scalar(1.0 / 3.0, 0.5).unwrap(),
        ])
        .unwrap();
        assert_ne!(a, AttractorCloud::cache_key(&shifted, 1e-3, 100));
    }
}
