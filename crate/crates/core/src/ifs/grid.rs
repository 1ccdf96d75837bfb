//! Uniform-cell spatial hash over a flat point array.
//!
//! Cells are keyed by a hash of their integer coordinates. Two cells may share
//! a key; every query still checks true distances, so a collision only costs
//! a few extra comparisons.

use std::hash::{Hash, Hasher};

use rustc_hash::{FxHashMap, FxHasher};

use super::geometry::dist2;

#[derive(Debug, Clone)]
pub struct SpatialGrid {
    dim: usize,
    cell: f64,
    cells: FxHashMap<u64, Vec<u32>>,
    len: usize,
}

impl SpatialGrid {
    /// Indexes every point of `coords` (flat, `dim` per point) at cell size `cell`.
    pub fn new(coords: &[f64], dim: usize, cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite(), "cell size must be positive");
        let mut grid = Self {
            dim,
            cell,
            cells: FxHashMap::default(),
            len: 0,
        };
        for (i, p) in coords.chunks_exact(dim).enumerate() {
            grid.insert(p, i as u32);
        }
        grid
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    /// Number of indexed points.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn insert(&mut self, p: &[f64], idx: u32) {
        let key = self.key_of(&self.cell_coords(p));
        self.cells.entry(key).or_default().push(idx);
        self.len += 1;
    }

    fn cell_coords(&self, p: &[f64]) -> Vec<i64> {
        p.iter()
            .map(|v| {
                let c = (v / self.cell).floor();
                c.clamp(i64::MIN as f64 / 4.0, i64::MAX as f64 / 4.0) as i64
            })
            .collect()
    }

    fn key_of(&self, c: &[i64]) -> u64 {
        let mut h = FxHasher::default();
        c.hash(&mut h);
        h.finish()
    }

    /// Deduplicated keys of all cells that can hold a point within `r` of `q`.
    fn neighbour_keys(&self, q: &[f64], r: f64) -> Vec<u64> {
        let center = self.cell_coords(q);
        let reach = ((r / self.cell).ceil() as i64).max(1);
        let side = (2 * reach + 1) as usize;
        let total = side.pow(self.dim as u32);
        let mut keys = Vec::with_capacity(total);
        let mut offset = vec![-reach; self.dim];
        let mut cur = vec![0i64; self.dim];
        for _ in 0..total {
            for (k, c) in cur.iter_mut().enumerate() {
                *c = center[k].saturating_add(offset[k]);
            }
            let key = self.key_of(&cur);
            if self.cells.contains_key(&key) {
                keys.push(key);
            }
            for o in offset.iter_mut() {
                *o += 1;
                if *o <= reach {
                    break;
                }
                *o = -reach;
            }
        }
        keys.sort_unstable();
        keys.dedup();
        keys
    }

    /// Calls `visit(idx)` for each indexed point within closed distance `r` of `q`.
    pub fn for_each_within(&self, coords: &[f64], q: &[f64], r: f64, mut visit: impl FnMut(u32)) {
        let r2 = r * r;
        for key in self.neighbour_keys(q, r) {
            for &idx in &self.cells[&key] {
                let p = &coords[idx as usize * self.dim..(idx as usize + 1) * self.dim];
                if dist2(p, q) <= r2 {
                    visit(idx);
                }
            }
        }
    }

    /// True if some indexed point lies within closed distance `r` of `q`.
    pub fn any_within(&self, coords: &[f64], q: &[f64], r: f64) -> bool {
        let r2 = r * r;
        self.neighbour_keys(q, r).into_iter().any(|key| {
            self.cells[&key].iter().any(|&idx| {
                let p = &coords[idx as usize * self.dim..(idx as usize + 1) * self.dim];
                dist2(p, q) <= r2
            })
        })
    }

    /// Removes every indexed point within closed distance `r` of `q`, returning how many.
    pub fn remove_within(&mut self, coords: &[f64], q: &[f64], r: f64) -> usize {
        self.remove_within_visit(coords, q, r, |_| {})
    }

    /// As [`remove_within`](Self::remove_within), reporting each removed index.
    pub fn remove_within_visit(
        &mut self,
        coords: &[f64],
        q: &[f64],
        r: f64,
        mut visit: impl FnMut(u32),
    ) -> usize {
        let r2 = r * r;
        let dim = self.dim;
        let mut removed = 0;
        for key in self.neighbour_keys(q, r) {
            let bucket = self.cells.get_mut(&key).expect("key came from the map");
            let mut i = 0;
            while i < bucket.len() {
                let idx = bucket[i] as usize;
                if dist2(&coords[idx * dim..(idx + 1) * dim], q) <= r2 {
                    visit(bucket[i]);
                    bucket.swap_remove(i);
                    removed += 1;
                } else {
                    i += 1;
                }
            }
            if bucket.is_empty() {
                self.cells.remove(&key);
            }
        }
        self.len -= removed;
        removed
    }

    /// Nearest indexed point to `q` and its distance, by expanding rings of cells.
    pub fn nearest(&self, coords: &[f64], q: &[f64]) -> Option<(u32, f64)> {
        if self.len == 0 {
            return None;
        }
        let mut best: Option<(u32, f64)> = None;
        let mut radius = self.cell;
        // Searching radius r finds the true nearest once a candidate lies within r.
        for _ in 0..8 {
            self.for_each_within(coords, q, radius, |idx| {
                let p = &coords[idx as usize * self.dim..(idx as usize + 1) * self.dim];
                let d = dist2(p, q);
                if best.is_none_or(|(_, b)| d < b) {
                    best = Some((idx, d));
                }
            });
            if best.is_some() {
                return best.map(|(i, d)| (i, d.sqrt()));
            }
            radius *= 2.0;
        }
        for bucket in self.cells.values() {
            for &idx in bucket {
                let p = &coords[idx as usize * self.dim..(idx as usize + 1) * self.dim];
                let d = dist2(p, q);
                if best.is_none_or(|(bi, b)| d < b || (d == b && idx < bi)) {
                    best = Some((idx, d));
                }
            }
        }
        best.map(|(i, d)| (i, d.sqrt()))
    }
}
