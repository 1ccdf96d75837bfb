use super::{DriverStream, Symbol, SymbolSource};
use crate::error::{Error, Result};

/// Extra indices past the analytic turning point over which each condition
/// on `k` is confirmed. Beyond it `2^{kz}/k` is increasing.
const WINDOW: u64 = 64;

/// Block layout of the separating driver: for `k ≥ 2k_0`, symbol 1 fills
/// positions `⌊k·2^{kz}⌋ ..= ⌊k·2^{kz}⌋ + k − 1`, and symbol 2 is used elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example4Blocks {
    z: f64,
    k0: u64,
}

impl Example4Blocks {
    pub fn new(z: f64) -> Result<Self> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::InvalidInput(format!("z must be positive, got {z}")));
        }
        let k1 = first_stable(z, |k| (k as f64) < (k as f64 * z).exp2());
        let bound = 1.0 / (z.exp2() - 1.0);
        let k2 = first_stable(z, |k| (k as f64 + 1.0) * (k as f64 * z).exp2() > bound);
        Ok(Self { z, k0: k1.max(k2) })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn k0(&self) -> u64 {
        self.k0
    }

    /// Index of the first block.
    pub fn first_k(&self) -> u64 {
        2 * self.k0
    }

    /// `⌊k·2^{kz}⌋`, saturating at `u64::MAX`.
    pub fn block_start(&self, k: u64) -> u64 {
        let v = (k as f64 * (k as f64 * self.z).exp2()).floor();
        if v >= u64::MAX as f64 {
            u64::MAX
        } else {
            v as u64
        }
    }

    /// Last position of block `k`.
    pub fn block_end(&self, k: u64) -> u64 {
        self.block_start(k).saturating_add(k - 1)
    }

    /// The block index covering position `n`, if any.
    pub fn block_at(&self, n: u64) -> Option<u64> {
        let mut k = self.first_k();
        while self.block_start(k) <= n {
            if n <= self.block_end(k) {
                return Some(k);
            }
            k += 1;
        }
        None
    }
}

/// Smallest `k ≥ 1` such that `cond` holds on `[k, max(k, turn) + WINDOW]`,
/// where `turn` is where `2^{kz}/k` starts increasing.
fn first_stable(z: f64, cond: impl Fn(u64) -> bool) -> u64 {
    let turn = (1.0 / (z * std::f64::consts::LN_2)).ceil() as u64;
    let mut k = 1u64;
    loop {
        let hi = k.max(turn) + WINDOW;
        match (k..=hi).rev().find(|&j| !cond(j)) {
            None => return k,
            Some(bad) => k = bad + 1,
        }
    }
}

pub fn example4_driver(z: f64) -> Result<DriverStream> {
    let blocks = Example4Blocks::new(z)?;
    let k = blocks.first_k();
    let source = Example4Source {
        blocks,
        k,
        start: blocks.block_start(k),
        position: 0,
    };
    Ok(DriverStream::from_source(
        Box::new(source),
        format!("example4(z={z})"),
    ))
}

#[derive(Clone)]
struct Example4Source {
    blocks: Example4Blocks,
    /// Current block index and its start.
    k: u64,
    start: u64,
    position: u64,
}

impl SymbolSource for Example4Source {
    #[inline]
    fn next_symbol(&mut self) -> Result<Symbol> {
        self.position += 1;
        let n = self.position;
        while n > self.start.saturating_add(self.k - 1) {
            self.k += 1;
            self.start = self.blocks.block_start(self.k);
        }
        Ok(if n >= self.start { 1 } else { 2 })
    }

    fn alphabet(&self) -> usize {
        2
    }

    fn box_clone(&self) -> Box<dyn SymbolSource> {
        Box::new(self.clone())
    }
}
