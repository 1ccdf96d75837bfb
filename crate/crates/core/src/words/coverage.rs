use super::DriverStream;
use crate::error::{Error, Result};

/// Default number of symbols scanned before giving up.
pub const DEFAULT_COVERAGE_CAP: u64 = 1_000_000_000;

/// Largest `K^m` tracked by the word bitset.
pub const MAX_COVERAGE_WORDS: u64 = 1 << 32;

/// First prefix length of a driver containing every word of length `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverageStat {
    pub m: usize,
    /// `None` when the cap was reached first.
    pub n_of_m: Option<u64>,
    pub cap: u64,
}

/// Scans a copy of `driver` from its current position with a sliding window
/// of width `m`, marking each `m`-word in a bitset.
pub fn word_coverage(driver: &DriverStream, m: usize, cap: u64) -> Result<CoverageStat> {
    if m == 0 {
        return Err(Error::InvalidInput("word length must be at least 1".into()));
    }
    let k = driver.alphabet() as u64;
    let total = k
        .checked_pow(m as u32)
        .filter(|&t| t <= MAX_COVERAGE_WORDS)
        .ok_or_else(|| {
            Error::Budget(format!(
                "{k}^{m} words exceed the coverage budget {MAX_COVERAGE_WORDS}"
            ))
        })?;
    let mut seen = vec![0u64; total.div_ceil(64) as usize];
    let mut found = 0u64;
    let mut code = 0u64;
    let mut driver = driver.clone();
    for n in 1..=cap {
        let s = u64::from(driver.next_symbol()?);
        code = (code * k + s - 1) % total;
        if n >= m as u64 {
            let (word, bit) = ((code / 64) as usize, code % 64);
            if seen[word] & (1 << bit) == 0 {
                seen[word] |= 1 << bit;
                found += 1;
                if found == total {
                    return Ok(CoverageStat {
                        m,
                        n_of_m: Some(n),
                        cap,
                    });
                }
            }
        }
    }
    Ok(CoverageStat {
        m,
        n_of_m: None,
        cap,
    })
}
