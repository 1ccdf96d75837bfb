//! Brute-force reference implementations, written without the library's
//! algorithms so that they can check it.

#![allow(dead_code)]

use std::collections::HashSet;

/// Symbols of the Champernowne sequence over `1..=k`: every word of length
/// 1, then 2, and so on, each length in lexicographic order.
pub fn champernowne_prefix(k: u16, len: usize) -> Vec<u16> {
    let mut out = Vec::with_capacity(len);
    let mut m = 1u32;
    while out.len() < len {
        let count = (k as u64).pow(m);
        for code in 0..count {
            let mut digits = Vec::with_capacity(m as usize);
            let mut c = code;
            for _ in 0..m {
                digits.push((c % k as u64) as u16 + 1);
                c /= k as u64;
            }
            digits.reverse();
            out.extend(digits);
            if out.len() >= len {
                break;
            }
        }
        m += 1;
    }
    out.truncate(len);
    out
}

/// Shortest prefix of `symbols` containing every word of length `m` over
/// `1..=k`, by hashing windows.
pub fn first_full_coverage(symbols: &[u16], k: u16, m: usize) -> Option<usize> {
    let total = (k as usize).pow(m as u32);
    let mut seen: HashSet<&[u16]> = HashSet::new();
    for end in m..=symbols.len() {
        seen.insert(&symbols[end - m..end]);
        if seen.len() == total {
            return Some(end);
        }
    }
    None
}

/// Every window of length `m` in `word`, counted.
pub fn window_counts(word: &[u16], m: usize) -> std::collections::HashMap<Vec<u16>, usize> {
    let mut counts = std::collections::HashMap::new();
    for w in word.windows(m) {
        *counts.entry(w.to_vec()).or_insert(0) += 1;
    }
    counts
}

/// `(K − K^{m+1}(m+1) + mK^{m+2})/(K−1)²`, exactly.
pub fn champernowne_bound(k: u128, m: u32) -> u128 {
    let num = k + (m as u128) * k.pow(m + 2) - k.pow(m + 1) * (m as u128 + 1);
    let den = (k - 1) * (k - 1);
    assert_eq!(num % den, 0);
    num / den
}

/// Recovery time by direct simulation: after every step, each cloud point is
/// compared against the newest orbit point. `maps[i]` is `(a, b)` for the
/// one-dimensional map `x ↦ a·x + b`.
pub fn brute_recovery_1d(
    maps: &[(f64, f64)],
    symbols: &[u16],
    x0: f64,
    eps: f64,
    cloud: &[f64],
) -> Option<usize> {
    let mut covered = vec![false; cloud.len()];
    let mut left = cloud.len();
    let mut x = x0;
    for n in 0..=symbols.len() {
        for (c, p) in covered.iter_mut().zip(cloud) {
            if !*c && (p - x).abs() <= eps {
                *c = true;
                left -= 1;
            }
        }
        if left == 0 {
            return Some(n);
        }
        if n < symbols.len() {
            let (a, b) = maps[symbols[n] as usize - 1];
            x = a * x + b;
        }
    }
    None
}

/// Whether closed balls of radius `r` around `orbit` cover `cloud`, both flat
/// with `dim` coordinates per point. Quadratic.
pub fn covers_brute(cloud: &[f64], orbit: &[f64], dim: usize, r: f64) -> bool {
    cloud.chunks_exact(dim).all(|p| {
        orbit.chunks_exact(dim).any(|q| {
            let d2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
            d2.sqrt() <= r
        })
    })
}

/// Symbol at 1-based position `n` of the separating driver for `z = 1`:
/// `1` on `⌊k·2^k⌋ ..= ⌊k·2^k⌋ + k − 1` for `k ≥ 2`, otherwise `2`.
pub fn example4_z1_symbol(n: u64) -> u16 {
    let mut k = 2u64;
    loop {
        let start = k << k;
        if n < start {
            return 2;
        }
        if n < start + k {
            return 1;
        }
        k += 1;
    }
}

/// Closed forms for the separating driver: recovery time from `x0 = 1`
/// and from `x0 = 0` at `ε_k = 2^-k`.
pub fn example4_formulas(k: u64, z: f64) -> (u64, u64) {
    let at = |j: u64| (j as f64 * 2f64.powf(j as f64 * z)).floor() as u64;
    (at(k) + k - 1, at(k - 1) + k - 2)
}
