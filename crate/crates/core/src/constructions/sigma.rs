use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::ifs::geometry::lex_cmp;
use crate::ifs::IfsSystem;
use crate::metrics::greedy_centres;
use crate::words::{Symbol, Word};

/// Largest `K^m` enumerated when building covering words.
pub const SIGMA_BUDGET: u64 = 1 << 22;

/// The distinct depth-`m` images `f_{a_1}∘…∘f_{a_m}(x_s)`, lexicographically
/// sorted, each with the smallest address code reaching it. Codes are
/// base-`K` with `a_1` most significant.
pub struct AddressedPoints {
    pub dim: usize,
    pub m: usize,
    pub k: usize,
    pub coords: Vec<f64>,
    pub codes: Vec<u64>,
}

impl AddressedPoints {
    pub fn build(ifs: &IfsSystem, m: usize) -> Result<Self> {
        let k = ifs.len();
        let total = (k as u64)
            .checked_pow(m as u32)
            .filter(|&t| t <= SIGMA_BUDGET)
            .ok_or_else(|| Error::Budget(format!("{k}^{m} addresses exceed {SIGMA_BUDGET}")))?;
        let dim = ifs.dim();
        let mut level = ifs.maps()[0].fixed_point()?;
        // Level j holds K^j points indexed by their address code.
        for _ in 0..m {
            let n = level.len() / dim;
            let mut next = vec![0.0; n * k * dim];
            for (a, map) in ifs.maps().iter().enumerate() {
                for (c, p) in level.chunks_exact(dim).enumerate() {
                    let slot = a * n + c;
                    map.apply(p, &mut next[slot * dim..(slot + 1) * dim]);
                }
            }
            level = next;
        }
        debug_assert_eq!(level.len() as u64, total * dim as u64);
        let pt = |i: usize| &level[i * dim..(i + 1) * dim];
        let mut order: Vec<usize> = (0..total as usize).collect();
        order.sort_by(|&a, &b| lex_cmp(pt(a), pt(b)).then(a.cmp(&b)));
        order.dedup_by(|b, a| lex_cmp(pt(*a), pt(*b)) == Ordering::Equal);
        let coords = order.iter().flat_map(|&i| pt(i).iter().copied()).collect();
        let codes = order.iter().map(|&i| i as u64).collect();
        Ok(Self {
            dim,
            m,
            k,
            coords,
            codes,
        })
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Address `(a_1, …, a_m)` of point `i`.
    pub fn address(&self, i: usize) -> Vec<Symbol> {
        let mut code = self.codes[i];
        let mut out = vec![0; self.m];
        for slot in out.iter_mut().rev() {
            *slot = (code % self.k as u64) as Symbol + 1;
            code /= self.k as u64;
        }
        out
    }
}

/// A covering word together with its cover size.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringWord {
    pub word: Word,
    pub m: usize,
    pub radius: f64,
    /// Number of centres `N̂`; the word has length `m·N̂`.
    pub n_hat: usize,
}

/// Greedy `d`-cover of the depth-`m` images, spelled as the concatenation of
/// each centre's reversed address. Driving the chaos game through the
/// reversed address of `p = f_{a_1}∘…∘f_{a_m}(x_s)` lands within
/// `L^m·|y − x_s|` of `p` from any start `y`.
pub fn build_sigma(ifs: &IfsSystem, d: f64, m: usize) -> Result<CoveringWord> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "cover radius must be positive, got {d}"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidInput(
            "covering word depth must be at least 1".into(),
        ));
    }
    let pts = AddressedPoints::build(ifs, m)?;
    let centres = greedy_centres(&pts.coords, pts.dim, d);
    let mut symbols = Vec::with_capacity(centres.len() * m);
    for &c in &centres {
        symbols.extend(pts.address(c).into_iter().rev());
    }
    Ok(CoveringWord {
        word: Word::from_trusted(symbols, ifs.len()),
        m,
        radius: d,
        n_hat: centres.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{run_orbit, AttractorCloud};
    use crate::metrics::orbit_covers;
    use crate::words::DriverStream;

    #[test]
    fn addresses_reproduce_points() {
        let ifs = IfsSystem::sierpinski();
        let pts = AddressedPoints::build(&ifs, 4).unwrap();
        assert_eq!(pts.len(), 81);
        for i in 0..pts.len() {
            let mut x = ifs.maps()[0].fixed_point().unwrap();
            for &a in pts.address(i).iter().rev() {
                x = ifs.map(a).unwrap().image(&x);
            }
            assert_eq!(x.as_slice(), &pts.coords[i * 2..i * 2 + 2]);
        }
    }

    #[test]
    fn example4_duplicates_keep_the_first_address() {
        let pts = AddressedPoints::build(&IfsSystem::example4(), 3).unwrap();
        assert_eq!(pts.coords, vec![0.0, 0.25, 0.5, 1.0]);
        assert_eq!(pts.address(3), vec![2, 1, 1]);
        assert_eq!(pts.address(2), vec![1, 2, 1]);
        assert_eq!(pts.address(1), vec![1, 1, 2]);
    }

    #[test]
    fn single_centre_gives_one_address() {
        let ifs = IfsSystem::cantor();
        let sigma = build_sigma(&ifs, 2.0, 5).unwrap();
        assert_eq!(sigma.n_hat, 1);
        assert_eq!(sigma.word.len(), 5);
    }

    #[test]
    fn orbit_covers_at_three_c_m() {
        let ifs = IfsSystem::cantor();
        let cloud = AttractorCloud::build(&ifs, 1e-5).unwrap();
        for m in 2..=6 {
            let c_m = (1.0f64 / 3.0).powi(m as i32) * (cloud.diam_upper() + 1.0);
            let sigma = build_sigma(&ifs, c_m, m).unwrap();
            assert_eq!(sigma.word.len(), m * sigma.n_hat);
            for x0 in [-1.0, 0.0, 0.4, 2.0] {
                let mut d = DriverStream::literal(sigma.word.clone());
                let orbit = run_orbit(&ifs, &mut d, &[x0], sigma.word.len()).unwrap();
                assert!(orbit_covers(
                    &cloud,
                    orbit.coords(),
                    3.0 * c_m + cloud.resolution()
                ));
            }
        }
    }
}
