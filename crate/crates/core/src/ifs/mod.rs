//! Affine IFS representation, orbits and attractor approximation.

mod cloud;
pub mod geometry;
mod grid;
mod hausdorff;

pub use cloud::{AttractorCloud, DEFAULT_POINT_BUDGET};
pub use grid::SpatialGrid;
pub use hausdorff::{directed_hausdorff, hausdorff_distance};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::words::{DriverStream, Symbol};

const FIXED_POINT_TOL: f64 = 1e-10;
const FIXED_POINT_MAX_ITERS: usize = 1_000_000;

/// `x ↦ M x + b` on `R^d` together with a certified upper bound on its
/// Lipschitz constant (the spectral norm of `M`).
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    dim: usize,
    /// Row-major `dim × dim`.
    matrix: Vec<f64>,
    offset: Vec<f64>,
    lip: f64,
}

impl AffineMap {
    /// Builds a map from matrix rows and an offset. Fails unless the map is a
    /// Banach contraction.
    pub fn new(rows: Vec<Vec<f64>>, offset: Vec<f64>) -> Result<Self> {
        let dim = offset.len();
        if dim == 0 {
            return Err(Error::InvalidInput("map dimension must be positive".into()));
        }
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidInput(format!(
                "matrix must be {dim}x{dim} to match the offset"
            )));
        }
        let matrix: Vec<f64> = rows.into_iter().flatten().collect();
        Self::from_flat(dim, matrix, offset)
    }

    pub fn from_flat(dim: usize, matrix: Vec<f64>, offset: Vec<f64>) -> Result<Self> {
        if dim == 0 || matrix.len() != dim * dim || offset.len() != dim {
            return Err(Error::InvalidInput("inconsistent map dimensions".into()));
        }
        if matrix.iter().chain(offset.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "map coefficients must be finite".into(),
            ));
        }
        let lip = spectral_norm_upper(dim, &matrix);
        if lip >= 1.0 {
            return Err(Error::NotContraction(format!(
                "Lipschitz constant {lip} is not below 1"
            )));
        }
        Ok(Self {
            dim,
            matrix,
            offset,
            lip,
        })
    }

    /// One-dimensional `x ↦ a x + b`.
    pub fn scalar(a: f64, b: f64) -> Result<Self> {
        Self::from_flat(1, vec![a], vec![b])
    }

    /// `x ↦ ratio · x + offset`.
    pub fn similitude(ratio: f64, offset: Vec<f64>) -> Result<Self> {
        let dim = offset.len();
        let mut matrix = vec![0.0; dim * dim];
        for i in 0..dim {
            matrix[i * dim + i] = ratio;
        }
        Self::from_flat(dim, matrix, offset)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lip(&self) -> f64 {
        self.lip
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn matrix_rows(&self) -> Vec<Vec<f64>> {
        self.matrix.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    #[inline]
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        if self.dim == 1 {
            out[0] = self.matrix[0] * x[0] + self.offset[0];
            return;
        }
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.matrix[i * self.dim..(i + 1) * self.dim];
            let mut acc = self.offset[i];
            for (m, v) in row.iter().zip(x) {
                acc += m * v;
            }
            *o = acc;
        }
    }

    pub fn image(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.apply(x, &mut out);
        out
    }

    /// The unique fixed point, via a linear solve of `(I − M) x = b` with an
    /// iteration fallback.
    pub fn fixed_point(&self) -> Result<Vec<f64>> {
        let d = self.dim;
        let system = DMatrix::from_fn(d, d, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - self.matrix[i * d + j]
        });
        let rhs = DVector::from_column_slice(&self.offset);
        let mut x = system
            .lu()
            .solve(&rhs)
            .map(|v| v.as_slice().to_vec())
            .unwrap_or_else(|| vec![0.0; d]);
        if x.iter().any(|v| !v.is_finite()) {
            x = vec![0.0; d];
        }
        let mut next = vec![0.0; d];
        for _ in 0..FIXED_POINT_MAX_ITERS {
            self.apply(&x, &mut next);
            if geometry::distance(&next, &x) <= FIXED_POINT_TOL * (1.0 + geometry::norm(&x)) {
                return Ok(x);
            }
            std::mem::swap(&mut x, &mut next);
        }
        Err(Error::NoContraction)
    }
}

/// Largest singular value, nudged upward so it bounds the true operator norm.
fn spectral_norm_upper(dim: usize, matrix: &[f64]) -> f64 {
    let s = if dim == 1 {
        matrix[0].abs()
    } else {
        DMatrix::from_row_slice(dim, dim, matrix)
            .singular_values()
            .iter()
            .fold(0.0f64, |acc, v| acc.max(*v))
    };
    if s == 0.0 {
        0.0
    } else {
        s * (1.0 + 1e-12) + f64::MIN_POSITIVE
    }
}

/// A finite family of affine contractions; symbols `1..=K` address `maps`.
#[derive(Debug, Clone, PartialEq)]
pub struct IfsSystem {
    dim: usize,
    maps: Vec<AffineMap>,
    lip_max: f64,
}

impl IfsSystem {
    pub fn new(maps: Vec<AffineMap>) -> Result<Self> {
        let first = maps
            .first()
            .ok_or_else(|| Error::InvalidInput("an IFS needs at least one map".into()))?;
        let dim = first.dim();
        if maps.iter().any(|m| m.dim() != dim) {
            return Err(Error::InvalidInput(
                "all maps must share one dimension".into(),
            ));
        }
        let lip_max = maps.iter().map(AffineMap::lip).fold(0.0, f64::max);
        if lip_max <= 0.0 {
            return Err(Error::InvalidInput(
                "at least one map must be non-constant (L > 0)".into(),
            ));
        }
        Ok(Self { dim, maps, lip_max })
    }

    /// `{x/3, x/3 + 2/3}` on `R`.
    pub fn cantor() -> Self {
        Self::new(vec![
            AffineMap::scalar(1.0 / 3.0, 0.0).unwrap(),
            AffineMap::scalar(1.0 / 3.0, 2.0 / 3.0).unwrap(),
        ])
        .unwrap()
    }

    /// `{x/2, 1}`: attractor `{0} ∪ {2^-n : n ≥ 0}`.
    pub fn example4() -> Self {
        Self::new(vec![
            AffineMap::scalar(0.5, 0.0).unwrap(),
            AffineMap::scalar(0.0, 1.0).unwrap(),
        ])
        .unwrap()
    }

    /// `{x/2, x/2 + 1/2}`: attractor `[0, 1]`.
    pub fn segment() -> Self {
        Self::new(vec![
            AffineMap::scalar(0.5, 0.0).unwrap(),
            AffineMap::scalar(0.5, 0.5).unwrap(),
        ])
        .unwrap()
    }

    /// Planar Sierpinski triangle with unit side, three similitudes of ratio 1/2.
    pub fn sierpinski() -> Self {
        let h = 3f64.sqrt() / 4.0;
        Self::new(vec![
            AffineMap::similitude(0.5, vec![0.0, 0.0]).unwrap(),
            AffineMap::similitude(0.5, vec![0.5, 0.0]).unwrap(),
            AffineMap::similitude(0.5, vec![0.25, h]).unwrap(),
        ])
        .unwrap()
    }

    /// `{x/2}`: attractor `{0}`.
    pub fn single_point() -> Self {
        Self::new(vec![AffineMap::scalar(0.5, 0.0).unwrap()]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of maps `K`.
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// `L = max Lip(f_i)`.
    pub fn lip_max(&self) -> f64 {
        self.lip_max
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    /// Map addressed by a 1-based symbol.
    pub fn map(&self, symbol: Symbol) -> Result<&AffineMap> {
        let idx = usize::from(symbol);
        if idx == 0 || idx > self.maps.len() {
            return Err(Error::InvalidSymbol {
                symbol: u32::from(symbol),
                alphabet: self.maps.len(),
            });
        }
        Ok(&self.maps[idx - 1])
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "point has dimension {}, IFS has {}",
                x.len(),
                self.dim
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "point coordinates must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// The points `x_0, …, x_n` of a chaos-game orbit and the symbols that drove it.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    dim: usize,
    coords: Vec<f64>,
    driver_prefix: Vec<Symbol>,
}

impl Orbit {
    pub fn start(&self) -> &[f64] {
        self.point(0)
    }

    /// Number of points, `n + 1`.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.coords[k * self.dim..(k + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn driver_prefix(&self) -> &[Symbol] {
        &self.driver_prefix
    }
}

/// Runs `x_k = f_{i_k}(x_{k-1})` for `n` steps, consuming exactly `n` symbols.
pub fn run_orbit(
    ifs: &IfsSystem,
    driver: &mut DriverStream,
    x0: &[f64],
    n: usize,
) -> Result<Orbit> {
    ifs.check_point(x0)?;
    let dim = ifs.dim();
    let mut coords = Vec::with_capacity((n + 1) * dim);
    coords.extend_from_slice(x0);
    let mut driver_prefix = Vec::with_capacity(n);
    let mut cur = x0.to_vec();
    let mut next = vec![0.0; dim];
    for _ in 0..n {
        let symbol = driver.next_symbol()?;
        ifs.map(symbol)?.apply(&cur, &mut next);
        coords.extend_from_slice(&next);
        driver_prefix.push(symbol);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(Orbit {
        dim,
        coords,
        driver_prefix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{champernowne, DriverStream, Word};

    #[test]
    fn fixed_points_of_scalar_maps() {
        let half = AffineMap::scalar(0.5, 0.0).unwrap();
        assert_eq!(half.fixed_point().unwrap(), vec![0.0]);
        let third = AffineMap::scalar(1.0 / 3.0, 2.0 / 3.0).unwrap();
        assert!((third.fixed_point().unwrap()[0] - 1.0).abs() < 1e-12);
        let constant = AffineMap::scalar(0.0, 1.0).unwrap();
        assert_eq!(constant.fixed_point().unwrap(), vec![1.0]);
    }

    #[test]
    fn fixed_point_in_the_plane() {
        let rot = AffineMap::new(vec![vec![0.0, -0.5], vec![0.5, 0.0]], vec![1.0, 2.0]).unwrap();
        let x = rot.fixed_point().unwrap();
        let fx = rot.image(&x);
        assert!(geometry::distance(&fx, &x) <= 1e-10 * (1.0 + geometry::norm(&x)));
    }

    #[test]
    fn rejects_expanding_and_malformed_maps() {
        assert!(matches!(
            AffineMap::scalar(1.0, 0.0),
            Err(Error::NotContraction(_))
        ));
        assert!(matches!(
            AffineMap::new(vec![vec![2.0, 0.0], vec![0.0, 0.1]], vec![0.0, 0.0]),
            Err(Error::NotContraction(_))
        ));
        assert!(AffineMap::new(vec![vec![0.5]], vec![0.0, 0.0]).is_err());
        assert!(AffineMap::scalar(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn shear_lipschitz_is_spectral_norm() {
        // [[0.5, 0.4], [0, 0.5]] has spectral norm ≈ 0.73852, above its diagonal.
        let m = AffineMap::new(vec![vec![0.5, 0.4], vec![0.0, 0.5]], vec![0.0, 0.0]).unwrap();
        assert!(m.lip() > 0.73851 && m.lip() < 0.73853);
    }

    #[test]
    fn orbit_by_hand() {
        let cantor = IfsSystem::cantor();
        let mut driver = DriverStream::literal(Word::new(vec![2, 1], 2).unwrap());
        let orbit = run_orbit(&cantor, &mut driver, &[0.0], 2).unwrap();
        let xs: Vec<f64> = orbit.points().map(|p| p[0]).collect();
        assert_eq!(orbit.len(), orbit.driver_prefix().len() + 1);
        assert!((xs[0] - 0.0).abs() < 1e-15);
        assert!((xs[1] - 2.0 / 3.0).abs() < 1e-15);
        assert!((xs[2] - 2.0 / 9.0).abs() < 1e-15);

        let ex4 = IfsSystem::example4();
        let mut driver = DriverStream::literal(Word::new(vec![1, 1, 1], 2).unwrap());
        let orbit = run_orbit(&ex4, &mut driver, &[1.0], 3).unwrap();
        let xs: Vec<f64> = orbit.points().map(|p| p[0]).collect();
        assert_eq!(xs, vec![1.0, 0.5, 0.25, 0.125]);
    }

    #[test]
    fn orbit_matches_scalar_recomputation() {
        let cantor = IfsSystem::cantor();
        let mut driver = champernowne(2).unwrap();
        let orbit = run_orbit(&cantor, &mut driver, &[0.0], 10).unwrap();
        // Independent recomputation: explicit arithmetic per symbol.
        let symbols = [1u16, 2, 1, 1, 1, 2, 2, 1, 2, 2];
        assert_eq!(orbit.driver_prefix(), &symbols);
        let mut x = 0.0f64;
        for (k, s) in symbols.iter().enumerate() {
            x = if *s == 1 {
                x / 3.0
            } else {
                x / 3.0 + 2.0 / 3.0
            };
            assert!((orbit.point(k + 1)[0] - x).abs() < 1e-15);
        }
    }

    #[test]
    fn invalid_symbol_and_exhaustion() {
        let cantor = IfsSystem::cantor();
        let mut driver = DriverStream::literal(Word::new(vec![1, 2], 2).unwrap());
        assert!(matches!(
            run_orbit(&cantor, &mut driver, &[0.0], 3),
            Err(Error::DriverExhausted(2))
        ));
        let sierpinski_word = Word::new(vec![3], 3).unwrap();
        let mut driver = DriverStream::literal(sierpinski_word);
        assert!(matches!(
            run_orbit(&cantor, &mut driver, &[0.0], 1),
            Err(Error::InvalidSymbol { symbol: 3, .. })
        ));
    }

    #[test]
    fn ifs_requires_a_non_constant_map() {
        let constant = AffineMap::scalar(0.0, 1.0).unwrap();
        assert!(IfsSystem::new(vec![constant]).is_err());
        assert!(IfsSystem::new(vec![]).is_err());
        let ex4 = IfsSystem::example4();
        assert_eq!(ex4.len(), 2);
        assert!((ex4.lip_max() - 0.5).abs() < 1e-12);
    }
}
