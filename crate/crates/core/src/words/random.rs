use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_alphabet, DriverStream, Symbol, SymbolSource};
use crate::error::Result;

/// Independent uniform symbols from a seeded ChaCha8 generator.
pub fn random_driver(k: usize, seed: u64) -> Result<DriverStream> {
    check_alphabet(k, 1)?;
    let source = RandomSource {
        k: k as Symbol,
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    Ok(DriverStream::from_source(
        Box::new(source),
        format!("random(K={k},seed={seed})"),
    ))
}

#[derive(Clone)]
struct RandomSource {
    k: Symbol,
    rng: ChaCha8Rng,
}

impl SymbolSource for RandomSource {
    #[inline]
    fn next_symbol(&mut self) -> Result<Symbol> {
        Ok(self.rng.random_range(1..=self.k))
    }

    fn alphabet(&self) -> usize {
        usize::from(self.k)
    }

    fn box_clone(&self) -> Box<dyn SymbolSource> {
        Box::new(self.clone())
    }
}
