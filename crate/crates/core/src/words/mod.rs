//! Finite words, infinite symbol drivers and word-coverage statistics.

mod champernowne;
mod coverage;
mod debruijn;
mod example4;
mod random;

pub use champernowne::champernowne;
pub use coverage::{word_coverage, CoverageStat, DEFAULT_COVERAGE_CAP, MAX_COVERAGE_WORDS};
pub use debruijn::{alpha, de_bruijn_word, extend_de_bruijn, infinite_de_bruijn, DE_BRUIJN_BUDGET};
pub use example4::{example4_driver, Example4Blocks};
pub use random::random_driver;

use std::fmt;

use crate::error::{Error, Result};

/// A 1-based symbol `i ∈ {1, …, K}`.
pub type Symbol = u16;

/// Largest supported alphabet.
pub const MAX_ALPHABET: usize = Symbol::MAX as usize;

/// A finite word over `{1, …, K}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    symbols: Vec<Symbol>,
    alphabet: usize,
}

impl Word {
    pub fn new(symbols: Vec<Symbol>, alphabet: usize) -> Result<Self> {
        check_alphabet(alphabet, 1)?;
        if let Some(&bad) = symbols
            .iter()
            .find(|&&s| s == 0 || usize::from(s) > alphabet)
        {
            return Err(Error::InvalidSymbol {
                symbol: u32::from(bad),
                alphabet,
            });
        }
        Ok(Self { symbols, alphabet })
    }

    pub(crate) fn from_trusted(symbols: Vec<Symbol>, alphabet: usize) -> Self {
        debug_assert!(symbols
            .iter()
            .all(|&s| s >= 1 && usize::from(s) <= alphabet));
        Self { symbols, alphabet }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.symbols
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_symbols(&self.symbols, self.alphabet))
    }
}

/// Digits without separators for alphabets up to 9, comma-separated otherwise.
pub fn format_symbols(symbols: &[Symbol], alphabet: usize) -> String {
    if alphabet <= 9 {
        symbols
            .iter()
            .map(|s| char::from(b'0' + *s as u8))
            .collect()
    } else {
        symbols
            .iter()
            .map(Symbol::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub(crate) fn check_alphabet(k: usize, min: usize) -> Result<()> {
    if k < min || k > MAX_ALPHABET {
        return Err(Error::InvalidInput(format!(
            "alphabet size must lie in {min}..={MAX_ALPHABET}, got {k}"
        )));
    }
    Ok(())
}

/// A stateful producer of driver symbols.
pub trait SymbolSource: Send {
    fn next_symbol(&mut self) -> Result<Symbol>;
    fn alphabet(&self) -> usize;
    fn box_clone(&self) -> Box<dyn SymbolSource>;
}

/// A driver `i = (i_1, i_2, …)` read one symbol at a time.
///
/// Cloning copies the cursor, so a clone continues from the same position.
pub struct DriverStream {
    source: Box<dyn SymbolSource>,
    position: u64,
    label: String,
}

impl Clone for DriverStream {
    fn clone(&self) -> Self {
        Self {
            source: self.source.box_clone(),
            position: self.position,
            label: self.label.clone(),
        }
    }
}

impl fmt::Debug for DriverStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DriverStream")
            .field("label", &self.label)
            .field("alphabet", &self.alphabet())
            .field("position", &self.position)
            .finish()
    }
}

impl DriverStream {
    pub fn from_source(source: Box<dyn SymbolSource>, label: impl Into<String>) -> Self {
        Self {
            source,
            position: 0,
            label: label.into(),
        }
    }

    /// Emits `word` and then fails with [`Error::DriverExhausted`].
    pub fn literal(word: Word) -> Self {
        let label = format!("literal({})", word.len());
        Self::from_source(
            Box::new(LiteralSource {
                word: word.symbols,
                alphabet: word.alphabet,
                next: 0,
            }),
            label,
        )
    }

    /// The next symbol `i_{position+1}`.
    #[inline]
    pub fn next_symbol(&mut self) -> Result<Symbol> {
        let s = self.source.next_symbol()?;
        self.position += 1;
        Ok(s)
    }

    /// Number of symbols consumed so far.
    pub fn position(&self) -> u64 {
        self.position
    }

    pub fn alphabet(&self) -> usize {
        self.source.alphabet()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn take(&mut self, n: usize) -> Result<Vec<Symbol>> {
        (0..n).map(|_| self.next_symbol()).collect()
    }

    /// Consumes and discards `n` symbols.
    pub fn skip(&mut self, n: u64) -> Result<()> {
        for _ in 0..n {
            self.next_symbol()?;
        }
        Ok(())
    }
}

#[derive(Clone)]
struct LiteralSource {
    word: Vec<Symbol>,
    alphabet: usize,
    next: usize,
}

impl SymbolSource for LiteralSource {
    fn next_symbol(&mut self) -> Result<Symbol> {
        let s = *self
            .word
            .get(self.next)
            .ok_or(Error::DriverExhausted(self.word.len() as u64))?;
        self.next += 1;
        Ok(s)
    }

    fn alphabet(&self) -> usize {
        self.alphabet
    }

    fn box_clone(&self) -> Box<dyn SymbolSource> {
        Box::new(self.clone())
    }
}
