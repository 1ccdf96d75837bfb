use super::{check_alphabet, DriverStream, Symbol, SymbolSource};
use crate::error::Result;

/// All words of length 1, then of length 2, and so on, each length in
/// lexicographic order.
pub fn champernowne(k: usize) -> Result<DriverStream> {
    check_alphabet(k, 2)?;
    let source = Champernowne {
        k: k as Symbol,
        word: vec![1],
        next: 0,
    };
    Ok(DriverStream::from_source(
        Box::new(source),
        format!("champernowne(K={k})"),
    ))
}

#[derive(Clone)]
struct Champernowne {
    k: Symbol,
    /// The word being emitted.
    word: Vec<Symbol>,
    next: usize,
}

impl Champernowne {
    /// Lexicographic successor; wraps to `1^(len+1)` after `K^len`.
    fn advance(&mut self) {
        for s in self.word.iter_mut().rev() {
            if *s < self.k {
                *s += 1;
                return;
            }
            *s = 1;
        }
        self.word.push(1);
    }
}

impl SymbolSource for Champernowne {
    #[inline]
    fn next_symbol(&mut self) -> Result<Symbol> {
        if self.next == self.word.len() {
            self.advance();
            self.next = 0;
        }
        let s = self.word[self.next];
        self.next += 1;
        Ok(s)
    }

    fn alphabet(&self) -> usize {
        usize::from(self.k)
    }

    fn box_clone(&self) -> Box<dyn SymbolSource> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_symbols() {
        assert_eq!(
            champernowne(2).unwrap().take(10).unwrap(),
            vec![1, 2, 1, 1, 1, 2, 2, 1, 2, 2]
        );
        assert_eq!(champernowne(3).unwrap().take(3).unwrap(), vec![1, 2, 3]);
        assert!(champernowne(1).is_err());
    }

    #[test]
    fn blocks_have_the_expected_lengths() {
        // Lengths 1..=4 over K=3 occupy Σ j·3^j symbols.
        let total: usize = (1..=4).map(|j| j * 3usize.pow(j as u32)).sum();
        let mut d = champernowne(3).unwrap();
        d.skip(total as u64).unwrap();
        assert_eq!(d.take(5).unwrap(), vec![1, 1, 1, 1, 1]);
    }
}
