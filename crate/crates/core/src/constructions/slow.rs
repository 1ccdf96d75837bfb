use std::sync::Arc;

use super::schedule::Schedule;
use crate::error::{Error, Result};
use crate::words::{DriverStream, Symbol, SymbolSource};

/// Emits `(i_*)^{p_k} σ_{m_k}` for every scheduled block, then continues
/// with `tail`.
pub fn slow_driver(schedule: Arc<Schedule>, tail: DriverStream) -> Result<DriverStream> {
    if schedule.entries.is_empty() {
        return Err(Error::InvalidInput(
            "slow driver needs at least one scheduled block".into(),
        ));
    }
    let k = schedule.entries[0].sigma.alphabet();
    if tail.alphabet() != k {
        return Err(Error::InvalidInput(format!(
            "tail alphabet {} differs from the schedule's {k}",
            tail.alphabet()
        )));
    }
    let label = format!(
        "slow({},{} blocks)+{}",
        schedule.psi,
        schedule.entries.len(),
        tail.label()
    );
    let source = SlowSource {
        schedule,
        tail,
        block: 0,
        offset: 0,
    };
    Ok(DriverStream::from_source(Box::new(source), label))
}

#[derive(Clone)]
struct SlowSource {
    schedule: Arc<Schedule>,
    tail: DriverStream,
    block: usize,
    /// Symbols already emitted from the current block.
    offset: u64,
}

impl SymbolSource for SlowSource {
    #[inline]
    fn next_symbol(&mut self) -> Result<Symbol> {
        let Some(entry) = self.schedule.entries.get(self.block) else {
            return self.tail.next_symbol();
        };
        let s = if self.offset < entry.p {
            self.schedule.base.i_star
        } else {
            entry.sigma.symbols()[(self.offset - entry.p) as usize]
        };
        self.offset += 1;
        if self.offset == entry.block_len() {
            self.block += 1;
            self.offset = 0;
        }
        Ok(s)
    }

    fn alphabet(&self) -> usize {
        self.tail.alphabet()
    }

    fn box_clone(&self) -> Box<dyn SymbolSource> {
        Box::new(self.clone())
    }
}
