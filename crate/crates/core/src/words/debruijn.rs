//! Noncyclic de Bruijn words via Eulerian trails in the de Bruijn graph.
//!
//! The order-`m` word corresponds to an Eulerian trail in the graph whose
//! nodes are the `(m−1)`-words and whose edges are the `m`-words. Extending a
//! given word walks its edges first and then runs Hierholzer on the unused
//! edges from wherever the walk stopped. An Eulerian trail of the residual
//! graph from that node exists exactly when the extension exists, and
//! Hierholzer finds one whenever it exists.

use std::sync::Arc;

use super::{check_alphabet, DriverStream, Symbol, SymbolSource, Word};
use crate::error::{Error, Result};

/// Largest number of edges (`K^m`) a single construction may use.
pub const DE_BRUIJN_BUDGET: u64 = 1 << 24;

/// Order step of the infinite construction: 1 for `K ≥ 3`, 2 for `K = 2`.
pub fn alpha(k: usize) -> usize {
    if k == 2 {
        2
    } else {
        1
    }
}

fn edge_count(k: usize, order: usize) -> Result<u64> {
    let mut e = 1u64;
    for _ in 0..order {
        e = e.saturating_mul(k as u64);
        if e > DE_BRUIJN_BUDGET {
            return Err(Error::Budget(format!(
                "{k}^{order} words exceed the de Bruijn budget {DE_BRUIJN_BUDGET}"
            )));
        }
    }
    Ok(e)
}

/// Length `K^m + m − 1` word containing each `m`-word exactly once.
pub fn de_bruijn_word(k: usize, m: usize) -> Result<Word> {
    check_alphabet(k, 2)?;
    if m == 0 {
        return Err(Error::InvalidInput(
            "de Bruijn order must be at least 1".into(),
        ));
    }
    complete(k, m, &[]).map(|s| Word::from_trusted(s, k))
}

/// Extends a de Bruijn word of order `m` to one of order `m + α(K)` having
/// the input as a prefix.
pub fn extend_de_bruijn(word: &Word, k: usize) -> Result<Word> {
    let m = de_bruijn_order(word, k)?;
    extend_de_bruijn_to(word, k, m + alpha(k))
}

/// Extends `word` to a de Bruijn word of the given order, if one with this
/// prefix exists.
pub fn extend_de_bruijn_to(word: &Word, k: usize, order: usize) -> Result<Word> {
    check_alphabet(k, 2)?;
    if word.alphabet() != k {
        return Err(Error::InvalidInput(format!(
            "word alphabet {} differs from K = {k}",
            word.alphabet()
        )));
    }
    if order == 0 {
        return Err(Error::InvalidInput(
            "de Bruijn order must be at least 1".into(),
        ));
    }
    complete(k, order, word.symbols()).map(|s| Word::from_trusted(s, k))
}

/// The order `m` of a de Bruijn word, checking that it is one.
pub fn de_bruijn_order(word: &Word, k: usize) -> Result<usize> {
    let len = word.len() as u64;
    let mut m = 1usize;
    loop {
        let size = (k as u64).checked_pow(m as u32).unwrap_or(u64::MAX);
        let expect = size.saturating_add(m as u64 - 1);
        if expect == len {
            break;
        }
        if expect > len {
            return Err(Error::InvalidInput(format!(
                "length {len} is not K^m + m - 1 for K = {k}"
            )));
        }
        m += 1;
    }
    let size = edge_count(k, m)? as usize;
    let mut seen = vec![false; size];
    let mut code = 0usize;
    for (i, &s) in word.symbols().iter().enumerate() {
        code = (code * k + usize::from(s) - 1) % size;
        if i + 1 >= m {
            if seen[code] {
                return Err(Error::InvalidInput(format!(
                    "not a de Bruijn word of order {m}"
                )));
            }
            seen[code] = true;
        }
    }
    Ok(m)
}

/// Walks `prefix` through the order-`order` graph, then completes an
/// Eulerian trail over the remaining edges.
fn complete(k: usize, order: usize, prefix: &[Symbol]) -> Result<Vec<Symbol>> {
    let edges = edge_count(k, order)? as usize;
    let nodes = edges / k;
    let r = order - 1;
    let target_len = edges + r;

    let mut out: Vec<Symbol> = Vec::with_capacity(target_len);
    out.extend_from_slice(prefix);
    while out.len() < r {
        out.push(1);
    }
    if let Some(&bad) = out.iter().find(|&&s| s == 0 || usize::from(s) > k) {
        return Err(Error::InvalidSymbol {
            symbol: u32::from(bad),
            alphabet: k,
        });
    }

    let mut used = vec![false; edges];
    let mut node = 0usize;
    for &s in &out[..r] {
        node = (node * k + usize::from(s) - 1) % nodes;
    }
    for (i, &s) in out[r..].iter().enumerate() {
        let e = node * k + usize::from(s) - 1;
        if used[e] {
            return Err(Error::ExtensionNotFound(format!(
                "prefix repeats an order-{order} word at position {}",
                r + i + 1
            )));
        }
        used[e] = true;
        node = e % nodes;
    }

    let mut next = vec![0u16; nodes];
    let mut stack_nodes: Vec<u32> = vec![node as u32];
    let mut stack_syms: Vec<Symbol> = vec![0];
    let mut trail: Vec<Symbol> = Vec::with_capacity(edges + r - out.len());
    while let Some(&u) = stack_nodes.last() {
        let u = u as usize;
        let mut found = None;
        while usize::from(next[u]) < k {
            let s = usize::from(next[u]);
            next[u] += 1;
            let e = u * k + s;
            if !used[e] {
                used[e] = true;
                found = Some((e % nodes, s));
                break;
            }
        }
        match found {
            Some((v, s)) => {
                stack_nodes.push(v as u32);
                stack_syms.push(s as Symbol + 1);
            }
            None => {
                stack_nodes.pop();
                let s = stack_syms.pop().expect("parallel stacks");
                if !stack_nodes.is_empty() {
                    trail.push(s);
                }
            }
        }
    }
    trail.reverse();
    out.extend_from_slice(&trail);
    if out.len() != target_len {
        return Err(Error::ExtensionNotFound(format!(
            "trail covers {} of {target_len} symbols for order {order}",
            out.len()
        )));
    }
    Ok(out)
}

/// Inductive limit of de Bruijn words: orders 1, 2, 3, … for `K ≥ 3` and
/// 2, 4, 6, … for `K = 2`, each extending the previous one.
pub fn infinite_de_bruijn(k: usize) -> Result<DriverStream> {
    check_alphabet(k, 2)?;
    let order = if k == 2 { 2 } else { 1 };
    let word = de_bruijn_word(k, order)?;
    let source = InfiniteDeBruijn {
        k,
        order,
        buffer: Arc::new(word.into_symbols()),
        next: 0,
    };
    Ok(DriverStream::from_source(
        Box::new(source),
        format!("de_bruijn(K={k})"),
    ))
}

#[derive(Clone)]
struct InfiniteDeBruijn {
    k: usize,
    order: usize,
    buffer: Arc<Vec<Symbol>>,
    next: usize,
}

impl SymbolSource for InfiniteDeBruijn {
    #[inline]
    fn next_symbol(&mut self) -> Result<Symbol> {
        if self.next == self.buffer.len() {
            let order = self.order + alpha(self.k);
            let extended = complete(self.k, order, &self.buffer)?;
            self.buffer = Arc::new(extended);
            self.order = order;
        }
        let s = self.buffer[self.next];
        self.next += 1;
        Ok(s)
    }

    fn alphabet(&self) -> usize {
        self.k
    }

    fn box_clone(&self) -> Box<dyn SymbolSource> {
        Box::new(self.clone())
    }
}
