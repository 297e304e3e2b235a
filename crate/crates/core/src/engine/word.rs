//! Lazy streaming of the limit word of an L-system.

use crate::mapexpr::{LSystemSpec, Letter};

use super::EngineError;

/// Letter `n` (1-based) of the Thue–Morse word ABBABAAB…: `A` exactly when the
/// binary digit sum of `n − 1` is even.
pub fn tm_letter(n: u64) -> Letter {
    assert!(n >= 1, "letters are numbered from 1");
    if (n - 1).count_ones() % 2 == 0 {
        'A'
    } else {
        'B'
    }
}

#[derive(Clone, Debug)]
enum Mode {
    /// σ(W) = W·u with u nonempty: the word is W u σ(u) σ²(u) …
    Growing { depth: u32, stack: Vec<(usize, u32)> },
    /// σ(W) = W: the word repeats W.
    Periodic,
}

/// Iterator over the infinite word generated from the axiom.
#[derive(Clone, Debug)]
pub struct LazyWord {
    alphabet: Vec<Letter>,
    rules: Vec<Vec<usize>>,
    prefix: Vec<usize>,
    tail: Vec<usize>,
    mode: Mode,
    pos: u64,
}

impl LazyWord {
    pub fn new(spec: &LSystemSpec) -> Result<LazyWord, EngineError> {
        let alphabet = spec.alphabet.clone();
        let index = |c: &Letter| alphabet.iter().position(|a| a == c).expect("validated alphabet");
        let rules: Vec<Vec<usize>> = alphabet.iter().map(|c| spec.rules[c].iter().map(index).collect()).collect();
        let apply = |w: &[usize]| -> Vec<usize> { w.iter().flat_map(|&c| rules[c].iter().copied()).collect() };
        // The axiom itself may not be a prefix of its image, but one of its
        // first few images can be; the limit word starts from there.
        let mut w: Vec<usize> = spec.axiom.iter().map(index).collect();
        for _ in 0..=alphabet.len() + 1 {
            let img = apply(&w);
            if img.starts_with(&w) {
                let tail = img[w.len()..].to_vec();
                let mode = if tail.is_empty() { Mode::Periodic } else { Mode::Growing { depth: 0, stack: Vec::new() } };
                return Ok(LazyWord { alphabet, rules, prefix: w, tail, mode, pos: 0 });
            }
            if img.len() > 1 << 20 {
                break;
            }
            w = img;
        }
        Err(EngineError::NonProductive)
    }

    /// Number of letters emitted so far.
    pub fn position(&self) -> u64 {
        self.pos
    }

    fn next_index(&mut self) -> usize {
        let plen = self.prefix.len() as u64;
        let out = if self.pos < plen {
            self.prefix[self.pos as usize]
        } else {
            match &mut self.mode {
                Mode::Periodic => self.prefix[((self.pos - plen) % plen) as usize],
                Mode::Growing { depth, stack } => loop {
                    if stack.is_empty() {
                        stack.extend(self.tail.iter().rev().map(|&c| (c, *depth)));
                        *depth += 1;
                    }
                    let (c, d) = stack.pop().expect("refilled above");
                    if d == 0 {
                        break c;
                    }
                    stack.extend(self.rules[c].iter().rev().map(|&k| (k, d - 1)));
                },
            }
        };
        self.pos += 1;
        out
    }

    /// Back to the first letter.
    pub fn rewind(&mut self) {
        self.pos = 0;
        if let Mode::Growing { depth, stack } = &mut self.mode {
            *depth = 0;
            stack.clear();
        }
    }

    pub fn skip_letters(&mut self, n: u64) {
        for _ in 0..n {
            self.next_index();
        }
    }
}

impl Iterator for LazyWord {
    type Item = Letter;

    fn next(&mut self) -> Option<Letter> {
        let i = self.next_index();
        Some(self.alphabet[i])
    }
}

/// The first `n` letters of the limit word.
pub fn lword_stream(spec: &LSystemSpec, n: usize) -> Result<Vec<Letter>, EngineError> {
    Ok(LazyWord::new(spec)?.take(n).collect())
}
