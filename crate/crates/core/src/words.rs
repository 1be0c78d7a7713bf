//! Reduced words of a finitely generated free group, stored as runs of
//! signed generator powers, plus endomorphisms given by generator images.

use crate::Error;
use std::fmt;
use std::sync::Arc;

/// Ordered set of distinct generator symbols.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Arc<[char]>,
}

impl Alphabet {
    pub fn new(symbols: &[char]) -> Result<Self, Error> {
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet("empty symbol list".into()));
        }
        for (i, &c) in symbols.iter().enumerate() {
            if symbols[..i].contains(&c) {
                return Err(Error::InvalidAlphabet(format!("duplicate symbol '{c}'")));
            }
        }
        Ok(Alphabet {
            symbols: symbols.into(),
        })
    }

    pub fn rank(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbol(&self, index: usize) -> char {
        self.symbols[index]
    }

    pub fn index_of(&self, symbol: char) -> Option<usize> {
        self.symbols.iter().position(|&c| c == symbol)
    }

    pub fn identity(&self) -> FreeWord {
        FreeWord {
            alphabet: self.clone(),
            blocks: Vec::new(),
        }
    }

    /// Free reduction of a sequence of symbol powers.
    pub fn reduce(&self, letters: &[(char, i64)]) -> Result<FreeWord, Error> {
        let mut blocks = Vec::new();
        for &(symbol, exp) in letters {
            let gen = self.index_of(symbol).ok_or(Error::UnknownSymbol(symbol))?;
            push_block(&mut blocks, gen, exp)?;
        }
        Ok(FreeWord {
            alphabet: self.clone(),
            blocks,
        })
    }

    /// Parses the word grammar: blocks `gen` or `gen^exp`, whitespace ignored,
    /// empty input is the identity.
    pub fn parse_word(&self, text: &str) -> Result<FreeWord, Error> {
        let mut blocks = Vec::new();
        let mut chars = text.char_indices().peekable();
        loop {
            while let Some(&(_, c)) = chars.peek() {
                if c.is_whitespace() {
                    chars.next();
                } else {
                    break;
                }
            }
            let Some(&(pos, c)) = chars.peek() else { break };
            let gen = self.index_of(c).ok_or(Error::Parse {
                position: pos,
                message: format!("unexpected character '{c}'"),
            })?;
            chars.next();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_whitespace() {
                    chars.next();
                } else {
                    break;
                }
            }
            let mut exp: i64 = 1;
            if let Some(&(_, '^')) = chars.peek() {
                chars.next();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_whitespace() {
                        chars.next();
                    } else {
                        break;
                    }
                }
                let mut digits = String::new();
                if let Some(&(_, '-')) = chars.peek() {
                    digits.push('-');
                    chars.next();
                }
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_digit() {
                        digits.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let at = chars.peek().map_or(text.len(), |&(p, _)| p);
                if digits.is_empty() || digits == "-" {
                    return Err(Error::Parse {
                        position: at,
                        message: "expected exponent digits".into(),
                    });
                }
                exp = digits.parse().map_err(|_| Error::Parse {
                    position: at,
                    message: "exponent out of range".into(),
                })?;
            }
            push_block(&mut blocks, gen, exp)?;
        }
        Ok(FreeWord {
            alphabet: self.clone(),
            blocks,
        })
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet({:?})", self.symbols)
    }
}

/// One maximal run `gen^exp` of a reduced word; `exp` is never zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub gen: usize,
    pub exp: i64,
}

/// Appends `gen^exp`, merging with the last run and dropping cancellations.
fn push_block(blocks: &mut Vec<Block>, gen: usize, exp: i64) -> Result<(), Error> {
    if exp == 0 {
        return Ok(());
    }
    if let Some(last) = blocks.last_mut() {
        if last.gen == gen {
            let merged = last.exp.checked_add(exp).ok_or(Error::ExponentOverflow)?;
            if merged == 0 {
                blocks.pop();
            } else {
                last.exp = merged;
            }
            return Ok(());
        }
    }
    blocks.push(Block { gen, exp });
    Ok(())
}

/// A reduced word: alternating-generator runs with nonzero exponents.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FreeWord {
    alphabet: Alphabet,
    blocks: Vec<Block>,
}

impl FreeWord {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub(crate) fn from_blocks(
        alphabet: &Alphabet,
        runs: impl IntoIterator<Item = (usize, i64)>,
    ) -> Result<Self, Error> {
        let mut blocks = Vec::new();
        for (gen, exp) in runs {
            debug_assert!(gen < alphabet.rank());
            push_block(&mut blocks, gen, exp)?;
        }
        Ok(FreeWord {
            alphabet: alphabet.clone(),
            blocks,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Letter count: the sum of absolute exponents.
    pub fn len(&self) -> u64 {
        self.blocks.iter().fold(0u64, |n, b| {
            n.checked_add(b.exp.unsigned_abs())
                .expect("word length overflow")
        })
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    /// Expansion into single letters `(gen, ±1)`.
    pub fn letters(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.blocks.iter().flat_map(|b| {
            let sign = if b.exp > 0 { 1 } else { -1 };
            (0..b.exp.unsigned_abs()).map(move |_| (b.gen, sign))
        })
    }

    pub fn concat(&self, other: &FreeWord) -> Result<FreeWord, Error> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        let mut blocks = self.blocks.clone();
        for b in &other.blocks {
            push_block(&mut blocks, b.gen, b.exp)?;
        }
        Ok(FreeWord {
            alphabet: self.alphabet.clone(),
            blocks,
        })
    }

    pub fn inverse(&self) -> FreeWord {
        let blocks = self
            .blocks
            .iter()
            .rev()
            .map(|b| Block {
                gen: b.gen,
                exp: -b.exp,
            })
            .collect();
        FreeWord {
            alphabet: self.alphabet.clone(),
            blocks,
        }
    }

    /// `y · self · y⁻¹`.
    pub fn conjugate_by(&self, y: &FreeWord) -> Result<FreeWord, Error> {
        y.concat(self)?.concat(&y.inverse())
    }

    /// `self^k` in block form. A word `p · c · p⁻¹` is raised by powering its
    /// cyclically reduced core `c`, so conjugated powers never expand letters.
    pub fn power(&self, k: i64) -> Result<FreeWord, Error> {
        if k == 0 || self.is_identity() {
            return Ok(self.alphabet.identity());
        }
        if k < 0 {
            let pos = k.checked_neg().ok_or(Error::ExponentOverflow)?;
            return self.inverse().power(pos);
        }
        let (prefix, core) = self.cyclic_decomposition()?;
        let mut blocks: Vec<Block> = prefix.clone();
        if let [single] = core.as_slice() {
            let exp = single.exp.checked_mul(k).ok_or(Error::ExponentOverflow)?;
            push_block(&mut blocks, single.gen, exp)?;
        } else {
            let total = (core.len() as u64)
                .checked_mul(k as u64)
                .ok_or(Error::ExponentOverflow)?;
            if total > (1 << 24) {
                return Err(Error::ResourceLimit {
                    needed: total,
                    limit: 1 << 24,
                });
            }
            for _ in 0..k {
                for b in &core {
                    push_block(&mut blocks, b.gen, b.exp)?;
                }
            }
        }
        for b in prefix.iter().rev() {
            push_block(&mut blocks, b.gen, -b.exp)?;
        }
        Ok(FreeWord {
            alphabet: self.alphabet.clone(),
            blocks,
        })
    }

    /// Splits `self = p · c · p⁻¹` with `c` cyclically reduced (first and last
    /// runs on distinct generators, or a single run).
    fn cyclic_decomposition(&self) -> Result<(Vec<Block>, Vec<Block>), Error> {
        let mut prefix = Vec::new();
        let mut lo = 0;
        let mut hi = self.blocks.len();
        while hi - lo >= 2 && self.blocks[lo].gen == self.blocks[hi - 1].gen {
            let (first, last) = (self.blocks[lo], self.blocks[hi - 1]);
            if first.exp == -last.exp {
                prefix.push(first);
                lo += 1;
                hi -= 1;
            } else {
                // p gains the whole first run; the merged run moves to the end
                // of the core: p·(M·g^{e1+e2})·p⁻¹ with p ending in g^{e1}.
                prefix.push(first);
                let merged = first
                    .exp
                    .checked_add(last.exp)
                    .ok_or(Error::ExponentOverflow)?;
                let mut core: Vec<Block> = self.blocks[lo + 1..hi - 1].to_vec();
                core.push(Block {
                    gen: first.gen,
                    exp: merged,
                });
                return Ok((prefix, core));
            }
        }
        Ok((prefix, self.blocks[lo..hi].to_vec()))
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let symbol = self.alphabet.symbol(b.gen);
            if b.exp == 1 {
                write!(f, "{symbol}")?;
            } else {
                write!(f, "{symbol}^{}", b.exp)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeWord(\"{self}\")")
    }
}

/// Endomorphism of the free group, one image word per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endomorphism {
    alphabet: Alphabet,
    images: Vec<FreeWord>,
}

impl Endomorphism {
    pub fn new(alphabet: &Alphabet, images: Vec<FreeWord>) -> Result<Self, Error> {
        if images.len() != alphabet.rank() {
            return Err(Error::InvalidInput(format!(
                "expected {} generator images, got {}",
                alphabet.rank(),
                images.len()
            )));
        }
        if images.iter().any(|w| w.alphabet() != alphabet) {
            return Err(Error::AlphabetMismatch);
        }
        Ok(Endomorphism {
            alphabet: alphabet.clone(),
            images,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn image_of(&self, gen: usize) -> &FreeWord {
        &self.images[gen]
    }

    pub fn apply(&self, w: &FreeWord) -> Result<FreeWord, Error> {
        if w.alphabet() != &self.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        let mut out = self.alphabet.identity();
        for b in w.blocks() {
            out = out.concat(&self.images[b.gen].power(b.exp)?)?;
        }
        Ok(out)
    }

    pub fn iterate(&self, n: u32, w: &FreeWord) -> Result<FreeWord, Error> {
        let mut out = w.clone();
        for _ in 0..n {
            out = self.apply(&out)?;
        }
        Ok(out)
    }
}

/// All reduced words of length at most `max_len`, identity first, then by
/// length, in a fixed generator/sign order.
pub fn reduced_words(alphabet: &Alphabet, max_len: u32) -> Vec<FreeWord> {
    let rank = alphabet.rank();
    let mut out = vec![alphabet.identity()];
    let mut frontier: Vec<Vec<(usize, i64)>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for prefix in &frontier {
            for gen in 0..rank {
                for sign in [1i64, -1] {
                    if let Some(&(g, s)) = prefix.last() {
                        if g == gen && s == -sign {
                            continue;
                        }
                    }
                    let mut word = prefix.clone();
                    word.push((gen, sign));
                    next.push(word);
                }
            }
        }
        for letters in &next {
            out.push(
                FreeWord::from_blocks(alphabet, letters.iter().copied())
                    .expect("reduced enumeration cannot overflow"),
            );
        }
        frontier = next;
    }
    out
}
