//! The double of the free group along the tower subgroup: two copies of the
//! same free group glued by identifying the subgroup with itself. Elements
//! are alternating syllable sequences; the normal form theorem makes
//! triviality decidable from a membership oracle for the glued subgroup.

use crate::example::SquaringSystem;
use crate::words::{Alphabet, Endomorphism, FreeWord};
use crate::Error;
use std::fmt;

/// Which copy of the free group a syllable lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Decides membership in the glued subgroup. The squaring system's tower
/// subgroup is the canonical instance; closures serve as test doubles.
pub trait MembershipOracle {
    fn member(&self, w: &FreeWord) -> Result<bool, Error>;
}

impl MembershipOracle for SquaringSystem {
    fn member(&self, w: &FreeWord) -> Result<bool, Error> {
        self.tower_contains(w)
    }
}

impl<F> MembershipOracle for F
where
    F: Fn(&FreeWord) -> Result<bool, Error>,
{
    fn member(&self, w: &FreeWord) -> Result<bool, Error> {
        self(w)
    }
}

/// An element of the double in normal form: no identity syllables, adjacent
/// syllables on distinct sides, no syllable in the glued subgroup unless it
/// is the only one (then its side is canonically Left). The empty sequence
/// is the group identity.
///
/// Structural equality compares normal forms, which distinguishes some equal
/// group elements (subgroup elements can shift across a juncture); use
/// [`DoubleElement::equals`] for group equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleElement {
    syllables: Vec<(Side, FreeWord)>,
}

impl DoubleElement {
    pub fn identity() -> DoubleElement {
        DoubleElement {
            syllables: Vec::new(),
        }
    }

    /// Reduces a raw syllable sequence to normal form: drops identity
    /// syllables, merges same-side neighbors, and moves syllables lying in
    /// the glued subgroup across junctures until none remain inside.
    pub fn normalize<O: MembershipOracle + ?Sized>(
        raw: Vec<(Side, FreeWord)>,
        oracle: &O,
    ) -> Result<DoubleElement, Error> {
        let mut stack: Vec<(Side, FreeWord)> = Vec::new();
        for (side, word) in raw {
            push_syllable(&mut stack, side, word, oracle)?;
        }
        Ok(DoubleElement { syllables: stack })
    }

    pub fn syllables(&self) -> &[(Side, FreeWord)] {
        &self.syllables
    }

    pub fn is_trivial(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn multiply<O: MembershipOracle + ?Sized>(
        &self,
        other: &DoubleElement,
        oracle: &O,
    ) -> Result<DoubleElement, Error> {
        let mut stack = self.syllables.clone();
        for (side, word) in &other.syllables {
            push_syllable(&mut stack, *side, word.clone(), oracle)?;
        }
        Ok(DoubleElement { syllables: stack })
    }

    /// Inverse: reversed syllables, inverted words. Normal form is preserved
    /// without consulting the oracle.
    pub fn invert(&self) -> DoubleElement {
        let syllables = self
            .syllables
            .iter()
            .rev()
            .map(|(s, w)| (*s, w.inverse()))
            .collect();
        DoubleElement { syllables }
    }

    /// Group equality: the difference normalizes to the identity.
    pub fn equals<O: MembershipOracle + ?Sized>(
        &self,
        other: &DoubleElement,
        oracle: &O,
    ) -> Result<bool, Error> {
        Ok(self.multiply(&other.invert(), oracle)?.is_trivial())
    }

    /// The endomorphism induced on the double by applying `endo` to every
    /// syllable word on both sides; well defined whenever `endo` maps the
    /// glued subgroup into itself.
    pub fn apply_induced<O: MembershipOracle + ?Sized>(
        &self,
        endo: &Endomorphism,
        oracle: &O,
    ) -> Result<DoubleElement, Error> {
        let mut raw = Vec::with_capacity(self.syllables.len());
        for (side, word) in &self.syllables {
            raw.push((*side, endo.apply(word)?));
        }
        Self::normalize(raw, oracle)
    }

    /// The retraction onto one free-group copy: forget sides and multiply.
    pub fn retract(&self, alphabet: &Alphabet) -> Result<FreeWord, Error> {
        let mut acc = alphabet.identity();
        for (_, word) in &self.syllables {
            acc = acc.concat(word)?;
        }
        Ok(acc)
    }

    /// Parses the bracket grammar and normalizes: terms `[word]` for the
    /// left copy and `[word]'` for the right, joined by `*`; empty input is
    /// the identity.
    pub fn parse<O: MembershipOracle + ?Sized>(
        alphabet: &Alphabet,
        text: &str,
        oracle: &O,
    ) -> Result<DoubleElement, Error> {
        Self::normalize(parse_raw(alphabet, text)?, oracle)
    }
}

impl fmt::Display for DoubleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (side, word)) in self.syllables.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            write!(f, "[{word}]")?;
            if *side == Side::Right {
                write!(f, "'")?;
            }
        }
        Ok(())
    }
}

fn push_syllable<O: MembershipOracle + ?Sized>(
    stack: &mut Vec<(Side, FreeWord)>,
    side: Side,
    word: FreeWord,
    oracle: &O,
) -> Result<(), Error> {
    let mut side = side;
    let mut word = word;
    loop {
        if word.is_identity() {
            return Ok(());
        }
        let Some((top_side, top_word)) = stack.last() else {
            if oracle.member(&word)? {
                side = Side::Left;
            }
            stack.push((side, word));
            return Ok(());
        };
        let same_side = *top_side == side;
        let word_glued = !same_side && oracle.member(&word)?;
        // a lone stack entry may still lie in the glued subgroup
        let top_glued = !same_side && !word_glued && stack.len() == 1 && oracle.member(top_word)?;
        if !(same_side || word_glued || top_glued) {
            stack.push((side, word));
            return Ok(());
        }
        let (top_side, top_word) = stack.pop().expect("nonempty");
        if !top_glued {
            side = top_side;
        }
        word = top_word.concat(&word)?;
    }
}

pub(crate) fn parse_raw(alphabet: &Alphabet, text: &str) -> Result<Vec<(Side, FreeWord)>, Error> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let mut syllables = Vec::new();
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    skip_ws(&mut pos);
    while pos < bytes.len() {
        if !syllables.is_empty() {
            if bytes[pos] != b'*' {
                return Err(Error::Parse {
                    position: pos,
                    message: "expected '*'".into(),
                });
            }
            pos += 1;
            skip_ws(&mut pos);
        }
        if pos >= bytes.len() || bytes[pos] != b'[' {
            return Err(Error::Parse {
                position: pos,
                message: "expected '['".into(),
            });
        }
        let start = pos + 1;
        let end = text[start..]
            .find(']')
            .map(|i| start + i)
            .ok_or(Error::Parse {
                position: pos,
                message: "unclosed '['".into(),
            })?;
        let word = alphabet.parse_word(&text[start..end])?;
        pos = end + 1;
        let side = if pos < bytes.len() && bytes[pos] == b'\'' {
            pos += 1;
            Side::Right
        } else {
            Side::Left
        };
        syllables.push((side, word));
        skip_ws(&mut pos);
    }
    Ok(syllables)
}

/// The level-`n` witness `probe(n)⁻¹ · probe(n)′` that the kernels of the
/// iterated induced endomorphism grow strictly: its `n`-th image is trivial,
/// its `(n-1)`-th is not. Both facts are checked before returning.
pub fn kernel_witness(system: &SquaringSystem, n: u32) -> Result<DoubleElement, Error> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "witness level must be at least 1".into(),
        ));
    }
    let probe = system.probe(n);
    let witness = DoubleElement::normalize(
        vec![(Side::Left, probe.inverse()), (Side::Right, probe)],
        system,
    )?;
    let endo = system.squaring();
    let mut image = witness.clone();
    for _ in 0..n - 1 {
        image = image.apply_induced(endo, system)?;
    }
    if image.is_trivial() {
        return Err(Error::CertificationFailed {
            fact: format!("witness level {n} died after {} steps", n - 1),
        });
    }
    image = image.apply_induced(endo, system)?;
    if !image.is_trivial() {
        return Err(Error::CertificationFailed {
            fact: format!("witness level {n} survived {n} steps"),
        });
    }
    Ok(witness)
}
