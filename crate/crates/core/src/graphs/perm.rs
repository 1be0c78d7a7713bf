//! Permutation action of the free group on the vertices of a finite cover.

use super::FiniteCover;
use crate::words::{Alphabet, FreeWord};
use crate::Error;

/// A permutation of `{0, …, n-1}` in one-line notation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Perm {
    map: Vec<u32>,
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm {
            map: (0..degree as u32).collect(),
        }
    }

    /// Validates that `map` is a bijection.
    pub fn new(map: Vec<u32>) -> Result<Perm, Error> {
        let mut seen = vec![false; map.len()];
        for &x in &map {
            if x as usize >= map.len() || seen[x as usize] {
                return Err(Error::InvalidInput(format!("not a permutation: image {x}")));
            }
            seen[x as usize] = true;
        }
        Ok(Perm { map })
    }

    pub fn degree(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, v: u32) -> u32 {
        self.map[v as usize]
    }

    pub fn one_line(&self) -> &[u32] {
        &self.map
    }

    /// `self` first, `other` second.
    pub fn then(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            map: self.map.iter().map(|&x| other.map[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut map = vec![0u32; self.map.len()];
        for (i, &x) in self.map.iter().enumerate() {
            map[x as usize] = i as u32;
        }
        Perm { map }
    }

    /// Integer power by repeated squaring; negative exponents invert first.
    pub fn pow(&self, k: i64) -> Perm {
        let mut base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Perm::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }
}

/// The coset permutation representation attached to a finite cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermRep {
    alphabet: Alphabet,
    basepoint: u32,
    perms: Vec<Perm>,
}

impl PermRep {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn basepoint(&self) -> u32 {
        self.basepoint
    }

    pub fn degree(&self) -> usize {
        self.perms.first().map_or(0, Perm::degree)
    }

    pub fn generator(&self, gen: usize) -> &Perm {
        &self.perms[gen]
    }

    /// Image of a word under the representation, multiplying block powers.
    pub fn image(&self, w: &FreeWord) -> Result<Perm, Error> {
        if w.alphabet() != &self.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        let mut acc = Perm::identity(self.degree());
        for b in w.blocks() {
            acc = acc.then(&self.perms[b.gen].pow(b.exp));
        }
        Ok(acc)
    }

    /// Whether the image of `w` fixes the basepoint, i.e. `w` lies in the
    /// subgroup the cover recognizes.
    pub fn fixes_basepoint(&self, w: &FreeWord) -> Result<bool, Error> {
        Ok(self.image(w)?.apply(self.basepoint) == self.basepoint)
    }
}

pub(super) fn from_cover(cover: &FiniteCover) -> PermRep {
    let graph = cover.graph();
    let rank = graph.alphabet().rank();
    let n = graph.vertex_count();
    let perms = (0..rank)
        .map(|g| {
            let map = (0..n as u32)
                .map(|v| graph.step(v, g, true).expect("cover is complete"))
                .collect();
            Perm { map }
        })
        .collect();
    PermRep {
        alphabet: graph.alphabet().clone(),
        basepoint: graph.basepoint(),
        perms,
    }
}
