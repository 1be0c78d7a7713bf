//! Nontriviality certificates for elements of the double. A certificate
//! embeds a finite cover of the free group in which the element's syllables
//! visibly survive, plus the membership facts that make the conclusion sound;
//! `check` re-derives every fact from the embedded data alone.
//!
//! A lone syllable survives in the coset action of any finite-index subgroup
//! excluding it. An alternating product needs the cover to contain the glued
//! subgroup while excluding every syllable: then each syllable stays outside
//! the glued subgroup's image, so the product is a nontrivial normal form in
//! an amalgam of finite groups.

use crate::double::{parse_raw, DoubleElement, Side};
use crate::example::SquaringSystem;
use crate::graphs::{CoreGraph, FiniteCover, Perm};
use crate::words::{Alphabet, FreeWord};
use crate::Error;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertCase {
    AmalgamSyllable,
    AlternatingProduct,
}

/// One re-checkable assertion about the embedded cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact {
    pub kind: String,
    pub word: String,
    pub expected: bool,
    pub observed: bool,
}

impl Fact {
    fn new(kind: &str, word: String, observed: bool) -> Fact {
        Fact {
            kind: kind.into(),
            word,
            expected: true,
            observed,
        }
    }
}

/// A finite cover in portable form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverRecord {
    pub vertices: u32,
    pub basepoint: u32,
    pub edges: Vec<(u32, String, u32)>,
}

impl CoverRecord {
    fn of(cover: &FiniteCover) -> CoverRecord {
        let graph = cover.graph();
        let edges = graph
            .edges()
            .map(|(src, gen, dst)| (src, graph.alphabet().symbol(gen).to_string(), dst))
            .collect();
        CoverRecord {
            vertices: graph.vertex_count() as u32,
            basepoint: graph.basepoint(),
            edges,
        }
    }

    fn rebuild(&self, alphabet: &Alphabet) -> Result<FiniteCover, Error> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for (src, gen, dst) in &self.edges {
            let mut chars = gen.chars();
            let (Some(c), None) = (chars.next(), chars.next()) else {
                return Err(Error::MalformedCertificate(format!(
                    "bad generator label '{gen}'"
                )));
            };
            let idx = alphabet
                .index_of(c)
                .ok_or_else(|| Error::MalformedCertificate(format!("unknown generator '{c}'")))?;
            edges.push((*src, idx, *dst));
        }
        let graph = CoreGraph::from_edges(alphabet, self.vertices, self.basepoint, &edges)
            .map_err(|e| Error::MalformedCertificate(e.to_string()))?;
        if !graph.is_connected() {
            return Err(Error::MalformedCertificate("cover is not connected".into()));
        }
        FiniteCover::try_new(graph)
            .map_err(|_| Error::MalformedCertificate("cover is not complete".into()))
    }
}

/// Self-contained witness that an element of the double is nontrivial.
/// Field order is the serialization contract.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub case: CertCase,
    pub element: String,
    #[serde(rename = "M")]
    pub m: u32,
    pub covers: Vec<CoverRecord>,
    pub perm_images: BTreeMap<String, Vec<u32>>,
    pub facts: Vec<Fact>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("serializable");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Certificate, Error> {
        serde_json::from_str(text).map_err(|e| Error::MalformedCertificate(e.to_string()))
    }

    /// Index of the embedded cover.
    pub fn index(&self) -> u32 {
        self.covers.first().map_or(0, |c| c.vertices)
    }
}

/// Builds the certificate for a nontrivial element: a lone syllable is
/// excluded from a completion of the trivial subgroup; an alternating
/// product is excluded syllable-wise from a completion of the glued
/// subgroup's approximation at one uniform level (the longest syllable plus
/// one, raised until every syllable falls outside the approximation).
pub fn certify(
    system: &SquaringSystem,
    element: &DoubleElement,
    m_bound: u32,
) -> Result<Certificate, Error> {
    if element.is_trivial() {
        return Err(Error::TrivialElement);
    }
    let syllables = element.syllables();
    let words: Vec<FreeWord> = syllables.iter().map(|(_, w)| w.clone()).collect();
    let (case, cover, facts) = if words.len() == 1 {
        let word = &words[0];
        let cover = CoreGraph::trivial(system.alphabet())
            .hall_complete(std::slice::from_ref(word), system.max_vertices())?;
        let facts = vec![
            Fact::new("complete", String::new(), cover.graph().is_complete()),
            Fact::new("moves-basepoint", word.to_string(), !cover.contains(word)),
        ];
        (CertCase::AmalgamSyllable, cover, facts)
    } else {
        let mut level = words.iter().map(|w| w.len()).max().unwrap() as u32 + 1;
        let base = loop {
            let base = system.approx_graph(level)?;
            if words.iter().all(|w| !base.contains(w)) {
                break base;
            }
            level += 1;
            if level > 64 {
                return Err(Error::CertificationFailed {
                    fact: "no approximation level excludes every syllable".into(),
                });
            }
        };
        let cover = base.hall_complete(&words, system.max_vertices())?;
        let mut facts = vec![Fact::new(
            "complete",
            String::new(),
            cover.graph().is_complete(),
        )];
        for word in &words {
            facts.push(Fact::new(
                "syllable-excluded",
                word.to_string(),
                !cover.contains(word),
            ));
        }
        for gen in system.approx_generators(level)? {
            facts.push(Fact::new(
                "hr-generator-contained",
                gen.to_string(),
                cover.contains(&gen),
            ));
        }
        for m in 0..=m_bound {
            let gen = system.tower_generator(m)?;
            facts.push(Fact::new(
                "h-generator-contained",
                gen.to_string(),
                cover.contains(&gen),
            ));
        }
        (CertCase::AlternatingProduct, cover, facts)
    };
    if let Some(bad) = facts.iter().find(|f| f.observed != f.expected) {
        return Err(Error::CertificationFailed {
            fact: format!("{} {}", bad.kind, bad.word),
        });
    }
    let rep = cover.perm_rep();
    let alphabet = system.alphabet();
    let perm_images = (0..alphabet.rank())
        .map(|g| {
            (
                alphabet.symbol(g).to_string(),
                rep.generator(g).one_line().to_vec(),
            )
        })
        .collect();
    Ok(Certificate {
        case,
        element: element.to_string(),
        m: m_bound,
        covers: vec![CoverRecord::of(&cover)],
        perm_images,
        facts,
    })
}

/// Re-verifies a certificate from its stored data alone: rebuilds the cover,
/// revalidates the permutation tables against it, re-derives the full fact
/// list the case demands, and recomputes every fact. Structural defects are
/// errors; a well-formed certificate whose facts do not hold yields false.
pub fn check(cert: &Certificate) -> Result<bool, Error> {
    let symbols: Vec<char> = cert
        .perm_images
        .keys()
        .map(|k| {
            let mut chars = k.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(Error::MalformedCertificate(format!(
                    "bad generator key '{k}'"
                ))),
            }
        })
        .collect::<Result<_, _>>()?;
    let alphabet =
        Alphabet::new(&symbols).map_err(|e| Error::MalformedCertificate(e.to_string()))?;
    let [record] = cert.covers.as_slice() else {
        return Err(Error::MalformedCertificate(
            "expected exactly one cover".into(),
        ));
    };
    let cover = record.rebuild(&alphabet)?;

    // the stored permutations must be permutations and must match the cover
    let rep = cover.perm_rep();
    for (sym, stored) in &cert.perm_images {
        let perm =
            Perm::new(stored.clone()).map_err(|e| Error::MalformedCertificate(e.to_string()))?;
        if perm.degree() != cover.index() {
            return Err(Error::MalformedCertificate(
                "permutation degree mismatch".into(),
            ));
        }
        let idx = alphabet.index_of(sym.chars().next().unwrap()).unwrap();
        if rep.generator(idx).one_line() != stored.as_slice() {
            return Ok(false);
        }
    }

    let raw = parse_raw(&alphabet, &cert.element)?;
    if raw.iter().any(|(_, w)| w.is_identity()) {
        return Err(Error::MalformedCertificate(
            "identity syllable in element".into(),
        ));
    }
    if raw.windows(2).any(|p| p[0].0 == p[1].0) {
        return Err(Error::MalformedCertificate(
            "element sides do not alternate".into(),
        ));
    }

    let expected_facts = expected_fact_words(cert, &alphabet, &raw)?;
    if cert.facts.len() != expected_facts.len() {
        return Err(Error::MalformedCertificate(
            "unexpected fact list shape".into(),
        ));
    }
    for (fact, (kind, word)) in cert.facts.iter().zip(&expected_facts) {
        if &fact.kind != kind || fact.word != *word {
            return Err(Error::MalformedCertificate(format!(
                "fact mismatch: have {} '{}', want {kind} '{word}'",
                fact.kind, fact.word
            )));
        }
        let recomputed = match kind.as_str() {
            "complete" => cover.graph().is_complete(),
            "syllable-excluded" => !cover.contains(&alphabet.parse_word(word)?),
            "hr-generator-contained" | "h-generator-contained" => {
                cover.contains(&alphabet.parse_word(word)?)
            }
            "moves-basepoint" => {
                let image = rep.image(&alphabet.parse_word(word)?)?;
                image.apply(rep.basepoint()) != rep.basepoint()
            }
            _ => unreachable!("kinds come from the expected list"),
        };
        if !fact.expected || fact.observed != recomputed || !recomputed {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The fact list a certificate of this shape must carry, as (kind, word)
/// pairs in order. Only word arithmetic — no graph construction.
fn expected_fact_words(
    cert: &Certificate,
    alphabet: &Alphabet,
    raw: &[(Side, FreeWord)],
) -> Result<Vec<(String, String)>, Error> {
    let mut expected: Vec<(String, String)> = vec![("complete".into(), String::new())];
    match cert.case {
        CertCase::AmalgamSyllable => {
            let [(_, word)] = raw else {
                return Err(Error::MalformedCertificate(
                    "amalgam-syllable element must have one syllable".into(),
                ));
            };
            expected.push(("moves-basepoint".into(), word.to_string()));
        }
        CertCase::AlternatingProduct => {
            if raw.len() < 2 {
                return Err(Error::MalformedCertificate(
                    "alternating-product element needs at least two syllables".into(),
                ));
            }
            if alphabet.rank() != 2 || alphabet.symbol(0) != 'a' || alphabet.symbol(1) != 't' {
                return Err(Error::MalformedCertificate(
                    "alternating-product certificates use the a,t alphabet".into(),
                ));
            }
            for (_, word) in raw {
                expected.push(("syllable-excluded".into(), word.to_string()));
            }
            let hr_count = cert
                .facts
                .iter()
                .filter(|f| f.kind == "hr-generator-contained")
                .count();
            if hr_count < 2 {
                return Err(Error::MalformedCertificate(
                    "approximation generator facts missing".into(),
                ));
            }
            let level = hr_count as u32 - 2;
            let system = SquaringSystem::new();
            for gen in system
                .approx_generators(level)
                .map_err(|e| Error::MalformedCertificate(e.to_string()))?
            {
                expected.push(("hr-generator-contained".into(), gen.to_string()));
            }
            for m in 0..=cert.m {
                let gen = system
                    .tower_generator(m)
                    .map_err(|e| Error::MalformedCertificate(e.to_string()))?;
                expected.push(("h-generator-contained".into(), gen.to_string()));
            }
        }
    }
    Ok(expected)
}
