//! The worked instance everything else is verified against: the rank-2 free
//! group on `a`, `t`, the squaring endomorphism `a ↦ a², t ↦ t`, the tower
//! subgroup generated by all `tᵐ a^(2^m) t⁻ᵐ`, and its finite approximations
//! obtained by closing the `t`-ray into a cycle.

use crate::graphs::{balls_isomorphic, CoreGraph, DEFAULT_MAX_VERTICES};
use crate::report::Report;
use crate::words::{reduced_words, Alphabet, Endomorphism, FreeWord};
use crate::Error;

/// The ambient data: alphabet, squaring endomorphism, and a vertex budget for
/// every graph this system constructs.
#[derive(Clone, Debug)]
pub struct SquaringSystem {
    alphabet: Alphabet,
    squaring: Endomorphism,
    max_vertices: u64,
}

impl Default for SquaringSystem {
    fn default() -> Self {
        Self::new()
    }
}

impl SquaringSystem {
    pub fn new() -> SquaringSystem {
        Self::with_max_vertices(DEFAULT_MAX_VERTICES)
    }

    pub fn with_max_vertices(max_vertices: u64) -> SquaringSystem {
        let alphabet = Alphabet::new(&['a', 't']).expect("distinct symbols");
        let a2 = alphabet.parse_word("a^2").unwrap();
        let t = alphabet.parse_word("t").unwrap();
        let squaring = Endomorphism::new(&alphabet, vec![a2, t]).expect("images over alphabet");
        SquaringSystem {
            alphabet,
            squaring,
            max_vertices,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// The endomorphism `a ↦ a², t ↦ t`.
    pub fn squaring(&self) -> &Endomorphism {
        &self.squaring
    }

    pub fn max_vertices(&self) -> u64 {
        self.max_vertices
    }

    fn gen_a(&self) -> FreeWord {
        self.alphabet.parse_word("a").unwrap()
    }

    fn gen_t(&self) -> FreeWord {
        self.alphabet.parse_word("t").unwrap()
    }

    /// Level-`m` generator of the tower subgroup: `tᵐ a^(2^m) t⁻ᵐ`.
    pub fn tower_generator(&self, m: u32) -> Result<FreeWord, Error> {
        if m >= 63 {
            return Err(Error::ExponentOverflow);
        }
        let inner = self.gen_a().power(1i64 << m)?;
        inner.conjugate_by(&self.gen_t().power(m as i64)?)
    }

    /// The conjugated generator `tⁿ a t⁻ⁿ` whose squaring orbit probes the
    /// tower level by level.
    pub fn probe(&self, n: u32) -> FreeWord {
        self.gen_a()
            .conjugate_by(&self.gen_t().power(n as i64).unwrap())
            .unwrap()
    }

    /// Highest `t`-level a lift of `w` starting at the basepoint can reach:
    /// the maximum prefix sum of `t`-exponents, clamped at 0.
    pub fn t_height(&self, w: &FreeWord) -> u32 {
        let t = 1usize;
        let mut level: i64 = 0;
        let mut high: i64 = 0;
        for b in w.blocks() {
            if b.gen == t {
                high = high.max(level + b.exp.max(0));
                level += b.exp;
            }
        }
        high as u32
    }

    /// The tower subgroup's graph truncated at `t`-level `level`: a `t`-ray
    /// with an `a`-cycle of length `2^j` through the level-`j` vertex.
    pub fn tower_core(&self, level: u32) -> Result<TowerCore, Error> {
        vertex_budget(level, self.max_vertices)?;
        let rank = self.alphabet.rank();
        let total = (1usize << (level + 1)) - 1;
        let mut fwd: Vec<Option<u32>> = vec![None; total * rank];
        let mut bwd: Vec<Option<u32>> = vec![None; total * rank];
        let mut next = level + 1;
        for j in 0..=level {
            if j < level {
                set_edge(&mut fwd, &mut bwd, rank, j, 1, j + 1);
            }
            next = attach_a_cycle(&mut fwd, &mut bwd, rank, j, j, next);
        }
        debug_assert_eq!(next as usize, total);
        let graph = CoreGraph::from_tables_canonical(&self.alphabet, 0, &fwd, &bwd);
        Ok(TowerCore { level, graph })
    }

    /// Membership in the tower subgroup. A reduced closed lift stays between
    /// `t`-levels 0 and `t_height(w)`, so the truncated core at that level
    /// decides membership exactly.
    pub fn tower_contains(&self, w: &FreeWord) -> Result<bool, Error> {
        if w.alphabet() != &self.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        if w.is_identity() {
            return Ok(true);
        }
        let core = self.tower_core(self.t_height(w))?;
        Ok(core.graph().contains(w))
    }

    /// Generators of the level-`r` approximation: the tower generators up to
    /// level `r` together with `t^(r+1)`.
    pub fn approx_generators(&self, r: u32) -> Result<Vec<FreeWord>, Error> {
        let mut gens = Vec::with_capacity(r as usize + 2);
        for m in 0..=r {
            gens.push(self.tower_generator(m)?);
        }
        gens.push(self.gen_t().power(r as i64 + 1)?);
        Ok(gens)
    }

    /// Folded subgroup graph of the level-`r` approximation.
    pub fn approx_graph(&self, r: u32) -> Result<CoreGraph, Error> {
        CoreGraph::from_generators(
            &self.alphabet,
            &self.approx_generators(r)?,
            self.max_vertices,
        )
    }

    /// The same graph built directly, no folding: `t`-cycle of length `r+1`
    /// with an `a`-cycle of length `2^j` through the level-`j` vertex.
    pub fn approx_core(&self, r: u32) -> Result<CoreGraph, Error> {
        vertex_budget(r, self.max_vertices)?;
        let rank = self.alphabet.rank();
        let total = (1usize << (r + 1)) - 1;
        let mut fwd: Vec<Option<u32>> = vec![None; total * rank];
        let mut bwd: Vec<Option<u32>> = vec![None; total * rank];
        let mut next = r + 1;
        for j in 0..=r {
            set_edge(&mut fwd, &mut bwd, rank, j, 1, (j + 1) % (r + 1));
            next = attach_a_cycle(&mut fwd, &mut bwd, rank, j, j, next);
        }
        debug_assert_eq!(next as usize, total);
        Ok(CoreGraph::from_tables_canonical(
            &self.alphabet,
            0,
            &fwd,
            &bwd,
        ))
    }

    /// Rewrites the level-`m` tower generator inside the level-`r`
    /// approximation: with `m = q(r+1) + b`, the identity
    /// `tᵐ a^(2^m) t⁻ᵐ = (t^(r+1))^q (t^b a^(2^b) t⁻^b)^(2^(q(r+1))) (t^(r+1))⁻^q`.
    pub fn decompose_tower_generator(&self, m: u32, r: u32) -> Result<TowerDecomposition, Error> {
        let q = m / (r + 1);
        let b = m % (r + 1);
        let shift = q as u64 * (r as u64 + 1);
        if shift >= 63 {
            return Err(Error::ExponentOverflow);
        }
        let outer = self.gen_t().power((r as i64 + 1) * q as i64)?;
        let middle = self.tower_generator(b)?.power(1i64 << shift)?;
        let factors = [outer.clone(), middle.clone(), outer.inverse()];
        let product = factors[0].concat(&factors[1])?.concat(&factors[2])?;
        let target = self.tower_generator(m)?;
        let matches = product == target;
        let contained = self.approx_graph(r)?.contains(&target);
        Ok(TowerDecomposition {
            quotient: q,
            remainder: b,
            factors,
            product,
            matches,
            contained,
        })
    }

    /// Checks that squaring sends each tower generator to its own square
    /// (word identity) and that the image stays in the tower subgroup.
    pub fn verify_squaring_invariance(&self, max_m: u32) -> Result<Report, Error> {
        let mut report = Report::new("squaring-invariance");
        for m in 0..=max_m {
            let gen = self.tower_generator(m)?;
            let image = self.squaring.apply(&gen)?;
            let square = gen.power(2)?;
            let word_ok = image == square;
            let member_ok = self.tower_contains(&image)?;
            report.push(
                format!("m={m}"),
                word_ok && member_ok,
                format!("image {image}, square matches: {word_ok}, in tower: {member_ok}"),
            );
        }
        Ok(report)
    }

    /// Checks the strict-growth witnesses: the `n`-fold square image of the
    /// level-`n` probe lies in the tower, the `(n-1)`-fold image does not.
    pub fn verify_strict_increase(&self, max_n: u32) -> Result<Report, Error> {
        let mut report = Report::new("strict-increase");
        for n in 1..=max_n {
            let probe = self.probe(n);
            let landed = self.squaring.iterate(n, &probe)?;
            let short = self.squaring.iterate(n - 1, &probe)?;
            let in_ok = self.tower_contains(&landed)?;
            let out_ok = !self.tower_contains(&short)?;
            report.push(
                format!("n={n}"),
                in_ok && out_ok,
                format!("{landed} in tower: {in_ok}; {short} out: {out_ok}"),
            );
        }
        Ok(report)
    }

    /// Exhaustively compares tower membership against the level-`|w|+1`
    /// approximation for every reduced word of length 1..=`max_len`.
    pub fn verify_membership_agreement(&self, max_len: u32) -> Result<Report, Error> {
        let mut report = Report::new("membership-agreement");
        if max_len == 0 {
            return Ok(report);
        }
        let approx: Vec<CoreGraph> = (0..=max_len + 1)
            .map(|r| self.approx_graph(r))
            .collect::<Result<_, _>>()?;
        let mut by_len: Vec<(usize, Option<FreeWord>)> = vec![(0, None); max_len as usize + 1];
        for word in reduced_words(&self.alphabet, max_len) {
            if word.is_identity() {
                continue;
            }
            let len = word.len() as usize;
            let in_tower = self.tower_contains(&word)?;
            let in_approx = approx[len + 1].contains(&word);
            by_len[len].0 += 1;
            if in_tower != in_approx && by_len[len].1.is_none() {
                by_len[len].1 = Some(word);
            }
        }
        for (len, (count, disagreement)) in by_len.iter().enumerate().skip(1) {
            report.push(
                format!("len={len}"),
                disagreement.is_none(),
                match disagreement {
                    Some(w) => format!("disagrees on {w}"),
                    None => format!("{count} words agree"),
                },
            );
        }
        Ok(report)
    }

    /// Smallest offset `d` such that tower membership equals membership in
    /// the level-`|w|+d` approximation for every reduced word up to
    /// `max_len`, or None if no offset up to `max_delta` works.
    pub fn minimal_agreement_offset(
        &self,
        max_len: u32,
        max_delta: u32,
    ) -> Result<Option<u32>, Error> {
        let words: Vec<(FreeWord, bool)> = reduced_words(&self.alphabet, max_len)
            .into_iter()
            .filter(|w| !w.is_identity())
            .map(|w| {
                let t = self.tower_contains(&w)?;
                Ok((w, t))
            })
            .collect::<Result<_, Error>>()?;
        'delta: for delta in 0..=max_delta {
            let approx: Vec<CoreGraph> = (0..=max_len + delta)
                .map(|r| self.approx_graph(r))
                .collect::<Result<_, _>>()?;
            for (w, in_tower) in &words {
                if approx[w.len() as usize + delta as usize].contains(w) != *in_tower {
                    continue 'delta;
                }
            }
            return Ok(Some(delta));
        }
        Ok(None)
    }

    /// Whether the radius-`n` balls of the tree completions of the tower core
    /// and the level-`n+1` approximation are isomorphic.
    pub fn balls_agree_at(&self, n: u32) -> Result<bool, Error> {
        let tower = self.tower_core(n + 2)?;
        let approx = self.approx_core(n + 1)?;
        balls_isomorphic(&tower.graph().ball(n), &approx.ball(n))
    }

    /// Smallest approximation level `r ≤ r_max` whose radius-`n` ball matches
    /// the tower core's, or None.
    pub fn minimal_ball_agreement_level(&self, n: u32, r_max: u32) -> Result<Option<u32>, Error> {
        let tower_ball = self.tower_core(n + 2)?.graph().ball(n);
        for r in 0..=r_max {
            if balls_isomorphic(&tower_ball, &self.approx_core(r)?.ball(n))? {
                return Ok(Some(r));
            }
        }
        Ok(None)
    }
}

/// Truncation of the tower subgroup's graph at a fixed `t`-level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerCore {
    level: u32,
    graph: CoreGraph,
}

impl TowerCore {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn graph(&self) -> &CoreGraph {
        &self.graph
    }
}

/// The three-factor rewriting of a tower generator inside an approximation,
/// together with the verification outcomes.
#[derive(Clone, Debug)]
pub struct TowerDecomposition {
    pub quotient: u32,
    pub remainder: u32,
    pub factors: [FreeWord; 3],
    pub product: FreeWord,
    /// product equals the tower generator as a reduced word
    pub matches: bool,
    /// the tower generator lifts closed in the approximation graph
    pub contained: bool,
}

impl TowerDecomposition {
    pub fn verified(&self) -> bool {
        self.matches && self.contained
    }
}

fn vertex_budget(level: u32, max_vertices: u64) -> Result<u64, Error> {
    let needed = if level >= 63 {
        u64::MAX
    } else {
        (1u64 << (level + 1)) - 1
    };
    if needed > max_vertices {
        return Err(Error::ResourceLimit {
            needed,
            limit: max_vertices,
        });
    }
    Ok(needed)
}

fn set_edge(
    fwd: &mut [Option<u32>],
    bwd: &mut [Option<u32>],
    rank: usize,
    src: u32,
    gen: usize,
    dst: u32,
) {
    fwd[src as usize * rank + gen] = Some(dst);
    bwd[dst as usize * rank + gen] = Some(src);
}

/// Threads an `a`-cycle of length `2^j` through `anchor`, allocating fresh
/// vertices from `next`; returns the next free id.
fn attach_a_cycle(
    fwd: &mut [Option<u32>],
    bwd: &mut [Option<u32>],
    rank: usize,
    anchor: u32,
    j: u32,
    mut next: u32,
) -> u32 {
    let len = 1u64 << j;
    let mut prev = anchor;
    for _ in 1..len {
        set_edge(fwd, bwd, rank, prev, 0, next);
        prev = next;
        next += 1;
    }
    set_edge(fwd, bwd, rank, prev, 0, anchor);
    next
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys() -> SquaringSystem {
        SquaringSystem::new()
    }

    fn w(text: &str) -> FreeWord {
        sys().alphabet().parse_word(text).unwrap()
    }

    #[test]
    fn tower_generators_in_block_form() {
        let s = sys();
        assert_eq!(s.tower_generator(0).unwrap(), w("a"));
        assert_eq!(s.tower_generator(2).unwrap(), w("t^2 a^4 t^-2"));
        assert_eq!(s.tower_generator(10).unwrap(), w("t^10 a^1024 t^-10"));
        assert_eq!(s.tower_generator(63), Err(Error::ExponentOverflow));
    }

    #[test]
    fn probes_are_conjugated_generators() {
        let s = sys();
        assert_eq!(s.probe(1), w("t a t^-1"));
        assert_eq!(s.probe(3), w("t^3 a t^-3"));
        assert_eq!(s.probe(2).inverse(), w("t^2 a^-1 t^-2"));
    }

    #[test]
    fn t_height_tracks_prefix_maxima() {
        let s = sys();
        assert_eq!(s.t_height(&w("a")), 0);
        assert_eq!(s.t_height(&w("t^3 a t^-3")), 3);
        assert_eq!(s.t_height(&w("t^-2 a t^2")), 0);
        assert_eq!(s.t_height(&w("t^2 a t^-1 a t^3")), 4);
        assert_eq!(s.t_height(&w("t^5 a^1000000 t^-5")), 5);
    }

    #[test]
    fn tower_core_counts() {
        let s = sys();
        let c0 = s.tower_core(0).unwrap();
        assert_eq!((c0.graph().vertex_count(), c0.graph().edge_count()), (1, 1));
        let c2 = s.tower_core(2).unwrap();
        assert_eq!((c2.graph().vertex_count(), c2.graph().edge_count()), (7, 9));
        let c3 = s.tower_core(3).unwrap();
        assert_eq!(
            (c3.graph().vertex_count(), c3.graph().edge_count()),
            (15, 18)
        );
        for level in 0..=6u32 {
            let c = s.tower_core(level).unwrap();
            assert_eq!(c.graph().vertex_count() as u64, (1u64 << (level + 1)) - 1);
        }
    }

    #[test]
    fn tower_core_respects_the_vertex_budget() {
        let s = SquaringSystem::with_max_vertices(127);
        assert!(s.tower_core(6).is_ok());
        assert_eq!(
            s.tower_core(7),
            // needed = 2^8 - 1
            Err(Error::ResourceLimit {
                needed: 255,
                limit: 127
            })
        );
    }

    #[test]
    fn tower_membership_matches_known_elements() {
        let s = sys();
        assert!(s.tower_contains(&w("a")).unwrap());
        assert!(s.tower_contains(&w("t^2 a^4 t^-2")).unwrap());
        assert!(s.tower_contains(&w("t a^2 t^-1")).unwrap());
        assert!(!s.tower_contains(&w("t^3 a^4 t^-3")).unwrap());
        assert!(!s.tower_contains(&w("t a t^-1")).unwrap());
        assert!(!s.tower_contains(&w("t")).unwrap());
        assert!(s.tower_contains(&s.alphabet().identity()).unwrap());
        // products of generators stay inside
        let p = s
            .tower_generator(1)
            .unwrap()
            .concat(&s.tower_generator(3).unwrap().inverse())
            .unwrap();
        assert!(s.tower_contains(&p).unwrap());
    }

    #[test]
    fn approximation_graphs() {
        let s = sys();
        let g0 = s.approx_graph(0).unwrap();
        assert_eq!((g0.vertex_count(), g0.edge_count()), (1, 2));
        let g2 = s.approx_graph(2).unwrap();
        assert_eq!((g2.vertex_count(), g2.edge_count()), (7, 10));
        assert!(s.approx_graph(3).unwrap().contains(&w("t^4")));
        assert!(!g2.contains(&w("t")));
        assert!(g2.contains(&w("t^3")));
        assert!(g2.contains(&w("t^2 a^4 t^-2")));
    }

    #[test]
    fn direct_and_folded_approximations_coincide() {
        let s = sys();
        let c3 = s.approx_core(3).unwrap();
        assert_eq!((c3.vertex_count(), c3.edge_count()), (15, 19));
        let c0 = s.approx_core(0).unwrap();
        assert_eq!((c0.vertex_count(), c0.edge_count()), (1, 2));
        for r in 0..=4 {
            let folded = s.approx_graph(r).unwrap();
            let direct = s.approx_core(r).unwrap();
            assert!(folded.rooted_isomorphic(&direct), "level {r}");
            assert_eq!(folded, direct, "canonical forms at level {r}");
        }
    }

    #[test]
    fn decomposition_identity() {
        let s = sys();
        let d = s.decompose_tower_generator(5, 2).unwrap();
        assert_eq!((d.quotient, d.remainder), (1, 2));
        assert_eq!(d.factors[0], w("t^3"));
        assert_eq!(d.factors[1], w("t^2 a^32 t^-2"));
        assert_eq!(d.product, w("t^5 a^32 t^-5"));
        assert!(d.verified());

        let d = s.decompose_tower_generator(2, 2).unwrap();
        assert_eq!((d.quotient, d.remainder), (0, 2));
        assert!(d.factors[0].is_identity());
        assert_eq!(d.factors[1], w("t^2 a^4 t^-2"));
        assert!(d.verified());

        let d = s.decompose_tower_generator(7, 2).unwrap();
        assert_eq!((d.quotient, d.remainder), (2, 1));
        assert_eq!(d.factors[1], w("t a^128 t^-1"));
        assert_eq!(d.product, w("t^7 a^128 t^-7"));
        assert!(d.verified());
    }

    #[test]
    fn squaring_invariance_small() {
        let report = sys().verify_squaring_invariance(4).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.checks.len(), 5);
    }

    #[test]
    fn strict_increase_small() {
        let report = sys().verify_strict_increase(4).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn membership_agreement_small() {
        let report = sys().verify_membership_agreement(3).unwrap();
        assert!(report.passed(), "{report}");
        // 4·3^(k-1) reduced words of each length k
        assert!(report.to_string().contains("4 words agree"));
        assert!(report.to_string().contains("12 words agree"));
        assert!(report.to_string().contains("36 words agree"));
    }

    #[test]
    fn ball_agreement_holds_only_for_low_radius() {
        let s = sys();
        assert!(s.balls_agree_at(0).unwrap());
        assert!(s.balls_agree_at(1).unwrap());
        // at radius 2 the approximation's t-cycle of length 3 closes a square
        // that the tower's ray cannot: 7 vertices against 8
        let tower_ball = s.tower_core(4).unwrap().graph().ball(2);
        let approx_ball = s.approx_core(3).unwrap().ball(2);
        assert_eq!(tower_ball.vertex_count(), 8);
        assert_eq!(approx_ball.vertex_count(), 7);
        assert!(!s.balls_agree_at(2).unwrap());
    }

    #[test]
    fn minimal_ball_agreement_is_twice_the_radius() {
        let s = sys();
        assert_eq!(s.minimal_ball_agreement_level(1, 6).unwrap(), Some(2));
        assert_eq!(s.minimal_ball_agreement_level(2, 8).unwrap(), Some(4));
    }
}
