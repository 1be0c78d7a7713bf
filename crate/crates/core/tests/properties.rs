//! Property tests for the algebraic laws the modules promise.

use proptest::prelude::*;
use resfin_core::{
    certify, check, kernel_witness, Alphabet, CertCase, CoreGraph, DoubleElement, FreeWord, Side,
    SquaringSystem, DEFAULT_MAX_VERTICES,
};

fn two_letter() -> Alphabet {
    Alphabet::new(&['a', 't']).unwrap()
}

/// Words assembled from signed exponent blocks.
fn block_word(max_blocks: usize, max_exp: i64) -> impl Strategy<Value = FreeWord> {
    prop::collection::vec((0..2usize, -max_exp..=max_exp), 0..=max_blocks).prop_map(|pairs| {
        let alphabet = two_letter();
        let letters: Vec<(char, i64)> = pairs
            .into_iter()
            .map(|(g, e)| (alphabet.symbol(g), e))
            .collect();
        alphabet.reduce(&letters).unwrap()
    })
}

/// Words of at most `max_len` letters.
fn short_word(max_len: usize) -> impl Strategy<Value = FreeWord> {
    prop::collection::vec((0..2usize, prop::bool::ANY), 0..=max_len).prop_map(|ls| {
        let alphabet = two_letter();
        let letters: Vec<(char, i64)> = ls
            .into_iter()
            .map(|(g, s)| (alphabet.symbol(g), if s { 1 } else { -1 }))
            .collect();
        alphabet.reduce(&letters).unwrap()
    })
}

fn generator_sets() -> impl Strategy<Value = Vec<FreeWord>> {
    prop::collection::vec(short_word(6), 1..=4)
}

fn element(max_syllables: usize, max_len: usize) -> impl Strategy<Value = DoubleElement> {
    prop::collection::vec((prop::bool::ANY, short_word(max_len)), 1..=max_syllables)
        .prop_filter_map("construction within resources", |raw| {
            let system = SquaringSystem::new();
            let syllables = raw
                .into_iter()
                .map(|(left, w)| (if left { Side::Left } else { Side::Right }, w))
                .collect();
            DoubleElement::normalize(syllables, &system).ok()
        })
}

proptest! {
    #[test]
    fn reduce_of_letter_expansion_is_identity(w in block_word(8, 1 << 12)) {
        let alphabet = two_letter();
        let letters: Vec<(char, i64)> =
            w.letters().map(|(g, s)| (alphabet.symbol(g), s)).collect();
        prop_assert_eq!(alphabet.reduce(&letters).unwrap(), w);
    }

    #[test]
    fn display_and_parse_round_trip(w in block_word(8, 1 << 12)) {
        let alphabet = two_letter();
        prop_assert_eq!(alphabet.parse_word(&w.to_string()).unwrap(), w);
    }

    #[test]
    fn concat_is_associative(
        u in block_word(8, 8),
        v in block_word(8, 8),
        w in block_word(8, 8),
    ) {
        prop_assert_eq!(
            u.concat(&v).unwrap().concat(&w).unwrap(),
            u.concat(&v.concat(&w).unwrap()).unwrap()
        );
    }

    #[test]
    fn inverse_cancels(u in block_word(8, 8)) {
        prop_assert!(u.concat(&u.inverse()).unwrap().is_identity());
    }

    #[test]
    fn powers_add(u in block_word(6, 6), j in -6i64..=6, k in -6i64..=6) {
        let split = u.power(j).unwrap().concat(&u.power(k).unwrap()).unwrap();
        prop_assert_eq!(split, u.power(j + k).unwrap());
    }

    #[test]
    fn squaring_map_is_a_homomorphism(u in block_word(8, 8), v in block_word(8, 8)) {
        let system = SquaringSystem::new();
        let phi = system.squaring();
        prop_assert_eq!(
            phi.apply(&u.concat(&v).unwrap()).unwrap(),
            phi.apply(&u).unwrap().concat(&phi.apply(&v).unwrap()).unwrap()
        );
    }

    #[test]
    fn iteration_composes(u in block_word(4, 4), m in 0u32..=5, n in 0u32..=5) {
        let system = SquaringSystem::new();
        let phi = system.squaring();
        prop_assert_eq!(
            phi.iterate(m + n, &u).unwrap(),
            phi.iterate(m, &phi.iterate(n, &u).unwrap()).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn folding_is_order_independent(
        (gens, shuffled) in generator_sets()
            .prop_flat_map(|g| (Just(g.clone()), Just(g).prop_shuffle())),
    ) {
        let alphabet = two_letter();
        let a = CoreGraph::from_generators(&alphabet, &gens, DEFAULT_MAX_VERTICES).unwrap();
        let b = CoreGraph::from_generators(&alphabet, &shuffled, DEFAULT_MAX_VERTICES).unwrap();
        prop_assert!(a.rooted_isomorphic(&b));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn intersection_matches_both_factors(
        g1 in generator_sets(),
        g2 in generator_sets(),
        w in short_word(12),
    ) {
        let alphabet = two_letter();
        let a = CoreGraph::from_generators(&alphabet, &g1, DEFAULT_MAX_VERTICES).unwrap();
        let b = CoreGraph::from_generators(&alphabet, &g2, DEFAULT_MAX_VERTICES).unwrap();
        let both = a.intersect(&b).unwrap();
        prop_assert_eq!(both.contains(&w), a.contains(&w) && b.contains(&w));
    }

    #[test]
    fn hall_completion_postconditions(gens in generator_sets(), avoid in short_word(6)) {
        let alphabet = two_letter();
        let graph = CoreGraph::from_generators(&alphabet, &gens, DEFAULT_MAX_VERTICES).unwrap();
        prop_assume!(!graph.contains(&avoid));
        let cover = graph.hall_complete(std::slice::from_ref(&avoid), DEFAULT_MAX_VERTICES).unwrap();
        prop_assert!(cover.graph().is_complete());
        for g in &gens {
            prop_assert!(cover.contains(g));
        }
        prop_assert!(!cover.contains(&avoid));
    }

    #[test]
    fn permutation_action_matches_membership(gens in generator_sets(), w in short_word(12)) {
        let alphabet = two_letter();
        let graph = CoreGraph::from_generators(&alphabet, &gens, DEFAULT_MAX_VERTICES).unwrap();
        let cover = graph.hall_complete(&[], DEFAULT_MAX_VERTICES).unwrap();
        let rep = cover.perm_rep();
        prop_assert_eq!(rep.fixes_basepoint(&w).unwrap(), cover.contains(&w));
    }

    #[test]
    fn block_shortcut_matches_letter_walk(
        gens in generator_sets(),
        w in block_word(6, 1 << 10),
    ) {
        let alphabet = two_letter();
        let graph = CoreGraph::from_generators(&alphabet, &gens, DEFAULT_MAX_VERTICES).unwrap();
        let mut vertex = Some(graph.basepoint());
        for (gen, sign) in w.letters() {
            vertex = vertex.and_then(|v| graph.step(v, gen, sign > 0));
        }
        prop_assert_eq!(graph.contains(&w), vertex == Some(graph.basepoint()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn double_multiplication_is_associative(
        x in element(6, 8),
        y in element(6, 8),
        z in element(6, 8),
    ) {
        let s = SquaringSystem::new();
        let Ok(xy) = x.multiply(&y, &s) else { return Ok(()) };
        let Ok(yz) = y.multiply(&z, &s) else { return Ok(()) };
        let Ok(left) = xy.multiply(&z, &s) else { return Ok(()) };
        let Ok(right) = x.multiply(&yz, &s) else { return Ok(()) };
        let Ok(equal) = left.equals(&right, &s) else { return Ok(()) };
        prop_assert!(equal);
    }

    #[test]
    fn identity_is_neutral(x in element(6, 8)) {
        let s = SquaringSystem::new();
        let e = DoubleElement::identity();
        prop_assert!(x.multiply(&e, &s).unwrap().equals(&x, &s).unwrap());
        prop_assert!(e.multiply(&x, &s).unwrap().equals(&x, &s).unwrap());
    }

    #[test]
    fn inverse_cancels_in_the_double(x in element(6, 8)) {
        let s = SquaringSystem::new();
        let Ok(product) = x.multiply(&x.invert(), &s) else { return Ok(()) };
        prop_assert!(product.is_trivial());
    }

    #[test]
    fn normalization_is_idempotent(x in element(6, 8)) {
        let s = SquaringSystem::new();
        let again = DoubleElement::normalize(x.syllables().to_vec(), &s).unwrap();
        prop_assert_eq!(again, x);
    }

    #[test]
    fn induced_map_is_a_homomorphism(x in element(4, 6), y in element(4, 6)) {
        let s = SquaringSystem::new();
        let phi = s.squaring();
        let Ok(xy) = x.multiply(&y, &s) else { return Ok(()) };
        let Ok(left) = xy.apply_induced(phi, &s) else { return Ok(()) };
        let Ok(fx) = x.apply_induced(phi, &s) else { return Ok(()) };
        let Ok(fy) = y.apply_induced(phi, &s) else { return Ok(()) };
        let Ok(right) = fx.multiply(&fy, &s) else { return Ok(()) };
        let Ok(equal) = left.equals(&right, &s) else { return Ok(()) };
        prop_assert!(equal);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn certificates_have_the_promised_shape(x in element(4, 6)) {
        prop_assume!(!x.is_trivial());
        let s = SquaringSystem::new();
        let Ok(cert) = certify(&s, &x, 4) else { return Ok(()) };
        match cert.case {
            CertCase::AlternatingProduct => {
                let excluded =
                    cert.facts.iter().filter(|f| f.kind == "syllable-excluded").count();
                prop_assert_eq!(excluded, x.syllables().len());
            }
            CertCase::AmalgamSyllable => {
                prop_assert_eq!(x.syllables().len(), 1);
                prop_assert!(cert.facts.iter().any(|f| f.kind == "moves-basepoint"));
            }
        }
        for fact in &cert.facts {
            prop_assert!(fact.expected && fact.observed);
        }
        let product: u64 = cert.covers.iter().map(|c| u64::from(c.vertices)).product();
        prop_assert!(u64::from(cert.index()) <= product);
        prop_assert!(check(&cert).unwrap());
    }
}

#[test]
fn retraction_kills_kernel_witnesses() {
    let s = SquaringSystem::new();
    for n in 1..=10 {
        let witness = kernel_witness(&s, n).unwrap();
        assert!(witness.retract(s.alphabet()).unwrap().is_identity());
    }
}
