mod common;

use common::*;
use flowtrope::abelian::{abelianize, factorize_gl2, tail_equivalent, FactorChain, Head, Step, TailVerdict};
use flowtrope::folding::{bouquet, fold, fold_in_order, inverse, is_invertible, Edge, LabeledGraph};
use flowtrope::format::{parse_substitution, render_substitution};
use flowtrope::freegroup::{apply, compose_hom, conjugate_hom, reduce, GroupHom, GroupWord, Letter, Sign};
use flowtrope::rewrite::{junction_candidates, language, rewrite_proper_auto, RewriteError};
use flowtrope::symbolic::{compose, is_primitive, is_proper, Alphabet, Substitution};
use flowtrope::trope::solve_conjugator;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn letters() -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0usize..3, any::<bool>()), 0..24).prop_map(|v| {
        v.into_iter()
            .map(|(gen, pos)| Letter { gen, sign: if pos { Sign::Pos } else { Sign::Neg } })
            .collect()
    })
}

fn word(letters: Vec<Letter>) -> GroupWord {
    reduce(3, letters).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn reduction_is_idempotent_and_matches_oracle(ls in letters()) {
        let w = word(ls.clone());
        prop_assert_eq!(reduce(3, w.letters().iter().copied()).unwrap(), w.clone());
        let as_raw: Vec<i32> = ls.iter().map(|l| if l.sign == Sign::Pos { l.gen as i32 + 1 } else { -(l.gen as i32 + 1) }).collect();
        prop_assert_eq!(raw(&w), raw_reduce(as_raw));
        prop_assert!(w.mul(&w.inverse()).unwrap().is_empty());
    }

    #[test]
    fn group_multiplication_is_associative(a in letters(), b in letters(), c in letters()) {
        let (a, b, c) = (word(a), word(b), word(c));
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn composition_is_associative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=3);
        let (a, b, c) = (random_substitution(&mut r, n, 4), random_substitution(&mut r, n, 4), random_substitution(&mut r, n, 4));
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn abelianization_is_functorial(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=4);
        let (s, t) = (random_substitution(&mut r, n, 5), random_substitution(&mut r, n, 5));
        let st = compose(&s, &t).unwrap();
        prop_assert_eq!(abelianize(&st).to_rows(), naive_product(&count_matrix(&s), &count_matrix(&t)));
        prop_assert_eq!(abelianize(&s).to_rows(), count_matrix(&s));
    }

    #[test]
    fn chains_round_trip(swap in any::<bool>(), steps in prop::collection::vec(any::<bool>(), 0..=12)) {
        let chain = FactorChain {
            head: if swap { Head::S } else { Head::I },
            tail: steps.into_iter().map(|l| if l { Step::L } else { Step::R }).collect(),
        };
        let m = chain.multiply_out().unwrap();
        prop_assert_eq!(factorize_gl2(&m).unwrap(), chain.clone());
        prop_assert_eq!(chain.to_string().parse::<FactorChain>().unwrap(), chain);
    }

    #[test]
    fn substitution_files_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=4);
        let s = random_substitution(&mut r, n, 6);
        let names = ["x", "y1", "Zed", "q_q"];
        let mut pick: Vec<&str> = names.to_vec();
        pick.shuffle(&mut r);
        let alphabet = Alphabet::new(pick[..n].iter().copied()).unwrap();
        let s = Substitution::endo(alphabet, s.images().to_vec()).unwrap();
        let text = render_substitution(&s);
        prop_assert_eq!(parse_substitution(&text).unwrap(), s);
        prop_assert_eq!(render_substitution(&parse_substitution(&text).unwrap()), text);
    }

    #[test]
    fn conjugation_stacks(seed in any::<u64>(), a in letters(), b in letters()) {
        let mut r = rng(seed);
        let h = GroupHom::new(3, (0..3).map(|_| { let l = r.gen_range(0..5); positive_word(3, &random_word(&mut r, 3, l)) }).collect()).unwrap();
        let (a, b) = (word(a), word(b));
        let twice = conjugate_hom(&conjugate_hom(&h, &a).unwrap(), &b).unwrap();
        prop_assert_eq!(twice, conjugate_hom(&h, &a.mul(&b).unwrap()).unwrap());
    }

    #[test]
    fn solver_finds_constructed_conjugators(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rank = r.gen_range(1..=3);
        let (f, g, a) = related_pair(&mut r, rank);
        let found = solve_conjugator(&f, &g).unwrap().expect("constructed pair is related");
        prop_assert_eq!(conjugate_hom(&g, &found).unwrap(), f.clone());
        prop_assert!(found.len() <= a.len());
        let back = solve_conjugator(&g, &f).unwrap().expect("relation is symmetric");
        prop_assert_eq!(conjugate_hom(&f, &back).unwrap(), g);
    }

    #[test]
    fn tail_equivalence_is_an_equivalence(seed in any::<u64>()) {
        let mut r = rng(seed);
        let labels = ["s", "r", "t"];
        let a = random_label_stream(&mut r, &labels, false);
        let b = if r.gen_bool(0.5) { retail(&mut r, &a, &labels) } else { random_label_stream(&mut r, &labels, false) };
        let c = if r.gen_bool(0.5) { retail(&mut r, &b, &labels) } else { random_label_stream(&mut r, &labels, false) };
        let eq = |x, y| matches!(tail_equivalent(x, y), TailVerdict::Equivalent { .. });
        prop_assert!(eq(&a, &a));
        prop_assert_eq!(eq(&a, &b), eq(&b, &a));
        prop_assert_eq!(eq(&a, &b), brute_tail_equivalent(&a, &b));
        if eq(&a, &b) && eq(&b, &c) {
            prop_assert!(eq(&a, &c));
        }
    }

    #[test]
    fn language_matches_long_iterates(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=3);
        let s = random_primitive(&mut r, n, 4);
        let table = language(&s, 4).unwrap();
        for len in 1..=4 {
            let got: std::collections::BTreeSet<String> = table.spelled(len).into_iter().collect();
            prop_assert_eq!(got, naive_language(&s, len, 4000));
        }
    }

    #[test]
    fn invertible_maps_are_unimodular(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_substitution(&mut r, 2, 4);
        let h = flowtrope::freegroup::hom_from_substitution(&s);
        if is_invertible(&h).unwrap() {
            let det = abelianize(&s).det2().unwrap();
            prop_assert_eq!(det.abs(), 1);
        }
    }
}

/// Products of elementary positive automorphisms on two generators.
fn random_automorphism(r: &mut impl Rng, steps: usize) -> GroupHom {
    let elementary = [
        positive_hom(2, &[vec![0, 1], vec![1]]),
        positive_hom(2, &[vec![1, 0], vec![1]]),
        positive_hom(2, &[vec![0], vec![0, 1]]),
        positive_hom(2, &[vec![0], vec![1, 0]]),
        positive_hom(2, &[vec![1], vec![0]]),
    ];
    let mut h = GroupHom::identity(2);
    for _ in 0..steps {
        h = compose_hom(&h, elementary.choose(r).unwrap()).unwrap();
    }
    h
}

#[test]
fn inverses_of_random_automorphisms() {
    let mut r = rng(11);
    for _ in 0..100 {
        let steps = r.gen_range(0..8);
        let h = random_automorphism(&mut r, steps);
        assert!(is_invertible(&h).unwrap());
        let inv = inverse(&h).unwrap().expect("automorphism");
        assert_eq!(compose_hom(&h, &inv).unwrap(), GroupHom::identity(2));
        assert_eq!(compose_hom(&inv, &h).unwrap(), GroupHom::identity(2));
        let w = positive_word(2, &[0, 1, 1, 0]);
        assert_eq!(apply(&inv, &apply(&h, &w).unwrap()).unwrap(), w);
    }
}

/// Relabels the vertices of `g` (keeping the basepoint) and reverses the
/// edge list, so folding starts from a differently presented graph.
fn shuffled(g: &LabeledGraph, r: &mut impl Rng) -> LabeledGraph {
    let n = g.vertex_count();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(r);
    let mut edges: Vec<Edge> = g
        .edges()
        .iter()
        .map(|e| Edge { src: perm[e.src], dst: perm[e.dst], label: e.label })
        .collect();
    edges.shuffle(r);
    LabeledGraph::new(g.rank(), n, edges, perm[g.basepoint()]).unwrap()
}

#[test]
fn folding_is_confluent() {
    let mut r = rng(5);
    for _ in 0..20 {
        let rank = r.gen_range(1..=3);
        let words: Vec<GroupWord> = (0..r.gen_range(1..=3))
            .map(|_| {
                let ls: Vec<Letter> = (0..r.gen_range(0..8))
                    .map(|_| Letter { gen: r.gen_range(0..rank), sign: if r.gen_bool(0.5) { Sign::Pos } else { Sign::Neg } })
                    .collect();
                reduce(rank, ls).unwrap()
            })
            .collect();
        let g = bouquet(&words, rank).unwrap();
        let reference = fold(&g);
        for _ in 0..50 {
            let h = shuffled(&g, &mut r);
            let folded = fold_in_order(&h, |pending| r.gen_range(0..pending));
            assert_eq!(folded, reference);
        }
    }
}

#[test]
fn rewrite_yields_proper_primitive_maps() {
    let mut r = rng(17);
    let mut rewritten = 0;
    for _ in 0..40 {
        let s = random_primitive(&mut r, 2, 4);
        let Some(j) = junction_candidates(&s, 4).unwrap().first().copied() else { continue };
        match rewrite_proper_auto(&s, j) {
            Ok(rw) => {
                rewritten += 1;
                assert!(is_proper(&rw.rewritten));
                assert!(is_primitive(&rw.rewritten.power(2).unwrap()) || is_primitive(&rw.rewritten));
                let power = s.power(rw.junction.k).unwrap();
                for (t, tile) in rw.tiles.iter().enumerate() {
                    assert_eq!(rw.flatten(rw.rewritten.image(t)), power.apply(tile));
                }
                // letter conservation through the abelianizations
                let tile_counts = |w: &[usize]| -> Vec<i64> {
                    (0..2).map(|x| w.iter().filter(|&&y| y == x).count() as i64).collect()
                };
                for (t, tile) in rw.tiles.iter().enumerate() {
                    let via_tiles: Vec<i64> = (0..2)
                        .map(|x| rw.rewritten.image(t).iter().map(|&u| tile_counts(&rw.tiles[u])[x]).sum())
                        .collect();
                    assert_eq!(via_tiles, tile_counts(&power.apply(tile)));
                }
            }
            Err(RewriteError::SingleReturnWord) => {}
            Err(e) => panic!("{s:?} with {j:?}: {e}"),
        }
    }
    assert!(rewritten > 10, "only {rewritten} rewrites succeeded");
}
