//! Independent oracles and random generators shared by the integration tests.
//! The oracles deliberately avoid the library's algorithms: they work on
//! plain integer words and spelled strings.

#![allow(dead_code)]

use std::collections::BTreeSet;

use flowtrope::abelian::{IntMatrix, LabelStream};
use flowtrope::freegroup::{GroupHom, GroupWord, Sign};
use flowtrope::symbolic::{is_primitive, Alphabet, Substitution};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sub(images: &[&str]) -> Substitution {
    Substitution::from_spelled(images).unwrap()
}

pub fn sigma() -> Substitution {
    sub(&["aabaabab", "aabab"])
}

pub fn tau() -> Substitution {
    sub(&["aabaabab", "abaab"])
}

pub fn rho() -> Substitution {
    sub(&["ba", "bba"])
}

pub fn thue_morse() -> Substitution {
    sub(&["abba", "baab"])
}

// ---------------------------------------------------------------------------
// Free group words as signed integers: generator g is g+1, its inverse -(g+1).

pub type Raw = Vec<i32>;

pub fn raw(w: &GroupWord) -> Raw {
    w.letters()
        .iter()
        .map(|l| {
            let g = l.gen as i32 + 1;
            if l.sign == Sign::Pos {
                g
            } else {
                -g
            }
        })
        .collect()
}

pub fn raw_reduce(w: impl IntoIterator<Item = i32>) -> Raw {
    let mut out: Raw = Vec::new();
    for x in w {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

pub fn raw_inv(w: &[i32]) -> Raw {
    w.iter().rev().map(|x| -x).collect()
}

/// `a⁻¹ w a`, reduced.
pub fn raw_conj(w: &[i32], a: &[i32]) -> Raw {
    raw_reduce(raw_inv(a).into_iter().chain(w.iter().copied()).chain(a.iter().copied()))
}

/// Half the length lost by cyclic reduction: `w = u⁻¹ w' u` with `w'`
/// cyclically reduced gives `|u|`.
fn uncyclic(w: &[i32]) -> usize {
    let (mut i, mut j) = (0, w.len());
    while j > i + 1 && w[i] == -w[j - 1] {
        i += 1;
        j -= 1;
    }
    i
}

/// Shortest `a` (up to `bound` letters) with `a⁻¹ g_i a = f_i` for every
/// generator, found by exhaustive search over reduced words. A branch is cut
/// once some `p⁻¹ g_i p` needs more cancellation than the letters left,
/// since targets that are cyclically reduced (positive words are) require
/// the remaining suffix to absorb the whole non-cyclic part.
pub fn brute_conjugator(f: &GroupHom, g: &GroupHom, bound: usize) -> Option<Raw> {
    let fs: Vec<Raw> = f.images().iter().map(raw).collect();
    let gs: Vec<Raw> = g.images().iter().map(raw).collect();
    let rank = g.codomain_rank() as i32;
    let mut best: Option<Raw> = None;
    let mut p = Vec::new();
    search(&fs, &gs, rank, bound, &mut p, &mut best);
    best
}

fn search(fs: &[Raw], gs: &[Raw], rank: i32, bound: usize, p: &mut Raw, best: &mut Option<Raw>) {
    let hs: Vec<Raw> = gs.iter().map(|g| raw_conj(g, p)).collect();
    if hs == fs {
        let better = match best {
            None => true,
            Some(b) => p.len() < b.len(),
        };
        if better {
            *best = Some(p.clone());
        }
    }
    let limit = best.as_ref().map_or(bound, |b| b.len().saturating_sub(1).min(bound));
    if p.len() >= limit {
        return;
    }
    if hs.iter().any(|h| uncyclic(h) > bound - p.len()) {
        return;
    }
    for x in (1..=rank).flat_map(|g| [g, -g]) {
        if p.last() == Some(&-x) {
            continue;
        }
        p.push(x);
        search(fs, gs, rank, bound, p, best);
        p.pop();
    }
}

pub fn raw_from_letters(w: &GroupWord) -> Raw {
    raw(w)
}

// ---------------------------------------------------------------------------
// Symbolic oracles over spelled strings.

/// Factors of length `len` read off a long iterate of every letter.
pub fn naive_language(s: &Substitution, len: usize, min_iterate: usize) -> BTreeSet<String> {
    let spell = |w: &[usize]| -> String { w.iter().map(|&x| s.source().symbol(x)).collect() };
    let mut out = BTreeSet::new();
    for x in 0..s.source().len() {
        let mut w = vec![x];
        let mut rounds = 0;
        while w.len() < min_iterate || rounds < 2 * s.source().len() {
            w = s.apply(&w);
            rounds += 1;
        }
        let text = spell(&w);
        let chars: Vec<char> = text.chars().collect();
        for win in chars.windows(len) {
            out.insert(win.iter().collect());
        }
    }
    out
}

/// Letter counts from spelled images: entry (i, j) counts symbol i in the
/// image of symbol j.
pub fn count_matrix(s: &Substitution) -> Vec<Vec<i64>> {
    let n = s.target().len();
    let m = s.source().len();
    let mut rows = vec![vec![0i64; m]; n];
    for j in 0..m {
        let image: Vec<&str> = s.image(j).iter().map(|&x| s.target().symbol(x)).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            row[j] = image.iter().filter(|&&t| t == s.target().symbol(i)).count() as i64;
        }
    }
    rows
}

pub fn matrix_rows(m: &IntMatrix) -> Vec<Vec<i64>> {
    m.to_rows()
}

pub fn naive_product(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect())
        .collect()
}

/// Unrolls both streams and looks for aligned suffixes over a long window.
pub fn brute_tail_equivalent(a: &LabelStream, b: &LabelStream) -> bool {
    const START: usize = 40;
    const WINDOW: usize = 400;
    let unroll = |s: &LabelStream| -> Vec<String> {
        (0..START + WINDOW).map(|i| s.get(i).expect("periodic").to_owned()).collect()
    };
    let (ua, ub) = (unroll(a), unroll(b));
    (0..START).any(|i| (0..START).any(|j| ua[i..i + WINDOW - START] == ub[j..j + WINDOW - START]))
}

// ---------------------------------------------------------------------------
// Random generators.

pub fn random_word(r: &mut impl Rng, n: usize, len: usize) -> Vec<usize> {
    (0..len).map(|_| r.gen_range(0..n)).collect()
}

/// A surjective endomorphism on `n` letters with images of length 1..=max_len.
pub fn random_substitution(r: &mut impl Rng, n: usize, max_len: usize) -> Substitution {
    loop {
        let images = (0..n)
            .map(|_| {
                let len = r.gen_range(1..=max_len);
                random_word(r, n, len)
            })
            .collect();
        if let Ok(s) = Substitution::endo(Alphabet::standard(n), images) {
            return s;
        }
    }
}

pub fn random_primitive(r: &mut impl Rng, n: usize, max_len: usize) -> Substitution {
    loop {
        let s = random_substitution(r, n, max_len.max(n));
        if is_primitive(&s) {
            return s;
        }
    }
}

pub fn positive_word(rank: usize, gens: &[usize]) -> GroupWord {
    GroupWord::positive(rank, gens).unwrap()
}

pub fn positive_hom(rank: usize, images: &[Vec<usize>]) -> GroupHom {
    GroupHom::new(rank, images.iter().map(|w| positive_word(rank, w)).collect()).unwrap()
}

pub fn random_positive_hom(r: &mut impl Rng, rank: usize, max_len: usize) -> GroupHom {
    let images: Vec<Vec<usize>> = (0..rank)
        .map(|_| {
            let len = r.gen_range(1..=max_len);
            random_word(r, rank, len)
        })
        .collect();
    positive_hom(rank, &images)
}

/// `(f, g)` with `f = c_a g` for a known positive or negative `a`: with a
/// positive `u`, `g_i = u w_i` and `f_i = w_i u` give `a = u`; swapping the
/// roles gives `a = u⁻¹`.
pub fn related_pair(r: &mut impl Rng, rank: usize) -> (GroupHom, GroupHom, GroupWord) {
    let u_len = r.gen_range(0..=4);
    let u = random_word(r, rank, u_len);
    let ws: Vec<Vec<usize>> = (0..rank)
        .map(|_| {
            let len = r.gen_range(1..=5);
            random_word(r, rank, len)
        })
        .collect();
    let left: Vec<Vec<usize>> = ws.iter().map(|w| [u.as_slice(), w].concat()).collect();
    let right: Vec<Vec<usize>> = ws.iter().map(|w| [w.as_slice(), u.as_slice()].concat()).collect();
    let uw = positive_word(rank, &u);
    if r.gen_bool(0.5) {
        (positive_hom(rank, &right), positive_hom(rank, &left), uw)
    } else {
        (positive_hom(rank, &left), positive_hom(rank, &right), uw.inverse())
    }
}

pub fn random_label_stream(r: &mut impl Rng, labels: &[&str], non_constant: bool) -> LabelStream {
    loop {
        let plen = r.gen_range(0..=3);
        let clen = r.gen_range(1..=4);
        let pick = |r: &mut dyn rand::RngCore| labels[r.gen_range(0..labels.len())];
        let prefix: Vec<&str> = (0..plen).map(|_| pick(r)).collect();
        let cycle: Vec<&str> = (0..clen).map(|_| pick(r)).collect();
        let s = LabelStream::periodic(&prefix, &cycle);
        if !non_constant || !s.is_constant() {
            return s;
        }
    }
}

/// A stream with the same tail as `s`: start reading `s` at a random
/// offset, prepend random labels and rotate/double the cycle accordingly.
pub fn retail(r: &mut impl Rng, s: &LabelStream, labels: &[&str]) -> LabelStream {
    let LabelStream::EventuallyPeriodic { prefix, cycle } = s else {
        panic!("periodic input expected");
    };
    let offset = r.gen_range(0..prefix.len() + cycle.len() + 3);
    let start = prefix.len().max(offset);
    let repeats = r.gen_range(1..=2);
    let new_cycle: Vec<String> = (0..cycle.len() * repeats).map(|k| s.get(start + k).unwrap().to_owned()).collect();
    let mut new_prefix: Vec<String> = (0..r.gen_range(0..=2))
        .map(|_| labels[r.gen_range(0..labels.len())].to_owned())
        .collect();
    new_prefix.extend((offset..start).map(|k| s.get(k).unwrap().to_owned()));
    LabelStream::EventuallyPeriodic { prefix: new_prefix, cycle: new_cycle }
}
