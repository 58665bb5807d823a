//! Freely reduced words in finitely generated free groups and homomorphisms
//! between them given by generator images.
//!
//! Conjugation follows `c_a h(x) = a⁻¹ h(x) a`. Note the order when
//! stacking conjugations: `c_b (c_a h) = c_{ab} h`.

use std::fmt;

use thiserror::Error;

use crate::symbolic::{Alphabet, Substitution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("generator index {index} out of range for rank {rank}")]
    BadIndex { index: usize, rank: usize },
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

/// A generator or its inverse. Ordered by generator index, then sign with
/// the positive letter first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: usize,
    pub sign: Sign,
}

impl Letter {
    pub fn pos(gen: usize) -> Self {
        Letter { gen, sign: Sign::Pos }
    }

    pub fn neg(gen: usize) -> Self {
        Letter { gen, sign: Sign::Neg }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, sign: self.sign.flip() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignClass {
    /// The empty word, which is both positive and negative.
    Identity,
    Positive,
    Negative,
    Mixed,
}

/// A freely reduced word in the free group of the given rank.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupWord {
    rank: usize,
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn identity(rank: usize) -> Self {
        GroupWord { rank, letters: Vec::new() }
    }

    pub fn generator(rank: usize, gen: usize) -> Result<Self, GroupError> {
        reduce(rank, [Letter::pos(gen)])
    }

    /// A positive word from generator indices.
    pub fn positive(rank: usize, gens: &[usize]) -> Result<Self, GroupError> {
        reduce(rank, gens.iter().map(|&g| Letter::pos(g)))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Reduced product `self · other`.
    pub fn mul(&self, other: &GroupWord) -> Result<GroupWord, GroupError> {
        check_rank(self.rank, other.rank)?;
        let mut letters = self.letters.clone();
        push_reduced(&mut letters, other.letters.iter().copied());
        Ok(GroupWord { rank: self.rank, letters })
    }

    /// `a⁻¹ · self · a`.
    pub fn conjugate(&self, a: &GroupWord) -> Result<GroupWord, GroupError> {
        a.inverse().mul(self)?.mul(a)
    }

    /// Generator indices if every letter is positive.
    pub fn as_positive(&self) -> Option<Vec<usize>> {
        self.letters
            .iter()
            .map(|l| (l.sign == Sign::Pos).then_some(l.gen))
            .collect()
    }

    /// Space-separated letters named by `names`, with `'` marking inverses.
    pub fn display_with(&self, names: &Alphabet) -> String {
        self.letters
            .iter()
            .map(|l| match l.sign {
                Sign::Pos => names.symbol(l.gen).to_owned(),
                Sign::Neg => format!("{}'", names.symbol(l.gen)),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Debug for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rank == 0 {
            return write!(f, "GroupWord(1)");
        }
        write!(f, "GroupWord({})", self.display_with(&Alphabet::standard(self.rank)))
    }
}

fn check_rank(expected: usize, found: usize) -> Result<(), GroupError> {
    if expected == found {
        Ok(())
    } else {
        Err(GroupError::RankMismatch { expected, found })
    }
}

fn push_reduced(stack: &mut Vec<Letter>, letters: impl IntoIterator<Item = Letter>) {
    for l in letters {
        if stack.last() == Some(&l.inverse()) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
}

/// Free reduction of a raw letter sequence.
pub fn reduce(rank: usize, letters: impl IntoIterator<Item = Letter>) -> Result<GroupWord, GroupError> {
    let mut stack = Vec::new();
    for l in letters {
        if l.gen >= rank {
            return Err(GroupError::BadIndex { index: l.gen, rank });
        }
        push_reduced(&mut stack, [l]);
    }
    Ok(GroupWord { rank, letters: stack })
}

pub fn classify_sign(w: &GroupWord) -> SignClass {
    if w.is_empty() {
        SignClass::Identity
    } else if w.letters.iter().all(|l| l.sign == Sign::Pos) {
        SignClass::Positive
    } else if w.letters.iter().all(|l| l.sign == Sign::Neg) {
        SignClass::Negative
    } else {
        SignClass::Mixed
    }
}

/// A homomorphism `F_m → F_n` given by the images of the `m` generators.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupHom {
    domain_rank: usize,
    codomain_rank: usize,
    images: Vec<GroupWord>,
}

impl GroupHom {
    pub fn new(codomain_rank: usize, images: Vec<GroupWord>) -> Result<Self, GroupError> {
        for w in &images {
            check_rank(codomain_rank, w.rank)?;
        }
        Ok(GroupHom { domain_rank: images.len(), codomain_rank, images })
    }

    pub fn identity(rank: usize) -> Self {
        GroupHom {
            domain_rank: rank,
            codomain_rank: rank,
            images: (0..rank)
                .map(|g| GroupWord { rank, letters: vec![Letter::pos(g)] })
                .collect(),
        }
    }

    pub fn domain_rank(&self) -> usize {
        self.domain_rank
    }

    pub fn codomain_rank(&self) -> usize {
        self.codomain_rank
    }

    pub fn images(&self) -> &[GroupWord] {
        &self.images
    }

    pub fn image(&self, gen: usize) -> &GroupWord {
        &self.images[gen]
    }

    /// Positive generator images as index words, when every image is a
    /// non-empty positive word.
    pub fn positive_images(&self) -> Option<Vec<Vec<usize>>> {
        self.images
            .iter()
            .map(|w| w.as_positive().filter(|v| !v.is_empty()))
            .collect()
    }
}

impl fmt::Debug for GroupHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for w in &self.images {
            l.entry(w);
        }
        l.finish()
    }
}

pub fn apply(h: &GroupHom, w: &GroupWord) -> Result<GroupWord, GroupError> {
    check_rank(h.domain_rank, w.rank)?;
    let mut stack = Vec::new();
    for l in &w.letters {
        let image = &h.images[l.gen];
        match l.sign {
            Sign::Pos => push_reduced(&mut stack, image.letters.iter().copied()),
            Sign::Neg => push_reduced(&mut stack, image.letters.iter().rev().map(|x| x.inverse())),
        }
    }
    Ok(GroupWord { rank: h.codomain_rank, letters: stack })
}

/// `outer ∘ inner`.
pub fn compose_hom(outer: &GroupHom, inner: &GroupHom) -> Result<GroupHom, GroupError> {
    check_rank(outer.domain_rank, inner.codomain_rank)?;
    let images = inner
        .images
        .iter()
        .map(|w| apply(outer, w))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GroupHom {
        domain_rank: inner.domain_rank,
        codomain_rank: outer.codomain_rank,
        images,
    })
}

/// `c_a h : x ↦ a⁻¹ h(x) a`. Stacking composes as `c_b ∘ c_a = c_{ab}`.
pub fn conjugate_hom(h: &GroupHom, a: &GroupWord) -> Result<GroupHom, GroupError> {
    check_rank(h.codomain_rank, a.rank)?;
    let images = h
        .images
        .iter()
        .map(|w| w.conjugate(a))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GroupHom { images, ..h.clone() })
}

/// True iff every generator image is a non-empty positive word. Homs with
/// an identity image are not treated as positive.
pub fn is_positive_hom(h: &GroupHom) -> bool {
    h.images.iter().all(|w| classify_sign(w) == SignClass::Positive)
}

/// The homomorphism of free groups induced by a substitution, acting on the
/// chosen generators exactly as the substitution acts on symbols.
pub fn hom_from_substitution(s: &Substitution) -> GroupHom {
    let rank = s.target().len();
    let images = s
        .images()
        .iter()
        .map(|w| GroupWord {
            rank,
            letters: w.iter().map(|&g| Letter::pos(g)).collect(),
        })
        .collect();
    GroupHom { domain_rank: s.source().len(), codomain_rank: rank, images }
}
