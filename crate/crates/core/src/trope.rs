//! The positive trope relation between positive homomorphisms: `f ∼ g` iff
//! `f = c_a g` for some group element `a`. Also verification of conjugate
//! zigzag (czz) witnesses and validation of primitive proper sequences.
//!
//! A conjugator between positive homs is always a positive or a negative
//! word, so the search splits into two word equations over the free monoid.
//! For positive `a` and each generator `e_i`,
//!
//! ```text
//!     g(e_i) · a = a · f(e_i)
//! ```
//!
//! whose solutions are `a ∈ { u_i^k v_i : k ≥ 0 }`, `u_i` the primitive root
//! of `g(e_i)` and `v_i` a proper prefix of `u_i` determined by the rotation
//! taking `g(e_i)` to `f(e_i)`. Every solution is a prefix of `u_i^ω`. Two
//! such progressions with different roots can only share words shorter than
//! `|u_i| + |u_j|` (Fine–Wilf), so the intersection is either finite and
//! short, or all roots coincide and the shortest member is returned.

use thiserror::Error;

use crate::freegroup::{
    compose_hom, conjugate_hom, hom_from_substitution, is_positive_hom, GroupError, GroupHom, GroupWord,
};
use crate::symbolic::{
    primitive_scan, proper_scan, PrimitiveVerdict, ProperVerdict, SequenceSpec, Substitution, SymbolicError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TropeError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error("{0} is not a positive homomorphism")]
    NotPositive(&'static str),
    #[error("czz witness malformed: {0}")]
    Malformed(String),
    #[error("rank mismatch at {location}: {source}")]
    RankAt { location: String, source: GroupError },
}

/// Some `a` with `conjugate_hom(g, a) == f`, or `None`. The shortest
/// witness is returned; ties go to the lexicographically least letter
/// sequence (generator index, then positive before negative).
pub fn solve_conjugator(f: &GroupHom, g: &GroupHom) -> Result<Option<GroupWord>, TropeError> {
    if f.domain_rank() != g.domain_rank() {
        return Err(GroupError::RankMismatch { expected: g.domain_rank(), found: f.domain_rank() }.into());
    }
    if f.codomain_rank() != g.codomain_rank() {
        return Err(GroupError::RankMismatch { expected: g.codomain_rank(), found: f.codomain_rank() }.into());
    }
    let fi = f.positive_images().filter(|_| is_positive_hom(f)).ok_or(TropeError::NotPositive("f"))?;
    let gi = g.positive_images().filter(|_| is_positive_hom(g)).ok_or(TropeError::NotPositive("g"))?;
    let rank = f.codomain_rank();

    let pos = positive_conjugator(&gi, &fi).map(|a| GroupWord::positive(rank, &a)).transpose()?;
    // f = c_{b⁻¹} g  ⇔  g = c_b f
    let neg = positive_conjugator(&fi, &gi)
        .map(|b| GroupWord::positive(rank, &b).map(|w| w.inverse()))
        .transpose()?;
    let best = match (pos, neg) {
        (Some(p), Some(n)) => Some(if (n.len(), n.letters()) < (p.len(), p.letters()) { n } else { p }),
        (p, n) => p.or(n),
    };
    if let Some(a) = &best {
        let check = conjugate_hom(g, a)?;
        assert_eq!(&check, f, "conjugator failed verification");
    }
    Ok(best)
}

pub fn are_trope_related(f: &GroupHom, g: &GroupHom) -> Result<bool, TropeError> {
    Ok(solve_conjugator(f, g)?.is_some())
}

/// Length of the primitive root of a non-empty word.
fn primitive_root_len(w: &[usize]) -> usize {
    let n = w.len();
    (1..=n)
        .find(|&d| n.is_multiple_of(d) && w.chunks(d).all(|c| c == &w[..d]))
        .unwrap_or(n)
}

/// Solutions of `w · a = a · v` over the free monoid, as a progression:
/// all prefixes of `root^ω` with length `offset + k·|root|`.
#[derive(Debug, Clone)]
struct Progression<'a> {
    root: &'a [usize],
    offset: usize,
}

impl Progression<'_> {
    fn contains(&self, a: &[usize]) -> bool {
        let r = self.root.len();
        a.len() >= self.offset
            && (a.len() - self.offset).is_multiple_of(r)
            && a.iter().enumerate().all(|(i, &x)| x == self.root[i % r])
    }

    fn word(&self, len: usize) -> Vec<usize> {
        (0..len).map(|i| self.root[i % self.root.len()]).collect()
    }
}

fn progression<'a>(w: &'a [usize], v: &[usize]) -> Option<Progression<'a>> {
    if w.len() != v.len() || w.is_empty() {
        return None;
    }
    // w = xy, v = yx with |x| = ℓ
    let offset = (0..w.len()).find(|&l| w[l..] == v[..w.len() - l] && w[..l] == v[w.len() - l..])?;
    let r = primitive_root_len(w);
    Some(Progression { root: &w[..r], offset })
}

/// Shortest positive `a` with `lhs[i] · a = a · rhs[i]` for every `i`.
fn positive_conjugator(lhs: &[Vec<usize>], rhs: &[Vec<usize>]) -> Option<Vec<usize>> {
    let progs = lhs
        .iter()
        .zip(rhs)
        .map(|(w, v)| progression(w, v))
        .collect::<Option<Vec<_>>>()?;
    let Some(first) = progs.first() else {
        return Some(Vec::new());
    };
    match progs.iter().find(|p| p.root != first.root) {
        None => {
            let same = progs.iter().all(|p| p.offset == first.offset);
            same.then(|| first.word(first.offset))
        }
        Some(other) => {
            let bound = first.root.len() + other.root.len();
            let mut len = first.offset;
            while len < bound {
                let a = first.word(len);
                if progs.iter().all(|p| p.contains(&a)) {
                    return Some(a);
                }
                len += first.root.len();
            }
            None
        }
    }
}

/// A simplified conjugate zigzag diagram over levels `1..=N+1`:
///
/// ```text
///   G_1 <-top_1- G_2 <-top_2- G_3 …
///    |d_1      ↗  |d_2      ↗
///    v    up_1    v    up_2
///   H_1 <-bot_1- H_2 <-bot_2- H_3 …
/// ```
///
/// with `up_n ∘ down_{n+1} = c_{up_conj_n} top_n` and
/// `down_n ∘ up_n = c_{down_conj_n} bottom_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CzzWitness {
    pub top: Vec<GroupHom>,
    pub bottom: Vec<GroupHom>,
    pub downs: Vec<GroupHom>,
    pub ups: Vec<GroupHom>,
    pub up_conjugators: Vec<GroupWord>,
    pub down_conjugators: Vec<GroupWord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Triangle {
    /// `up_n ∘ down_{n+1}` against `top_n`.
    Upper(usize),
    /// `down_n ∘ up_n` against `bottom_n`.
    Lower(usize),
}

impl std::fmt::Display for Triangle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Triangle::Upper(n) => write!(f, "upper triangle {n}"),
            Triangle::Lower(n) => write!(f, "lower triangle {n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CzzFailure {
    pub triangle: Triangle,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CzzReport {
    pub ok: bool,
    pub first_failure: Option<CzzFailure>,
}

impl CzzWitness {
    /// Identity maps everywhere, `levels` triangles of each kind.
    pub fn trivial(rank: usize, levels: usize) -> Self {
        let id = GroupHom::identity(rank);
        let one = GroupWord::identity(rank);
        CzzWitness {
            top: vec![id.clone(); levels],
            bottom: vec![id.clone(); levels],
            downs: vec![id.clone(); levels + 1],
            ups: vec![id; levels],
            up_conjugators: vec![one.clone(); levels],
            down_conjugators: vec![one; levels],
        }
    }

    fn check_shape(&self) -> Result<usize, TropeError> {
        let n = self.top.len();
        let lens = [
            ("bottom", self.bottom.len(), n),
            ("down", self.downs.len(), n + 1),
            ("up", self.ups.len(), n),
            ("up conjugator", self.up_conjugators.len(), n),
            ("down conjugator", self.down_conjugators.len(), n),
        ];
        for (what, found, expected) in lens {
            if found != expected {
                return Err(TropeError::Malformed(format!(
                    "{n} top maps need {expected} {what} entries, found {found}"
                )));
            }
        }
        let all = self.top.iter().chain(&self.bottom).chain(&self.downs).chain(&self.ups);
        if !all.clone().all(is_positive_hom) {
            return Err(TropeError::Malformed("all maps must be positive".into()));
        }
        Ok(n)
    }
}

/// Checks every triangle of the diagram, in level order with the upper
/// triangle first. Only the supplied levels are checked.
pub fn verify_czz(w: &CzzWitness) -> Result<CzzReport, TropeError> {
    let levels = w.check_shape()?;
    let at = |t: Triangle| move |e: GroupError| TropeError::RankAt { location: t.to_string(), source: e };
    for i in 0..levels {
        let n = i + 1;
        let upper = Triangle::Upper(n);
        let lhs = compose_hom(&w.ups[i], &w.downs[i + 1]).map_err(at(upper))?;
        let rhs = conjugate_hom(&w.top[i], &w.up_conjugators[i]).map_err(at(upper))?;
        if lhs != rhs {
            return Ok(failure(upper, "up ∘ down differs from conjugated top map"));
        }
        let lower = Triangle::Lower(n);
        let lhs = compose_hom(&w.downs[i], &w.ups[i]).map_err(at(lower))?;
        let rhs = conjugate_hom(&w.bottom[i], &w.down_conjugators[i]).map_err(at(lower))?;
        if lhs != rhs {
            return Ok(failure(lower, "down ∘ up differs from conjugated bottom map"));
        }
    }
    Ok(CzzReport { ok: true, first_failure: None })
}

fn failure(triangle: Triangle, reason: &str) -> CzzReport {
    CzzReport {
        ok: false,
        first_failure: Some(CzzFailure { triangle, reason: reason.to_owned() }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpsProperty {
    Proper,
    Primitive,
}

/// Why a sequence is not accepted as a primitive proper sequence.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PpsRejection {
    #[error("not proper ({verdict:?}) at level {level}")]
    NotProper { verdict: ProperVerdict, level: usize },
    #[error("not primitive ({verdict:?}) at level {level}")]
    NotPrimitive { verdict: PrimitiveVerdict, level: usize },
    #[error(transparent)]
    Invalid(#[from] SymbolicError),
}

impl PpsRejection {
    pub fn property(&self) -> Option<PpsProperty> {
        match self {
            PpsRejection::NotProper { .. } => Some(PpsProperty::Proper),
            PpsRejection::NotPrimitive { .. } => Some(PpsProperty::Primitive),
            PpsRejection::Invalid(_) => None,
        }
    }
}

/// A sequence that passed both symbolic checks, with its levels lifted to
/// positive homomorphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpsSpec {
    pub sequence: SequenceSpec,
    pub prefix: Vec<GroupHom>,
    /// The repeating part; for finite data this is empty and `prefix` holds
    /// every level.
    pub cycle: Vec<GroupHom>,
    pub proper: ProperVerdict,
    pub primitive: PrimitiveVerdict,
}

pub fn validate_pps(seq: &SequenceSpec, window: usize) -> Result<PpsSpec, PpsRejection> {
    let proper = proper_scan(seq, window)?;
    if proper.verdict != ProperVerdict::Proper {
        return Err(PpsRejection::NotProper {
            verdict: proper.verdict,
            level: proper.failing_level.unwrap_or(0),
        });
    }
    let primitive = primitive_scan(seq, window)?;
    if primitive.verdict != PrimitiveVerdict::Primitive {
        return Err(PpsRejection::NotPrimitive {
            verdict: primitive.verdict,
            level: primitive.failing_level.unwrap_or(0),
        });
    }
    let lift = |levels: &[Substitution]| levels.iter().map(hom_from_substitution).collect();
    let (prefix, cycle) = match seq {
        SequenceSpec::Finite(levels) => (lift(levels), Vec::new()),
        SequenceSpec::EventuallyPeriodic { prefix, cycle } => (lift(prefix), lift(cycle)),
    };
    Ok(PpsSpec {
        sequence: seq.clone(),
        prefix,
        cycle,
        proper: proper.verdict,
        primitive: primitive.verdict,
    })
}
