//! Abelianization of substitutions to nonnegative integer matrices, the
//! unique `{I, S}·{L, R}*` factorization of nonnegative matrices in GL₂(ℤ),
//! tail equivalence of label streams, semigroup freeness checks, and the
//! classification of substitution families built on them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::folding::{is_invertible, FoldError};
use crate::freegroup::{hom_from_substitution, GroupHom, Sign};
use crate::symbolic::{Alphabet, SequenceSpec, Substitution, SymbolicError};
use crate::trope::{are_trope_related, validate_pps, TropeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("matrix must be 2×2, got {rows}×{cols}")]
    BadDimension { rows: usize, cols: usize },
    #[error("matrix has a negative entry")]
    NegativeEntry,
    #[error("determinant {0} is not ±1")]
    NotUnimodular(i64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("integer overflow in matrix product")]
    Overflow,
    #[error("depth must be positive")]
    ZeroDepth,
    #[error("no matrices given")]
    Empty,
    #[error("ragged matrix rows")]
    Ragged,
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("labelled substitutions must share one alphabet: {0}")]
    AlphabetMismatch(String),
    #[error("bad factor chain {0:?}")]
    BadChain(String),
    #[error(transparent)]
    Fold(#[from] FoldError),
    #[error(transparent)]
    Trope(#[from] TropeError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self, AbelianError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(AbelianError::Empty);
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(AbelianError::Ragged);
        }
        Ok(IntMatrix { rows: r, cols: c, data: rows.concat() })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        IntMatrix { rows: n, cols: n, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&x| x >= 0)
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix, AbelianError> {
        if self.cols != rhs.rows {
            return Err(AbelianError::DimensionMismatch(format!(
                "{}×{} · {}×{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc: i64 = 0;
                for k in 0..self.cols {
                    let term = self.get(i, k).checked_mul(rhs.get(k, j)).ok_or(AbelianError::Overflow)?;
                    acc = acc.checked_add(term).ok_or(AbelianError::Overflow)?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn det2(&self) -> Result<i64, AbelianError> {
        if self.rows != 2 || self.cols != 2 {
            return Err(AbelianError::BadDimension { rows: self.rows, cols: self.cols });
        }
        Ok(self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0))
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

/// Entry `(i, j)` counts target symbol `i` in the image of source symbol `j`.
/// With columns indexed by source symbols, `abelianize(s ∘ t)` equals
/// `abelianize(s) · abelianize(t)`; σ: a→aabaabab, b→aabab gives
/// `[[5, 3], [3, 2]]`.
pub fn abelianize(s: &Substitution) -> IntMatrix {
    let mut m = IntMatrix::zeros(s.target().len(), s.source().len());
    for (j, image) in s.images().iter().enumerate() {
        for &i in image {
            m.set(i, j, m.get(i, j) + 1);
        }
    }
    m
}

/// Exponent-sum matrix of a free group homomorphism, same convention.
pub fn abelianize_hom(h: &GroupHom) -> IntMatrix {
    let mut m = IntMatrix::zeros(h.codomain_rank(), h.domain_rank());
    for (j, image) in h.images().iter().enumerate() {
        for l in image.letters() {
            let d = if l.sign == Sign::Pos { 1 } else { -1 };
            m.set(l.gen, j, m.get(l.gen, j) + d);
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Head {
    /// identity
    I,
    /// the swap `[[0, 1], [1, 0]]`
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    /// `[[1, 0], [1, 1]]`
    L,
    /// `[[1, 1], [0, 1]]`
    R,
}

impl Head {
    pub fn matrix(self) -> IntMatrix {
        match self {
            Head::I => IntMatrix::identity(2),
            Head::S => IntMatrix { rows: 2, cols: 2, data: vec![0, 1, 1, 0] },
        }
    }
}

impl Step {
    pub fn matrix(self) -> IntMatrix {
        match self {
            Step::L => IntMatrix { rows: 2, cols: 2, data: vec![1, 0, 1, 1] },
            Step::R => IntMatrix { rows: 2, cols: 2, data: vec![1, 1, 0, 1] },
        }
    }
}

/// `head · tail[0] · tail[1] · …`, written `I;RLRL` or `S;`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactorChain {
    pub head: Head,
    pub tail: Vec<Step>,
}

impl FactorChain {
    pub fn multiply_out(&self) -> Result<IntMatrix, AbelianError> {
        let mut acc = self.head.matrix();
        for step in &self.tail {
            acc = acc.mul(&step.matrix())?;
        }
        Ok(acc)
    }
}

impl fmt::Display for FactorChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match self.head {
            Head::I => 'I',
            Head::S => 'S',
        };
        write!(f, "{head};")?;
        for s in &self.tail {
            f.write_str(match s {
                Step::L => "L",
                Step::R => "R",
            })?;
        }
        Ok(())
    }
}

impl FromStr for FactorChain {
    type Err = AbelianError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AbelianError::BadChain(s.to_owned());
        let (head, tail) = s.trim().split_once(';').ok_or_else(bad)?;
        let head = match head.trim() {
            "I" => Head::I,
            "S" => Head::S,
            _ => return Err(bad()),
        };
        let tail = tail
            .trim()
            .chars()
            .map(|c| match c {
                'L' => Ok(Step::L),
                'R' => Ok(Step::R),
                _ => Err(bad()),
            })
            .collect::<Result<_, _>>()?;
        Ok(FactorChain { head, tail })
    }
}

/// The unique factorization of a nonnegative 2×2 matrix of determinant ±1.
/// A negative determinant forces the swap head; the rest is peeled from the
/// left, `R` when the first row dominates the second and `L` otherwise.
pub fn factorize_gl2(m: &IntMatrix) -> Result<FactorChain, AbelianError> {
    let det = m.det2()?;
    if !m.is_nonnegative() {
        return Err(AbelianError::NegativeEntry);
    }
    if det.abs() != 1 {
        return Err(AbelianError::NotUnimodular(det));
    }
    let (head, [mut a, mut b, mut c, mut d]) = if det == -1 {
        (Head::S, [m.get(1, 0), m.get(1, 1), m.get(0, 0), m.get(0, 1)])
    } else {
        (Head::I, [m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1)])
    };
    let mut tail = Vec::new();
    while !(a == 1 && b == 0 && c == 0 && d == 1) {
        if a >= c && b >= d {
            a -= c;
            b -= d;
            tail.push(Step::R);
        } else if c >= a && d >= b {
            c -= a;
            d -= b;
            tail.push(Step::L);
        } else {
            // unreachable for nonnegative unimodular input
            return Err(AbelianError::NotUnimodular(det));
        }
    }
    Ok(FactorChain { head, tail })
}

/// A sequence of labels: finite data, or a prefix followed by a cycle
/// repeated forever. Written `s,s|s,r` (prefix `s,s`, cycle `s,r`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LabelStream {
    Finite(Vec<String>),
    EventuallyPeriodic { prefix: Vec<String>, cycle: Vec<String> },
}

impl LabelStream {
    pub fn periodic(prefix: &[&str], cycle: &[&str]) -> Self {
        assert!(!cycle.is_empty(), "cycle must be non-empty");
        LabelStream::EventuallyPeriodic {
            prefix: prefix.iter().map(|s| s.to_string()).collect(),
            cycle: cycle.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn constant(label: &str) -> Self {
        LabelStream::periodic(&[], &[label])
    }

    pub fn get(&self, i: usize) -> Option<&str> {
        match self {
            LabelStream::Finite(v) => v.get(i).map(String::as_str),
            LabelStream::EventuallyPeriodic { prefix, cycle } => Some(if i < prefix.len() {
                &prefix[i]
            } else {
                &cycle[(i - prefix.len()) % cycle.len()]
            }),
        }
    }

    pub fn labels(&self) -> BTreeSet<&str> {
        match self {
            LabelStream::Finite(v) => v.iter().map(String::as_str).collect(),
            LabelStream::EventuallyPeriodic { prefix, cycle } => {
                prefix.iter().chain(cycle).map(String::as_str).collect()
            }
        }
    }

    /// Labels that occur infinitely often.
    pub fn cofinal_labels(&self) -> Option<BTreeSet<&str>> {
        match self {
            LabelStream::Finite(_) => None,
            LabelStream::EventuallyPeriodic { cycle, .. } => Some(cycle.iter().map(String::as_str).collect()),
        }
    }

    /// Tail equivalent to a stationary stream.
    pub fn is_constant(&self) -> bool {
        self.cofinal_labels().is_some_and(|s| s.len() == 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailVerdict {
    /// `a[offset_a..] == b[offset_b..]`, with the smallest such offsets.
    Equivalent { offset_a: usize, offset_b: usize },
    Distinct,
    Inconclusive,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn tail_equivalent(a: &LabelStream, b: &LabelStream) -> TailVerdict {
    use LabelStream::*;
    match (a, b) {
        (EventuallyPeriodic { prefix: pa, cycle: ca }, EventuallyPeriodic { prefix: pb, cycle: cb }) => {
            // Any matching pair of offsets can be pulled back below
            // prefix + cycle on each side; two eventually periodic words
            // agree everywhere once they agree on pre-period + lcm positions.
            let lcm = ca.len() / gcd(ca.len(), cb.len()) * cb.len();
            let span = pa.len().max(pb.len()) + lcm;
            let mut best: Option<(usize, usize)> = None;
            for i in 0..pa.len() + ca.len() {
                for j in 0..pb.len() + cb.len() {
                    let agree = (0..span).all(|k| a.get(i + k) == b.get(j + k));
                    if agree && best.is_none_or(|(bi, bj)| (i + j, i) < (bi + bj, bi)) {
                        best = Some((i, j));
                    }
                }
            }
            match best {
                Some((offset_a, offset_b)) => TailVerdict::Equivalent { offset_a, offset_b },
                None => TailVerdict::Distinct,
            }
        }
        _ => {
            // Finite data only ever exhibits equivalence: some suffix of the
            // finite side must reappear verbatim on the other side.
            let (fin, other) = match (a, b) {
                (Finite(f), _) => (f, b),
                (_, Finite(f)) => (f, a),
                _ => unreachable!(),
            };
            let other_len = match other {
                Finite(v) => Some(v.len()),
                _ => None,
            };
            for i in 0..fin.len() {
                let rest = &fin[i..];
                let max_j = other_len.map_or(fin.len() * 2 + 64, |n| n);
                for j in 0..max_j {
                    if let Some(n) = other_len {
                        if n - j != rest.len() {
                            continue;
                        }
                    }
                    if rest.iter().enumerate().all(|(k, l)| other.get(j + k) == Some(l.as_str())) {
                        let (offset_a, offset_b) = if matches!(a, Finite(_)) { (i, j) } else { (j, i) };
                        return TailVerdict::Equivalent { offset_a, offset_b };
                    }
                }
            }
            TailVerdict::Inconclusive
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FreeVerdict {
    NoCollisionUpToDepth,
    /// Two distinct words (as generator indices) with equal products; the
    /// first precedes the second in length-then-lexicographic order.
    Collision(Vec<usize>, Vec<usize>),
}

/// Multiplies out every non-empty word of length ≤ `depth` over `mats`, in
/// length-then-lexicographic order, and reports the first repeated product.
pub fn semigroup_free_check(mats: &[IntMatrix], depth: usize) -> Result<FreeVerdict, AbelianError> {
    if depth == 0 {
        return Err(AbelianError::ZeroDepth);
    }
    let first = mats.first().ok_or(AbelianError::Empty)?;
    let n = first.rows;
    if mats.iter().any(|m| m.rows != n || m.cols != n) {
        return Err(AbelianError::DimensionMismatch("matrices must be square of one size".into()));
    }
    let mut seen: HashMap<IntMatrix, Vec<usize>> = HashMap::new();
    let mut layer: Vec<(Vec<usize>, IntMatrix)> = vec![(Vec::new(), IntMatrix::identity(n))];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(layer.len() * mats.len());
        for (word, product) in &layer {
            for (g, m) in mats.iter().enumerate() {
                let mut w = word.clone();
                w.push(g);
                let p = product.mul(m)?;
                if let Some(prev) = seen.get(&p) {
                    return Ok(FreeVerdict::Collision(prev.clone(), w));
                }
                seen.insert(p.clone(), w.clone());
                next.push((w, p));
            }
        }
        layer = next;
    }
    Ok(FreeVerdict::NoCollisionUpToDepth)
}

/// Depth used for the freeness precondition in [`classify_family`].
pub const FREENESS_DEPTH: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyVerdict {
    FlowEquivalent(String),
    Distinct(String),
    Unknown(String),
}

/// σ: a→aabaabab, b→aabab and ρ: a→ba, b→bba give flow equivalent
/// stationary spaces (both are the Fibonacci tiling space up to flow
/// equivalence).
fn is_sigma_rho_pair(x: &Substitution, y: &Substitution) -> bool {
    let sigma = Substitution::from_spelled(&["aabaabab", "aabab"]).expect("valid");
    let rho = Substitution::from_spelled(&["ba", "bba"]).expect("valid");
    let same = |s: &Substitution, t: &Substitution| s.images() == t.images();
    (same(x, &sigma) && same(y, &rho)) || (same(x, &rho) && same(y, &sigma))
}

struct LabelInfo {
    sub: Substitution,
    hom: GroupHom,
    invertible: bool,
}

fn stream_sequence(stream: &LabelStream, info: &BTreeMap<&str, LabelInfo>) -> Option<SequenceSpec> {
    let LabelStream::EventuallyPeriodic { prefix, cycle } = stream else {
        return None;
    };
    let subs = |v: &[String]| v.iter().map(|l| info[l.as_str()].sub.clone()).collect::<Vec<_>>();
    SequenceSpec::eventually_periodic(subs(prefix), subs(cycle)).ok()
}

/// Partition of labels into positive trope classes, as class indices.
fn trope_classes(labels: &[&str], info: &BTreeMap<&str, LabelInfo>) -> Result<BTreeMap<String, usize>, AbelianError> {
    let mut reps: Vec<&str> = Vec::new();
    let mut class = BTreeMap::new();
    for &l in labels {
        let mut found = None;
        for (k, r) in reps.iter().enumerate() {
            if are_trope_related(&info[l].hom, &info[r].hom)? {
                found = Some(k);
                break;
            }
        }
        let k = found.unwrap_or_else(|| {
            reps.push(l);
            reps.len() - 1
        });
        class.insert(l.to_owned(), k);
    }
    Ok(class)
}

/// Compares the flow spaces of two label streams, each label naming a
/// substitution on a common alphabet. Only conclusions licensed by the
/// following facts are drawn; everything else is `Unknown`:
///
/// * tail equivalent expansions give flow equivalent spaces;
/// * levelwise trope related bonding maps give flow equivalent spaces;
/// * the stationary σ and ρ spaces are flow equivalent;
/// * all-invertible versus cofinally non-invertible bonding maps cannot be
///   flow equivalent;
/// * for non-constant streams over primitive proper maps whose abelianizations
///   freely generate their semigroup, flow equivalence is tail equivalence.
pub fn classify_family(
    a: &LabelStream,
    b: &LabelStream,
    dictionary: &BTreeMap<String, Substitution>,
) -> Result<FamilyVerdict, AbelianError> {
    let used: BTreeSet<&str> = a.labels().union(&b.labels()).copied().collect();
    let mut alphabet: Option<&Alphabet> = None;
    let mut info = BTreeMap::new();
    for &l in &used {
        let sub = dictionary.get(l).ok_or_else(|| AbelianError::UnknownLabel(l.to_owned()))?;
        if !sub.is_endomorphism() {
            return Err(AbelianError::AlphabetMismatch(format!("{l} is not an endomorphism")));
        }
        match alphabet {
            Some(x) if x != sub.source() => {
                return Err(AbelianError::AlphabetMismatch(format!("{l} uses {:?}, expected {x:?}", sub.source())));
            }
            _ => alphabet = Some(sub.source()),
        }
        let hom = hom_from_substitution(sub);
        let invertible = is_invertible(&hom)?;
        info.insert(l, LabelInfo { sub: sub.clone(), hom, invertible });
    }

    let (Some(seq_a), Some(seq_b)) = (stream_sequence(a, &info), stream_sequence(b, &info)) else {
        return Ok(FamilyVerdict::Unknown("finite label data".into()));
    };
    for (name, seq) in [("first", &seq_a), ("second", &seq_b)] {
        if let Err(why) = validate_pps(seq, crate::symbolic::DEFAULT_WINDOW) {
            return Ok(FamilyVerdict::Unknown(format!("{name} stream is not a primitive proper sequence: {why}")));
        }
    }

    if let TailVerdict::Equivalent { offset_a, offset_b } = tail_equivalent(a, b) {
        return Ok(FamilyVerdict::FlowEquivalent(format!(
            "expansions are tail equivalent (offsets {offset_a}, {offset_b})"
        )));
    }

    let cof_a = a.cofinal_labels().expect("periodic");
    let cof_b = b.cofinal_labels().expect("periodic");
    let all_invertible = |s: &BTreeSet<&str>| s.iter().all(|l| info[l].invertible);
    let some_singular = |s: &BTreeSet<&str>| s.iter().find(|l| !info[*l].invertible).map(|l| l.to_string());
    for (x, y, yname) in [(&cof_a, &cof_b, "second"), (&cof_b, &cof_a, "first")] {
        if all_invertible(x) {
            if let Some(l) = some_singular(y) {
                return Ok(FamilyVerdict::Distinct(format!(
                    "{yname} stream has cofinally many non-invertible maps ({l}) while the other's are all invertible"
                )));
            }
        }
    }

    let labels: Vec<&str> = cof_a.union(&cof_b).copied().collect();
    let classes = trope_classes(&labels, &info)?;
    let class_set = |s: &BTreeSet<&str>| s.iter().map(|l| classes[*l]).collect::<BTreeSet<_>>();
    let (ka, kb) = (class_set(&cof_a), class_set(&cof_b));
    if ka.len() == 1 && ka == kb {
        return Ok(FamilyVerdict::FlowEquivalent(
            "all cofinal bonding maps are positive trope related to one map".into(),
        ));
    }
    if ka.len() == 1 && kb.len() == 1 {
        let rep = |k: usize| labels.iter().find(|l| classes[**l] == k).copied().expect("class has a label");
        let (x, y) = (rep(*ka.first().unwrap()), rep(*kb.first().unwrap()));
        if is_sigma_rho_pair(&info[x].sub, &info[y].sub) {
            return Ok(FamilyVerdict::FlowEquivalent(
                "stationary σ and ρ spaces are both the Fibonacci space up to flow equivalence".into(),
            ));
        }
    }

    if !a.is_constant() && !b.is_constant() {
        let all_pp = used.iter().all(|l| {
            let s = &info[l].sub;
            crate::symbolic::is_proper(s) && crate::symbolic::is_primitive(s)
        });
        let mats: Vec<IntMatrix> = used.iter().map(|l| abelianize(&info[l].sub)).collect();
        if all_pp {
            return Ok(match semigroup_free_check(&mats, FREENESS_DEPTH)? {
                FreeVerdict::NoCollisionUpToDepth => FamilyVerdict::Distinct(format!(
                    "non-constant expansions are not tail equivalent and the abelianizations \
                     generate freely up to depth {FREENESS_DEPTH}"
                )),
                FreeVerdict::Collision(..) => {
                    FamilyVerdict::Unknown("abelianizations do not generate a free semigroup".into())
                }
            });
        }
    }
    Ok(FamilyVerdict::Unknown("no applicable invariant separates or identifies these streams".into()))
}
