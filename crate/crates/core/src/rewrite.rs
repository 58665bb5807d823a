//! Factor languages of primitive substitutions and the return-word rewrite
//! that turns a primitive aperiodic substitution into a proper one.
//!
//! Pick a junction `ab` that occurs in the language, with `σᵏ(a)` ending in
//! `a` and `σᵏ(b)` starting with `b`. The words between consecutive
//! occurrences of `ab` in the fixed point `σᵏ^∞(a).σᵏ^∞(b)` are the tiles;
//! `σᵏ` maps tiles to concatenations of tiles because it preserves the
//! boundaries, which gives a substitution on the tile alphabet.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::symbolic::{
    is_proper, sequence_is_primitive, Alphabet, PrimitiveVerdict, SequenceSpec, Substitution, SymbolicError,
    DEFAULT_WINDOW,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("substitution is not primitive")]
    NotPrimitive,
    #[error("source and target alphabets differ")]
    NotEndomorphic,
    #[error("invalid junction: {0}")]
    InvalidJunction(String),
    #[error("horizon {0} too small: the tile set did not close up")]
    HorizonTooSmall(usize),
    #[error("only one return word found; the substitution looks periodic")]
    SingleReturnWord,
    #[error("no power up to {0} of the junction exponent gives a proper substitution")]
    NotProper(usize),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

/// All factors of length `≤ max_len` of the subshift of a substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageTable {
    alphabet: Alphabet,
    by_length: Vec<BTreeSet<Vec<usize>>>,
}

impl LanguageTable {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn max_len(&self) -> usize {
        self.by_length.len() - 1
    }

    /// Factors of length exactly `len`, in lexicographic order of indices.
    pub fn factors(&self, len: usize) -> &BTreeSet<Vec<usize>> {
        &self.by_length[len]
    }

    pub fn contains(&self, word: &[usize]) -> bool {
        self.by_length.get(word.len()).is_some_and(|s| s.contains(word))
    }

    pub fn spelled(&self, len: usize) -> Vec<String> {
        self.by_length[len].iter().map(|w| self.alphabet.spell(w)).collect()
    }
}

fn check_input(s: &Substitution) -> Result<(), RewriteError> {
    if !s.is_endomorphism() {
        return Err(RewriteError::NotEndomorphic);
    }
    // some power must be primitive, as for a→ab, b→a
    let seq = SequenceSpec::constant(s.clone())?;
    if sequence_is_primitive(&seq, DEFAULT_WINDOW)? != PrimitiveVerdict::Primitive {
        return Err(RewriteError::NotPrimitive);
    }
    Ok(())
}

fn windows_into(word: &[usize], len: usize, out: &mut BTreeSet<Vec<usize>>) {
    if len == 0 {
        out.insert(Vec::new());
        return;
    }
    for w in word.windows(len) {
        out.insert(w.to_vec());
    }
}

/// Two-letter factors: closure of the pairs inside letter images under
/// `yz ↦ pairs of σ(yz)`.
fn legal_pairs(s: &Substitution) -> BTreeSet<Vec<usize>> {
    let mut pairs = BTreeSet::new();
    for image in s.images() {
        windows_into(image, 2, &mut pairs);
    }
    let mut frontier: Vec<Vec<usize>> = pairs.iter().cloned().collect();
    while let Some(p) = frontier.pop() {
        for w in s.apply(&p).windows(2) {
            if pairs.insert(w.to_vec()) {
                frontier.push(w.to_vec());
            }
        }
    }
    pairs
}

pub fn language(s: &Substitution, max_len: usize) -> Result<LanguageTable, RewriteError> {
    check_input(s)?;
    let n = s.source().len();
    let mut top = BTreeSet::new();
    if s.images().iter().all(|im| im.len() == 1) {
        // only a → a is primitive among length-preserving maps
        debug_assert_eq!(n, 1);
        top.insert(vec![0; max_len]);
    } else if max_len <= 1 {
        for x in 0..n {
            top.insert(vec![x; max_len]);
        }
    } else {
        // Once every σᵐ(x) has length ≥ max_len − 1, each factor of length
        // max_len sits inside σᵐ(yz) for a legal pair yz.
        let pairs = legal_pairs(s);
        let mut power = s.clone();
        while power.images().iter().map(Vec::len).min().unwrap_or(0) + 1 < max_len {
            power = crate::symbolic::compose(&power, s)?;
        }
        for p in &pairs {
            windows_into(&power.apply(p), max_len, &mut top);
        }
    }
    let mut by_length = vec![BTreeSet::new(); max_len + 1];
    for (len, set) in by_length.iter_mut().enumerate() {
        for w in &top {
            windows_into(w, len, set);
        }
    }
    Ok(LanguageTable { alphabet: s.source().clone(), by_length })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Junction {
    pub left: usize,
    pub right: usize,
    /// `σᵏ(left)` ends with `left` and `σᵏ(right)` starts with `right`.
    pub k: usize,
}

fn first_last_maps(s: &Substitution) -> (Vec<usize>, Vec<usize>) {
    let first = s.images().iter().map(|im| im[0]).collect();
    let last = s.images().iter().map(|im| im[im.len() - 1]).collect();
    (first, last)
}

/// Every junction with exponent `≤ max_k`, smallest exponent per pair,
/// ordered by `(left, right)`.
pub fn junction_candidates(s: &Substitution, max_k: usize) -> Result<Vec<Junction>, RewriteError> {
    check_input(s)?;
    let pairs = legal_pairs(s);
    let (first, last) = first_last_maps(s);
    let n = s.source().len();
    let mut out = Vec::new();
    for left in 0..n {
        for right in 0..n {
            if !pairs.contains(&vec![left, right]) {
                continue;
            }
            let (mut l, mut r) = (left, right);
            for k in 1..=max_k {
                l = last[l];
                r = first[r];
                if l == left && r == right {
                    out.push(Junction { left, right, k });
                    break;
                }
            }
        }
    }
    Ok(out)
}

fn validate_junction(s: &Substitution, j: &Junction) -> Result<(), RewriteError> {
    let n = s.source().len();
    if j.left >= n || j.right >= n || j.k == 0 {
        return Err(RewriteError::InvalidJunction(format!("{j:?} out of range")));
    }
    let (first, last) = first_last_maps(s);
    let (mut l, mut r) = (j.left, j.right);
    for _ in 0..j.k {
        l = last[l];
        r = first[r];
    }
    if l != j.left || r != j.right {
        return Err(RewriteError::InvalidJunction(format!(
            "σ^{} does not fix the junction letters",
            j.k
        )));
    }
    if !legal_pairs(s).contains(&vec![j.left, j.right]) {
        return Err(RewriteError::InvalidJunction("junction word does not occur".into()));
    }
    Ok(())
}

/// For a proper substitution: (common last letter, common first letter).
pub fn canonical_junction(s: &Substitution) -> Option<Junction> {
    if !is_proper(s) || !s.is_endomorphism() {
        return None;
    }
    let im = &s.images()[0];
    Some(Junction { left: im[im.len() - 1], right: im[0], k: 1 })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProperRewrite {
    /// Tiles over the original alphabet, in order of first occurrence.
    pub tiles: Vec<Vec<usize>>,
    /// Substitution on the tile alphabet `A, B, C, …`.
    pub rewritten: Substitution,
    /// The junction with the exponent actually used.
    pub junction: Junction,
}

impl ProperRewrite {
    /// Spells a word over the tile alphabet back in the original alphabet.
    pub fn flatten(&self, word: &[usize]) -> Vec<usize> {
        word.iter().flat_map(|&t| self.tiles[t].iter().copied()).collect()
    }
}

/// Escalation limit for the junction exponent.
const MAX_ESCALATION: usize = 8;

fn tile_alphabet(count: usize) -> Result<Alphabet, SymbolicError> {
    if count <= 26 {
        Alphabet::new((0..count).map(|i| ((b'A' + i as u8) as char).to_string()))
    } else {
        Alphabet::new((0..count).map(|i| format!("T{i}")))
    }
}

fn boundaries(word: &[usize], j: &Junction) -> Vec<usize> {
    let mut out = vec![0];
    out.extend((1..word.len()).filter(|&i| word[i - 1] == j.left && word[i] == j.right));
    out
}

pub fn rewrite_proper(s: &Substitution, j: Junction, horizon: usize) -> Result<ProperRewrite, RewriteError> {
    check_input(s)?;
    validate_junction(s, &j)?;
    if horizon == 0 {
        return Err(RewriteError::HorizonTooSmall(0));
    }
    let base = s.power(j.k)?;

    // σᵏ(b) starts with b, so iterating from b grows one fixed point.
    let mut u = vec![j.right];
    while u.len() < horizon {
        let next = base.apply(&u);
        if next.len() == u.len() {
            break;
        }
        u = next;
    }
    let scan = &u[..horizon.min(u.len())];
    let cuts = boundaries(scan, &j);
    let mut tiles: Vec<Vec<usize>> = Vec::new();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    for w in cuts.windows(2) {
        let tile = scan[w[0]..w[1]].to_vec();
        if !index.contains_key(&tile) {
            index.insert(tile.clone(), tiles.len());
            tiles.push(tile);
        }
    }
    if tiles.is_empty() {
        return Err(RewriteError::HorizonTooSmall(horizon));
    }
    if tiles.len() == 1 {
        return Err(RewriteError::SingleReturnWord);
    }
    let alphabet = tile_alphabet(tiles.len())?;

    let mut power = base.clone();
    for m in 1..=MAX_ESCALATION {
        let mut images = Vec::with_capacity(tiles.len());
        for tile in &tiles {
            let image = power.apply(tile);
            let mut cuts = boundaries(&image, &j);
            cuts.push(image.len());
            let parsed = cuts
                .windows(2)
                .map(|w| index.get(&image[w[0]..w[1]]).copied())
                .collect::<Option<Vec<_>>>()
                .ok_or(RewriteError::HorizonTooSmall(horizon))?;
            images.push(parsed);
        }
        let rewritten =
            Substitution::endo(alphabet.clone(), images).map_err(|_| RewriteError::HorizonTooSmall(horizon))?;
        if is_proper(&rewritten) {
            let junction = Junction { k: j.k * m, ..j };
            return Ok(ProperRewrite { tiles, rewritten, junction });
        }
        power = crate::symbolic::compose(&power, &base)?;
    }
    Err(RewriteError::NotProper(j.k * MAX_ESCALATION))
}

/// `|A|² · |σ^{2k}(w)|` for the longest letter image `w`.
pub fn default_horizon(s: &Substitution, k: usize) -> usize {
    let longest = s.images().iter().max_by_key(|im| im.len()).expect("non-empty alphabet");
    let n = s.source().len();
    n * n * s.apply_power(longest, 2 * k).len()
}

/// [`rewrite_proper`] starting from [`default_horizon`], doubling the horizon
/// up to four times while the tile set fails to close up.
pub fn rewrite_proper_auto(s: &Substitution, j: Junction) -> Result<ProperRewrite, RewriteError> {
    check_input(s)?;
    validate_junction(s, &j)?;
    let mut horizon = default_horizon(s, j.k);
    for attempt in 0..=4 {
        match rewrite_proper(s, j, horizon) {
            Err(RewriteError::HorizonTooSmall(_)) if attempt < 4 => horizon *= 2,
            other => return other,
        }
    }
    unreachable!()
}
