//! Line-oriented text formats.
//!
//! ```text
//! # Thue–Morse
//! alphabet: a b
//! a -> a b b a
//! b -> b a a b
//! ```
//!
//! `#` starts a comment. A `target:` line follows `alphabet:` when the
//! target alphabet differs. Homomorphism files use the same layout, with a
//! trailing `'` marking an inverse letter and empty images allowed. Conjugate
//! zigzag files hold `[top n]`, `[bottom n]`, `[down n]` and `[up n]`
//! sections of rules plus `conj-up n:` and `conj-down n:` word lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::abelian::{IntMatrix, LabelStream};
use crate::freegroup::{GroupHom, GroupWord, Letter, Sign};
use crate::symbolic::{is_valid_identifier, Alphabet, Substitution};
use crate::trope::CzzWitness;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}, column {col}: expected {expected}")]
    Syntax { line: usize, col: usize, expected: String },
    #[error("{0}")]
    Validation(String),
}

fn syntax(line: usize, col: usize, expected: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, col, expected: expected.into() }
}

/// A non-comment line with its 1-based number.
struct Line<'a> {
    number: usize,
    text: &'a str,
}

impl Line<'_> {
    /// 1-based column of a subslice of this line.
    fn col_of(&self, part: &str) -> usize {
        let offset = part.as_ptr() as usize - self.text.as_ptr() as usize;
        self.text[..offset].chars().count() + 1
    }

    fn end_col(&self) -> usize {
        self.text.chars().count() + 1
    }
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let text = raw.split('#').next().unwrap_or("").trim_end();
        (!text.trim().is_empty()).then_some(Line { number: i + 1, text })
    })
}

fn tokens(s: &str) -> impl Iterator<Item = &str> {
    s.split_whitespace()
}

fn parse_alphabet(line: &Line, rest: &str) -> Result<Alphabet, FormatError> {
    let symbols: Vec<&str> = tokens(rest).collect();
    if symbols.is_empty() {
        return Err(syntax(line.number, line.end_col(), "at least one symbol"));
    }
    for s in &symbols {
        if s.contains('\'') || s.contains("->") || s.ends_with(':') {
            return Err(syntax(line.number, line.col_of(s), "a symbol name"));
        }
    }
    Alphabet::new(symbols.iter().copied()).map_err(|e| FormatError::Validation(e.to_string()))
}

#[derive(Debug, Default)]
struct Header {
    source: Option<Alphabet>,
    target: Option<Alphabet>,
}

impl Header {
    /// Handles `alphabet:` and `target:` lines; returns false for anything else.
    fn accept(&mut self, line: &Line) -> Result<bool, FormatError> {
        let t = line.text.trim_start();
        if let Some(rest) = t.strip_prefix("alphabet:") {
            if self.source.is_some() {
                return Err(syntax(line.number, line.col_of(t), "a single alphabet line"));
            }
            self.source = Some(parse_alphabet(line, rest)?);
            Ok(true)
        } else if let Some(rest) = t.strip_prefix("target:") {
            if self.source.is_none() {
                return Err(syntax(line.number, line.col_of(t), "alphabet line before target line"));
            }
            if self.target.is_some() {
                return Err(syntax(line.number, line.col_of(t), "a single target line"));
            }
            self.target = Some(parse_alphabet(line, rest)?);
            Ok(true)
        } else {
            Ok(false)
        }
    }

    fn alphabets(&self) -> Option<(Alphabet, Alphabet)> {
        let source = self.source.clone()?;
        let target = self.target.clone().unwrap_or_else(|| source.clone());
        Some((source, target))
    }
}

/// Rules `SYM -> w`, keyed by source index, with words of (target index, sign).
struct RuleSet {
    images: Vec<Option<Vec<Letter>>>,
}

impl RuleSet {
    fn new(n: usize) -> Self {
        RuleSet { images: vec![None; n] }
    }

    fn accept(
        &mut self,
        line: &Line,
        source: &Alphabet,
        target: &Alphabet,
        allow_inverse: bool,
    ) -> Result<(), FormatError> {
        let Some((lhs, rhs)) = line.text.split_once("->") else {
            return Err(syntax(line.number, line.col_of(line.text.trim_start()), "a rule `SYM -> SYM ...`"));
        };
        let lhs_tokens: Vec<&str> = tokens(lhs).collect();
        let [sym] = lhs_tokens[..] else {
            let col = lhs_tokens.get(1).map_or(line.col_of(lhs), |t| line.col_of(t));
            return Err(syntax(line.number, col, "exactly one symbol before `->`"));
        };
        let index = source
            .index_of(sym)
            .ok_or_else(|| FormatError::Validation(format!("line {}: unknown source symbol {sym:?}", line.number)))?;
        if self.images[index].is_some() {
            return Err(syntax(line.number, line.col_of(sym), format!("a single rule for {sym:?}")));
        }
        let mut word = Vec::new();
        for tok in tokens(rhs) {
            let (name, sign) = match tok.strip_suffix('\'') {
                Some(name) if allow_inverse => (name, Sign::Neg),
                Some(_) => return Err(syntax(line.number, line.col_of(tok), "a symbol without `'`")),
                None => (tok, Sign::Pos),
            };
            let gen = target.index_of(name).ok_or_else(|| {
                FormatError::Validation(format!("line {}: unknown target symbol {name:?}", line.number))
            })?;
            word.push(Letter { gen, sign });
        }
        self.images[index] = Some(word);
        Ok(())
    }

    fn finish(self, source: &Alphabet) -> Result<Vec<Vec<Letter>>, FormatError> {
        self.images
            .into_iter()
            .enumerate()
            .map(|(i, w)| w.ok_or_else(|| FormatError::Validation(format!("no rule for {:?}", source.symbol(i)))))
            .collect()
    }
}

fn missing_alphabet(line: &Line) -> FormatError {
    syntax(line.number, line.col_of(line.text.trim_start()), "`alphabet:` line")
}

struct MapFile {
    source: Alphabet,
    target: Alphabet,
    images: Vec<Vec<Letter>>,
}

fn parse_map(text: &str, allow_inverse: bool) -> Result<MapFile, FormatError> {
    let mut header = Header::default();
    let mut rules: Option<RuleSet> = None;
    let mut last_line = 0;
    for line in lines(text) {
        last_line = line.number;
        if rules.is_none() && header.accept(&line)? {
            continue;
        }
        let Some((source, target)) = header.alphabets() else {
            return Err(missing_alphabet(&line));
        };
        rules
            .get_or_insert_with(|| RuleSet::new(source.len()))
            .accept(&line, &source, &target, allow_inverse)?;
    }
    let Some((source, target)) = header.alphabets() else {
        return Err(syntax(last_line.max(1), 1, "`alphabet:` line"));
    };
    let images = rules.unwrap_or_else(|| RuleSet::new(source.len())).finish(&source)?;
    Ok(MapFile { source, target, images })
}

pub fn parse_substitution(text: &str) -> Result<Substitution, FormatError> {
    let m = parse_map(text, false)?;
    let images = m.images.into_iter().map(|w| w.into_iter().map(|l| l.gen).collect()).collect();
    Substitution::new(m.source, m.target, images).map_err(|e| FormatError::Validation(e.to_string()))
}

fn render_header(out: &mut String, source: &Alphabet, target: &Alphabet) {
    let _ = writeln!(out, "alphabet: {}", source.symbols().join(" "));
    if target != source {
        let _ = writeln!(out, "target: {}", target.symbols().join(" "));
    }
}

fn render_rule(out: &mut String, name: &str, image: &str) {
    if image.is_empty() {
        let _ = writeln!(out, "{name} ->");
    } else {
        let _ = writeln!(out, "{name} -> {image}");
    }
}

pub fn render_substitution(s: &Substitution) -> String {
    let mut out = String::new();
    render_header(&mut out, s.source(), s.target());
    for (i, image) in s.images().iter().enumerate() {
        let spelled: Vec<&str> = image.iter().map(|&x| s.target().symbol(x)).collect();
        render_rule(&mut out, s.source().symbol(i), &spelled.join(" "));
    }
    out
}

/// A homomorphism together with the names of its generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedHom {
    pub source: Alphabet,
    pub target: Alphabet,
    pub hom: GroupHom,
}

fn to_word(rank: usize, letters: Vec<Letter>) -> Result<GroupWord, FormatError> {
    crate::freegroup::reduce(rank, letters).map_err(|e| FormatError::Validation(e.to_string()))
}

pub fn parse_hom(text: &str) -> Result<NamedHom, FormatError> {
    let m = parse_map(text, true)?;
    let rank = m.target.len();
    let images = m.images.into_iter().map(|w| to_word(rank, w)).collect::<Result<_, _>>()?;
    let hom = GroupHom::new(rank, images).map_err(|e| FormatError::Validation(e.to_string()))?;
    Ok(NamedHom { source: m.source, target: m.target, hom })
}

pub fn render_hom(h: &NamedHom) -> String {
    let mut out = String::new();
    render_header(&mut out, &h.source, &h.target);
    for (i, w) in h.hom.images().iter().enumerate() {
        render_rule(&mut out, h.source.symbol(i), &w.display_with(&h.target));
    }
    out
}

/// Whitespace-separated letters with `'` for inverses; blank is the identity.
pub fn parse_word(text: &str, names: &Alphabet) -> Result<GroupWord, FormatError> {
    let mut letters = Vec::new();
    for tok in tokens(text) {
        let col = tok.as_ptr() as usize - text.as_ptr() as usize + 1;
        let (name, sign) = match tok.strip_suffix('\'') {
            Some(name) => (name, Sign::Neg),
            None => (tok, Sign::Pos),
        };
        let gen = names.index_of(name).ok_or_else(|| syntax(1, col, format!("a generator of {names:?}")))?;
        letters.push(Letter { gen, sign });
    }
    to_word(names.len(), letters)
}

/// Rows separated by `;`, entries by whitespace: `5 3; 3 2`.
pub fn parse_matrix(text: &str) -> Result<IntMatrix, FormatError> {
    let mut rows = Vec::new();
    for row in text.split(';') {
        let mut entries = Vec::new();
        for tok in tokens(row) {
            let col = tok.as_ptr() as usize - text.as_ptr() as usize + 1;
            entries.push(tok.parse::<i64>().map_err(|_| syntax(1, col, "an integer"))?);
        }
        if entries.is_empty() {
            let col = row.as_ptr() as usize - text.as_ptr() as usize + 1;
            return Err(syntax(1, col, "a non-empty row"));
        }
        rows.push(entries);
    }
    IntMatrix::from_rows(rows).map_err(|e| FormatError::Validation(e.to_string()))
}

pub fn render_matrix(m: &IntMatrix) -> String {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(i64::to_string).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("; ")
}

fn parse_labels(part: &str, whole: &str) -> Result<Vec<String>, FormatError> {
    if part.trim().is_empty() {
        return Ok(Vec::new());
    }
    part.split(',')
        .map(|l| {
            let label = l.trim();
            if label.is_empty() || !is_valid_identifier(label) || label.contains('|') {
                let col = l.as_ptr() as usize - whole.as_ptr() as usize + 1;
                Err(syntax(1, col, "a label"))
            } else {
                Ok(label.to_owned())
            }
        })
        .collect()
}

/// `prefix|cycle` with comma-separated labels; no `|` means finite data.
pub fn parse_stream(text: &str) -> Result<LabelStream, FormatError> {
    match text.split_once('|') {
        None => {
            let labels = parse_labels(text, text)?;
            if labels.is_empty() {
                return Err(syntax(1, 1, "at least one label"));
            }
            Ok(LabelStream::Finite(labels))
        }
        Some((prefix, cycle)) => {
            let prefix = parse_labels(prefix, text)?;
            let cycle_labels = parse_labels(cycle, text)?;
            if cycle_labels.is_empty() {
                let col = cycle.as_ptr() as usize - text.as_ptr() as usize + 1;
                return Err(syntax(1, col, "a non-empty cycle"));
            }
            Ok(LabelStream::EventuallyPeriodic { prefix, cycle: cycle_labels })
        }
    }
}

pub fn render_stream(s: &LabelStream) -> String {
    match s {
        LabelStream::Finite(v) => v.join(","),
        LabelStream::EventuallyPeriodic { prefix, cycle } => format!("{}|{}", prefix.join(","), cycle.join(",")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Top,
    Bottom,
    Down,
    Up,
}

impl Section {
    fn name(self) -> &'static str {
        match self {
            Section::Top => "top",
            Section::Bottom => "bottom",
            Section::Down => "down",
            Section::Up => "up",
        }
    }
}

fn parse_index(line: &Line, s: &str) -> Result<usize, FormatError> {
    s.trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| syntax(line.number, line.col_of(s.trim_start()), "a level number ≥ 1"))
}

/// A conjugate zigzag diagram over one alphabet.
pub fn parse_czz(text: &str) -> Result<(Alphabet, CzzWitness), FormatError> {
    let mut header = Header::default();
    let mut maps: BTreeMap<(Section, usize), RuleSet> = BTreeMap::new();
    let mut conjugators: BTreeMap<(bool, usize), GroupWord> = BTreeMap::new();
    let mut current: Option<(Section, usize)> = None;
    let mut alphabet: Option<Alphabet> = None;

    for line in lines(text) {
        let t = line.text.trim();
        if alphabet.is_none() {
            if header.accept(&line)? {
                if header.target.is_some() {
                    return Err(syntax(line.number, 1, "one alphabet shared by all maps"));
                }
                continue;
            }
            alphabet = Some(header.source.clone().ok_or_else(|| missing_alphabet(&line))?);
        }
        let names = alphabet.as_ref().expect("set above");
        if let Some(inner) = t.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| syntax(line.number, line.end_col(), "`]`"))?;
            let (kind, n) = inner
                .trim()
                .split_once(char::is_whitespace)
                .ok_or_else(|| syntax(line.number, line.col_of(inner), "`[kind n]`"))?;
            let section = match kind {
                "top" => Section::Top,
                "bottom" => Section::Bottom,
                "down" => Section::Down,
                "up" => Section::Up,
                _ => return Err(syntax(line.number, line.col_of(kind), "top, bottom, down or up")),
            };
            let key = (section, parse_index(&line, n)?);
            if maps.contains_key(&key) {
                return Err(syntax(line.number, line.col_of(t), "each section once"));
            }
            maps.insert(key, RuleSet::new(names.len()));
            current = Some(key);
        } else if let Some((head, word)) = t.split_once(':').filter(|(h, _)| h.starts_with("conj-")) {
            let (is_up, n) = if let Some(n) = head.strip_prefix("conj-up") {
                (true, n)
            } else if let Some(n) = head.strip_prefix("conj-down") {
                (false, n)
            } else {
                return Err(syntax(line.number, line.col_of(head), "conj-up or conj-down"));
            };
            let key = (is_up, parse_index(&line, n)?);
            let w = parse_word(word, names).map_err(|e| match e {
                FormatError::Syntax { col, expected, .. } => {
                    syntax(line.number, line.col_of(word) + col - 1, expected)
                }
                other => other,
            })?;
            if conjugators.insert(key, w).is_some() {
                return Err(syntax(line.number, line.col_of(t), "each conjugator once"));
            }
            current = None;
        } else {
            let key = current.ok_or_else(|| syntax(line.number, line.col_of(t), "a section header"))?;
            maps.get_mut(&key).expect("section exists").accept(&line, names, names, true)?;
        }
    }

    let names = alphabet
        .or(header.source)
        .ok_or_else(|| syntax(1, 1, "`alphabet:` line"))?;
    let rank = names.len();
    let levels = maps.keys().filter(|(s, _)| *s == Section::Top).count();
    let mut homs: BTreeMap<(Section, usize), GroupHom> = BTreeMap::new();
    for (key, rules) in maps {
        let images = rules
            .finish(&names)?
            .into_iter()
            .map(|w| to_word(rank, w))
            .collect::<Result<_, _>>()?;
        homs.insert(key, GroupHom::new(rank, images).map_err(|e| FormatError::Validation(e.to_string()))?);
    }
    let mut take = |section: Section, count: usize| -> Result<Vec<GroupHom>, FormatError> {
        (1..=count)
            .map(|n| {
                homs.remove(&(section, n))
                    .ok_or_else(|| FormatError::Validation(format!("missing section [{} {n}]", section.name())))
            })
            .collect()
    };
    let top = take(Section::Top, levels)?;
    let bottom = take(Section::Bottom, levels)?;
    let downs = take(Section::Down, levels + 1)?;
    let ups = take(Section::Up, levels)?;
    if let Some(((s, n), _)) = homs.into_iter().next() {
        return Err(FormatError::Validation(format!("unexpected section [{} {n}] for {levels} levels", s.name())));
    }
    let mut conj = |is_up: bool| -> Vec<GroupWord> {
        (1..=levels)
            .map(|n| conjugators.remove(&(is_up, n)).unwrap_or_else(|| GroupWord::identity(rank)))
            .collect()
    };
    let up_conjugators = conj(true);
    let down_conjugators = conj(false);
    if let Some(((is_up, n), _)) = conjugators.into_iter().next() {
        let kind = if is_up { "up" } else { "down" };
        return Err(FormatError::Validation(format!("conj-{kind} {n} has no matching level")));
    }
    Ok((names, CzzWitness { top, bottom, downs, ups, up_conjugators, down_conjugators }))
}

pub fn render_czz(names: &Alphabet, w: &CzzWitness) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "alphabet: {}", names.symbols().join(" "));
    let section = |out: &mut String, title: String, h: &GroupHom| {
        let _ = writeln!(out, "[{title}]");
        for (i, img) in h.images().iter().enumerate() {
            render_rule(out, names.symbol(i), &img.display_with(names));
        }
    };
    for (kind, maps) in [("top", &w.top), ("bottom", &w.bottom), ("down", &w.downs), ("up", &w.ups)] {
        for (i, h) in maps.iter().enumerate() {
            section(&mut out, format!("{kind} {}", i + 1), h);
        }
    }
    for (kind, words) in [("up", &w.up_conjugators), ("down", &w.down_conjugators)] {
        for (i, c) in words.iter().enumerate() {
            let _ = writeln!(out, "conj-{kind} {}: {}", i + 1, c.display_with(names));
        }
    }
    out.lines().map(|l| l.trim_end().to_owned() + "\n").collect()
}
