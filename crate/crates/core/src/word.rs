//! Edge labels, signed letters, edge ends and edge words.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Name of an edge. Unique within a track.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeLabel(Arc<str>);

impl EdgeLabel {
    pub fn new(name: &str) -> Self {
        EdgeLabel(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for EdgeLabel {
    fn from(s: &str) -> Self {
        EdgeLabel::new(s)
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl Serialize for EdgeLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for EdgeLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(EdgeLabel::new(&s))
    }
}

pub(crate) fn valid_label(s: &str) -> bool {
    !s.is_empty()
        && !s.starts_with('-')
        && s.chars().all(|c| {
            !c.is_whitespace() && !matches!(c, '(' | ')' | '/' | ';' | '=' | '[' | ']' | '#')
        })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Reversed,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Reversed,
            Direction::Reversed => Direction::Forward,
        }
    }
}

/// An oriented traversal of an edge: `x` or its reverse `x̄` (written `-x`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub label: EdgeLabel,
    pub dir: Direction,
}

impl Letter {
    pub fn forward(label: impl Into<EdgeLabel>) -> Self {
        Letter {
            label: label.into(),
            dir: Direction::Forward,
        }
    }

    pub fn reversed(label: impl Into<EdgeLabel>) -> Self {
        Letter {
            label: label.into(),
            dir: Direction::Reversed,
        }
    }

    pub fn inverse(&self) -> Self {
        Letter {
            label: self.label.clone(),
            dir: self.dir.flip(),
        }
    }

    pub fn is_inverse_of(&self, other: &Letter) -> bool {
        self.label == other.label && self.dir != other.dir
    }

    pub fn is_forward(&self) -> bool {
        self.dir == Direction::Forward
    }

    /// The edge end a traversal leaves from.
    pub fn departure(&self) -> End {
        match self.dir {
            Direction::Forward => End::initial(self.label.clone()),
            Direction::Reversed => End::terminal(self.label.clone()),
        }
    }

    /// The edge end a traversal arrives at.
    pub fn arrival(&self) -> End {
        self.departure().opposite()
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dir {
            Direction::Forward => write!(f, "{}", self.label),
            Direction::Reversed => write!(f, "-{}", self.label),
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (dir, name) = match s.strip_prefix('-') {
            Some(rest) => (Direction::Reversed, rest),
            None => (Direction::Forward, s),
        };
        if !valid_label(name) {
            return Err(Error::parse(1, 1, format!("invalid letter `{s}`")));
        }
        Ok(Letter {
            label: EdgeLabel::new(name),
            dir,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EndKind {
    Initial,
    Terminal,
}

impl EndKind {
    pub fn opposite(self) -> Self {
        match self {
            EndKind::Initial => EndKind::Terminal,
            EndKind::Terminal => EndKind::Initial,
        }
    }

    pub fn tag(self) -> char {
        match self {
            EndKind::Initial => 'i',
            EndKind::Terminal => 't',
        }
    }
}

/// One end of an edge, written `i(x)` or `t(x)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct End {
    pub label: EdgeLabel,
    pub kind: EndKind,
}

impl End {
    pub fn initial(label: impl Into<EdgeLabel>) -> Self {
        End {
            label: label.into(),
            kind: EndKind::Initial,
        }
    }

    pub fn terminal(label: impl Into<EdgeLabel>) -> Self {
        End {
            label: label.into(),
            kind: EndKind::Terminal,
        }
    }

    pub fn opposite(&self) -> Self {
        End {
            label: self.label.clone(),
            kind: self.kind.opposite(),
        }
    }

    /// Letter that leaves the switch through this end.
    pub fn outgoing(&self) -> Letter {
        match self.kind {
            EndKind::Initial => Letter::forward(self.label.clone()),
            EndKind::Terminal => Letter::reversed(self.label.clone()),
        }
    }

    /// Letter that arrives at the switch through this end.
    pub fn incoming(&self) -> Letter {
        self.outgoing().inverse()
    }
}

impl fmt::Display for End {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.kind.tag(), self.label)
    }
}

impl fmt::Debug for End {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for End {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::parse(
                1,
                1,
                format!("invalid edge end `{s}`, expected t(x) or i(x)"),
            )
        };
        let kind = match s.chars().next() {
            Some('t') => EndKind::Terminal,
            Some('i') => EndKind::Initial,
            _ => return Err(bad()),
        };
        let inner = s[1..]
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        if !valid_label(inner) {
            return Err(bad());
        }
        Ok(End {
            label: EdgeLabel::new(inner),
            kind,
        })
    }
}

macro_rules! serialize_as_text {
    ($($t:ty),*) => {$(
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
    )*};
}

serialize_as_text!(Letter, End, EdgeWord);

/// A finite sequence of letters: an edge path, or a cyclic word when used as
/// a boundary curve.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeWord {
    letters: Vec<Letter>,
}

impl EdgeWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        EdgeWord { letters }
    }

    pub fn empty() -> Self {
        EdgeWord::default()
    }

    pub fn single(letter: Letter) -> Self {
        EdgeWord {
            letters: vec![letter],
        }
    }

    /// Parses a whitespace separated word such as `i j -h -d`. A `.` may be
    /// used as separator too (`f.i`).
    pub fn parse(text: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in text.split(|c: char| c.is_whitespace() || c == '.') {
            if tok.is_empty() {
                continue;
            }
            letters.push(tok.parse()?);
        }
        Ok(EdgeWord { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<&Letter> {
        self.letters.first()
    }

    pub fn last(&self) -> Option<&Letter> {
        self.letters.last()
    }

    pub fn inverse(&self) -> Self {
        EdgeWord {
            letters: self.letters.iter().rev().map(Letter::inverse).collect(),
        }
    }

    pub fn concat(&self, other: &EdgeWord) -> Self {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        EdgeWord { letters }
    }

    pub fn push(&mut self, letter: Letter) {
        self.letters.push(letter);
    }

    pub fn power(&self, n: usize) -> Self {
        let mut letters = Vec::with_capacity(self.len() * n);
        for _ in 0..n {
            letters.extend(self.letters.iter().cloned());
        }
        EdgeWord { letters }
    }

    /// Occurrences of `label` in either direction.
    pub fn occurrences(&self, label: &EdgeLabel) -> usize {
        self.letters.iter().filter(|l| &l.label == label).count()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| !w[0].is_inverse_of(&w[1]))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && match (self.letters.first(), self.letters.last()) {
                (Some(a), Some(b)) if self.letters.len() > 1 => !a.is_inverse_of(b),
                _ => true,
            }
    }

    pub fn reduced(&self) -> Self {
        let keep = reduction_survivors(&self.letters, false);
        EdgeWord {
            letters: keep.into_iter().map(|i| self.letters[i].clone()).collect(),
        }
    }

    pub fn cyclically_reduced(&self) -> Self {
        let keep = reduction_survivors(&self.letters, true);
        EdgeWord {
            letters: keep.into_iter().map(|i| self.letters[i].clone()).collect(),
        }
    }

    /// Rotation that starts at index `k`.
    pub fn rotated(&self, k: usize) -> Self {
        if self.is_empty() {
            return self.clone();
        }
        let k = k % self.len();
        let mut letters = self.letters[k..].to_vec();
        letters.extend_from_slice(&self.letters[..k]);
        EdgeWord { letters }
    }

    /// Smallest `r` with `self.rotated(r) == other`, if the words are
    /// rotations of each other.
    pub fn rotation_onto(&self, other: &EdgeWord) -> Option<usize> {
        let n = self.len();
        if n != other.len() {
            return None;
        }
        if n == 0 {
            return Some(0);
        }
        (0..n).find(|&r| (0..n).all(|i| self.letters[(i + r) % n] == other.letters[i]))
    }

    /// Substitutes every letter by the image of its label (inverted for
    /// reversed letters) and freely reduces. Labels without an image are kept.
    pub fn substitute<'a, F>(&self, image: F) -> EdgeWord
    where
        F: Fn(&EdgeLabel) -> Option<&'a EdgeWord>,
    {
        let mut out: Vec<Letter> = Vec::new();
        for letter in &self.letters {
            let piece = match image(&letter.label) {
                Some(w) if letter.is_forward() => w.letters.clone(),
                Some(w) => w.inverse().letters,
                None => vec![letter.clone()],
            };
            for l in piece {
                if out.last().is_some_and(|top| top.is_inverse_of(&l)) {
                    out.pop();
                } else {
                    out.push(l);
                }
            }
        }
        EdgeWord { letters: out }
    }

    pub fn relabel<F>(&self, f: F) -> EdgeWord
    where
        F: Fn(&Letter) -> Letter,
    {
        EdgeWord {
            letters: self.letters.iter().map(f).collect(),
        }
    }
}

impl fmt::Display for EdgeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for EdgeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl FromIterator<Letter> for EdgeWord {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        EdgeWord {
            letters: iter.into_iter().collect(),
        }
    }
}

/// Indices of the letters that survive free reduction, in order.
///
/// Reduction is stack based from index 0, so cancelled letters always form
/// nested pairs. With `cyclic` the surviving word is additionally trimmed
/// across the wrap-around.
pub fn reduction_survivors(letters: &[Letter], cyclic: bool) -> Vec<usize> {
    let mut stack: Vec<usize> = Vec::with_capacity(letters.len());
    for (i, l) in letters.iter().enumerate() {
        if stack
            .last()
            .is_some_and(|&top| letters[top].is_inverse_of(l))
        {
            stack.pop();
        } else {
            stack.push(i);
        }
    }
    if cyclic {
        let mut lo = 0;
        let mut hi = stack.len();
        while hi - lo > 1 && letters[stack[lo]].is_inverse_of(&letters[stack[hi - 1]]) {
            lo += 1;
            hi -= 1;
        }
        stack.truncate(hi);
        stack.drain(..lo);
    }
    stack
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> EdgeWord {
        EdgeWord::parse(s).unwrap()
    }

    #[test]
    fn parse_and_display() {
        let word = w("i j -h -d");
        assert_eq!(word.len(), 4);
        assert_eq!(word.to_string(), "i j -h -d");
        assert_eq!(w("f.i").to_string(), "f i");
        assert!(EdgeWord::parse("a --b").is_err());
    }

    #[test]
    fn free_reduction() {
        assert_eq!(w("a b -b c").reduced(), w("a c"));
        assert_eq!(w("a b -b -a").reduced(), EdgeWord::empty());
        assert!(w("a b c").is_reduced());
        assert!(!w("a -a").is_reduced());
    }

    #[test]
    fn cyclic_reduction_trims_across_wraparound() {
        assert_eq!(w("a b c -a").cyclically_reduced(), w("b c"));
        assert!(!w("a b -a").is_cyclically_reduced());
        assert!(w("a b").is_cyclically_reduced());
    }

    #[test]
    fn survivors_track_positions() {
        let word = w("x a b -b -a y");
        assert_eq!(reduction_survivors(word.letters(), false), vec![0, 5]);
    }

    #[test]
    fn rotation_matching() {
        let a = w("c d -b -j");
        let b = w("-b -j c d");
        assert_eq!(a.rotation_onto(&b), Some(2));
        assert_eq!(a.rotated(2), b);
        assert_eq!(a.rotation_onto(&w("c d -b j")), None);
    }

    #[test]
    fn substitution_reduces() {
        let img_a = w("a c");
        let img_c = w("-c b");
        let word = w("a c");
        let out = word.substitute(|l| match l.as_str() {
            "a" => Some(&img_a),
            "c" => Some(&img_c),
            _ => None,
        });
        assert_eq!(out, w("a b"));
    }

    #[test]
    fn ends_and_letters() {
        let e: End = "t(a)".parse().unwrap();
        assert_eq!(e, End::terminal("a"));
        assert_eq!(e.opposite().to_string(), "i(a)");
        assert!("x(a)".parse::<End>().is_err());
        let l = Letter::reversed("h");
        assert_eq!(l.departure(), End::terminal("h"));
        assert_eq!(l.arrival(), End::initial("h"));
        assert_eq!(End::initial("c").outgoing(), Letter::forward("c"));
    }

    #[test]
    fn inverse_is_involution() {
        let word = w("a -b c");
        assert_eq!(word.inverse(), w("-c b -a"));
        assert_eq!(word.inverse().inverse(), word);
    }
}
