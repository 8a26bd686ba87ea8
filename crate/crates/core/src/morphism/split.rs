//! Elementary splitting moves.
//!
//! A move `s/o` slides the end `s` over the end `o`. Both sit at one switch
//! on opposite sides and meet at a smooth corner, so `s` is extreme on its
//! side and `o` is extreme on the other. After the split, `s` is attached
//! at the far end of the edge of `o`, next to it and on its side. Every edge
//! keeps its name; the slid edge maps to itself followed (or preceded) by
//! the edge it slid over.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use super::TrackMorphism;
use crate::error::{Error, Result};
use crate::format;
use crate::track::{Ribbon, Side, Switch, TrainTrack};
use crate::word::{EdgeWord, End, EndKind, Letter};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SplitMove {
    pub slid: End,
    pub over: End,
}

impl SplitMove {
    pub fn new(slid: End, over: End) -> Self {
        SplitMove { slid, over }
    }

    fn sort_key(&self) -> (&str, EndKind, &str, EndKind) {
        (
            self.slid.label.as_str(),
            self.slid.kind,
            self.over.label.as_str(),
            self.over.kind,
        )
    }
}

impl fmt::Display for SplitMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.slid, self.over)
    }
}

impl fmt::Debug for SplitMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for SplitMove {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for SplitMove {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| Error::parse(1, 1, format!("expected `END(x)/END(y)`, got `{s}`")))?;
        let slid = a
            .parse()
            .map_err(|_| Error::parse(1, 1, format!("invalid end `{a}`")))?;
        let over = b
            .parse()
            .map_err(|_| Error::parse(1, a.chars().count() + 2, format!("invalid end `{b}`")))?;
        Ok(SplitMove { slid, over })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SplitSequence {
    pub moves: Vec<SplitMove>,
}

impl SplitSequence {
    pub fn new(moves: Vec<SplitMove>) -> Self {
        SplitSequence { moves }
    }

    /// Tokens `END(x)/END(y)` separated by whitespace or `;`. Braces and
    /// `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut moves = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            let mut col = 0;
            let chars: Vec<char> = line.chars().collect();
            while col < chars.len() {
                let c = chars[col];
                if c.is_whitespace() || matches!(c, ';' | '{' | '}' | ',') {
                    col += 1;
                    continue;
                }
                let start = col;
                while col < chars.len()
                    && !(chars[col].is_whitespace() || matches!(chars[col], ';' | '{' | '}' | ','))
                {
                    col += 1;
                }
                let token: String = chars[start..col].iter().collect();
                let mv = token.parse::<SplitMove>().map_err(|e| match e {
                    Error::Parse {
                        column, message, ..
                    } => Error::parse(ln + 1, start + column, message),
                    other => other,
                })?;
                moves.push(mv);
            }
        }
        Ok(SplitSequence { moves })
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn concat(&self, other: &SplitSequence) -> SplitSequence {
        let mut moves = self.moves.clone();
        moves.extend(other.moves.iter().cloned());
        SplitSequence { moves }
    }

    pub fn repeat(&self, n: usize) -> SplitSequence {
        SplitSequence {
            moves: (0..n).flat_map(|_| self.moves.iter().cloned()).collect(),
        }
    }
}

impl fmt::Display for SplitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.moves.iter().map(|m| m.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

impl FromIterator<SplitMove> for SplitSequence {
    fn from_iter<I: IntoIterator<Item = SplitMove>>(iter: I) -> Self {
        SplitSequence {
            moves: iter.into_iter().collect(),
        }
    }
}

fn illegal(mv: &SplitMove, condition: char, reason: impl Into<String>) -> Error {
    Error::IllegalMove {
        mv: mv.clone(),
        condition,
        reason: reason.into(),
    }
}

/// Checks conditions (a)-(d) for `mv` on a valid track.
pub fn check_move(track: &TrainTrack, mv: &SplitMove) -> Result<()> {
    track.ensure_valid()?;
    check_on(&track.ribbon(), mv)
}

fn check_on(r: &Ribbon, mv: &SplitMove) -> Result<()> {
    if !r.switch_ends.iter().any(|e| e.len() > 3) {
        return Err(illegal(mv, 'a', "no switch has valency larger than 3"));
    }
    let s = r
        .id(&mv.slid)
        .ok_or_else(|| Error::UnknownLabel(mv.slid.label.to_string()))?;
    let o = r
        .id(&mv.over)
        .ok_or_else(|| Error::UnknownLabel(mv.over.label.to_string()))?;
    let v = r.switch_of[s];
    if r.switch_of[o] != v {
        return Err(illegal(mv, 'c', "the two ends are at different switches"));
    }
    if r.side_of[s] == r.side_of[o] {
        return Err(illegal(mv, 'c', "the two ends are on the same side"));
    }
    if r.switch_ends[v].len() <= 3 {
        return Err(illegal(mv, 'b', "the switch has valency 3"));
    }
    if r.sigma[s] != o && r.sigma[o] != s {
        return Err(illegal(
            mv,
            'c',
            "the ends are not extreme: they do not meet at a smooth corner",
        ));
    }
    let side_size = r.switch_ends[v]
        .iter()
        .filter(|&&h| r.side_of[h] == r.side_of[s])
        .count();
    if side_size < 2 {
        return Err(illegal(
            mv,
            'd',
            "the slid end is alone on its side, the split would join two cusps",
        ));
    }
    if s / 2 == o / 2 {
        return Err(illegal(
            mv,
            'd',
            "both ends belong to the same edge, the split would join two cusps",
        ));
    }
    Ok(())
}

/// All legal moves, sorted by (slid label, end, over label, end).
pub fn legal_splits(track: &TrainTrack) -> Result<Vec<SplitMove>> {
    track.ensure_valid()?;
    let r = track.ribbon();
    if !r.switch_ends.iter().any(|e| e.len() > 3) {
        return Err(Error::NoSplitAvailable);
    }
    Ok(legal_splits_unchecked(&r))
}

pub(crate) fn legal_splits_unchecked(r: &Ribbon) -> Vec<SplitMove> {
    let mut out = Vec::new();
    for h in 0..r.len() {
        let n = r.sigma[h];
        if r.side_of[h] == r.side_of[n] {
            continue;
        }
        for (s, o) in [(h, n), (n, h)] {
            let mv = SplitMove::new(r.end(s), r.end(o));
            if check_on(r, &mv).is_ok() {
                out.push(mv);
            }
        }
    }
    out.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    out.dedup();
    out
}

/// New switch list and the image of the slid edge. Assumes `mv` is legal.
pub(crate) fn split_unchecked(
    track: &TrainTrack,
    r: &Ribbon,
    mv: &SplitMove,
) -> (Vec<Switch>, Letter, Letter, bool) {
    let s = r.id(&mv.slid).unwrap();
    let o = r.id(&mv.over).unwrap();
    let after = r.sigma[s] == o;
    let o_far = Ribbon::opp(o);
    let mut orders: Vec<Vec<(End, Side)>> =
        track.switches().iter().map(Switch::cyclic_order).collect();
    let v = r.switch_of[s];
    let w = r.switch_of[o_far];
    orders[v].retain(|(e, _)| e != &mv.slid);
    let far_end = r.end(o_far);
    let pos = orders[w].iter().position(|(e, _)| e == &far_end).unwrap();
    let side = orders[w][pos].1;
    let at = if after { pos + 1 } else { pos };
    orders[w].insert(at, (mv.slid.clone(), side));
    let switches = track
        .switches()
        .iter()
        .zip(orders.iter())
        .map(|(sw, ord)| Switch::from_cyclic(sw.id.clone(), ord).expect("sides stay contiguous"))
        .collect();
    let slid_letter = Letter::forward(mv.slid.label.clone());
    let over_letter = match mv.slid.kind {
        EndKind::Terminal => mv.over.outgoing(),
        EndKind::Initial => mv.over.incoming(),
    };
    (
        switches,
        slid_letter,
        over_letter,
        mv.slid.kind == EndKind::Terminal,
    )
}

/// Splits `track` along `mv`. Returns the new track and the elementary
/// morphism from the new track into the old one.
pub fn apply_split(
    track: &Arc<TrainTrack>,
    mv: &SplitMove,
) -> Result<(Arc<TrainTrack>, TrackMorphism)> {
    check_move(track, mv)?;
    let r = track.ribbon();
    let (switches, slid, over, append) = split_unchecked(track, &r, mv);
    let mut next = (**track).clone().with_declared_boundaries(Vec::new());
    next.set_switches(switches);
    let next = Arc::new(next.with_name(format!("{}|{}", track.name(), mv)));
    let images = track
        .edges()
        .iter()
        .map(|e| {
            if e == &slid.label {
                if append {
                    EdgeWord::new(vec![slid.clone(), over.clone()])
                } else {
                    EdgeWord::new(vec![over.clone(), slid.clone()])
                }
            } else {
                EdgeWord::single(Letter::forward(e.clone()))
            }
        })
        .collect();
    let m = TrackMorphism::from_parts(format!("S[{mv}]"), next.clone(), track.clone(), images);
    Ok((next, m))
}

/// Applies the moves in turn. Returns the final track and the composite
/// morphism from it into `track`.
pub fn apply_sequence(
    track: &Arc<TrainTrack>,
    seq: &SplitSequence,
) -> Result<(Arc<TrainTrack>, TrackMorphism)> {
    track.ensure_valid()?;
    let mut current = track.clone();
    // Words in the letters of `track` for every edge of `current`.
    let mut comp: Vec<EdgeWord> = track
        .edges()
        .iter()
        .map(|e| EdgeWord::single(Letter::forward(e.clone())))
        .collect();
    for (k, mv) in seq.moves.iter().enumerate() {
        let (next, step) = apply_split(&current, mv).map_err(|e| Error::IllegalMoveAt {
            index: k + 1,
            source: Box::new(e),
            track_dump: format::write_track(&current),
        })?;
        let idx = current
            .edges()
            .iter()
            .position(|e| e == &mv.slid.label)
            .unwrap();
        let lookup = |l: &crate::word::EdgeLabel| {
            current
                .edges()
                .iter()
                .position(|e| e == l)
                .map(|i| &comp[i])
        };
        let new_word = step.image_words()[idx].substitute(lookup);
        comp[idx] = new_word;
        current = next;
    }
    let name = if seq.is_empty() {
        "id".to_string()
    } else {
        format!("S[{seq}]")
    };
    let m = TrackMorphism::from_parts(name, current.clone(), track.clone(), comp);
    Ok((current, m))
}
