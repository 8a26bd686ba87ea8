//! Labelled train-tracks with a ribbon (cyclic) order at every switch.
//!
//! A switch stores its two sides as ordered lists of edge ends. The cyclic
//! order of ends around the switch is `side_a` followed by `side_b`
//! reversed. Two consecutive ends on the same side form a cusp.

mod iso;
mod orientation;

pub use iso::{EdgeMap, IsoMode};
pub use orientation::OrientationAssignment;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{valid_label, EdgeLabel, EdgeWord, End, EndKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Switch {
    pub id: String,
    pub side_a: Vec<End>,
    pub side_b: Vec<End>,
}

impl Switch {
    pub fn new(id: impl Into<String>, side_a: Vec<End>, side_b: Vec<End>) -> Self {
        Switch {
            id: id.into(),
            side_a,
            side_b,
        }
    }

    pub fn valency(&self) -> usize {
        self.side_a.len() + self.side_b.len()
    }

    pub fn side(&self, side: Side) -> &[End] {
        match side {
            Side::A => &self.side_a,
            Side::B => &self.side_b,
        }
    }

    pub fn cusps(&self) -> usize {
        self.side_a.len().saturating_sub(1) + self.side_b.len().saturating_sub(1)
    }

    /// Ends in ribbon order, tagged with their side.
    pub fn cyclic_order(&self) -> Vec<(End, Side)> {
        self.side_a
            .iter()
            .map(|e| (e.clone(), Side::A))
            .chain(self.side_b.iter().rev().map(|e| (e.clone(), Side::B)))
            .collect()
    }

    /// Rebuilds a switch from a ribbon order in which each side is a
    /// contiguous arc. Returns `None` if a side is split in two arcs.
    pub fn from_cyclic(id: impl Into<String>, order: &[(End, Side)]) -> Option<Switch> {
        let n = order.len();
        // Rotate to the first A end that follows a B end.
        let start = (0..n)
            .find(|&k| order[k].1 == Side::A && order[(k + n - 1) % n].1 == Side::B)
            .or_else(|| order.iter().position(|(_, s)| *s == Side::A))
            .unwrap_or(0);
        let rotated: Vec<_> = (0..n).map(|k| order[(start + k) % n].clone()).collect();
        let split = rotated.iter().position(|(_, s)| *s == Side::B).unwrap_or(n);
        if rotated[split..].iter().any(|(_, s)| *s == Side::A) {
            return None;
        }
        Some(Switch {
            id: id.into(),
            side_a: rotated[..split].iter().map(|(e, _)| e.clone()).collect(),
            side_b: rotated[split..]
                .iter()
                .rev()
                .map(|(e, _)| e.clone())
                .collect(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TrackIssue {
    NoEdges,
    InvalidLabel(String),
    DuplicateLabel(String),
    DuplicateSwitchId(String),
    EmptySide {
        switch: String,
        side: Side,
    },
    UnknownEdge {
        switch: String,
        label: String,
    },
    /// An edge end placed at `count` positions instead of exactly one.
    EndMultiplicity {
        end: String,
        count: usize,
    },
    BoundaryMismatch {
        name: String,
        word: String,
    },
}

impl fmt::Display for TrackIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrackIssue::NoEdges => write!(f, "track has no edges"),
            TrackIssue::InvalidLabel(l) => write!(f, "invalid edge label `{l}`"),
            TrackIssue::DuplicateLabel(l) => write!(f, "duplicate edge label `{l}`"),
            TrackIssue::DuplicateSwitchId(s) => write!(f, "duplicate switch id `{s}`"),
            TrackIssue::EmptySide { switch, side } => {
                write!(f, "side empty: side {side:?} of switch `{switch}`")
            }
            TrackIssue::UnknownEdge { switch, label } => {
                write!(f, "switch `{switch}` references unknown edge `{label}`")
            }
            TrackIssue::EndMultiplicity { end, count } => {
                write!(f, "end multiplicity: {end} placed {count} times")
            }
            TrackIssue::BoundaryMismatch { name, word } => {
                write!(
                    f,
                    "declared boundary {name} = `{word}` is not a boundary curve"
                )
            }
        }
    }
}

/// Result of a report-based check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport<I> {
    pub subject: String,
    pub issues: Vec<I>,
}

impl<I: fmt::Display> ValidationReport<I> {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.issues.is_empty() {
            return "valid".to_string();
        }
        self.issues
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// A boundary component of the ribbon neighbourhood, as a cyclic word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryCurve {
    pub word: EdgeWord,
    /// `cusps[k]` tells whether the junction before letter `k` is a cusp.
    pub cusps: Vec<bool>,
}

/// Cusp-to-cusp stretch of a boundary curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundarySide {
    /// Index of the first letter; the junction before it is a cusp.
    pub start: usize,
    pub len: usize,
}

impl BoundaryCurve {
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn cusp_count(&self) -> usize {
        self.cusps.iter().filter(|&&c| c).count()
    }

    pub fn cusp_positions(&self) -> Vec<usize> {
        (0..self.cusps.len()).filter(|&k| self.cusps[k]).collect()
    }

    pub fn sides(&self) -> Vec<BoundarySide> {
        let cusps = self.cusp_positions();
        let n = self.len();
        cusps
            .iter()
            .enumerate()
            .map(|(i, &start)| {
                let next = cusps[(i + 1) % cusps.len()];
                let len = (next + n - start - 1) % n + 1;
                BoundarySide { start, len }
            })
            .collect()
    }

    pub fn side_word(&self, side: BoundarySide) -> EdgeWord {
        let n = self.len();
        (0..side.len)
            .map(|k| self.word.letters()[(side.start + k) % n].clone())
            .collect()
    }

    /// Text with `|` at cusps, e.g. `| c d | -b -j | ...`.
    pub fn display_with_cusps(&self) -> String {
        let mut out = String::new();
        for (k, l) in self.word.letters().iter().enumerate() {
            if self.cusps[k] {
                out.push_str("| ");
            }
            out.push_str(&l.to_string());
            out.push(' ');
        }
        out.push('|');
        out
    }

    /// Whether `word` equals this curve up to rotation and reversal.
    pub fn matches(&self, word: &EdgeWord) -> bool {
        self.word.rotation_onto(word).is_some() || self.word.inverse().rotation_onto(word).is_some()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EulerData {
    pub vertices: usize,
    pub edges: usize,
    pub euler_characteristic: i64,
    pub boundary_components: usize,
    pub components: usize,
    pub genus: i64,
    /// Whether the track admits an orientation of its edges.
    pub orientable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrainTrack {
    name: String,
    edges: Vec<EdgeLabel>,
    switches: Vec<Switch>,
    declared_boundaries: Vec<(String, EdgeWord)>,
}

impl TrainTrack {
    pub fn new(name: impl Into<String>, edges: Vec<EdgeLabel>, switches: Vec<Switch>) -> Self {
        TrainTrack {
            name: name.into(),
            edges,
            switches,
            declared_boundaries: Vec::new(),
        }
    }

    pub fn with_declared_boundaries(mut self, boundaries: Vec<(String, EdgeWord)>) -> Self {
        self.declared_boundaries = boundaries;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn edges(&self) -> &[EdgeLabel] {
        &self.edges
    }

    pub fn switches(&self) -> &[Switch] {
        &self.switches
    }

    pub fn declared_boundaries(&self) -> &[(String, EdgeWord)] {
        &self.declared_boundaries
    }

    pub fn has_edge(&self, label: &EdgeLabel) -> bool {
        self.edges.contains(label)
    }

    pub fn cusp_count(&self) -> usize {
        self.switches.iter().map(Switch::cusps).sum()
    }

    pub fn switch_of(&self, end: &End) -> Option<(&Switch, Side)> {
        self.switches.iter().find_map(|s| {
            if s.side_a.contains(end) {
                Some((s, Side::A))
            } else if s.side_b.contains(end) {
                Some((s, Side::B))
            } else {
                None
            }
        })
    }

    pub fn validate(&self) -> ValidationReport<TrackIssue> {
        let mut issues = Vec::new();
        if self.edges.is_empty() {
            issues.push(TrackIssue::NoEdges);
        }
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            if !valid_label(e.as_str()) {
                issues.push(TrackIssue::InvalidLabel(e.to_string()));
            }
            if !seen.insert(e.clone()) {
                issues.push(TrackIssue::DuplicateLabel(e.to_string()));
            }
        }
        let mut ids = BTreeSet::new();
        let mut count: BTreeMap<End, usize> = BTreeMap::new();
        for e in &self.edges {
            count.insert(End::initial(e.clone()), 0);
            count.insert(End::terminal(e.clone()), 0);
        }
        for s in &self.switches {
            if !ids.insert(s.id.clone()) {
                issues.push(TrackIssue::DuplicateSwitchId(s.id.clone()));
            }
            for side in [Side::A, Side::B] {
                if s.side(side).is_empty() {
                    issues.push(TrackIssue::EmptySide {
                        switch: s.id.clone(),
                        side,
                    });
                }
                for end in s.side(side) {
                    match count.get_mut(end) {
                        Some(c) => *c += 1,
                        None => issues.push(TrackIssue::UnknownEdge {
                            switch: s.id.clone(),
                            label: end.label.to_string(),
                        }),
                    }
                }
            }
        }
        for (end, c) in &count {
            if *c != 1 {
                issues.push(TrackIssue::EndMultiplicity {
                    end: end.to_string(),
                    count: *c,
                });
            }
        }
        if issues.is_empty() && !self.declared_boundaries.is_empty() {
            let curves = self.trace_boundaries();
            for (name, word) in &self.declared_boundaries {
                if !curves.iter().any(|c| c.matches(word)) {
                    issues.push(TrackIssue::BoundaryMismatch {
                        name: name.clone(),
                        word: word.to_string(),
                    });
                }
            }
        }
        ValidationReport {
            subject: self.name.clone(),
            issues,
        }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidTrack {
                track: self.name.clone(),
                issues: report.summary(),
            })
        }
    }

    /// Boundary curves of the ribbon neighbourhood with their cusps.
    ///
    /// Orbits of "rotate to the next end around the switch, then cross the
    /// edge". Each end is arrived at exactly once, so the curves have total
    /// length `2·|E|`.
    pub fn boundary_cycles(&self) -> Result<Vec<BoundaryCurve>> {
        self.ensure_valid()?;
        Ok(self.trace_boundaries())
    }

    fn trace_boundaries(&self) -> Vec<BoundaryCurve> {
        let r = Ribbon::new(self);
        let mut visited = vec![false; r.len()];
        let mut curves = Vec::new();
        for start in 0..r.len() {
            if visited[start] {
                continue;
            }
            let mut letters = Vec::new();
            let mut cusps = Vec::new();
            let mut h = start;
            while !visited[h] {
                visited[h] = true;
                let d = r.sigma[h];
                cusps.push(r.side_of[h] == r.side_of[d]);
                letters.push(r.end(d).outgoing());
                h = Ribbon::opp(d);
            }
            let first_cusp = cusps.iter().position(|&c| c).unwrap_or(0);
            letters.rotate_left(first_cusp);
            cusps.rotate_left(first_cusp);
            curves.push(BoundaryCurve {
                word: EdgeWord::new(letters),
                cusps,
            });
        }
        curves
    }

    pub fn euler_data(&self) -> Result<EulerData> {
        self.ensure_valid()?;
        let v = self.switches.len() as i64;
        let e = self.edges.len() as i64;
        let chi = v - e;
        let b = self.trace_boundaries().len() as i64;
        let c = self.components().len() as i64;
        let twice_genus = 2 * c - chi - b;
        Ok(EulerData {
            vertices: v as usize,
            edges: e as usize,
            euler_characteristic: chi,
            boundary_components: b as usize,
            components: c as usize,
            genus: twice_genus / 2,
            orientable: self.orientation().is_ok(),
        })
    }

    /// Cusp count of each boundary curve, sorted in decreasing order.
    pub fn singularity_type(&self) -> Result<Vec<usize>> {
        let mut t: Vec<usize> = self
            .boundary_cycles()?
            .iter()
            .map(|c| c.cusp_count())
            .collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        Ok(t)
    }

    pub fn orientation(&self) -> Result<OrientationAssignment> {
        self.ensure_valid()?;
        orientation::orient(self)
    }

    /// Switch indices grouped into connected components.
    pub(crate) fn components(&self) -> Vec<Vec<usize>> {
        let r = Ribbon::new(self);
        let n = self.switches.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            comp[s] = id;
            let mut members = vec![];
            while let Some(v) = stack.pop() {
                members.push(v);
                for h in r.ends_at(v) {
                    let w = r.switch_of[Ribbon::opp(h)];
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Same edges and the same switches (ids ignored).
    pub fn same_structure(&self, other: &TrainTrack) -> bool {
        let mut e1 = self.edges.clone();
        let mut e2 = other.edges.clone();
        e1.sort();
        e2.sort();
        if e1 != e2 {
            return false;
        }
        let key = |t: &TrainTrack| {
            let mut v: Vec<(Vec<End>, Vec<End>)> = t
                .switches
                .iter()
                .map(|s| (s.side_a.clone(), s.side_b.clone()))
                .collect();
            v.sort();
            v
        };
        key(self) == key(other)
    }

    /// Renames edges; a reversed image letter flips the edge so that its
    /// initial and terminal ends swap.
    pub fn relabeled(&self, map: &EdgeMap, name: impl Into<String>) -> TrainTrack {
        let end_image = |e: &End| map.end_image(e);
        let edges = self
            .edges
            .iter()
            .map(|l| map.image(l).label.clone())
            .collect();
        let switches = self
            .switches
            .iter()
            .map(|s| Switch {
                id: s.id.clone(),
                side_a: s.side_a.iter().map(end_image).collect(),
                side_b: s.side_b.iter().map(end_image).collect(),
            })
            .collect();
        let declared = self
            .declared_boundaries
            .iter()
            .map(|(n, w)| (n.clone(), map.apply(w)))
            .collect();
        TrainTrack {
            name: name.into(),
            edges,
            switches,
            declared_boundaries: declared,
        }
    }

    pub(crate) fn ribbon(&self) -> Ribbon {
        Ribbon::new(self)
    }

    pub(crate) fn set_switches(&mut self, switches: Vec<Switch>) {
        self.switches = switches;
    }
}

/// Integer-indexed view of a valid track. End `2e` is `i(edges[e])`,
/// end `2e + 1` is `t(edges[e])`.
#[derive(Clone, Debug)]
pub(crate) struct Ribbon {
    pub labels: Vec<EdgeLabel>,
    pub index: HashMap<EdgeLabel, usize>,
    /// Next end in ribbon order around the same switch.
    pub sigma: Vec<usize>,
    pub sigma_inv: Vec<usize>,
    pub switch_of: Vec<usize>,
    pub side_of: Vec<Side>,
    pub switch_ends: Vec<Vec<usize>>,
}

impl Ribbon {
    fn new(track: &TrainTrack) -> Ribbon {
        let labels = track.edges.clone();
        let index: HashMap<EdgeLabel, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        let n = 2 * labels.len();
        let mut sigma = vec![0; n];
        let mut sigma_inv = vec![0; n];
        let mut switch_of = vec![0; n];
        let mut side_of = vec![Side::A; n];
        let mut switch_ends = Vec::with_capacity(track.switches.len());
        for (si, s) in track.switches.iter().enumerate() {
            let order: Vec<(usize, Side)> = s
                .cyclic_order()
                .into_iter()
                .map(|(e, side)| (Self::id_in(&index, &e), side))
                .collect();
            let k = order.len();
            for (j, &(h, side)) in order.iter().enumerate() {
                let next = order[(j + 1) % k].0;
                sigma[h] = next;
                sigma_inv[next] = h;
                switch_of[h] = si;
                side_of[h] = side;
            }
            switch_ends.push(order.iter().map(|&(h, _)| h).collect());
        }
        Ribbon {
            labels,
            index,
            sigma,
            sigma_inv,
            switch_of,
            side_of,
            switch_ends,
        }
    }

    fn id_in(index: &HashMap<EdgeLabel, usize>, e: &End) -> usize {
        2 * index[&e.label]
            + match e.kind {
                EndKind::Initial => 0,
                EndKind::Terminal => 1,
            }
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn id(&self, e: &End) -> Option<usize> {
        self.index.get(&e.label).map(|&i| {
            2 * i
                + match e.kind {
                    EndKind::Initial => 0,
                    EndKind::Terminal => 1,
                }
        })
    }

    pub fn end(&self, h: usize) -> End {
        let label = self.labels[h / 2].clone();
        if h.is_multiple_of(2) {
            End::initial(label)
        } else {
            End::terminal(label)
        }
    }

    pub fn opp(h: usize) -> usize {
        h ^ 1
    }

    pub fn ends_at(&self, switch: usize) -> impl Iterator<Item = usize> + '_ {
        self.switch_ends[switch].iter().copied()
    }
}
