//! Line-oriented text format for tracks and maps.
//!
//! ```text
//! [track]
//! name = tau
//! edges = a b c d
//! [switch v1]
//! sideA = t(a) t(b)
//! sideB = i(c) i(d)
//! [boundary]
//! d1 = a -c b d
//! [map phi]
//! source = tau
//! target = tau
//! a = b c
//! ```
//!
//! `#` starts a comment. A document may hold several tracks and maps; the
//! `[switch]` and `[boundary]` sections belong to the latest `[track]`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::morphism::TrackMorphism;
use crate::track::{Switch, TrainTrack};
use crate::word::{valid_label, EdgeLabel, EdgeWord, End};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapSpec {
    pub name: String,
    pub source: String,
    pub target: String,
    pub images: Vec<(EdgeLabel, EdgeWord)>,
    pub line: usize,
}

#[derive(Clone, Debug, Default)]
pub struct Document {
    pub tracks: Vec<TrainTrack>,
    pub maps: Vec<MapSpec>,
}

#[derive(Default)]
struct TrackDraft {
    name: Option<String>,
    edges: Vec<EdgeLabel>,
    switches: Vec<Switch>,
    boundaries: Vec<(String, EdgeWord)>,
}

impl TrackDraft {
    fn finish(self) -> TrainTrack {
        TrainTrack::new(
            self.name.unwrap_or_else(|| "track".into()),
            self.edges,
            self.switches,
        )
        .with_declared_boundaries(self.boundaries)
    }
}

enum Section {
    None,
    Track,
    Switch,
    Boundary,
    Map,
}

fn parse_ends(text: &str, line: usize, col: usize) -> Result<Vec<End>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for tok in text.split_whitespace() {
        let at = text[offset..]
            .find(tok)
            .map(|p| p + offset)
            .unwrap_or(offset);
        offset = at + tok.len();
        out.push(
            tok.parse()
                .map_err(|_| Error::parse(line, col + at, format!("invalid edge end `{tok}`")))?,
        );
    }
    Ok(out)
}

fn parse_word(text: &str, line: usize, col: usize) -> Result<EdgeWord> {
    EdgeWord::parse(text).map_err(|e| match e {
        Error::Parse { message, .. } => Error::parse(line, col, message),
        other => other,
    })
}

pub fn parse_document(text: &str) -> Result<Document> {
    let mut doc = Document::default();
    let mut draft: Option<TrackDraft> = None;
    let mut map: Option<MapSpec> = None;
    let mut section = Section::None;
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split('#').next().unwrap_or("");
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = line.len() - line.trim_start().len() + 1;
        if let Some(header) = trimmed.strip_prefix('[') {
            let header = header
                .strip_suffix(']')
                .ok_or_else(|| Error::parse(line_no, indent, "unterminated section header"))?
                .trim();
            let (kind, arg) = match header.split_once(char::is_whitespace) {
                Some((k, a)) => (k, a.trim()),
                None => (header, ""),
            };
            if let Some(m) = map.take() {
                doc.maps.push(m);
            }
            section = match kind {
                "track" => {
                    if let Some(d) = draft.take() {
                        doc.tracks.push(d.finish());
                    }
                    draft = Some(TrackDraft {
                        name: (!arg.is_empty()).then(|| arg.to_string()),
                        ..TrackDraft::default()
                    });
                    Section::Track
                }
                "switch" => {
                    let d = draft.as_mut().ok_or_else(|| {
                        Error::parse(line_no, indent, "[switch] before any [track]")
                    })?;
                    if arg.is_empty() {
                        return Err(Error::parse(line_no, indent, "switch needs an id"));
                    }
                    d.switches.push(Switch::new(arg, vec![], vec![]));
                    Section::Switch
                }
                "boundary" => {
                    if draft.is_none() {
                        return Err(Error::parse(
                            line_no,
                            indent,
                            "[boundary] before any [track]",
                        ));
                    }
                    Section::Boundary
                }
                "map" => {
                    map = Some(MapSpec {
                        name: if arg.is_empty() {
                            "map".into()
                        } else {
                            arg.to_string()
                        },
                        source: String::new(),
                        target: String::new(),
                        images: Vec::new(),
                        line: line_no,
                    });
                    Section::Map
                }
                other => {
                    return Err(Error::parse(
                        line_no,
                        indent + 1,
                        format!("unknown section `{other}`"),
                    ));
                }
            };
            continue;
        }
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| Error::parse(line_no, indent, "expected `key = value`"))?;
        let key = key.trim();
        let value_col =
            indent + trimmed.find('=').unwrap() + 1 + (value.len() - value.trim_start().len());
        let value = value.trim();
        match section {
            Section::None => {
                return Err(Error::parse(line_no, indent, "key outside of any section"));
            }
            Section::Track => {
                let d = draft.as_mut().unwrap();
                match key {
                    "name" => d.name = Some(value.to_string()),
                    "edges" => {
                        for tok in value.split_whitespace() {
                            if !valid_label(tok) {
                                return Err(Error::parse(
                                    line_no,
                                    value_col,
                                    format!("invalid edge label `{tok}`"),
                                ));
                            }
                            d.edges.push(EdgeLabel::new(tok));
                        }
                    }
                    other => {
                        return Err(Error::parse(
                            line_no,
                            indent,
                            format!("unknown track key `{other}`"),
                        ))
                    }
                }
            }
            Section::Switch => {
                let s = draft.as_mut().unwrap().switches.last_mut().unwrap();
                let ends = parse_ends(value, line_no, value_col)?;
                match key {
                    "sideA" => s.side_a = ends,
                    "sideB" => s.side_b = ends,
                    other => {
                        return Err(Error::parse(
                            line_no,
                            indent,
                            format!("unknown switch key `{other}`"),
                        ))
                    }
                }
            }
            Section::Boundary => {
                let w = parse_word(value, line_no, value_col)?;
                draft
                    .as_mut()
                    .unwrap()
                    .boundaries
                    .push((key.to_string(), w));
            }
            Section::Map => {
                let m = map.as_mut().unwrap();
                match key {
                    "source" => m.source = value.to_string(),
                    "target" => m.target = value.to_string(),
                    _ => {
                        if !valid_label(key) {
                            return Err(Error::parse(
                                line_no,
                                indent,
                                format!("invalid edge label `{key}`"),
                            ));
                        }
                        let w = parse_word(value, line_no, value_col)?;
                        m.images.push((EdgeLabel::new(key), w));
                    }
                }
            }
        }
    }
    if let Some(m) = map.take() {
        doc.maps.push(m);
    }
    if let Some(d) = draft.take() {
        doc.tracks.push(d.finish());
    }
    Ok(doc)
}

/// Parses a document holding exactly one track.
pub fn parse_track(text: &str) -> Result<TrainTrack> {
    let mut doc = parse_document(text)?;
    match doc.tracks.len() {
        1 => Ok(doc.tracks.remove(0)),
        0 => Err(Error::parse(1, 1, "no [track] section")),
        n => Err(Error::parse(1, 1, format!("expected one track, found {n}"))),
    }
}

impl Document {
    pub fn track(&self, name: &str) -> Option<&TrainTrack> {
        self.tracks.iter().find(|t| t.name() == name)
    }

    /// Builds the morphism `spec`, looking tracks up in the document first
    /// and in `external` otherwise.
    pub fn build_map<F>(&self, spec: &MapSpec, external: F) -> Result<TrackMorphism>
    where
        F: Fn(&str) -> Option<Arc<TrainTrack>>,
    {
        let find = |name: &str| -> Result<Arc<TrainTrack>> {
            if name.is_empty() {
                if self.tracks.len() == 1 {
                    return Ok(Arc::new(self.tracks[0].clone()));
                }
                return Err(Error::parse(
                    spec.line,
                    1,
                    "map needs `source` and `target`",
                ));
            }
            self.track(name)
                .map(|t| Arc::new(t.clone()))
                .or_else(|| external(name))
                .ok_or_else(|| Error::UnknownEntry(name.to_string()))
        };
        let source = find(&spec.source)?;
        let target = if spec.target == spec.source {
            source.clone()
        } else {
            find(&spec.target)?
        };
        let images: BTreeMap<EdgeLabel, EdgeWord> = spec.images.iter().cloned().collect();
        if images.len() != spec.images.len() {
            return Err(Error::parse(
                spec.line,
                1,
                format!("map `{}` lists an edge twice", spec.name),
            ));
        }
        TrackMorphism::new(spec.name.clone(), source, target, images)
    }

    /// The only map of the document, or the one called `name`.
    pub fn single_map<F>(&self, name: Option<&str>, external: F) -> Result<TrackMorphism>
    where
        F: Fn(&str) -> Option<Arc<TrainTrack>>,
    {
        let spec = match name {
            Some(n) => self
                .maps
                .iter()
                .find(|m| m.name == n)
                .ok_or_else(|| Error::UnknownEntry(n.to_string()))?,
            None if self.maps.len() == 1 => &self.maps[0],
            None => {
                return Err(Error::parse(
                    1,
                    1,
                    format!("expected one [map] section, found {}", self.maps.len()),
                ))
            }
        };
        self.build_map(spec, external)
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn write_track(track: &TrainTrack) -> String {
    let mut out = String::new();
    writeln!(out, "[track]").unwrap();
    writeln!(out, "name = {}", track.name()).unwrap();
    writeln!(out, "edges = {}", join(track.edges())).unwrap();
    for s in track.switches() {
        writeln!(out, "\n[switch {}]", s.id).unwrap();
        writeln!(out, "sideA = {}", join(&s.side_a)).unwrap();
        writeln!(out, "sideB = {}", join(&s.side_b)).unwrap();
    }
    if !track.declared_boundaries().is_empty() {
        writeln!(out, "\n[boundary]").unwrap();
        for (name, w) in track.declared_boundaries() {
            writeln!(out, "{name} = {w}").unwrap();
        }
    }
    out
}

/// Writes the map section alone.
pub fn write_map_section(m: &TrackMorphism) -> String {
    let mut out = String::new();
    writeln!(out, "[map {}]", m.name()).unwrap();
    writeln!(out, "source = {}", m.source().name()).unwrap();
    writeln!(out, "target = {}", m.target().name()).unwrap();
    for (e, w) in m.images() {
        writeln!(out, "{e} = {w}").unwrap();
    }
    out
}

/// Writes the source and target tracks followed by the map.
pub fn write_map(m: &TrackMorphism) -> String {
    let mut out = write_track(m.source());
    if m.target().name() != m.source().name() {
        out.push('\n');
        out.push_str(&write_track(m.target()));
    }
    out.push('\n');
    out.push_str(&write_map_section(m));
    out
}

/// Graphviz rendering: one node per switch, one arrow per edge from its
/// initial to its terminal switch.
pub fn write_dot(track: &TrainTrack) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", track.name().replace('"', "'")).unwrap();
    writeln!(out, "  node [shape=box, fontname=monospace];").unwrap();
    for s in track.switches() {
        writeln!(
            out,
            "  \"{}\" [label=\"{}\\nA: {}\\nB: {}\"];",
            s.id,
            s.id,
            join(&s.side_a),
            join(&s.side_b)
        )
        .unwrap();
    }
    for e in track.edges() {
        let from = track
            .switch_of(&End::initial(e.clone()))
            .map(|(s, _)| s.id.clone());
        let to = track
            .switch_of(&End::terminal(e.clone()))
            .map(|(s, _)| s.id.clone());
        if let (Some(from), Some(to)) = (from, to) {
            writeln!(out, "  \"{from}\" -> \"{to}\" [label=\"{e}\"];").unwrap();
        }
    }
    out.push_str("}\n");
    out
}
