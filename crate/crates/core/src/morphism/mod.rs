//! Cellular smooth maps between labelled train-tracks.

mod split;

pub use split::{apply_sequence, apply_split, check_move, legal_splits, SplitMove, SplitSequence};
#[allow(unused_imports)]
pub(crate) use split::{legal_splits_unchecked, split_unchecked};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::track::{EdgeMap, Ribbon, Side, TrainTrack, ValidationReport};
use crate::word::{EdgeLabel, EdgeWord, End, EndKind};

/// Edge images of a cellular map `source → target`, in source edge order.
#[derive(Clone, Debug)]
pub struct TrackMorphism {
    name: String,
    source: Arc<TrainTrack>,
    target: Arc<TrainTrack>,
    images: Vec<EdgeWord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MorphismIssue {
    EmptyImage {
        edge: String,
    },
    UnknownLetter {
        edge: String,
        position: usize,
        label: String,
    },
    NotReduced {
        edge: String,
        position: usize,
    },
    /// The path jumps between two switches after letter `position` (1-based).
    EndpointMismatch {
        edge: String,
        position: usize,
    },
    /// The path turns back on the same side of a switch after letter `position`.
    NotSmooth {
        edge: String,
        position: usize,
    },
    VertexIncoherent {
        switch: String,
    },
    SideIncoherent {
        switch: String,
    },
}

impl fmt::Display for MorphismIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismIssue::EmptyImage { edge } => write!(f, "empty image for {edge}"),
            MorphismIssue::UnknownLetter {
                edge,
                position,
                label,
            } => {
                write!(
                    f,
                    "unknown letter `{label}` in image of {edge}, position {position}"
                )
            }
            MorphismIssue::NotReduced { edge, position } => {
                write!(f, "image of {edge} is not reduced at position {position}")
            }
            MorphismIssue::EndpointMismatch { edge, position } => {
                write!(f, "endpoint mismatch at {edge}, position {position}")
            }
            MorphismIssue::NotSmooth { edge, position } => {
                write!(f, "non-smooth passage at {edge}, position {position}")
            }
            MorphismIssue::VertexIncoherent { switch } => {
                write!(
                    f,
                    "edge ends at switch {switch} have images starting at different switches"
                )
            }
            MorphismIssue::SideIncoherent { switch } => {
                write!(f, "sides of switch {switch} are not sent to opposite sides")
            }
        }
    }
}

impl TrackMorphism {
    /// Builds a morphism from per-edge images. Images are freely reduced.
    pub fn new(
        name: impl Into<String>,
        source: Arc<TrainTrack>,
        target: Arc<TrainTrack>,
        mut images: BTreeMap<EdgeLabel, EdgeWord>,
    ) -> Result<Self> {
        let name = name.into();
        let mut ordered = Vec::with_capacity(source.edges().len());
        for e in source.edges() {
            let w = images.remove(e).ok_or_else(|| Error::MissingImage {
                map: name.clone(),
                edge: e.to_string(),
            })?;
            ordered.push(w.reduced());
        }
        if let Some(extra) = images.keys().next() {
            return Err(Error::UnknownLabel(extra.to_string()));
        }
        Ok(TrackMorphism {
            name,
            source,
            target,
            images: ordered,
        })
    }

    pub fn identity(track: Arc<TrainTrack>) -> Self {
        let images = track
            .edges()
            .iter()
            .map(|e| EdgeWord::single(crate::word::Letter::forward(e.clone())))
            .collect();
        TrackMorphism {
            name: "id".into(),
            source: track.clone(),
            target: track,
            images,
        }
    }

    /// Morphism induced by an edge relabelling `source → target`.
    pub fn from_edge_map(
        name: impl Into<String>,
        source: Arc<TrainTrack>,
        target: Arc<TrainTrack>,
        map: &EdgeMap,
    ) -> Self {
        let images = source
            .edges()
            .iter()
            .map(|e| EdgeWord::single(map.image(e)))
            .collect();
        TrackMorphism {
            name: name.into(),
            source,
            target,
            images,
        }
    }

    pub(crate) fn from_parts(
        name: String,
        source: Arc<TrainTrack>,
        target: Arc<TrainTrack>,
        images: Vec<EdgeWord>,
    ) -> Self {
        debug_assert_eq!(images.len(), source.edges().len());
        TrackMorphism {
            name,
            source,
            target,
            images,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn source(&self) -> &Arc<TrainTrack> {
        &self.source
    }

    pub fn target(&self) -> &Arc<TrainTrack> {
        &self.target
    }

    pub fn image(&self, edge: &EdgeLabel) -> Option<&EdgeWord> {
        let i = self.source.edges().iter().position(|e| e == edge)?;
        Some(&self.images[i])
    }

    pub fn image_of(&self, edge: &str) -> Option<&EdgeWord> {
        self.image(&EdgeLabel::new(edge))
    }

    /// `(edge, image)` pairs in source edge order.
    pub fn images(&self) -> impl Iterator<Item = (&EdgeLabel, &EdgeWord)> {
        self.source.edges().iter().zip(self.images.iter())
    }

    pub fn image_words(&self) -> &[EdgeWord] {
        &self.images
    }

    pub fn is_self_map(&self) -> bool {
        Arc::ptr_eq(&self.source, &self.target) || self.source.same_structure(&self.target)
    }

    /// Applies the map to a word over the source alphabet and reduces.
    pub fn apply(&self, word: &EdgeWord) -> EdgeWord {
        word.substitute(|l| self.image(l))
    }

    /// Same images, as words compared letter by letter.
    pub fn same_images(&self, other: &TrackMorphism) -> bool {
        self.source.edges().len() == other.source.edges().len()
            && self.images().all(|(e, w)| other.image(e) == Some(w))
    }

    /// Edges whose image differs between the two maps.
    pub fn image_diff(&self, other: &TrackMorphism) -> Vec<EdgeLabel> {
        self.images()
            .filter(|(e, w)| other.image(e) != Some(*w))
            .map(|(e, _)| e.clone())
            .collect()
    }

    /// Cellularity, smoothness and endpoint coherence.
    pub fn check(&self) -> ValidationReport<MorphismIssue> {
        let subject = self.name.clone();
        let mut issues = Vec::new();
        if !self.source.validate().is_valid() || !self.target.validate().is_valid() {
            return ValidationReport {
                subject,
                issues: vec![MorphismIssue::VertexIncoherent {
                    switch: "(invalid source or target track)".into(),
                }],
            };
        }
        let r = self.target.ribbon();
        for (edge, word) in self.images() {
            let edge_s = edge.to_string();
            if word.is_empty() {
                issues.push(MorphismIssue::EmptyImage { edge: edge_s });
                continue;
            }
            let mut known = true;
            for (k, l) in word.letters().iter().enumerate() {
                if !r.index.contains_key(&l.label) {
                    issues.push(MorphismIssue::UnknownLetter {
                        edge: edge_s.clone(),
                        position: k + 1,
                        label: l.label.to_string(),
                    });
                    known = false;
                }
            }
            if !known {
                continue;
            }
            for (k, pair) in word.letters().windows(2).enumerate() {
                if pair[0].is_inverse_of(&pair[1]) {
                    issues.push(MorphismIssue::NotReduced {
                        edge: edge_s.clone(),
                        position: k + 1,
                    });
                    continue;
                }
                let arrive = r.id(&pair[0].arrival()).unwrap();
                let depart = r.id(&pair[1].departure()).unwrap();
                if r.switch_of[arrive] != r.switch_of[depart] {
                    issues.push(MorphismIssue::EndpointMismatch {
                        edge: edge_s.clone(),
                        position: k + 1,
                    });
                } else if r.side_of[arrive] == r.side_of[depart] {
                    issues.push(MorphismIssue::NotSmooth {
                        edge: edge_s.clone(),
                        position: k + 1,
                    });
                }
            }
        }
        if issues.is_empty() {
            self.check_vertices(&r, &mut issues);
        }
        ValidationReport { subject, issues }
    }

    fn check_vertices(&self, r: &Ribbon, issues: &mut Vec<MorphismIssue>) {
        for s in self.source.switches() {
            let mut image_switch = None;
            let mut incoherent = false;
            let mut sides: [Option<Side>; 2] = [None, None];
            let mut side_bad = false;
            for (slot, side) in [Side::A, Side::B].into_iter().enumerate() {
                for end in s.side(side) {
                    let Some(h) = self.image_departure(end).and_then(|e| r.id(&e)) else {
                        continue;
                    };
                    let w = r.switch_of[h];
                    match image_switch {
                        None => image_switch = Some(w),
                        Some(x) if x != w => incoherent = true,
                        _ => {}
                    }
                    match sides[slot] {
                        None => sides[slot] = Some(r.side_of[h]),
                        Some(x) if x != r.side_of[h] => side_bad = true,
                        _ => {}
                    }
                }
            }
            if incoherent {
                issues.push(MorphismIssue::VertexIncoherent {
                    switch: s.id.clone(),
                });
            } else if side_bad || sides[0] == sides[1] {
                issues.push(MorphismIssue::SideIncoherent {
                    switch: s.id.clone(),
                });
            }
        }
    }

    /// End of the target through which the image of `end` leaves the image switch.
    fn image_departure(&self, end: &End) -> Option<End> {
        let w = self.image(&end.label)?;
        match end.kind {
            EndKind::Initial => w.first().map(|l| l.departure()),
            EndKind::Terminal => w.last().map(|l| l.arrival()),
        }
    }

    /// Image switch of every source switch, derived from the edge images.
    pub fn vertex_images(&self) -> Result<BTreeMap<String, String>> {
        let r = self.target.ribbon();
        let mut out = BTreeMap::new();
        for s in self.source.switches() {
            let mut found: Option<usize> = None;
            for (end, _) in s.cyclic_order() {
                let h = self
                    .image_departure(&end)
                    .and_then(|e| r.id(&e))
                    .ok_or_else(|| Error::UnknownLabel(end.label.to_string()))?;
                let w = r.switch_of[h];
                if found.is_some_and(|x| x != w) {
                    return Err(Error::InconsistentConstraints(format!(
                        "ends at switch {} map to different switches",
                        s.id
                    )));
                }
                found = Some(w);
            }
            if let Some(w) = found {
                out.insert(s.id.clone(), self.target.switches()[w].id.clone());
            }
        }
        Ok(out)
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &TrackMorphism, inner: &TrackMorphism) -> Result<TrackMorphism> {
        if !(Arc::ptr_eq(&inner.target, &outer.source)
            || inner.target.same_structure(&outer.source))
        {
            return Err(Error::ChainMismatch(format!(
                "target of `{}` is `{}` but source of `{}` is `{}`",
                inner.name,
                inner.target.name(),
                outer.name,
                outer.source.name()
            )));
        }
        let images = inner.images.iter().map(|w| outer.apply(w)).collect();
        Ok(TrackMorphism {
            name: format!("{}∘{}", outer.name, inner.name),
            source: inner.source.clone(),
            target: outer.target.clone(),
            images,
        })
    }

    /// Composes `maps[0] ∘ maps[1] ∘ …`.
    pub fn compose_all(maps: &[&TrackMorphism]) -> Result<TrackMorphism> {
        let (last, rest) = maps
            .split_last()
            .ok_or_else(|| Error::ChainMismatch("nothing to compose".into()))?;
        let mut acc = (*last).clone();
        for m in rest.iter().rev() {
            acc = TrackMorphism::compose(m, &acc)?;
        }
        Ok(acc)
    }

    pub fn power(&self, n: usize) -> Result<TrackMorphism> {
        if !self.is_self_map() {
            return Err(Error::NotASelfMap {
                source_name: self.source.name().to_string(),
                target: self.target.name().to_string(),
            });
        }
        let mut acc = TrackMorphism::identity(self.source.clone());
        for _ in 0..n {
            acc = TrackMorphism::compose(self, &acc)?;
        }
        Ok(acc.with_name(format!("{}^{n}", self.name)))
    }

    /// Same images on tracks with the same structure (names and switch
    /// ids may differ).
    pub fn with_tracks(
        &self,
        source: Arc<TrainTrack>,
        target: Arc<TrainTrack>,
    ) -> Result<TrackMorphism> {
        if !self.source.same_structure(&source) || !self.target.same_structure(&target) {
            return Err(Error::ChainMismatch(format!(
                "`{}` does not run from `{}` to `{}`",
                self.name,
                source.name(),
                target.name()
            )));
        }
        let images = source
            .edges()
            .iter()
            .map(|e| self.image(e).cloned().expect("same edges"))
            .collect();
        Ok(TrackMorphism {
            name: self.name.clone(),
            source,
            target,
            images,
        })
    }

    /// Rewrites target letters through `map` and retargets to `target`.
    pub fn relabel_target(&self, map: &EdgeMap, target: Arc<TrainTrack>) -> TrackMorphism {
        TrackMorphism {
            name: self.name.clone(),
            source: self.source.clone(),
            target,
            images: self.images.iter().map(|w| map.apply(w)).collect(),
        }
    }
}

impl fmt::Display for TrackMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images().map(|(e, w)| format!("{e} ↦ {w}")).collect();
        write!(f, "{}: {}", self.name, parts.join(", "))
    }
}

/// Relabels `track` by `perm` and returns the new track with the induced
/// isomorphism `track → relabelled`.
pub fn relabel(
    track: &Arc<TrainTrack>,
    perm: &EdgeMap,
    name: &str,
) -> Result<(Arc<TrainTrack>, TrackMorphism)> {
    let edges = track.edges();
    if perm.len() != edges.len() || edges.iter().any(|e| perm.entries().all(|(k, _)| k != e)) {
        return Err(Error::NotABijection(format!(
            "relabelling must list every edge of `{}` exactly once",
            track.name()
        )));
    }
    let mut targets: Vec<&EdgeLabel> = perm.entries().map(|(_, v)| &v.label).collect();
    targets.sort();
    let mut sorted_edges: Vec<&EdgeLabel> = edges.iter().collect();
    sorted_edges.sort();
    if targets != sorted_edges {
        return Err(Error::NotABijection(
            "relabelling is not a permutation of the alphabet".into(),
        ));
    }
    let image = Arc::new(track.relabeled(perm, name));
    let m = TrackMorphism::from_edge_map(
        format!("relabel:{name}"),
        track.clone(),
        image.clone(),
        perm,
    );
    Ok((image, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::track::Switch;

    fn ends(s: &str) -> Vec<End> {
        s.split_whitespace().map(|t| t.parse().unwrap()).collect()
    }

    fn w(s: &str) -> EdgeWord {
        EdgeWord::parse(s).unwrap()
    }

    // One switch, two loops: ribbon order t(a) t(b) i(a) i(b) with sides
    // {t(a), t(b)} and {i(b), i(a)}.
    fn rose() -> Arc<TrainTrack> {
        Arc::new(TrainTrack::new(
            "rose",
            vec!["a".into(), "b".into()],
            vec![Switch::new("v", ends("t(a) t(b)"), ends("i(b) i(a)"))],
        ))
    }

    fn map(t: &Arc<TrainTrack>, pairs: &[(&str, &str)]) -> TrackMorphism {
        let images = pairs
            .iter()
            .map(|(k, v)| (EdgeLabel::new(k), w(v)))
            .collect();
        TrackMorphism::new("m", t.clone(), t.clone(), images).unwrap()
    }

    #[test]
    fn identity_is_valid_and_neutral() {
        let t = rose();
        let id = TrackMorphism::identity(t.clone());
        assert!(id.check().is_valid());
        let m = map(&t, &[("a", "a b"), ("b", "b")]);
        assert!(TrackMorphism::compose(&id, &m).unwrap().same_images(&m));
        assert!(TrackMorphism::compose(&m, &id).unwrap().same_images(&m));
    }

    #[test]
    fn smooth_passage_is_accepted() {
        let t = rose();
        assert!(map(&t, &[("a", "a b"), ("b", "b")]).check().is_valid());
    }

    #[test]
    fn backtracking_on_one_side_is_rejected() {
        let t = rose();
        // t(a) then i(-b)=t(b): arrives on side A, leaves on side A.
        let report = map(&t, &[("a", "a -b"), ("b", "b")]).check();
        assert!(report
            .issues
            .iter()
            .any(|i| matches!(i, MorphismIssue::NotSmooth { position: 1, .. })));
    }

    #[test]
    fn composition_reduces() {
        let t = rose();
        let f = map(&t, &[("a", "a b"), ("b", "b")]);
        let g = map(&t, &[("a", "a -b"), ("b", "b")]);
        let gf = TrackMorphism::compose(&g, &f).unwrap();
        assert_eq!(gf.image_of("a").unwrap(), &w("a"));
    }

    #[test]
    fn missing_image_is_an_error() {
        let t = rose();
        let images = [(EdgeLabel::new("a"), w("a"))].into_iter().collect();
        assert!(matches!(
            TrackMorphism::new("m", t.clone(), t, images),
            Err(Error::MissingImage { .. })
        ));
    }

    #[test]
    fn relabel_identity_gives_identity() {
        let t = rose();
        let perm = EdgeMap::identity(t.edges());
        let (t2, m) = relabel(&t, &perm, "rose").unwrap();
        assert!(t2.same_structure(&t));
        assert!(m.same_images(&TrackMorphism::identity(t)));
    }

    #[test]
    fn relabel_rejects_non_bijection() {
        let t = rose();
        let perm = EdgeMap::parse("a->b").unwrap();
        assert!(matches!(
            relabel(&t, &perm, "x"),
            Err(Error::NotABijection(_))
        ));
    }
}
