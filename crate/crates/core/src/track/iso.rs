//! Isomorphisms between train-tracks.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use super::{Ribbon, TrainTrack};
use crate::error::{Error, Result};
use crate::word::{EdgeLabel, EdgeWord, End, Letter};

/// Which structure an isomorphism must respect.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IsoMode {
    /// Switch incidence and the partition of each switch into two sides.
    /// The order of ends within a side is ignored and edges may be flipped.
    Abstract,
    /// Also the ribbon order, up to a global reversal. Edges may be flipped.
    Embedded,
    /// Ribbon order preserved and no edge flipped.
    Oriented,
}

impl std::str::FromStr for IsoMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abstract" => Ok(IsoMode::Abstract),
            "embedded" => Ok(IsoMode::Embedded),
            "oriented" => Ok(IsoMode::Oriented),
            _ => Err(Error::parse(
                1,
                1,
                format!("unknown isomorphism mode `{s}`"),
            )),
        }
    }
}

/// A relabelling of edges: each label goes to a signed label.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeMap {
    map: BTreeMap<EdgeLabel, Letter>,
}

impl EdgeMap {
    pub fn new(map: BTreeMap<EdgeLabel, Letter>) -> Result<Self> {
        let mut targets: Vec<&EdgeLabel> = map.values().map(|l| &l.label).collect();
        targets.sort();
        let n = targets.len();
        targets.dedup();
        if targets.len() != n {
            return Err(Error::NotABijection("two edges share an image".into()));
        }
        Ok(EdgeMap { map })
    }

    /// Parses `a->k, b->-i` (also accepts `→` and `:` separators).
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (lhs, rhs) = item
                .split_once("->")
                .or_else(|| item.split_once('→'))
                .or_else(|| item.split_once(':'))
                .ok_or_else(|| Error::parse(1, 1, format!("expected `x->y`, got `{item}`")))?;
            let from: Letter = lhs.trim().parse()?;
            let to: Letter = rhs.trim().parse()?;
            let to = if from.is_forward() { to } else { to.inverse() };
            map.insert(from.label, to);
        }
        EdgeMap::new(map)
    }

    pub fn identity<'a>(labels: impl IntoIterator<Item = &'a EdgeLabel>) -> Self {
        EdgeMap {
            map: labels
                .into_iter()
                .map(|l| (l.clone(), Letter::forward(l.clone())))
                .collect(),
        }
    }

    pub fn image(&self, label: &EdgeLabel) -> Letter {
        self.map
            .get(label)
            .cloned()
            .unwrap_or_else(|| Letter::forward(label.clone()))
    }

    pub fn letter_image(&self, letter: &Letter) -> Letter {
        let img = self.image(&letter.label);
        if letter.is_forward() {
            img
        } else {
            img.inverse()
        }
    }

    pub fn end_image(&self, end: &End) -> End {
        let img = self.image(&end.label);
        let kind = if img.is_forward() {
            end.kind
        } else {
            end.kind.opposite()
        };
        End {
            label: img.label,
            kind,
        }
    }

    pub fn apply(&self, word: &EdgeWord) -> EdgeWord {
        word.relabel(|l| self.letter_image(l))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&EdgeLabel, &Letter)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.map
            .iter()
            .all(|(k, v)| v.is_forward() && &v.label == k)
    }

    pub fn flips_any(&self) -> bool {
        self.map.values().any(|v| !v.is_forward())
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn after(&self, inner: &EdgeMap) -> EdgeMap {
        EdgeMap {
            map: inner
                .map
                .iter()
                .map(|(k, v)| (k.clone(), self.letter_image(v)))
                .collect(),
        }
    }

    pub fn inverse(&self) -> EdgeMap {
        EdgeMap {
            map: self
                .map
                .iter()
                .map(|(k, v)| {
                    let back = if v.is_forward() {
                        Letter::forward(k.clone())
                    } else {
                        Letter::reversed(k.clone())
                    };
                    (v.label.clone(), back)
                })
                .collect(),
        }
    }

    /// Non-trivial entries only, e.g. `a→k, b→h`.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .map
            .iter()
            .filter(|(k, v)| !(v.is_forward() && &v.label == *k))
            .map(|(k, v)| format!("{k}→{v}"))
            .collect();
        if parts.is_empty() {
            "id".to_string()
        } else {
            parts.join(", ")
        }
    }
}

impl fmt::Display for EdgeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.map.iter().map(|(k, v)| format!("{k}->{v}")).collect();
        f.write_str(&parts.join(", "))
    }
}

impl fmt::Debug for EdgeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EdgeMap({})", self.describe())
    }
}

impl Serialize for EdgeMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m: BTreeMap<String, String> = self
            .map
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        m.serialize(s)
    }
}

#[derive(Clone)]
struct State {
    f: Vec<Option<usize>>,
    finv: Vec<Option<usize>>,
    g: Vec<Option<usize>>,
    ginv: Vec<Option<usize>>,
    side_swap: Vec<Option<bool>>,
    /// Embedded mode: whether the ribbon order is reversed.
    reversed: Option<bool>,
}

struct Matcher<'a> {
    src: &'a Ribbon,
    dst: &'a Ribbon,
    src_sig: Vec<(usize, usize, usize)>,
    dst_sig: Vec<(usize, usize, usize)>,
    mode: IsoMode,
}

fn signatures(r: &Ribbon) -> Vec<(usize, usize, usize)> {
    (0..r.len())
        .map(|h| {
            let v = r.switch_of[h];
            let val = r.switch_ends[v].len();
            let same = r.switch_ends[v]
                .iter()
                .filter(|&&x| r.side_of[x] == r.side_of[h])
                .count();
            let far = r.switch_of[Ribbon::opp(h)];
            (val, same, r.switch_ends[far].len())
        })
        .collect()
}

impl Matcher<'_> {
    fn assign(&self, st: &mut State, h0: usize, k0: usize) -> bool {
        let mut queue = vec![(h0, k0)];
        while let Some((h, k)) = queue.pop() {
            match (st.f[h], st.finv[k]) {
                (Some(x), _) if x == k => continue,
                (Some(_), _) | (_, Some(_)) => return false,
                _ => {}
            }
            if self.src_sig[h] != self.dst_sig[k] {
                return false;
            }
            if self.mode == IsoMode::Oriented && h % 2 != k % 2 {
                return false;
            }
            let v = self.src.switch_of[h];
            let w = self.dst.switch_of[k];
            match (st.g[v], st.ginv[w]) {
                (Some(x), _) if x != w => return false,
                (None, Some(_)) => return false,
                _ => {
                    st.g[v] = Some(w);
                    st.ginv[w] = Some(v);
                }
            }
            let swap = self.src.side_of[h] != self.dst.side_of[k];
            match st.side_swap[v] {
                Some(s) if s != swap => return false,
                _ => st.side_swap[v] = Some(swap),
            }
            st.f[h] = Some(k);
            st.finv[k] = Some(h);
            queue.push((Ribbon::opp(h), Ribbon::opp(k)));
            match self.mode {
                IsoMode::Abstract => {}
                IsoMode::Oriented => queue.push((self.src.sigma[h], self.dst.sigma[k])),
                IsoMode::Embedded => {
                    let rev = st.reversed.expect("orientation chosen before assigning");
                    let next = if rev {
                        self.dst.sigma_inv[k]
                    } else {
                        self.dst.sigma[k]
                    };
                    queue.push((self.src.sigma[h], next));
                }
            }
        }
        true
    }

    fn search(&self, st: State, out: &mut Vec<State>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        let Some(h) = (0..st.f.len()).find(|&h| st.f[h].is_none()) else {
            out.push(st);
            return;
        };
        let orientations: Vec<Option<bool>> = match (self.mode, st.reversed) {
            (IsoMode::Embedded, None) => vec![Some(false), Some(true)],
            (_, r) => vec![r],
        };
        for rev in orientations {
            for k in 0..st.finv.len() {
                if st.finv[k].is_some() || self.src_sig[h] != self.dst_sig[k] {
                    continue;
                }
                let mut next = st.clone();
                next.reversed = rev;
                if self.assign(&mut next, h, k) {
                    self.search(next, out, limit);
                    if out.len() >= limit {
                        return;
                    }
                }
            }
        }
    }
}

fn to_edge_map(src: &Ribbon, dst: &Ribbon, f: &[Option<usize>]) -> EdgeMap {
    let map = (0..src.labels.len())
        .map(|e| {
            let k = f[2 * e].expect("complete assignment");
            let label = dst.labels[k / 2].clone();
            let letter = if k.is_multiple_of(2) {
                Letter::forward(label)
            } else {
                Letter::reversed(label)
            };
            (src.labels[e].clone(), letter)
        })
        .collect();
    EdgeMap { map }
}

fn shape(t: &TrainTrack) -> (usize, Vec<(usize, usize)>) {
    let mut s: Vec<(usize, usize)> = t
        .switches()
        .iter()
        .map(|s| {
            let (a, b) = (s.side_a.len(), s.side_b.len());
            (a.min(b), a.max(b))
        })
        .collect();
    s.sort_unstable();
    (t.edges().len(), s)
}

/// All isomorphisms `source → target` respecting `mode`, up to `limit`.
/// Results are sorted.
pub fn isomorphisms_limited(
    source: &TrainTrack,
    target: &TrainTrack,
    mode: IsoMode,
    limit: usize,
) -> Result<Vec<EdgeMap>> {
    source.ensure_valid()?;
    target.ensure_valid()?;
    if shape(source) != shape(target) {
        return Ok(Vec::new());
    }
    let src = source.ribbon();
    let dst = target.ribbon();
    let m = Matcher {
        src_sig: signatures(&src),
        dst_sig: signatures(&dst),
        src: &src,
        dst: &dst,
        mode,
    };
    let st = State {
        f: vec![None; src.len()],
        finv: vec![None; dst.len()],
        g: vec![None; source.switches().len()],
        ginv: vec![None; target.switches().len()],
        side_swap: vec![None; source.switches().len()],
        reversed: None,
    };
    let mut found = Vec::new();
    m.search(st, &mut found, limit);
    let mut maps: Vec<EdgeMap> = found
        .iter()
        .map(|s| to_edge_map(&src, &dst, &s.f))
        .collect();
    maps.sort();
    maps.dedup();
    Ok(maps)
}

impl TrainTrack {
    pub fn isomorphisms(&self, target: &TrainTrack, mode: IsoMode) -> Result<Vec<EdgeMap>> {
        isomorphisms_limited(self, target, mode, usize::MAX)
    }

    pub fn find_isomorphism(&self, target: &TrainTrack, mode: IsoMode) -> Result<Option<EdgeMap>> {
        Ok(isomorphisms_limited(self, target, mode, 1)?
            .into_iter()
            .next())
    }

    pub fn automorphisms(&self, mode: IsoMode) -> Result<Vec<EdgeMap>> {
        self.isomorphisms(self, mode)
    }

    /// Whether `map` is an isomorphism `self → target` in `mode`.
    pub fn is_isomorphism(&self, target: &TrainTrack, map: &EdgeMap, mode: IsoMode) -> bool {
        if map.len() != self.edges().len() || self.edges().iter().any(|e| !map.map.contains_key(e))
        {
            return false;
        }
        if mode == IsoMode::Oriented && map.flips_any() {
            return false;
        }
        let image = self.relabeled(map, target.name());
        if image
            .validate()
            .issues
            .iter()
            .any(|i| !matches!(i, super::TrackIssue::BoundaryMismatch { .. }))
        {
            return false;
        }
        let mut e1 = image.edges().to_vec();
        let mut e2 = target.edges().to_vec();
        e1.sort();
        e2.sort();
        if e1 != e2 {
            return false;
        }
        match mode {
            IsoMode::Abstract => {
                let key = |t: &TrainTrack| {
                    let mut v: Vec<Vec<Vec<End>>> = t
                        .switches()
                        .iter()
                        .map(|s| {
                            let mut a = s.side_a.clone();
                            let mut b = s.side_b.clone();
                            a.sort();
                            b.sort();
                            let mut pair = vec![a, b];
                            pair.sort();
                            pair
                        })
                        .collect();
                    v.sort();
                    v
                };
                key(&image) == key(target)
            }
            IsoMode::Oriented => same_ribbon(&image, target, false),
            IsoMode::Embedded => {
                same_ribbon(&image, target, false) || same_ribbon(&image, target, true)
            }
        }
    }
}

fn same_ribbon(a: &TrainTrack, b: &TrainTrack, reversed: bool) -> bool {
    let ra = a.ribbon();
    let rb = b.ribbon();
    let idx = |r: &Ribbon, e: &End| r.id(e);
    for h in 0..ra.len() {
        let end = ra.end(h);
        let Some(k) = idx(&rb, &end) else {
            return false;
        };
        let na = ra.end(ra.sigma[h]);
        let nb = if reversed {
            rb.end(rb.sigma_inv[k])
        } else {
            rb.end(rb.sigma[k])
        };
        if na != nb {
            return false;
        }
        let cusp_a = ra.side_of[h] == ra.side_of[ra.sigma[h]];
        let nk = if reversed {
            rb.sigma_inv[k]
        } else {
            rb.sigma[k]
        };
        let cusp_b = rb.side_of[k] == rb.side_of[nk];
        if cusp_a != cusp_b {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::track::Switch;

    fn ends(s: &str) -> Vec<End> {
        s.split_whitespace().map(|t| t.parse().unwrap()).collect()
    }

    fn theta() -> TrainTrack {
        // Two switches joined by three edges.
        TrainTrack::new(
            "theta",
            ["a", "b", "c"].iter().map(|s| EdgeLabel::new(s)).collect(),
            vec![
                Switch::new("v", ends("i(a) i(b)"), ends("i(c)")),
                Switch::new("w", ends("t(c)"), ends("t(b) t(a)")),
            ],
        )
    }

    #[test]
    fn edge_map_parse_and_compose() {
        let m = EdgeMap::parse("a->b, b->-a").unwrap();
        assert_eq!(m.image(&"b".into()), Letter::reversed("a"));
        let sq = m.after(&m);
        assert_eq!(sq.image(&"a".into()), Letter::reversed("a"));
        assert!(m.after(&m.inverse()).is_identity());
        assert!(EdgeMap::parse("a->c, b->c").is_err());
    }

    #[test]
    fn identity_is_always_an_automorphism() {
        let t = theta();
        for mode in [IsoMode::Abstract, IsoMode::Embedded, IsoMode::Oriented] {
            let auts = t.automorphisms(mode).unwrap();
            assert!(auts.iter().any(EdgeMap::is_identity), "{mode:?}");
            for a in &auts {
                assert!(t.is_isomorphism(&t, a, mode), "{mode:?} {a:?}");
            }
        }
    }

    #[test]
    fn abstract_mode_sees_more_symmetry() {
        let t = theta();
        let abs = t.automorphisms(IsoMode::Abstract).unwrap().len();
        let emb = t.automorphisms(IsoMode::Embedded).unwrap().len();
        let ori = t.automorphisms(IsoMode::Oriented).unwrap().len();
        assert!(abs >= emb && emb >= ori);
        // a and b are parallel on the same sides: swapping them is abstract only.
        assert_eq!(abs, 4);
        assert_eq!(ori, 1);
    }
}
