//! Action of a self-map on the boundary curves and on their sides.
//!
//! The image of a boundary curve is the concatenation of the edge images,
//! freely and cyclically reduced. Reduction is done on positions, so each
//! junction of the source curve has a well defined image junction: the
//! first surviving letter at or after the start of the image of the letter
//! following it. Letters cancelled around a cusp fold onto that cusp.
//!
//! Sides (cusp-to-cusp stretches) are mapped piecewise affinely onto their
//! image sides in letter coordinates: a side of length `L` is `[0, L]`, and
//! letter `m` covers `[m, m+1]`. Composing these maps along a side orbit and
//! solving `f(q) = q` on every piece counts the boundary periodic points.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::morphism::TrackMorphism;
use crate::scalar::Scalar;
use crate::track::BoundaryCurve;
use crate::word::{reduction_survivors, EdgeWord, Letter};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryImage {
    pub source: usize,
    pub target: usize,
    /// Image junction of junction 0.
    pub rotation: usize,
    /// Image junction of every junction of the source curve.
    pub junction_images: Vec<usize>,
    /// Number of cancelled letter pairs folded at each junction.
    pub cancellation: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryAction {
    pub curves: Vec<BoundaryCurve>,
    pub images: Vec<BoundaryImage>,
}

impl BoundaryAction {
    pub fn permutation(&self) -> Vec<usize> {
        self.images.iter().map(|i| i.target).collect()
    }

    pub fn all_invariant(&self) -> bool {
        self.images.iter().all(|i| i.source == i.target)
    }

    /// Whether some cusp of the curve is moved by the map.
    pub fn rotates(&self, boundary: usize) -> bool {
        let img = &self.images[boundary];
        let curve = &self.curves[boundary];
        img.source != img.target
            || curve
                .cusp_positions()
                .iter()
                .any(|&k| img.junction_images[k] != k)
    }
}

/// Position-tracked reduction of the image of one curve.
struct CurveImage {
    starts: Vec<usize>,
    total: usize,
    survivors: Vec<usize>,
    /// Letter of the concatenation at every position.
    letters: Vec<Letter>,
    pairs: Vec<(usize, usize)>,
    trimmed: usize,
}

impl CurveImage {
    fn new(m: &TrackMorphism, word: &EdgeWord) -> CurveImage {
        let mut letters = Vec::new();
        let mut starts = Vec::with_capacity(word.len());
        for l in word.letters() {
            starts.push(letters.len());
            let img = m.image(&l.label).cloned().unwrap_or_default();
            let img = if l.is_forward() { img } else { img.inverse() };
            letters.extend(img.into_letters());
        }
        // Pairs cancelled by the linear reduction.
        let mut stack: Vec<usize> = Vec::new();
        let mut pairs = Vec::new();
        for (i, l) in letters.iter().enumerate() {
            match stack.last() {
                Some(&top) if letters[top].is_inverse_of(l) => {
                    stack.pop();
                    pairs.push((top, i));
                }
                _ => stack.push(i),
            }
        }
        let survivors = reduction_survivors(&letters, true);
        let trimmed = (stack.len() - survivors.len()) / 2;
        CurveImage {
            starts,
            total: letters.len(),
            survivors,
            letters,
            pairs,
            trimmed,
        }
    }

    fn reduced(&self) -> EdgeWord {
        self.survivors
            .iter()
            .map(|&p| self.letters[p].clone())
            .collect()
    }

    /// Index of the first survivor at or after position `p`, cyclically.
    fn junction(&self, p: usize) -> usize {
        let n = self.survivors.len();
        let i = self.survivors.partition_point(|&s| s < p);
        if n == 0 {
            0
        } else {
            i % n
        }
    }

    fn cancellation_at(&self, k: usize) -> usize {
        let p = self.starts[k];
        let linear = self.pairs.iter().filter(|&&(a, b)| a < p && p <= b).count();
        if k == 0 {
            linear + self.trimmed
        } else {
            linear
        }
    }
}

fn require_self_map(m: &TrackMorphism) -> Result<()> {
    if m.is_self_map() {
        Ok(())
    } else {
        Err(Error::NotASelfMap {
            source_name: m.source().name().to_string(),
            target: m.target().name().to_string(),
        })
    }
}

/// Matches the reduced image against the target curves. A rotation is
/// accepted only if it sends every cusp onto a cusp.
fn match_curve(
    curves: &[BoundaryCurve],
    source: &BoundaryCurve,
    img: &CurveImage,
    index: usize,
) -> Result<(usize, usize, Vec<usize>)> {
    let red = img.reduced();
    let n_src = source.len();
    for (t, target) in curves.iter().enumerate() {
        let n = target.len();
        if red.len() != n || n == 0 {
            continue;
        }
        for r in 0..n {
            if (0..n).any(|i| red.letters()[i] != target.word.letters()[(i + r) % n]) {
                continue;
            }
            let junctions: Vec<usize> = (0..n_src)
                .map(|k| (img.junction(img.starts[k]) + r) % n)
                .collect();
            if source
                .cusp_positions()
                .iter()
                .all(|&k| target.cusps[junctions[k]])
            {
                return Ok((t, r, junctions));
            }
        }
    }
    if curves.iter().any(|c| c.word.rotation_onto(&red).is_some()) {
        return Err(Error::Alignment(format!(
            "image of boundary {index} matches a boundary word but no rotation sends cusps to cusps"
        )));
    }
    Err(Error::BoundaryNotPreserved {
        boundary: index,
        image: red.to_string(),
    })
}

pub fn boundary_action(m: &TrackMorphism) -> Result<BoundaryAction> {
    require_self_map(m)?;
    let curves = m.source().boundary_cycles()?;
    let mut images = Vec::with_capacity(curves.len());
    for (b, c) in curves.iter().enumerate() {
        let img = CurveImage::new(m, &c.word);
        let (target, _, junction_images) = match_curve(&curves, c, &img, b)?;
        let cancellation = (0..c.len()).map(|k| img.cancellation_at(k)).collect();
        images.push(BoundaryImage {
            source: b,
            target,
            rotation: junction_images.first().copied().unwrap_or(0),
            junction_images,
            cancellation,
        });
    }
    Ok(BoundaryAction { curves, images })
}

/// One affine branch `q ↦ slope·q + offset` on `[lo, hi]`.
#[derive(Clone, Debug)]
struct Piece<T> {
    lo: T,
    hi: T,
    slope: T,
    offset: T,
    letter: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PointWarning {
    /// The periodic point sits on a cusp.
    AtCusp,
    /// The periodic point sits on a junction between two letters.
    AtJunction,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicPoint<T> {
    /// Coordinate in `[0, len]` along the side.
    pub position: T,
    /// Slope of the return map at the point.
    pub expansion: T,
    /// Letter carrying the point on each side of the orbit, starting here.
    pub itinerary: Vec<Letter>,
    pub warning: Option<PointWarning>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideData<T> {
    pub boundary: usize,
    /// Index in the boundary word of the first letter.
    pub start: usize,
    pub word: EdgeWord,
    /// Index of the image side.
    pub image: usize,
    pub period: usize,
    pub points: Vec<PeriodicPoint<T>>,
    /// The return map is the identity on some interval.
    pub degenerate: bool,
}

impl<T> SideData<T> {
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SeparatrixOrbit {
    pub boundary: usize,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideDynamics<T> {
    pub action: BoundaryAction,
    pub sides: Vec<SideData<T>>,
    pub warnings: Vec<String>,
}

impl<T: Scalar> SideDynamics<T> {
    pub fn permutation(&self) -> Vec<usize> {
        self.sides.iter().map(|s| s.image).collect()
    }

    /// Cycles of the side permutation, each starting at its smallest index.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.sides.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut orbit = vec![s];
            seen[s] = true;
            let mut x = self.sides[s].image;
            while x != s {
                seen[x] = true;
                orbit.push(x);
                x = self.sides[x].image;
            }
            out.push(orbit);
        }
        out
    }

    /// Side orbits, labelled by the boundary of their first side.
    pub fn separatrix_orbits(&self) -> Vec<SeparatrixOrbit> {
        self.orbits()
            .into_iter()
            .map(|o| SeparatrixOrbit {
                boundary: self.sides[o[0]].boundary,
                length: o.len(),
            })
            .collect()
    }

    /// Every side carries exactly one clean, non-degenerate periodic point.
    pub fn single_boundary_periodic_point(&self) -> bool {
        !self.sides.is_empty()
            && self
                .sides
                .iter()
                .all(|s| !s.degenerate && s.points.len() == 1 && s.points[0].warning.is_none())
    }

    /// The side whose word is `word` (letters separated by spaces or dots).
    pub fn find_side(&self, word: &str) -> Option<usize> {
        let w = EdgeWord::parse(word).ok()?;
        self.sides.iter().position(|s| s.word == w)
    }
}

struct SideMap {
    boundary: usize,
    start: usize,
    len: usize,
    image: usize,
    pieces: Vec<(usize, usize, usize, usize, usize)>,
}

/// Side maps of every side, in boundary then cusp order.
fn side_maps(m: &TrackMorphism, action: &BoundaryAction) -> Result<Vec<SideMap>> {
    let curves = &action.curves;
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (b, c) in curves.iter().enumerate() {
        for s in c.sides() {
            let id = index.len();
            index.insert((b, s.start), id);
        }
    }
    let mut out = Vec::new();
    for (b, c) in curves.iter().enumerate() {
        let img = CurveImage::new(m, &c.word);
        let bi = &action.images[b];
        let target = &curves[bi.target];
        let nsurv = img.survivors.len();
        let mut rank = vec![usize::MAX; img.total];
        for (i, &p) in img.survivors.iter().enumerate() {
            rank[p] = i;
        }
        let n = c.len();
        for s in c.sides() {
            let k = s.start;
            let k2 = (k + s.len) % n;
            let idx1 = img.junction(img.starts[k]);
            let idx2 = img.junction(img.starts[k2]);
            let nwin = match (idx2 + nsurv - idx1) % nsurv.max(1) {
                0 if s.len == n => nsurv,
                x => x,
            };
            let j1 = bi.junction_images[k];
            let j2 = bi.junction_images[k2];
            let tside = target
                .sides()
                .into_iter()
                .find(|t| t.start == j1)
                .ok_or_else(|| {
                    Error::Alignment(format!("cusp {k} of boundary {b} is not sent to a cusp"))
                })?;
            if tside.len != nwin || (tside.start + tside.len) % target.len() != j2 {
                return Err(Error::Alignment(format!(
                    "image cusps of side at {k} on boundary {b} are out of order"
                )));
            }
            // Letters of the side and their runs of surviving image letters.
            let mut pieces = Vec::new();
            let mut seen_survivor = false;
            let mut pending_gap = false;
            for loc in 0..s.len {
                let mm = (k + loc) % n;
                let p0 = img.starts[mm];
                let p1 = if mm + 1 < n {
                    img.starts[mm + 1]
                } else {
                    img.total
                };
                let len = p1 - p0;
                let mut j = 0;
                while j < len {
                    let r = rank[p0 + j];
                    if r == usize::MAX {
                        if seen_survivor {
                            pending_gap = true;
                        }
                        j += 1;
                        continue;
                    }
                    if pending_gap {
                        return Err(Error::Alignment(format!(
                            "cancellation inside the side at {k} of boundary {b}"
                        )));
                    }
                    seen_survivor = true;
                    let rel = (r + nsurv - idx1) % nsurv;
                    let j0 = j;
                    while j < len && rank[p0 + j] != usize::MAX {
                        j += 1;
                    }
                    pieces.push((loc, len, j0, j, rel));
                }
            }
            out.push(SideMap {
                boundary: b,
                start: k,
                len: s.len,
                image: index[&(bi.target, j1)],
                pieces,
            });
        }
    }
    Ok(out)
}

impl SideMap {
    fn affine<T: Scalar>(&self) -> Vec<Piece<T>> {
        self.pieces
            .iter()
            .map(|&(loc, len, j0, j1, rel)| {
                let lenf = T::of_usize(len);
                let base = T::of_usize(loc);
                Piece {
                    lo: base.clone() + T::of_usize(j0) / lenf.clone(),
                    hi: base + T::of_usize(j1) / lenf.clone(),
                    slope: lenf,
                    offset: T::of_i64(rel as i64 - (loc * len) as i64 - j0 as i64),
                    letter: loc,
                }
            })
            .collect()
    }
}

/// Side permutation, periods and boundary periodic points.
pub fn side_dynamics<T: Scalar>(m: &TrackMorphism) -> Result<SideDynamics<T>> {
    let action = boundary_action(m)?;
    let maps = side_maps(m, &action)?;
    let affine: Vec<Vec<Piece<T>>> = maps.iter().map(SideMap::affine).collect();
    let words: Vec<EdgeWord> = maps
        .iter()
        .map(|sm| {
            let c = &action.curves[sm.boundary];
            (0..sm.len)
                .map(|i| c.word.letters()[(sm.start + i) % c.len()].clone())
                .collect()
        })
        .collect();
    let mut sides = Vec::with_capacity(maps.len());
    let mut warnings = Vec::new();
    for (s, sm) in maps.iter().enumerate() {
        let mut orbit = vec![s];
        let mut x = sm.image;
        while x != s {
            orbit.push(x);
            x = maps[x].image;
            if orbit.len() > maps.len() {
                return Err(Error::Alignment("side map is not a permutation".into()));
            }
        }
        let period = orbit.len();
        // (lo, hi, slope, offset, itinerary)
        let mut cur: Vec<(T, T, T, T, Vec<usize>)> = vec![(
            T::zero(),
            T::of_usize(sm.len),
            T::one(),
            T::zero(),
            Vec::new(),
        )];
        for &side in &orbit {
            let mut next = Vec::new();
            for (lo, hi, sl, of, it) in &cur {
                let ilo = sl.clone() * lo.clone() + of.clone();
                let ihi = sl.clone() * hi.clone() + of.clone();
                for p in &affine[side] {
                    let a = if ilo > p.lo {
                        ilo.clone()
                    } else {
                        p.lo.clone()
                    };
                    let b = if ihi < p.hi {
                        ihi.clone()
                    } else {
                        p.hi.clone()
                    };
                    if a >= b {
                        continue;
                    }
                    let dlo = (a - of.clone()) / sl.clone();
                    let dhi = (b - of.clone()) / sl.clone();
                    let mut itin = it.clone();
                    itin.push(p.letter);
                    next.push((
                        dlo,
                        dhi,
                        p.slope.clone() * sl.clone(),
                        p.slope.clone() * of.clone() + p.offset.clone(),
                        itin,
                    ));
                }
            }
            cur = next;
        }
        let mut points: Vec<PeriodicPoint<T>> = Vec::new();
        let mut degenerate = false;
        for (lo, hi, sl, of, it) in cur {
            if sl == T::one() {
                if of == T::zero() {
                    degenerate = true;
                }
                continue;
            }
            let q = of / (T::one() - sl.clone());
            if q < lo || q > hi || points.iter().any(|p| p.position == q) {
                continue;
            }
            let warning = if q == T::zero() || q == T::of_usize(sm.len) {
                Some(PointWarning::AtCusp)
            } else if q.is_integral() {
                Some(PointWarning::AtJunction)
            } else {
                None
            };
            let itinerary = it
                .iter()
                .zip(&orbit)
                .map(|(&loc, &side)| words[side].letters()[loc].clone())
                .collect();
            points.push(PeriodicPoint {
                position: q,
                expansion: sl,
                itinerary,
                warning,
            });
        }
        points.sort_by(|a, b| a.position.partial_cmp(&b.position).unwrap());
        if degenerate {
            warnings.push(format!(
                "side {} of boundary {}: return map has expansion 1 (degenerate)",
                words[s], sm.boundary
            ));
        }
        for p in &points {
            if let Some(w) = p.warning {
                warnings.push(format!(
                    "side {} of boundary {}: periodic point at {} flagged {:?}",
                    words[s], sm.boundary, p.position, w
                ));
            }
        }
        sides.push(SideData {
            boundary: sm.boundary,
            start: sm.start,
            word: words[s].clone(),
            image: sm.image,
            period,
            points,
            degenerate,
        });
    }
    Ok(SideDynamics {
        action,
        sides,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use num_rational::BigRational;

    use super::*;
    use crate::track::{Switch, TrainTrack};
    use crate::word::End;

    fn ends(s: &str) -> Vec<End> {
        s.split_whitespace().map(|t| t.parse().unwrap()).collect()
    }

    fn four_valent() -> Arc<TrainTrack> {
        Arc::new(TrainTrack::new(
            "x",
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![
                Switch::new("v", ends("t(a) t(b)"), ends("i(c) i(d)")),
                Switch::new("w", ends("t(c) t(d)"), ends("i(a) i(b)")),
            ],
        ))
    }

    #[test]
    fn identity_fixes_everything_and_is_degenerate() {
        let t = four_valent();
        let id = TrackMorphism::identity(t);
        let act = boundary_action(&id).unwrap();
        assert!(act.all_invariant());
        for img in &act.images {
            assert_eq!(img.rotation, 0);
            assert!(img.cancellation.iter().all(|&c| c == 0));
            assert_eq!(
                img.junction_images,
                (0..img.junction_images.len()).collect::<Vec<_>>()
            );
        }
        let sd = side_dynamics::<BigRational>(&id).unwrap();
        assert!(sd.sides.iter().all(|s| s.degenerate && s.period == 1));
        assert!(!sd.single_boundary_periodic_point());
        assert!(sd.separatrix_orbits().iter().all(|o| o.length == 1));
        assert!(!sd.warnings.is_empty());
    }

    #[test]
    fn float_and_exact_agree_on_identity() {
        let id = TrackMorphism::identity(four_valent());
        let a = side_dynamics::<f64>(&id).unwrap();
        let b = side_dynamics::<BigRational>(&id).unwrap();
        assert_eq!(a.permutation(), b.permutation());
    }
}
