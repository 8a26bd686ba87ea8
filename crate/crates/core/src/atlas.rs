//! Built-in tracks, sequences and maps of the genus 3 example, and the two
//! infinite families of self-maps built from it.
//!
//! Labels follow the base track `tau`. The only exception is `tau_initial`
//! and the sequence `S1`, which use an older labelling related to `tau`
//! by `beta`.

use std::collections::{BTreeMap, VecDeque};
use std::sync::{Arc, OnceLock};

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::morphism::{apply_sequence, relabel, SplitSequence, TrackMorphism};
use crate::track::{EdgeMap, IsoMode, Side, Switch, TrainTrack};
use crate::word::{EdgeLabel, EdgeWord, End, EndKind};

pub const EDGES: [&str; 12] = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l"];

pub const TAU_BOUNDARIES: [&str; 2] = [
    "i j -h -d e a -c -l b f -g -k",
    "i -k -g j b -d -c a e -l -h f",
];
pub const TAU_PRIME_BOUNDARIES: [&str; 2] = [
    "c d -b -j i k -g -f h l -e -a",
    "l c -a -e d h -j -g k i -f -b",
];

pub const PHI1: [(&str, &str); 12] = [
    ("a", "k"),
    ("b", "f i j"),
    ("c", "k g k"),
    ("d", "j"),
    ("e", "j b f"),
    ("f", "l a"),
    ("g", "a"),
    ("h", "l c d"),
    ("i", "e"),
    ("j", "a d"),
    ("k", "d h l"),
    ("l", "f"),
];

pub const PHI2: [(&str, &str); 12] = [
    ("a", "k"),
    ("b", "f g j"),
    ("c", "k i k"),
    ("d", "j"),
    ("e", "j b f"),
    ("f", "l a e"),
    ("g", "a"),
    ("h", "l c d"),
    ("i", "e"),
    ("j", "e a d"),
    ("k", "a d h l a"),
    ("l", "f"),
];

/// Twelve moves from `tau_initial` back to a copy of `tau`.
pub const S1: &str = "i(b)/t(l); t(b)/i(d); t(k)/i(f); i(k)/t(j); t(e)/i(l); t(c)/i(a); \
                      i(c)/t(a); i(e)/t(d); i(h)/t(f); t(h)/i(j); t(f)/i(g); i(j)/t(g)";
/// Twist block legal on `tau`, ending on `tau_prime`.
pub const T_IG: &str = "t(f)/i(i); i(j)/t(i); i(k)/t(g); t(k)/i(g)";
/// Twist block legal on `tau_prime`, ending on `tau`.
pub const T_GI: &str = "t(f)/i(g); i(j)/t(g); i(k)/t(i); t(k)/i(i)";

pub const ALPHA: &str = "a->a, b->b, c->c, d->d, e->e, f->f, g->i, h->h, i->g, j->j, k->k, l->l";
/// From the labels of `tau_initial` to those of `tau`.
pub const BETA: &str = "a->k, b->i, c->g, d->j, e->b, f->l, g->a, h->c, i->e, j->d, k->h, l->f";

fn word(s: &str) -> EdgeWord {
    EdgeWord::parse(s).expect("built-in word parses")
}

fn edge_labels() -> Vec<EdgeLabel> {
    EDGES.iter().map(|&e| EdgeLabel::new(e)).collect()
}

/// Rebuilds a track from its boundary words.
///
/// Consecutive letters `x y` of a boundary word say that the turn from the
/// arrival end of `x` to the departure end of `y` is one step of the ribbon
/// order, which fixes every switch and its cyclic order. Consecutive letters
/// of the `smooth` words (edge paths known to be legal) say that the two
/// ends meet at one switch on opposite sides; those facts decide the sides.
///
/// Boundary words may be listed in either direction; every choice of
/// directions (the first word fixed) is tried in turn.
pub fn reconstruct_track(
    name: &str,
    edges: &[EdgeLabel],
    boundaries: &[EdgeWord],
    smooth: &[EdgeWord],
) -> Result<TrainTrack> {
    let b = boundaries.len();
    let mut first_err = None;
    for mask in 0..(1usize << b.saturating_sub(1)) {
        let oriented: Vec<EdgeWord> = boundaries
            .iter()
            .enumerate()
            .map(|(i, w)| {
                if i > 0 && mask >> (i - 1) & 1 == 1 {
                    w.inverse()
                } else {
                    w.clone()
                }
            })
            .collect();
        match reconstruct_oriented(name, edges, &oriented, smooth) {
            Ok(t) => return Ok(t),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(first_err.unwrap_or_else(|| Error::InconsistentConstraints("no boundary words".into())))
}

fn reconstruct_oriented(
    name: &str,
    edges: &[EdgeLabel],
    boundaries: &[EdgeWord],
    smooth: &[EdgeWord],
) -> Result<TrainTrack> {
    let n = edges.len() * 2;
    let index: BTreeMap<&EdgeLabel, usize> =
        edges.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let id = |e: &End| -> Result<usize> {
        let k = index
            .get(&e.label)
            .ok_or_else(|| Error::UnknownLabel(e.label.to_string()))?;
        Ok(2 * k + usize::from(e.kind == EndKind::Terminal))
    };
    let end = |h: usize| {
        let l = edges[h / 2].clone();
        if h.is_multiple_of(2) {
            End::initial(l)
        } else {
            End::terminal(l)
        }
    };

    let mut sigma = vec![usize::MAX; n];
    let mut uf = UnionFind::<usize>::new(n);
    for (b, w) in boundaries.iter().enumerate() {
        let ls = w.letters();
        for k in 0..ls.len() {
            let (x, y) = (&ls[k], &ls[(k + 1) % ls.len()]);
            let (h, g) = (id(&x.arrival())?, id(&y.departure())?);
            if sigma[h] != usize::MAX && sigma[h] != g {
                return Err(Error::InconsistentConstraints(format!(
                    "boundary {b}: turn after {} leads to both {} and {}",
                    end(h),
                    end(sigma[h]),
                    end(g)
                )));
            }
            sigma[h] = g;
            uf.union(h, g);
        }
    }
    if let Some(h) = sigma.iter().position(|&g| g == usize::MAX) {
        return Err(Error::InconsistentConstraints(format!(
            "no boundary turns at {}",
            end(h)
        )));
    }

    // Opposite-side facts, kept with the word they came from.
    let mut opposite: Vec<Vec<(usize, String)>> = vec![Vec::new(); n];
    for w in smooth {
        for pair in w.letters().windows(2) {
            let (h, g) = (id(&pair[0].arrival())?, id(&pair[1].departure())?);
            if uf.find(h) != uf.find(g) {
                return Err(Error::InconsistentConstraints(format!(
                    "`{w}` turns from {} to {}, which lie at different switches",
                    end(h),
                    end(g)
                )));
            }
            opposite[h].push((g, w.to_string()));
            opposite[g].push((h, w.to_string()));
        }
    }

    // Two-colour each switch by the opposite-side facts.
    let mut colour: Vec<Option<bool>> = vec![None; n];
    for s in 0..n {
        if colour[s].is_some() {
            continue;
        }
        // Terminal ends seed side A when nothing else is known.
        colour[s] = Some(s % 2 == 1);
        let mut queue = VecDeque::from([s]);
        while let Some(h) = queue.pop_front() {
            let c = colour[h].unwrap();
            for (g, w) in &opposite[h] {
                match colour[*g] {
                    None => {
                        colour[*g] = Some(!c);
                        queue.push_back(*g);
                    }
                    Some(d) if d == c => {
                        return Err(Error::InconsistentConstraints(format!(
                            "{} and {} are forced onto the same side and onto opposite sides (via `{w}`)",
                            end(h),
                            end(*g)
                        )));
                    }
                    _ => {}
                }
            }
        }
    }

    // Switches are the cycles of sigma, ordered by their smallest end.
    let mut seen = vec![false; n];
    let mut switches = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut cycle = vec![s];
        seen[s] = true;
        let mut h = sigma[s];
        while h != s {
            if seen[h] {
                return Err(Error::InconsistentConstraints(format!(
                    "turns at {} do not close up",
                    end(h)
                )));
            }
            seen[h] = true;
            cycle.push(h);
            h = sigma[h];
        }
        let order: Vec<(End, Side)> = cycle
            .iter()
            .map(|&h| (end(h), if colour[h].unwrap() { Side::A } else { Side::B }))
            .collect();
        let sw =
            Switch::from_cyclic(format!("v{}", switches.len() + 1), &order).ok_or_else(|| {
                let shown: Vec<String> = order.iter().map(|(e, s)| format!("{e}:{s:?}")).collect();
                Error::InconsistentConstraints(format!(
                    "sides interleave in the cyclic order {}",
                    shown.join(" ")
                ))
            })?;
        switches.push(sw);
    }
    let named: Vec<(String, EdgeWord)> = boundaries
        .iter()
        .enumerate()
        .map(|(i, w)| (format!("d{}", i + 1), w.clone()))
        .collect();
    let track = TrainTrack::new(name, edges.to_vec(), switches).with_declared_boundaries(named);
    let report = track.validate();
    if !report.is_valid() {
        return Err(Error::InconsistentConstraints(report.summary()));
    }
    Ok(track)
}

fn images(table: &[(&str, &str)]) -> Vec<EdgeWord> {
    table.iter().map(|(_, w)| word(w)).collect()
}

/// `tau`, checked against the smooth paths of `phi1`, `phi3` and `psi1`.
pub fn reconstruct_base_track() -> Result<TrainTrack> {
    let boundaries: Vec<EdgeWord> = TAU_BOUNDARIES.iter().map(|w| word(w)).collect();
    let mut smooth = images(&PHI1);
    smooth.extend(phi_words(3)?);
    smooth.extend(psi_words(1)?);
    reconstruct_track("tau", &edge_labels(), &boundaries, &smooth)
}

fn reconstruct_tau_prime() -> Result<TrainTrack> {
    let boundaries: Vec<EdgeWord> = TAU_PRIME_BOUNDARIES.iter().map(|w| word(w)).collect();
    reconstruct_track("tau_prime", &edge_labels(), &boundaries, &images(&PHI2))
}

fn pw(w: &str, n: usize) -> String {
    vec![w; n].join(" ")
}

/// Closed-form images of `phi(2m+1)`.
fn phi_words(n: i64) -> Result<Vec<EdgeWord>> {
    if n < 1 || n % 2 == 0 {
        return Err(Error::BadIndex(n));
    }
    let m = ((n - 1) / 2) as usize;
    Ok(PHI1
        .iter()
        .map(|&(e, w)| match e {
            "f" => word(&format!("l a {}", pw("e a", m))),
            "j" => word(&format!("{} a d", pw("a e", m))),
            "k" => word(&format!("{} d h l {}", pw("e a", m), pw("a e", m))),
            _ => word(w),
        })
        .collect())
}

/// Closed-form images of `psi(n)`.
fn psi_words(n: i64) -> Result<Vec<EdgeWord>> {
    if n < 1 {
        return Err(Error::BadIndex(n));
    }
    let n = n as usize;
    let ig = pw("i g", n);
    let gi = pw("g i", n);
    let t = [
        format!("{ig} k {gi}"),
        format!("f {ig} i {gi} j"),
        format!("{ig} k {gi} g {ig} k {gi}"),
        format!("{gi} j"),
        format!("{gi} j b f {ig}"),
        "l a".into(),
        "a".into(),
        "l c d".into(),
        "e".into(),
        "a d".into(),
        "d h l".into(),
        format!("f {ig}"),
    ];
    Ok(t.iter().map(|w| word(w)).collect())
}

#[derive(Clone, Debug)]
pub enum Payload {
    Track(Arc<TrainTrack>),
    Map(TrackMorphism),
    Sequence {
        seed: String,
        sequence: SplitSequence,
    },
    Relabel {
        from: String,
        to: String,
        map: EdgeMap,
    },
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Track(_) => "track",
            Payload::Map(_) => "map",
            Payload::Sequence { .. } => "sequence",
            Payload::Relabel { .. } => "relabel",
        }
    }
}

#[derive(Clone, Debug)]
pub struct AtlasEntry {
    pub name: String,
    pub note: String,
    pub payload: Payload,
}

/// All built-in data, validated once.
#[derive(Debug)]
pub struct Atlas {
    pub tau: Arc<TrainTrack>,
    pub tau_prime: Arc<TrainTrack>,
    pub tau_initial: Arc<TrainTrack>,
    pub alpha: EdgeMap,
    pub beta: EdgeMap,
    pub involution: EdgeMap,
    pub s1: SplitSequence,
    pub t_ig: SplitSequence,
    pub t_gi: SplitSequence,
    pub phi1: TrackMorphism,
    pub phi2: TrackMorphism,
    /// `T(i,g)`, a morphism `tau_prime → tau`.
    pub twist_ig: TrackMorphism,
    /// `T(g,i)`, a morphism `tau → tau_prime`.
    pub twist_gi: TrackMorphism,
    /// `alpha` as an isomorphism `tau → tau_prime`.
    pub alpha_map: TrackMorphism,
}

fn rehome(
    m: &TrackMorphism,
    name: &str,
    source: &Arc<TrainTrack>,
    target: &Arc<TrainTrack>,
) -> Result<TrackMorphism> {
    Ok(m.with_tracks(source.clone(), target.clone())?
        .with_name(name))
}

fn table_map(name: &str, track: &Arc<TrainTrack>, words: Vec<EdgeWord>) -> Result<TrackMorphism> {
    let table: BTreeMap<EdgeLabel, EdgeWord> = edge_labels().into_iter().zip(words).collect();
    TrackMorphism::new(name, track.clone(), track.clone(), table)
}

impl Atlas {
    pub fn build() -> Result<Atlas> {
        let tau = Arc::new(reconstruct_base_track()?);
        let tau_prime = Arc::new(reconstruct_tau_prime()?);
        let alpha = EdgeMap::parse(ALPHA)?;
        let beta = EdgeMap::parse(BETA)?;
        let initial = tau.relabeled(&beta.inverse(), "tau_initial");
        let tau_initial = Arc::new(
            TrainTrack::new("tau_initial", edge_labels(), initial.switches().to_vec())
                .with_declared_boundaries(initial.declared_boundaries().to_vec()),
        );
        let s1 = SplitSequence::parse(S1)?;
        let t_ig = SplitSequence::parse(T_IG)?;
        let t_gi = SplitSequence::parse(T_GI)?;

        let involution = tau
            .automorphisms(IsoMode::Oriented)?
            .into_iter()
            .find(|m| !m.is_identity())
            .ok_or_else(|| {
                Error::InconsistentConstraints("tau has no orientation preserving symmetry".into())
            })?;

        let phi1 = table_map("phi1", &tau, images(&PHI1))?;
        let phi2 = table_map("phi2", &tau_prime, images(&PHI2))?;
        let (_, tw) = apply_sequence(&tau, &t_ig)?;
        let twist_ig = rehome(&tw, "T(i,g)", &tau_prime, &tau)?;
        let (_, tw) = apply_sequence(&tau_prime, &t_gi)?;
        let twist_gi = rehome(&tw, "T(g,i)", &tau, &tau_prime)?;
        let (_, am) = relabel(&tau, &alpha, "tau_prime")?;
        let alpha_map = rehome(&am, "alpha", &tau, &tau_prime)?;

        for m in [&phi1, &phi2, &twist_ig, &twist_gi, &alpha_map] {
            let r = m.check();
            if !r.is_valid() {
                return Err(Error::InconsistentConstraints(format!(
                    "{}: {}",
                    m.name(),
                    r.summary()
                )));
            }
        }
        Ok(Atlas {
            tau,
            tau_prime,
            tau_initial,
            alpha,
            beta,
            involution,
            s1,
            t_ig,
            t_gi,
            phi1,
            phi2,
            twist_ig,
            twist_gi,
            alpha_map,
        })
    }

    /// The shared, lazily built atlas.
    pub fn get() -> &'static Atlas {
        static ATLAS: OnceLock<Atlas> = OnceLock::new();
        ATLAS.get_or_init(|| Atlas::build().expect("built-in data is consistent"))
    }

    /// `S(2n+1)`: `S1` followed by `n` rounds of both twist blocks.
    pub fn s_odd(&self, n: usize) -> SplitSequence {
        self.s1.concat(&self.t_ig.concat(&self.t_gi).repeat(n))
    }

    /// `T(i,g) ∘ T(g,i)`, a self-map of `tau`.
    pub fn twist_pair(&self) -> TrackMorphism {
        TrackMorphism::compose(&self.twist_ig, &self.twist_gi)
            .expect("twists compose")
            .with_name("T(i,g)∘T(g,i)")
    }

    /// `phi1` obtained by splitting `tau_initial` along `S1` and relabelling by `beta`.
    pub fn phi1_from_splits(&self) -> Result<TrackMorphism> {
        self.odd_from_splits(0)
    }

    /// `phi(2n+1)` from the split sequence `S(2n+1)`.
    pub fn odd_from_splits(&self, n: usize) -> Result<TrackMorphism> {
        let (end, c) = apply_sequence(&self.tau_initial, &self.s_odd(n))?;
        if !end.same_structure(&self.tau) {
            return Err(Error::NotAnIdentification(format!(
                "S{} does not end on tau",
                2 * n + 1
            )));
        }
        let m = c.relabel_target(&self.beta, self.tau.clone());
        rehome(&m, &format!("phi{}", 2 * n + 1), &self.tau, &self.tau)
    }

    /// The other identification of the `S1` loop.
    pub fn phi1_i(&self) -> TrackMorphism {
        let inv = TrackMorphism::from_edge_map(
            "involution",
            self.tau.clone(),
            self.tau.clone(),
            &self.involution,
        );
        TrackMorphism::compose(&self.phi1, &inv)
            .expect("self-maps compose")
            .with_name("phi1_I")
    }

    /// `alpha ∘ phi1 ∘ T(i,g)`.
    pub fn phi2_chain(&self) -> Result<TrackMorphism> {
        Ok(
            TrackMorphism::compose_all(&[&self.alpha_map, &self.phi1, &self.twist_ig])?
                .with_name("phi2"),
        )
    }

    /// `phi1 ∘ (T(i,g) ∘ T(g,i))^m` for `n = 2m+1`.
    pub fn phi_chain(&self, n: i64) -> Result<TrackMorphism> {
        if n < 1 || n % 2 == 0 {
            return Err(Error::BadIndex(n));
        }
        let tt = self.twist_pair().power(((n - 1) / 2) as usize)?;
        Ok(TrackMorphism::compose(&self.phi1, &tt)?.with_name(format!("phi{n}")))
    }

    /// `(T(i,g) ∘ T(g,i))^n ∘ phi1`.
    pub fn psi_chain(&self, n: i64) -> Result<TrackMorphism> {
        if n < 1 {
            return Err(Error::BadIndex(n));
        }
        let tt = self.twist_pair().power(n as usize)?;
        Ok(TrackMorphism::compose(&tt, &self.phi1)?.with_name(format!("psi{n}")))
    }

    /// Closed form of `phi(n)` for odd `n`, checked against its chain.
    pub fn phi(&self, n: i64) -> Result<TrackMorphism> {
        let m = table_map(&format!("phi{n}"), &self.tau, phi_words(n)?)?;
        let chain = self.phi_chain(n)?;
        if !m.same_images(&chain) {
            return Err(Error::ChainMismatch(format!(
                "phi{n} closed form differs from its chain on {:?}",
                m.image_diff(&chain)
            )));
        }
        Ok(m)
    }

    /// Closed form of `psi(n)`, checked against its chain.
    pub fn psi(&self, n: i64) -> Result<TrackMorphism> {
        let m = table_map(&format!("psi{n}"), &self.tau, psi_words(n)?)?;
        let chain = self.psi_chain(n)?;
        if !m.same_images(&chain) {
            return Err(Error::ChainMismatch(format!(
                "psi{n} closed form differs from its chain on {:?}",
                m.image_diff(&chain)
            )));
        }
        Ok(m)
    }

    /// Names accepted by [`Atlas::entry`]. Families take an index suffix.
    pub fn names() -> Vec<&'static str> {
        vec![
            "tau",
            "tau_prime",
            "tau_initial",
            "involution",
            "alpha",
            "beta",
            "S1",
            "T_ig",
            "T_gi",
            "S<2n+1>",
            "phi1",
            "phi1_I",
            "phi2",
            "phi<n>",
            "psi<n>",
            "T_pair",
        ]
    }

    pub fn entry(&self, name: &str) -> Result<AtlasEntry> {
        let e = |note: &str, payload: Payload| AtlasEntry {
            name: name.to_string(),
            note: note.to_string(),
            payload,
        };
        let seq = |seed: &str, s: &SplitSequence| Payload::Sequence {
            seed: seed.into(),
            sequence: s.clone(),
        };
        Ok(match name {
            "tau" => e(
                "base track, rebuilt from its boundary words",
                Payload::Track(self.tau.clone()),
            ),
            "tau_prime" => e(
                "track reached from tau by the twist block T_ig",
                Payload::Track(self.tau_prime.clone()),
            ),
            "tau_initial" => e(
                "tau in the labelling used by S1",
                Payload::Track(self.tau_initial.clone()),
            ),
            "involution" => e(
                "orientation preserving symmetry of tau",
                Payload::Relabel {
                    from: "tau".into(),
                    to: "tau".into(),
                    map: self.involution.clone(),
                },
            ),
            "alpha" => e(
                "identification tau -> tau_prime swapping g and i",
                Payload::Relabel {
                    from: "tau".into(),
                    to: "tau_prime".into(),
                    map: self.alpha.clone(),
                },
            ),
            "beta" => e(
                "relabelling tau_initial -> tau",
                Payload::Relabel {
                    from: "tau_initial".into(),
                    to: "tau".into(),
                    map: self.beta.clone(),
                },
            ),
            "S1" => e(
                "twelve moves from tau_initial to tau",
                seq("tau_initial", &self.s1),
            ),
            "T_ig" => e(
                "twist block on tau, ends on tau_prime",
                seq("tau", &self.t_ig),
            ),
            "T_gi" => e(
                "twist block on tau_prime, ends on tau",
                seq("tau_prime", &self.t_gi),
            ),
            "phi1" => e(
                "self-map of tau from S1, identification II",
                Payload::Map(self.phi1.clone()),
            ),
            "phi1_I" => e(
                "phi1 composed with the involution",
                Payload::Map(self.phi1_i()),
            ),
            "phi2" => e(
                "alpha . phi1 . T(i,g), self-map of tau_prime",
                Payload::Map(self.phi2.clone()),
            ),
            "T_pair" => e(
                "T(i,g) . T(g,i), self-map of tau",
                Payload::Map(self.twist_pair()),
            ),
            _ => {
                if let Some(k) = name.strip_prefix("phi").and_then(|s| s.parse::<i64>().ok()) {
                    e(
                        "odd family, closed form checked against its chain",
                        Payload::Map(self.phi(k)?),
                    )
                } else if let Some(k) = name.strip_prefix("psi").and_then(|s| s.parse::<i64>().ok())
                {
                    e(
                        "twisted family, closed form checked against its chain",
                        Payload::Map(self.psi(k)?),
                    )
                } else if let Some(k) = name.strip_prefix('S').and_then(|s| s.parse::<i64>().ok()) {
                    if k < 1 || k % 2 == 0 {
                        return Err(Error::BadIndex(k));
                    }
                    let s = self.s_odd(((k - 1) / 2) as usize);
                    e("S1 followed by twist rounds", seq("tau_initial", &s))
                } else {
                    return Err(Error::UnknownEntry(name.to_string()));
                }
            }
        })
    }

    /// Track by atlas name.
    pub fn track(&self, name: &str) -> Option<&Arc<TrainTrack>> {
        match name {
            "tau" => Some(&self.tau),
            "tau_prime" => Some(&self.tau_prime),
            "tau_initial" => Some(&self.tau_initial),
            _ => None,
        }
    }
}
