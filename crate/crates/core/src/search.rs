//! Bounded depth-first search for splitting sequences that return to a
//! track isomorphic to the seed.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::certify::{certify, Certificate};
use crate::error::{Error, Result};
use crate::morphism::{
    apply_sequence, apply_split, legal_splits, SplitMove, SplitSequence, TrackMorphism,
};
use crate::track::{EdgeMap, IsoMode, TrainTrack};

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub max_depth: usize,
    pub require_fixed_point_free: bool,
    pub require_irreducible: bool,
    pub mode: IsoMode,
    /// Worker threads for the first level; 0 uses the global pool.
    pub threads: usize,
    /// Abort with `ResourceLimit` after visiting this many nodes.
    pub node_limit: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_depth: 4,
            require_fixed_point_free: false,
            require_irreducible: false,
            mode: IsoMode::Oriented,
            threads: 0,
            node_limit: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopResult {
    pub sequence: SplitSequence,
    /// Isomorphism from the seed to the last track of the sequence.
    pub identification: EdgeMap,
    #[serde(skip)]
    pub self_map: TrackMorphism,
    pub images: Vec<(String, String)>,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub max_depth: usize,
    /// Nodes visited, seed excluded.
    pub nodes: usize,
    /// Loops found before filtering, one per sequence and identification.
    pub loop_count: usize,
    pub loops: Vec<LoopResult>,
}

impl SearchReport {
    /// Number of distinct self-maps among the emitted loops.
    pub fn distinct_maps(&self) -> usize {
        let mut keys: Vec<&Vec<(String, String)>> = self.loops.iter().map(|l| &l.images).collect();
        keys.sort();
        keys.dedup();
        keys.len()
    }
}

/// Rebuilds the loop `seed ← … ← end ≅ seed` and certifies its self-map.
pub fn replay(
    seed: &Arc<TrainTrack>,
    sequence: &SplitSequence,
    identification: &EdgeMap,
) -> Result<LoopResult> {
    let (end, composite) = apply_sequence(seed, sequence)?;
    if !seed.is_isomorphism(&end, identification, IsoMode::Embedded) {
        return Err(Error::NotAnIdentification(format!(
            "{} is not an isomorphism from `{}` to the end of the sequence",
            identification.describe(),
            seed.name()
        )));
    }
    let iota = TrackMorphism::from_edge_map("id", seed.clone(), end.clone(), identification);
    let name = if sequence.is_empty() {
        "id".to_string()
    } else {
        format!("loop[{sequence}]")
    };
    let self_map = TrackMorphism::compose(&composite, &iota)?.with_name(name);
    let certificate = certify(&self_map)?;
    let images = self_map
        .images()
        .map(|(e, w)| (e.to_string(), w.to_string()))
        .collect();
    Ok(LoopResult {
        sequence: sequence.clone(),
        identification: identification.clone(),
        self_map,
        images,
        certificate,
    })
}

/// Cheap isomorphism invariant: sorted side sizes of the switches.
fn shape(t: &TrainTrack) -> Vec<(usize, usize)> {
    let mut v: Vec<(usize, usize)> = t
        .switches()
        .iter()
        .map(|s| {
            let (a, b) = (s.side_a.len(), s.side_b.len());
            (a.min(b), a.max(b))
        })
        .collect();
    v.sort_unstable();
    v
}

struct Walker<'a, F> {
    seed: &'a Arc<TrainTrack>,
    seed_shape: Vec<(usize, usize)>,
    cfg: &'a SearchConfig,
    nodes: &'a AtomicUsize,
    found: &'a AtomicUsize,
    emit: &'a F,
}

impl<F: Fn(&LoopResult) + Sync> Walker<'_, F> {
    fn visit(
        &self,
        track: &Arc<TrainTrack>,
        path: &mut Vec<SplitMove>,
        out: &mut Vec<LoopResult>,
    ) -> Result<()> {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if self.cfg.node_limit.is_some_and(|lim| n > lim) {
            return Err(Error::ResourceLimit { nodes: n });
        }
        if shape(track) == self.seed_shape {
            let ids = self.seed.isomorphisms(track, self.cfg.mode)?;
            if !ids.is_empty() {
                let seq = SplitSequence::new(path.clone());
                for id in ids {
                    self.found.fetch_add(1, Ordering::Relaxed);
                    let r = replay(self.seed, &seq, &id)?;
                    let c = &r.certificate;
                    if (!self.cfg.require_fixed_point_free || c.fixed_point_free)
                        && (!self.cfg.require_irreducible || c.irreducible)
                    {
                        (self.emit)(&r);
                        out.push(r);
                    }
                }
            }
        }
        if path.len() == self.cfg.max_depth {
            return Ok(());
        }
        let moves = match legal_splits(track) {
            Ok(m) => m,
            Err(Error::NoSplitAvailable) => return Ok(()),
            Err(e) => return Err(e),
        };
        for mv in moves {
            let (next, _) = apply_split(track, &mv)?;
            path.push(mv);
            self.visit(&next, path, out)?;
            path.pop();
        }
        Ok(())
    }
}

/// Exhaustive search up to `cfg.max_depth`.
pub fn search_loops(seed: &Arc<TrainTrack>, cfg: &SearchConfig) -> Result<SearchReport> {
    search_loops_streaming(seed, cfg, |_| {})
}

/// As [`search_loops`], calling `emit` on every loop as soon as it is found.
/// The returned list is in sequence order whatever the thread count.
pub fn search_loops_streaming<F>(
    seed: &Arc<TrainTrack>,
    cfg: &SearchConfig,
    emit: F,
) -> Result<SearchReport>
where
    F: Fn(&LoopResult) + Sync,
{
    if cfg.max_depth == 0 {
        return Err(Error::BadIndex(0));
    }
    seed.ensure_valid()?;
    let first = legal_splits(seed)?;
    let nodes = AtomicUsize::new(0);
    let found = AtomicUsize::new(0);
    let walker = Walker {
        seed,
        seed_shape: shape(seed),
        cfg,
        nodes: &nodes,
        found: &found,
        emit: &emit,
    };
    let run = || {
        first
            .par_iter()
            .map(|mv| {
                let mut out = Vec::new();
                let (next, _) = apply_split(seed, mv)?;
                let mut path = vec![mv.clone()];
                walker.visit(&next, &mut path, &mut out)?;
                Ok(out)
            })
            .collect::<Result<Vec<Vec<LoopResult>>>>()
    };
    let branches = if cfg.threads == 0 {
        run()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .expect("thread pool starts")
            .install(run)?
    };
    Ok(SearchReport {
        max_depth: cfg.max_depth,
        nodes: nodes.load(Ordering::Relaxed),
        loop_count: found.load(Ordering::Relaxed),
        loops: branches.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::Atlas;

    #[test]
    fn no_loops_at_depth_one() {
        let a = Atlas::get();
        let cfg = SearchConfig {
            max_depth: 1,
            ..Default::default()
        };
        let r = search_loops(&a.tau, &cfg).unwrap();
        assert_eq!(r.nodes, 24);
        assert_eq!(r.loop_count, 0);
    }

    #[test]
    fn empty_replay_is_identity() {
        let a = Atlas::get();
        let id = EdgeMap::identity(a.tau.edges());
        let r = replay(&a.tau, &SplitSequence::default(), &id).unwrap();
        assert!(r
            .self_map
            .images()
            .all(|(e, w)| w.len() == 1 && w.occurrences(e) == 1));
        assert!(!r.certificate.verdict.is_pseudo_anosov());
    }

    #[test]
    fn node_limit_is_enforced() {
        let a = Atlas::get();
        let cfg = SearchConfig {
            max_depth: 3,
            node_limit: Some(10),
            threads: 1,
            ..Default::default()
        };
        assert!(matches!(
            search_loops(&a.tau, &cfg),
            Err(Error::ResourceLimit { .. })
        ));
    }
}
