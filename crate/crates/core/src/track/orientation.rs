use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use super::{Ribbon, Side, TrainTrack};
use crate::error::{Error, Result};
use crate::word::{Direction, EdgeLabel};

/// Edge directions making every switch have one incoming and one outgoing side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrientationAssignment {
    pub edges: BTreeMap<EdgeLabel, Direction>,
    pub incoming_side: BTreeMap<String, Side>,
}

// Nodes 0..V are switches, V..V+E are edges. A constraint x_v ^ y_e = p
// says whether edge e is flipped relative to the side choice at v.
pub(super) fn orient(track: &TrainTrack) -> Result<OrientationAssignment> {
    let r: Ribbon = track.ribbon();
    let nv = track.switches().len();
    let ne = track.edges().len();
    let mut adj: Vec<Vec<(usize, bool, usize)>> = vec![Vec::new(); nv + ne];
    for h in 0..r.len() {
        let v = r.switch_of[h];
        let e = nv + h / 2;
        let terminal = h % 2 == 1;
        let on_a = r.side_of[h] == Side::A;
        let parity = !(terminal ^ on_a);
        adj[v].push((e, parity, h / 2));
        adj[e].push((v, parity, h / 2));
    }
    let mut value: Vec<Option<bool>> = vec![None; nv + ne];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; nv + ne];
    for root in 0..nv + ne {
        if value[root].is_some() {
            continue;
        }
        value[root] = Some(false);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let xu = value[u].unwrap();
            for &(w, p, edge) in &adj[u] {
                let want = xu ^ p;
                match value[w] {
                    None => {
                        value[w] = Some(want);
                        parent[w] = Some((u, edge));
                        queue.push_back(w);
                    }
                    Some(got) if got != want => {
                        let witness = conflict_cycle(&parent, u, w, edge)
                            .into_iter()
                            .map(|e| r.labels[e].to_string())
                            .collect();
                        return Err(Error::NotOrientable { witness });
                    }
                    _ => {}
                }
            }
        }
    }
    let edges = (0..ne)
        .map(|e| {
            let dir = if value[nv + e].unwrap() {
                Direction::Reversed
            } else {
                Direction::Forward
            };
            (r.labels[e].clone(), dir)
        })
        .collect();
    let incoming_side = (0..nv)
        .map(|v| {
            let side = if value[v].unwrap() { Side::A } else { Side::B };
            (track.switches()[v].id.clone(), side)
        })
        .collect();
    Ok(OrientationAssignment {
        edges,
        incoming_side,
    })
}

fn conflict_cycle(
    parent: &[Option<(usize, usize)>],
    u: usize,
    w: usize,
    closing: usize,
) -> Vec<usize> {
    let path = |mut x: usize| {
        let mut nodes = vec![x];
        let mut edges = vec![];
        while let Some((p, e)) = parent[x] {
            edges.push(e);
            nodes.push(p);
            x = p;
        }
        (nodes, edges)
    };
    let (nu, eu) = path(u);
    let (nw, ew) = path(w);
    // Strip the common suffix leading to the root.
    let mut i = nu.len();
    let mut j = nw.len();
    while i > 1 && j > 1 && nu[i - 2] == nw[j - 2] {
        i -= 1;
        j -= 1;
    }
    let mut cycle: Vec<usize> = eu[..i - 1].to_vec();
    cycle.push(closing);
    cycle.extend(ew[..j - 1].iter().rev());
    cycle.dedup();
    cycle
}

#[cfg(test)]
mod tests {
    use crate::track::{Switch, TrainTrack};
    use crate::word::{EdgeLabel, End};

    fn ends(s: &str) -> Vec<End> {
        s.split_whitespace().map(|t| t.parse().unwrap()).collect()
    }

    #[test]
    fn loop_with_sides_swapped_is_orientable() {
        let t = TrainTrack::new(
            "loop",
            vec![EdgeLabel::new("a")],
            vec![Switch::new("v", ends("t(a)"), ends("i(a)"))],
        );
        assert!(t.orientation().is_ok());
    }

    #[test]
    fn loop_returning_to_same_side_is_not() {
        let t = TrainTrack::new(
            "twisted",
            vec![EdgeLabel::new("a"), EdgeLabel::new("b")],
            vec![Switch::new("v", ends("t(a) i(a)"), ends("i(b) t(b)"))],
        );
        let err = t.orientation().unwrap_err().to_string();
        assert!(err.contains("not orientable"), "{err}");
    }
}
