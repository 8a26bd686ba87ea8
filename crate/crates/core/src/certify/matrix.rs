//! Incidence matrices, irreducibility and primitivity.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::morphism::TrackMorphism;
use crate::word::EdgeLabel;

/// `entries[r][c]` counts occurrences of `cols[c]` (either direction) in
/// the image of `rows[r]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IncidenceMatrix {
    pub rows: Vec<EdgeLabel>,
    pub cols: Vec<EdgeLabel>,
    pub entries: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Irreducibility {
    Irreducible,
    /// A proper non-empty set of edges mapped into itself.
    Reducible {
        invariant: Vec<EdgeLabel>,
    },
}

impl Irreducibility {
    pub fn is_irreducible(&self) -> bool {
        matches!(self, Irreducibility::Irreducible)
    }
}

impl IncidenceMatrix {
    /// Matrix of any morphism: rows over source edges, columns over target edges.
    pub fn of_map(m: &TrackMorphism) -> Self {
        let rows = m.source().edges().to_vec();
        let cols = m.target().edges().to_vec();
        let entries = m
            .image_words()
            .iter()
            .map(|w| cols.iter().map(|c| w.occurrences(c) as u64).collect())
            .collect();
        IncidenceMatrix {
            rows,
            cols,
            entries,
        }
    }

    /// Square matrix of a self-map.
    pub fn of_self_map(m: &TrackMorphism) -> Result<Self> {
        if !m.is_self_map() {
            return Err(Error::NotASelfMap {
                source_name: m.source().name().to_string(),
                target: m.target().name().to_string(),
            });
        }
        let mut out = Self::of_map(m);
        // Columns follow the source order so the matrix is square in one basis.
        let tgt = out.cols.clone();
        let perm: Vec<usize> = out
            .rows
            .iter()
            .map(|r| tgt.iter().position(|c| c == r).unwrap())
            .collect();
        for row in &mut out.entries {
            *row = perm.iter().map(|&j| row[j]).collect();
        }
        out.cols = out.rows.clone();
        Ok(out)
    }

    pub fn from_rows(labels: Vec<EdgeLabel>, entries: Vec<Vec<u64>>) -> Self {
        IncidenceMatrix {
            rows: labels.clone(),
            cols: labels,
            entries,
        }
    }

    pub fn identity(labels: Vec<EdgeLabel>) -> Self {
        let n = labels.len();
        let entries = (0..n)
            .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
            .collect();
        Self::from_rows(labels, entries)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, row: &str, col: &str) -> Option<u64> {
        let r = self.rows.iter().position(|l| l.as_str() == row)?;
        let c = self.cols.iter().position(|l| l.as_str() == col)?;
        Some(self.entries[r][c])
    }

    pub fn row(&self, label: &str) -> Option<&[u64]> {
        let r = self.rows.iter().position(|l| l.as_str() == label)?;
        Some(&self.entries[r])
    }

    pub fn diagonal(&self) -> Vec<u64> {
        (0..self.dim()).map(|i| self.entries[i][i]).collect()
    }

    /// `self · other`, columns of `self` matched with rows of `other` by label.
    pub fn mul(&self, other: &IncidenceMatrix) -> Result<IncidenceMatrix> {
        let idx: Vec<usize> =
            self.cols
                .iter()
                .map(|c| {
                    other.rows.iter().position(|r| r == c).ok_or_else(|| {
                        Error::ChainMismatch(format!("no row `{c}` in right factor"))
                    })
                })
                .collect::<Result<_>>()?;
        let entries = self
            .entries
            .par_iter()
            .map(|row| {
                (0..other.cols.len())
                    .map(|j| {
                        row.iter()
                            .zip(&idx)
                            .map(|(a, &k)| a * other.entries[k][j])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Ok(IncidenceMatrix {
            rows: self.rows.clone(),
            cols: other.cols.clone(),
            entries,
        })
    }

    /// Entrywise `self <= other` on a common basis.
    pub fn entrywise_le(&self, other: &IncidenceMatrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x <= y))
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotASelfMap {
                source_name: "rows".into(),
                target: "columns".into(),
            })
        }
    }

    /// Strong connectivity of `e → e'` whenever `M(e, e') > 0`.
    pub fn irreducibility(&self) -> Result<Irreducibility> {
        self.require_square()?;
        let n = self.dim();
        let mut g = DiGraph::<usize, ()>::with_capacity(n, n * n);
        let nodes: Vec<_> = (0..n).map(|i| g.add_node(i)).collect();
        for i in 0..n {
            for j in 0..n {
                if self.entries[i][j] > 0 {
                    g.add_edge(nodes[i], nodes[j], ());
                }
            }
        }
        let sccs = tarjan_scc(&g);
        if sccs.len() <= 1 {
            return Ok(Irreducibility::Irreducible);
        }
        let mut comp = vec![0; n];
        for (c, members) in sccs.iter().enumerate() {
            for v in members {
                comp[g[*v]] = c;
            }
        }
        let mut best: Option<Vec<usize>> = None;
        for (c, members) in sccs.iter().enumerate() {
            let mut idx: Vec<usize> = members.iter().map(|v| g[*v]).collect();
            let sink = idx
                .iter()
                .all(|&i| (0..n).all(|j| self.entries[i][j] == 0 || comp[j] == c));
            if !sink {
                continue;
            }
            idx.sort_unstable();
            let better = match &best {
                None => true,
                Some(b) => idx.len() > b.len() || (idx.len() == b.len() && idx < *b),
            };
            if better {
                best = Some(idx);
            }
        }
        let invariant = best
            .expect("a finite digraph has a sink component")
            .into_iter()
            .map(|i| self.rows[i].clone())
            .collect();
        Ok(Irreducibility::Reducible { invariant })
    }

    /// Whether some power `M^k` with `k <= (n-1)^2 + 1` is positive.
    pub fn primitivity(&self) -> Result<bool> {
        if !self.irreducibility()?.is_irreducible() {
            return Err(Error::NotIrreducible);
        }
        Ok(self.primitivity_exponent().is_some())
    }

    /// Smallest `k` with `M^k > 0`, searched up to the Wielandt bound.
    pub fn primitivity_exponent(&self) -> Option<usize> {
        let n = self.dim();
        let base: Vec<Vec<bool>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(|&x| x > 0).collect())
            .collect();
        let bound = (n.saturating_sub(1)).pow(2) + 1;
        let mut cur = base.clone();
        for k in 1..=bound {
            if cur.iter().all(|r| r.iter().all(|&x| x)) {
                return Some(k);
            }
            cur = cur
                .par_iter()
                .map(|row| {
                    (0..n)
                        .map(|j| (0..n).any(|m| row[m] && base[m][j]))
                        .collect()
                })
                .collect();
        }
        None
    }

    /// Exact `M^k`.
    pub fn power_exact(&self, k: u32) -> Vec<Vec<BigUint>> {
        let n = self.dim();
        let m: Vec<Vec<BigUint>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(|&x| BigUint::from(x)).collect())
            .collect();
        let mut acc: Vec<Vec<BigUint>> = (0..n)
            .map(|i| (0..n).map(|j| BigUint::from(u32::from(i == j))).collect())
            .collect();
        for _ in 0..k {
            acc = acc
                .iter()
                .map(|row| {
                    (0..n)
                        .map(|j| {
                            let mut s = BigUint::zero();
                            for (l, x) in row.iter().enumerate() {
                                if !x.is_zero() && !m[l][j].is_zero() {
                                    s += x * &m[l][j];
                                }
                            }
                            s
                        })
                        .collect()
                })
                .collect();
        }
        acc
    }
}

impl fmt::Display for IncidenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self
            .entries
            .iter()
            .flatten()
            .map(|x| x.to_string().len())
            .max()
            .unwrap_or(1)
            .max(
                self.cols
                    .iter()
                    .map(|c| c.as_str().len())
                    .max()
                    .unwrap_or(1),
            );
        let rw = self
            .rows
            .iter()
            .map(|r| r.as_str().len())
            .max()
            .unwrap_or(1);
        write!(f, "{:rw$}", "")?;
        for c in &self.cols {
            write!(f, " {:>w$}", c.as_str())?;
        }
        writeln!(f)?;
        for (r, row) in self.rows.iter().zip(&self.entries) {
            write!(f, "{:rw$}", r.as_str())?;
            for x in row {
                write!(f, " {x:>w$}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<EdgeLabel> {
        (0..n).map(|i| EdgeLabel::new(&format!("e{i}"))).collect()
    }

    #[test]
    fn identity_is_reducible_with_singleton_witness() {
        let m = IncidenceMatrix::identity(labels(2));
        match m.irreducibility().unwrap() {
            Irreducibility::Reducible { invariant } => assert_eq!(invariant.len(), 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn three_cycle_is_irreducible_not_primitive() {
        let m = IncidenceMatrix::from_rows(
            labels(3),
            vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]],
        );
        assert!(m.irreducibility().unwrap().is_irreducible());
        assert!(!m.primitivity().unwrap());
    }

    #[test]
    fn primitivity_requires_irreducibility() {
        let m = IncidenceMatrix::from_rows(labels(2), vec![vec![1, 1], vec![0, 1]]);
        assert!(matches!(m.primitivity(), Err(Error::NotIrreducible)));
    }

    #[test]
    fn golden_mean_matrix_is_primitive() {
        let m = IncidenceMatrix::from_rows(labels(2), vec![vec![1, 1], vec![1, 0]]);
        assert_eq!(m.primitivity_exponent(), Some(2));
        let p = m.power_exact(5);
        assert_eq!(p[0][0], BigUint::from(8u32));
    }

    #[test]
    fn sink_component_is_invariant() {
        // e0 -> e1 <-> e2: {e1, e2} is mapped into itself.
        let m = IncidenceMatrix::from_rows(
            labels(3),
            vec![vec![0, 1, 0], vec![0, 0, 1], vec![0, 1, 0]],
        );
        match m.irreducibility().unwrap() {
            Irreducibility::Reducible { invariant } => {
                assert_eq!(invariant, vec![EdgeLabel::new("e1"), EdgeLabel::new("e2")]);
            }
            other => panic!("{other:?}"),
        }
    }
}
