//! Verification of self-maps: fixed edges, incidence matrices, boundary
//! dynamics, dilatation, and the assembled certificate.

mod boundary;
mod matrix;
mod perron;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::Serialize;

pub use boundary::{
    boundary_action, side_dynamics, BoundaryAction, BoundaryImage, PeriodicPoint, PointWarning,
    SeparatrixOrbit, SideData, SideDynamics,
};
pub use matrix::{IncidenceMatrix, Irreducibility};
pub use perron::{dilatation, dilatation_with, Dilatation, DEFAULT_MAX_ITERS, DEFAULT_TOL};

use crate::error::{Error, Result};
use crate::morphism::TrackMorphism;
use crate::word::EdgeLabel;

pub const SCHEMA_VERSION: u32 = 1;

/// Square incidence matrix of a self-map.
pub fn incidence_matrix(m: &TrackMorphism) -> Result<IncidenceMatrix> {
    IncidenceMatrix::of_self_map(m)
}

/// Edges whose image runs over themselves, in either direction.
pub fn fixed_edge_points(m: &TrackMorphism) -> Vec<EdgeLabel> {
    m.images()
        .filter(|(e, w)| w.occurrences(e) > 0)
        .map(|(e, _)| e.clone())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Verdict {
    #[serde(rename = "pA")]
    PseudoAnosov,
    Reducible {
        invariant: Vec<EdgeLabel>,
    },
    Inconclusive,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::PseudoAnosov => "pA",
            Verdict::Reducible { .. } => "reducible",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    pub fn is_pseudo_anosov(&self) -> bool {
        matches!(self, Verdict::PseudoAnosov)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Verdict kind, as used by `--expect`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictKind {
    PseudoAnosov,
    Reducible,
    Inconclusive,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::PseudoAnosov => "pA",
            VerdictKind::Reducible => "reducible",
            VerdictKind::Inconclusive => "inconclusive",
        })
    }
}

impl VerdictKind {
    pub fn matches(self, v: &Verdict) -> bool {
        matches!(
            (self, v),
            (VerdictKind::PseudoAnosov, Verdict::PseudoAnosov)
                | (VerdictKind::Reducible, Verdict::Reducible { .. })
                | (VerdictKind::Inconclusive, Verdict::Inconclusive)
        )
    }
}

impl FromStr for VerdictKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pa" | "pseudo-anosov" => Ok(VerdictKind::PseudoAnosov),
            "reducible" => Ok(VerdictKind::Reducible),
            "inconclusive" => Ok(VerdictKind::Inconclusive),
            _ => Err(Error::parse(1, 1, format!("unknown verdict `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointReport {
    pub position: String,
    pub expansion: String,
    pub itinerary: Vec<String>,
    pub warning: Option<PointWarning>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideReport {
    pub boundary: usize,
    pub word: String,
    pub image: usize,
    pub period: usize,
    pub degenerate: bool,
    pub points: Vec<PointReport>,
}

impl SideReport {
    fn from_data(s: &SideData<BigRational>) -> Self {
        SideReport {
            boundary: s.boundary,
            word: s.word.to_string(),
            image: s.image,
            period: s.period,
            degenerate: s.degenerate,
            points: s
                .points
                .iter()
                .map(|p| PointReport {
                    position: p.position.to_string(),
                    expansion: p.expansion.to_string(),
                    itinerary: p.itinerary.iter().map(|l| l.to_string()).collect(),
                    warning: p.warning,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryReport {
    pub word: String,
    pub cusps: usize,
    pub target: usize,
    pub rotation: usize,
    pub rotated: bool,
    pub cancellation: Vec<usize>,
}

/// The two readings of the fixed-point statement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Readings {
    /// Boundary curves read as punctures.
    pub punctured: String,
    /// Boundary curves collapsed to singularities.
    pub closed: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub map: String,
    pub track: String,
    pub fixed_edges: Vec<EdgeLabel>,
    pub fixed_point_free: bool,
    pub irreducible: bool,
    pub invariant_subgraph: Option<Vec<EdgeLabel>>,
    pub primitive: bool,
    pub orientable: bool,
    pub singularity_type: Vec<usize>,
    pub boundaries: Vec<BoundaryReport>,
    pub single_boundary_periodic_point: bool,
    pub separatrix_orbits: Vec<SeparatrixOrbit>,
    pub sides: Vec<SideReport>,
    pub dilatation: Option<Dilatation<f64>>,
    pub readings: Readings,
    pub verdict: Verdict,
    pub diagnostics: Vec<String>,
}

fn prong_summary(invariant_cusps: &[usize]) -> String {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &k in invariant_cusps {
        *counts.entry(k).or_default() += 1;
    }
    counts
        .iter()
        .rev()
        .map(|(k, n)| {
            let s = if *n == 1 {
                "singularity"
            } else {
                "singularities"
            };
            format!("{n} fixed {k}-prong {s} of positive index")
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// Runs every test on a self-map. Failures of individual tests end up in
/// `diagnostics` and make the verdict inconclusive.
pub fn certify(m: &TrackMorphism) -> Result<Certificate> {
    certify_with(m, DEFAULT_TOL)
}

pub fn certify_with(m: &TrackMorphism, tol: f64) -> Result<Certificate> {
    let matrix = incidence_matrix(m)?;
    let track = m.source();
    let mut diagnostics = Vec::new();

    let fixed_edges = fixed_edge_points(m);
    let irr = matrix.irreducibility()?;
    let irreducible = irr.is_irreducible();
    let invariant_subgraph = match &irr {
        Irreducibility::Reducible { invariant } => Some(invariant.clone()),
        Irreducibility::Irreducible => None,
    };
    let primitive = irreducible && matrix.primitivity_exponent().is_some();
    let orientable = track.orientation().is_ok();
    let singularity_type = track.singularity_type().unwrap_or_else(|e| {
        diagnostics.push(format!("singularity type: {e}"));
        Vec::new()
    });

    let dynamics = match side_dynamics::<BigRational>(m) {
        Ok(sd) => Some(sd),
        Err(e) => {
            diagnostics.push(format!("boundary dynamics: {e}"));
            None
        }
    };
    let (boundaries, sides, separatrix_orbits, single) = match &dynamics {
        Some(sd) => {
            diagnostics.extend(sd.warnings.iter().cloned());
            let boundaries = sd
                .action
                .images
                .iter()
                .map(|img| {
                    let c = &sd.action.curves[img.source];
                    BoundaryReport {
                        word: c.word.to_string(),
                        cusps: c.cusp_count(),
                        target: img.target,
                        rotation: img.rotation,
                        rotated: sd.action.rotates(img.source),
                        cancellation: img.cancellation.clone(),
                    }
                })
                .collect();
            (
                boundaries,
                sd.sides.iter().map(SideReport::from_data).collect(),
                sd.separatrix_orbits(),
                sd.single_boundary_periodic_point(),
            )
        }
        None => (Vec::new(), Vec::new(), Vec::new(), false),
    };

    let fixed_point_free = dynamics.is_some()
        && fixed_edges.is_empty()
        && separatrix_orbits.iter().all(|o| o.length > 1);

    let dilatation = if primitive {
        match dilatation::<f64>(&matrix, tol) {
            Ok(d) => Some(d),
            Err(e) => {
                diagnostics.push(format!("dilatation: {e}"));
                None
            }
        }
    } else {
        None
    };

    let readings = match &dynamics {
        Some(sd) if fixed_point_free => {
            let fixed: Vec<usize> = sd
                .action
                .images
                .iter()
                .filter(|i| i.source == i.target)
                .map(|i| sd.action.curves[i.source].cusp_count())
                .collect();
            Readings {
                punctured: "no fixed points".into(),
                closed: if fixed.is_empty() {
                    "no fixed points".into()
                } else {
                    format!("{} and no other fixed points", prong_summary(&fixed))
                },
            }
        }
        Some(_) => Readings {
            punctured: "fixed points present".into(),
            closed: "fixed points present".into(),
        },
        None => Readings {
            punctured: "undetermined".into(),
            closed: "undetermined".into(),
        },
    };

    let verdict = match invariant_subgraph {
        Some(ref w) => Verdict::Reducible {
            invariant: w.clone(),
        },
        None if primitive && single => Verdict::PseudoAnosov,
        None => {
            if !primitive {
                diagnostics.push("incidence matrix is periodic".into());
            }
            if dynamics.is_some() && !single {
                diagnostics.push("single boundary periodic point test failed".into());
            }
            Verdict::Inconclusive
        }
    };

    Ok(Certificate {
        schema_version: SCHEMA_VERSION,
        map: m.name().to_string(),
        track: track.name().to_string(),
        fixed_edges,
        fixed_point_free,
        irreducible,
        invariant_subgraph,
        primitive,
        orientable,
        singularity_type,
        boundaries,
        single_boundary_periodic_point: single,
        separatrix_orbits,
        sides,
        dilatation,
        readings,
        verdict,
        diagnostics,
    })
}

fn labels(v: &[EdgeLabel]) -> String {
    let v: Vec<&str> = v.iter().map(|l| l.as_str()).collect();
    format!("{{{}}}", v.join(","))
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "certificate (schema {})", self.schema_version)?;
        writeln!(f, "map: {} on {}", self.map, self.track)?;
        writeln!(f, "verdict: {}", self.verdict)?;
        if let Some(w) = &self.invariant_subgraph {
            writeln!(f, "invariant subgraph: {}", labels(w))?;
        }
        writeln!(f, "fixed edges: {}", labels(&self.fixed_edges))?;
        writeln!(f, "fixed point free: {}", self.fixed_point_free)?;
        writeln!(f, "irreducible: {}", self.irreducible)?;
        writeln!(f, "primitive: {}", self.primitive)?;
        writeln!(f, "orientable: {}", self.orientable)?;
        let st: Vec<String> = self
            .singularity_type
            .iter()
            .map(|k| k.to_string())
            .collect();
        writeln!(f, "singularity type: {{{}}}", st.join(","))?;
        for (i, b) in self.boundaries.iter().enumerate() {
            writeln!(
                f,
                "boundary {i}: {} ({} cusps) -> boundary {}, rotation {}{}",
                b.word,
                b.cusps,
                b.target,
                b.rotation,
                if b.rotated { " (non-trivial)" } else { "" }
            )?;
        }
        writeln!(
            f,
            "single boundary periodic point: {}",
            self.single_boundary_periodic_point
        )?;
        for s in &self.sides {
            write!(
                f,
                "  side [{}] on boundary {}: period {}",
                s.word, s.boundary, s.period
            )?;
            if s.degenerate {
                write!(f, ", degenerate")?;
            }
            writeln!(f, ", {} periodic point(s)", s.points.len())?;
            for p in &s.points {
                writeln!(
                    f,
                    "    at {} expansion {}: {}",
                    p.position,
                    p.expansion,
                    p.itinerary.join(" -> ")
                )?;
            }
        }
        let orbits: Vec<String> = self
            .separatrix_orbits
            .iter()
            .map(|o| format!("({}, {})", o.boundary, o.length))
            .collect();
        writeln!(f, "separatrix orbits: {}", orbits.join(" "))?;
        match &self.dilatation {
            Some(d) => writeln!(
                f,
                "dilatation: {:.12} in [{:.15}, {:.15}]",
                d.lambda, d.lower, d.upper
            )?,
            None => writeln!(f, "dilatation: n/a")?,
        }
        writeln!(f, "punctured reading: {}", self.readings.punctured)?;
        writeln!(f, "closed reading: {}", self.readings.closed)?;
        for d in &self.diagnostics {
            writeln!(f, "note: {d}")?;
        }
        Ok(())
    }
}
