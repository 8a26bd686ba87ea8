//! Labelled train-tracks, splitting morphisms and certification of
//! pseudo-Anosov train-track maps.

pub mod atlas;
pub mod certify;
pub mod error;
pub mod format;
pub mod morphism;
pub mod scalar;
pub mod search;
pub mod track;
pub mod word;

pub use certify::{certify, Certificate, Verdict};
pub use error::{Error, Result};
pub use morphism::{SplitMove, SplitSequence, TrackMorphism};
pub use scalar::{FloatScalar, Scalar};
pub use track::{BoundaryCurve, EdgeMap, IsoMode, Side, Switch, TrainTrack};
pub use word::{Direction, EdgeLabel, EdgeWord, End, EndKind, Letter};

/// Exact rationals, used for boundary dynamics.
pub type Exact = num_rational::BigRational;
pub type ExactSideDynamics = certify::SideDynamics<Exact>;
pub type SideDynamics64 = certify::SideDynamics<f64>;
pub type Dilatation64 = certify::Dilatation<f64>;
