//! Loading tracks, maps and sequences from files or `atlas:` names.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use anyhow::Result;
use ttlab_core::atlas::{Atlas, Payload};
use ttlab_core::format::{parse_document, Document};
use ttlab_core::{SplitSequence, TrackMorphism, TrainTrack};

/// Bad or missing input; exits with status 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input<E: fmt::Display>(what: &str) -> impl FnOnce(E) -> anyhow::Error + '_ {
    move |e| InputError(format!("{what}: {e}")).into()
}

fn atlas_name(spec: &str) -> Option<&str> {
    spec.strip_prefix("atlas:")
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(Path::new(path)).map_err(input(path))
}

fn document(path: &str) -> Result<Document> {
    parse_document(&read(path)?).map_err(input(path))
}

fn atlas_payload(name: &str) -> Result<Payload> {
    Ok(Atlas::get().entry(name).map_err(input(name))?.payload)
}

fn atlas_track(name: &str) -> Option<Arc<TrainTrack>> {
    Atlas::get().track(name).cloned()
}

pub fn load_track(spec: &str) -> Result<Arc<TrainTrack>> {
    if let Some(name) = atlas_name(spec) {
        return match atlas_payload(name)? {
            Payload::Track(t) => Ok(t),
            p => Err(InputError(format!(
                "atlas entry `{name}` is a {}, not a track",
                p.kind()
            ))
            .into()),
        };
    }
    let doc = document(spec)?;
    doc.tracks
        .into_iter()
        .next()
        .map(Arc::new)
        .ok_or_else(|| InputError(format!("{spec}: no [track] section")).into())
}

/// A map from a file (tracks resolved in the file, then in the atlas) or
/// an atlas entry.
pub fn load_map(spec: &str, name: Option<&str>) -> Result<TrackMorphism> {
    if let Some(entry) = atlas_name(spec) {
        return match atlas_payload(entry)? {
            Payload::Map(m) => Ok(m),
            p => Err(InputError(format!(
                "atlas entry `{entry}` is a {}, not a map",
                p.kind()
            ))
            .into()),
        };
    }
    let doc = document(spec)?;
    doc.single_map(name, atlas_track).map_err(input(spec))
}

/// A sequence and, for atlas entries, the track it starts from.
pub fn load_sequence(spec: &str) -> Result<(SplitSequence, Option<String>)> {
    if let Some(name) = atlas_name(spec) {
        return match atlas_payload(name)? {
            Payload::Sequence { seed, sequence } => Ok((sequence, Some(seed))),
            p => Err(InputError(format!(
                "atlas entry `{name}` is a {}, not a sequence",
                p.kind()
            ))
            .into()),
        };
    }
    // Inline move lists are accepted when no such file exists.
    let text = if !Path::new(spec).is_file() && spec.contains('(') {
        spec.to_string()
    } else {
        read(spec)?
    };
    Ok((SplitSequence::parse(&text).map_err(input(spec))?, None))
}
