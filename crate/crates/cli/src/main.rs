use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use ttlab_core::atlas::{Atlas, Payload};
use ttlab_core::certify::{certify_with, dilatation, incidence_matrix, VerdictKind};
use ttlab_core::format::{write_dot, write_map, write_map_section, write_track};
use ttlab_core::morphism::apply_sequence;
use ttlab_core::search::{search_loops, SearchConfig};
use ttlab_core::{IsoMode, TrackMorphism, TrainTrack};

mod input;

use input::{load_map, load_sequence, load_track, InputError};

/// Train-track maps: validation, splitting, certification and loop search.
///
/// Inputs are files in the ttlab text format or built-in entries written
/// `atlas:NAME` (see `ttlab atlas list`).
#[derive(Parser)]
#[command(name = "ttlab", version)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Width of the certified dilatation interval.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track commands.
    #[command(subcommand)]
    Track(TrackCmd),
    /// Map commands.
    #[command(subcommand)]
    Map(MapCmd),
    /// Splitting sequence commands.
    #[command(subcommand)]
    Seq(SeqCmd),
    /// Built-in data.
    #[command(subcommand)]
    Atlas(AtlasCmd),
    /// Loop search.
    #[command(subcommand)]
    Search(SearchCmd),
}

#[derive(Subcommand)]
enum TrackCmd {
    /// Check switch structure and declared boundaries.
    Validate { track: String },
    /// Euler data, singularity type and switch table.
    Info { track: String },
    /// Boundary curves with cusps marked by `|`.
    Boundaries { track: String },
    /// Graphviz rendering.
    ExportDot {
        track: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct MapArg {
    /// File or `atlas:NAME`.
    map: String,
    /// Map section to use when the file holds several.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Subcommand)]
enum MapCmd {
    /// Check smoothness and coherence of the images.
    Check(MapArg),
    /// Full certificate.
    Certify {
        #[command(flatten)]
        map: MapArg,
        /// Exit with status 1 unless the verdict is this one (pA, reducible, inconclusive).
        #[arg(long)]
        expect: Option<String>,
    },
    /// Incidence matrix and certified dilatation.
    Dilatation(MapArg),
    /// Composite `first ∘ second ∘ …`.
    Compose {
        #[arg(required = true, num_args = 2..)]
        maps: Vec<String>,
        #[arg(long, default_value = "composite")]
        name: String,
    },
}

#[derive(Subcommand)]
enum SeqCmd {
    /// Parse and normalise a sequence.
    Parse { sequence: String },
    /// Split a track along a sequence; prints the last track and the composite map into the first.
    Apply {
        /// Seed track; defaults to the seed of an atlas sequence.
        #[arg(long)]
        track: Option<String>,
        sequence: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum AtlasCmd {
    /// Entry names.
    List,
    /// Write an entry in the text formats.
    Export {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Odd family member phi(n).
    Phi {
        #[arg(long)]
        n: i64,
    },
    /// Twisted family member psi(n).
    Psi {
        #[arg(long)]
        n: i64,
    },
}

#[derive(Subcommand)]
enum SearchCmd {
    /// Splitting sequences returning to an isomorphic track.
    Loops {
        track: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Only report fixed point free self-maps.
        #[arg(long)]
        fpf: bool,
        /// Only report irreducible self-maps.
        #[arg(long)]
        irreducible: bool,
        /// Isomorphism mode: oriented, embedded or abstract.
        #[arg(long, default_value = "oriented")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Prints `text`, or writes it to `dir/file` when an output directory is given.
fn emit(out: Option<&Path>, file: &str, text: &str) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(file);
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn valid_track(t: &TrainTrack) -> Result<()> {
    t.ensure_valid()?;
    Ok(())
}

fn track_cmd(cli: &Cli, cmd: &TrackCmd) -> Result<u8> {
    match cmd {
        TrackCmd::Validate { track } => {
            let t = load_track(track)?;
            let r = t.validate();
            let issues: Vec<String> = r.issues.iter().map(|i| i.to_string()).collect();
            if cli.json {
                print_json(&json!({"track": t.name(), "valid": r.is_valid(), "issues": issues}));
            } else if r.is_valid() {
                println!("{}: valid", t.name());
            } else {
                println!("{}: invalid", t.name());
                for i in &issues {
                    println!("  {i}");
                }
            }
            Ok(u8::from(!r.is_valid()))
        }
        TrackCmd::Info { track } => {
            let t = load_track(track)?;
            valid_track(&t)?;
            let e = t.euler_data()?;
            let st = t.singularity_type()?;
            let autos = t.automorphisms(IsoMode::Oriented)?.len();
            if cli.json {
                print_json(&json!({
                    "track": t.name(),
                    "euler": e,
                    "singularity_type": st,
                    "cusps": t.cusp_count(),
                    "oriented_automorphisms": autos,
                    "switches": t.switches(),
                }));
            } else {
                println!("track {}", t.name());
                println!(
                    "switches {}, edges {}, euler characteristic {}",
                    e.vertices, e.edges, e.euler_characteristic
                );
                println!(
                    "boundary curves {}, genus {}, orientable {}",
                    e.boundary_components, e.genus, e.orientable
                );
                let st: Vec<String> = st.iter().map(|k| k.to_string()).collect();
                println!(
                    "singularity type {{{}}}, cusps {}",
                    st.join(","),
                    t.cusp_count()
                );
                println!("oriented automorphisms {autos}");
                for s in t.switches() {
                    let a: Vec<String> = s.side_a.iter().map(|x| x.to_string()).collect();
                    let b: Vec<String> = s.side_b.iter().map(|x| x.to_string()).collect();
                    println!("  {}: A = {} | B = {}", s.id, a.join(" "), b.join(" "));
                }
            }
            Ok(0)
        }
        TrackCmd::Boundaries { track } => {
            let t = load_track(track)?;
            valid_track(&t)?;
            let curves = t.boundary_cycles()?;
            if cli.json {
                let v: Vec<_> = curves
                    .iter()
                    .map(|c| {
                        let sides: Vec<String> = c
                            .sides()
                            .into_iter()
                            .map(|s| c.side_word(s).to_string())
                            .collect();
                        json!({"word": c.word.to_string(), "cusps": c.cusp_count(), "sides": sides})
                    })
                    .collect();
                print_json(&json!({"track": t.name(), "boundaries": v}));
            } else {
                for (i, c) in curves.iter().enumerate() {
                    println!(
                        "boundary {i} ({} cusps): {}",
                        c.cusp_count(),
                        c.display_with_cusps()
                    );
                }
            }
            Ok(0)
        }
        TrackCmd::ExportDot { track, out } => {
            let t = load_track(track)?;
            valid_track(&t)?;
            emit(out.as_deref(), &format!("{}.dot", t.name()), &write_dot(&t))?;
            Ok(0)
        }
    }
}

fn map_cmd(cli: &Cli, cmd: &MapCmd) -> Result<u8> {
    match cmd {
        MapCmd::Check(arg) => {
            let m = load_map(&arg.map, arg.name.as_deref())?;
            let r = m.check();
            let issues: Vec<String> = r.issues.iter().map(|i| i.to_string()).collect();
            if cli.json {
                print_json(&json!({"map": m.name(), "valid": r.is_valid(), "issues": issues}));
            } else if r.is_valid() {
                println!("{}: valid", m.name());
            } else {
                println!("{}: invalid", m.name());
                for i in &issues {
                    println!("  {i}");
                }
            }
            Ok(u8::from(!r.is_valid()))
        }
        MapCmd::Certify { map, expect } => {
            let expect: Option<VerdictKind> = match expect {
                Some(s) => Some(
                    s.parse()
                        .map_err(|e| InputError(format!("--expect: {e}")))?,
                ),
                None => None,
            };
            let m = load_map(&map.map, map.name.as_deref())?;
            let c = certify_with(&m, cli.tol)?;
            if cli.json {
                println!("{}", c.to_json());
            } else {
                print!("{c}");
            }
            match expect {
                Some(k) if !k.matches(&c.verdict) => {
                    eprintln!("expected verdict {k}, got {}", c.verdict);
                    Ok(1)
                }
                _ => Ok(0),
            }
        }
        MapCmd::Dilatation(arg) => {
            let m = load_map(&arg.map, arg.name.as_deref())?;
            let mat = incidence_matrix(&m)?;
            let d = dilatation::<f64>(&mat, cli.tol)?;
            if cli.json {
                print_json(&json!({"map": m.name(), "matrix": mat, "dilatation": d}));
            } else {
                print!("{mat}");
                println!("lambda {:.15}", d.lambda);
                println!(
                    "certified [{:.15}, {:.15}] width {:.3e}",
                    d.lower,
                    d.upper,
                    d.width()
                );
                let w: Vec<String> = d.widths.iter().map(|x| format!("{x:.6}")).collect();
                println!("widths {}", w.join(" "));
            }
            Ok(0)
        }
        MapCmd::Compose { maps, name } => {
            let loaded: Vec<TrackMorphism> = maps
                .iter()
                .map(|s| load_map(s, None))
                .collect::<Result<_>>()?;
            let refs: Vec<&TrackMorphism> = loaded.iter().collect();
            let c = TrackMorphism::compose_all(&refs)?.with_name(name.as_str());
            if cli.json {
                let images: serde_json::Map<String, serde_json::Value> = c
                    .images()
                    .map(|(e, w)| (e.to_string(), json!(w.to_string())))
                    .collect();
                print_json(
                    &json!({"map": c.name(), "source": c.source().name(), "target": c.target().name(), "images": images}),
                );
            } else {
                print!("{}", write_map(&c));
            }
            Ok(0)
        }
    }
}

fn seq_cmd(cli: &Cli, cmd: &SeqCmd) -> Result<u8> {
    match cmd {
        SeqCmd::Parse { sequence } => {
            let (s, seed) = load_sequence(sequence)?;
            if cli.json {
                let moves: Vec<String> = s.moves.iter().map(|m| m.to_string()).collect();
                print_json(&json!({"seed": seed, "moves": moves}));
            } else {
                if let Some(seed) = seed {
                    println!("# seed: {seed}");
                }
                println!("{s}");
                println!("# {} moves", s.len());
            }
            Ok(0)
        }
        SeqCmd::Apply {
            track,
            sequence,
            out,
        } => {
            let (s, seed) = load_sequence(sequence)?;
            let track = match (track, seed) {
                (Some(t), _) => t.clone(),
                (None, Some(seed)) => format!("atlas:{seed}"),
                (None, None) => bail!(InputError("--track is required for a sequence file".into())),
            };
            let start = load_track(&track)?;
            let (end, comp) = apply_sequence(&start, &s)?;
            let end = Arc::new((*end).clone().with_name(format!("{}_split", start.name())));
            let comp = comp
                .with_tracks(end.clone(), start.clone())?
                .with_name("split");
            let mut text = write_track(&end);
            text.push('\n');
            text.push_str(&write_map_section(&comp));
            emit(out.as_deref(), &format!("{}.tt", end.name()), &text)?;
            Ok(0)
        }
    }
}

fn atlas_cmd(cli: &Cli, cmd: &AtlasCmd) -> Result<u8> {
    let atlas = Atlas::get();
    match cmd {
        AtlasCmd::List => {
            for name in Atlas::names() {
                let probe = name.replace("<n>", "3").replace("<2n+1>", "3");
                let e = atlas.entry(&probe)?;
                if cli.json {
                    println!(
                        "{}",
                        json!({"name": name, "kind": e.payload.kind(), "note": e.note})
                    );
                } else {
                    println!("{name:<12} {:<9} {}", e.payload.kind(), e.note);
                }
            }
            Ok(0)
        }
        AtlasCmd::Export { name, out } => {
            let e = atlas.entry(name).map_err(|e| InputError(e.to_string()))?;
            let (file, text) = match &e.payload {
                Payload::Track(t) => (format!("{name}.tt"), write_track(t)),
                Payload::Map(m) => (format!("{name}.tt"), write_map(m)),
                Payload::Sequence { seed, sequence } => (
                    format!("{name}.seq"),
                    format!(
                        "# seed: {seed}\n{}\n",
                        sequence
                            .moves
                            .iter()
                            .map(|m| m.to_string())
                            .collect::<Vec<_>>()
                            .join(";\n")
                    ),
                ),
                Payload::Relabel { from, to, map } => {
                    (format!("{name}.rel"), format!("# {from} -> {to}\n{map}\n"))
                }
            };
            emit(out.as_deref(), &file, &text)?;
            Ok(0)
        }
        AtlasCmd::Phi { n } => show_map(cli, atlas.phi(*n).map_err(|e| InputError(e.to_string()))?),
        AtlasCmd::Psi { n } => show_map(cli, atlas.psi(*n).map_err(|e| InputError(e.to_string()))?),
    }
}

fn show_map(cli: &Cli, m: TrackMorphism) -> Result<u8> {
    if cli.json {
        let images: serde_json::Map<String, serde_json::Value> = m
            .images()
            .map(|(e, w)| (e.to_string(), json!(w.to_string())))
            .collect();
        print_json(&json!({"map": m.name(), "track": m.source().name(), "images": images}));
    } else {
        print!("{}", write_map_section(&m));
    }
    Ok(0)
}

fn search_cmd(cli: &Cli, cmd: &SearchCmd) -> Result<u8> {
    let SearchCmd::Loops {
        track,
        depth,
        fpf,
        irreducible,
        mode,
        threads,
        out,
    } = cmd;
    let seed = load_track(track)?;
    let mode: IsoMode = mode
        .parse()
        .map_err(|e| InputError(format!("--mode: {e}")))?;
    if *depth == 0 {
        bail!(InputError("--depth must be at least 1".into()));
    }
    let cfg = SearchConfig {
        max_depth: *depth,
        require_fixed_point_free: *fpf,
        require_irreducible: *irreducible,
        mode,
        threads: *threads,
        node_limit: None,
    };
    let report = search_loops(&seed, &cfg)?;
    if let Some(dir) = out {
        for (i, l) in report.loops.iter().enumerate() {
            let text = format!(
                "# sequence: {}\n# identification: {}\n# verdict: {}\n{}",
                l.sequence,
                l.identification,
                l.certificate.verdict,
                write_map_section(&l.self_map.clone().with_name(format!("loop{:03}", i + 1)))
            );
            emit(Some(dir), &format!("loop{:03}.tt", i + 1), &text)?;
        }
    }
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!(
            "depth {}: {} nodes, {} loops, {} reported, {} distinct maps",
            report.max_depth,
            report.nodes,
            report.loop_count,
            report.loops.len(),
            report.distinct_maps()
        );
        for l in &report.loops {
            println!(
                "{} | {} | {}",
                l.sequence,
                l.identification.describe(),
                l.certificate.verdict
            );
        }
    }
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Track(c) => track_cmd(cli, c),
        Command::Map(c) => map_cmd(cli, c),
        Command::Seq(c) => seq_cmd(cli, c),
        Command::Atlas(c) => atlas_cmd(cli, c),
        Command::Search(c) => search_cmd(cli, c),
    }
}

/// The error chain, skipping causes already spelled out by their parent.
fn describe(e: &anyhow::Error) -> String {
    let mut out = e.to_string();
    let mut last = out.clone();
    for cause in e.chain().skip(1) {
        let text = cause.to_string();
        if !last.contains(&text) {
            out.push_str(": ");
            out.push_str(&text);
        }
        last = text;
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
