//! The `geodiam` command line.
//!
//! Every command prints JSON on stdout. Failures print a JSON object with an
//! `error` field on stderr and exit with 1 (I/O or parse), 2 (invalid domain
//! or input point) or 3 (internal invariant violation).

mod render;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::candidates::{
    bisector_adjacency, boundary_foot_candidates, plausible_nodes, plausible_tuples, triple_point_candidates,
    vertex_candidates,
};
use crate::diameter::{compute_diameter_with, diameter_vertex_only, vertex_maps, DiameterError, DiameterOptions};
use crate::domain::{parse_domain, DomainError, PolygonalDomain, VertexId};
use crate::geom::Point;
use crate::oracle::{local_improvement, sample_diameter, sample_set, write_corpus, DomainSpec, OracleError};
use crate::spm::{build_spm, SpmError};
use crate::visgraph::geodesic_distance;

use render::{render_svg, RenderSpec};

#[derive(Parser, Debug)]
#[command(name = "geodiam", version, about = "Geodesic diameter of polygonal domains with holes")]
struct Cli {
    /// Worker threads for the parallel phases.
    #[arg(long, global = true, env = "GEODIAM_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a domain file is valid.
    Validate { path: PathBuf },
    /// Shortest path between two points.
    Distance {
        path: PathBuf,
        #[arg(long, value_parser = parse_point)]
        from: Point,
        #[arg(long, value_parser = parse_point)]
        to: Point,
    },
    /// Shortest path map from a vertex or a point.
    Spm {
        path: PathBuf,
        #[arg(long, conflicts_with = "point", required_unless_present = "point")]
        source: Option<usize>,
        #[arg(long, value_parser = parse_point)]
        point: Option<Point>,
    },
    /// Candidate diameter endpoints.
    Candidates { path: PathBuf },
    /// Geodesic diameter.
    Diameter(DiameterArgs),
    /// Sampling lower bound, or generation of a random domain corpus.
    Oracle(OracleArgs),
    /// SVG drawing of a domain and optional overlays.
    Render(RenderArgs),
}

#[derive(Args, Debug)]
struct DiameterArgs {
    path: PathBuf,
    /// Skip candidates that provably cannot beat the best vertex.
    #[arg(long)]
    prune: bool,
    /// Only domain vertices as candidates.
    #[arg(long)]
    vertex_only: bool,
    /// Append counts, timings and flags.
    #[arg(long)]
    report: bool,
    /// Minimum number of runner-ups listed.
    #[arg(long = "top", default_value_t = 5)]
    top: usize,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(required_unless_present = "generate")]
    path: Option<PathBuf>,
    /// Sample spacing; defaults to the domain scale over 50.
    #[arg(long)]
    resolution: Option<f64>,
    /// Hill-climb the best sample pair.
    #[arg(long)]
    climb: bool,
    /// Write a corpus of random domains into this directory.
    #[arg(long, conflicts_with = "path")]
    generate: Option<PathBuf>,
    /// Seed range `a..b` for --generate.
    #[arg(long, default_value = "0..10", value_parser = parse_range)]
    seeds: (u64, u64),
    #[arg(long, default_value_t = 12)]
    n_outer: usize,
    #[arg(long, default_value_t = 2)]
    holes: usize,
    /// Hole radius range `lo,hi` in units of the outer radius 10.
    #[arg(long, value_parser = parse_point)]
    hole_size: Option<Point>,
}

#[derive(Args, Debug)]
struct RenderArgs {
    path: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 800)]
    width: u32,
    #[arg(long, default_value_t = 1.5)]
    stroke: f64,
    /// Draw the shortest path map from this vertex.
    #[arg(long)]
    spm: Option<usize>,
    /// Draw all candidate endpoints.
    #[arg(long)]
    candidates: bool,
    /// Draw the diameter path.
    #[arg(long)]
    diameter: bool,
    /// Draw oracle sample points at this spacing.
    #[arg(long)]
    oracle_points: Option<f64>,
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    let x: f64 = x.trim().parse().map_err(|e| format!("{x:?}: {e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("{y:?}: {e}"))?;
    Ok(Point::new(x, y))
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a: u64 = a.parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: u64 = b.parse().map_err(|e| format!("{b:?}: {e}"))?;
    Ok((a, b))
}

#[derive(Debug)]
enum Failure {
    Io { path: PathBuf, message: String },
    Parse(String),
    Invalid { kind: String, message: String },
    Invariant(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io { .. } | Failure::Parse(_) => 1,
            Failure::Invalid { .. } => 2,
            Failure::Invariant(_) => 3,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Failure::Io { path, message } => json!({"error": "io", "path": path, "message": message}),
            Failure::Parse(message) => json!({"error": "parse", "message": message}),
            Failure::Invalid { kind, message } => json!({"error": "validation", "kind": kind, "message": message}),
            Failure::Invariant(message) => json!({"error": "invariant", "message": message}),
        }
    }
}

impl From<DomainError> for Failure {
    fn from(e: DomainError) -> Self {
        match e {
            DomainError::Parse(m) => Failure::Parse(m),
            DomainError::Validation { kind, message } => Failure::Invalid {
                kind: serde_json::to_value(&kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                message,
            },
        }
    }
}

impl From<SpmError> for Failure {
    fn from(e: SpmError) -> Self {
        match e {
            SpmError::SourceOutside(p) => {
                Failure::Invalid { kind: "point_outside".into(), message: format!("{:?} is not in the domain", p) }
            }
            other => Failure::Invariant(other.to_string()),
        }
    }
}

impl From<DiameterError> for Failure {
    fn from(e: DiameterError) -> Self {
        match e {
            DiameterError::Spm(s) => s.into(),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Io(e) => Failure::Io { path: PathBuf::new(), message: e.to_string() },
            other => Failure::Invalid { kind: "oracle".into(), message: other.to_string() },
        }
    }
}

fn load(path: &Path) -> Result<PolygonalDomain, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Io { path: path.into(), message: e.to_string() })?;
    Ok(parse_domain(&bytes)?)
}

fn emit<T: Serialize>(value: &T) -> Result<(), Failure> {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Invariant(e.to_string()))?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(Failure::Io { path: PathBuf::from("<stdout>"), message: e.to_string() })
        }
        _ => Ok(()),
    }
}

fn vertex_arg(d: &PolygonalDomain, i: usize) -> Result<VertexId, Failure> {
    if i < d.n() {
        Ok(VertexId(i))
    } else {
        Err(Failure::Invalid { kind: "vertex_index".into(), message: format!("vertex {i} out of range 0..{}", d.n()) })
    }
}

fn ensure_inside(d: &PolygonalDomain, p: Point) -> Result<(), Failure> {
    if d.contains(p) {
        Ok(())
    } else {
        Err(Failure::Invalid { kind: "point_outside".into(), message: format!("{p:?} is not in the domain") })
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { path } => {
            let d = load(&path)?;
            eprintln!("valid: {} vertices, {} holes", d.n(), d.holes().len());
            emit(&json!({"valid": true, "vertices": d.n(), "holes": d.holes().len(), "reoriented": d.was_reoriented()}))
        }
        Command::Distance { path, from, to } => {
            let d = load(&path)?;
            ensure_inside(&d, from)?;
            ensure_inside(&d, to)?;
            emit(&geodesic_distance(&d, from, to))
        }
        Command::Spm { path, source, point } => {
            let d = load(&path)?;
            let s = match (source, point) {
                (Some(i), _) => d.vertex(vertex_arg(&d, i)?),
                (None, Some(p)) => p,
                (None, None) => return Err(Failure::Parse("one of --source or --point is required".into())),
            };
            emit(&build_spm(&d, s)?.to_json_value())
        }
        Command::Candidates { path } => {
            let d = load(&path)?;
            let maps = vertex_maps(&d)?;
            let tuples = plausible_tuples(&bisector_adjacency(&d, &maps));
            let mut all = vertex_candidates(&d);
            all.extend(boundary_foot_candidates(&maps));
            all.extend(triple_point_candidates(&maps));
            all.extend(plausible_nodes(&d, &maps, &tuples));
            emit(&all)
        }
        Command::Diameter(args) => diameter(args),
        Command::Oracle(args) => oracle(args),
        Command::Render(args) => {
            let d = load(&args.path)?;
            let spec = RenderSpec {
                width_px: args.width.max(64),
                stroke: args.stroke,
                spm_source: args.spm.map(|i| vertex_arg(&d, i)).transpose()?,
                candidates: args.candidates,
                diameter: args.diameter,
                oracle_resolution: args.oracle_points,
            };
            let svg = render_svg(&d, &spec)?;
            std::fs::write(&args.out, svg).map_err(|e| Failure::Io { path: args.out.clone(), message: e.to_string() })?;
            emit(&json!({"written": args.out}))
        }
    }
}

fn diameter(args: DiameterArgs) -> Result<(), Failure> {
    let d = load(&args.path)?;
    let opts = DiameterOptions { prune: args.prune, top_k: args.top };
    let (result, report) = if args.vertex_only {
        (diameter_vertex_only(&d)?, None)
    } else {
        let (r, rep) = compute_diameter_with(&d, &opts)?;
        (r, Some(rep))
    };
    let mut out = json!({
        "p": result.p,
        "q": result.q,
        "distance": result.distance,
        "provenance": result.p_provenance,
        "witness_waypoints": result.witness.waypoints,
        "witness_bends": result.witness.bends,
        "runner_ups": result.runner_ups,
    });
    if args.report {
        out["report"] = match report {
            Some(rep) => serde_json::to_value(rep).map_err(|e| Failure::Invariant(e.to_string()))?,
            None => Value::Null,
        };
    }
    emit(&out)
}

fn oracle(args: OracleArgs) -> Result<(), Failure> {
    if let Some(dir) = args.generate {
        let (lo, hi) = args.seeds;
        let specs: Vec<DomainSpec> = (lo..hi)
            .map(|seed| {
                let mut s = DomainSpec::new(seed, args.n_outer, args.holes);
                if let Some(h) = args.hole_size {
                    s.hole_size_range = (h.x, h.y);
                }
                s
            })
            .collect();
        let index = write_corpus(&dir, &specs)?;
        return emit(&index);
    }
    let path = args.path.expect("clap requires a path without --generate");
    let d = load(&path)?;
    let resolution = args.resolution.unwrap_or(d.scale() / 50.0);
    let samples = sample_set(&d, resolution)?.points.len();
    let pair = sample_diameter(&d, resolution)?;
    let mut out = json!({"resolution": resolution, "samples": samples, "p": pair.p, "q": pair.q, "distance": pair.distance});
    if args.climb {
        let c = local_improvement(&d, pair.p, pair.q);
        out["climbed"] = json!({"p": c.p, "q": c.q, "distance": c.distance});
    }
    emit(&out)
}

fn report_failure(f: &Failure) -> ExitCode {
    eprintln!("{}", f.to_json());
    ExitCode::from(f.code())
}

/// Parses `args`, runs the command, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let threads = cli.threads.unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => return report_failure(&Failure::Invariant(e.to_string())),
    };
    match pool.install(|| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report_failure(&f),
    }
}
