//! Command-line surface for the spherical cap toolkit: constructions,
//! verification, bound tables, tilings, decompositions, and searches.
//!
//! Exit codes: 0 verified/ok, 1 verification refuted, 2 usage or parse
//! error, 3 internal inconsistency (a constructed object failed its own
//! verification).

mod commands;
mod json;
mod obj;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub enum Failure {
    /// The checked property is false; the report went to standard output.
    Refuted,
    Usage(String),
    Internal(String),
}

#[derive(Parser)]
#[command(
    name = "sepcap",
    version,
    about = "Totally separable packings and coverings of spherical caps"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Angle tolerance override, radians.
    #[arg(long, global = true)]
    pub tol_angle: Option<f64>,
    /// Area tolerance override, steradians.
    #[arg(long, global = true)]
    pub tol_area: Option<f64>,
    /// Master seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Present angles in degrees (stored JSON stays in radians).
    #[arg(long, global = true)]
    pub degrees: bool,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output path; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Obj,
}

#[derive(Subcommand)]
enum Verb {
    /// Build a named packing, arrangement, or covering and verify it.
    Construct(ConstructArgs),
    /// Check a stored packing, TS property, or covering.
    Verify(VerifyArgs),
    /// Tabulate a bound family over a parameter range.
    Bounds(BoundsArgs),
    /// Build a circle tiling or a higher-dimensional cell complex.
    Arrange(ArrangeArgs),
    /// Delaunay and bridge decompositions of a spherical point system.
    Decompose(DecomposeArgs),
    /// Multi-start searches for extremal arrangements and packings.
    Optimize(OptimizeArgs),
    /// Convert a stored JSON artifact to OBJ geometry.
    Export(ExportArgs),
}

#[derive(Args)]
pub struct ConstructArgs {
    /// Packing (octahedral8, cuboctahedral6, kissing8, octa_sub,
    /// lune_grid), arrangement (orthogonal2, orthogonal3, optimal4,
    /// cube_poles4, tetrahedral6, octahedral9, icosahedral15, prism,
    /// pencil), or circumcap covering (`<arrangement>_covering`).
    pub name: String,
    /// Circle count for prism/pencil.
    #[arg(long)]
    pub n: Option<usize>,
    /// Cap count for octa_sub; grid parameter for lune_grid.
    #[arg(long)]
    pub k: Option<usize>,
    /// Lune half-width for lune_grid, degrees.
    #[arg(long)]
    pub alpha_deg: Option<f64>,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum VerifyKind {
    /// Pairwise interior-disjointness only.
    Packing,
    /// Packing plus total separability.
    Ts,
    /// Cell-by-cell covering with distinct caps.
    Covering,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub kind: VerifyKind,
    /// Input JSON path.
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Args)]
pub struct BoundsArgs {
    /// delta, big-delta, rstam-upper, rgc-upper, rgc-prism-lower,
    /// rgc-covering, rgs, jung, covering-cell.
    pub family: String,
    /// Cap count range `a..b` (inclusive) or a single value.
    #[arg(long)]
    pub k: Option<String>,
    /// Circle count range `a..b` (inclusive) or a single value.
    #[arg(long)]
    pub n: Option<String>,
    /// Ambient dimension for rgs/jung.
    #[arg(long)]
    pub d: Option<usize>,
    /// Cap radius range `a..b` in radians, sampled at --steps points.
    #[arg(long)]
    pub rho: Option<String>,
    /// Covering radius range `a..b` in radians.
    #[arg(long)]
    pub big_r: Option<String>,
    /// Diameter range `a..b` in radians (jung).
    #[arg(long)]
    pub diameter: Option<String>,
    /// Sample count for real-valued ranges.
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
}

#[derive(Args)]
pub struct ArrangeArgs {
    /// Named arrangement (see `construct`).
    #[arg(long)]
    pub named: Option<String>,
    /// Circle count for prism/pencil.
    #[arg(long)]
    pub n: Option<usize>,
    /// Circle file: any JSON with `circles: [{pole: [x, y, z]}]`.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Ambient dimension 3..5: enumerate the sign cells of a great-sphere
    /// arrangement instead of a 2-sphere tiling (orthogonal frame unless
    /// --in provides `{d, poles}`).
    #[arg(long)]
    pub d: Option<usize>,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum DecomposeMode {
    Delaunay,
    Molnar,
    Refine,
}

#[derive(Args)]
pub struct DecomposeArgs {
    #[arg(long, value_enum)]
    pub mode: DecomposeMode,
    /// Point file: `{points: [[x, y, z], ...]}` or any packing JSON.
    #[arg(long)]
    pub points: PathBuf,
    /// Cap radius for refine, radians.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Cap radius for refine, degrees.
    #[arg(long)]
    pub rho_deg: Option<f64>,
}

#[derive(Args)]
pub struct OptimizeArgs {
    #[command(subcommand)]
    pub target: OptimizeTarget,
}

#[derive(Args, Clone)]
pub struct SearchFlags {
    /// Random restarts.
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    /// Accepted pattern-search sweeps per restart.
    #[arg(long, default_value_t = 400)]
    pub max_iters: usize,
    /// Initial coordinate step, radians.
    #[arg(long, default_value_t = 0.3)]
    pub initial_step: f64,
    /// Number of step halvings.
    #[arg(long, default_value_t = 20)]
    pub shrink_levels: usize,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Objective {
    /// Maximize the smallest cell inradius.
    MinInradius,
    /// Minimize the largest cell circumradius.
    MaxCircumradius,
}

#[derive(Subcommand)]
pub enum OptimizeTarget {
    /// Extremal n-circle tilings.
    Arrangement {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        objective: Objective,
        #[command(flatten)]
        flags: SearchFlags,
    },
    /// Largest totally separable packing of k congruent caps.
    Packing {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        flags: SearchFlags,
    },
    /// Search against the conjectured min-inradius record (n in {6, 9, 15}).
    Probe {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        flags: SearchFlags,
    },
}

#[derive(Args)]
pub struct ExportArgs {
    /// Input JSON artifact (packing, covering, tiling, or decomposition).
    #[arg(long = "in")]
    pub input: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version print to stdout and exit 0; everything else
            // is a usage error.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.verb {
        Verb::Construct(args) => commands::construct(&args, &cli.common),
        Verb::Verify(args) => commands::verify(&args, &cli.common),
        Verb::Bounds(args) => commands::bounds(&args, &cli.common),
        Verb::Arrange(args) => commands::arrange(&args, &cli.common),
        Verb::Decompose(args) => commands::decompose(&args, &cli.common),
        Verb::Optimize(args) => commands::optimize(&args, &cli.common),
        Verb::Export(args) => commands::export(&args, &cli.common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Refuted) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal inconsistency: {msg}");
            ExitCode::from(3)
        }
    }
}
