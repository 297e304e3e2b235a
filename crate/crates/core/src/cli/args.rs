use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// Workbench for unbounded iterated maps: helixes, skids, L-iteration and chaos probes.
#[derive(Debug, Parser, Serialize)]
#[command(name = "helixlab", version, about)]
pub struct Cli {
    /// Flat `key = value` file; each line acts as `--key=value`, and flags on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<String>,
    /// Directory for data files and manifest.json [default: helixlab-out].
    #[arg(long, global = true, value_name = "DIR")]
    #[serde(skip)]
    pub out: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Plain iteration u(1) = a, u(n+1) = f(u(n)); writes the retained window as CSV.
    Iterate(IterateArgs),
    /// L-iteration U(0) = a, U(n) = f_{L(n)}(U(n-1)); writes the retained window as CSV.
    Liter(LiterArgs),
    /// Detect a stable constant-increment helix.
    Detect(DetectArgs),
    /// Check a finite sequence against the helix definition.
    VerifyHelix(VerifyArgs),
    /// Skid (escape episode) statistics of a pseudo-helix.
    Skids(SkidArgs),
    /// Suggest a skid threshold from the stability of the episode count.
    Calibrate(CalibrateArgs),
    /// Fit the order point from laminar lengths at several b.
    Orderpoint(OrderArgs),
    /// Classify the regime at one b.
    Classify(ClassifyArgs),
    /// Classify a range of b and write the atlas.
    Sweep(SweepArgs),
    /// Bisect a regime boundary.
    Refine(RefineArgs),
    /// Lockstep divergence of the orbits of a and a + epsilon.
    Diverge(DivergeArgs),
    /// Coverage of [0, r) by u(n) mod r.
    Transitivity(TransitivityArgs),
    /// Does an orbit started in U reach V under L-iteration?
    LsysProbe(LsysProbeArgs),
    /// Gaps between orbits from several initial values.
    Attract(AttractArgs),
    /// Re-run a manifest and compare output digests.
    Replay(ReplayArgs),
}

/// Counts may be written as integers or in scientific form (`1e6`).
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 => Ok(v as u64),
        _ => Err(format!("'{s}' is not a non-negative integer")),
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MapArgs {
    /// Built-in map: sine-drift or identity.
    #[arg(long, group = "mapsrc")]
    pub map: Option<String>,
    /// Map expression in the DSL, e.g. "0.4*sinpi(x) + x + b".
    #[arg(long, group = "mapsrc")]
    pub map_expr: Option<String>,
    /// File holding a map expression.
    #[arg(long, group = "mapsrc")]
    pub map_file: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LsysArgs {
    /// Built-in L-system family: lfam-gamma-cos or lfam-gamma-sin.
    #[arg(long, group = "lsyssrc")]
    pub lsystem: Option<String>,
    /// L-system text, e.g. "axiom A; A -> A B; B -> B A; A := gamma(x + 1); B := cos(x)".
    #[arg(long, group = "lsyssrc")]
    pub lsystem_text: Option<String>,
    /// File holding an L-system definition.
    #[arg(long, group = "lsyssrc")]
    pub lsystem_file: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Parameter binding name=value (repeatable; later bindings win).
    #[arg(long = "param", value_name = "NAME=VALUE")]
    pub params: Vec<String>,
    /// Significant decimal digits D (at least 15).
    #[arg(long, default_value_t = 40)]
    pub digits: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct IterateArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub common: Common,
    /// Initial value u(1).
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    /// Number of terms N.
    #[arg(long, value_parser = parse_count)]
    pub n: u64,
    /// Retained window, e.g. tail:30, all, default, tail:100+stride:1000+range:5-7.
    #[arg(long, default_value = "default")]
    pub window: String,
}

#[derive(Debug, Args, Serialize)]
pub struct LiterArgs {
    #[command(flatten)]
    pub lsys: LsysArgs,
    #[command(flatten)]
    pub common: Common,
    /// Initial value U(0).
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, value_parser = parse_count)]
    pub n: u64,
    #[arg(long, default_value = "default")]
    pub window: String,
}

#[derive(Debug, Args, Serialize)]
pub struct DetectArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, value_parser = parse_count, default_value = "200000")]
    pub n: u64,
    #[arg(long, default_value_t = 64)]
    pub j_max: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, value_parser = parse_count, default_value = "10000")]
    pub transient: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Comma-separated sequence.
    #[arg(long, allow_hyphen_values = true, group = "seqsrc")]
    pub seq: Option<String>,
    /// File of values, one per line or comma-separated; a CSV with a `value` column also works.
    #[arg(long, group = "seqsrc")]
    pub seq_file: Option<String>,
    #[arg(long)]
    pub period: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub modulo: String,
    #[arg(long, default_value_t = 40)]
    pub digits: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SkidOpts {
    /// Escape threshold θ; episodes end below θ/4.
    #[arg(long, default_value_t = 0.02)]
    pub theta: f64,
    /// Consecutive indices needed to enter or leave an episode.
    #[arg(long, default_value_t = 3)]
    pub h: usize,
    /// Indices below this are ignored.
    #[arg(long, value_parser = parse_count, default_value = "0")]
    pub transient: u64,
    /// Period j of the nearby ordered regime [default: detected].
    #[arg(long)]
    pub period: Option<usize>,
    /// Per-period increment c [default: detected].
    #[arg(long, allow_hyphen_values = true)]
    pub increment: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct SkidArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub skid: SkidOpts,
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, value_parser = parse_count, default_value = "100000")]
    pub n: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, value_parser = parse_count, default_value = "100000")]
    pub n: u64,
    #[arg(long, value_parser = parse_count, default_value = "10000")]
    pub transient: u64,
    #[arg(long)]
    pub period: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub increment: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct OrderArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated b values below the order point.
    #[arg(long, default_value = "0.8870,0.8871,0.8872,0.88725")]
    pub b: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0.5")]
    pub a: String,
    #[arg(long, value_parser = parse_count, default_value = "200000")]
    pub n: u64,
    #[arg(long, default_value_t = 0.02)]
    pub theta: f64,
    #[arg(long, default_value_t = 3)]
    pub h: usize,
    #[arg(long, default_value_t = 2)]
    pub period: usize,
    #[arg(long, default_value_t = 2.0)]
    pub increment: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClassifyOpts {
    /// Comma-separated initial values (at least three).
    #[arg(long, default_value = "0.3,0.5,0.8")]
    pub a_set: String,
    #[arg(long, value_parser = parse_count, default_value = "200000")]
    pub n: u64,
    /// Budget when neither a helix nor a pseudo-helix is found at N.
    #[arg(long, value_parser = parse_count, default_value = "1000000")]
    pub escalate: u64,
    #[arg(long, default_value_t = 64)]
    pub j_max: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, value_parser = parse_count, default_value = "10000")]
    pub transient: u64,
    #[arg(long, default_value_t = 0.02)]
    pub theta: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub opts: ClassifyOpts,
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub opts: ClassifyOpts,
    #[arg(long, allow_hyphen_values = true)]
    pub from: String,
    #[arg(long, allow_hyphen_values = true)]
    pub to: String,
    #[arg(long)]
    pub step: String,
    /// Worker threads [default: number of processors]. Results do not depend on it.
    #[arg(long)]
    #[serde(skip)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct RefineArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub opts: ClassifyOpts,
    #[arg(long, allow_hyphen_values = true)]
    pub lo: String,
    #[arg(long, allow_hyphen_values = true)]
    pub hi: String,
    /// helix:J, helix, pseudo, chaotic or unclassified.
    #[arg(long, default_value = "helix:2")]
    pub predicate: String,
    #[arg(long, default_value_t = 20)]
    pub iterations: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct DivergeArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub lsys: LsysArgs,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, allow_hyphen_values = true, default_value = "1e-6")]
    pub epsilon: String,
    #[arg(long, value_parser = parse_count, default_value = "100000")]
    pub n: u64,
    #[arg(long, value_parser = parse_count, default_value = "1000")]
    pub stride: u64,
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    #[arg(long, value_parser = parse_count, default_value = "10000")]
    pub transient: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct TransitivityArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, value_parser = parse_count, default_value = "1000000")]
    pub n: u64,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 100)]
    pub bins: usize,
    /// Indices below this are not binned.
    #[arg(long, value_parser = parse_count, default_value = "10000")]
    pub skip: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct LsysProbeArgs {
    #[command(flatten)]
    pub lsys: LsysArgs,
    #[command(flatten)]
    pub common: Common,
    /// Start interval as lo,hi.
    #[arg(long, allow_hyphen_values = true)]
    pub u: String,
    /// Target interval as lo,hi.
    #[arg(long, allow_hyphen_values = true)]
    pub v: String,
    #[arg(long, value_parser = parse_count, default_value = "1000")]
    pub k_max: u64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct AttractArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub lsys: LsysArgs,
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated initial values.
    #[arg(long, allow_hyphen_values = true)]
    pub a_list: String,
    #[arg(long, value_parser = parse_count, default_value = "1000")]
    pub n: u64,
    #[arg(long, default_value = "1e-9")]
    pub tol: String,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    /// A manifest.json written by an earlier run.
    pub manifest: String,
}
