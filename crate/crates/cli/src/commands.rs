//! Argument parsing and dispatch for `qbc`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qbroadcast::channel::bsc;
use qbroadcast::degrade::{degradedness_residual, DegradingProblem};
use qbroadcast::oracle::{cardinality_probe, classical_degraded_region, grid_cq_frontier, OracleFrontier};
use qbroadcast::region::{
    certify_single_letter_cq, cq_broadcast_frontier, cq_cardinality_bound, cq_entanglement_frontier, dephasing_cq_frontier,
    pinching_boundary, qq_frontier, reevaluate_witness, FrontierMeta, RegionKind,
};
use qbroadcast::{Frontier, OptimizerConfig};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::output::{emit, parse_csv, write_stdout, WitnessFile};
use crate::quantities::{report, StateDocument};
use crate::spec::{load_channel, ChannelSpecDocument, ParsedChannel};

/// Witness rates must reproduce their rows within this distance.
pub const VERIFY_TOL: f64 = 1e-6;
/// CSV rows carry 12 significant digits.
const CSV_TOL: f64 = 1e-11;

#[derive(Debug, Parser)]
#[command(name = "qbc", version, about = "Capacity-region frontiers of quantum broadcast channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace a rate-region frontier.
    Region {
        #[arg(value_enum)]
        mode: RegionMode,
        #[command(flatten)]
        opts: RegionOpts,
    },
    /// Entropic quantities of a state or ensemble.
    Quantities {
        #[arg(long)]
        state: PathBuf,
    },
    /// Degradedness checks.
    Check {
        #[command(subcommand)]
        what: CheckCommand,
    },
    /// Exhaustive grid oracles.
    Oracle {
        #[command(subcommand)]
        what: OracleCommand,
    },
    /// Closed-form boundary of the pinching channel.
    PinchingBoundary {
        #[arg(long, default_value_t = 33)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the explicit JSON document of a channel (builtin or file).
    Spec {
        #[arg(long)]
        channel: String,
    },
    /// Re-evaluate the witnesses of a sidecar file.
    Verify {
        #[arg(long)]
        witness: PathBuf,
        /// CSV whose rows should match the sidecar; defaults to the file the
        /// sidecar name was derived from, when present.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = VERIFY_TOL)]
        tol: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionMode {
    /// Common classical vs. Bob's classical rate (cq channels).
    Cq,
    /// Common classical vs. Bob's quantum rate over pure-state ensembles.
    CqEg,
    /// Closed distribution form for generalized dephasing channels.
    Dephasing,
    /// Common quantum vs. Bob's quantum rate (isometric channels).
    Qq,
}

#[derive(Debug, Args)]
pub struct RegionOpts {
    /// Spec file or builtin name.
    #[arg(long)]
    pub channel: String,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 33)]
    pub grid: usize,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Auxiliary alphabet size; defaults to the cardinality bound.
    #[arg(long)]
    pub t_size: Option<usize>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Certify degradedness first and use the degraded formula when it holds
    /// (`cq` with `--k 1` only).
    #[arg(long)]
    pub certify: bool,
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Search for a map degrading Bob's output to Charlie's.
    Degraded {
        #[arg(long)]
        channel: String,
        /// Look for a map from Charlie's output to Bob's instead.
        #[arg(long)]
        reverse: bool,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct MeshOpts {
    /// Probabilities are multiples of 1/mesh.
    #[arg(long, default_value_t = 8)]
    pub mesh: usize,
    /// Common-rate grid used for the mesh-error estimate.
    #[arg(long, default_value_t = 33)]
    pub r_grid: usize,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Grid frontier of a cq channel.
    Grid {
        #[arg(long)]
        channel: String,
        #[arg(long, default_value_t = 2)]
        t_size: usize,
        #[command(flatten)]
        mesh: MeshOpts,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Does enlarging the auxiliary alphabet beyond the bound help?
    Cardinality {
        #[arg(long)]
        channel: String,
        /// Defaults to the cardinality bound of the channel.
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long, default_value_t = 2)]
        extra: usize,
        #[arg(long, default_value_t = 8)]
        mesh: usize,
    },
    /// Grid frontier of the degraded classical cascade BSC(a) -> BSC(b).
    Classical {
        #[arg(long, default_value_t = 0.1)]
        flip_b: f64,
        #[arg(long, default_value_t = 0.2)]
        flip_c: f64,
        #[arg(long, default_value_t = 2)]
        t_size: usize,
        #[command(flatten)]
        mesh: MeshOpts,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code. Errors go to standard error with a stable prefix.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                eprintln!("ERR_VALIDATE: {}", e.to_string().trim_end());
                return 2;
            }
            let _ = e.print();
            return 0;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}: {e}", e.prefix());
            e.exit_code()
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    write_stdout(&(serde_json::to_string_pretty(value)? + "\n"))
}

pub fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Region { mode, opts } => region(mode, &opts),
        Command::Quantities { state } => {
            let doc: StateDocument = serde_json::from_str(&std::fs::read_to_string(state)?)?;
            print_json(&report(&doc.parse()?)?)
        }
        Command::Check { what: CheckCommand::Degraded { channel, reverse, restarts, seed } } => check_degraded(&channel, reverse, restarts, seed),
        Command::Oracle { what } => oracle(what),
        Command::PinchingBoundary { points, out } => boundary(points, out.as_deref()),
        Command::Spec { channel } => {
            let (_, parsed) = load_channel(&channel)?;
            print_json(&ChannelSpecDocument::from_channel(&parsed))
        }
        Command::Verify { witness, csv, tol } => verify(&witness, csv.as_deref(), tol),
    }
}

fn region_config(opts: &RegionOpts) -> CliResult<OptimizerConfig> {
    let mut cfg = OptimizerConfig {
        restarts: opts.restarts,
        seed: opts.seed,
        grid_points: opts.grid,
        t_size: opts.t_size,
        ..OptimizerConfig::default()
    };
    if let Some(m) = opts.max_iterations {
        cfg.max_iterations = m;
    }
    cfg.validate().map_err(|e| CliError::validate(format!("flags: {e}")))?;
    if opts.k == 0 {
        return Err(CliError::validate("--k: block length must be at least 1"));
    }
    Ok(cfg)
}

fn region(mode: RegionMode, opts: &RegionOpts) -> CliResult<()> {
    let cfg = region_config(opts)?;
    let (doc, channel) = load_channel(&opts.channel)?;
    if opts.certify && (mode != RegionMode::Cq || opts.k != 1) {
        return Err(CliError::validate("--certify: only for `region cq` with --k 1"));
    }
    let frontier = match mode {
        RegionMode::Cq if opts.certify => certify_single_letter_cq(channel.cq()?, &cfg)?.frontier,
        RegionMode::Cq => cq_broadcast_frontier(channel.cq()?, opts.k, &cfg)?,
        RegionMode::CqEg => cq_entanglement_frontier(channel.quantum()?, opts.k, &cfg)?,
        RegionMode::Dephasing => {
            if opts.k != 1 {
                return Err(CliError::validate("--k: the dephasing form is single-letter (k = 1)"));
            }
            dephasing_cq_frontier(channel.quantum()?, &cfg)?
        }
        RegionMode::Qq => qq_frontier(channel.quantum()?, opts.k, &cfg)?,
    };
    if frontier.meta.unmet_targets > 0 {
        eprintln!("warning: {} grid targets were not met by any restart", frontier.meta.unmet_targets);
    }
    emit(opts.out.as_deref(), &WitnessFile::new(doc, &frontier))
}

#[derive(Serialize)]
struct DegradedSummary {
    direction: &'static str,
    residual: f64,
    threshold: f64,
    certified: bool,
    classical_search: bool,
    map_kraus_rank: usize,
}

fn check_degraded(arg: &str, reverse: bool, restarts: usize, seed: u64) -> CliResult<()> {
    let (_, channel) = load_channel(arg)?;
    let problem = match (&channel, reverse) {
        (ParsedChannel::Quantum(n), false) => DegradingProblem::from_broadcast(n)?,
        (ParsedChannel::Quantum(n), true) => DegradingProblem::reversed_broadcast(n)?,
        (ParsedChannel::Cq(w), false) => DegradingProblem::from_cq(w)?,
        (ParsedChannel::Cq(_), true) => return Err(CliError::validate("--reverse: only for quantum broadcast channels")),
    };
    let cfg = OptimizerConfig { restarts, seed, ..OptimizerConfig::default() };
    cfg.validate().map_err(|e| CliError::validate(format!("flags: {e}")))?;
    let env_dim = problem.source_dim() * problem.target_dim();
    let r = degradedness_residual(&problem, env_dim, &cfg)?;
    print_json(&DegradedSummary {
        direction: if reverse { "C -> B" } else { "B -> C" },
        residual: r.residual,
        threshold: r.threshold,
        certified: r.certified,
        classical_search: r.classical_search,
        map_kraus_rank: r.map.kraus().len(),
    })
}

fn oracle_file(doc: ChannelSpecDocument, o: &OracleFrontier) -> WitnessFile {
    WitnessFile { mesh_error: Some(o.mesh_error), ..WitnessFile::new(doc, &o.frontier) }
}

#[derive(Serialize)]
struct CardinalitySummary {
    bound: usize,
    extra: usize,
    mesh: usize,
    improvement: f64,
    mesh_error: f64,
    improving_point: Option<(f64, f64)>,
    base_points: usize,
    extended_points: usize,
}

fn oracle(what: OracleCommand) -> CliResult<()> {
    match what {
        OracleCommand::Grid { channel, t_size, mesh, out } => {
            let (doc, parsed) = load_channel(&channel)?;
            let o = grid_cq_frontier(parsed.cq()?, t_size, mesh.mesh, mesh.r_grid)?;
            eprintln!("enumerated {} distributions, mesh error {:.3e}", o.enumerated, o.mesh_error);
            emit(out.as_deref(), &oracle_file(doc, &o))
        }
        OracleCommand::Cardinality { channel, bound, extra, mesh } => {
            let (_, parsed) = load_channel(&channel)?;
            let w = parsed.cq()?;
            let bound = bound.unwrap_or_else(|| cq_cardinality_bound(w.alphabet_size(), w.b_dim(), w.c_dim(), 1));
            let r = cardinality_probe(w, bound, extra, mesh)?;
            print_json(&CardinalitySummary {
                bound: r.bound,
                extra: r.extra,
                mesh: r.mesh,
                improvement: r.improvement,
                mesh_error: r.mesh_error,
                improving_point: r.improving_point.map(|p| (p.common_rate, p.personal_rate)),
                base_points: r.base.len(),
                extended_points: r.extended.len(),
            })
        }
        OracleCommand::Classical { flip_b, flip_c, t_size, mesh, out } => {
            let doc = ChannelSpecDocument {
                payload: serde_json::json!({ "name": "bsc-cascade", "flips": [flip_b, flip_c] }),
                ..ChannelSpecDocument::builtin("bsc-cascade")
            };
            // validates the flip probabilities
            doc.parse()?;
            let o = classical_degraded_region(&bsc(flip_b), &bsc(flip_c), t_size, mesh.mesh, mesh.r_grid)?;
            eprintln!("enumerated {} distributions, mesh error {:.3e}", o.enumerated, o.mesh_error);
            emit(out.as_deref(), &oracle_file(doc, &o))
        }
    }
}

fn boundary(points: usize, out: Option<&Path>) -> CliResult<()> {
    if points < 2 {
        return Err(CliError::validate("--points: at least 2 required"));
    }
    // every parameter value gets a row, including the flat part at R = 1
    let mut pts = (0..points)
        .rev()
        .map(|i| pinching_boundary(i as f64 / (points - 1) as f64))
        .collect::<qbroadcast::Result<Vec<_>>>()?;
    for (i, p) in pts.iter_mut().enumerate() {
        p.witness.id = i;
    }
    let frontier = Frontier { points: pts, meta: FrontierMeta::new(RegionKind::ClosedForm, 1, 0, None) };
    emit(out, &WitnessFile::new(ChannelSpecDocument::builtin("pinching"), &frontier))
}

#[derive(Serialize)]
struct VerifySummary {
    points: usize,
    max_deviation: f64,
    tolerance: f64,
    csv_rows_checked: usize,
}

/// Largest deviation between the recorded and recomputed rates of each
/// witness.
pub fn witness_deviations(file: &WitnessFile) -> CliResult<Vec<f64>> {
    let channel = file.channel.parse()?;
    // classical oracle witnesses are distributions for the diagonal cq embedding
    let kind = match file.kind {
        RegionKind::ClassicalOracle => RegionKind::CqBroadcastDegraded,
        k => k,
    };
    file.points
        .iter()
        .map(|p| {
            let r = reevaluate_witness(kind, channel.region_channel(), file.k, &p.witness.params)
                .map_err(|e| CliError::at(&format!("points[{}].witness", p.witness.id), e))?;
            let common = qbroadcast::region::clip(r.common());
            let personal = qbroadcast::region::clip(r.personal);
            Ok((common - p.common_rate).abs().max((personal - p.personal_rate).abs()))
        })
        .collect()
}

fn verify(witness: &Path, csv: Option<&Path>, tol: f64) -> CliResult<()> {
    let file: WitnessFile = serde_json::from_str(&std::fs::read_to_string(witness)?)?;
    let deviations = witness_deviations(&file)?;
    let csv_path = csv.map(Path::to_path_buf).or_else(|| {
        let s = witness.to_str()?.strip_suffix(".witness.json")?;
        Path::new(s).is_file().then(|| PathBuf::from(s))
    });
    let mut csv_rows = 0;
    if let Some(path) = csv_path {
        let rows = parse_csv(&std::fs::read_to_string(&path)?)?;
        if rows.len() != file.points.len() {
            return Err(CliError::Verify(format!("{}: {} rows but {} witnesses", path.display(), rows.len(), file.points.len())));
        }
        for (row, p) in rows.iter().zip(&file.points) {
            let scale = 1.0_f64.max(p.common_rate.abs()).max(p.personal_rate.abs());
            if row.2 != p.witness.id
                || (row.0 - p.common_rate).abs() > CSV_TOL * scale
                || (row.1 - p.personal_rate).abs() > CSV_TOL * scale
            {
                return Err(CliError::Verify(format!("{}: row {} does not match witness {}", path.display(), row.2, p.witness.id)));
            }
        }
        csv_rows = rows.len();
    }
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
    if let Some((i, d)) = deviations.iter().enumerate().find(|(_, d)| **d > tol) {
        return Err(CliError::Verify(format!("witness {i} re-evaluates {d:.3e} away from its row (tolerance {tol:.1e})")));
    }
    print_json(&VerifySummary { points: file.points.len(), max_deviation, tolerance: tol, csv_rows_checked: csv_rows })
}
