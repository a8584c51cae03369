//! Command implementations for the `binforward` binary.
//!
//! Every command writes its outputs and a `manifest.json` into the output
//! directory. The manifest records the fully resolved settings, so replaying
//! it reproduces the outputs byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use binforward::capacity::{
    eval_objective, fm_consistency_check, solve, toy_rates, BoundaryMode, MacPolytope, Objective, PmfParameterization,
    SolverSettings,
};
use binforward::channels::{load_spec, ChannelSpec, ToyChannelParams};
use binforward::rng::{substream, Purpose};
use binforward::simulator::{
    default_split, run_trials, spread_parameterization, RateSplit, SchemeConfig, DEFAULT_BUDGET,
};
use binforward::typicality::Slack;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

pub const BUDGET_ENV: &str = "BINFORWARD_BUDGET";
pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] binforward::Error),
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 3 for resource caps, 2 for bad input, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_budget() => 3,
            CliError::Core(_) | CliError::Read { .. } | CliError::Usage(_) => 2,
            CliError::Write { .. } => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "binforward", version, about = "Capacity solver and bin-forward simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Capacity lower bound of a relay spec.
    Capacity(CapacityArgs),
    /// Rate region boundary of a MAC spec.
    Region(RegionArgs),
    /// Monte Carlo run of the binning scheme.
    Simulate(SimulateArgs),
    /// Check the rate-split systems against the closed-form regions.
    Fmcheck(FmcheckArgs),
    /// Rates of the stuck-at memory example.
    Toy(ToyArgs),
    /// Re-run a recorded manifest.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Capacity(_) => "capacity",
            Command::Region(_) => "region",
            Command::Simulate(_) => "simulate",
            Command::Fmcheck(_) => "fmcheck",
            Command::Toy(_) => "toy",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; all results are independent of this.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SolverArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Simplex grid spacing; defaults depend on the row length.
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Auxiliary alphabet size; defaults to min(cap, 3).
    #[arg(long)]
    pub u_size: Option<usize>,
    #[arg(long, default_value_t = 4)]
    pub restarts: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CapacityArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RegionArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 0.01)]
    pub boundary_step: f64,
    #[arg(long, default_value_t = 0.05)]
    pub weight_step: f64,
    /// Maximize R2 at every boundary point instead of sweeping weights.
    #[arg(long)]
    pub dense: bool,
    /// Causal cribbing only: restrict p(x2|u,s2,z1) to ignore z1.
    #[arg(long)]
    pub tie_x2_across_z1: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlackArg {
    Absolute,
    Relative,
}

impl From<SlackArg> for Slack {
    fn from(s: SlackArg) -> Slack {
        match s {
            SlackArg::Absolute => Slack::Absolute,
            SlackArg::Relative => Slack::Relative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 12)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub blocks: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.2)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = SlackArg::Absolute)]
    pub slack: SlackArg,
    /// Operating point as a fraction of the solver optimum.
    #[arg(long, default_value_t = 0.7)]
    pub fraction: f64,
    /// Explicit splits "crib,direct,bin", one per encoder, separated by ';'.
    #[arg(long)]
    pub rates: Option<String>,
    /// Codeword-symbol cap; defaults to $BINFORWARD_BUDGET or 2^22.
    #[arg(long)]
    pub budget: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FmcheckArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ToyArgs {
    #[arg(long, num_args = 1.., default_values_t = [0.1, 0.2, 0.4])]
    pub p: Vec<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output directory; defaults to the manifest's directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub spec_path: Option<String>,
    pub seeds: BTreeMap<String, u64>,
    /// The resolved command, replayable as is.
    pub settings: Command,
    /// Output files, relative to the manifest's directory.
    pub outputs: Vec<String>,
}

/// Files produced by a command, plus its console text.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOutput {
    pub stdout: String,
    pub files: Vec<(String, String)>,
}

fn r6(x: f64) -> f64 {
    let v = (x * 1e6).round() / 1e6;
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

fn pretty(v: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v).map_err(binforward::Error::from)? + "\n")
}

fn read_spec(path: &Path) -> Result<ChannelSpec> {
    let text =
        std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })?;
    Ok(load_spec(&text)?)
}

fn kind_error(expected: &str, spec: &ChannelSpec) -> CliError {
    CliError::Core(binforward::Error::KindMismatch { expected: expected.into(), found: spec.kind.to_string() })
}

fn solver_settings(a: &SolverArgs, seed: u64) -> SolverSettings {
    SolverSettings { grid_step: a.grid_step, u_size: a.u_size, restarts: a.restarts, seed, ..Default::default() }
}

fn join6(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" ")
}

fn cmd_capacity(a: &CapacityArgs) -> Result<RunOutput> {
    let spec = read_spec(&a.solver.spec)?;
    if !spec.kind.is_relay() {
        return Err(kind_error("a relay kind", &spec));
    }
    let sol = solve(&spec, &solver_settings(&a.solver, a.common.seed))?;
    let c = sol.capacity().expect("relay kind");
    let mut out = RunOutput::default();
    writeln!(out.stdout, "kind: {}", spec.kind).unwrap();
    writeln!(out.stdout, "capacity: {c:.6} bits/use").unwrap();
    writeln!(out.stdout, "grid steps: {}", join6(&sol.info.grid_steps)).unwrap();
    writeln!(out.stdout, "search: {}", if sol.info.exhaustive_grid { "exhaustive" } else { "coordinate ascent" })
        .unwrap();
    writeln!(out.stdout, "note: a grid search certifies a lower bound on the maximum").unwrap();
    let summary = json!({
        "kind": spec.kind,
        "capacity_lower_bound": r6(c),
        "grid_steps": sol.info.grid_steps.iter().map(|&s| r6(s)).collect::<Vec<_>>(),
        "exhaustive_grid": sol.info.exhaustive_grid,
        "u_size": sol.info.u_size,
        "u_cap": sol.info.u_cap,
        "maps_searched": sol.info.maps_searched,
    });
    out.files.push(("capacity.json".into(), pretty(&summary)?));
    out.files.push(("argmax.json".into(), pretty(&sol.argmax)?));
    Ok(out)
}

fn cmd_region(a: &RegionArgs) -> Result<RunOutput> {
    let spec = read_spec(&a.solver.spec)?;
    if !spec.kind.is_mac() {
        return Err(kind_error("a MAC kind", &spec));
    }
    let settings = SolverSettings {
        boundary_step: a.boundary_step,
        weight_step: a.weight_step,
        boundary_mode: if a.dense { BoundaryMode::Dense } else { BoundaryMode::WeightedSum },
        tie_x2_across_z1: a.tie_x2_across_z1,
        ..solver_settings(&a.solver, a.common.seed)
    };
    let sol = solve(&spec, &settings)?;
    let region = sol.region().expect("mac kind");
    let mut csv = String::from("r1,r2,active_constraint\n");
    for p in &region.boundary {
        writeln!(csv, "{:.6},{:.6},{}", p.r1, p.r2, p.active.name()).unwrap();
    }
    let mut out = RunOutput::default();
    writeln!(out.stdout, "kind: {}", spec.kind).unwrap();
    writeln!(out.stdout, "boundary points: {}", region.boundary.len()).unwrap();
    writeln!(out.stdout, "max sum rate: {:.6} bits/use", region.max_sum_rate()).unwrap();
    writeln!(out.stdout, "max r1: {:.6}", region.r1_extent()).unwrap();
    writeln!(out.stdout, "note: a grid search certifies an inner approximation of the region").unwrap();
    let summary = json!({
        "kind": spec.kind,
        "max_sum_rate": r6(region.max_sum_rate()),
        "r1_extent": r6(region.r1_extent()),
        "generators": region.generators.len(),
        "boundary_points": region.boundary.len(),
        "grid_steps": sol.info.grid_steps.iter().map(|&s| r6(s)).collect::<Vec<_>>(),
        "u_size": sol.info.u_size,
        "u_cap": sol.info.u_cap,
    });
    out.files.push(("boundary.csv".into(), csv));
    out.files.push(("region.json".into(), pretty(&summary)?));
    out.files.push(("argmax.json".into(), pretty(&sol.argmax)?));
    Ok(out)
}

/// Sum-rate corner of a polytope closest to equal rates.
fn mac_corner(p: &MacPolytope) -> [f64; 2] {
    let (a, b, s) = (p.r1_max.max(0.0), p.r2_max.max(0.0), p.sum_max().max(0.0));
    let r1 = if s >= a + b { a } else { (s / 2.0).max(s - b).min(a) };
    [r1, (s - r1).min(b).max(0.0)]
}

pub fn parse_rates(text: &str) -> Result<Vec<RateSplit>> {
    text.split(';')
        .map(|part| {
            let v: Vec<f64> = part
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| CliError::Usage(format!("bad rate list {part:?}: {e}")))?;
            match v[..] {
                [crib, direct, bin] => Ok(RateSplit { crib, direct, bin }),
                _ => Err(CliError::Usage(format!("expected crib,direct,bin in {part:?}"))),
            }
        })
        .collect()
}

fn cmd_simulate(a: &SimulateArgs) -> Result<RunOutput> {
    let spec = read_spec(&a.solver.spec)?;
    let sol = solve(&spec, &solver_settings(&a.solver, a.common.seed))?;
    let param: PmfParameterization = spread_parameterization(&spec, &sol.argmax, 1e-9)?;
    let (optimum, targets) = match eval_objective(&spec, &param)? {
        Objective::Rate(v) => (vec![v], vec![a.fraction * v]),
        Objective::Region(p) => {
            let c = mac_corner(&p);
            (c.to_vec(), c.iter().map(|r| a.fraction * r).collect())
        }
    };
    let rates = match &a.rates {
        Some(t) => parse_rates(t)?,
        None => default_split(&spec, &param, &targets)?,
    };
    let budget = a.budget.unwrap_or(DEFAULT_BUDGET);
    let cfg = SchemeConfig {
        n: a.n,
        blocks: a.blocks,
        rates: rates.clone(),
        epsilon: a.epsilon,
        slack: a.slack.into(),
        trials: a.trials,
        master_seed: a.common.seed,
        budget,
        corrupt_block: None,
        keep_transcripts: false,
    };
    let r = run_trials(&spec, &param, &cfg)?;
    let mut csv = String::from("trial,block,event_a,event_b,event_c,decoded_ok\n");
    for row in &r.rows {
        let b = |v: bool| u8::from(v);
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            row.trial,
            row.block,
            b(row.event_a),
            b(row.event_b),
            b(row.event_c),
            b(row.decoded_ok)
        )
        .unwrap();
    }
    let c = &r.collisions;
    let split_json = |s: &RateSplit| json!({"crib": r6(s.crib), "direct": r6(s.direct), "bin": r6(s.bin)});
    let summary = json!({
        "kind": spec.kind,
        "n": a.n,
        "blocks": a.blocks,
        "trials": a.trials,
        "message_blocks": r.message_blocks,
        "epsilon": r6(a.epsilon),
        "slack": a.slack,
        "master_seed": a.common.seed,
        "budget": budget,
        "fraction": r6(a.fraction),
        "optimum": optimum.iter().map(|&v| r6(v)).collect::<Vec<_>>(),
        "rates": rates.iter().map(split_json).collect::<Vec<_>>(),
        "realized_rates": r.realized.iter().map(|s| json!({"crib": r6(s.crib), "direct": r6(s.direct), "bin": r6(s.bin)})).collect::<Vec<_>>(),
        "codeword_counts": r.counts,
        "block_error_rate": r6(r.block_error_rate),
        "event_rates": {"a": r6(r.event_rates[0]), "b": r6(r.event_rates[1]), "c": r6(r.event_rates[2])},
        "propagated_rate": r6(r.propagated_rate),
        "collisions": {
            "searches": c.instances,
            "frequency": r6(c.frequency()),
            "union_bound": r6(c.predicted()),
            "sigma": r6(c.sigma()),
            "duplicate_codewords": c.duplicate_words,
        },
    });
    let mut out = RunOutput::default();
    writeln!(out.stdout, "kind: {}", spec.kind).unwrap();
    writeln!(out.stdout, "optimum: {}", join6(&optimum)).unwrap();
    for (j, s) in rates.iter().enumerate() {
        writeln!(out.stdout, "encoder {}: crib {:.6} direct {:.6} bin {:.6}", j + 1, s.crib, s.direct, s.bin).unwrap();
    }
    writeln!(out.stdout, "block error rate: {:.6} over {} blocks", r.block_error_rate, r.trials * r.message_blocks)
        .unwrap();
    writeln!(out.stdout, "event rates (a) (b) (c): {}", join6(&r.event_rates)).unwrap();
    writeln!(
        out.stdout,
        "bin collisions: {:.6} vs union bound {:.6} (sigma {:.6})",
        c.frequency(),
        c.predicted(),
        c.sigma()
    )
    .unwrap();
    out.files.push(("trials.csv".into(), csv));
    out.files.push(("summary.json".into(), pretty(&summary)?));
    Ok(out)
}

fn cmd_fmcheck(a: &FmcheckArgs) -> Result<RunOutput> {
    if a.samples == 0 {
        return Err(CliError::Usage("samples must be at least 1".into()));
    }
    if !(a.step > 0.0) {
        return Err(CliError::Usage("step must be positive".into()));
    }
    let spec = read_spec(&a.spec)?;
    let mut csv = String::from("sample,consistent,points_checked,boundary_disagreements,counter_r1,counter_r2\n");
    let mut out = RunOutput::default();
    let mut passed = 0;
    for k in 0..a.samples {
        let mut rng = substream(a.common.seed, Purpose::Sampling, &[k]);
        let param = PmfParameterization::random(&spec, None, &mut rng)?;
        let rep = fm_consistency_check(&spec, &param, a.step)?;
        passed += usize::from(rep.consistent);
        let (c1, c2) = match rep.counterexample {
            Some(p) => (format!("{:.6}", p.r1), p.r2.map(|v| format!("{v:.6}")).unwrap_or_default()),
            None => (String::new(), String::new()),
        };
        writeln!(
            csv,
            "{k},{},{},{},{c1},{c2}",
            u8::from(rep.consistent),
            rep.points_checked,
            rep.boundary_disagreements
        )
        .unwrap();
        let verdict = if rep.consistent { "pass".to_string() } else { format!("FAIL at ({c1}, {c2})") };
        writeln!(out.stdout, "sample {k}: {verdict}").unwrap();
    }
    writeln!(out.stdout, "consistent: {passed}/{}", a.samples).unwrap();
    out.files.push(("fmcheck.csv".into(), csv));
    Ok(out)
}

fn cmd_toy(a: &ToyArgs) -> Result<RunOutput> {
    let mut csv = String::from("p,bin_forward,decode_forward,gap\n");
    let mut out = RunOutput::default();
    for &p in &a.p {
        let (bf, df) = toy_rates(ToyChannelParams::new(p)?);
        writeln!(csv, "{p:.6},{bf:.6},{df:.6},{:.6}", bf - df).unwrap();
        writeln!(out.stdout, "p={p:.6}: bin-forward {bf:.6}, decode-forward {df:.6}, gap {:.6}", bf - df).unwrap();
    }
    out.files.push(("toy.csv".into(), csv));
    Ok(out)
}

/// Runs a resolved command without touching the filesystem beyond reading
/// its spec.
pub fn execute(cmd: &Command) -> Result<RunOutput> {
    match cmd {
        Command::Capacity(a) => cmd_capacity(a),
        Command::Region(a) => cmd_region(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Fmcheck(a) => cmd_fmcheck(a),
        Command::Toy(a) => cmd_toy(a),
        Command::Replay(_) => Err(CliError::Usage("replay cannot be executed directly".into())),
    }
}

fn absolute(path: &Path) -> Result<PathBuf> {
    std::fs::canonicalize(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })
}

/// Fills in everything a replay needs: absolute spec path and the budget.
pub fn resolve(mut cmd: Command) -> Result<Command> {
    match &mut cmd {
        Command::Capacity(a) => a.solver.spec = absolute(&a.solver.spec)?,
        Command::Region(a) => a.solver.spec = absolute(&a.solver.spec)?,
        Command::Fmcheck(a) => a.spec = absolute(&a.spec)?,
        Command::Simulate(a) => {
            a.solver.spec = absolute(&a.solver.spec)?;
            if a.budget.is_none() {
                a.budget = Some(match std::env::var(BUDGET_ENV) {
                    Ok(v) => {
                        v.trim().parse().map_err(|_| CliError::Usage(format!("{BUDGET_ENV}={v} is not an integer")))?
                    }
                    Err(_) => DEFAULT_BUDGET,
                });
            }
        }
        Command::Toy(_) | Command::Replay(_) => {}
    }
    Ok(cmd)
}

fn common(cmd: &Command) -> Option<&Common> {
    match cmd {
        Command::Capacity(a) => Some(&a.common),
        Command::Region(a) => Some(&a.common),
        Command::Simulate(a) => Some(&a.common),
        Command::Fmcheck(a) => Some(&a.common),
        Command::Toy(a) => Some(&a.common),
        Command::Replay(_) => None,
    }
}

fn set_out(cmd: &mut Command, out: PathBuf) {
    match cmd {
        Command::Capacity(a) => a.common.out = out,
        Command::Region(a) => a.common.out = out,
        Command::Simulate(a) => a.common.out = out,
        Command::Fmcheck(a) => a.common.out = out,
        Command::Toy(a) => a.common.out = out,
        Command::Replay(_) => {}
    }
}

fn spec_path(cmd: &Command) -> Option<String> {
    match cmd {
        Command::Capacity(a) => Some(&a.solver.spec),
        Command::Region(a) => Some(&a.solver.spec),
        Command::Simulate(a) => Some(&a.solver.spec),
        Command::Fmcheck(a) => Some(&a.spec),
        Command::Toy(_) | Command::Replay(_) => None,
    }
    .map(|p| p.display().to_string())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Write { path: path.display().to_string(), source })
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let text =
        std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid manifest {}: {e}", path.display())))
}

/// Resolves, executes and records a command. Returns the console text.
pub fn run(cmd: Command) -> Result<String> {
    let mut cmd = match cmd {
        Command::Replay(r) => {
            let m = read_manifest(&r.manifest)?;
            let dir = r.manifest.parent().map(Path::to_path_buf).unwrap_or_default();
            let mut settings = m.settings;
            set_out(&mut settings, r.out.unwrap_or(dir));
            return run_resolved(settings);
        }
        other => other,
    };
    let out = common(&cmd).expect("not a replay").out.clone();
    cmd = resolve(cmd)?;
    set_out(&mut cmd, out);
    run_resolved(cmd)
}

fn run_resolved(cmd: Command) -> Result<String> {
    let c = common(&cmd).ok_or_else(|| CliError::Usage("nested replay".into()))?.clone();
    let output = match c.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?
            .install(|| execute(&cmd))?,
        None => execute(&cmd)?,
    };
    std::fs::create_dir_all(&c.out).map_err(|source| CliError::Write { path: c.out.display().to_string(), source })?;
    for (name, contents) in &output.files {
        write_file(&c.out.join(name), contents)?;
    }
    let manifest = RunManifest {
        tool: "binforward".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: cmd.name().into(),
        spec_path: spec_path(&cmd),
        seeds: BTreeMap::from([("master".to_string(), c.seed)]),
        settings: cmd.clone(),
        outputs: output.files.iter().map(|(n, _)| n.clone()).collect(),
    };
    write_file(&c.out.join(MANIFEST_NAME), &pretty(&manifest)?)?;
    Ok(output.stdout)
}

/// Parses a JSON settings value back into a command, for tools that build
/// manifests by hand.
pub fn command_from_value(v: Value) -> Result<Command> {
    serde_json::from_value(v).map_err(|e| CliError::Usage(format!("invalid command: {e}")))
}
