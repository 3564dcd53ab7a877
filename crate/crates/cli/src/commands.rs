//! Subcommands of the `unistab` binary.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use unistab_core::moment::Leaf;
use unistab_core::scenario::{build_y_point, classify_n_semistable, sweep_semistable_set, BuiltinScenario};
use unistab_core::verify::{representative_point, run_suite, Suite};
use unistab_core::{
    CoadjointVector, Error, FlowConfig, ModelPoint, MomentEvaluator, ProjectivePoint, UnipotentScenario,
};

use crate::file::ScenarioFile;
use crate::output::{format_matrix, write_sweep_csv, ResultRecord, SweepBlock};
use crate::parse::{parse_param, parse_point, parse_slots};

/// Sample size when neither points nor a grid are given.
pub const DEFAULT_GRID: usize = 10;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// 2 for bad input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if !e.is_input_error() => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "unistab", version, about = "Semistability under unipotent group actions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify points of X and print JSON records.
    Classify(ClassifyArgs),
    /// Classify a sample of X, optionally over a parameter range, as CSV.
    Sweep(SweepArgs),
    /// Run the seeded property suites.
    Verify(VerifyArgs),
    /// Print the moment map at a point of Y.
    Moment(MomentArgs),
    /// List the built-in scenarios.
    List,
    /// Write a scenario as a TOML file.
    Export(SourceArgs),
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// Built-in scenario, e.g. `sl2_log_c:0.5`.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Scenario file (TOML).
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    /// Point of X as comma-separated complex coordinates; repeatable.
    #[arg(long = "point", allow_hyphen_values = true)]
    pub points: Vec<String>,
    /// Number of sample points when no point is given.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Flow iteration cap.
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Output file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub sample: SampleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub sample: SampleArgs,
    /// `name=a:b:n` or `name=v1,v2,...`.
    #[arg(long)]
    pub param: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Suite name or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct MomentArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Point of X; it is mapped into Y.
    #[arg(long, conflicts_with = "y_point", allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Point of Y, slots separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    pub y_point: Option<String>,
    /// Only the contribution of this factor of Y.
    #[arg(long)]
    pub part: Option<usize>,
}

/// A scenario given by name or by file.
#[derive(Clone, Debug)]
pub enum Source {
    Builtin(BuiltinScenario),
    File(Box<ScenarioFile>),
}

impl Source {
    pub fn load(args: &SourceArgs) -> CliResult<Self> {
        match (&args.builtin, &args.file) {
            (Some(name), _) => Ok(Source::Builtin(name.parse()?)),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
                Ok(Source::File(Box::new(ScenarioFile::parse(&text)?)))
            }
            (None, None) => Err(CliError::Io("one of --builtin or --file is required".into())),
        }
    }

    pub fn scenario(&self) -> CliResult<UnipotentScenario> {
        Ok(match self {
            Source::Builtin(b) => b.materialize()?,
            Source::File(f) => f.to_scenario()?,
        })
    }

    pub fn with_param(&self, name: &str, value: f64) -> CliResult<Source> {
        Ok(match self {
            Source::Builtin(b) => Source::Builtin(b.with_param(name, value)?),
            Source::File(f) => Source::File(Box::new(f.with_param(name, value)?)),
        })
    }

    pub fn flow_config(&self) -> FlowConfig {
        match self {
            Source::Builtin(_) => FlowConfig::default(),
            Source::File(f) => f.flow.config.clone(),
        }
    }

    fn default_grid(&self) -> usize {
        match self {
            Source::File(f) => f.domain.grid.unwrap_or(DEFAULT_GRID),
            Source::Builtin(_) => DEFAULT_GRID,
        }
    }
}

fn flow_config(source: &Source, sample: &SampleArgs) -> CliResult<FlowConfig> {
    let mut cfg = source.flow_config();
    cfg.seed = sample.seed;
    if let Some(n) = sample.max_iters {
        cfg.max_iters = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn explicit_points(sample: &SampleArgs) -> CliResult<Vec<ProjectivePoint>> {
    Ok(sample.points.iter().map(|p| parse_point(p)).collect::<unistab_core::Result<_>>()?)
}

/// Classifies the requested points, in order.
pub fn classify(args: &ClassifyArgs) -> CliResult<Vec<ResultRecord>> {
    let source = Source::load(&args.source)?;
    let cfg = flow_config(&source, &args.sample)?;
    let s = source.scenario()?;
    let mut points = explicit_points(&args.sample)?;
    if points.is_empty() {
        points = s.sample_points(args.sample.grid.unwrap_or_else(|| source.default_grid()), args.sample.seed);
    }
    s.setup()?.slice_report()?;
    let records = points
        .par_iter()
        .map(|x| {
            let start = Instant::now();
            let verdict = classify_n_semistable(&s, x, &cfg)?;
            Ok(ResultRecord::new(s.id(), x, &verdict, start.elapsed().as_secs_f64() * 1e3))
        })
        .collect::<unistab_core::Result<Vec<_>>>()?;
    Ok(records)
}

/// Classifies a sample for each parameter value; rows are parameter-major.
pub fn sweep(args: &SweepArgs) -> CliResult<Vec<SweepBlock>> {
    let source = Source::load(&args.source)?;
    let cfg = flow_config(&source, &args.sample)?;
    let explicit = explicit_points(&args.sample)?;
    let variants: Vec<(Option<f64>, Source)> = match &args.param {
        None => vec![(None, source.clone())],
        Some(p) => {
            let (name, values) = parse_param(p)?;
            values.into_iter().map(|v| Ok((Some(v), source.with_param(&name, v)?))).collect::<CliResult<_>>()?
        }
    };
    variants
        .into_iter()
        .map(|(param, src)| {
            let s = src.scenario()?;
            let points = match (explicit.is_empty(), args.sample.grid, param) {
                (false, _, _) => explicit.clone(),
                (true, Some(n), _) => s.sample_points(n, args.sample.seed),
                (true, None, Some(_)) => vec![representative_point(&s)],
                (true, None, None) => s.sample_points(source.default_grid(), args.sample.seed),
            };
            let rows = sweep_semistable_set(&s, &points, &cfg)?;
            let slice = s.setup()?.slice_report()?.cloned();
            Ok(SweepBlock { param, rows, slice })
        })
        .collect()
}

/// The moment map at the requested point, whole or restricted to one factor.
pub fn moment(args: &MomentArgs) -> CliResult<CoadjointVector> {
    let s = Source::load(&args.source)?.scenario()?;
    let y = match (&args.point, &args.y_point) {
        (Some(x), None) => build_y_point(&s, &parse_point(x)?)?,
        (None, Some(y)) => ModelPoint::new(parse_slots(y)?),
        _ => return Err(CliError::Io("exactly one of --point or --y-point is required".into())),
    };
    let ev = &s.setup()?.evaluator;
    let value = match args.part {
        None => ev.evaluate(&y)?,
        Some(k) => {
            let leaves: &[Leaf] = ev.leaves();
            let leaf = leaves
                .get(k)
                .ok_or_else(|| Error::Domain(format!("part {k} out of range; Y has {} factors", leaves.len())))?;
            let slot = y.slots.get(k).ok_or_else(|| Error::Structural(format!("point has no slot {k}")))?;
            let single = MomentEvaluator::from_leaves(ev.group(), vec![leaf.clone()])?;
            single.evaluate(&ModelPoint::new(vec![slot.clone()]))?
        }
    };
    Ok(value)
}

fn moment_text(s: &UnipotentScenario, value: &CoadjointVector) -> String {
    let mut out = String::new();
    for (i, (block, factor)) in value.blocks().iter().zip(s.group().factors()).enumerate() {
        out.push_str(&format!("block {i} ({factor:?}):\n"));
        for row in format_matrix(block) {
            out.push_str(&format!("  {row}\n"));
        }
    }
    out.push_str(&format!("norm = {}\n", crate::output::format_entry(value.norm().into())));
    out
}

fn emit(path: &Option<PathBuf>, out: &mut dyn Write, bytes: &[u8]) -> CliResult<()> {
    let io = |e: std::io::Error| CliError::Io(format!("writing output: {e}"));
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(io),
        None => out.write_all(bytes).map_err(io),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> CliResult<i32> {
    match cli.command {
        Command::Classify(args) => {
            let records = classify(&args)?;
            let mut json = serde_json::to_string_pretty(&records).map_err(|e| CliError::Io(e.to_string()))?;
            json.push('\n');
            emit(&args.sample.output, out, json.as_bytes())?;
        }
        Command::Sweep(args) => {
            let blocks = sweep(&args)?;
            let mut buf = Vec::new();
            write_sweep_csv(&mut buf, &blocks)?;
            emit(&args.sample.output, out, &buf)?;
        }
        Command::Verify(args) => {
            let suites: Vec<Suite> = match args.suite.as_str() {
                "all" => Suite::all().to_vec(),
                name => vec![name.parse()?],
            };
            let mut all = true;
            let mut text = String::new();
            for suite in suites {
                let report = run_suite(suite, args.seed)?;
                for c in &report.checks {
                    let tag = if c.passed { "PASS" } else { "FAIL" };
                    text.push_str(&format!("{tag} {suite} {}: {:.3e} (bound {})\n", c.label, c.value, c.bound));
                }
                all &= report.passed();
            }
            text.push_str(if all { "all checks passed\n" } else { "some checks failed\n" });
            emit(&None, out, text.as_bytes())?;
            return Ok(if all { 0 } else { 1 });
        }
        Command::Moment(args) => {
            let value = moment(&args)?;
            let s = Source::load(&args.source)?.scenario()?;
            emit(&None, out, moment_text(&s, &value).as_bytes())?;
        }
        Command::List => {
            let text: String = BuiltinScenario::all().iter().map(|b| format!("{b}\n")).collect();
            emit(&None, out, text.as_bytes())?;
        }
        Command::Export(args) => {
            let s = Source::load(&args)?.scenario()?;
            emit(&None, out, ScenarioFile::from_scenario(&s)?.to_toml()?.as_bytes())?;
        }
    }
    Ok(0)
}

/// Runs the binary on `argv`; returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
