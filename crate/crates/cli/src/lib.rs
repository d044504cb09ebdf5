//! Command-line front end: run the preset experiments, calibrate the
//! equidispersed alternatives and tabulate pmfs for plotting.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use poissonity::calibrate::{
    calibrate_with, Brackets, CalibrationResult, FloorFamily, MomentConvention,
};
use poissonity::distributions::{pmf, poisson_pmf};
use poissonity::engine::{
    run_experiment_with_workers, ExperimentConfig, ExperimentResult, Half, PowerEntry, TestKind,
};
use poissonity::presets::{preset, preset_title, PRESET_IDS};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "poissonity",
    version,
    about = "Power experiments for Poisson goodness-of-fit tests"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a paired null/alternative power experiment.
    Run(RunArgs),
    /// Solve for equidispersed floor-gamma or floor-Weibull parameters.
    Calibrate(CalibrateArgs),
    /// Tabulate the Poisson and alternative pmfs of a preset.
    PmfCompare(PmfCompareArgs),
    /// List the preset experiments.
    ListPresets(ListArgs),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["preset", "config"]))]
pub struct RunArgs {
    /// Preset experiment, 1-9.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=9))]
    pub preset: Option<u8>,
    /// JSON experiment configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed (default 1, or the config file's value).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of replications.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Sample size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated significance levels.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (default: all cores). Does not change results.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Print the summary as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Gamma,
    Weibull,
}

impl From<FamilyArg> for FloorFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Gamma => FloorFamily::Gamma,
            FamilyArg::Weibull => FloorFamily::Weibull,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConventionArg {
    /// E Z = target + 1/2 and Var Z = target.
    ShiftedContinuous,
    /// Exact moments of the floored count.
    Discretized,
}

impl From<ConventionArg> for MomentConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::ShiftedContinuous => MomentConvention::ShiftedContinuous,
            ConventionArg::Discretized => MomentConvention::Discretized,
        }
    }
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    pub family: FamilyArg,
    /// Common mean and variance.
    #[arg(long, default_value_t = 10.0)]
    pub target: f64,
    /// Tolerance on each moment.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "shifted-continuous")]
    pub convention: ConventionArg,
    /// Print the result as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct PmfCompareArgs {
    /// Preset experiment, 1-9.
    #[arg(long)]
    pub preset: u8,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ListArgs {
    #[arg(long)]
    pub json: bool,
}

/// Failure of a command, carrying its exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Runtime(e) => write!(f, "error: {e:#}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

/// Executes a parsed command and returns what it prints on stdout.
pub fn execute(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Run(args) => run_command(&args).map(|r| r.stdout),
        Command::Calibrate(args) => calibrate_command(&args),
        Command::PmfCompare(args) => {
            pmf_compare_command(&args).map(|path| format!("wrote {}\n", path.display()))
        }
        Command::ListPresets(args) => list_presets(args.json),
    }
}

// ---------------------------------------------------------------- run

/// The run summary written to `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub preset: Option<u8>,
    pub master_seed: u64,
    pub config: ExperimentConfig,
    pub completed_replications: usize,
    pub failed_replications: Vec<usize>,
    pub power: Vec<PowerEntry>,
    pub warnings: Vec<String>,
}

pub struct RunReport {
    pub result: ExperimentResult,
    pub summary: Summary,
    pub out_dir: PathBuf,
    pub stdout: String,
}

pub const EDF_FILES: [(TestKind, &str); 3] = [
    (TestKind::CHat, "edf_chat.csv"),
    (TestKind::GofTheta, "edf_gof_theta.csv"),
    (TestKind::GofMle, "edf_gof_mle.csv"),
];

/// Resolves the configuration: file or preset first, then flag overrides.
pub fn resolve_config(args: &RunArgs) -> Result<(ExperimentConfig, String), CliError> {
    let (mut config, label) = match (args.preset, &args.config) {
        (Some(id), None) => (
            preset(id).map_err(|e| CliError::Usage(e.to_string()))?,
            format!("preset{id}"),
        ),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(|e| CliError::Usage(format!("{e:#}")))?;
            let config: ExperimentConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "config".into());
            (config, stem)
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --preset or --config".into(),
            ))
        }
    };
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(reps) = args.reps {
        config.replications = reps;
    }
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(alpha) = &args.alpha {
        config.alpha_levels = alpha.clone();
    }
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok((config, label))
}

pub fn run_command(args: &RunArgs) -> Result<RunReport, CliError> {
    let (config, label) = resolve_config(args)?;
    if args.workers == Some(0) {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let result = run_experiment_with_workers(&config, args.workers)
        .map_err(|e| CliError::Runtime(e.into()))?;
    let summary = Summary {
        preset: args.preset,
        master_seed: config.master_seed,
        config: config.clone(),
        completed_replications: result.null.c_hat.len(),
        failed_replications: result.failed_replications.clone(),
        power: result.power.clone(),
        warnings: result.warnings.clone(),
    };
    let out_dir = args.out.join(&label);
    write_outputs(&result, &summary, &out_dir)?;
    let stdout = if args.json {
        serde_json::to_string_pretty(&summary).context("serializing summary")? + "\n"
    } else {
        render_summary(&summary, &out_dir)
    };
    Ok(RunReport {
        result,
        summary,
        out_dir,
        stdout,
    })
}

/// Writes the three EDF curves, `power.json` and `summary.json`.
pub fn write_outputs(
    result: &ExperimentResult,
    summary: &Summary,
    dir: &Path,
) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (test, file) in EDF_FILES {
        write_edf(result, test, &dir.join(file))?;
    }
    write_json(&dir.join("power.json"), &summary.power)?;
    write_json(&dir.join("summary.json"), summary)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn csv_writer(path: &Path) -> anyhow::Result<csv::Writer<fs::File>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .with_context(|| format!("creating {}", path.display()))
}

fn write_edf(result: &ExperimentResult, test: TestKind, path: &Path) -> anyhow::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["half", "statistic", "edf"])?;
    for (half, name) in [(Half::Null, "null"), (Half::Alternative, "alternative")] {
        for point in result.edf(test, half)? {
            w.write_record([name, &point.value.to_string(), &point.fraction.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads back a `power.json` file.
pub fn read_power(path: &Path) -> anyhow::Result<Vec<PowerEntry>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}

fn render_summary(summary: &Summary, out_dir: &Path) -> String {
    let c = &summary.config;
    let mut s = String::new();
    if let Some(id) = summary.preset {
        let _ = writeln!(s, "preset {id}: {}", preset_title(id).unwrap_or(""));
    }
    let _ = writeln!(
        s,
        "null Poisson({}) vs {}; n = {}, R = {}, cells {}..{}, seed {}",
        c.lambda, c.alternative, c.n, c.replications, c.k_min, c.k_max, summary.master_seed
    );
    let _ = writeln!(
        s,
        "{:<10} {:>6} {:>12} {:>8}",
        "test", "alpha", "critical", "power"
    );
    for e in &summary.power {
        let _ = writeln!(
            s,
            "{:<10} {:>6} {:>12.5} {:>8.4}",
            e.test.name(),
            e.alpha,
            e.critical_value,
            e.power
        );
    }
    for w in &summary.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    let _ = writeln!(s, "outputs in {}", out_dir.display());
    s
}

// ---------------------------------------------------------- calibrate

pub fn calibrate(args: &CalibrateArgs) -> Result<CalibrationResult, CliError> {
    if !(args.target > 2.0) {
        return Err(CliError::Usage(format!(
            "--target must exceed 2, got {}",
            args.target
        )));
    }
    if !(args.tol >= 1e-10) {
        return Err(CliError::Usage(format!(
            "--tol must be at least 1e-10, got {}",
            args.tol
        )));
    }
    calibrate_with(
        args.family.into(),
        args.target,
        args.tol,
        args.convention.into(),
        Brackets::default(),
    )
    .map_err(|e| CliError::Runtime(e.into()))
}

pub fn calibrate_command(args: &CalibrateArgs) -> Result<String, CliError> {
    let r = calibrate(args)?;
    if args.json {
        return Ok(serde_json::to_string_pretty(&r).context("serializing result")? + "\n");
    }
    let mut s = String::new();
    let _ = writeln!(s, "family     {:?}", r.family);
    let _ = writeln!(s, "convention {:?}", r.convention);
    let _ = writeln!(s, "k          {:.6}", r.k);
    let _ = writeln!(s, "b          {:.6}", r.b);
    let _ = writeln!(s, "mean       {:.12}", r.achieved_mean);
    let _ = writeln!(s, "variance   {:.12}", r.achieved_variance);
    let _ = writeln!(s, "residual   {:e}", r.residual);
    let _ = writeln!(s, "iterations {}", r.iterations);
    let _ = writeln!(
        s,
        "floored count moments: mean {:.6}, variance {:.6}",
        r.discrete_mean, r.discrete_variance
    );
    Ok(s)
}

// -------------------------------------------------------- pmf-compare

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmfRow {
    pub x: u64,
    pub poisson: f64,
    pub alternative: f64,
}

const PMF_TAIL: f64 = 1e-10;
const PMF_MAX_X: u64 = 10_000;

/// Exact pmfs of the preset's null and alternative, from zero until both
/// tails fall below 1e-10.
pub fn pmf_compare_rows(id: u8) -> Result<Vec<PmfRow>, CliError> {
    let config = preset(id).map_err(|e| CliError::Usage(e.to_string()))?;
    let runtime = |e: poissonity::Error| CliError::Runtime(e.into());
    let mut rows = Vec::new();
    let (mut poisson_mass, mut alt_mass) = (0.0, 0.0);
    for x in 0..=PMF_MAX_X {
        let row = PmfRow {
            x,
            poisson: poisson_pmf(config.lambda, x).map_err(runtime)?,
            alternative: pmf(&config.alternative, x).map_err(runtime)?,
        };
        poisson_mass += row.poisson;
        alt_mass += row.alternative;
        rows.push(row);
        if x >= config.k_max && 1.0 - poisson_mass < PMF_TAIL && 1.0 - alt_mass < PMF_TAIL {
            break;
        }
    }
    Ok(rows)
}

pub fn pmf_compare_command(args: &PmfCompareArgs) -> Result<PathBuf, CliError> {
    if !PRESET_IDS.contains(&args.preset) {
        return Err(CliError::Usage(format!(
            "unknown preset {}; expected 1-9",
            args.preset
        )));
    }
    let rows = pmf_compare_rows(args.preset)?;
    let dir = args.out.join(format!("preset{}", args.preset));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join("pmf_compare.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["x", "poisson", "alternative"])
        .context("writing pmf table")?;
    for r in &rows {
        w.write_record([
            r.x.to_string(),
            r.poisson.to_string(),
            r.alternative.to_string(),
        ])
        .context("writing pmf table")?;
    }
    w.flush().context("writing pmf table")?;
    Ok(path)
}

// ------------------------------------------------------- list-presets

pub fn list_presets(json: bool) -> Result<String, CliError> {
    let configs: Vec<(u8, ExperimentConfig)> = PRESET_IDS
        .map(|id| preset(id).map(|c| (id, c)))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Runtime(e.into()))?;
    if json {
        #[derive(Serialize)]
        struct Entry<'a> {
            id: u8,
            title: &'a str,
            config: &'a ExperimentConfig,
        }
        let entries: Vec<Entry> = configs
            .iter()
            .map(|(id, c)| Entry {
                id: *id,
                title: preset_title(*id).unwrap_or(""),
                config: c,
            })
            .collect();
        return Ok(serde_json::to_string_pretty(&entries).context("serializing presets")? + "\n");
    }
    let mut s = String::new();
    for (id, c) in &configs {
        let _ = writeln!(
            s,
            "{id}  lambda={:<4} n={:<3} cells {:>2}..{:<2}  {}",
            c.lambda, c.n, c.k_min, c.k_max, c.alternative
        );
    }
    Ok(s)
}
