//! `telegraph` command-line front end.
//!
//! Exit status: 0 on success, 1 when `validate` ran but a criterion failed,
//! 2 for usage and input errors, 3 when output could not be written.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use telegraph::estimate::{estimate_replicated_at_level, EstimateResult};
use telegraph::law::{velocity_covariance, velocity_transition, LawDecomposition};
use telegraph::process::{simulate_batch, SwitchTrajectory};
use telegraph::validate::{run_experiment, ExperimentConfig};
use telegraph::ModelParams;

const EXIT_VALIDATION_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_OUTPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "telegraph", version, about = "Telegraph process with tanh switching intensity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate independent trajectories on [0, T].
    Simulate(SimulateArgs),
    /// Tabulate the continuous density of X(t) on a uniform grid.
    Density(GridArgs),
    /// Tabulate the distribution function of X(t) on a uniform grid.
    Cdf(GridArgs),
    /// Velocity transition probabilities and covariance.
    Velocity(VelocityArgs),
    /// Estimate theta from switch counts.
    Estimate(EstimateArgs),
    /// Run the verification harness.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Sink {
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Model {
    #[arg(long, allow_negative_numbers = true)]
    theta: f64,
    /// Particle speed.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
}

impl Model {
    fn params(&self) -> anyhow::Result<ModelParams> {
        Ok(ModelParams::new(self.theta, self.c)?)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Trajectories,
    Positions,
    Counts,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: Model,
    /// Horizon.
    #[arg(long = "T")]
    horizon: f64,
    /// Number of trajectories.
    #[arg(long)]
    n: usize,
    #[arg(long, env = "TELEGRAPH_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "positions")]
    emit: Emit,
    #[command(flatten)]
    sink: Sink,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    model: Model,
    #[arg(long)]
    t: f64,
    /// Left end of the grid; defaults to -ct.
    #[arg(long, allow_negative_numbers = true)]
    xmin: Option<f64>,
    /// Right end of the grid; defaults to ct.
    #[arg(long, allow_negative_numbers = true)]
    xmax: Option<f64>,
    #[arg(long, default_value_t = 201)]
    points: usize,
    #[command(flatten)]
    sink: Sink,
}

#[derive(Args)]
struct VelocityArgs {
    #[command(flatten)]
    model: Model,
    /// Largest time of the table.
    #[arg(long)]
    t: f64,
    /// Reference time of the covariance E[V(s) V(t)].
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    /// Rows on the uniform grid [0, t]; a single row at t when 1.
    #[arg(long, default_value_t = 1)]
    points: usize,
    #[command(flatten)]
    sink: Sink,
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["counts_file", "from_simulation"])))]
struct EstimateArgs {
    /// Horizon each count was observed on.
    #[arg(long = "T")]
    horizon: f64,
    /// One nonnegative integer count per line.
    #[arg(long)]
    counts_file: Option<PathBuf>,
    /// Simulate the counts instead of reading them.
    #[arg(long, requires = "theta", requires = "n")]
    from_simulation: bool,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, env = "TELEGRAPH_SEED", default_value_t = 0)]
    seed: u64,
    /// Confidence level of the interval.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[command(flatten)]
    sink: Sink,
}

#[derive(Args)]
#[command(group(ArgGroup::new("cfg").required(true).args(["config", "default"])))]
struct ValidateArgs {
    /// JSON experiment configuration; omitted fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run the default configuration.
    #[arg(long)]
    default: bool,
    /// Also write one CSV row per estimator experiment here.
    #[arg(long)]
    rows: Option<PathBuf>,
    #[command(flatten)]
    sink: Sink,
}

/// Input problems map to the usage status, write failures to their own.
enum Failure {
    Usage(anyhow::Error),
    Output(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn open_sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => {
            let f = File::create(p)
                .with_context(|| format!("cannot create {}", p.display()))
                .map_err(Failure::Output)?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn write_table<R: Serialize>(rows: &[R], format: Format, sink: &Sink) -> Result<(), Failure> {
    let out = open_sink(sink.output.as_deref())?;
    let res = match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            rows.iter()
                .try_for_each(|r| w.serialize(r))
                .map_err(anyhow::Error::from)
                .and_then(|()| w.flush().map_err(anyhow::Error::from))
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)
                .map_err(anyhow::Error::from)
                .and_then(|()| writeln!(out).and_then(|()| out.flush()).map_err(anyhow::Error::from))
        }
    };
    res.map_err(Failure::Output)
}

fn write_text(text: &str, sink: &Sink) -> Result<(), Failure> {
    let mut out = open_sink(sink.output.as_deref())?;
    out.write_all(text.as_bytes()).and_then(|()| out.flush()).context("write failed").map_err(Failure::Output)
}

#[derive(Serialize)]
struct PositionRow {
    index: usize,
    position: f64,
}

#[derive(Serialize)]
struct CountRow {
    index: usize,
    count: usize,
}

#[derive(Serialize)]
struct TrajectoryRow {
    seed: u64,
    index: u64,
    theta: f64,
    c: f64,
    #[serde(rename = "T")]
    horizon: f64,
    sign: i8,
    /// Space-separated switch times.
    events: String,
}

fn simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let params = args.model.params()?;
    if args.n < 1 {
        return Err(anyhow!("--n must be at least 1").into());
    }
    let batch: Vec<SwitchTrajectory> =
        simulate_batch(&params, args.horizon, args.n, args.seed).map_err(anyhow::Error::from)?;
    let format = args.sink.format.unwrap_or(match args.emit {
        Emit::Trajectories => Format::Json,
        _ => Format::Csv,
    });
    match args.emit {
        Emit::Positions => {
            let rows: Vec<_> = batch
                .iter()
                .enumerate()
                .map(|(index, tr)| PositionRow { index, position: tr.final_position() })
                .collect();
            write_table(&rows, format, &args.sink)
        }
        Emit::Counts => {
            let rows: Vec<_> = batch
                .iter()
                .enumerate()
                .map(|(index, tr)| CountRow { index, count: tr.events().len() })
                .collect();
            write_table(&rows, format, &args.sink)
        }
        Emit::Trajectories => {
            let records = batch.iter().enumerate().map(|(i, tr)| tr.to_record(args.seed, i as u64));
            match format {
                // JSON Lines: one record per trajectory
                Format::Json => {
                    let mut text = String::new();
                    for rec in records {
                        text.push_str(&serde_json::to_string(&rec).map_err(anyhow::Error::from)?);
                        text.push('\n');
                    }
                    write_text(&text, &args.sink)
                }
                Format::Csv => {
                    let rows: Vec<_> = records
                        .map(|r| TrajectoryRow {
                            seed: r.seed,
                            index: r.index,
                            theta: r.theta,
                            c: r.c,
                            horizon: r.horizon,
                            sign: r.sign.into(),
                            events: r.events.iter().map(f64::to_string).collect::<Vec<_>>().join(" "),
                        })
                        .collect();
                    write_table(&rows, format, &args.sink)
                }
            }
        }
    }
}

#[derive(Serialize)]
struct ValueRow {
    x: f64,
    value: f64,
}

/// Inclusive uniform grid with exact endpoints.
fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| if i == points - 1 { hi } else { lo + (hi - lo) * i as f64 / (points - 1) as f64 })
        .collect()
}

fn law_table(args: &GridArgs, cumulative: bool) -> Result<(), Failure> {
    let params = args.model.params()?;
    if !(args.t > 0.0 && args.t.is_finite()) {
        return Err(anyhow!("--t must be positive, got {}", args.t).into());
    }
    if args.points < 2 {
        return Err(anyhow!("--points must be at least 2").into());
    }
    let law = LawDecomposition::new(params, args.t).map_err(anyhow::Error::from)?;
    let xmin = args.xmin.unwrap_or(-law.reach());
    let xmax = args.xmax.unwrap_or(law.reach());
    if !(xmin.is_finite() && xmax.is_finite() && xmin < xmax) {
        bail_usage(format!("need finite --xmin < --xmax, got {xmin} and {xmax}"))?;
    }
    let rows = grid(xmin, xmax, args.points)
        .into_iter()
        .map(|x| {
            let value = if cumulative { law.cdf(x)? } else { law.density(x) };
            Ok(ValueRow { x, value })
        })
        .collect::<telegraph::Result<Vec<_>>>()
        .map_err(anyhow::Error::from)?;
    write_table(&rows, args.sink.format.unwrap_or(Format::Csv), &args.sink)
}

fn bail_usage(msg: String) -> Result<(), Failure> {
    Err(Failure::Usage(anyhow!(msg)))
}

#[derive(Serialize)]
struct VelocityRow {
    t: f64,
    p_same: f64,
    p_flip: f64,
    s: f64,
    covariance: f64,
}

fn velocity(args: &VelocityArgs) -> Result<(), Failure> {
    let params = args.model.params()?;
    if !(args.t >= 0.0 && args.t.is_finite()) {
        return Err(anyhow!("--t must be nonnegative, got {}", args.t).into());
    }
    let times = if args.points <= 1 { vec![args.t] } else { grid(0.0, args.t, args.points) };
    let rows = times
        .into_iter()
        .map(|t| {
            let (p_same, p_flip) = velocity_transition(&params, t)?;
            let covariance = velocity_covariance(&params, args.s, t)?;
            Ok(VelocityRow { t, p_same, p_flip, s: args.s, covariance })
        })
        .collect::<telegraph::Result<Vec<_>>>()
        .map_err(anyhow::Error::from)?;
    write_table(&rows, args.sink.format.unwrap_or(Format::Csv), &args.sink)
}

fn read_counts(path: &Path) -> anyhow::Result<Vec<u64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut counts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let k = line.parse::<u64>().map_err(|e| {
            anyhow!("{}:{}: expected a nonnegative integer count, got {line:?} ({e})", path.display(), i + 1)
        })?;
        counts.push(k);
    }
    if counts.is_empty() {
        bail!("{}: no counts", path.display());
    }
    Ok(counts)
}

fn estimate(args: &EstimateArgs) -> Result<(), Failure> {
    let counts = match &args.counts_file {
        Some(path) => read_counts(path)?,
        None => {
            let (theta, n) = (args.theta.unwrap_or_default(), args.n.unwrap_or_default());
            if n < 1 {
                return Err(anyhow!("--n must be at least 1").into());
            }
            let params = ModelParams::new(theta, args.c).map_err(anyhow::Error::from)?;
            simulate_batch(&params, args.horizon, n, args.seed)
                .map_err(anyhow::Error::from)?
                .iter()
                .map(|tr| tr.events().len() as u64)
                .collect()
        }
    };
    let result: EstimateResult =
        estimate_replicated_at_level(&counts, args.horizon, args.level).map_err(anyhow::Error::from)?;
    match args.sink.format.unwrap_or(Format::Json) {
        Format::Json => {
            let text = serde_json::to_string_pretty(&result).map_err(anyhow::Error::from)?;
            write_text(&(text + "\n"), &args.sink)
        }
        Format::Csv => write_table(&[result], Format::Csv, &args.sink),
    }
}

#[derive(Serialize)]
struct CriterionRow<'a> {
    name: &'a str,
    observed: f64,
    lower: Option<f64>,
    upper: Option<f64>,
    passed: bool,
}

fn validate(args: &ValidateArgs) -> Result<bool, Failure> {
    let config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))?;
            ExperimentConfig::from_json(&text).map_err(anyhow::Error::from)?
        }
        None => ExperimentConfig::default(),
    };
    let report = run_experiment(&config).map_err(anyhow::Error::from)?;
    for c in &report.criteria {
        eprintln!("{}", c.summary_line());
    }
    match args.sink.format.unwrap_or(Format::Json) {
        Format::Json => {
            let text = report.to_json().map_err(anyhow::Error::from)?;
            write_text(&(text + "\n"), &args.sink)?;
        }
        Format::Csv => {
            let rows: Vec<_> = report
                .criteria
                .iter()
                .map(|c| CriterionRow {
                    name: &c.name,
                    observed: c.observed,
                    lower: c.lower,
                    upper: c.upper,
                    passed: c.passed,
                })
                .collect();
            write_table(&rows, Format::Csv, &args.sink)?;
        }
    }
    if let Some(path) = &args.rows {
        let f = File::create(path)
            .with_context(|| format!("cannot create {}", path.display()))
            .map_err(Failure::Output)?;
        report.write_rows_csv(BufWriter::new(f)).map_err(|e| Failure::Output(e.into()))?;
    }
    eprintln!(
        "{}: {} of {} criteria passed",
        if report.passed { "PASS" } else { "FAIL" },
        report.criteria.iter().filter(|c| c.passed).count(),
        report.criteria.len()
    );
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Simulate(a) => simulate(a).map(|()| true),
        Command::Density(a) => law_table(a, false).map(|()| true),
        Command::Cdf(a) => law_table(a, true).map(|()| true),
        Command::Velocity(a) => velocity(a).map(|()| true),
        Command::Estimate(a) => estimate(a).map(|()| true),
        Command::Validate(a) => validate(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VALIDATION_FAILED),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Output(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_OUTPUT)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive_and_exact_at_ends() {
        let g = grid(-0.3, 0.7, 11);
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], -0.3);
        assert_eq!(g[10], 0.7);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
