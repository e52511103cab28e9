//! Batch front end: `simulate | pdr | match | eval | run-all`.
//!
//! Exit codes: 0 ok, 1 parse, 2 config, 3 empty pipeline, 4 turn/corner
//! mismatch, 5 I/O. Every command loads and computes everything before it
//! writes its first output file.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imu::{parse_imu_log, write_imu_log, ColumnMap, LogFormat, SampleStream};
use crate::matching::{match_trajectory, MatchParams, MatchedTrajectory, SegmentTransform, TurnParams, TurnPoint};
use crate::metrics::{evaluate, export_cdf, ErrorStats, StatsSummary};
use crate::pdr::{run_pdr, Axis, HeadingSampling, PdrConfig, StepDetectionParams, StepLengthModel};
use crate::route::{load_route, RouteMap};
use crate::sim::{simulate, SimOutput, WalkScenario};
use crate::trajectory::{read_trajectory_csv, write_trajectory_csv, Pose, TrackPoint, Trajectory};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_EMPTY: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;
pub const EXIT_IO: i32 = 5;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::Ordering { .. } | Error::EmptyInput => EXIT_PARSE,
        Error::Parameter(_)
        | Error::Config(_)
        | Error::Validation(_)
        | Error::Scenario(_)
        | Error::Json(_) => EXIT_CONFIG,
        Error::EmptyTrajectory
        | Error::Range { .. }
        | Error::DegenerateGeometry(_)
        | Error::UndefinedRatio => EXIT_EMPTY,
        Error::TurnMismatch { .. } => EXIT_MISMATCH,
        Error::Io(_) => EXIT_IO,
    }
}

#[derive(Debug, Parser)]
#[command(name = "indoor-pdr", version, about = "Smartphone PDR with corner-based map matching")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic walk: imu.csv, truth.csv, scenario.lock.json.
    Simulate(Flags),
    /// Dead-reckon an IMU log: pdr_traj.csv.
    Pdr(Flags),
    /// Dead-reckon and match to the route: matched_traj.csv, match_report.json.
    Match(Flags),
    /// Score trajectories against the route: stats.json, cdf.csv.
    Eval(Flags),
    /// Simulate, dead-reckon, match, and evaluate in one go.
    RunAll(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Run-config JSON (scenario JSON for `simulate`).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Route JSON.
    #[arg(long)]
    pub route: Option<PathBuf>,
    /// IMU log CSV.
    #[arg(long)]
    pub imu: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `fixed:<m>` or `weinberg:<K>`.
    #[arg(long = "step-model")]
    pub step_model: Option<String>,
    /// Turn threshold, degrees.
    #[arg(long = "turn-threshold")]
    pub turn_threshold: Option<f64>,
    /// Radial scaling of matched segments.
    #[arg(long, value_enum)]
    pub scale: Option<OnOff>,
    /// Simulation seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trajectory CSV to match or evaluate instead of running PDR.
    #[arg(long)]
    pub traj: Option<PathBuf>,
    /// Baseline trajectory CSV for `eval`; adds the reduction ratio.
    #[arg(long)]
    pub baseline: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TurnConfig {
    pub threshold_deg: f64,
    pub window: usize,
}

impl Default for TurnConfig {
    fn default() -> Self {
        let d = TurnParams::default();
        Self { threshold_deg: d.threshold.to_degrees(), window: d.window }
    }
}

/// The run-config file. Relative paths resolve against the file's directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub imu: Option<PathBuf>,
    pub route: Option<PathBuf>,
    /// Scenario file for `run-all`.
    pub scenario: Option<PathBuf>,
    pub out: Option<PathBuf>,
    /// Column layout for non-standard IMU logs.
    pub columns: Option<ColumnMap>,
    pub origin: Option<Pose>,
    pub detection: StepDetectionParams,
    pub step_model: StepLengthModel,
    pub yaw_axis: Axis,
    pub heading_sampling: HeadingSampling,
    pub turn: TurnConfig,
    pub scale: bool,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut config.imu, &mut config.route, &mut config.scenario, &mut config.out] {
            if let Some(rel) = p.as_mut() {
                if rel.is_relative() {
                    *rel = base.join(&*rel);
                }
            }
        }
        Ok(config)
    }

    /// Command-line flags take precedence over file values.
    pub fn apply(&mut self, flags: &Flags) -> Result<()> {
        let override_path = |slot: &mut Option<PathBuf>, flag: &Option<PathBuf>| {
            if flag.is_some() {
                slot.clone_from(flag);
            }
        };
        override_path(&mut self.imu, &flags.imu);
        override_path(&mut self.route, &flags.route);
        override_path(&mut self.out, &flags.out);
        if let Some(model) = &flags.step_model {
            self.step_model = model.parse()?;
        }
        if let Some(deg) = flags.turn_threshold {
            self.turn.threshold_deg = deg;
        }
        if let Some(scale) = flags.scale {
            self.scale = scale == OnOff::On;
        }
        if flags.seed.is_some() {
            self.seed = flags.seed;
        }
        Ok(())
    }

    pub fn match_params(&self) -> Result<MatchParams> {
        let threshold = self.turn.threshold_deg.to_radians();
        if !(threshold > 0.0) || self.turn.window == 0 {
            return Err(Error::Config(format!(
                "turn threshold must be positive and window ≥ 1 (got {}°, {})",
                self.turn.threshold_deg, self.turn.window
            )));
        }
        Ok(MatchParams {
            turns: TurnParams { threshold, window: self.turn.window },
            scale: self.scale,
        })
    }

    pub fn pdr_config(&self, origin: Pose) -> PdrConfig {
        PdrConfig {
            origin,
            detection: self.detection,
            step_model: self.step_model,
            yaw_axis: self.yaw_axis,
            heading_sampling: self.heading_sampling,
        }
    }

    fn log_format(&self) -> LogFormat {
        self.columns.clone().map_or(LogFormat::Standard, LogFormat::Mapped)
    }
}

/// `scenario.lock.json`: the resolved scenario and what it produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioLock {
    pub scenario: WalkScenario,
    pub step_count: usize,
    pub duration_s: f64,
    pub turn_schedule: Vec<usize>,
    pub true_origin: Pose,
    pub initial_pose_estimate: Pose,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchReport {
    pub scale: &'static str,
    pub turn_threshold_deg: f64,
    pub turn_window: usize,
    pub turns: Vec<TurnPoint>,
    /// `[turn step, corner index]`.
    pub pairs: Vec<(usize, usize)>,
    pub loop_closure: bool,
    pub segments: Vec<SegmentTransform>,
}

impl MatchReport {
    fn new(m: &MatchedTrajectory, params: &MatchParams) -> Self {
        Self {
            scale: if m.scale { "on" } else { "off" },
            turn_threshold_deg: params.turns.threshold.to_degrees(),
            turn_window: params.turns.window,
            turns: m.turns.clone(),
            pairs: m.assignment.pairs.clone(),
            loop_closure: m.assignment.loop_closure,
            segments: m.segments.clone(),
        }
    }
}

/// Parse arguments, run, print errors to stderr, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Simulate(flags) => cmd_simulate(flags),
        Command::Pdr(flags) => cmd_pdr(flags),
        Command::Match(flags) => cmd_match(flags),
        Command::Eval(flags) => cmd_eval(flags),
        Command::RunAll(flags) => cmd_run_all(flags),
    }
}

fn required<'a>(value: &'a Option<PathBuf>, what: &str) -> Result<&'a PathBuf> {
    value
        .as_ref()
        .ok_or_else(|| Error::Config(format!("missing {what} (flag --{what} or run-config field)")))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))
}

fn run_config(flags: &Flags) -> Result<RunConfig> {
    let mut config = match &flags.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    config.apply(flags)?;
    Ok(config)
}

fn load_scenario(path: &Path, seed: Option<u64>) -> Result<WalkScenario> {
    let mut scenario: WalkScenario = serde_json::from_reader(open(path)?)
        .map_err(|e| Error::Scenario(format!("{}: {e}", path.display())))?;
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    scenario.validate()?;
    Ok(scenario)
}

/// Default origin: the route start facing along the first leg.
fn default_origin(route: Option<&RouteMap>) -> Pose {
    route.map_or(Pose::default(), |r| {
        let (a, b) = (r.corners()[0], r.corners()[1]);
        Pose::new(a.x, a.y, (b - a).angle())
    })
}

/// Accumulates output files and writes them together.
struct Outputs {
    dir: PathBuf,
    files: Vec<(&'static str, Vec<u8>)>,
}

impl Outputs {
    fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), files: Vec::new() }
    }

    fn add(&mut self, name: &'static str, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        write(&mut buf)?;
        self.files.push((name, buf));
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &'static str, value: &T) -> Result<()> {
        self.add(name, |buf| {
            serde_json::to_writer_pretty(&mut *buf, value)?;
            buf.push(b'\n');
            Ok(())
        })
    }

    fn commit(self) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        for (name, bytes) in self.files {
            let mut w = BufWriter::new(File::create(self.dir.join(name))?);
            w.write_all(&bytes)?;
            w.flush()?;
        }
        Ok(())
    }
}

fn add_simulation(out: &mut Outputs, scenario: &WalkScenario, sim: &SimOutput) -> Result<()> {
    out.add("imu.csv", |b| write_imu_log(&sim.stream, b))?;
    out.add("truth.csv", |b| write_trajectory_csv(&sim.truth, b))?;
    out.json(
        "scenario.lock.json",
        &ScenarioLock {
            scenario: scenario.clone(),
            step_count: sim.truth.len() - 1,
            duration_s: sim.duration(),
            turn_schedule: sim.turn_schedule.clone(),
            true_origin: sim.true_origin,
            initial_pose_estimate: sim.initial_pose_estimate,
        },
    )
}

pub fn cmd_simulate(flags: &Flags) -> Result<()> {
    let scenario = load_scenario(required(&flags.config, "config")?, flags.seed)?;
    let out_dir = required(&flags.out, "out")?;
    let sim = simulate(&scenario)?;
    let mut out = Outputs::new(out_dir);
    add_simulation(&mut out, &scenario, &sim)?;
    out.commit()?;
    println!("simulated {} steps, {} samples", sim.truth.len() - 1, sim.stream.len());
    Ok(())
}

struct PdrInputs {
    config: RunConfig,
    route: Option<RouteMap>,
    stream: SampleStream,
}

fn pdr_inputs(flags: &Flags, need_route: bool) -> Result<PdrInputs> {
    let config = run_config(flags)?;
    let route = match (&config.route, need_route) {
        (Some(p), _) => Some(load_route(open(p)?)?),
        (None, true) => {
            required(&None, "route")?;
            None
        }
        (None, false) => None,
    };
    let stream = parse_imu_log(open(required(&config.imu, "imu")?)?, &config.log_format())?;
    Ok(PdrInputs { config, route, stream })
}

fn pdr_trajectory(inputs: &PdrInputs) -> Result<Trajectory> {
    let origin = inputs
        .config
        .origin
        .unwrap_or_else(|| default_origin(inputs.route.as_ref()));
    run_pdr(&inputs.stream, &inputs.config.pdr_config(origin))
}

pub fn cmd_pdr(flags: &Flags) -> Result<()> {
    let inputs = pdr_inputs(flags, false)?;
    let out_dir = required(&inputs.config.out, "out")?.clone();
    let traj = pdr_trajectory(&inputs)?;
    let mut out = Outputs::new(&out_dir);
    out.add("pdr_traj.csv", |b| write_trajectory_csv(&traj.all_points(), b))?;
    out.commit()?;
    println!("steps: {}", traj.len());
    Ok(())
}

pub fn cmd_match(flags: &Flags) -> Result<()> {
    let (config, route, traj) = match &flags.traj {
        Some(path) => {
            let config = run_config(flags)?;
            let route = load_route(open(required(&config.route, "route")?)?)?;
            let traj = Trajectory::from_points(read_trajectory_csv(open(path)?)?)?;
            (config, route, traj)
        }
        None => {
            let inputs = pdr_inputs(flags, true)?;
            let traj = pdr_trajectory(&inputs)?;
            (inputs.config, inputs.route.unwrap(), traj)
        }
    };
    let out_dir = required(&config.out, "out")?.clone();
    let params = config.match_params()?;
    let matched = match_trajectory(&traj, &route, &params)?;
    let mut out = Outputs::new(&out_dir);
    out.add("matched_traj.csv", |b| write_trajectory_csv(&matched.all_points(), b))?;
    out.json("match_report.json", &MatchReport::new(&matched, &params))?;
    out.commit()?;
    println!("matched {} turns", matched.turns.len());
    Ok(())
}

fn add_evaluation(
    out: &mut Outputs,
    traj: &[TrackPoint],
    baseline: Option<&[TrackPoint]>,
    route: &RouteMap,
) -> Result<StatsSummary> {
    let stats = evaluate(traj, route)?;
    let baseline_stats: Option<ErrorStats> = baseline.map(|b| evaluate(b, route)).transpose()?;
    let summary = match &baseline_stats {
        Some(b) => StatsSummary::with_baseline(&stats, b)?,
        None => StatsSummary::new(&stats),
    };
    out.json("stats.json", &summary)?;
    out.add("cdf.csv", |b| export_cdf(&stats, b))?;
    if let Some(b) = &baseline_stats {
        out.add("cdf_baseline.csv", |buf| export_cdf(b, buf))?;
    }
    Ok(summary)
}

fn print_summary(summary: &StatsSummary) {
    print!(
        "mean {:.3} m, std {:.3} m, max {:.3} m",
        summary.mean_m, summary.std_m, summary.max_m
    );
    if let Some(gap) = summary.loop_gap_m {
        print!(", loop gap {gap:.3} m");
    }
    if let Some(r) = summary.reduction_vs {
        print!(", reduction {:.1}%", 100.0 * r);
    }
    println!();
}

pub fn cmd_eval(flags: &Flags) -> Result<()> {
    let config = run_config(flags)?;
    let route = load_route(open(required(&config.route, "route")?)?)?;
    let traj = read_trajectory_csv(open(required(&flags.traj, "traj")?)?)?;
    let baseline = flags
        .baseline
        .as_ref()
        .map(|p| read_trajectory_csv(open(p)?))
        .transpose()?;
    let out_dir = required(&config.out, "out")?.clone();
    let mut out = Outputs::new(&out_dir);
    let summary = add_evaluation(&mut out, &traj, baseline.as_deref(), &route)?;
    out.commit()?;
    print_summary(&summary);
    Ok(())
}

pub fn cmd_run_all(flags: &Flags) -> Result<()> {
    let config = run_config(flags)?;
    let scenario = load_scenario(required(&config.scenario, "scenario")?, config.seed)?;
    let out_dir = required(&config.out, "out")?.clone();
    let params = config.match_params()?;
    let route = scenario.route.clone();

    let sim = simulate(&scenario)?;
    let origin = config.origin.unwrap_or(sim.initial_pose_estimate);
    let traj = run_pdr(&sim.stream, &config.pdr_config(origin))?;
    let matched = match_trajectory(&traj, &route, &params)?;

    let mut out = Outputs::new(&out_dir);
    add_simulation(&mut out, &scenario, &sim)?;
    out.add("pdr_traj.csv", |b| write_trajectory_csv(&traj.all_points(), b))?;
    out.add("matched_traj.csv", |b| write_trajectory_csv(&matched.all_points(), b))?;
    out.json("match_report.json", &MatchReport::new(&matched, &params))?;
    let summary = add_evaluation(&mut out, &matched.all_points(), Some(&traj.all_points()), &route)?;
    out.commit()?;
    println!("steps: {}, turns: {}", traj.len(), matched.turns.len());
    print_summary(&summary);
    Ok(())
}
