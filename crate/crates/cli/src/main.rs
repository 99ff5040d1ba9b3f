use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aircombat::curriculum::CurriculumKind;
use aircombat::engagement::{EngagementConfig, Outcome};
use aircombat::harness::{
    aggregate, evaluate, read_iteration_csv, run_experiment, simulate, write_aggregate_csv, write_trajectory,
    EvaluateOptions, ExperimentConfig, Opponent, ScriptedKind, SimulateOptions, DEFAULT_CONFIG_TOML,
};
use aircombat::nn::PolicyParameters;
use aircombat::ppo::Policy;
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

/// Curriculum self-play training for beyond-visual-range air combat.
#[derive(Parser)]
#[command(name = "aircombat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one policy per (curriculum, seed) and write CSV results.
    Train(TrainArgs),
    /// Tally deterministic engagements of a trained model at one stage.
    Evaluate(EvaluateArgs),
    /// Replay one engagement against a scripted opponent.
    Simulate(SimulateArgs),
    /// Recompute mean/std across seeds from raw result CSVs.
    Aggregate(AggregateArgs),
    /// Print the documented default configuration file.
    Config,
}

#[derive(Args)]
struct TrainArgs {
    /// Configuration file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Curricula to run (repeat or comma-separate).
    #[arg(long, value_delimiter = ',')]
    curriculum: Vec<CurriculumKind>,
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    #[arg(long)]
    iterations: Option<usize>,
    /// Training cycles per iteration.
    #[arg(long)]
    cycles: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Single worker thread; outputs are byte-identical across runs.
    #[arg(long)]
    deterministic: bool,
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value = "none")]
    curriculum: CurriculumKind,
    /// Stage index; defaults to the last (full-task) stage.
    #[arg(long)]
    stage: Option<usize>,
    #[arg(long, default_value_t = 50)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// self-play, straight-line, pure-pursuit or random-maneuver.
    #[arg(long, default_value = "self-play")]
    opponent: Opponent,
    /// Configuration file supplying the engagement parameters.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    model: PathBuf,
    /// Bearing of the opponent from the agent's nose, radians.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    azimuth: f64,
    /// Initial separation, metres.
    #[arg(long, default_value_t = 60_000.0)]
    distance: f64,
    #[arg(long, default_value = "straight-line")]
    opponent: ScriptedKind,
    /// Bearing of the agent from the opponent's nose, radians.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    opponent_azimuth: f64,
    #[arg(long, default_value_t = 6_000.0)]
    altitude: f64,
    #[arg(long, default_value_t = 300.0)]
    speed: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Line-delimited JSON trajectory output.
    #[arg(long, default_value = "trajectory.jsonl")]
    trajectory: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct AggregateArgs {
    /// Raw per-iteration CSV files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value = "aggregate.csv")]
    out: PathBuf,
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    match path {
        Some(p) => Ok(ExperimentConfig::load(p)?),
        None => Ok(ExperimentConfig::default()),
    }
}

fn load_policy(path: &Path) -> Result<Policy> {
    let params = PolicyParameters::load(path).with_context(|| format!("loading model {}", path.display()))?;
    Policy::from_params(params).with_context(|| format!("model {} has unexpected network shapes", path.display()))
}

fn describe(outcome: &Outcome) -> String {
    let who = match outcome.winner() {
        Some(side) => format!("{} wins", side.name()),
        None => "draw".to_string(),
    };
    format!("{who} ({:?})", outcome.termination())
}

fn train_cmd(args: TrainArgs) -> Result<ExitCode> {
    let mut cfg = load_config(args.config.as_deref())?;
    if !args.curriculum.is_empty() {
        cfg.methods = args.curriculum;
    }
    if !args.seeds.is_empty() {
        cfg.seeds = args.seeds;
    }
    if let Some(n) = args.iterations {
        cfg.train.iterations = n;
    }
    if let Some(n) = args.cycles {
        cfg.train.cycles_per_iteration = n;
    }
    if let Some(n) = args.batch_size {
        cfg.train.ppo.batch_size = n;
    }
    if let Some(n) = args.workers {
        cfg.train.workers = n;
    }
    if let Some(out) = args.out {
        cfg.output_dir = out;
    }
    cfg.deterministic |= args.deterministic;

    let quiet = args.quiet;
    let report = run_experiment(&cfg, |r| {
        if !quiet {
            eprintln!(
                "{} seed {} iter {:>3} stage {} | W {:>4} L {:>4} D {:>4}",
                r.method, r.seed, r.iteration, r.stage, r.wins, r.losses, r.draws
            );
        }
    })?;
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    if report.failures.is_empty() {
        return Ok(ExitCode::SUCCESS);
    }
    for f in &report.failures {
        eprintln!("error: {} seed {} failed: {}", f.method.method_label(), f.seed, f.message);
    }
    Ok(ExitCode::FAILURE)
}

fn engagement_config(path: Option<&Path>) -> Result<EngagementConfig<f64>> {
    Ok(load_config(path)?.engagement)
}

fn evaluate_cmd(args: EvaluateArgs) -> Result<ExitCode> {
    let policy = load_policy(&args.model)?;
    let engagement = engagement_config(args.config.as_deref())?;
    let options = EvaluateOptions {
        kind: args.curriculum,
        stage: args.stage.unwrap_or(args.curriculum.last_stage()),
        episodes: args.episodes,
        seed: args.seed,
        opponent: args.opponent,
    };
    let tally = evaluate(&policy, &engagement, &options)?;
    println!("wins,losses,draws");
    println!("{},{},{}", tally.wins, tally.losses, tally.draws);
    Ok(ExitCode::SUCCESS)
}

fn simulate_cmd(args: SimulateArgs) -> Result<ExitCode> {
    let policy = load_policy(&args.model)?;
    let engagement = engagement_config(args.config.as_deref())?;
    let options = SimulateOptions {
        azimuth: args.azimuth,
        distance: args.distance,
        opponent_azimuth: args.opponent_azimuth,
        altitude: args.altitude,
        speed: args.speed,
        opponent: args.opponent,
        seed: args.seed,
    };
    let result = simulate(&policy, &engagement, &options)?;
    write_trajectory(&args.trajectory, &result.trajectory)?;
    println!(
        "{} after {} steps ({:.1} s); trajectory {}",
        describe(&result.outcome),
        result.steps,
        result.steps as f64 * engagement.physics.dt_decision,
        args.trajectory.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn aggregate_cmd(args: AggregateArgs) -> Result<ExitCode> {
    let mut rows = Vec::new();
    for p in &args.inputs {
        rows.extend(read_iteration_csv(p)?);
    }
    if rows.is_empty() {
        bail!("no result rows in the given files");
    }
    let agg = aggregate(&rows);
    write_aggregate_csv(&args.out, &agg)?;
    println!("wrote {} ({} rows)", args.out.display(), agg.len());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => train_cmd(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Aggregate(a) => aggregate_cmd(a),
        Command::Config => {
            print!("{DEFAULT_CONFIG_TOML}");
            Ok(ExitCode::SUCCESS)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
