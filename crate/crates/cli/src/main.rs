use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use peerassign::competence::cluster_levels;
use peerassign::evaluation::{run_study, simulate_scores, BaselineParams, StudyParams};
use peerassign::io;
use peerassign::preference::{accumulate_responses, derive_stages, MergeStage, PreferenceStages};
use peerassign::solver::{
    brute_force_oracle, expand_distance, min_cycle_in_range, solve_min_cycle_atsp, total_distance, SolveParams,
    DEFAULT_NODE_LIMIT,
};
use peerassign::{Error, ErrorCategory, Execution};

mod config;

use config::PipelineConfig;

#[derive(Parser)]
#[command(name = "peerassign", version, about = "Reviewer assignment for peer code review")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank students into high/middle/low from a scores CSV.
    Rank {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a rule matrix from questionnaire responses or aggregated preferences.
    Prefs {
        #[command(flatten)]
        source: PreferenceSource,
        #[arg(long, value_enum, default_value_t = Mode::Merged)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Stage::Raw)]
        stage: Stage,
        /// Round values to this many decimals (default: full precision).
        #[arg(long)]
        round: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank, expand a rule matrix and solve the assignment.
    Assign {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        rule: PathBuf,
        #[arg(long, default_value_t = 3)]
        min_cycle: usize,
        /// Also draw a random assignment with this seed and report its total.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        node_limit: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the expanded distance instance as JSON.
        #[arg(long)]
        dump_instance: Option<PathBuf>,
    },
    /// Compare optimized and random assignments task by task.
    Evaluate(EvaluateArgs),
    /// Generate a synthetic scores CSV.
    Simulate {
        #[arg(long, default_value_t = 23)]
        students: usize,
        #[arg(long, default_value_t = 12)]
        tasks: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive optimum for a small instance (n <= 9).
    #[command(hide = true)]
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        min_cycle: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct PreferenceSource {
    /// `student_id,question,ranking` CSV.
    #[arg(long)]
    responses: Option<PathBuf>,
    /// JSON with aggregated `reviewer_view` and `author_view` matrices.
    #[arg(long)]
    preferences: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scores: Option<PathBuf>,
    #[arg(long, conflicts_with = "preferences")]
    responses: Option<PathBuf>,
    #[arg(long)]
    preferences: Option<PathBuf>,
    #[arg(long)]
    min_cycle: Option<usize>,
    #[arg(long, value_enum)]
    stage: Option<Stage>,
    #[arg(long)]
    seed: Option<u64>,
    /// Random draws per task; the random total is their mean.
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated task numbers (default: every task in the scores file).
    #[arg(long, value_delimiter = ',')]
    tasks: Option<Vec<u32>>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Decimals in the CSV and markdown reports.
    #[arg(long)]
    round: Option<usize>,
    /// Evaluate tasks one after another instead of in parallel.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Reviewer,
    Author,
    Merged,
}

#[derive(Clone, Copy, ValueEnum)]
enum Stage {
    Raw,
    Normalized,
}

impl From<Stage> for MergeStage {
    fn from(s: Stage) -> Self {
        match s {
            Stage::Raw => MergeStage::Raw,
            Stage::Normalized => MergeStage::Normalized,
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => io::write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn preference_stages(responses: Option<&Path>, preferences: Option<&Path>, stage: MergeStage) -> Result<PreferenceStages, Error> {
    let (reviewer, author) = match (responses, preferences) {
        (Some(path), _) => {
            let acc = accumulate_responses(&io::read_responses(path)?);
            if acc.skipped > 0 {
                eprintln!("skipped {} malformed response(s)", acc.skipped);
            }
            (acc.reviewer, acc.author)
        }
        (None, Some(path)) => io::read_preferences(path)?.matrices(),
        (None, None) => {
            return Err(Error::Json { path: "<none>".into(), message: "either responses or preferences is required".into() })
        }
    };
    derive_stages(&reviewer, &author, stage)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Rank { scores, out } => {
            let records = io::read_scores(&scores)?;
            let levels = cluster_levels(&records);
            emit(out.as_deref(), &io::levels_csv(&records, &levels))
        }
        Command::Prefs { source, mode, stage, round, out } => {
            let stages = preference_stages(source.responses.as_deref(), source.preferences.as_deref(), stage.into())?;
            let rule = match mode {
                Mode::Reviewer => stages.rules.reviewer,
                Mode::Author => stages.rules.author,
                Mode::Merged => stages.rules.merged,
            };
            emit(out.as_deref(), &io::rule_matrix_json(&rule, round))
        }
        Command::Assign { scores, rule, min_cycle, seed, node_limit, out, dump_instance } => {
            let records = io::read_scores(&scores)?;
            let rule = io::read_rule_matrix(&rule)?;
            let n = records.len();
            if !min_cycle_in_range(n, min_cycle) {
                return Err(Error::InvalidMinCycle { n, min_cycle });
            }
            let levels = cluster_levels(&records);
            let inst = expand_distance(&rule, &levels)?;
            if let Some(path) = dump_instance {
                io::write_file(&path, &io::instance_json(&inst))?;
            }
            let a = solve_min_cycle_atsp(&inst, SolveParams::new(min_cycle).with_node_limit(node_limit))?;
            eprintln!("optimized total {:.2}, cycle lengths {:?}", a.total, a.cycle_lengths());
            if let Some(seed) = seed {
                let baseline = peerassign::random_baseline(n, &BaselineParams { min_cycle, seed, ..Default::default() })?;
                let t_r = total_distance(&inst, &baseline)?;
                eprintln!("random total {:.2} (seed {seed}), C = {:.2}", t_r, t_r / a.total);
            }
            emit(out.as_deref(), &io::assignment_csv_for(&inst, &a))
        }
        Command::Evaluate(args) => evaluate(args),
        Command::Simulate { students, tasks, seed, out } => emit(out.as_deref(), &io::scores_csv(&simulate_scores(students, tasks, seed))),
        Command::Oracle { instance, min_cycle, out } => {
            let inst = io::read_instance(&instance)?;
            let a = brute_force_oracle(&inst, min_cycle)?;
            eprintln!("oracle total {}", a.total);
            emit(out.as_deref(), &io::assignment_csv_for(&inst, &a))
        }
    }
}

fn evaluate(args: EvaluateArgs) -> Result<(), Error> {
    let cfg = match &args.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    let missing = |what: &str| Error::Json { path: "<arguments>".into(), message: format!("--{what} is required") };
    let scores = args.scores.or(cfg.scores.clone()).ok_or_else(|| missing("scores"))?;
    let (responses, preferences) = match (args.responses, args.preferences) {
        (None, None) => (cfg.responses.clone(), cfg.preferences.clone()),
        flags => flags,
    };
    let cfg_stage = cfg.stage().map_err(|m| Error::Json { path: "config".into(), message: m })?;
    let stage = args.stage.map(MergeStage::from).or(cfg_stage).unwrap_or_default();
    let min_cycle = args.min_cycle.or(cfg.min_cycle).unwrap_or(3);
    let seed = args.seed.or(cfg.seed).unwrap_or(0);
    let trials = args.trials.or(cfg.trials).unwrap_or(1);
    let round = args.round.or(cfg.round).unwrap_or(2);
    let out_dir = args.out_dir.or(cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("."));

    let records = io::read_scores(&scores)?;
    let rules = preference_stages(responses.as_deref(), preferences.as_deref(), stage)?.rules;
    let tasks = match args.tasks.or(cfg.tasks.clone()) {
        Some(t) => t,
        None => {
            let mut t: Vec<u32> = records.iter().flat_map(|r| r.scores.iter().map(|(t, _)| *t)).collect();
            t.sort_unstable();
            t.dedup();
            t
        }
    };
    let exec = if args.sequential { Execution::Sequential } else { Execution::default() };
    let params = StudyParams::new(seed).with_min_cycle(min_cycle).with_trials(trials).with_execution(exec);
    let report = run_study(&records, &rules, &tasks, &params)?;

    std::fs::create_dir_all(&out_dir).map_err(|source| Error::Io { path: out_dir.display().to_string(), source })?;
    io::write_file(&out_dir.join("report.csv"), &io::report_csv(&report, round))?;
    io::write_file(&out_dir.join("report.md"), &io::report_markdown(&report, round))?;
    io::write_file(&out_dir.join("report.json"), &io::report_json(&report))?;
    print!("{}", io::report_markdown(&report, round));
    Ok(())
}

fn exit_code(category: ErrorCategory) -> u8 {
    match category {
        ErrorCategory::Parse => 2,
        ErrorCategory::Infeasible => 3,
        ErrorCategory::Limit => 4,
        ErrorCategory::Io => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(exit_code(e.category()))
        }
    }
}
