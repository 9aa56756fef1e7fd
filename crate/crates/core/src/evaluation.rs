//! Optimized versus constrained-random assignment.
//!
//! For every task the cohort is re-ranked, each rule matrix is expanded into a
//! distance instance and solved, and one (or more) random assignments with the
//! same minimum cycle length are drawn. The relative ratio `C = T_r / T_o`
//! compares the random total to the optimized total; `C ≥ 1` always holds
//! because both sides range over the same feasible set.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::competence::{cluster_levels, StudentRecord};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::preference::{RuleMatrices, RuleProvenance};
use crate::solver::{
    expand_distance, min_cycle_feasible, min_cycle_in_range, min_cycle_len, solve_min_cycle_atsp,
    total_distance, Assignment, DistanceInstance, SolveParams, DEFAULT_NODE_LIMIT,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Reviewer,
    Author,
    Merged,
}

impl RuleKind {
    /// Report column order: D1, D2, D3.
    pub const ALL: [RuleKind; 3] = [RuleKind::Reviewer, RuleKind::Author, RuleKind::Merged];

    pub fn provenance(self) -> RuleProvenance {
        match self {
            RuleKind::Reviewer => RuleProvenance::Reviewer,
            RuleKind::Author => RuleProvenance::Author,
            RuleKind::Merged => RuleProvenance::Merged,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineParams {
    pub min_cycle: usize,
    pub seed: u64,
    pub max_attempts: u64,
}

impl Default for BaselineParams {
    fn default() -> Self {
        BaselineParams { min_cycle: 3, seed: 0, max_attempts: 1_000_000 }
    }
}

/// Uniform random permutation of `0..n` whose cycles all have length at
/// least `min_cycle`, by rejection sampling of uniform permutations.
pub fn random_baseline(n: usize, params: &BaselineParams) -> Result<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    sample_constrained(n, params.min_cycle, params.max_attempts, &mut rng)
}

pub fn sample_constrained<R: Rng + ?Sized>(n: usize, min_cycle: usize, max_attempts: u64, rng: &mut R) -> Result<Vec<usize>> {
    if !min_cycle_feasible(n, min_cycle) {
        return Err(Error::InvalidMinCycle { n, min_cycle });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..max_attempts {
        perm.shuffle(rng);
        if min_cycle_len(&perm) >= min_cycle {
            return Ok(perm);
        }
    }
    Err(Error::SamplingExhausted { attempts: max_attempts, rate_bound: 1.0 / max_attempts.max(1) as f64 })
}

/// Per-task RNG: the master seed with the task number as stream id.
pub fn task_rng(seed: u64, task_no: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task_no as u64);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleOutcome {
    /// Optimized total.
    pub t_o: f64,
    /// Random-baseline total (mean over draws).
    pub t_r: f64,
    /// `t_r / t_o`.
    pub c: f64,
}

impl RuleOutcome {
    pub fn new(t_o: f64, t_r: f64) -> Self {
        RuleOutcome { t_o, t_r, c: t_r / t_o }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub task_no: u32,
    /// Indexed like [`RuleKind::ALL`].
    pub outcomes: [RuleOutcome; 3],
}

/// Scores one task: each rule's optimized permutation and every baseline draw
/// against that rule's instance.
pub fn compare(instances: &[DistanceInstance; 3], optimized: &[Vec<usize>; 3], baselines: &[Vec<usize>]) -> Result<[RuleOutcome; 3]> {
    let n = instances[0].n();
    if instances.iter().any(|i| i.n() != n) {
        return Err(Error::SizeMismatch("distance instances differ in size".into()));
    }
    if baselines.is_empty() {
        return Err(Error::SizeMismatch("no baseline draws".into()));
    }
    let mut out = [RuleOutcome::new(1.0, 1.0); 3];
    for (k, inst) in instances.iter().enumerate() {
        let t_o = total_distance(inst, &optimized[k])?;
        let mut t_r = 0.0;
        for b in baselines {
            t_r += total_distance(inst, b)?;
        }
        out[k] = RuleOutcome::new(t_o, t_r / baselines.len() as f64);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyParams {
    pub min_cycle: usize,
    pub seed: u64,
    /// Baseline draws per task; `T_r` is their mean.
    pub trials: usize,
    pub node_limit: u64,
    pub max_attempts: u64,
    pub execution: Execution,
}

impl StudyParams {
    pub fn new(seed: u64) -> Self {
        StudyParams {
            min_cycle: 3,
            seed,
            trials: 1,
            node_limit: DEFAULT_NODE_LIMIT,
            max_attempts: 1_000_000,
            execution: Execution::default(),
        }
    }

    pub fn with_min_cycle(mut self, min_cycle: usize) -> Self {
        self.min_cycle = min_cycle;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskDetail {
    pub task_no: u32,
    /// `(n_high, n_middle, n_low)`.
    pub level_split: (usize, usize, usize),
    /// Cycle lengths of each rule's optimized assignment.
    pub optimized_cycles: [Vec<usize>; 3],
    pub optimized_perms: [Vec<usize>; 3],
    /// Cycle lengths of each baseline draw.
    pub baseline_cycles: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub seed: u64,
    pub min_cycle: usize,
    pub trials: usize,
    pub students: Vec<String>,
    pub rows: Vec<ReportRow>,
    /// Arithmetic mean of each column over the task rows.
    pub average: [RuleOutcome; 3],
    pub tasks: Vec<TaskDetail>,
}

impl EvaluationReport {
    pub fn column_mean(rows: &[ReportRow]) -> [RuleOutcome; 3] {
        let n = rows.len().max(1) as f64;
        let mut avg = [RuleOutcome { t_o: 0.0, t_r: 0.0, c: 0.0 }; 3];
        for row in rows {
            for (a, o) in avg.iter_mut().zip(&row.outcomes) {
                a.t_o += o.t_o;
                a.t_r += o.t_r;
                a.c += o.c;
            }
        }
        for a in &mut avg {
            a.t_o /= n;
            a.t_r /= n;
            a.c /= n;
        }
        avg
    }
}

struct TaskResult {
    row: ReportRow,
    detail: TaskDetail,
}

fn run_task(records: &[StudentRecord], rules: &RuleMatrices, task_no: u32, params: &StudyParams) -> Result<TaskResult> {
    let n = records.len();
    if !min_cycle_in_range(n, params.min_cycle) {
        return Err(Error::InvalidMinCycle { n, min_cycle: params.min_cycle });
    }
    let snapshot: Vec<StudentRecord> = records.iter().map(|r| r.up_to_task(task_no)).collect();
    let levels = cluster_levels(&snapshot);

    let mut instances = Vec::with_capacity(3);
    let mut solved: Vec<Assignment> = Vec::with_capacity(3);
    let solve = SolveParams::new(params.min_cycle).with_node_limit(params.node_limit);
    for kind in RuleKind::ALL {
        let rule = rules.get(kind.provenance()).expect("built-in rule kind");
        let inst = expand_distance(rule, &levels)?;
        solved.push(solve_min_cycle_atsp(&inst, solve)?);
        instances.push(inst);
    }

    let mut rng = task_rng(params.seed, task_no);
    let baselines = (0..params.trials.max(1))
        .map(|_| sample_constrained(n, params.min_cycle, params.max_attempts, &mut rng))
        .collect::<Result<Vec<_>>>()?;

    let instances: [DistanceInstance; 3] = instances.try_into().expect("three rules");
    let perms: [Vec<usize>; 3] = std::array::from_fn(|k| solved[k].perm.clone());
    let outcomes = compare(&instances, &perms, &baselines)?;

    Ok(TaskResult {
        row: ReportRow { task_no, outcomes },
        detail: TaskDetail {
            task_no,
            level_split: levels.counts(),
            optimized_cycles: std::array::from_fn(|k| solved[k].cycle_lengths()),
            optimized_perms: perms,
            baseline_cycles: baselines.iter().map(|b| crate::solver::find_cycles(b).iter().map(Vec::len).collect()).collect(),
        },
    })
}

/// Evaluates every task in `tasks`. Levels are recomputed from the running
/// averages as of each task. Tasks run concurrently under
/// `Execution::Parallel`; the report is identical in either mode.
pub fn run_study(records: &[StudentRecord], rules: &RuleMatrices, tasks: &[u32], params: &StudyParams) -> Result<EvaluationReport> {
    let results = par::try_map(params.execution, tasks, |&task_no| {
        run_task(records, rules, task_no, params).map_err(|e| e.in_task(task_no))
    })?;
    let (rows, tasks): (Vec<_>, Vec<_>) = results.into_iter().map(|r| (r.row, r.detail)).unzip();
    Ok(EvaluationReport {
        seed: params.seed,
        min_cycle: params.min_cycle,
        trials: params.trials.max(1),
        students: records.iter().map(|r| r.student_id.clone()).collect(),
        average: EvaluationReport::column_mean(&rows),
        rows,
        tasks,
    })
}

/// Synthetic cohort: each student has a latent ability and scores it plus
/// noise on every task, clamped to `[0, 100]` and rounded to one decimal.
pub fn simulate_scores(n_students: usize, n_tasks: u32, seed: u64) -> Vec<StudentRecord> {
    use rand_distr::{Distribution, Normal};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 8.0).expect("valid sigma");
    (0..n_students)
        .map(|i| {
            let ability: f64 = rng.gen_range(40.0..98.0);
            let scores: Vec<(u32, f64)> = (1..=n_tasks)
                .map(|t| {
                    let s: f64 = ability + noise.sample(&mut rng);
                    (t, (s.clamp(0.0, 100.0) * 10.0).round() / 10.0)
                })
                .collect();
            StudentRecord::with_scores(format!("s{:02}", i + 1), &scores)
        })
        .collect()
}
