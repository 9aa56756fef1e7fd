//! Acceptance gate. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use peerassign::competence::{CompetenceLevel, LevelAssignment};
use peerassign::evaluation::{run_study, sample_constrained, simulate_scores, random_baseline, BaselineParams, StudyParams};
use peerassign::io::{report_csv, report_json, report_markdown};
use peerassign::matrix::Mat3;
use peerassign::par::{self, Execution};
use peerassign::preference::{derive_stages, reverse_values, MergeStage};
use peerassign::solver::{
    brute_force_oracle, check_derangement, expand_distance, solve_lap, solve_min_cycle_atsp, DistanceInstance,
    SolveParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TABLE_TOL: f64 = 0.01;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// AC1: survey aggregates in, reference matrices out within ±0.01.
fn preference_regression() -> Outcome {
    let (r1, r2) = survey();
    let s = derive_stages(&r1, &r2, MergeStage::Raw).unwrap();
    let diffs = [
        ("R3", max_diff(&s.reviewer_normalized.values, &R3)),
        ("R4", max_diff(&s.author_normalized.values, &R4)),
        ("R5", max_diff(&s.merged.values, &R5)),
        ("R3'", max_diff(&s.rules.reviewer.values, &R3_RULE)),
        ("R4'", max_diff(&s.rules.author.values, &R4_RULE)),
        ("R5'", max_diff(&s.rules.merged.values, &R5_RULE)),
    ];
    let worst = diffs.iter().map(|d| d.1).fold(0.0, f64::max);
    let detail = diffs.iter().map(|(k, d)| format!("{k} {d:.4}")).collect::<Vec<_>>().join(", ");
    check(worst <= TABLE_TOL, format!("max |diff| per matrix: {detail}"))
}

/// AC2: reversal of the reference sources gives the reference rules; involution
/// on 1000 random matrices with duplicate entries.
fn reversal_semantics() -> Outcome {
    let start = Instant::now();
    let pairs = [(R3, R3_RULE), (R4, R4_RULE), (R5, R5_RULE)];
    let mut mismatched = 0;
    for (src, want) in pairs {
        let got = reverse_values(&Mat3(src));
        mismatched += Mat3::cells().filter(|&c| (got[c] - want[c.0][c.1]).abs() > 1e-12).count();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = 0;
    for _ in 0..1000 {
        let palette: Vec<f64> = (0..rng.gen_range(1..=5)).map(|_| rng.gen_range(0.0..50.0)).collect();
        let m = Mat3(std::array::from_fn(|_| std::array::from_fn(|_| palette[rng.gen_range(0..palette.len())])));
        if reverse_values(&reverse_values(&m)) != m {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    check(
        mismatched == 0 && failures == 0 && elapsed < Duration::from_secs(1),
        format!("{mismatched}/27 rule entries wrong, {failures}/1000 involution failures, {elapsed:.2?}"),
    )
}

struct SweepCase {
    inst: DistanceInstance,
    ms: Vec<usize>,
}

fn sweep_cases() -> Vec<SweepCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(20130601);
    (0..600)
        .map(|k| {
            let n = 4 + k % 5;
            let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(1u32..=100) as f64).collect()).collect();
            let mut ms: Vec<usize> = (2..=n / 2).collect();
            ms.push(n);
            SweepCase { inst: DistanceInstance::from_rows(&rows).unwrap(), ms }
        })
        .collect()
}

#[derive(Default)]
struct SweepResult {
    checks: usize,
    total_mismatch: usize,
    infeasible_output: usize,
    bound_violations: usize,
    monotone_violations: usize,
}

fn run_sweep(cases: &[SweepCase]) -> SweepResult {
    let per_case = par::map(Execution::Parallel, cases, |case| {
        let mut r = SweepResult::default();
        let n = case.inst.n();
        let lap = solve_lap(&case.inst).unwrap().total;
        let mut prev: Option<f64> = None;
        for &m in &case.ms {
            let got = solve_min_cycle_atsp(&case.inst, SolveParams::new(m)).unwrap();
            let want = brute_force_oracle(&case.inst, m).unwrap();
            r.checks += 1;
            if got.total != want.total {
                r.total_mismatch += 1;
            }
            if check_derangement(&got.perm, n).is_err() || got.min_cycle_len() < m {
                r.infeasible_output += 1;
            }
            if lap > got.total {
                r.bound_violations += 1;
            }
            if prev.is_some_and(|p| p > got.total) {
                r.monotone_violations += 1;
            }
            prev = Some(got.total);
        }
        r
    });
    per_case.into_iter().fold(SweepResult::default(), |mut a, r| {
        a.checks += r.checks;
        a.total_mismatch += r.total_mismatch;
        a.infeasible_output += r.infeasible_output;
        a.bound_violations += r.bound_violations;
        a.monotone_violations += r.monotone_violations;
        a
    })
}

/// AC5: simulated 23-student cohorts over 12 tasks, min cycle 3 on both sides.
fn optimality_dominance() -> Outcome {
    let start = Instant::now();
    let rules = reference_rules();
    let tasks: Vec<u32> = (1..=12).collect();
    let cohorts = 84; // 84 × 12 = 1008 trials
    let reports = par::map_range(Execution::Parallel, 0..cohorts, |k| {
        let records = simulate_scores(23, 12, 1000 + k as u64);
        let params = StudyParams::new(k as u64).with_execution(Execution::Sequential);
        run_study(&records, &rules, &tasks, &params).unwrap()
    });
    let mut trials = 0usize;
    let mut below_one = 0usize;
    let mut sums = [0.0f64; 3];
    let mut splits = std::collections::BTreeSet::new();
    for report in &reports {
        for (row, detail) in report.rows.iter().zip(&report.tasks) {
            trials += 1;
            splits.insert(detail.level_split);
            for (k, o) in row.outcomes.iter().enumerate() {
                if o.c < 1.0 {
                    below_one += 1;
                }
                sums[k] += o.c;
            }
        }
    }
    let means = sums.map(|s| s / trials as f64);
    let elapsed = start.elapsed();
    check(
        trials >= 1000 && below_one == 0 && means[0] > means[2] && means[1] > means[2] && elapsed < Duration::from_secs(120),
        format!(
            "{trials} trials, {} distinct level splits, {below_one} with C < 1, mean C = {:.3} / {:.3} / {:.3}, {elapsed:.2?}",
            splits.len(),
            means[0],
            means[1],
            means[2]
        ),
    )
}

/// AC6: uniformity on n=4, m=3 and a reproducible n=23 draw.
fn baseline_sampler() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(60000);
    let draws = 60_000usize;
    let mut counts = std::collections::BTreeMap::<Vec<usize>, usize>::new();
    for _ in 0..draws {
        *counts.entry(sample_constrained(4, 3, 10_000, &mut rng).unwrap()).or_default() += 1;
    }
    let p = 1.0 / 6.0;
    let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
    let expected = draws as f64 * p;
    let worst_z = counts.values().map(|&c| (c as f64 - expected).abs() / sigma).fold(0.0, f64::max);
    let params = BaselineParams { min_cycle: 3, seed: 23, max_attempts: 1_000_000 };
    let a = format!("{:?}", random_baseline(23, &params).unwrap());
    let b = format!("{:?}", random_baseline(23, &params).unwrap());
    check(
        counts.len() == 6 && worst_z <= 3.0 && a == b,
        format!("{} distinct 4-cycles, worst |z| = {worst_z:.2}, n=23 replay identical: {}", counts.len(), a == b),
    )
}

/// AC7: n=23, three levels, min cycle 3, under 100 ms per rule matrix.
fn class_scale_performance() -> Outcome {
    let rules = reference_rules();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut worst = Duration::ZERO;
    for _ in 0..50 {
        let levels: Vec<CompetenceLevel> = (0..23).map(|_| CompetenceLevel::ALL[rng.gen_range(0..3)]).collect();
        let levels = LevelAssignment::from_levels(&levels);
        for rule in [rules.reviewer, rules.author, rules.merged] {
            let inst = expand_distance(&rule, &levels).unwrap();
            let t = Instant::now();
            let a = solve_min_cycle_atsp(&inst, SolveParams::new(3)).unwrap();
            worst = worst.max(t.elapsed());
            assert!(a.min_cycle_len() >= 3);
        }
    }
    check(worst < Duration::from_millis(100), format!("slowest of 150 solves: {worst:.2?}"))
}

/// AC8: identical inputs and seed give byte-identical report files.
fn end_to_end_determinism() -> Outcome {
    let (r1, r2) = survey();
    let rules = derive_stages(&r1, &r2, MergeStage::Raw).unwrap().rules;
    let records = simulate_scores(23, 12, 2011);
    let tasks: Vec<u32> = (1..=12).collect();
    let render = |exec| {
        let report = run_study(&records, &rules, &tasks, &StudyParams::new(42).with_execution(exec)).unwrap();
        (report_csv(&report, 2), report_markdown(&report, 2), report_json(&report))
    };
    let a = render(Execution::Parallel);
    let b = render(Execution::Parallel);
    let c = render(Execution::Sequential);
    let rows = a.0.lines().count();
    check(a == b && a == c && rows == 14, format!("csv/markdown/json identical across runs and modes: {}, csv lines {rows}", a == b && a == c))
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    results.push(("AC1 preference pipeline reproduces reference matrices", preference_regression()));
    results.push(("AC2 rank reversal semantics", reversal_semantics()));

    let start = Instant::now();
    let cases = sweep_cases();
    let sweep = run_sweep(&cases);
    let elapsed = start.elapsed();
    results.push((
        "AC3 solver equals brute-force oracle",
        check(
            cases.len() >= 500 && sweep.total_mismatch == 0 && sweep.infeasible_output == 0 && elapsed < Duration::from_secs(60),
            format!(
                "{} instances, {} (instance, m) checks, {} total mismatches, {} infeasible outputs, {elapsed:.2?}",
                cases.len(),
                sweep.checks,
                sweep.total_mismatch,
                sweep.infeasible_output
            ),
        ),
    ));
    results.push((
        "AC4 bound and monotonicity chain",
        check(
            sweep.bound_violations == 0 && sweep.monotone_violations == 0,
            format!("{} LAP-bound violations, {} monotonicity violations", sweep.bound_violations, sweep.monotone_violations),
        ),
    ));
    results.push(("AC5 optimality dominance over random baseline", optimality_dominance()));
    results.push(("AC6 baseline sampler correctness", baseline_sampler()));
    results.push(("AC7 class-scale solve time", class_scale_performance()));
    results.push(("AC8 end-to-end determinism", end_to_end_determinism()));

    let mut failed = 0;
    for (name, o) in &results {
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
