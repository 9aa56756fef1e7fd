//! Flat-file formats.
//!
//! CSV files are comma-separated UTF-8 with a mandatory header; malformed rows
//! are rejected with their line number. JSON carries floats at full
//! precision (shortest round-trip form).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::competence::{update_averages, CompetenceLevel, LevelAssignment, NewScore, StudentRecord};
use crate::error::{Error, Result};
use crate::evaluation::EvaluationReport;
use crate::matrix::Mat3;
use crate::preference::{PreferenceMatrix, Question, QuestionnaireResponse, RuleMatrix, RuleProvenance};
use crate::solver::{Assignment, DistanceInstance};

pub const AXIS_ORDER: [&str; 3] = ["high", "middle", "low"];

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes())
}

fn csv_err(origin: &str, line: u64, message: impl Into<String>) -> Error {
    Error::Csv { path: origin.to_string(), line, message: message.into() }
}

fn check_header(rdr: &mut csv::Reader<&[u8]>, origin: &str, expected: &[&str]) -> Result<()> {
    let headers = rdr.headers().map_err(|e| csv_err(origin, 1, e.to_string()))?;
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(csv_err(origin, 1, format!("expected header `{}`, found `{}`", expected.join(","), got.join(","))));
    }
    Ok(())
}

fn records<'a>(
    rdr: &'a mut csv::Reader<&'a [u8]>,
    origin: &'a str,
) -> impl Iterator<Item = Result<(u64, csv::StringRecord)>> + 'a {
    rdr.records().map(move |r| {
        let rec = r.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            csv_err(origin, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        Ok((line, rec))
    })
}

/// Parses `student_id,task_no,score`. A row with empty `task_no` and `score`
/// enrols a student without a score. Students keep first-appearance order.
pub fn parse_scores(text: &str, origin: &str) -> Result<Vec<StudentRecord>> {
    let mut rdr = csv_reader(text);
    check_header(&mut rdr, origin, &["student_id", "task_no", "score"])?;

    let mut roster: Vec<StudentRecord> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut batch: Vec<(u64, NewScore)> = Vec::new();
    for row in records(&mut rdr, origin) {
        let (line, rec) = row?;
        let id = &rec[0];
        if id.is_empty() {
            return Err(csv_err(origin, line, "empty student_id"));
        }
        if !index.contains_key(id) {
            index.insert(id.to_string(), roster.len());
            roster.push(StudentRecord::new(id));
        }
        match (&rec[1], &rec[2]) {
            ("", "") => {}
            (task, score) => {
                let task_no: u32 = task.parse().map_err(|_| csv_err(origin, line, format!("invalid task_no `{task}`")))?;
                let score: f64 = score.parse().map_err(|_| csv_err(origin, line, format!("invalid score `{score}`")))?;
                batch.push((line, NewScore::new(id, task_no, score)));
            }
        }
    }

    // Validate row by row so errors carry a line number, then apply atomically.
    let mut staged = roster.clone();
    for (line, s) in &batch {
        staged = update_averages(&staged, std::slice::from_ref(s)).map_err(|e| csv_err(origin, *line, e.to_string()))?;
    }
    Ok(staged)
}

pub fn read_scores(path: &Path) -> Result<Vec<StudentRecord>> {
    parse_scores(&read_file(path)?, &path.display().to_string())
}

pub fn scores_csv(records: &[StudentRecord]) -> String {
    let mut out = String::from("student_id,task_no,score\n");
    for r in records {
        if r.scores.is_empty() {
            let _ = writeln!(out, "{},,", r.student_id);
        }
        for (t, s) in &r.scores {
            let _ = writeln!(out, "{},{t},{s}", r.student_id);
        }
    }
    out
}

/// `student_id,average,level`; average is empty for students without scores.
pub fn levels_csv(records: &[StudentRecord], levels: &LevelAssignment) -> String {
    let mut out = String::from("student_id,average,level\n");
    for (r, (id, level)) in records.iter().zip(levels.entries()) {
        debug_assert_eq!(&r.student_id, id);
        let avg = r.average().map(|a| a.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{id},{avg},{level}");
    }
    out
}

pub fn parse_levels(text: &str, origin: &str) -> Result<LevelAssignment> {
    let mut rdr = csv_reader(text);
    check_header(&mut rdr, origin, &["student_id", "average", "level"])?;
    let mut entries = Vec::new();
    for row in records(&mut rdr, origin) {
        let (line, rec) = row?;
        let level: CompetenceLevel = rec[2].parse().map_err(|e: String| csv_err(origin, line, e))?;
        entries.push((rec[0].to_string(), level));
    }
    Ok(LevelAssignment::from_entries(entries))
}

/// Parses `student_id,question,ranking`. Rankings are kept verbatim; invalid
/// ones are skipped (and counted) during accumulation.
pub fn parse_responses(text: &str, origin: &str) -> Result<Vec<QuestionnaireResponse>> {
    let mut rdr = csv_reader(text);
    check_header(&mut rdr, origin, &["student_id", "question", "ranking"])?;
    let mut out = Vec::new();
    for row in records(&mut rdr, origin) {
        let (line, rec) = row?;
        let question: Question = rec[1].parse().map_err(|e: String| csv_err(origin, line, e))?;
        out.push(QuestionnaireResponse::new(&rec[0], question, &rec[2]));
    }
    Ok(out)
}

pub fn read_responses(path: &Path) -> Result<Vec<QuestionnaireResponse>> {
    parse_responses(&read_file(path)?, &path.display().to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleMatrixFile {
    pub axis_order: Vec<String>,
    pub rows: String,
    pub cols: String,
    pub values: [[f64; 3]; 3],
    pub provenance: RuleProvenance,
}

pub fn rule_matrix_json(rule: &RuleMatrix, round: Option<u32>) -> String {
    let values = match round {
        Some(d) => rule.values.rounded(d),
        None => rule.values,
    };
    let file = RuleMatrixFile {
        axis_order: AXIS_ORDER.iter().map(|s| s.to_string()).collect(),
        rows: "reviewer".into(),
        cols: "author".into(),
        values: values.0,
        provenance: rule.provenance,
    };
    let mut s = serde_json::to_string_pretty(&file).expect("serializable");
    s.push('\n');
    s
}

pub fn parse_rule_matrix(text: &str, origin: &str) -> Result<RuleMatrix> {
    let json_err = |m: String| Error::Json { path: origin.to_string(), message: m };
    let file: RuleMatrixFile = serde_json::from_str(text).map_err(|e| json_err(e.to_string()))?;
    if file.axis_order != AXIS_ORDER {
        return Err(json_err(format!("axis_order must be {AXIS_ORDER:?}")));
    }
    if file.rows != "reviewer" || file.cols != "author" {
        return Err(json_err("rule matrices must have reviewer rows and author columns".into()));
    }
    if file.values.iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(json_err("values must be finite and non-negative".into()));
    }
    Ok(RuleMatrix::new(Mat3(file.values), file.provenance))
}

pub fn read_rule_matrix(path: &Path) -> Result<RuleMatrix> {
    parse_rule_matrix(&read_file(path)?, &path.display().to_string())
}

/// Pre-aggregated questionnaire results: the reviewer view (rows reviewer
/// level) and the author view (rows author level), before normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceFile {
    pub reviewer_view: [[f64; 3]; 3],
    pub author_view: [[f64; 3]; 3],
}

impl PreferenceFile {
    pub fn matrices(&self) -> (PreferenceMatrix, PreferenceMatrix) {
        (
            PreferenceMatrix::reviewer_major(Mat3(self.reviewer_view)),
            PreferenceMatrix::author_major(Mat3(self.author_view)),
        )
    }
}

pub fn read_preferences(path: &Path) -> Result<PreferenceFile> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Json { path: path.display().to_string(), message: e.to_string() })
}

/// `reviewer_id,author_id`, one row per reviewer in cohort order.
pub fn assignment_csv(ids: &[String], perm: &[usize]) -> String {
    let mut out = String::from("reviewer_id,author_id\n");
    for (i, &j) in perm.iter().enumerate() {
        let _ = writeln!(out, "{},{}", ids[i], ids[j]);
    }
    out
}

/// Reads an assignment back into a permutation over `ids`.
pub fn parse_assignment(text: &str, origin: &str, ids: &[String]) -> Result<Vec<usize>> {
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut rdr = csv_reader(text);
    check_header(&mut rdr, origin, &["reviewer_id", "author_id"])?;
    let mut perm = vec![usize::MAX; ids.len()];
    for row in records(&mut rdr, origin) {
        let (line, rec) = row?;
        let lookup = |s: &str| index.get(s).copied().ok_or_else(|| csv_err(origin, line, format!("unknown student `{s}`")));
        let (r, a) = (lookup(&rec[0])?, lookup(&rec[1])?);
        if perm[r] != usize::MAX {
            return Err(csv_err(origin, line, format!("reviewer `{}` listed twice", &rec[0])));
        }
        perm[r] = a;
    }
    crate::solver::check_derangement(&perm, ids.len())?;
    Ok(perm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    #[serde(default)]
    pub student_ids: Option<Vec<String>>,
    #[serde(default)]
    pub levels: Option<Vec<CompetenceLevel>>,
    #[serde(default)]
    pub provenance: Option<RuleProvenance>,
    /// Row-major costs; diagonal is `null`.
    pub costs: Vec<Vec<Option<f64>>>,
}

pub fn instance_json(inst: &DistanceInstance) -> String {
    let file = InstanceFile {
        n: inst.n(),
        student_ids: Some(inst.ids().to_vec()),
        levels: inst.levels().map(<[_]>::to_vec),
        provenance: inst.provenance(),
        costs: inst.rows(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("serializable");
    s.push('\n');
    s
}

pub fn parse_instance(text: &str, origin: &str) -> Result<DistanceInstance> {
    let json_err = |m: String| Error::Json { path: origin.to_string(), message: m };
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| json_err(e.to_string()))?;
    if file.costs.len() != file.n {
        return Err(json_err(format!("{} cost rows for n = {}", file.costs.len(), file.n)));
    }
    let mut rows = Vec::with_capacity(file.n);
    for (i, row) in file.costs.iter().enumerate() {
        let mut r = Vec::with_capacity(row.len());
        for (j, c) in row.iter().enumerate() {
            match (i == j, c) {
                (true, _) => r.push(0.0),
                (false, Some(c)) => r.push(*c),
                (false, None) => return Err(json_err(format!("missing cost ({i}, {j})"))),
            }
        }
        rows.push(r);
    }
    let mut inst = DistanceInstance::from_rows(&rows)?.with_provenance(file.provenance);
    if let Some(ids) = file.student_ids {
        inst = inst.with_ids(ids)?;
    }
    if let Some(levels) = file.levels {
        inst = inst.with_levels(levels)?;
    }
    Ok(inst)
}

pub fn read_instance(path: &Path) -> Result<DistanceInstance> {
    parse_instance(&read_file(path)?, &path.display().to_string())
}

pub const REPORT_HEADER: &str = "task_no,T_o1,T_r1,C1,T_o2,T_r2,C2,T_o3,T_r3,C3";

fn fmt_outcomes(out: &mut String, outcomes: &[crate::evaluation::RuleOutcome; 3], sep: &str, decimals: usize) {
    for o in outcomes {
        let _ = write!(out, "{sep}{:.d$}{sep}{:.d$}{sep}{:.d$}", o.t_o, o.t_r, o.c, d = decimals);
    }
}

/// Table-style CSV: one row per task plus a final `avg` row.
pub fn report_csv(report: &EvaluationReport, decimals: usize) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for row in &report.rows {
        let _ = write!(out, "{}", row.task_no);
        fmt_outcomes(&mut out, &row.outcomes, ",", decimals);
        out.push('\n');
    }
    out.push_str("avg");
    fmt_outcomes(&mut out, &report.average, ",", decimals);
    out.push('\n');
    out
}

pub fn report_markdown(report: &EvaluationReport, decimals: usize) -> String {
    let mut out = String::new();
    out.push_str("| Task No. | T_o1 | T_r1 | C1 | T_o2 | T_r2 | C2 | T_o3 | T_r3 | C3 |\n");
    out.push_str("|---:|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n");
    for row in &report.rows {
        let _ = write!(out, "| {}", row.task_no);
        fmt_outcomes(&mut out, &row.outcomes, " | ", decimals);
        out.push_str(" |\n");
    }
    out.push_str("| Avg.");
    fmt_outcomes(&mut out, &report.average, " | ", decimals);
    out.push_str(" |\n");
    let _ = writeln!(
        out,
        "\nseed {}, minimum cycle length {}, {} baseline draw(s) per task",
        report.seed, report.min_cycle, report.trials
    );
    out
}

pub fn report_json(report: &EvaluationReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("serializable");
    s.push('\n');
    s
}

/// Convenience for callers holding an [`Assignment`].
pub fn assignment_csv_for(inst: &DistanceInstance, a: &Assignment) -> String {
    assignment_csv(inst.ids(), &a.perm)
}
