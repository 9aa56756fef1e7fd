//! Competence ranking: running average scores and three-level clustering.
//!
//! Levels are produced by agglomerative clustering of the 1-D averages with
//! Ward's minimum-variance linkage, cut at three clusters. Students without any
//! score yet are ranked `middle`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompetenceLevel {
    High,
    Middle,
    Low,
}

impl CompetenceLevel {
    pub const ALL: [CompetenceLevel; 3] =
        [CompetenceLevel::High, CompetenceLevel::Middle, CompetenceLevel::Low];

    /// Zero-based row/column index in a rule matrix (high = 0).
    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    /// One-based ordinal rank (high = 1, low = 3).
    pub fn rank(self) -> u8 {
        self as u8 + 1
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CompetenceLevel::High => "high",
            CompetenceLevel::Middle => "middle",
            CompetenceLevel::Low => "low",
        }
    }
}

impl fmt::Display for CompetenceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CompetenceLevel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "high" => Ok(CompetenceLevel::High),
            "middle" => Ok(CompetenceLevel::Middle),
            "low" => Ok(CompetenceLevel::Low),
            other => Err(format!("unknown level `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudentRecord {
    pub student_id: String,
    /// `(task_no, score)` in insertion order.
    pub scores: Vec<(u32, f64)>,
}

impl StudentRecord {
    pub fn new(student_id: impl Into<String>) -> Self {
        StudentRecord { student_id: student_id.into(), scores: Vec::new() }
    }

    pub fn with_scores(student_id: impl Into<String>, scores: &[(u32, f64)]) -> Self {
        StudentRecord { student_id: student_id.into(), scores: scores.to_vec() }
    }

    /// Mean of all recorded scores, `None` before the first task.
    pub fn average(&self) -> Option<f64> {
        if self.scores.is_empty() {
            return None;
        }
        Some(self.scores.iter().map(|(_, s)| s).sum::<f64>() / self.scores.len() as f64)
    }

    pub fn has_task(&self, task_no: u32) -> bool {
        self.scores.iter().any(|(t, _)| *t == task_no)
    }

    /// The record as it stood once `task_no` was graded.
    pub fn up_to_task(&self, task_no: u32) -> StudentRecord {
        StudentRecord {
            student_id: self.student_id.clone(),
            scores: self.scores.iter().copied().filter(|(t, _)| *t <= task_no).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewScore {
    pub student_id: String,
    pub task_no: u32,
    pub score: f64,
}

impl NewScore {
    pub fn new(student_id: impl Into<String>, task_no: u32, score: f64) -> Self {
        NewScore { student_id: student_id.into(), task_no, score }
    }
}

/// Appends a batch of scores. The batch is validated as a whole first; on any
/// error no record is modified.
pub fn update_averages(records: &[StudentRecord], new_scores: &[NewScore]) -> Result<Vec<StudentRecord>> {
    let index: HashMap<&str, usize> =
        records.iter().enumerate().map(|(i, r)| (r.student_id.as_str(), i)).collect();

    let mut seen: HashSet<(&str, u32)> = HashSet::new();
    for s in new_scores {
        let &i = index
            .get(s.student_id.as_str())
            .ok_or_else(|| Error::UnknownStudent(s.student_id.clone()))?;
        if s.task_no == 0 {
            return Err(Error::ZeroTask(s.student_id.clone()));
        }
        if !(0.0..=100.0).contains(&s.score) {
            return Err(Error::ScoreOutOfRange {
                student_id: s.student_id.clone(),
                task_no: s.task_no,
                score: s.score,
            });
        }
        if records[i].has_task(s.task_no) || !seen.insert((s.student_id.as_str(), s.task_no)) {
            return Err(Error::DuplicateScore { student_id: s.student_id.clone(), task_no: s.task_no });
        }
    }

    let mut out = records.to_vec();
    for s in new_scores {
        out[index[s.student_id.as_str()]].scores.push((s.task_no, s.score));
    }
    Ok(out)
}

/// Level labels for one task round, in cohort order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelAssignment {
    entries: Vec<(String, CompetenceLevel)>,
}

impl LevelAssignment {
    pub fn from_entries(entries: Vec<(String, CompetenceLevel)>) -> Self {
        LevelAssignment { entries }
    }

    /// Anonymous cohort labelled `s1..sn`.
    pub fn from_levels(levels: &[CompetenceLevel]) -> Self {
        LevelAssignment {
            entries: levels.iter().enumerate().map(|(i, l)| (format!("s{}", i + 1), *l)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(String, CompetenceLevel)] {
        &self.entries
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(id, _)| id.as_str())
    }

    pub fn levels(&self) -> Vec<CompetenceLevel> {
        self.entries.iter().map(|(_, l)| *l).collect()
    }

    pub fn level_of(&self, student_id: &str) -> Option<CompetenceLevel> {
        self.entries.iter().find(|(id, _)| id == student_id).map(|(_, l)| *l)
    }

    /// `(n_high, n_middle, n_low)`.
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = [0usize; 3];
        for (_, l) in &self.entries {
            c[l.index()] += 1;
        }
        (c[0], c[1], c[2])
    }
}

#[derive(Debug, Clone, Copy)]
struct Cluster {
    weight: f64,
    sum: f64,
}

impl Cluster {
    fn mean(&self) -> f64 {
        self.sum / self.weight
    }

    /// Increase in within-cluster sum of squares caused by merging.
    fn ward_cost(&self, other: &Cluster) -> f64 {
        let d = self.mean() - other.mean();
        self.weight * other.weight / (self.weight + other.weight) * d * d
    }
}

/// Ward agglomeration of sorted distinct values, stopped at `k` clusters.
/// Returns, for each input value, the index of its cluster in ascending-mean order.
fn ward_1d(distinct: &[(f64, usize)], k: usize) -> Vec<usize> {
    // Each cluster tracks the distinct values it owns.
    let mut clusters: Vec<(Cluster, Vec<usize>)> = distinct
        .iter()
        .enumerate()
        .map(|(i, &(v, count))| (Cluster { weight: count as f64, sum: v * count as f64 }, vec![i]))
        .collect();

    while clusters.len() > k {
        let mut best = (f64::INFINITY, 0, 1);
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let cost = clusters[a].0.ward_cost(&clusters[b].0);
                if cost < best.0 {
                    best = (cost, a, b);
                }
            }
        }
        let (_, a, b) = best;
        let (cb, members) = clusters.remove(b);
        clusters[a].0.weight += cb.weight;
        clusters[a].0.sum += cb.sum;
        clusters[a].1.extend(members);
        clusters.sort_by(|x, y| x.0.mean().total_cmp(&y.0.mean()));
    }

    let mut label = vec![0; distinct.len()];
    for (ci, (_, members)) in clusters.iter().enumerate() {
        for &m in members {
            label[m] = ci;
        }
    }
    label
}

/// Ranks a cohort into high / middle / low.
pub fn cluster_levels(records: &[StudentRecord]) -> LevelAssignment {
    let averages: Vec<Option<f64>> = records.iter().map(StudentRecord::average).collect();

    // Distinct averages with multiplicities, ascending. Equal averages share a
    // starting cluster so they can never be split.
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for a in averages.iter().flatten() {
        *counts.entry(ordered_bits(*a)).or_default() += 1;
    }
    let distinct: Vec<(f64, usize)> = counts.iter().map(|(&b, &c)| (from_ordered_bits(b), c)).collect();

    let k = distinct.len().min(3);
    let cluster_of = ward_1d(&distinct, k);
    // Ascending-mean cluster index -> level. Extremes are labelled first.
    let labels: &[CompetenceLevel] = match k {
        0 | 1 => &[CompetenceLevel::Middle],
        2 => &[CompetenceLevel::Low, CompetenceLevel::High],
        _ => &[CompetenceLevel::Low, CompetenceLevel::Middle, CompetenceLevel::High],
    };
    let level_of_value: HashMap<u64, CompetenceLevel> = distinct
        .iter()
        .zip(&cluster_of)
        .map(|(&(v, _), &c)| (ordered_bits(v), labels[c]))
        .collect();

    let entries = records
        .iter()
        .zip(&averages)
        .map(|(r, avg)| {
            let level = avg.map_or(CompetenceLevel::Middle, |a| level_of_value[&ordered_bits(a)]);
            (r.student_id.clone(), level)
        })
        .collect();
    LevelAssignment { entries }
}

// Order-preserving bit mapping so BTreeMap keys sort like the floats they encode.
fn ordered_bits(v: f64) -> u64 {
    let v = if v == 0.0 { 0.0 } else { v };
    let b = v.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}

fn from_ordered_bits(b: u64) -> f64 {
    if b >> 63 == 1 {
        f64::from_bits(b & !(1 << 63))
    } else {
        f64::from_bits(!b)
    }
}
