//! Questionnaire rankings → preference matrices → rule matrices.
//!
//! Two questions are asked: Q1 from the reviewer's point of view and Q2 from
//! the author's. Each answer ranks five options describing the counterpart's
//! level relative to the respondent (A: two levels above, ..., E: two levels
//! below). Every ranked option adds `option_weight × position_weight` to each
//! level pair it covers. The resulting matrices are normalized, merged and
//! finally rank-reversed so that the most preferred pairing costs the least.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Mat3;

/// Entries closer than this are treated as one value when reversing ranks.
pub const VALUE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Question {
    /// Reviewer's view: which author level helps me most.
    Q1,
    /// Author's view: which reviewer level helps me most.
    Q2,
}

impl FromStr for Question {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "Q1" => Ok(Question::Q1),
            "Q2" => Ok(Question::Q2),
            other => Err(format!("unknown question `{other}` (expected Q1 or Q2)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionnaireResponse {
    pub student_id: String,
    pub question: Question,
    /// Option letters, most preferred first, e.g. `"BACDE"`.
    pub ranking: String,
}

impl QuestionnaireResponse {
    pub fn new(student_id: impl Into<String>, question: Question, ranking: impl Into<String>) -> Self {
        QuestionnaireResponse { student_id: student_id.into(), question, ranking: ranking.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// Rows are reviewer levels, columns author levels.
    ReviewerMajor,
    /// Rows are author levels, columns reviewer levels.
    AuthorMajor,
}

impl Orientation {
    fn flipped(self) -> Orientation {
        match self {
            Orientation::ReviewerMajor => Orientation::AuthorMajor,
            Orientation::AuthorMajor => Orientation::ReviewerMajor,
        }
    }
}

/// Larger entry = more wanted pairing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreferenceMatrix {
    pub values: Mat3,
    pub orientation: Orientation,
}

impl PreferenceMatrix {
    pub fn reviewer_major(values: Mat3) -> Self {
        PreferenceMatrix { values, orientation: Orientation::ReviewerMajor }
    }

    pub fn author_major(values: Mat3) -> Self {
        PreferenceMatrix { values, orientation: Orientation::AuthorMajor }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleProvenance {
    Reviewer,
    Author,
    Merged,
    Custom,
}

impl RuleProvenance {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleProvenance::Reviewer => "reviewer",
            RuleProvenance::Author => "author",
            RuleProvenance::Merged => "merged",
            RuleProvenance::Custom => "custom",
        }
    }
}

impl fmt::Display for RuleProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleProvenance {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "reviewer" => Ok(RuleProvenance::Reviewer),
            "author" => Ok(RuleProvenance::Author),
            "merged" => Ok(RuleProvenance::Merged),
            "custom" => Ok(RuleProvenance::Custom),
            other => Err(format!("unknown provenance `{other}`")),
        }
    }
}

/// Reviewer-major level-pair costs; smaller = higher assignment priority.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleMatrix {
    pub values: Mat3,
    pub provenance: RuleProvenance,
}

impl RuleMatrix {
    pub fn new(values: Mat3, provenance: RuleProvenance) -> Self {
        RuleMatrix { values, provenance }
    }

    pub fn custom(values: [[f64; 3]; 3]) -> Self {
        RuleMatrix { values: Mat3(values), provenance: RuleProvenance::Custom }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MergeStage {
    /// Sum the un-normalized matrices.
    #[default]
    Raw,
    /// Sum the individually normalized matrices.
    Normalized,
}

impl FromStr for MergeStage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "raw" => Ok(MergeStage::Raw),
            "normalized" => Ok(MergeStage::Normalized),
            other => Err(format!("unknown merge stage `{other}` (expected raw or normalized)")),
        }
    }
}

pub fn option_weight(option: char) -> Result<f64> {
    match option {
        'A' | 'E' => Ok(1.0),
        'B' | 'D' => Ok(0.5),
        'C' => Ok(1.0 / 3.0),
        other => Err(Error::InvalidOption(other)),
    }
}

/// `e^(1 - position)` for positions 1..=5.
pub fn position_weight(position: usize) -> Result<f64> {
    if !(1..=5).contains(&position) {
        return Err(Error::InvalidPosition(position));
    }
    Ok((1.0 - position as f64).exp())
}

/// Zero-based `(row, col)` cells covered by an option. Rows are the
/// respondent's level, columns the counterpart's; both Q1 and Q2 use the same
/// map in their own orientation.
pub fn affected_cells(_question: Question, option: char) -> Result<&'static [(usize, usize)]> {
    // Counterpart offset relative to the respondent, in levels.
    Ok(match option {
        'A' => &[(2, 0)],
        'B' => &[(1, 0), (2, 1)],
        'C' => &[(0, 0), (1, 1), (2, 2)],
        'D' => &[(0, 1), (1, 2)],
        'E' => &[(0, 2)],
        other => return Err(Error::InvalidOption(other)),
    })
}

/// Validates a full ranking or a prefix of one.
pub fn parse_ranking(ranking: &str) -> Result<Vec<char>> {
    let letters: Vec<char> = ranking.chars().filter(|c| !matches!(c, ',' | '>' | ' ')).collect();
    let invalid = || Error::InvalidRanking(ranking.to_string());
    if letters.is_empty() || letters.len() > 5 {
        return Err(invalid());
    }
    let mut seen = [false; 5];
    for &c in &letters {
        let idx = match c {
            'A'..='E' => c as usize - 'A' as usize,
            _ => return Err(invalid()),
        };
        if std::mem::replace(&mut seen[idx], true) {
            return Err(invalid());
        }
    }
    Ok(letters)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Accumulated {
    /// Reviewer view (Q1), reviewer-major.
    pub reviewer: PreferenceMatrix,
    /// Author view (Q2), author-major.
    pub author: PreferenceMatrix,
    pub skipped: usize,
}

/// Sums weighted answers into the two raw preference matrices. Malformed
/// rankings are skipped and counted.
pub fn accumulate_responses(responses: &[QuestionnaireResponse]) -> Accumulated {
    let mut r1 = Mat3::ZERO;
    let mut r2 = Mat3::ZERO;
    let mut skipped = 0;
    for resp in responses {
        let Ok(letters) = parse_ranking(&resp.ranking) else {
            skipped += 1;
            continue;
        };
        let target = match resp.question {
            Question::Q1 => &mut r1,
            Question::Q2 => &mut r2,
        };
        for (pos, &opt) in letters.iter().enumerate() {
            // Letters are validated above.
            let w = option_weight(opt).unwrap() * position_weight(pos + 1).unwrap();
            for &cell in affected_cells(resp.question, opt).unwrap() {
                target[cell] += w;
            }
        }
    }
    Accumulated {
        reviewer: PreferenceMatrix::reviewer_major(r1),
        author: PreferenceMatrix::author_major(r2),
        skipped,
    }
}

fn check_entries(m: &Mat3) -> Result<()> {
    if m.values().any(|v| !v.is_finite() || v < 0.0) {
        return Err(Error::Normalize("entries must be finite and non-negative"));
    }
    Ok(())
}

/// Divides by the smallest positive entry. Zero entries (sparse survey data)
/// stay zero.
pub fn normalize(m: &PreferenceMatrix) -> Result<PreferenceMatrix> {
    check_entries(&m.values)?;
    let min = m.values.min_positive().ok_or(Error::Normalize("matrix is all zero"))?;
    Ok(PreferenceMatrix { values: m.values.map(|v| v / min), orientation: m.orientation })
}

pub fn transpose(m: &PreferenceMatrix) -> PreferenceMatrix {
    PreferenceMatrix { values: m.values.transpose(), orientation: m.orientation.flipped() }
}

/// Entrywise sum of two reviewer-major matrices, normalized by its minimum.
pub fn merge(reviewer: &PreferenceMatrix, author_t: &PreferenceMatrix, stage: MergeStage) -> Result<PreferenceMatrix> {
    if reviewer.orientation != Orientation::ReviewerMajor || author_t.orientation != Orientation::ReviewerMajor {
        return Err(Error::Orientation("merge operands must both be reviewer-major"));
    }
    let (a, b) = match stage {
        MergeStage::Raw => (*reviewer, *author_t),
        MergeStage::Normalized => (normalize(reviewer)?, normalize(author_t)?),
    };
    let sum = PreferenceMatrix::reviewer_major(a.values.zip_with(&b.values, |x, y| x + y));
    normalize(&sum)
}

/// Swaps the i-th smallest distinct value with the i-th largest.
pub fn reverse_values(m: &Mat3) -> Mat3 {
    let mut sorted: Vec<f64> = m.values().collect();
    sorted.sort_by(f64::total_cmp);
    // Representative (first member) of each tolerance group, ascending.
    let mut reps: Vec<f64> = Vec::with_capacity(9);
    for v in sorted {
        match reps.last() {
            Some(&r) if v - r <= VALUE_TOLERANCE => {}
            _ => reps.push(v),
        }
    }
    let k = reps.len();
    m.map(|v| {
        let i = reps
            .iter()
            .rposition(|&r| v >= r - VALUE_TOLERANCE)
            .expect("value belongs to a group");
        reps[k - 1 - i]
    })
}

/// Converts a reviewer-major preference matrix into a rule matrix.
pub fn reverse_ranks(m: &PreferenceMatrix, provenance: RuleProvenance) -> Result<RuleMatrix> {
    if m.orientation != Orientation::ReviewerMajor {
        return Err(Error::Orientation("only reviewer-major matrices can become rule matrices"));
    }
    Ok(RuleMatrix::new(reverse_values(&m.values), provenance))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleMatrices {
    pub reviewer: RuleMatrix,
    pub author: RuleMatrix,
    pub merged: RuleMatrix,
}

impl RuleMatrices {
    pub fn get(&self, provenance: RuleProvenance) -> Option<&RuleMatrix> {
        match provenance {
            RuleProvenance::Reviewer => Some(&self.reviewer),
            RuleProvenance::Author => Some(&self.author),
            RuleProvenance::Merged => Some(&self.merged),
            RuleProvenance::Custom => None,
        }
    }
}

/// Every intermediate matrix of the conversion, for inspection and reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceStages {
    /// Raw reviewer view.
    pub reviewer_raw: PreferenceMatrix,
    /// Raw author view, author-major.
    pub author_raw: PreferenceMatrix,
    pub reviewer_normalized: PreferenceMatrix,
    /// Author view transposed to reviewer-major, then normalized.
    pub author_normalized: PreferenceMatrix,
    pub merged: PreferenceMatrix,
    pub rules: RuleMatrices,
}

/// Runs normalize / transpose / merge / reverse on two raw preference matrices.
pub fn derive_stages(reviewer_raw: &PreferenceMatrix, author_raw: &PreferenceMatrix, stage: MergeStage) -> Result<PreferenceStages> {
    if reviewer_raw.orientation != Orientation::ReviewerMajor {
        return Err(Error::Orientation("reviewer view must be reviewer-major"));
    }
    if author_raw.orientation != Orientation::AuthorMajor {
        return Err(Error::Orientation("author view must be author-major"));
    }
    let author_t = transpose(author_raw);
    let reviewer_normalized = normalize(reviewer_raw)?;
    let author_normalized = normalize(&author_t)?;
    let merged = merge(reviewer_raw, &author_t, stage)?;
    let rules = RuleMatrices {
        reviewer: reverse_ranks(&reviewer_normalized, RuleProvenance::Reviewer)?,
        author: reverse_ranks(&author_normalized, RuleProvenance::Author)?,
        merged: reverse_ranks(&merged, RuleProvenance::Merged)?,
    };
    Ok(PreferenceStages {
        reviewer_raw: *reviewer_raw,
        author_raw: *author_raw,
        reviewer_normalized,
        author_normalized,
        merged,
        rules,
    })
}

/// Full conversion from questionnaire answers.
pub fn build_rule_matrices(responses: &[QuestionnaireResponse], stage: MergeStage) -> Result<RuleMatrices> {
    let acc = accumulate_responses(responses);
    Ok(derive_stages(&acc.reviewer, &acc.author, stage)?.rules)
}
